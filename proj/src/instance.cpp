#include "covshift/instance.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace covshift {

MomentConstants MomentConstants::gaussian(const ProblemInstance& inst) {
    MomentConstants c;
    c.alpha = 3.0;
    c.beta = 1.0;
    c.r2 = 3.0 * std::max(inst.g.trace(), inst.h.trace());
    return c;
}

ProblemInstance make_custom_instance(Spectrum g, Spectrum h,
                                     std::vector<double> w_star, double sigma2) {
    const std::size_t d = w_star.size();
    if (g.dim() != d || h.dim() != d)
        throw std::invalid_argument("instance: g, h, w_star must share one dimension");
    if (d == 0)
        throw std::invalid_argument("instance: dimension must be positive");
    if (!(sigma2 >= 0.0) || !std::isfinite(sigma2))
        throw std::invalid_argument("instance: sigma2 must be finite and >= 0");
    if (!(g.trace() > 0.0))
        throw std::invalid_argument("instance: tr(G) must be positive");
    if (!(h.trace() > 0.0))
        throw std::invalid_argument("instance: tr(H) must be positive");
    for (double v : w_star)
        if (!std::isfinite(v))
            throw std::invalid_argument("instance: w_star entries must be finite");
    ProblemInstance inst;
    inst.w_star = std::move(w_star);
    inst.g = std::move(g);
    inst.h = std::move(h);
    inst.sigma2 = sigma2;
    return inst;
}

ProblemInstance make_pk_instance(int k, int d) {
    if (k < 1)
        throw std::invalid_argument("make_pk_instance: k must be >= 1");
    if (d < k)
        throw std::invalid_argument("make_pk_instance: d must be >= k");
    std::vector<double> g(d), h(d), w(d);
    for (int i = 1; i <= d; ++i) {
        h[i - 1] = std::pow(static_cast<double>(i), -1.5);
        // Top-k prefix of the i^{-2} law is reversed: slot i holds (k+1-i)^{-2}.
        const int src = (i <= k) ? (k + 1 - i) : i;
        g[i - 1] = 1.0 / (static_cast<double>(src) * src);
        w[i - 1] = (i <= k) ? 1.0 : 1.0 / static_cast<double>(i);
    }
    return make_custom_instance(Spectrum(std::move(g)), Spectrum(std::move(h)),
                                std::move(w), 1.0);
}

ProblemInstance make_example1_instance(double eps) {
    if (!(eps > 0.0) || !(eps < 1.0))
        throw std::invalid_argument("make_example1_instance: eps must lie in (0,1)");
    const double copies_real = 2.0 / std::sqrt(eps);
    const double rounded = std::round(copies_real);
    if (std::abs(copies_real - rounded) > 1e-9 * std::max(1.0, rounded))
        throw std::invalid_argument("make_example1_instance: 2*eps^{-0.5} must be an integer");
    const int copies = static_cast<int>(rounded);
    const int d = 1 + copies; // truncated at the last nonzero eigenvalue of H
    std::vector<double> g(d, 0.0), h(d, 0.0), w(d, 0.0);
    h[0] = 1.0;
    for (int i = 1; i <= copies; ++i) h[i] = std::sqrt(eps);
    g[0] = eps * eps;
    g[1] = 1.0;
    w[0] = 1.0;
    w[1] = 1.0;
    return make_custom_instance(Spectrum(std::move(g)), Spectrum(std::move(h)),
                                std::move(w), 1.0);
}

NormPair instance_norms(const ProblemInstance& inst, const std::vector<double>& w) {
    if (w.size() != inst.dim())
        throw std::invalid_argument("instance_norms: dimension mismatch");
    NormPair out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        out.norm_g += inst.g[i] * w[i] * w[i];
        out.norm_h += inst.h[i] * w[i] * w[i];
    }
    return out;
}

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string format_list(const std::vector<double>& vs) {
    std::string out;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (i) out += ',';
        out += format_double(vs[i]);
    }
    return out;
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<double> parse_list(const std::string& s, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty())
            throw std::invalid_argument("instance file: empty entry in list '" + key + "'");
        char* end = nullptr;
        const double v = std::strtod(item.c_str(), &end);
        if (end == item.c_str() || *end != '\0')
            throw std::invalid_argument("instance file: bad number '" + item + "' in '" + key + "'");
        out.push_back(v);
    }
    if (out.empty())
        throw std::invalid_argument("instance file: list '" + key + "' is empty");
    return out;
}

} // namespace

std::string format_instance(const ProblemInstance& inst) {
    std::string out;
    out += "g = " + format_list(inst.g.values()) + "\n";
    out += "h = " + format_list(inst.h.values()) + "\n";
    out += "w_star = " + format_list(inst.w_star) + "\n";
    out += "sigma2 = " + format_double(inst.sigma2) + "\n";
    return out;
}

ProblemInstance parse_instance(const std::string& text) {
    std::vector<double> g, h, w;
    double sigma2 = -1.0;
    bool have_g = false, have_h = false, have_w = false, have_s = false;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("instance file: expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key == "g") { g = parse_list(val, key); have_g = true; }
        else if (key == "h") { h = parse_list(val, key); have_h = true; }
        else if (key == "w_star") { w = parse_list(val, key); have_w = true; }
        else if (key == "sigma2") { sigma2 = parse_list(val, key).at(0); have_s = true; }
        else throw std::invalid_argument("instance file: unknown key '" + key + "'");
    }
    if (!have_g || !have_h || !have_w || !have_s)
        throw std::invalid_argument("instance file: keys g, h, w_star, sigma2 are all required");
    return make_custom_instance(Spectrum(std::move(g)), Spectrum(std::move(h)),
                                std::move(w), sigma2);
}

void save_instance(const ProblemInstance& inst, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << format_instance(inst);
    if (!out) throw IoError("write failed for '" + path + "'");
}

ProblemInstance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_instance(ss.str());
}

ProblemInstance resolve_instance_spec(const std::string& spec) {
    if (spec.rfind("pk:", 0) == 0) {
        const std::size_t c = spec.find(':', 3);
        if (c == std::string::npos)
            throw std::invalid_argument("instance spec: expected pk:K:D");
        const int k = std::atoi(spec.substr(3, c - 3).c_str());
        const int d = std::atoi(spec.substr(c + 1).c_str());
        if (k <= 0 || d <= 0)
            throw std::invalid_argument("instance spec: bad pk:K:D values in '" + spec + "'");
        return make_pk_instance(k, d);
    }
    if (spec.rfind("example1:", 0) == 0) {
        char* end = nullptr;
        const std::string num = spec.substr(9);
        const double eps = std::strtod(num.c_str(), &end);
        if (end == num.c_str() || *end != '\0')
            throw std::invalid_argument("instance spec: bad eps in '" + spec + "'");
        return make_example1_instance(eps);
    }
    return load_instance(spec);
}

} // namespace covshift
