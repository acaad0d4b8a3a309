#include "covshift/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "covshift/rng.hpp"
#include "covshift/sgd.hpp"

namespace covshift {

std::string mode_name(Mode mode) {
    switch (mode) {
        case Mode::Pretrain: return "pretrain";
        case Mode::Finetune: return "finetune";
        case Mode::Supervised: return "supervised";
    }
    return "unknown";
}

Mode parse_mode(const std::string& name) {
    if (name == "pretrain") return Mode::Pretrain;
    if (name == "finetune") return Mode::Finetune;
    if (name == "supervised") return Mode::Supervised;
    throw std::invalid_argument("unknown mode '" + name + "'");
}

std::string evaluator_name(Evaluator ev) {
    return ev == Evaluator::Oracle ? "oracle" : "montecarlo";
}

Evaluator parse_evaluator(const std::string& name) {
    if (name == "oracle") return Evaluator::Oracle;
    if (name == "montecarlo") return Evaluator::MonteCarlo;
    throw std::invalid_argument("unknown evaluator '" + name + "'");
}

void validate_config(const SweepConfig& cfg) {
    if (cfg.instance_spec.empty())
        throw std::invalid_argument("config: instance_spec is required");
    if (cfg.sample_grid.empty())
        throw std::invalid_argument("config: sample_grid must be nonempty");
    for (std::int64_t s : cfg.sample_grid)
        if (s <= 0) throw std::invalid_argument("config: sample sizes must be positive");
    if (cfg.mode == Mode::Finetune && !cfg.pretrain_budget)
        throw std::invalid_argument("config: finetune mode requires pretrain_budget");
    if (cfg.pretrain_budget && *cfg.pretrain_budget < 0)
        throw std::invalid_argument("config: pretrain_budget must be >= 0");
    if (cfg.repeats <= 0)
        throw std::invalid_argument("config: repeats must be positive");
    for (double g : cfg.gamma_grid)
        if (!(g > 0.0)) throw std::invalid_argument("config: gamma grid must be positive");
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

template <typename T, typename Parse>
std::vector<T> parse_csv_list(const std::string& s, Parse parse) {
    std::vector<T> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse(item));
    }
    return out;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return buf;
}

} // namespace

SweepConfig parse_config(const std::string& text) {
    SweepConfig cfg;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key == "instance_spec") cfg.instance_spec = val;
        else if (key == "mode") cfg.mode = parse_mode(val);
        else if (key == "sample_grid")
            cfg.sample_grid = parse_csv_list<std::int64_t>(
                val, [](const std::string& s) { return std::stoll(s); });
        else if (key == "gamma_grid")
            cfg.gamma_grid = parse_csv_list<double>(
                val, [](const std::string& s) { return std::stod(s); });
        else if (key == "pretrain_budget") cfg.pretrain_budget = std::stoll(val);
        else if (key == "repeats") cfg.repeats = std::stoll(val);
        else if (key == "base_seed") cfg.base_seed = std::stoull(val);
        else if (key == "evaluator") cfg.evaluator = parse_evaluator(val);
        else throw std::invalid_argument("config: unknown key '" + key + "'");
    }
    validate_config(cfg);
    return cfg;
}

SweepConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::vector<double> log_gamma_grid(double lo, double hi, int points_per_decade) {
    if (!(lo > 0.0) || !(hi >= lo) || points_per_decade <= 0)
        throw std::invalid_argument("log_gamma_grid: need 0 < lo <= hi, points > 0");
    std::vector<double> grid;
    const double step = std::pow(10.0, 1.0 / points_per_decade);
    for (double g = lo; g < hi * (1.0 - 1e-12); g *= step) grid.push_back(g);
    grid.push_back(hi);
    return grid;
}

std::vector<double> default_gamma_grid(const ProblemInstance& inst) {
    const double cap = 1.0 / (12.0 * std::max(inst.g.trace(), inst.h.trace()));
    const double lo = std::min(1e-4, cap);
    return log_gamma_grid(lo, cap, 16);
}

Schedule schedule_for(Mode mode, std::int64_t sample_size,
                      std::optional<std::int64_t> pretrain_budget, double gamma0,
                      double gamma_m) {
    Schedule sched;
    switch (mode) {
        case Mode::Pretrain:
            sched.m = sample_size;
            sched.gamma0 = gamma0;
            break;
        case Mode::Supervised:
            sched.n = sample_size;
            sched.gamma_m = gamma_m;
            break;
        case Mode::Finetune:
            sched.m = pretrain_budget.value_or(0);
            sched.n = sample_size;
            sched.gamma0 = gamma0;
            sched.gamma_m = gamma_m;
            break;
    }
    return sched;
}

TunedGammas tune_stepsizes(const ProblemInstance& inst, const SweepConfig& cfg,
                           std::int64_t sample_size) {
    const std::vector<double> grid =
        cfg.gamma_grid.empty() ? default_gamma_grid(inst) : cfg.gamma_grid;
    if (grid.empty()) throw std::invalid_argument("tune_stepsizes: empty gamma grid");

    TunedGammas best;
    best.risk = std::numeric_limits<double>::infinity();

    if (cfg.mode == Mode::Finetune) {
        const std::int64_t m = cfg.pretrain_budget.value_or(0);
        std::vector<double> gm_grid;
        gm_grid.push_back(0.0);
        gm_grid.insert(gm_grid.end(), grid.begin(), grid.end());
        const std::vector<double> g0_grid =
            (m > 0) ? grid : std::vector<double>{0.0};
        for (double g0 : g0_grid) {
            DiagState after_pretrain = initial_state(inst);
            evolve_phase(after_pretrain, inst.g, m, g0, inst.sigma2);
            for (double gm : gm_grid) {
                DiagState st = after_pretrain;
                evolve_phase(st, inst.h, sample_size, gm, inst.sigma2);
                const double risk = state_risk(inst, st).total();
                if (risk < best.risk) best = {g0, gm, risk};
            }
        }
        return best;
    }

    for (double g : grid) {
        const Schedule sched =
            schedule_for(cfg.mode, sample_size, cfg.pretrain_budget, g, g);
        const double risk = expected_excess_risk(inst, sched).total();
        if (risk < best.risk) {
            best.risk = risk;
            best.gamma0 = (cfg.mode == Mode::Pretrain) ? g : 0.0;
            best.gamma_m = (cfg.mode == Mode::Supervised) ? g : 0.0;
        }
    }
    return best;
}

double pairwise_sum(const std::vector<double>& values) {
    // Recursion keyed only by index ranges: the result is independent of how
    // the values were produced.
    struct Rec {
        const std::vector<double>& v;
        double sum(std::size_t lo, std::size_t hi) const {
            if (hi - lo <= 4) {
                double s = 0.0;
                for (std::size_t i = lo; i < hi; ++i) s += v[i];
                return s;
            }
            const std::size_t mid = lo + (hi - lo) / 2;
            return sum(lo, mid) + sum(mid, hi);
        }
    };
    if (values.empty()) return 0.0;
    return Rec{values}.sum(0, values.size());
}

namespace {

SweepRow evaluate_row(const ProblemInstance& inst, const SweepConfig& cfg,
                      std::int64_t row_index, std::int64_t sample_size) {
    SweepRow row;
    row.mode = cfg.mode;
    row.sample_size = sample_size;
    row.evaluator = cfg.evaluator;
    try {
        const TunedGammas tuned = tune_stepsizes(inst, cfg, sample_size);
        row.gamma0 = tuned.gamma0;
        row.gamma_m = tuned.gamma_m;
        if (cfg.evaluator == Evaluator::Oracle) {
            row.mean_risk = tuned.risk;
            row.stderr_risk = 0.0;
            row.n_repeats = 1;
        } else {
            const Schedule sched = schedule_for(cfg.mode, sample_size, cfg.pretrain_budget,
                                                tuned.gamma0, tuned.gamma_m);
            const std::uint64_t row_seed = derive_seed(cfg.base_seed, row_index);
            std::vector<double> risks(cfg.repeats);
            for (std::int64_t r = 0; r < cfg.repeats; ++r) {
                const RunResult res = run_sgd(inst, sched, derive_seed(row_seed, r));
                risks[r] = excess_risk(inst, res.w_final);
            }
            const double mean = pairwise_sum(risks) / static_cast<double>(cfg.repeats);
            std::vector<double> sq(cfg.repeats);
            for (std::int64_t r = 0; r < cfg.repeats; ++r)
                sq[r] = (risks[r] - mean) * (risks[r] - mean);
            const double var = (cfg.repeats > 1)
                                   ? pairwise_sum(sq) / static_cast<double>(cfg.repeats - 1)
                                   : 0.0;
            row.mean_risk = mean;
            row.stderr_risk = std::sqrt(var / static_cast<double>(cfg.repeats));
            row.n_repeats = cfg.repeats;
        }
    } catch (const std::exception& e) {
        row.error = true;
        row.error_message = e.what();
        row.mean_risk = std::numeric_limits<double>::quiet_NaN();
        row.stderr_risk = std::numeric_limits<double>::quiet_NaN();
    }
    return row;
}

} // namespace

std::vector<SweepRow> run_sweep(const ProblemInstance& inst, const SweepConfig& cfg,
                                int workers) {
    validate_config(cfg);
    if (workers < 1) workers = 1;
    std::vector<SweepRow> rows(cfg.sample_grid.size());
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cfg.sample_grid.size()) break;
            rows[i] = evaluate_row(inst, cfg, static_cast<std::int64_t>(i),
                                   cfg.sample_grid[i]);
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (std::thread& t : pool) t.join();
    }
    std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
        if (a.mode != b.mode) return static_cast<int>(a.mode) < static_cast<int>(b.mode);
        return a.sample_size < b.sample_size;
    });
    return rows;
}

std::vector<SweepRow> run_sweep(const SweepConfig& cfg, int workers) {
    validate_config(cfg);
    const ProblemInstance inst = resolve_instance_spec(cfg.instance_spec);
    return run_sweep(inst, cfg, workers);
}

std::string rows_to_csv(const std::vector<SweepRow>& rows) {
    std::string out = "mode,sample_size,gamma0,gammaM,mean_risk,stderr_risk,n_repeats,evaluator\n";
    for (const SweepRow& r : rows) {
        out += mode_name(r.mode);
        out += ',';
        out += std::to_string(r.sample_size);
        out += ',';
        out += format_double(r.gamma0);
        out += ',';
        out += format_double(r.gamma_m);
        out += ',';
        out += format_double(r.mean_risk);
        out += ',';
        out += format_double(r.stderr_risk);
        out += ',';
        out += std::to_string(r.n_repeats);
        out += ',';
        out += r.error ? "error" : evaluator_name(r.evaluator);
        out += '\n';
    }
    return out;
}

void emit_csv(const std::vector<SweepRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << rows_to_csv(rows);
    if (!out) throw IoError("write failed for '" + path + "'");
}

namespace {

struct PlotPoint {
    double x = 0.0, y = 0.0;
};

} // namespace

std::string rows_to_svg(const std::vector<SweepRow>& rows) {
    if (rows.empty()) throw std::invalid_argument("rows_to_svg: no rows to plot");
    const double width = 720.0, height = 540.0;
    const double ml = 70.0, mr = 20.0, mt = 20.0, mb = 60.0;

    double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;
    bool first = true;
    for (const SweepRow& r : rows) {
        if (r.error || !(r.mean_risk > 0.0) || r.sample_size <= 0) continue;
        const double lx = std::log10(static_cast<double>(r.sample_size));
        const double ly = std::log10(r.mean_risk);
        if (first) {
            xmin = xmax = lx;
            ymin = ymax = ly;
            first = false;
        } else {
            xmin = std::min(xmin, lx);
            xmax = std::max(xmax, lx);
            ymin = std::min(ymin, ly);
            ymax = std::max(ymax, ly);
        }
    }
    if (first) throw std::invalid_argument("rows_to_svg: no plottable rows");
    if (xmax - xmin < 0.5) { xmin -= 0.25; xmax += 0.25; }
    if (ymax - ymin < 0.5) { ymin -= 0.25; ymax += 0.25; }

    auto px = [&](double lx) { return ml + (lx - xmin) / (xmax - xmin) * (width - ml - mr); };
    auto py = [&](double ly) { return height - mb - (ly - ymin) / (ymax - ymin) * (height - mt - mb); };
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6g", v);
        return std::string(buf);
    };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) +
           "\" height=\"" + num(height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<line x1=\"" + num(ml) + "\" y1=\"" + num(height - mb) + "\" x2=\"" +
           num(width - mr) + "\" y2=\"" + num(height - mb) + "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + num(ml) + "\" y1=\"" + num(mt) + "\" x2=\"" + num(ml) +
           "\" y2=\"" + num(height - mb) + "\" stroke=\"black\"/>\n";

    for (int e = static_cast<int>(std::ceil(xmin)); e <= static_cast<int>(std::floor(xmax)); ++e) {
        svg += "<text x=\"" + num(px(e)) + "\" y=\"" + num(height - mb + 18.0) +
               "\" font-size=\"11\" text-anchor=\"middle\">1e" + std::to_string(e) +
               "</text>\n";
    }
    for (int e = static_cast<int>(std::ceil(ymin)); e <= static_cast<int>(std::floor(ymax)); ++e) {
        svg += "<text x=\"" + num(ml - 8.0) + "\" y=\"" + num(py(e) + 4.0) +
               "\" font-size=\"11\" text-anchor=\"end\">1e" + std::to_string(e) +
               "</text>\n";
    }
    svg += "<text x=\"" + num((ml + width - mr) / 2.0) + "\" y=\"" + num(height - 16.0) +
           "\" font-size=\"14\" text-anchor=\"middle\">sample size</text>\n";
    svg += "<text x=\"18\" y=\"" + num((mt + height - mb) / 2.0) +
           "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
           num((mt + height - mb) / 2.0) + ")\">excess risk</text>\n";

    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c"};
    for (Mode mode : {Mode::Pretrain, Mode::Finetune, Mode::Supervised}) {
        std::vector<PlotPoint> pts;
        for (const SweepRow& r : rows) {
            if (r.mode != mode || r.error || !(r.mean_risk > 0.0)) continue;
            pts.push_back({px(std::log10(static_cast<double>(r.sample_size))),
                           py(std::log10(r.mean_risk))});
        }
        if (pts.empty()) continue;
        const char* color = colors[static_cast<int>(mode)];
        if (pts.size() > 1) {
            svg += "<polyline fill=\"none\" stroke=\"";
            svg += color;
            svg += "\" stroke-width=\"1.5\" points=\"";
            for (const PlotPoint& p : pts) svg += num(p.x) + "," + num(p.y) + " ";
            svg += "\"/>\n";
        }
        for (const PlotPoint& p : pts)
            svg += "<circle cx=\"" + num(p.x) + "\" cy=\"" + num(p.y) +
                   "\" r=\"3\" fill=\"" + color + "\"/>\n";
        svg += "<text x=\"" + num(pts.back().x + 6.0) + "\" y=\"" + num(pts.back().y) +
               "\" font-size=\"12\" fill=\"" + color + "\">" + mode_name(mode) +
               "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

void emit_svg(const std::vector<SweepRow>& rows, const std::string& path) {
    const std::string svg = rows_to_svg(rows);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << svg;
    if (!out) throw IoError("write failed for '" + path + "'");
}

} // namespace covshift
