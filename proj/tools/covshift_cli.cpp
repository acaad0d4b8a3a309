// Command-line front end: instance generation, sample-size sweeps, stepsize
// tuning, closed-form bound reports, self-verification, the two-spike scaling
// study, and SVG plotting of sweep CSVs.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "covshift/bounds.hpp"
#include "covshift/checks.hpp"
#include "covshift/instance.hpp"
#include "covshift/oracle.hpp"
#include "covshift/study.hpp"
#include "covshift/sweep.hpp"

namespace {

using namespace covshift;

struct SweepFlags {
    std::string config_path;
    std::string instance_spec;
    std::string mode;
    std::string samples;
    std::string gammas;
    std::int64_t pretrain_budget = -1;
    std::int64_t repeats = -1;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string evaluator;
    std::string out;
    int workers = 1;
};

template <typename T, typename Parse>
std::vector<T> split_list(const std::string& s, Parse parse) {
    std::vector<T> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(parse(item));
    return out;
}

SweepConfig build_config(const SweepFlags& flags) {
    SweepConfig cfg;
    if (!flags.config_path.empty()) cfg = load_config(flags.config_path);
    if (!flags.instance_spec.empty()) cfg.instance_spec = flags.instance_spec;
    if (!flags.mode.empty()) cfg.mode = parse_mode(flags.mode);
    if (!flags.samples.empty())
        cfg.sample_grid = split_list<std::int64_t>(
            flags.samples, [](const std::string& s) { return std::stoll(s); });
    if (!flags.gammas.empty())
        cfg.gamma_grid = split_list<double>(
            flags.gammas, [](const std::string& s) { return std::stod(s); });
    if (flags.pretrain_budget >= 0) cfg.pretrain_budget = flags.pretrain_budget;
    if (flags.repeats > 0) cfg.repeats = flags.repeats;
    if (flags.seed_set) cfg.base_seed = flags.seed;
    if (!flags.evaluator.empty()) cfg.evaluator = parse_evaluator(flags.evaluator);
    validate_config(cfg);
    return cfg;
}

void add_sweep_flags(CLI::App* cmd, SweepFlags& flags, bool instance_required) {
    cmd->add_option("--config", flags.config_path, "config file (key = value lines)");
    auto* inst = cmd->add_option("--instance", flags.instance_spec,
                                 "pk:K:D | example1:EPS | instance file path");
    if (instance_required) inst->required(false);
    cmd->add_option("--mode", flags.mode, "pretrain | finetune | supervised");
    cmd->add_option("--samples", flags.samples, "comma-separated sample sizes");
    cmd->add_option("--gammas", flags.gammas, "comma-separated stepsize grid");
    cmd->add_option("--pretrain-budget", flags.pretrain_budget,
                    "source samples fixed during finetune sweeps");
    cmd->add_option("--repeats", flags.repeats, "Monte Carlo repeats per row");
    cmd->add_option("--seed", flags.seed, "base seed")->each([&flags](const std::string&) {
        flags.seed_set = true;
    });
    cmd->add_option("--evaluator", flags.evaluator, "oracle | montecarlo");
    cmd->add_option("--workers", flags.workers, "worker threads");
    cmd->add_option("--out", flags.out, "output path");
}

std::vector<SweepRow> read_rows_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::vector<SweepRow> rows;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (header) {
            header = false;
            continue;
        }
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        SweepRow row;
        std::getline(ss, field, ',');
        row.mode = parse_mode(field);
        std::getline(ss, field, ',');
        row.sample_size = std::stoll(field);
        std::getline(ss, field, ',');
        row.gamma0 = std::stod(field);
        std::getline(ss, field, ',');
        row.gamma_m = std::stod(field);
        std::getline(ss, field, ',');
        row.mean_risk = std::stod(field);
        std::getline(ss, field, ',');
        row.stderr_risk = std::stod(field);
        std::getline(ss, field, ',');
        row.n_repeats = std::stoll(field);
        std::getline(ss, field, ',');
        row.error = (field == "error");
        if (!row.error) row.evaluator = parse_evaluator(field);
        rows.push_back(row);
    }
    return rows;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Covariate-shift SGD laboratory: two-phase SGD, exact risk oracle, "
                 "instance-dependent bounds, and sweep experiments"};
    app.require_subcommand(1);

    // gen-instance
    std::string gen_spec, gen_out;
    auto* gen = app.add_subcommand("gen-instance", "write an instance file");
    gen->add_option("--instance", gen_spec, "pk:K:D | example1:EPS | file path")->required();
    gen->add_option("--out", gen_out, "output path (default stdout)");

    // sweep
    SweepFlags sweep_flags;
    auto* sweep = app.add_subcommand("sweep", "tuned sample-size sweep, CSV output");
    add_sweep_flags(sweep, sweep_flags, true);

    // tune
    SweepFlags tune_flags;
    std::int64_t tune_samples = 0;
    auto* tune = app.add_subcommand("tune", "grid-search stepsizes for one sample size");
    add_sweep_flags(tune, tune_flags, true);
    tune->add_option("--size", tune_samples, "sample size to tune for")->required();

    // bounds
    std::string bounds_spec, bounds_out;
    std::int64_t bounds_m = 0, bounds_n = 0;
    double bounds_g0 = 0.0, bounds_gm = 0.0;
    auto* bounds_cmd = app.add_subcommand("bounds", "closed-form bound report");
    bounds_cmd->add_option("--instance", bounds_spec, "instance spec")->required();
    bounds_cmd->add_option("--m", bounds_m, "source samples")->required();
    bounds_cmd->add_option("--n", bounds_n, "target samples")->required();
    bounds_cmd->add_option("--gamma0", bounds_g0, "pretraining initial stepsize");
    bounds_cmd->add_option("--gammaM", bounds_gm, "finetuning initial stepsize");
    bounds_cmd->add_option("--out", bounds_out, "output path (default stdout)");

    // verify
    std::uint64_t verify_seed = 42;
    auto* verify = app.add_subcommand("verify", "run self-checks, nonzero exit on failure");
    verify->add_option("--seed", verify_seed, "seed for randomized checks");

    // example1
    std::string ex1_eps = "0.25,0.0625,0.015625", ex1_out;
    auto* ex1 = app.add_subcommand("example1", "two-spike scaling study");
    ex1->add_option("--eps", ex1_eps, "comma-separated eps values");
    ex1->add_option("--out", ex1_out, "output path (default stdout)");

    // plot
    std::string plot_in, plot_out;
    auto* plot = app.add_subcommand("plot", "render a sweep CSV as an SVG chart");
    plot->add_option("--in", plot_in, "sweep CSV path")->required();
    plot->add_option("--out", plot_out, "SVG output path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            const ProblemInstance inst = resolve_instance_spec(gen_spec);
            if (gen_out.empty())
                std::cout << format_instance(inst);
            else
                save_instance(inst, gen_out);
        } else if (sweep->parsed()) {
            const SweepConfig cfg = build_config(sweep_flags);
            const std::vector<SweepRow> rows = run_sweep(cfg, sweep_flags.workers);
            if (sweep_flags.out.empty())
                std::cout << rows_to_csv(rows);
            else
                emit_csv(rows, sweep_flags.out);
        } else if (tune->parsed()) {
            const SweepConfig cfg = build_config(tune_flags);
            const ProblemInstance inst = resolve_instance_spec(cfg.instance_spec);
            const TunedGammas tuned = tune_stepsizes(inst, cfg, tune_samples);
            std::printf("gamma0 = %.15g\ngammaM = %.15g\noracle_risk = %.15g\n",
                        tuned.gamma0, tuned.gamma_m, tuned.risk);
        } else if (bounds_cmd->parsed()) {
            const ProblemInstance inst = resolve_instance_spec(bounds_spec);
            const Schedule sched{bounds_m, bounds_n, bounds_g0, bounds_gm};
            const BoundReport rep =
                make_bound_report(inst, sched, MomentConstants::gaussian(inst));
            const RiskSplit oracle = expected_excess_risk(inst, sched);
            std::string text = serialize_bound_report(rep);
            char buf[160];
            std::snprintf(buf, sizeof(buf),
                          "oracle_bias = %.15g\noracle_variance = %.15g\noracle_risk = %.15g\n",
                          oracle.bias, oracle.variance, oracle.total());
            text += buf;
            if (bounds_out.empty()) {
                std::cout << text;
            } else {
                std::ofstream out(bounds_out);
                if (!out) throw IoError("cannot open '" + bounds_out + "' for writing");
                out << text;
            }
        } else if (verify->parsed()) {
            bool all_pass = true;
            for (const CheckResult& res : run_verify_checks(verify_seed)) {
                std::printf("%s %-24s %s\n", res.pass ? "PASS" : "FAIL", res.name.c_str(),
                            res.detail.c_str());
                all_pass = all_pass && res.pass;
            }
            return all_pass ? 0 : 1;
        } else if (ex1->parsed()) {
            const std::vector<double> eps = split_list<double>(
                ex1_eps, [](const std::string& s) { return std::stod(s); });
            const Example1Study study = example1_study(eps);
            const std::string csv = study_to_csv(study);
            if (ex1_out.empty()) {
                std::cout << csv;
            } else {
                std::ofstream out(ex1_out);
                if (!out) throw IoError("cannot open '" + ex1_out + "' for writing");
                out << csv;
            }
        } else if (plot->parsed()) {
            emit_svg(read_rows_csv(plot_in), plot_out);
        }
    } catch (const IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
