#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "covshift/instance.hpp"
#include "covshift/oracle.hpp"
#include "covshift/schedule.hpp"

namespace covshift {

enum class Mode { Pretrain, Finetune, Supervised };
enum class Evaluator { Oracle, MonteCarlo };

std::string mode_name(Mode mode);
Mode parse_mode(const std::string& name);
std::string evaluator_name(Evaluator ev);
Evaluator parse_evaluator(const std::string& name);

// One sample-size sweep for one algorithm mode. In finetune mode the sample
// grid counts target samples on top of a fixed pretraining budget of source
// samples; in the other modes it counts the single phase's samples.
struct SweepConfig {
    std::string instance_spec;
    Mode mode = Mode::Supervised;
    std::vector<std::int64_t> sample_grid;
    std::vector<double> gamma_grid; // empty: derive the default grid per instance
    std::optional<std::int64_t> pretrain_budget;
    std::int64_t repeats = 20;
    std::uint64_t base_seed = 42;
    Evaluator evaluator = Evaluator::Oracle;
};

void validate_config(const SweepConfig& cfg);

// Flat `key = value` config text, keys named after the fields above,
// lists comma-separated.
SweepConfig parse_config(const std::string& text);
SweepConfig load_config(const std::string& path);

struct SweepRow {
    Mode mode = Mode::Supervised;
    std::int64_t sample_size = 0;
    double gamma0 = 0.0;
    double gamma_m = 0.0;
    double mean_risk = 0.0;
    double stderr_risk = 0.0;
    std::int64_t n_repeats = 0;
    Evaluator evaluator = Evaluator::Oracle;
    bool error = false;
    std::string error_message;
};

// Log-spaced grid, 16 points per decade over [1e-4, 1/(4 * 3 * max trace)].
std::vector<double> default_gamma_grid(const ProblemInstance& inst);
std::vector<double> log_gamma_grid(double lo, double hi, int points_per_decade);

Schedule schedule_for(Mode mode, std::int64_t sample_size,
                      std::optional<std::int64_t> pretrain_budget, double gamma0,
                      double gamma_m);

struct TunedGammas {
    double gamma0 = 0.0;
    double gamma_m = 0.0;
    double risk = 0.0; // oracle risk at the selected grid point
};

// Grid search minimizing the oracle risk; ties break toward the smaller
// stepsize (smaller gamma0 first, then smaller gamma_m). Finetune mode
// searches pairs and always includes gamma_m = 0 among the candidates.
TunedGammas tune_stepsizes(const ProblemInstance& inst, const SweepConfig& cfg,
                           std::int64_t sample_size);

// Tunes and evaluates every sample size of the grid. Rows are deterministic
// functions of (config, row index): per-row seeds come from derive_seed, and
// Monte Carlo means use pairwise summation, so neither the worker count nor
// scheduling order can change any output bit.
std::vector<SweepRow> run_sweep(const ProblemInstance& inst, const SweepConfig& cfg,
                                int workers = 1);
std::vector<SweepRow> run_sweep(const SweepConfig& cfg, int workers = 1);

std::string rows_to_csv(const std::vector<SweepRow>& rows);
void emit_csv(const std::vector<SweepRow>& rows, const std::string& path);

// Log-log chart, one polyline per mode, markers on every point.
std::string rows_to_svg(const std::vector<SweepRow>& rows);
void emit_svg(const std::vector<SweepRow>& rows, const std::string& path);

// Numerically stable order-fixed reduction used for Monte Carlo aggregation.
double pairwise_sum(const std::vector<double>& values);

} // namespace covshift
