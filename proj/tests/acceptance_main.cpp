// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Criteria with a runtime budget report elapsed seconds and
// fail when the budget is exceeded.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "covshift/checks.hpp"

namespace {

struct Criterion {
    int number;
    std::string title;
    double time_budget_s; // <= 0: no budget
    std::function<covshift::CheckResult()> run;
};

} // namespace

int main() {
    using covshift::CheckResult;
    const std::vector<Criterion> criteria = {
        {1, "oracle exactness vs quadrature", 10.0,
         [] { return covshift::check_oracle_exactness(20250817); }},
        {2, "monte carlo / oracle agreement", 60.0,
         [] { return covshift::check_mc_oracle_agreement(42); }},
        {3, "bound sandwich", 60.0, [] { return covshift::check_bound_sandwich(); }},
        {4, "index-set optimality", 60.0,
         [] { return covshift::check_index_set_optimality(7); }},
        {5, "example-1 scaling", 300.0, [] { return covshift::check_example1_scaling(); }},
        {6, "figure-1 qualitative reproduction", 300.0,
         [] { return covshift::check_figure1_properties(); }},
        {7, "pretraining threshold consistency", 120.0,
         [] { return covshift::check_threshold_consistency(11); }},
        {8, "sweep determinism", 0.0,
         [] { return covshift::check_sweep_determinism("."); }},
        {9, "crude variance bound", 0.0,
         [] { return covshift::check_crude_variance_bound(3); }},
    };

    bool all_pass = true;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        const CheckResult res = c.run();
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool pass = res.pass;
        std::string note = res.detail;
        if (c.time_budget_s > 0.0 && elapsed > c.time_budget_s) {
            pass = false;
            note += " [over time budget]";
        }
        std::printf("%s criterion %d (%s) [%.1fs]: %s\n", pass ? "PASS" : "FAIL", c.number,
                    c.title.c_str(), elapsed, note.c_str());
        std::fflush(stdout);
        all_pass = all_pass && pass;
    }
    return all_pass ? 0 : 1;
}
