#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "quermass/conjecture_search.hpp"

namespace quermass {

// Shared knobs of the randomized suites; a value <= 0 selects the suite default.
struct SuiteParams {
    int n = 3;
    int resolution = 0;
    int degree_cap = 0;
    double lambda_cut = 0;
    double eps = 0;
    int samples = 0;
    std::uint64_t seed = 1;
};

struct SuiteOutcome {
    bool passed = true;
    std::vector<std::string> failures;
    std::map<std::string, double> stats;
    std::map<std::string, double> resolved;  // parameters after defaults were applied

    void fail(std::string message);
};

// Each suite writes one CSV (header included) and reports its assertions.
// Normal-deviation bounds and the H identity on random domains.
SuiteOutcome run_lemma32_suite(const SuiteParams& p, std::ostream& csv);
// Frequency-split cubic estimate for both nonlinearity presets over the C^1 sizes eps, eps/2, eps/4,
// asserting each margin and a decreasing worst slack ratio.
SuiteOutcome run_lemma41_suite(const SuiteParams& p, std::ostream& csv);
SuiteOutcome run_lemma42_suite(const SuiteParams& p, std::ostream& csv);
// Exact (a = 1) and preset cases over the given (n, kappa, eps) lists.
SuiteOutcome run_lemma_a1_suite(const std::vector<int>& ns, const std::vector<double>& kappas,
                                const std::vector<double>& epss, std::ostream& csv);
// Reported only: the slack function in the pole estimate is unquantified.
SuiteOutcome run_pole_suite(const SuiteParams& p, std::ostream& csv);
// which: nuclear, volumetric (adds the stability ratio), minkowski, or axial (zonal profiles).
SuiteOutcome run_deficit_suite(const std::string& which, const SuiteParams& p, std::ostream& csv);

SuiteOutcome run_counterexample_sweep(int n, double eps, const std::vector<double>& kappas, std::uint64_t seed,
                                      bool with_grid, std::ostream& csv);
// Doubling ladder until int H < -1; fails when no rung gets there.
SuiteOutcome run_negative_h_search(int n, double eps, std::uint64_t seed, std::ostream& csv);

// Trivial bound and gradient validation on the search; best candidate returned through best.
SuiteOutcome run_conjecture_search(int n, int basis_cap, int restarts, std::uint64_t seed,
                                   const SearchOptions& options, std::ostream& csv, SearchResult* result = nullptr);
// Ratios > 0 and ||grad u_k||_inf nonincreasing within 10%.
SuiteOutcome run_green_sequence(int n, const std::vector<int>& ks, std::ostream& csv);

}  // namespace quermass
