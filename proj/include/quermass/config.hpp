#pragma once

#include <map>
#include <type_traits>
#include <string>

namespace quermass {

// Every tolerance and tunable default lives here so that a run can override
// any of them with --tolerance KEY=VAL and echo the resolved values.
struct Tolerances {
    double node_norm = 1e-14;
    double weight_sum_rel = 1e-12;
    double polynomial_exact_rel = 1e-10;
    double synthesis_sup = 1e-9;
    double tangency = 1e-10;
    double trace_laplacian = 1e-8;

    double h_forms_sup = 1e-7;
    double trace_second_fundamental = 1e-8;

    double normalize_measure_rel = 1e-10;
    double normalize_barycenter = 1e-8;
    int normalize_max_iter = 50;

    double lemma32_bound = 10.0;
    double lemma41_c_slack = 5.0;
    double lemma42_margin = 1e-8;
    double lemma_a1_c_rem = 5.0;

    double pole_slack = 1.1;
    double pole_c0 = 3.0;
    double pole_condition = 1e-8;

    double deficit_margin = 1e-8;
    double stability_denominator = 1e-14;

    double conjecture_feasible = 1e-8;
    double conjecture_trivial = 1e-8;
    double gradient_check_rel = 1e-5;

    double eps_size_xtol = 1e-10;
    int eps_size_max_iter = 400;

    double counterexample_kappa_max = 40960.0;

    // Set a named value; returns false for unknown keys.
    bool set(const std::string& key, double value);
    std::map<std::string, double> as_map() const;
};

Tolerances& default_tolerances();

}  // namespace quermass
