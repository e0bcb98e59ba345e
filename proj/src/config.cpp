#include "quermass/config.hpp"

namespace quermass {

namespace {

template <class F>
void visit(Tolerances& t, F&& f) {
    f("node_norm", t.node_norm);
    f("weight_sum_rel", t.weight_sum_rel);
    f("polynomial_exact_rel", t.polynomial_exact_rel);
    f("synthesis_sup", t.synthesis_sup);
    f("tangency", t.tangency);
    f("trace_laplacian", t.trace_laplacian);
    f("h_forms_sup", t.h_forms_sup);
    f("trace_second_fundamental", t.trace_second_fundamental);
    f("normalize_measure_rel", t.normalize_measure_rel);
    f("normalize_barycenter", t.normalize_barycenter);
    f("normalize_max_iter", t.normalize_max_iter);
    f("lemma32_bound", t.lemma32_bound);
    f("lemma41_c_slack", t.lemma41_c_slack);
    f("lemma42_margin", t.lemma42_margin);
    f("lemma_a1_c_rem", t.lemma_a1_c_rem);
    f("pole_slack", t.pole_slack);
    f("pole_c0", t.pole_c0);
    f("pole_condition", t.pole_condition);
    f("deficit_margin", t.deficit_margin);
    f("stability_denominator", t.stability_denominator);
    f("conjecture_feasible", t.conjecture_feasible);
    f("conjecture_trivial", t.conjecture_trivial);
    f("gradient_check_rel", t.gradient_check_rel);
    f("eps_size_xtol", t.eps_size_xtol);
    f("eps_size_max_iter", t.eps_size_max_iter);
    f("counterexample_kappa_max", t.counterexample_kappa_max);
}

}  // namespace

bool Tolerances::set(const std::string& key, double value) {
    bool found = false;
    visit(*this, [&](const char* name, auto& field) {
        if (key == name) {
            field = static_cast<std::remove_reference_t<decltype(field)>>(value);
            found = true;
        }
    });
    return found;
}

std::map<std::string, double> Tolerances::as_map() const {
    std::map<std::string, double> out;
    auto copy = *this;
    visit(copy, [&](const char* name, auto& field) { out[name] = static_cast<double>(field); });
    return out;
}

Tolerances& default_tolerances() {
    static Tolerances t;
    return t;
}

}  // namespace quermass
