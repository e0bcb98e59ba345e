#include "quermass/suites.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "quermass/appendix_counterexample.hpp"
#include "quermass/axisym.hpp"
#include "quermass/config.hpp"
#include "quermass/cubic_verifier.hpp"
#include "quermass/inequality_lab.hpp"
#include "quermass/numerics.hpp"

namespace quermass {

namespace {

int pick(int value, int fallback) { return value > 0 ? value : fallback; }
double pick(double value, double fallback) { return value > 0 ? value : fallback; }

std::string fmt(const char* pattern, double a, double b = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b);
    return buf;
}

// Grids for fields with curvature-level derivatives; S^2 resolves far more than S^3.
SpherePtr suite_sphere(const SuiteParams& p, int res3, int res4, int L4) {
    if (p.n == 3) return make_sphere(3, pick(p.resolution, res3));
    return make_sphere(p.n, pick(p.resolution, res4), pick(p.degree_cap, L4));
}

int field_degree(const SuiteParams& p, int L3, int L4) { return pick(p.degree_cap, p.n == 3 ? L3 : L4); }

void record(SuiteOutcome& o, const SuiteParams& p, int resolution, int degree, double eps, int samples,
            double lambda = 0) {
    o.resolved["n"] = p.n;
    o.resolved["resolution"] = resolution;
    o.resolved["degree_cap"] = degree;
    o.resolved["eps"] = eps;
    o.resolved["samples"] = samples;
    if (lambda > 0) o.resolved["lambda_cut"] = lambda;
}

}  // namespace

void SuiteOutcome::fail(std::string message) {
    passed = false;
    if (failures.size() < 20) failures.push_back(std::move(message));
}

SuiteOutcome run_lemma32_suite(const SuiteParams& p, std::ostream& csv) {
    SuiteOutcome out;
    SpherePtr s = suite_sphere(p, 24, 10, 4);
    const int L = field_degree(p, 6, 4);
    const double eps = pick(p.eps, 0.1);
    const int samples = pick(p.samples, 50);
    record(out, p, s->grid().resolution, L, eps, samples);
    write_lemma32_csv_header(csv);
    double worst = 0;
    for (int i = 0; i < samples; ++i) {
        std::uint64_t seed = derive_seed(p.seed, i);
        StarDomain K = random_domain(s, L, eps, seed);
        Lemma32Report r = lemma32_check(K);
        write_lemma32_csv_row(csv, seed, eps_size(K).value, r);
        worst = std::max({worst, r.pointwise_gradient_over_normal, r.pointwise_normal_over_gradient,
                          r.oscillation_ratio, r.mean_gradient_over_normal, r.mean_normal_over_gradient});
        if (!r.passes) out.fail("sample " + std::to_string(i) + " exceeds the comparison bound");
    }
    out.stats["worst_ratio"] = worst;
    return out;
}

SuiteOutcome run_lemma41_suite(const SuiteParams& p, std::ostream& csv) {
    if (p.n != 3) throw std::invalid_argument("the frequency-split suite runs on S^2 (n = 3)");
    SuiteOutcome out;
    SpherePtr s = make_sphere(3, pick(p.resolution, 24));
    const int L = pick(p.degree_cap, 10);
    const double lambda = pick(p.lambda_cut, 10.0 * p.n);
    const double eps = pick(p.eps, 0.04);
    const int samples = pick(p.samples, 50);
    record(out, p, s->grid().resolution, L, eps, samples, lambda);
    write_lemma_csv_header(csv);
    for (const NonlinearityPair& pair : {mean_curvature_pair(3), stability_pair(3)}) {
        double previous = std::numeric_limits<double>::infinity();
        for (double level : {eps, eps / 2, eps / 4}) {
            double worst = 0;
            for (int i = 0; i < samples; ++i) {
                // Same shapes at every level, only the size changes.
                std::uint64_t seed = derive_seed(p.seed, i);
                ScalarField u = random_field(s, L, level, seed);
                Lemma41Report r = lemma41_check(u, pair, lambda, level);
                write_lemma41_row(csv, 3, seed, level, r);
                worst = std::max(worst, std::abs(r.ratio));
                if (!r.passes) out.fail(pair.name + fmt(" eps %.3g: negative margin %.3g", level, r.margin));
            }
            out.stats[pair.name + fmt("_worst_ratio_eps_%.3g", level)] = worst;
            if (!(worst < previous)) out.fail(pair.name + fmt(": worst ratio did not decrease at eps %.3g", level));
            previous = worst;
        }
    }
    return out;
}

SuiteOutcome run_lemma42_suite(const SuiteParams& p, std::ostream& csv) {
    SuiteOutcome out;
    SpherePtr s = suite_sphere(p, 24, 10, 6);
    const int L = field_degree(p, 12, 6);
    const double eps = pick(p.eps, 0.1);
    const int samples = pick(p.samples, 100);
    const double tol = default_tolerances().lemma42_margin;
    record(out, p, s->grid().resolution, L, eps, samples);
    write_lemma_csv_header(csv);
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples; ++i) {
        std::uint64_t seed = derive_seed(p.seed, i);
        ScalarField u = random_field(s, L, eps, seed);
        Lemma42Report r = lemma42_check(u, eps, tol);
        write_lemma42_row(csv, p.n, seed, eps, r);
        worst = std::min(worst, r.margin);
        if (!r.passes) out.fail(fmt("sample %.0f: margin %.3g", i, r.margin));
    }
    out.stats["min_margin"] = worst;
    return out;
}

SuiteOutcome run_lemma_a1_suite(const std::vector<int>& ns, const std::vector<double>& kappas,
                                const std::vector<double>& epss, std::ostream& csv) {
    SuiteOutcome out;
    csv << "case,";
    write_lemma_a1_csv_header(csv);
    for (int n : ns) {
        auto preset = [n](double s, double t) { return std::pow(1 + s, n - 3) / ((1 + s) * (1 + s) + t); };
        for (double kappa : kappas)
            for (double eps : epss) {
                BumpProfile b = make_bump(kappa, eps);
                LemmaA1Report exact = lemma_a1_check(b, [](double, double) { return 1.0; }, n);
                csv << "exact,";
                write_lemma_a1_csv_row(csv, n, kappa, eps, exact);
                double gap = std::abs(exact.lhs - exact.leading);
                if (gap > 1e-10 * std::max(1.0, std::abs(exact.leading)))
                    out.fail(fmt("exact case off by %.3g at kappa %.3g", gap, kappa));
                LemmaA1Report r = lemma_a1_check(b, preset, n);
                csv << "preset,";
                write_lemma_a1_csv_row(csv, n, kappa, eps, r);
                if (!r.passes) out.fail(fmt("preset case outside the remainder at kappa %.3g eps %.3g", kappa, eps));
            }
    }
    return out;
}

SuiteOutcome run_pole_suite(const SuiteParams& p, std::ostream& csv) {
    SuiteOutcome out;
    const int L = pick(p.degree_cap, 8);
    const double eps = pick(p.eps, 0.05);
    const int samples = pick(p.samples, 50);
    record(out, p, 0, L, eps, samples);
    write_pole_csv_header(csv);
    int holds = 0;
    for (int i = 0; i < samples; ++i) {
        std::uint64_t seed = derive_seed(p.seed, i);
        AxialProfile V = axial_from_zonal(p.n, random_zonal_coefficients(p.n, L, eps, seed));
        PoleBoundReport r = pole_gradient_bound(V);
        write_pole_csv_row(csv, p.n, seed, axial_eps_size(V).value, r);
        holds += r.holds ? 1 : 0;
    }
    out.stats["fraction_holding"] = samples > 0 ? static_cast<double>(holds) / samples : 0.0;
    return out;
}

SuiteOutcome run_deficit_suite(const std::string& which, const SuiteParams& p, std::ostream& csv) {
    SuiteOutcome out;
    const double eps = pick(p.eps, 0.05);
    const int samples = pick(p.samples, 50);
    const double tol = default_tolerances().deficit_margin;
    double min_margin = std::numeric_limits<double>::infinity();
    if (which == "axial") {
        const int L = pick(p.degree_cap, 8);
        record(out, p, 0, L, eps, samples);
        write_deficit_csv_header(csv);
        for (int i = 0; i < samples; ++i) {
            std::uint64_t seed = derive_seed(p.seed, i);
            DeficitReport r = axial_minkowski_deficit(axial_from_zonal(p.n, random_zonal_coefficients(p.n, L, eps, seed)));
            write_deficit_csv_row(csv, r, seed);
            min_margin = std::min(min_margin, r.margin);
            if (r.margin < -tol) out.fail(fmt("sample %.0f: margin %.3g", i, r.margin));
        }
        out.stats["min_margin"] = min_margin;
        return out;
    }
    if (which != "nuclear" && which != "volumetric" && which != "minkowski")
        throw std::invalid_argument("unknown deficit suite: " + which);
    if (which == "volumetric" && p.n < 4) throw std::invalid_argument("the volumetric suite needs n >= 4");
    SpherePtr s = suite_sphere(p, 24, 10, 4);
    const int L = field_degree(p, 6, 4);
    record(out, p, s->grid().resolution, L, eps, samples);
    if (which == "volumetric")
        csv << "which,n,eps_size,lhs,rhs,margin,normalization,seed,stability_ratio\n";
    else
        write_deficit_csv_header(csv);
    double min_stability = std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples; ++i) {
        std::uint64_t seed = derive_seed(p.seed, i);
        DomainSummary sum = summarize(random_domain(s, L, eps, seed));
        DeficitReport r = which == "nuclear"      ? nuclear_minkowski_deficit(sum)
                          : which == "volumetric" ? volumetric_minkowski_deficit(sum)
                                                  : minkowski_deficit(sum);
        if (which == "volumetric") {
            double ratio = stability_ratio(sum);
            char buf[512];
            std::snprintf(buf, sizeof buf, "%s,%d,%.17g,%.17g,%.17g,%.17g,%s,%llu,%.17g\n", r.which.c_str(), r.n,
                          r.eps_size, r.lhs, r.rhs, r.margin, to_string(r.normalization).c_str(),
                          static_cast<unsigned long long>(seed), ratio);
            csv << buf;
            min_stability = std::min(min_stability, ratio);
            if (!(ratio > 0)) out.fail(fmt("sample %.0f: stability ratio %.3g", i, ratio));
        } else {
            write_deficit_csv_row(csv, r, seed);
        }
        min_margin = std::min(min_margin, r.margin);
        if (r.margin < -tol) out.fail(fmt("sample %.0f: margin %.3g", i, r.margin));
    }
    out.stats["min_margin"] = min_margin;
    if (which == "volumetric") out.stats["min_stability_ratio"] = min_stability;
    return out;
}

SuiteOutcome run_counterexample_sweep(int n, double eps, const std::vector<double>& kappas, std::uint64_t seed,
                                      bool with_grid, std::ostream& csv) {
    SuiteOutcome out;
    write_total_h_csv_header(csv);
    std::vector<double> totals;
    for (double k : kappas) {
        TotalHReport r = total_H(n, eps, k, seed, with_grid);
        write_total_h_csv_row(csv, r);
        totals.push_back(r.total_zonal);
        if (r.support_gap < 0) out.fail(fmt("kappa %.3g: supports overlap", k));
        if (with_grid && n == 3 && !(r.relative_gap <= 0.01))
            out.fail(fmt("kappa %.3g: grid and zonal differ by %.3g", k, r.relative_gap));
    }
    if (kappas.size() >= 2) {
        LineFit fit = fit_line(kappas, totals);
        out.stats["slope"] = fit.slope;
        out.stats["r_squared"] = fit.r_squared;
        if (!(fit.slope < 0)) out.fail("int H does not decrease with kappa");
        if (!(fit.r_squared >= 0.9)) out.fail(fmt("affine fit R^2 = %.3g", fit.r_squared));
    }
    return out;
}

SuiteOutcome run_negative_h_search(int n, double eps, std::uint64_t seed, std::ostream& csv) {
    SuiteOutcome out;
    NegativeHSearch s = find_negative_H(n, eps, seed);
    write_total_h_csv_header(csv);
    for (const TotalHReport& r : s.ladder) write_total_h_csv_row(csv, r);
    out.stats["kappa_star"] = s.found ? s.kappa_star : std::numeric_limits<double>::quiet_NaN();
    if (!s.found) out.fail("no kappa up to the ladder cap drives int H below -1");
    return out;
}

SuiteOutcome run_conjecture_search(int n, int basis_cap, int restarts, std::uint64_t seed,
                                   const SearchOptions& options, std::ostream& csv, SearchResult* result) {
    SuiteOutcome out;
    SearchResult r = maximize_ratio(n, basis_cap, restarts, seed, options);
    write_search_csv_header(csv);
    write_search_row(csv, r);
    const Tolerances& tol = default_tolerances();
    for (const RestartRecord& rec : r.restarts) {
        if (options.check_gradient && !(rec.gradient_rel_error <= tol.gradient_check_rel))
            out.fail(fmt("restart gradient check off by %.3g", rec.gradient_rel_error));
        bool feasible = rec.constraint_margin >= -tol.conjecture_feasible;
        if (feasible && rec.ratio > 1.0 + tol.conjecture_trivial) out.fail(fmt("ratio %.6g above 1", rec.ratio));
    }
    if (!r.best.feasible) out.fail("no feasible candidate");
    out.stats["best_ratio"] = r.best.ratio;
    out.stats["max_gradient_rel_error"] = r.max_gradient_rel_error;
    out.stats["conjectured_bound"] = conjectured_bound(n);
    if (r.best.ratio > conjectured_bound(n)) out.stats["reverified_ratio"] = r.best.reverified_ratio;
    if (result) *result = std::move(r);
    return out;
}

SuiteOutcome run_green_sequence(int n, const std::vector<int>& ks, std::ostream& csv) {
    SuiteOutcome out;
    std::vector<GreenStep> seq = green_sequence(n, ks);
    write_green_csv_header(csv);
    double min_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < seq.size(); ++i) {
        const ConjectureCandidate& c = seq[i].candidate;
        write_green_row(csv, n, seq[i]);
        min_ratio = std::min(min_ratio, c.ratio);
        if (!(c.ratio > 0)) out.fail(fmt("k = %.0f: ratio %.3g", seq[i].k, c.ratio));
        if (i > 0 && c.grad_norm_inf > 1.1 * seq[i - 1].candidate.grad_norm_inf)
            out.fail(fmt("k = %.0f: gradient sup grew to %.3g", seq[i].k, c.grad_norm_inf));
    }
    out.stats["min_ratio"] = min_ratio;
    return out;
}

}  // namespace quermass
