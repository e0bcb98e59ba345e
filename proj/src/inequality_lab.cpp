#include "quermass/inequality_lab.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "quermass/config.hpp"
#include "quermass/numerics.hpp"

namespace quermass {

std::string to_string(Normalization mode) {
    switch (mode) {
        case Normalization::Perimeter: return "perimeter";
        case Normalization::Volume: return "volume";
        default: return "none";
    }
}

namespace {

double mean_square_deviation(const StarDomain& K, const CurvatureBundle& cb, const Eigen::VectorXd& c) {
    const auto& g = K.grid();
    Eigen::MatrixXd T = boundary_points(K);
    Eigen::VectorXd dev(g.size());
    for (int k = 0; k < g.size(); ++k) {
        Eigen::VectorXd d = T.col(k) - c;
        dev[k] = (cb.normal.col(k) - d / d.norm()).squaredNorm();
    }
    Eigen::VectorXd wj = g.weights.cwiseProduct(cb.jacobian);
    return weighted_sum(wj, dev) / pairwise_sum(wj);
}

DeficitReport make_report(const std::string& which, const DomainSummary& s, double integral, double measure,
                          double ball_measure, double measure_power) {
    const int n = s.n;
    DeficitReport r;
    r.which = which;
    r.n = n;
    r.normalization = Normalization::None;
    r.center_used = s.eps.center;
    r.eps_size = s.eps.value;
    r.degenerate = !(integral > 0);
    double lhs_num = r.degenerate ? 0.0 : std::pow(integral, 1.0 / (n - 2));
    r.lhs = lhs_num / std::pow(measure, measure_power);
    r.rhs = std::pow((n - 1) * sphere_area(n), 1.0 / (n - 2)) / std::pow(ball_measure, measure_power);
    r.margin = r.lhs - r.rhs;
    return r;
}

void require_minkowski_dimension(int n) {
    if (n < 3) throw std::invalid_argument("Minkowski deficits need n >= 3");
}

}  // namespace

DomainSummary summarize(const StarDomain& K) {
    require_minkowski_dimension(K.n());
    CurvatureOptions opt;
    opt.divergence_form = false;
    CurvatureBundle cb = curvatures(K, opt);
    DomainSummary s;
    s.n = K.n();
    s.integrals = curvature_integrals(K, cb);
    s.volume = volume(K);
    s.perimeter = s.integrals.sigma[0];
    s.eps = eps_size(K, cb.normal, barycenter(K));
    s.mean_square_deviation = mean_square_deviation(K, cb, s.eps.center);
    return s;
}

StarDomain normalize(const StarDomain& K, Normalization mode) {
    const Tolerances& tol = default_tolerances();
    if (mode == Normalization::None) return K;
    const int n = K.n();
    {
        // Cheap upper bound first; the optimized value only when needed.
        double e = eps_size_at(K, normal_field(K), K.center);
        if (e >= 0.5 && eps_size(K).value >= 0.5)
            throw std::invalid_argument("normalize requires eps-size < 0.5");
    }
    const double target = mode == Normalization::Perimeter ? sphere_area(n) : ball_volume(n);
    StarDomain D = K;
    double measure_err = 0, bary_err = 0;
    for (int it = 0; it < tol.normalize_max_iter; ++it) {
        Eigen::VectorXd shift = barycenter(D) - D.center;
        if (shift.norm() > 0.1 * tol.normalize_barycenter) D = recentered(D, shift);
        double m = mode == Normalization::Perimeter ? perimeter(D) : volume(D);
        double s = mode == Normalization::Perimeter ? std::pow(target / m, 1.0 / (n - 1)) : std::pow(target / m, 1.0 / n);
        D = scaled(D, s);
        m = mode == Normalization::Perimeter ? perimeter(D) : volume(D);
        measure_err = std::abs(m / target - 1.0);
        bary_err = (barycenter(D) - D.center).norm();
        if (measure_err <= tol.normalize_measure_rel && bary_err <= tol.normalize_barycenter) {
            D.center = Eigen::VectorXd::Zero(n);
            return D;
        }
    }
    char buf[200];
    std::snprintf(buf, sizeof buf, "normalize did not converge: measure residual %.3e, barycenter residual %.3e",
                  measure_err, bary_err);
    throw NumericalError(buf);
}

DeficitReport minkowski_deficit(const DomainSummary& s) {
    return make_report("minkowski", s, s.integrals.H_plus, s.perimeter, sphere_area(s.n), 1.0 / (s.n - 1));
}
DeficitReport volumetric_minkowski_deficit(const DomainSummary& s) {
    return make_report("volumetric_minkowski", s, s.integrals.H_plus, s.volume, ball_volume(s.n), 1.0 / s.n);
}
DeficitReport nuclear_minkowski_deficit(const DomainSummary& s) {
    return make_report("nuclear_minkowski", s, s.integrals.nuclear, s.perimeter, sphere_area(s.n), 1.0 / (s.n - 1));
}
DeficitReport almost_sharp_margin(const DomainSummary& s, double delta) {
    if (!(delta >= 0)) throw std::invalid_argument("delta must be nonnegative");
    DeficitReport r = minkowski_deficit(s);
    r.which = "almost_sharp";
    r.rhs -= delta;
    r.margin = r.lhs - r.rhs;
    return r;
}

DeficitReport minkowski_deficit(const StarDomain& K) { return minkowski_deficit(summarize(K)); }
DeficitReport volumetric_minkowski_deficit(const StarDomain& K) { return volumetric_minkowski_deficit(summarize(K)); }
DeficitReport nuclear_minkowski_deficit(const StarDomain& K) { return nuclear_minkowski_deficit(summarize(K)); }
DeficitReport almost_sharp_margin(const StarDomain& K, double delta) { return almost_sharp_margin(summarize(K), delta); }

double stability_ratio(const DomainSummary& s) {
    if (s.n < 4) throw std::invalid_argument("stability ratio is stated for n >= 4");
    if (s.mean_square_deviation < default_tolerances().stability_denominator)
        return std::numeric_limits<double>::infinity();
    return volumetric_minkowski_deficit(s).margin / s.mean_square_deviation;
}

double stability_ratio(const StarDomain& K) {
    if (K.n() < 4) throw std::invalid_argument("stability ratio is stated for n >= 4");
    return stability_ratio(summarize(K));
}

FugledeReport fuglede_deficit(const StarDomain& K) {
    StarDomain D = normalize(K, Normalization::Volume);
    const int n = D.n();
    const auto& g = D.grid();
    FieldJets J = jets(D.profile, JetOrder::Gradient);
    Eigen::VectorXd u2 = J.value.array().square();
    Eigen::VectorXd g2 = J.grad.colwise().squaredNorm().transpose();
    double iu2 = quadrature(g, u2), ig2 = quadrature(g, g2);
    FugledeReport r;
    r.exact = perimeter(D) - sphere_area(n);
    r.model = 0.5 * ig2 - 0.5 * (n - 1) * iu2;
    r.residual = r.exact - r.model;
    r.scale = iu2 + ig2;
    return r;
}

DeficitReport quermassintegral_ratio(const StarDomain& K, int k) {
    const int n = K.n();
    if (k < 1 || k > n - 1) throw std::invalid_argument("quermassintegral index must be in 1..n-1");
    CurvatureOptions opt;
    opt.divergence_form = false;
    CurvatureBundle cb = curvatures(K, opt);
    CurvatureIntegrals ci = curvature_integrals(K, cb);
    const double area = sphere_area(n);
    const double ball_k = binomial(n - 1, k) * area, ball_km1 = binomial(n - 1, k - 1) * area;
    DeficitReport r;
    r.which = "quermassintegral_k" + std::to_string(k);
    r.n = n;
    r.center_used = K.center;
    r.eps_size = eps_size(K, cb.normal, barycenter(K)).value;
    r.convex = ci.min_principal >= 0.0;
    if (k < n - 1) {
        r.lhs = std::pow(ci.abs_sigma[k], 1.0 / (n - 1 - k)) / std::pow(ci.abs_sigma[k - 1], 1.0 / (n - k));
        r.rhs = std::pow(ball_k, 1.0 / (n - 1 - k)) / std::pow(ball_km1, 1.0 / (n - k));
    } else {
        // Exponent 1/(n-1-k) degenerates; compare the (n-1-k)-th powers, whose denominator exponent is 0.
        r.lhs = ci.abs_sigma[k];
        r.rhs = ball_k;
    }
    r.margin = r.lhs - r.rhs;
    r.degenerate = !(ci.abs_sigma[k] > 0);
    return r;
}

double perimeter_constraint_residual(const StarDomain& K) {
    const int n = K.n();
    const auto& g = K.grid();
    FieldJets J = jets(K.profile, JetOrder::Gradient);
    Eigen::VectorXd u2 = J.value.array().square();
    Eigen::VectorXd g2 = J.grad.colwise().squaredNorm().transpose();
    return quadrature(g, J.value) + 0.5 * (n - 2) * quadrature(g, u2) + quadrature(g, g2) / (2.0 * (n - 1));
}

double volume_constraint_residual(const StarDomain& K) {
    const int n = K.n();
    const auto& g = K.grid();
    Eigen::VectorXd u2 = K.profile.values.array().square();
    return quadrature(g, K.profile.values) + 0.5 * (n - 1) * quadrature(g, u2);
}

Eigen::VectorXd random_coefficients(const Sphere& sphere, int L, std::uint64_t seed, double decay, int min_degree) {
    const auto& b = sphere.basis();
    if (L > b.max_degree()) throw std::invalid_argument("random_coefficients: degree exceeds basis");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Eigen::VectorXd c = Eigen::VectorXd::Zero(b.size());
    for (int l = min_degree; l <= L; ++l) {
        double sd = std::pow(std::max(l, 1), -0.5 * decay);
        for (int i = b.offset(l); i < b.offset(l + 1); ++i) c[i] = sd * normal(rng);
    }
    return c;
}

StarDomain random_domain(SpherePtr sphere, int L, double target_eps, std::uint64_t seed) {
    if (!(target_eps > 0 && target_eps < 0.5)) throw std::invalid_argument("target eps-size must be in (0, 0.5)");
    Eigen::VectorXd c = random_coefficients(*sphere, L, seed);
    ScalarField shape = synthesize(c, sphere);
    double gmax = jets(shape, JetOrder::Gradient).grad.colwise().norm().maxCoeff();
    double t = gmax > 0 ? target_eps / gmax : target_eps;
    auto build = [&](double scale) { return make_domain(scaled(shape, scale)); };
    StarDomain D = build(t);
    for (int it = 0; it < 12; ++it) {
        double e = eps_size(D).value;
        if (e <= target_eps && e >= 0.98 * target_eps) break;
        t *= target_eps / e * (e > target_eps ? 0.999 : 1.0);
        D = build(t);
    }
    return D;
}

void write_deficit_csv_header(std::ostream& out) {
    out << "which,n,eps_size,lhs,rhs,margin,normalization,seed\n";
}

void write_deficit_csv_row(std::ostream& out, const DeficitReport& r, std::uint64_t seed) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "%s,%d,%.17g,%.17g,%.17g,%.17g,%s,%llu\n", r.which.c_str(), r.n, r.eps_size, r.lhs,
                  r.rhs, r.margin, to_string(r.normalization).c_str(), static_cast<unsigned long long>(seed));
    out << buf;
}

}  // namespace quermass
