#include "quermass/axisym.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <random>
#include <stdexcept>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "quermass/config.hpp"
#include "quermass/numerics.hpp"

namespace quermass {

namespace {

// Below this sin(theta) the cot(theta) terms switch to their pole limits.
constexpr double kPoleSin = 1e-9;

void require_axial_dimension(int n) {
    if (n < 3) throw std::invalid_argument("axial profiles need n >= 3");
}

struct PointCurvature {
    double H, lap, hgg, cubic, km, kr, jac;
};

PointCurvature point_curvature(int n, double theta, const AxialJet& j) {
    const double a = 1.0 + j.V;
    const double s = std::sin(theta), c = std::cos(theta);
    const double d2 = j.dV * j.dV;
    const double w2 = d2 / (a * a);
    const double q = 1.0 + w2;
    const double sq = std::sqrt(q);
    // V' cot(theta) -> V'' at either pole since V' vanishes there.
    const double dv_cot = std::abs(s) < kPoleSin ? j.ddV : j.dV * c / s;
    PointCurvature p;
    p.lap = j.ddV + (n - 2) * dv_cot;
    p.hgg = d2 * j.ddV;
    p.H = (n - 1 - p.lap / a + w2 / q + p.hgg / (a * a * a * q)) / (a * sq);
    p.cubic = std::pow(a, n - 3) * j.ddV * d2 / (a * a + d2);
    const double r = std::sqrt(a * a + d2);
    p.km = (a * a + 2.0 * d2 - a * j.ddV) / (r * r * r);
    p.kr = (1.0 - dv_cot / a) / r;
    p.jac = std::pow(a, n - 1) * sq;
    return p;
}

// Coarea weights |S^{n-2}| w_i sin(theta_i)^{n-2}.
Eigen::VectorXd coarea_weights(const AxialProfile& V) {
    const int n = V.n();
    Eigen::VectorXd w(V.node_count());
    const double area = sphere_area(n - 1);
    for (int i = 0; i < w.size(); ++i) w[i] = area * V.weights()[i] * std::pow(std::sin(V.theta()[i]), n - 2);
    return w;
}

// Barycentric interpolant through arbitrary distinct nodes; the weights are
// formed in log space so that hundreds of nodes do not overflow.
class Barycentric {
public:
    Barycentric(std::vector<double> x, std::vector<double> f) : x_(std::move(x)), f_(std::move(f)) {
        const std::size_t m = x_.size();
        std::vector<double> logw(m, 0.0);
        w_.assign(m, 1.0);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t k = 0; k < m; ++k) {
                if (k == i) continue;
                double d = x_[i] - x_[k];
                if (d == 0.0) throw std::invalid_argument("interpolation nodes must be distinct");
                logw[i] -= std::log(std::abs(d));
                if (d < 0) w_[i] = -w_[i];
            }
        }
        double top = *std::max_element(logw.begin(), logw.end());
        for (std::size_t i = 0; i < m; ++i) w_[i] *= std::exp(logw[i] - top);
    }

    // Derivative values at the nodes from the differentiation matrix.
    std::vector<double> differentiate(const std::vector<double>& f) const {
        const std::size_t m = x_.size();
        std::vector<double> out(m, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            double diag = 0.0, acc = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                if (j == i) continue;
                double d = (w_[j] / w_[i]) / (x_[i] - x_[j]);
                acc += d * f[j];
                diag -= d;
            }
            out[i] = acc + diag * f[i];
        }
        return out;
    }

    double operator()(const std::vector<double>& f, double t) const {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < x_.size(); ++i) {
            double d = t - x_[i];
            if (d == 0.0) return f[i];
            double c = w_[i] / d;
            num += c * f[i];
            den += c;
        }
        return num / den;
    }

    const std::vector<double>& values() const { return f_; }

private:
    std::vector<double> x_, f_, w_;
};

}  // namespace

AxialProfile::AxialProfile(int n, JetFunction jet, std::vector<double> breaks, int nodes)
    : n_(n), jet_(std::move(jet)) {
    require_axial_dimension(n);
    if (nodes < 8) throw std::invalid_argument("axial rule needs at least 8 nodes");
    breaks.push_back(0.0);
    breaks.push_back(kPi);
    std::vector<double> clean;
    for (double b : breaks)
        if (b >= 0.0 && b <= kPi) clean.push_back(b);
    std::sort(clean.begin(), clean.end());
    clean.erase(std::unique(clean.begin(), clean.end(), [](double a, double b) { return b - a < 1e-14; }),
                clean.end());
    breaks_ = clean;
    const int panels = static_cast<int>(breaks_.size()) - 1;
    const int per_panel = std::max(16, (nodes + panels - 1) / panels);
    GaussRule rule = composite_gauss_legendre(breaks_, per_panel);
    const int m = static_cast<int>(rule.nodes.size());
    theta_ = Eigen::Map<Eigen::VectorXd>(rule.nodes.data(), m);
    weights_ = Eigen::Map<Eigen::VectorXd>(rule.weights.data(), m);
    V_.resize(m);
    dV_.resize(m);
    ddV_.resize(m);
    for (int i = 0; i < m; ++i) {
        AxialJet j = jet_(theta_[i]);
        V_[i] = j.V;
        dV_[i] = j.dV;
        ddV_[i] = j.ddV;
    }
    if (!((1.0 + V_.array()).minCoeff() > 0.0)) throw std::invalid_argument("axial profile needs V > -1");
    const double tol = 1e-8;
    if (std::abs(jet_(0.0).dV) > tol || std::abs(jet_(kPi).dV) > tol)
        throw std::invalid_argument("axial profile needs V'(0) = V'(pi) = 0");
}

AxialProfile axial_constant(int n, double c, int nodes) {
    return AxialProfile(n, [c](double) { return AxialJet{c, 0.0, 0.0}; }, {}, nodes);
}

void zonal_derivatives(int n, int l, double t, double& z, double& dz, double& ddz) {
    require_axial_dimension(n);
    const double alpha = 0.5 * (n - 2);
    const double k = std::sqrt(harmonic_dimension(n, l) / sphere_area(n)) / gegenbauer_at_one(l, alpha);
    std::vector<double> c0(l + 1), c1(l + 1), c2(l + 1);
    gegenbauer(l, alpha, t, c0.data());
    gegenbauer(l, alpha + 1, t, c1.data());
    gegenbauer(l, alpha + 2, t, c2.data());
    z = k * c0[l];
    dz = l >= 1 ? k * 2.0 * alpha * c1[l - 1] : 0.0;
    ddz = l >= 2 ? k * 4.0 * alpha * (alpha + 1.0) * c2[l - 2] : 0.0;
}

AxialProfile axial_from_zonal(int n, const std::vector<double>& coeffs, int nodes) {
    require_axial_dimension(n);
    const int L = static_cast<int>(coeffs.size()) - 1;
    const double alpha = 0.5 * (n - 2);
    // Per-degree scale factors of the unit-norm zonal harmonic and its t-derivatives.
    std::vector<double> k0(L + 1), k1(L + 1), k2(L + 1);
    for (int l = 0; l <= L; ++l) {
        double k = std::sqrt(harmonic_dimension(n, l) / sphere_area(n)) / gegenbauer_at_one(l, alpha);
        k0[l] = coeffs[l] * k;
        k1[l] = coeffs[l] * k * 2.0 * alpha;
        k2[l] = coeffs[l] * k * 4.0 * alpha * (alpha + 1.0);
    }
    auto jet = [=](double theta) {
        const double t = std::cos(theta), s = std::sin(theta);
        std::vector<double> c0(L + 1), c1(L + 1), c2(L + 1);
        gegenbauer(std::max(L, 0), alpha, t, c0.data());
        gegenbauer(std::max(L, 0), alpha + 1, t, c1.data());
        gegenbauer(std::max(L, 0), alpha + 2, t, c2.data());
        double z = 0, dz = 0, ddz = 0;
        for (int l = 0; l <= L; ++l) {
            z += k0[l] * c0[l];
            if (l >= 1) dz += k1[l] * c1[l - 1];
            if (l >= 2) ddz += k2[l] * c2[l - 2];
        }
        return AxialJet{z, -s * dz, s * s * ddz - t * dz};
    };
    return AxialProfile(n, jet, {}, nodes);
}

AxialProfile axial_from_samples(int n, const std::vector<double>& theta, const std::vector<double>& values,
                                int nodes) {
    if (theta.size() != values.size() || theta.size() < 3)
        throw std::invalid_argument("axial samples need matching theta and value arrays of length >= 3");
    auto interp = std::make_shared<Barycentric>(theta, values);
    auto d1 = std::make_shared<std::vector<double>>(interp->differentiate(values));
    auto d2 = std::make_shared<std::vector<double>>(interp->differentiate(*d1));
    auto jet = [interp, d1, d2](double t) {
        return AxialJet{(*interp)(interp->values(), t), (*interp)(*d1, t), (*interp)(*d2, t)};
    };
    return AxialProfile(n, jet, {}, nodes);
}

AxialProfile reflected(const AxialProfile& V) {
    auto f = V.jet_function();
    std::vector<double> breaks;
    for (double b : V.breaks()) breaks.push_back(kPi - b);
    return AxialProfile(
        V.n(),
        [f](double theta) {
            AxialJet j = f(kPi - theta);
            return AxialJet{j.V, -j.dV, j.ddV};
        },
        breaks, V.node_count());
}

double coarea_integral(const std::function<double(double)>& f, int n, int nodes) {
    if (n < 2) throw std::invalid_argument("coarea reduction needs n >= 2");
    GaussRule r = gauss_legendre(nodes, 0.0, kPi);
    std::vector<double> terms(r.nodes.size());
    for (std::size_t i = 0; i < terms.size(); ++i)
        terms[i] = r.weights[i] * f(r.nodes[i]) * std::pow(std::sin(r.nodes[i]), n - 2);
    return sphere_area(n - 1) * pairwise_sum(terms);
}

AxialCurvature axial_curvature_at(const AxialProfile& V, const std::vector<double>& theta) {
    const int m = static_cast<int>(theta.size());
    AxialCurvature c;
    c.theta = Eigen::Map<const Eigen::VectorXd>(theta.data(), m);
    c.H.resize(m);
    c.grad_norm.resize(m);
    c.laplacian.resize(m);
    c.hessian_gradient.resize(m);
    c.cubic_integrand.resize(m);
    c.kappa_meridian.resize(m);
    c.kappa_rotation.resize(m);
    c.jacobian.resize(m);
    for (int i = 0; i < m; ++i) {
        AxialJet j = V.jet(theta[i]);
        PointCurvature p = point_curvature(V.n(), theta[i], j);
        c.H[i] = p.H;
        c.grad_norm[i] = std::abs(j.dV);
        c.laplacian[i] = p.lap;
        c.hessian_gradient[i] = p.hgg;
        c.cubic_integrand[i] = p.cubic;
        c.kappa_meridian[i] = p.km;
        c.kappa_rotation[i] = p.kr;
        c.jacobian[i] = p.jac;
    }
    return c;
}

AxialCurvature axial_curvature(const AxialProfile& V) {
    std::vector<double> theta(V.theta().data(), V.theta().data() + V.node_count());
    return axial_curvature_at(V, theta);
}

AxialFunctionals axial_functionals(const AxialProfile& V) {
    const int n = V.n(), m = V.node_count();
    AxialCurvature c = axial_curvature(V);
    Eigen::VectorXd w = coarea_weights(V);
    Eigen::VectorXd wj = w.cwiseProduct(c.jacobian);
    AxialFunctionals out;
    out.volume = weighted_sum(w, (1.0 + V.V().array()).pow(n).matrix() / n);
    out.perimeter = weighted_sum(w, c.jacobian);
    CurvatureIntegrals& ci = out.integrals;
    ci.H = weighted_sum(wj, c.H);
    ci.H_plus = weighted_sum(wj, c.H.cwiseMax(0.0));
    ci.H_minus = weighted_sum(wj, (-c.H).cwiseMax(0.0));
    ci.abs_H = weighted_sum(wj, c.H.cwiseAbs());
    ci.nuclear = weighted_sum(wj, c.kappa_meridian.cwiseAbs() + (n - 2) * c.kappa_rotation.cwiseAbs());
    Eigen::MatrixXd sig(n, m);
    Eigen::VectorXd kappa(n - 1);
    for (int i = 0; i < m; ++i) {
        kappa[0] = c.kappa_meridian[i];
        for (int k = 1; k < n - 1; ++k) kappa[k] = c.kappa_rotation[i];
        auto e = elementary_symmetric(kappa);
        for (int k = 0; k < n; ++k) sig(k, i) = e[k];
    }
    ci.sigma.resize(n);
    ci.abs_sigma.resize(n);
    for (int k = 0; k < n; ++k) {
        Eigen::VectorXd row = sig.row(k).transpose();
        ci.sigma[k] = weighted_sum(wj, row);
        ci.abs_sigma[k] = weighted_sum(wj, row.cwiseAbs());
    }
    ci.min_principal = std::min(c.kappa_meridian.minCoeff(), c.kappa_rotation.minCoeff());
    return out;
}

double axial_eps_size_at(const AxialProfile& V, double t) {
    double worst = 0.0;
    auto deviation = [&](double theta, const AxialJet& j) {
        const double a = 1.0 + j.V, s = std::sin(theta), c = std::cos(theta);
        const double r = std::sqrt(a * a + j.dV * j.dV);
        // Meridian-plane coordinates (rho, z).
        const double nu_rho = (a * s - j.dV * c) / r, nu_z = (a * c + j.dV * s) / r;
        const double p_rho = a * s, p_z = a * c - t;
        const double p = std::hypot(p_rho, p_z);
        return std::hypot(nu_rho - p_rho / p, nu_z - p_z / p);
    };
    for (int i = 0; i < V.node_count(); ++i)
        worst = std::max(worst, deviation(V.theta()[i], AxialJet{V.V()[i], V.dV()[i], V.ddV()[i]}));
    worst = std::max(worst, deviation(0.0, V.jet(0.0)));
    worst = std::max(worst, deviation(kPi, V.jet(kPi)));
    return worst;
}

EpsSize axial_eps_size(const AxialProfile& V) {
    const double reach = 0.5 * (1.0 + V.V().array()).minCoeff();
    auto best = boost::math::tools::brent_find_minima([&](double t) { return axial_eps_size_at(V, t); }, -reach,
                                                      reach, 40);
    EpsSize e;
    e.center = Eigen::VectorXd::Zero(V.n());
    double at_origin = axial_eps_size_at(V, 0.0);
    if (best.second < at_origin) {
        e.value = best.second;
        e.center[V.n() - 1] = best.first;
    } else {
        e.value = at_origin;
    }
    return e;
}

DomainSummary axial_summary(const AxialProfile& V) {
    AxialFunctionals f = axial_functionals(V);
    DomainSummary s;
    s.n = V.n();
    s.volume = f.volume;
    s.perimeter = f.perimeter;
    s.integrals = f.integrals;
    s.eps = axial_eps_size(V);
    return s;
}

DeficitReport axial_minkowski_deficit(const AxialProfile& V) {
    DeficitReport r = minkowski_deficit(axial_summary(V));
    r.which = "axial_minkowski";
    return r;
}

PoleBoundReport pole_gradient_bound(const AxialProfile& V, double theta0, double slack, double c0) {
    const int n = V.n();
    PoleBoundReport r;
    r.theta0 = theta0 > 0 ? theta0 : std::sqrt(axial_eps_size(V).value);
    r.slack = slack;
    r.c0 = c0;
    r.h_minus = axial_functionals(V).integrals.H_minus;
    std::vector<double> probes;
    const int uniform = 400;
    for (int k = 1; k <= uniform; ++k) probes.push_back(r.theta0 * k / uniform);
    for (int i = 0; i < V.node_count(); ++i)
        if (V.theta()[i] <= r.theta0) probes.push_back(V.theta()[i]);
    std::vector<double> north(probes.size()), south(probes.size());
    for (std::size_t i = 0; i < probes.size(); ++i) {
        north[i] = V.jet(probes[i]).dV;
        south[i] = -V.jet(kPi - probes[i]).dV;
    }
    auto margin_for = [&](double c, double& mn, double& ms) {
        mn = ms = std::numeric_limits<double>::infinity();
        if (r.theta0 <= 0) {
            mn = ms = 0.0;
            return;
        }
        for (std::size_t i = 0; i < probes.size(); ++i) {
            double th = probes[i];
            double rhs = slack * th + c * r.h_minus / std::pow(th, n - 2);
            mn = std::min(mn, rhs - north[i]);
            ms = std::min(ms, rhs - south[i]);
        }
    };
    margin_for(c0, r.north_margin, r.south_margin);
    r.worst_margin = std::min(r.north_margin, r.south_margin);
    r.holds = r.worst_margin >= 0.0;
    for (double c : {0.5, 1.0, 2.0, 3.0, 5.0}) {
        double mn, ms;
        margin_for(c, mn, ms);
        r.margins_by_c0.emplace_back(c, std::min(mn, ms));
    }
    return r;
}

PoleBoundReport pole_gradient_bound(const AxialProfile& V, double theta0) {
    const Tolerances& t = default_tolerances();
    return pole_gradient_bound(V, theta0, t.pole_slack, t.pole_c0);
}

std::vector<double> random_zonal_coefficients(int n, int L, double target_eps, std::uint64_t seed, double decay) {
    require_axial_dimension(n);
    if (L < 1) throw std::invalid_argument("random zonal profile needs L >= 1");
    if (!(target_eps > 0 && target_eps < 0.5)) throw std::invalid_argument("target eps-size must lie in (0, 0.5)");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> base(L + 1, 0.0);
    for (int l = 1; l <= L; ++l) base[l] = normal(rng) * std::pow(static_cast<double>(l), -0.5 * decay);
    auto scaled_coeffs = [&](double s) {
        std::vector<double> c(base);
        for (double& x : c) x *= s;
        return c;
    };
    auto gap = [&](double s) {
        try {
            return axial_eps_size_at(axial_from_zonal(n, scaled_coeffs(s), 128), 0.0) - target_eps;
        } catch (const std::invalid_argument&) {
            return 1.0;  // profile left the admissible set: treat as far too large
        }
    };
    double hi = 0.01;
    while (gap(hi) < 0) {
        hi *= 2.0;
        if (hi > 1e6) throw NumericalError("random zonal profile: could not reach the target eps-size");
    }
    boost::uintmax_t iters = 80;
    auto root = boost::math::tools::bisect(gap, 0.0, hi, boost::math::tools::eps_tolerance<double>(40), iters);
    // The lower end keeps the eps-size at or below the target.
    return scaled_coeffs(root.first);
}

StarDomain lift(const AxialProfile& V, SpherePtr sphere, int L) {
    if (sphere->n() != V.n()) throw std::invalid_argument("lift: dimension mismatch");
    const int n = V.n();
    ScalarField f = field_from_function(std::move(sphere), [&](const Eigen::VectorXd& x) {
        return V.jet(std::acos(std::clamp(x[n - 1], -1.0, 1.0))).V;
    });
    int degree = L >= 0 ? L : f.sphere->max_degree();
    return make_domain(analyze(f, degree));
}

void write_pole_csv_header(std::ostream& out) {
    out << "n,seed,eps_size,theta0,h_minus,north_margin,south_margin,worst_margin,holds\n";
}

void write_pole_csv_row(std::ostream& out, int n, std::uint64_t seed, double eps_size, const PoleBoundReport& r) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "%d,%llu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", n,
                  static_cast<unsigned long long>(seed), eps_size, r.theta0, r.h_minus, r.north_margin,
                  r.south_margin, r.worst_margin, r.holds ? 1 : 0);
    out << buf;
}

}  // namespace quermass
