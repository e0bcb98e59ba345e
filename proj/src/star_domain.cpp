#include "quermass/star_domain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>

#include <boost/math/tools/roots.hpp>
#include <gsl/gsl_multimin.h>

#include "quermass/config.hpp"
#include "quermass/numerics.hpp"

namespace quermass {

StarDomain make_domain(ScalarField profile, Eigen::VectorXd center) {
    if ((profile.values.array() <= -1.0).any())
        throw std::invalid_argument("star domain requires 1 + u > 0 at every node");
    if (!profile.coeffs) profile = analyze(profile, profile.sphere->max_degree());
    if (center.size() == 0) center = Eigen::VectorXd::Zero(profile.n());
    if (center.size() != profile.n()) throw std::invalid_argument("center has the wrong dimension");
    return StarDomain{std::move(profile), std::move(center)};
}

StarDomain unit_ball(SpherePtr sphere) { return make_domain(constant_field(std::move(sphere), 0.0)); }

PointGeometry point_geometry(const Eigen::VectorXd& x, double u, const Eigen::VectorXd& grad,
                             const Eigen::MatrixXd& hess, double lap) {
    const int n = static_cast<int>(x.size());
    const double a = 1.0 + u;
    Eigen::MatrixXd E = tangent_frame(x);
    Eigen::VectorXd w = E.transpose() * grad / a;
    Eigen::MatrixXd h = E.transpose() * hess * E;
    const double w2 = w.squaredNorm();
    const double q = 1.0 + w2;
    const double sq = std::sqrt(q);

    PointGeometry pg;
    pg.v_sq = w2;
    pg.jacobian = std::pow(a, n - 1) * sq;
    pg.normal = (x - grad / a) / sq;
    double hgg = grad.dot(hess * grad);
    pg.H = (n - 1 - lap / a + w2 / q + hgg / (a * a * a * q)) / (a * sq);

    const int m = n - 1;
    Eigen::MatrixXd I = Eigen::MatrixXd::Identity(m, m);
    Eigen::MatrixXd b = (a / sq) * (I - h / a + 2.0 * w * w.transpose());
    Eigen::MatrixXd root = I;
    if (w2 > 0) {
        Eigen::VectorXd wh = w / std::sqrt(w2);
        root += (1.0 / sq - 1.0) * wh * wh.transpose();
    }
    root /= a;
    pg.shape = root * b * root;
    pg.shape = 0.5 * (pg.shape + pg.shape.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(pg.shape, Eigen::EigenvaluesOnly);
    pg.kappa = es.eigenvalues();
    return pg;
}

CurvatureBundle curvatures(const StarDomain& K, const CurvatureOptions& options) {
    const auto& g = K.grid();
    const int n = K.n(), N = g.size();
    FieldJets J = jets(K.profile, JetOrder::Hessian);
    CurvatureBundle cb;
    cb.second_fundamental.resize(N);
    cb.H.resize(N);
    cb.H_plus.resize(N);
    cb.H_minus.resize(N);
    cb.II_eigenvalues.resize(n - 1, N);
    cb.jacobian.resize(N);
    cb.normal.resize(n, N);
    cb.v_sq.resize(N);
    Eigen::MatrixXd W(n, N);
    for (int k = 0; k < N; ++k) {
        PointGeometry pg = point_geometry(g.nodes.col(k), J.value[k], J.grad.col(k), J.hessian_at(k, n), J.laplacian[k]);
        cb.second_fundamental[k] = std::move(pg.shape);
        cb.H[k] = pg.H;
        cb.H_plus[k] = std::max(pg.H, 0.0);
        cb.H_minus[k] = std::max(-pg.H, 0.0);
        cb.II_eigenvalues.col(k) = pg.kappa;
        cb.jacobian[k] = pg.jacobian;
        cb.normal.col(k) = pg.normal;
        cb.v_sq[k] = pg.v_sq;
        W.col(k) = J.grad.col(k) / std::sqrt(1.0 + pg.v_sq);
    }
    if (options.divergence_form) {
        Eigen::VectorXd div_coeffs = K.profile.sphere->basis().weak_divergence(W);
        Eigen::VectorXd div = K.profile.sphere->basis().synthesize(div_coeffs, JetOrder::Value).value;
        cb.H_div.resize(N);
        for (int k = 0; k < N; ++k) {
            double a = 1.0 + J.value[k];
            cb.H_div[k] = (n - 1 + cb.v_sq[k]) / (a * std::sqrt(1.0 + cb.v_sq[k])) - div[k] / (a * a);
        }
        cb.max_form_discrepancy = (cb.H - cb.H_div).cwiseAbs().maxCoeff();
        cb.forms_consistent = cb.max_form_discrepancy <= default_tolerances().h_forms_sup;
        if (options.strict && !cb.forms_consistent) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "mean-curvature forms disagree by %.3e; increase the grid resolution",
                          cb.max_form_discrepancy);
            throw NumericalError(buf);
        }
    }
    return cb;
}

std::vector<double> elementary_symmetric(const Eigen::VectorXd& kappa) {
    const int m = static_cast<int>(kappa.size());
    std::vector<double> e(m + 1, 0.0);
    e[0] = 1.0;
    for (int i = 0; i < m; ++i)
        for (int k = i + 1; k >= 1; --k) e[k] += kappa[i] * e[k - 1];
    return e;
}

CurvatureIntegrals curvature_integrals(const StarDomain& K, const CurvatureBundle& cb) {
    const auto& g = K.grid();
    const int n = K.n(), N = g.size();
    Eigen::VectorXd wj = g.weights.cwiseProduct(cb.jacobian);
    CurvatureIntegrals ci;
    ci.H = weighted_sum(wj, cb.H);
    ci.H_plus = weighted_sum(wj, cb.H_plus);
    ci.H_minus = weighted_sum(wj, cb.H_minus);
    ci.abs_H = weighted_sum(wj, cb.H.cwiseAbs());
    Eigen::VectorXd nuc(N);
    Eigen::MatrixXd sig(n, N);
    for (int k = 0; k < N; ++k) {
        nuc[k] = cb.II_eigenvalues.col(k).cwiseAbs().sum();
        auto e = elementary_symmetric(cb.II_eigenvalues.col(k));
        for (int i = 0; i < n; ++i) sig(i, k) = e[i];
    }
    ci.nuclear = weighted_sum(wj, nuc);
    ci.sigma.resize(n);
    ci.abs_sigma.resize(n);
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd row = sig.row(i).transpose();
        ci.sigma[i] = weighted_sum(wj, row);
        ci.abs_sigma[i] = weighted_sum(wj, row.cwiseAbs());
    }
    ci.min_principal = cb.II_eigenvalues.minCoeff();
    return ci;
}

CurvatureIntegrals curvature_integrals(const StarDomain& K) {
    CurvatureOptions opt;
    opt.divergence_form = false;
    return curvature_integrals(K, curvatures(K, opt));
}

double volume(const StarDomain& K) {
    const int n = K.n();
    Eigen::VectorXd f = (1.0 + K.profile.values.array()).pow(n) / n;
    return quadrature(K.grid(), f);
}

double perimeter(const StarDomain& K) {
    const int n = K.n();
    FieldJets J = jets(K.profile, JetOrder::Gradient);
    Eigen::VectorXd f(K.grid().size());
    for (int k = 0; k < f.size(); ++k) {
        double a = 1.0 + J.value[k];
        double v2 = J.grad.col(k).squaredNorm() / (a * a);
        f[k] = std::pow(a, n - 1) * std::sqrt(1.0 + v2);
    }
    return quadrature(K.grid(), f);
}

Eigen::MatrixXd normal_field(const StarDomain& K) {
    FieldJets J = jets(K.profile, JetOrder::Gradient);
    const auto& g = K.grid();
    Eigen::MatrixXd nu(K.n(), g.size());
    for (int k = 0; k < g.size(); ++k) {
        Eigen::VectorXd v = J.grad.col(k) / (1.0 + J.value[k]);
        nu.col(k) = (g.nodes.col(k) - v) / std::sqrt(1.0 + v.squaredNorm());
    }
    return nu;
}

Eigen::MatrixXd boundary_points(const StarDomain& K) {
    const auto& g = K.grid();
    Eigen::MatrixXd T = g.nodes * (1.0 + K.profile.values.array()).matrix().asDiagonal();
    T.colwise() += K.center;
    return T;
}

namespace {

struct EpsContext {
    const Eigen::MatrixXd* T;
    const Eigen::MatrixXd* normals;
};

double eps_objective(const Eigen::MatrixXd& T, const Eigen::MatrixXd& normals, const Eigen::VectorXd& c) {
    const int n = static_cast<int>(T.rows());
    double worst = 0.0;
    double d[16];
    if (n > 16) throw std::invalid_argument("eps-size supports n <= 16");
    for (int k = 0; k < T.cols(); ++k) {
        const double* t = T.col(k).data();
        const double* nu = normals.col(k).data();
        double r2 = 0.0;
        for (int i = 0; i < n; ++i) {
            d[i] = t[i] - c[i];
            r2 += d[i] * d[i];
        }
        if (r2 == 0.0) return std::numeric_limits<double>::infinity();
        double inv = 1.0 / std::sqrt(r2), e2 = 0.0;
        for (int i = 0; i < n; ++i) {
            double e = nu[i] - d[i] * inv;
            e2 += e * e;
        }
        worst = std::max(worst, e2);
    }
    return std::sqrt(worst);
}

double gsl_eps_objective(const gsl_vector* x, void* params) {
    auto* ctx = static_cast<EpsContext*>(params);
    Eigen::VectorXd c(x->size);
    for (std::size_t i = 0; i < x->size; ++i) c[i] = gsl_vector_get(x, i);
    return eps_objective(*ctx->T, *ctx->normals, c);
}

// One Nelder-Mead run from start with the given initial step; returns the best point.
Eigen::VectorXd nelder_mead(EpsContext& ctx, const Eigen::VectorXd& start, double step, double xtol, int max_iter) {
    const std::size_t n = start.size();
    gsl_multimin_function fn{&gsl_eps_objective, n, &ctx};
    gsl_vector* x = gsl_vector_alloc(n);
    gsl_vector* ss = gsl_vector_alloc(n);
    for (std::size_t i = 0; i < n; ++i) gsl_vector_set(x, i, start[i]);
    gsl_vector_set_all(ss, step);
    gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
    gsl_multimin_fminimizer_set(s, &fn, x, ss);
    for (int it = 0; it < max_iter; ++it) {
        if (gsl_multimin_fminimizer_iterate(s)) break;
        if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), xtol) == GSL_SUCCESS) break;
    }
    Eigen::VectorXd best(n);
    for (std::size_t i = 0; i < n; ++i) best[i] = gsl_vector_get(s->x, i);
    gsl_multimin_fminimizer_free(s);
    gsl_vector_free(x);
    gsl_vector_free(ss);
    return best;
}

}  // namespace

double eps_size_at(const StarDomain& K, const Eigen::MatrixXd& normals, const Eigen::VectorXd& c) {
    return eps_objective(boundary_points(K), normals, c);
}

EpsSize eps_size(const StarDomain& K, const Eigen::MatrixXd& normals, const Eigen::VectorXd& seed) {
    const Tolerances& tol = default_tolerances();
    Eigen::MatrixXd T = boundary_points(K);
    EpsContext ctx{&T, &normals};
    EpsSize best{eps_objective(T, normals, seed), seed};
    auto consider = [&](const Eigen::VectorXd& c) {
        double v = eps_objective(T, normals, c);
        if (v < best.value) best = {v, c};
    };
    consider(K.center);
    if (best.value == 0.0) return best;
    double step = std::max(0.05 * best.value, 1e-6);
    for (int round = 0; round < 3; ++round) {
        consider(nelder_mead(ctx, best.center, step, tol.eps_size_xtol, tol.eps_size_max_iter));
        step *= 0.1;
    }
    return best;
}

EpsSize eps_size(const StarDomain& K) { return eps_size(K, normal_field(K), barycenter(K)); }

Eigen::VectorXd barycenter(const StarDomain& K) {
    const auto& g = K.grid();
    const int n = K.n();
    Eigen::VectorXd a = (1.0 + K.profile.values.array()).pow(n + 1) / (n + 1);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) b[i] = weighted_sum(g.weights, a.cwiseProduct(g.nodes.row(i).transpose()));
    return K.center + b / volume(K);
}

Lemma32Report lemma32_check(const StarDomain& K, double bound) {
    const auto& g = K.grid();
    const int N = g.size(), n = K.n();
    FieldJets J = jets(K.profile, JetOrder::Gradient);
    Lemma32Report r;
    r.bound = bound;
    Eigen::VectorXd v2(N), dev2(N), jac(N);
    double r1 = 0, r2 = 0;
    for (int k = 0; k < N; ++k) {
        double a = 1.0 + J.value[k];
        Eigen::VectorXd v = J.grad.col(k) / a;
        double vv = v.squaredNorm();
        Eigen::VectorXd nu = (g.nodes.col(k) - v) / std::sqrt(1.0 + vv);
        double dev = (nu - g.nodes.col(k)).norm();
        double vn = std::sqrt(vv);
        v2[k] = vv;
        dev2[k] = dev * dev;
        jac[k] = std::pow(a, n - 1) * std::sqrt(1.0 + vv);
        double sq = std::sqrt(1.0 + vv);
        double identity = vv / (1.0 + vv) + vv * vv / ((1.0 + vv) * (1.0 + sq) * (1.0 + sq));
        r.identity_residual = std::max(r.identity_residual, std::abs(identity - dev * dev));
        r.max_v = std::max(r.max_v, vn);
        r.max_normal_deviation = std::max(r.max_normal_deviation, dev);
        if (dev > 0) r1 = std::max(r1, vn / dev);
        if (vn > 0) r2 = std::max(r2, dev / vn);
    }
    r.pointwise_gradient_over_normal = r1;
    r.pointwise_normal_over_gradient = r2;
    double amax = (1.0 + K.profile.values.array()).maxCoeff();
    double amin = (1.0 + K.profile.values.array()).minCoeff();
    r.oscillation_ratio = r.max_v > 0 ? (amax / amin - 1.0) / r.max_v : 0.0;
    // Both sides averaged so the ratio carries no |S^{n-1}| factor.
    double int_v = quadrature(g, v2) / sphere_area(n);
    double per = quadrature(g, jac);
    double mean_dev = weighted_sum(g.weights, dev2.cwiseProduct(jac)) / per;
    if (int_v > 0 && mean_dev > 0) {
        r.mean_gradient_over_normal = int_v / mean_dev;
        r.mean_normal_over_gradient = mean_dev / int_v;
    }
    r.passes = r.pointwise_gradient_over_normal <= bound && r.pointwise_normal_over_gradient <= bound &&
               r.oscillation_ratio <= bound && r.mean_gradient_over_normal <= bound &&
               r.mean_normal_over_gradient <= bound;
    return r;
}

Lemma32Report lemma32_check(const StarDomain& K) { return lemma32_check(K, default_tolerances().lemma32_bound); }

StarDomain scaled(const StarDomain& K, double s) {
    if (!(s > 0)) throw std::invalid_argument("scale factor must be positive");
    ScalarField p = K.profile;
    p.values = s * (1.0 + p.values.array()) - 1.0;
    *p.coeffs *= s;
    (*p.coeffs)[0] += (s - 1.0) * std::sqrt(sphere_area(K.n()));
    return StarDomain{std::move(p), K.center};
}

StarDomain recentered(const StarDomain& K, const Eigen::VectorXd& shift) {
    const auto& g = K.grid();
    const int N = g.size();
    const double b = shift.norm();
    const double rmax = (1.0 + K.profile.values.array()).maxCoeff();
    if (b >= (1.0 + K.profile.values.array()).minCoeff())
        throw std::invalid_argument("re-centering moves the center outside the domain");
    Eigen::VectorXd values(N);
    for (int k = 0; k < N; ++k) {
        Eigen::VectorXd x = g.nodes.col(k);
        auto gap = [&](double r) {
            Eigen::VectorXd y = shift + r * x;
            double ry = y.norm();
            return ry - (1.0 + evaluate(K.profile, y / ry));
        };
        double lo = 1e-3 * (1.0 - b / rmax), hi = b + 1.5 * rmax;
        double flo = gap(lo), fhi = gap(hi);
        if (!(flo < 0 && fhi > 0)) throw std::invalid_argument("re-centering: no boundary crossing on a ray");
        boost::uintmax_t iters = 100;
        auto root = boost::math::tools::toms748_solve(gap, lo, hi, flo, fhi,
                                                      boost::math::tools::eps_tolerance<double>(52), iters);
        values[k] = 0.5 * (root.first + root.second) - 1.0;
    }
    ScalarField p = analyze(field_from_values(K.profile.sphere, values), K.profile.sphere->max_degree());
    p = synthesize(*p.coeffs, K.profile.sphere);
    StarDomain out = make_domain(std::move(p), K.center + shift);
    // Star-shapedness about the new center: (T - c) . nu > 0 everywhere.
    Eigen::MatrixXd nu = normal_field(out);
    for (int k = 0; k < N; ++k)
        if (nu.col(k).dot(g.nodes.col(k)) <= 0.0)
            throw std::invalid_argument("re-centering produced a profile that is not star-shaped");
    return out;
}

StarDomain rotated(const StarDomain& K, const Eigen::MatrixXd& R) {
    const auto& g = K.grid();
    Eigen::VectorXd values(g.size());
    for (int k = 0; k < g.size(); ++k) values[k] = evaluate(K.profile, R.transpose() * g.nodes.col(k));
    ScalarField p = analyze(field_from_values(K.profile.sphere, values), K.profile.truncation);
    return make_domain(std::move(p), K.center);
}

void write_obj(const StarDomain& K, const std::string& path) {
    if (K.n() != 3) throw std::invalid_argument("mesh export is only defined for n = 3");
    CurvatureOptions opt;
    opt.divergence_form = false;
    CurvatureBundle cb = curvatures(K, opt);
    write_obj(K.grid(), boundary_points(K), cb.H, path, "radial graph T(x) = c + (1 + u(x)) x over the quadrature grid");
}

void write_obj(const SphericalGrid& g, const Eigen::MatrixXd& vertices, const Eigen::VectorXd& H,
               const std::string& path, const std::string& title) {
    if (g.n != 3 || vertices.rows() != 3 || vertices.cols() != g.size() || H.size() != g.size())
        throw std::invalid_argument("write_obj: expects one vertex and one H value per S^2 grid node");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << std::setprecision(17);
    out << "# " << title << '\n';
    out << "# per-vertex mean curvature: # H <vertex> <value>\n";
    for (int k = 0; k < g.size(); ++k) out << "# H " << k + 1 << ' ' << H[k] << '\n';
    for (int k = 0; k < g.size(); ++k)
        out << "v " << vertices(0, k) << ' ' << vertices(1, k) << ' ' << vertices(2, k) << '\n';
    const int rings = static_cast<int>(g.polar.size()), az = g.ring_size;
    auto id = [&](int j, int i) { return j * az + (i % az) + 1; };
    for (int j = 0; j + 1 < rings; ++j) {
        for (int i = 0; i < az; ++i) {
            int a = id(j, i), b = id(j + 1, i), c = id(j + 1, i + 1), d = id(j, i + 1);
            out << "f " << a << ' ' << b << ' ' << c << '\n';
            out << "f " << a << ' ' << c << ' ' << d << '\n';
        }
    }
    for (int i = 1; i + 1 < az; ++i) out << "f " << id(0, 0) << ' ' << id(0, i) << ' ' << id(0, i + 1) << '\n';
    for (int i = 1; i + 1 < az; ++i)
        out << "f " << id(rings - 1, 0) << ' ' << id(rings - 1, i + 1) << ' ' << id(rings - 1, i) << '\n';
}

void write_lemma32_csv_header(std::ostream& out) {
    out << "seed,eps_size,grad_over_normal,normal_over_grad,oscillation_ratio,mean_grad_over_normal,"
           "mean_normal_over_grad,identity_residual,bound,passes\n";
}

void write_lemma32_csv_row(std::ostream& out, std::uint64_t seed, double eps_size, const Lemma32Report& r) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "%llu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n",
                  static_cast<unsigned long long>(seed), eps_size, r.pointwise_gradient_over_normal,
                  r.pointwise_normal_over_gradient, r.oscillation_ratio, r.mean_gradient_over_normal,
                  r.mean_normal_over_gradient, r.identity_residual, r.bound, r.passes ? 1 : 0);
    out << buf;
}

}  // namespace quermass
