#include "quermass/conjecture_search.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <random>
#include <stdexcept>

#include "quermass/axisym.hpp"
#include "quermass/config.hpp"
#include "quermass/inequality_lab.hpp"
#include "quermass/numerics.hpp"

namespace quermass {

namespace {

// Penalized objective F = N/D - mu int ((lap u - 1)^+)^2 and its pieces.
struct Evaluation {
    double value = 0;
    RatioParts parts;
    double penalty = 0;
    Eigen::VectorXd gradient;
};

// A finite-dimensional family of fields together with exact quadrature.
class Model {
public:
    virtual ~Model() = default;
    virtual int size() const = 0;
    virtual int degree_of(int i) const = 0;
    virtual double eigenvalue(int l) const = 0;
    virtual Evaluation evaluate(const Eigen::VectorXd& c, double mu, bool want_gradient) const = 0;
};

class SphereModel final : public Model {
public:
    explicit SphereModel(SpherePtr s) : sphere_(std::move(s)) {}

    int size() const override { return sphere_->basis().size(); }
    int degree_of(int i) const override { return sphere_->basis().degree_of(i); }
    double eigenvalue(int l) const override { return sphere_->basis().eigenvalue(l); }

    Evaluation evaluate(const Eigen::VectorXd& c, double mu, bool want_gradient) const override {
        const auto& basis = sphere_->basis();
        const auto& g = sphere_->grid();
        const int N = g.size();
        FieldJets J = basis.synthesize(c, JetOrder::Gradient);
        Eigen::VectorXd lc(c.size());
        for (int i = 0; i < c.size(); ++i) lc[i] = -basis.eigenvalue(basis.degree_of(i)) * c[i];
        Eigen::VectorXd lap = basis.synthesize(lc, JetOrder::Value).value;
        Eigen::VectorXd g2 = J.grad.colwise().squaredNorm().transpose();
        Eigen::VectorXd hinge = (lap.array() - 1.0).cwiseMax(0.0).matrix();

        Evaluation e;
        e.parts.numerator = weighted_sum(g.weights, lap.cwiseProduct(g2));
        e.parts.denominator = weighted_sum(g.weights, g2);
        e.parts.max_laplacian = lap.maxCoeff();
        e.parts.grad_inf = std::sqrt(g2.maxCoeff());
        e.parts.laplacian_mean = weighted_sum(g.weights, lap);
        e.penalty = mu * weighted_sum(g.weights, hinge.cwiseAbs2());
        const double D = e.parts.denominator, Nm = e.parts.numerator;
        e.value = (D > 0 ? Nm / D : 0.0) - e.penalty;
        if (!want_gradient) return e;

        // dN/dc_a = -lambda_a <g2, Y_a> + 2 <lap u grad u, grad Y_a>,
        // dD/dc_a = 2 <grad u, grad Y_a>, dP/dc_a = -2 mu lambda_a <hinge, Y_a>;
        // weak_divergence(W) returns -<W, grad Y_a>.
        const int top = basis.max_degree();
        Eigen::VectorXd a_g2 = basis.analyze(g2, top);
        Eigen::VectorXd a_hinge = basis.analyze(hinge, top);
        Eigen::MatrixXd W = J.grad;
        for (int k = 0; k < N; ++k) W.col(k) *= lap[k];
        Eigen::VectorXd dN_div = -2.0 * basis.weak_divergence(W);
        Eigen::VectorXd dD = -2.0 * basis.weak_divergence(J.grad);
        e.gradient.resize(c.size());
        for (int i = 0; i < c.size(); ++i) {
            double lam = basis.eigenvalue(basis.degree_of(i));
            double dN = -lam * a_g2[i] + dN_div[i];
            double dR = D > 0 ? (dN * D - Nm * dD[i]) / (D * D) : 0.0;
            e.gradient[i] = dR + 2.0 * mu * lam * a_hinge[i];
        }
        return e;
    }

    const SpherePtr& sphere() const { return sphere_; }

private:
    SpherePtr sphere_;
};

// Zonal fields on S^{n-1}: Gauss-Gegenbauer in t = cos theta is exact for the
// polynomial integrands, and the poles join the nodes for the constraint.
class ZonalModel final : public Model {
public:
    ZonalModel(int n, int L, int nodes = -1) : n_(n), L_(L) {
        if (n < 3) throw std::invalid_argument("zonal model needs n >= 3");
        if (L < 1) throw std::invalid_argument("zonal model needs degree >= 1");
        // lap u |grad u|^2 is a polynomial of degree 3L in t.
        const int m = nodes > 0 ? nodes : (3 * L + 1) / 2 + 8;
        GaussRule r = gauss_gegenbauer(m, 0.5 * (n - 2));
        const double s = sphere_area(n - 1);
        t_.resize(m + 2);
        w_ = Eigen::VectorXd::Zero(m + 2);
        for (int j = 0; j < m; ++j) {
            t_[j] = r.nodes[j];
            w_[j] = s * r.weights[j];
        }
        t_[m] = 1.0;
        t_[m + 1] = -1.0;
        const int M = m + 2;
        Z_.resize(M, L + 1);
        dZ_.resize(M, L + 1);
        for (int j = 0; j < M; ++j)
            for (int l = 0; l <= L; ++l) {
                double z, dz, ddz;
                zonal_derivatives(n, l, t_[j], z, dz, ddz);
                Z_(j, l) = z;
                dZ_(j, l) = dz;
            }
        sin2_ = (1.0 - t_.array().square()).cwiseMax(0.0).matrix();
    }

    int size() const override { return L_ + 1; }
    int degree_of(int i) const override { return i; }
    double eigenvalue(int l) const override { return static_cast<double>(l) * (l + n_ - 2); }
    int n() const { return n_; }
    int degree() const { return L_; }

    Evaluation evaluate(const Eigen::VectorXd& c, double mu, bool want_gradient) const override {
        Eigen::VectorXd lc(c.size());
        for (int l = 0; l < c.size(); ++l) lc[l] = -eigenvalue(l) * c[l];
        Eigen::VectorXd lap = Z_ * lc;
        Eigen::VectorXd du = dZ_ * c;  // du/dt
        Eigen::VectorXd g2 = sin2_.cwiseProduct(du.cwiseAbs2());
        Eigen::VectorXd hinge = (lap.array() - 1.0).cwiseMax(0.0).matrix();

        Evaluation e;
        e.parts.numerator = weighted_sum(w_, lap.cwiseProduct(g2));
        e.parts.denominator = weighted_sum(w_, g2);
        e.parts.max_laplacian = lap.maxCoeff();
        e.parts.grad_inf = std::sqrt(g2.maxCoeff());
        e.parts.laplacian_mean = weighted_sum(w_, lap);
        e.penalty = mu * weighted_sum(w_, hinge.cwiseAbs2());
        const double D = e.parts.denominator, Nm = e.parts.numerator;
        e.value = (D > 0 ? Nm / D : 0.0) - e.penalty;
        if (!want_gradient) return e;

        Eigen::VectorXd wg2 = w_.cwiseProduct(g2);
        Eigen::VectorXd wdu = w_.cwiseProduct(sin2_).cwiseProduct(du);
        Eigen::VectorXd a_g2 = Z_.transpose() * wg2;
        Eigen::VectorXd dN_grad = 2.0 * (dZ_.transpose() * wdu.cwiseProduct(lap));
        Eigen::VectorXd dD = 2.0 * (dZ_.transpose() * wdu);
        Eigen::VectorXd a_hinge = Z_.transpose() * w_.cwiseProduct(hinge);
        e.gradient.resize(c.size());
        for (int l = 0; l < c.size(); ++l) {
            double lam = eigenvalue(l);
            double dN = -lam * a_g2[l] + dN_grad[l];
            double dR = D > 0 ? (dN * D - Nm * dD[l]) / (D * D) : 0.0;
            e.gradient[l] = dR + 2.0 * mu * lam * a_hinge[l];
        }
        return e;
    }

    // Sup of |grad u| = sin(theta)|du/dt| on a dense theta grid.
    double dense_grad_inf(const Eigen::VectorXd& c) const {
        const int m = 16 * (L_ + 1) + 1;
        double best = 0;
        for (int i = 0; i <= m; ++i) {
            double th = kPi * i / m, t = std::cos(th), du = 0;
            for (int l = 1; l <= L_; ++l) {
                double z, dz, ddz;
                zonal_derivatives(n_, l, t, z, dz, ddz);
                du += c[l] * dz;
            }
            best = std::max(best, std::sin(th) * std::abs(du));
        }
        return best;
    }

private:
    int n_, L_;
    Eigen::VectorXd t_, w_, sin2_;
    Eigen::MatrixXd Z_, dZ_;
};

RatioParts parts_or_throw(const RatioParts& p) {
    if (!(p.denominator > 1e-14)) throw std::invalid_argument("ratio: int |grad u|^2 vanishes");
    return p;
}

double max_rel_error(const Eigen::VectorXd& analytic, const Eigen::VectorXd& fd) {
    double scale = std::max(fd.cwiseAbs().maxCoeff(), 1e-300);
    return (analytic - fd).cwiseAbs().maxCoeff() / scale;
}

double gradient_check(const Model& model, const Eigen::VectorXd& c, double mu) {
    Evaluation e = model.evaluate(c, mu, true);
    // Fourth-order central stencil. The step stays small because a wider one
    // straddles hinge kinks, where the objective is only C^1.
    const double h = 3e-6 * std::max(c.cwiseAbs().maxCoeff(), 1e-8);
    Eigen::VectorXd fd(c.size());
    auto at = [&](int i, double s) {
        Eigen::VectorXd p = c;
        p[i] += s;
        return model.evaluate(p, mu, false).value;
    };
    for (int i = 0; i < c.size(); ++i)
        fd[i] = (8.0 * (at(i, h) - at(i, -h)) - (at(i, 2 * h) - at(i, -2 * h))) / (12.0 * h);
    // The constant mode does not enter the objective.
    for (int i = 0; i < c.size(); ++i)
        if (model.degree_of(i) == 0) fd[i] = e.gradient[i] = 0.0;
    return max_rel_error(e.gradient, fd);
}

// Random start with coefficient decay (1 + l)^{-2} and no constant mode,
// scaled so max lap u = 2: the hinge is active and the check covers it.
Eigen::VectorXd random_start(const Model& model, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Eigen::VectorXd c(model.size());
    for (int i = 0; i < c.size(); ++i) {
        int l = model.degree_of(i);
        c[i] = l == 0 ? 0.0 : normal(rng) / ((1.0 + l) * (1.0 + l));
    }
    double top = model.evaluate(c, 0, false).parts.max_laplacian;
    if (!(top > 0)) {
        c = -c;
        top = model.evaluate(c, 0, false).parts.max_laplacian;
    }
    return c * (2.0 / top);
}

// Rescale onto ||grad u||_inf <= cap (scaling down keeps lap u <= 1).
void apply_cap(const Model& model, Eigen::VectorXd& c, double cap) {
    if (!(cap > 0)) return;
    double gi = model.evaluate(c, 0, false).parts.grad_inf;
    if (gi > cap) c *= cap / gi;
}

struct AscentOutcome {
    Eigen::VectorXd c;
    int steps = 0;
};

AscentOutcome ascend(const Model& model, Eigen::VectorXd c, const SearchOptions& opt) {
    AscentOutcome out;
    apply_cap(model, c, opt.amplitude_cap);
    for (double mu : opt.mu_ladder) {
        Evaluation e = model.evaluate(c, mu, true);
        double gn = e.gradient.norm();
        double step = gn > 0 ? 1e-2 * std::max(c.norm(), 1e-6) / gn : 0.0;
        for (int it = 0; it < opt.iterations_per_mu && gn > 0; ++it) {
            bool accepted = false;
            for (int bt = 0; bt < 60; ++bt) {
                Eigen::VectorXd trial = c + step * e.gradient;
                apply_cap(model, trial, opt.amplitude_cap);
                Evaluation f = model.evaluate(trial, mu, true);
                if (f.value >= e.value + 1e-4 * step * gn * gn) {
                    c = std::move(trial);
                    e = std::move(f);
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted) break;
            ++out.steps;
            gn = e.gradient.norm();
            step *= 2.0;
            if (gn * step < 1e-14 * std::max(c.norm(), 1e-300)) break;
        }
    }
    out.c = std::move(c);
    return out;
}

// The hinge leaves an O(1/mu) violation; one rescale removes it exactly.
Eigen::VectorXd make_feasible(const Model& model, Eigen::VectorXd c) {
    double top = model.evaluate(c, 0, false).parts.max_laplacian;
    if (top > 1.0) c /= top;
    return c;
}

ConjectureCandidate zero_marker(int n) {
    ConjectureCandidate z;
    z.n = n;
    z.feasible = false;
    return z;
}

void fill_from_parts(ConjectureCandidate& cand, const RatioParts& p) {
    cand.numerator = p.numerator;
    cand.denominator = p.denominator;
    cand.ratio = p.denominator > 1e-14 ? p.numerator / p.denominator : 0.0;
    cand.constraint_margin = 1.0 - p.max_laplacian;
    cand.grad_norm_inf = p.grad_inf;
    cand.feasible = p.denominator > 1e-14 && cand.constraint_margin >= -default_tolerances().conjecture_feasible;
}

SearchResult run_search(const Model& model, int n, int basis_cap, int restarts, std::uint64_t seed,
                        const SearchOptions& opt,
                        const std::function<ConjectureCandidate(const Eigen::VectorXd&)>& finish) {
    if (restarts < 1) throw std::invalid_argument("maximize_ratio: need at least one restart");
    SearchResult res;
    res.n = n;
    res.basis_cap = basis_cap;
    res.seed = seed;
    res.best = zero_marker(n);
    bool have = false;
    for (int r = 0; r < restarts; ++r) {
        RestartRecord rec;
        rec.seed = derive_seed(seed, static_cast<std::uint64_t>(r));
        Eigen::VectorXd c0 = random_start(model, rec.seed);
        if (opt.check_gradient) {
            rec.gradient_rel_error = gradient_check(model, c0, opt.mu_ladder.front());
            res.max_gradient_rel_error = std::max(res.max_gradient_rel_error, rec.gradient_rel_error);
        }
        AscentOutcome a = ascend(model, c0, opt);
        Eigen::VectorXd c = make_feasible(model, a.c);
        ConjectureCandidate cand = finish(c);
        rec.ratio = cand.ratio;
        rec.constraint_margin = cand.constraint_margin;
        rec.grad_norm_inf = cand.grad_norm_inf;
        rec.steps = a.steps;
        res.restarts.push_back(rec);
        if (cand.feasible && (!have || cand.ratio > res.best.ratio)) {
            res.best = std::move(cand);
            have = true;
        }
    }
    return res;
}

SpherePtr search_sphere(int n, int L) {
    // Exact quadrature of the degree-3L integrand.
    int res = std::max(L + 1, (3 * L + 2) / 2 + 1);
    return make_sphere(n, res, L);
}

}  // namespace

RatioParts ratio_parts(const ScalarField& u) {
    if (!u.coeffs) throw std::logic_error("ratio: field must be analyzed first");
    return SphereModel(u.sphere).evaluate(*u.coeffs, 0, false).parts;
}

RatioParts ratio_parts(const ZonalField& u, int nodes) {
    const int L = static_cast<int>(u.coeffs.size()) - 1;
    if (L < 1) {
        RatioParts p;
        return p;
    }
    ZonalModel m(u.n, L, nodes);
    Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(u.coeffs.data(), L + 1);
    RatioParts p = m.evaluate(c, 0, false).parts;
    p.grad_inf = std::max(p.grad_inf, m.dense_grad_inf(c));
    return p;
}

double ratio(const ScalarField& u) {
    RatioParts p = parts_or_throw(ratio_parts(u));
    return p.numerator / p.denominator;
}

double ratio(const ZonalField& u) {
    RatioParts p = parts_or_throw(ratio_parts(u));
    return p.numerator / p.denominator;
}

double feasibility(const ScalarField& u) { return 1.0 - ratio_parts(u).max_laplacian; }

double feasibility(const ZonalField& u) {
    if (u.coeffs.size() < 2) return 1.0;
    return 1.0 - ratio_parts(u).max_laplacian;
}

double trivial_bound_check(const ScalarField& u) {
    RatioParts p = ratio_parts(u);
    return p.denominator - p.numerator;
}

ScalarField field_with_laplacian(const ScalarField& target) {
    if (!target.coeffs) throw std::logic_error("field_with_laplacian: target must be analyzed first");
    const auto& basis = target.sphere->basis();
    double mean = quadrature(target);
    double scale = std::max(1.0, std::sqrt(quadrature(target.sphere->grid(), target.values.cwiseAbs2())));
    if (std::abs(mean) > 1e-9 * scale)
        throw std::invalid_argument("field_with_laplacian: the target does not integrate to zero");
    Eigen::VectorXd c = *target.coeffs;
    for (int i = 0; i < c.size(); ++i) {
        int l = basis.degree_of(i);
        c[i] = l == 0 ? 0.0 : -c[i] / basis.eigenvalue(l);
    }
    return synthesize(c, target.sphere);
}

double conjectured_bound(int n) { return static_cast<double>(n - 2) / (n - 1); }

SearchResult maximize_ratio(SpherePtr sphere, int restarts, std::uint64_t seed, const SearchOptions& options) {
    SphereModel model(sphere);
    const int n = sphere->n();
    auto finish = [&](const Eigen::VectorXd& c) {
        ConjectureCandidate cand;
        cand.n = n;
        cand.u = synthesize(c, sphere);
        fill_from_parts(cand, model.evaluate(c, 0, false).parts);
        if (cand.feasible && cand.ratio > conjectured_bound(n)) {
            const int L = sphere->max_degree();
            SpherePtr fine = make_sphere(n, 2 * sphere->grid().resolution, L);
            cand.reverified_ratio = ratio(synthesize(c, fine));
        }
        return cand;
    };
    return run_search(model, n, sphere->max_degree(), restarts, seed, options, finish);
}

SearchResult maximize_ratio(int n, int basis_cap, int restarts, std::uint64_t seed, const SearchOptions& options) {
    if (n < 2) throw std::invalid_argument("maximize_ratio: n >= 2 required");
    if (basis_cap < 1) throw std::invalid_argument("maximize_ratio: basis cap must be >= 1");
    if (n <= 3) return maximize_ratio(search_sphere(n, basis_cap), restarts, seed, options);
    ZonalModel model(n, basis_cap);
    auto finish = [&](const Eigen::VectorXd& c) {
        ConjectureCandidate cand;
        cand.n = n;
        cand.zonal = ZonalField{n, std::vector<double>(c.data(), c.data() + c.size())};
        fill_from_parts(cand, model.evaluate(c, 0, false).parts);
        cand.grad_norm_inf = std::max(cand.grad_norm_inf, model.dense_grad_inf(c));
        if (cand.feasible && cand.ratio > conjectured_bound(n)) {
            ZonalModel fine(n, basis_cap, 2 * ((3 * basis_cap + 1) / 2 + 8));
            RatioParts p = fine.evaluate(c, 0, false).parts;
            cand.reverified_ratio = p.numerator / p.denominator;
        }
        return cand;
    };
    return run_search(model, n, basis_cap, restarts, seed, options, finish);
}

double gradient_check(SpherePtr sphere, const Eigen::VectorXd& c, double mu) {
    return gradient_check(SphereModel(std::move(sphere)), c, mu);
}

double gradient_check(const ZonalField& u, double mu) {
    const int L = static_cast<int>(u.coeffs.size()) - 1;
    ZonalModel m(u.n, L);
    return gradient_check(m, Eigen::Map<const Eigen::VectorXd>(u.coeffs.data(), L + 1), mu);
}

GreenStep green_step(int n, int k) {
    if (n < 4) throw std::invalid_argument("green_step: the Green construction needs n >= 4");
    if (k < 1) throw std::invalid_argument("green_step: truncation degree must be >= 1");
    // lap u_k = sum_l Z_l(1) Z_l(t), maximal at t = 1 where it equals sum_l Z_l(1)^2.
    std::vector<double> c(k + 1, 0.0);
    double peak = 0;
    for (int l = 1; l <= k; ++l) {
        double z1 = zonal_harmonic(n, l, 1.0);
        c[l] = -z1 / (static_cast<double>(l) * (l + n - 2));
        peak += z1 * z1;
    }
    for (double& x : c) x /= peak;
    GreenStep s;
    s.k = k;
    s.candidate.n = n;
    s.candidate.zonal = ZonalField{n, c};
    fill_from_parts(s.candidate, ratio_parts(*s.candidate.zonal));
    return s;
}

std::vector<GreenStep> green_sequence(int n, const std::vector<int>& ks) {
    if (n < 4) throw std::invalid_argument("green_sequence: the Green construction needs n >= 4");
    std::vector<GreenStep> out;
    for (int k : ks) out.push_back(green_step(n, k));
    return out;
}

void write_search_csv_header(std::ostream& out) {
    out << "n,seed,basis_cap,best_ratio,constraint_margin,grad_inf,conjectured_bound\n";
}

void write_search_row(std::ostream& out, const SearchResult& r) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "%d,%llu,%d,%.17g,%.17g,%.17g,%.17g\n", r.n,
                  static_cast<unsigned long long>(r.seed), r.basis_cap, r.best.ratio, r.best.constraint_margin,
                  r.best.grad_norm_inf, conjectured_bound(r.n));
    out << buf;
}

void write_green_csv_header(std::ostream& out) { out << "n,k,ratio,constraint_margin,grad_inf\n"; }

void write_green_row(std::ostream& out, int n, const GreenStep& s) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.17g\n", n, s.k, s.candidate.ratio,
                  s.candidate.constraint_margin, s.candidate.grad_norm_inf);
    out << buf;
}

}  // namespace quermass
