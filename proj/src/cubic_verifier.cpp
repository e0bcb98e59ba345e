#include "quermass/cubic_verifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "quermass/config.hpp"
#include "quermass/inequality_lab.hpp"
#include "quermass/numerics.hpp"

namespace quermass {

namespace {

void require_c1(const ScalarField& u, double eps_cap) {
    double e = c1_norm(u);
    if (e > eps_cap * (1.0 + 1e-12)) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "C^1 norm %.6g exceeds the cap %.6g", e, eps_cap);
        throw std::invalid_argument(buf);
    }
}

}  // namespace

NonlinearityPair mean_curvature_pair(int n) {
    NonlinearityPair p;
    p.name = "mean_curvature";
    p.f = [n](double s, double t) { return std::pow(1 + s, n - 3) / ((1 + s) * (1 + s) + t); };
    p.g = [](double, double) { return 1.0; };
    p.g_s = [](double, double) { return 0.0; };
    p.g_t = [](double, double) { return 0.0; };
    return p;
}

NonlinearityPair stability_pair(int n) {
    NonlinearityPair p = mean_curvature_pair(n);
    p.name = "stability";
    p.g = [](double s, double t) { return 1.0 / std::sqrt(1 + t / ((1 + s) * (1 + s))); };
    // g = (1 + r)^{-1/2} with r = t (1+s)^{-2}.
    p.g_s = [](double s, double t) {
        double a = 1 + s, r = t / (a * a);
        return std::pow(1 + r, -1.5) * t / (a * a * a);
    };
    p.g_t = [](double s, double t) {
        double a = 1 + s, r = t / (a * a);
        return -0.5 * std::pow(1 + r, -1.5) / (a * a);
    };
    return p;
}

NonlinearityPair unit_pair() {
    NonlinearityPair p;
    p.name = "unit";
    p.f = [](double, double) { return 1.0; };
    p.g = [](double, double) { return 1.0; };
    p.g_s = [](double, double) { return 0.0; };
    p.g_t = [](double, double) { return 0.0; };
    return p;
}

Eigen::VectorXd hessian_on_gradient(const FieldJets& J, int n) {
    const int N = static_cast<int>(J.value.size());
    Eigen::VectorXd out(N);
    for (int k = 0; k < N; ++k) out[k] = J.grad.col(k).dot(J.hessian_at(k, n) * J.grad.col(k));
    return out;
}

double cubic_term(const ScalarField& u, const std::function<double(double, double)>& f) {
    const int n = u.n();
    FieldJets J = jets(u, JetOrder::Hessian);
    Eigen::VectorXd hgg = hessian_on_gradient(J, n);
    Eigen::VectorXd vals(hgg.size());
    for (int k = 0; k < vals.size(); ++k) vals[k] = f(J.value[k], J.grad.col(k).squaredNorm()) * hgg[k];
    return quadrature(u.sphere->grid(), vals);
}

double cubic_term(const ScalarField& u) {
    return cubic_term(u, [](double, double) { return 1.0; });
}

Eigen::MatrixXd hessian_eigenfields(const ScalarField& u) {
    const int n = u.n();
    const auto& g = u.sphere->grid();
    FieldJets J = jets(u, JetOrder::Hessian);
    Eigen::MatrixXd out(n - 1, g.size());
    for (int k = 0; k < g.size(); ++k) {
        Eigen::MatrixXd E = tangent_frame(g.nodes.col(k));
        Eigen::MatrixXd h = E.transpose() * J.hessian_at(k, n) * E;
        h = 0.5 * (h + h.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
        out.col(k) = es.eigenvalues();
    }
    return out;
}

double c1_norm(const ScalarField& u) {
    FieldJets J = jets(u, JetOrder::Gradient);
    return std::max(J.value.cwiseAbs().maxCoeff(), J.grad.colwise().norm().maxCoeff());
}

Eigen::VectorXd weighted_divergence(const ScalarField& u, const NonlinearityPair& pair) {
    const int n = u.n();
    FieldJets J = jets(u, JetOrder::Hessian);
    Eigen::VectorXd hgg = hessian_on_gradient(J, n);
    Eigen::VectorXd out(hgg.size());
    for (int k = 0; k < out.size(); ++k) {
        double s = J.value[k], t = J.grad.col(k).squaredNorm();
        out[k] = pair.g(s, t) * J.laplacian[k] + pair.g_s(s, t) * t + 2.0 * pair.g_t(s, t) * hgg[k];
    }
    return out;
}

Lemma41Report lemma41_check(const ScalarField& u, const NonlinearityPair& pair, double lambda, double eps_cap,
                            double c_slack) {
    require_c1(u, eps_cap);
    const auto& g = u.sphere->grid();
    Lemma41Report r;
    r.eps = c1_norm(u);
    r.c_slack = c_slack;
    r.lhs = cubic_term(u, pair.f);
    Eigen::VectorXd div = weighted_divergence(u, pair);
    ScalarField u2 = split_frequencies(u, lambda).second;
    Eigen::VectorXd g2 = jets(u2, JetOrder::Gradient).grad.colwise().squaredNorm().transpose();
    Eigen::VectorXd gu = jets(u, JetOrder::Gradient).grad.colwise().squaredNorm().transpose();
    r.rhs_main = -0.5 * quadrature(g, div.cwiseProduct(g2));
    Eigen::VectorXd w = (div.cwiseMax(0.0).array() + 1.0).matrix().cwiseProduct(gu);
    r.slack_scale = quadrature(g, w);
    r.margin = r.lhs - r.rhs_main + c_slack * r.eps * r.slack_scale;
    r.ratio = r.slack_scale > 0 ? (r.lhs - r.rhs_main) / r.slack_scale : 0.0;
    r.passes = r.margin >= 0.0;
    return r;
}

Lemma41Report lemma41_check(const ScalarField& u, const NonlinearityPair& pair, double lambda, double eps_cap) {
    return lemma41_check(u, pair, lambda, eps_cap, default_tolerances().lemma41_c_slack);
}

Lemma42Report lemma42_check(const ScalarField& u, double eps_cap, double tolerance) {
    require_c1(u, eps_cap);
    const int n = u.n();
    const auto& g = u.sphere->grid();
    FieldJets J = jets(u, JetOrder::Hessian);
    Eigen::MatrixXd lam = hessian_eigenfields(u);
    Eigen::VectorXd gu = J.grad.colwise().squaredNorm().transpose();
    Eigen::VectorXd upper(g.size());
    for (int k = 0; k < g.size(); ++k) upper[k] = lam.col(k).tail(n - 2).sum() * gu[k];
    Lemma42Report r;
    r.lhs = quadrature(g, hessian_on_gradient(J, n));
    r.rhs = -quadrature(g, upper) / 3.0;
    r.margin = r.lhs - r.rhs;
    r.scale = quadrature(g, J.laplacian.cwiseAbs().cwiseProduct(gu));
    r.passes = r.margin >= -tolerance * std::max(1.0, r.scale);
    return r;
}

Lemma42Report lemma42_check(const ScalarField& u, double eps_cap) {
    return lemma42_check(u, eps_cap, default_tolerances().lemma42_margin);
}

ScalarField random_field(SpherePtr sphere, int L, double c1, std::uint64_t seed, int min_degree) {
    if (!(c1 > 0)) throw std::invalid_argument("random_field: C^1 size must be positive");
    Eigen::VectorXd c = random_coefficients(*sphere, L, seed, 2.0, std::max(min_degree, 0));
    ScalarField u = synthesize(c, sphere);
    double e = c1_norm(u);
    if (!(e > 0)) throw std::invalid_argument("random_field: degenerate draw");
    return scaled(u, c1 / e);
}

void write_lemma_csv_header(std::ostream& out) {
    out << "lemma,n,seed,eps_scale,lhs,rhs,slack_scale,margin,ratio\n";
}

void write_lemma41_row(std::ostream& out, int n, std::uint64_t seed, double eps_scale, const Lemma41Report& r) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "4.1,%d,%llu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", n,
                  static_cast<unsigned long long>(seed), eps_scale, r.lhs, r.rhs_main, r.slack_scale, r.margin,
                  r.ratio);
    out << buf;
}

void write_lemma42_row(std::ostream& out, int n, std::uint64_t seed, double eps_scale, const Lemma42Report& r) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "4.2,%d,%llu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", n,
                  static_cast<unsigned long long>(seed), eps_scale, r.lhs, r.rhs, r.scale, r.margin,
                  r.scale > 0 ? r.margin / r.scale : 0.0);
    out << buf;
}

}  // namespace quermass
