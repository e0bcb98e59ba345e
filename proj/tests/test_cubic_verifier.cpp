#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "quermass/axisym.hpp"
#include "quermass/cubic_verifier.hpp"
#include "quermass/numerics.hpp"
#include "quermass/star_domain.hpp"

using namespace quermass;

namespace {

double y20(const Eigen::VectorXd& x) { return std::sqrt(5.0 / (16.0 * kPi)) * (3.0 * x[2] * x[2] - 1.0); }

ScalarField from_function(SpherePtr s, const std::function<double(const Eigen::VectorXd&)>& f, int L) {
    return analyze(field_from_function(std::move(s), f), L);
}

SpherePtr sphere_for(int n) { return n == 3 ? make_sphere(3, 24) : make_sphere(4, 10, 6); }

}  // namespace

TEST(Nonlinearity, PresetsAreNormalizedAndPartialsMatch) {
    for (int n : {3, 4, 5}) {
        for (const NonlinearityPair& p : {mean_curvature_pair(n), stability_pair(n)}) {
            EXPECT_DOUBLE_EQ(p.f(0, 0), 1.0);
            EXPECT_DOUBLE_EQ(p.g(0, 0), 1.0);
            const double s = 0.07, t = 0.01, h = 1e-6;
            EXPECT_NEAR(p.g_s(s, t), (p.g(s + h, t) - p.g(s - h, t)) / (2 * h), 1e-8);
            EXPECT_NEAR(p.g_t(s, t), (p.g(s, t + h) - p.g(s, t - h)) / (2 * h), 1e-8);
        }
    }
}

TEST(CubicTerm, VanishesOnConstants) {
    auto s = make_sphere(3, 16);
    ScalarField c = analyze(constant_field(s, 0.1), 15);
    EXPECT_NEAR(cubic_term(c), 0.0, 1e-15);
    EXPECT_NEAR(cubic_term(c, mean_curvature_pair(3).f), 0.0, 1e-15);
    Lemma41Report r = lemma41_check(c, mean_curvature_pair(3), 30, 0.5);
    EXPECT_NEAR(r.lhs, 0.0, 1e-15);
    EXPECT_NEAR(r.rhs_main, 0.0, 1e-15);
    Lemma42Report q = lemma42_check(c, 0.5);
    EXPECT_NEAR(q.margin, 0.0, 1e-15);
}

TEST(CubicTerm, IntegrationByParts) {
    for (int n : {3, 4}) {
        auto s = sphere_for(n);
        for (int i = 0; i < 5; ++i) {
            ScalarField u = random_field(s, n == 3 ? 10 : 6, 0.1, 50 + i);
            FieldJets J = jets(u);
            Eigen::VectorXd g2 = J.grad.colwise().squaredNorm().transpose();
            double rhs = -0.5 * quadrature(s->grid(), J.laplacian.cwiseProduct(g2));
            EXPECT_NEAR(cubic_term(u), rhs, 1e-8);
        }
    }
    // Degree one on S^2: u = eps x_1.
    auto s = make_sphere(3, 16);
    ScalarField u = from_function(s, [](const Eigen::VectorXd& x) { return 0.05 * x[0]; }, 1);
    FieldJets J = jets(u);
    Eigen::VectorXd g2 = J.grad.colwise().squaredNorm().transpose();
    EXPECT_NEAR(cubic_term(u), -0.5 * quadrature(s->grid(), J.laplacian.cwiseProduct(g2)), 1e-8);
}

TEST(CubicTerm, MatchesMeanCurvatureExpansionResidual) {
    const int n = 3;
    const double eps = 0.05;
    auto s = make_sphere(3, 32);
    ScalarField u = from_function(s, [&](const Eigen::VectorXd& x) { return eps * y20(x); }, 4);
    StarDomain D = make_domain(u);
    double intH = curvature_integrals(D).H;
    FieldJets J = jets(u, JetOrder::Gradient);
    double iu = quadrature(s->grid(), J.value);
    double iu2 = quadrature(s->grid(), J.value.cwiseAbs2());
    double ig2 = quadrature(s->grid(), J.grad.colwise().squaredNorm().transpose());
    double residual = intH - (n - 1) * sphere_area(n) - (n - 1) * (n - 2) * iu -
                      0.5 * (n - 1) * (n - 2) * (n - 3) * iu2 - (n - 2) * ig2;
    EXPECT_NEAR(residual, cubic_term(u, mean_curvature_pair(n).f), 10 * eps * eps * eps);
}

TEST(HessianEigenfields, TraceAndZonalStructure) {
    for (int n : {3, 4}) {
        auto s = sphere_for(n);
        ScalarField u = random_field(s, n == 3 ? 10 : 6, 0.1, 9);
        Eigen::MatrixXd lam = hessian_eigenfields(u);
        Eigen::VectorXd trace = lam.colwise().sum().transpose();
        EXPECT_LT((trace - jets(u).laplacian).cwiseAbs().maxCoeff(), 1e-8);
        for (int k = 0; k < lam.cols(); ++k)
            for (int i = 1; i < n - 1; ++i) EXPECT_LE(lam(i - 1, k), lam(i, k));
    }
    // Zonal u: the eigenvalues are V'' (meridian) and V' cot(theta) (rotation).
    std::vector<double> c = {0.0, 0.03, -0.02, 0.01};
    AxialProfile V = axial_from_zonal(3, c);
    auto s = make_sphere(3, 24);
    ScalarField u = from_function(s, [&](const Eigen::VectorXd& x) { return V.jet(std::acos(x[2])).V; }, 3);
    Eigen::MatrixXd lam = hessian_eigenfields(u);
    for (int k = 0; k < s->size(); k += 7) {
        double th = std::acos(s->grid().nodes(2, k));
        AxialJet j = V.jet(th);
        double a = j.ddV, b = j.dV * std::cos(th) / std::sin(th);
        EXPECT_NEAR(lam(0, k), std::min(a, b), 1e-6);
        EXPECT_NEAR(lam(1, k), std::max(a, b), 1e-6);
    }
}

TEST(Lemma41, HighFrequencyFieldWithinSlack) {
    auto s = make_sphere(3, 32);
    for (const NonlinearityPair& p : {unit_pair(), mean_curvature_pair(3), stability_pair(3)}) {
        ScalarField u = random_field(s, 14, 0.02, 3, 10);
        Lemma41Report r = lemma41_check(u, p, 30, 0.05);
        EXPECT_TRUE(r.passes) << p.name;
        EXPECT_GE(r.margin, 0.0);
        EXPECT_GT(r.slack_scale, 0.0);
    }
}

TEST(Lemma41, RejectsFieldsAboveTheCap) {
    auto s = make_sphere(3, 16);
    ScalarField u = random_field(s, 5, 0.2, 1);
    EXPECT_THROW(lemma41_check(u, unit_pair(), 30, 0.1), std::invalid_argument);
    EXPECT_THROW(lemma42_check(u, 0.1), std::invalid_argument);
}

TEST(Lemma41, SlackRatioShrinksWithEps) {
    auto s = make_sphere(3, 24);
    for (const NonlinearityPair& p : {mean_curvature_pair(3), stability_pair(3)}) {
        std::vector<double> worst;
        for (double eps : {0.04, 0.02, 0.01}) {
            double w = 0;
            for (int i = 0; i < 10; ++i) {
                ScalarField u = random_field(s, 10, eps, derive_seed(77, i));
                w = std::max(w, std::abs(lemma41_check(u, p, 30, 0.05).ratio));
            }
            worst.push_back(w);
        }
        EXPECT_LT(worst[1], worst[0]) << p.name;
        EXPECT_LT(worst[2], worst[1]) << p.name;
    }
}

TEST(Lemma42, DegreeOneAndRandomFields) {
    auto s3 = make_sphere(3, 16);
    ScalarField x1 = from_function(s3, [](const Eigen::VectorXd& x) { return 0.05 * x[0]; }, 1);
    Lemma42Report r1 = lemma42_check(x1, 0.1);
    EXPECT_TRUE(r1.passes);
    EXPECT_GE(r1.margin, -1e-12);
    for (int n : {3, 4}) {
        auto s = sphere_for(n);
        for (int i = 0; i < 40; ++i) {
            ScalarField u = random_field(s, n == 3 ? 12 : 6, 0.1, derive_seed(n, i));
            Lemma42Report r = lemma42_check(u, 0.1);
            EXPECT_GE(r.margin, -1e-7) << n << " " << i;
            EXPECT_TRUE(r.passes);
        }
    }
}
