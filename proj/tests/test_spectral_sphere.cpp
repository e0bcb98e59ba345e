#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "quermass/numerics.hpp"
#include "quermass/spectral_sphere.hpp"

using namespace quermass;

namespace {

Eigen::VectorXd random_coeffs(const Sphere& s, int L, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Eigen::VectorXd c = Eigen::VectorXd::Zero(s.basis().size());
    for (int i = 0; i < s.basis().offset(L + 1); ++i) c[i] = normal(rng);
    return c;
}

double y20(const Eigen::VectorXd& x) {
    return std::sqrt(5.0 / (16.0 * kPi)) * (3.0 * x[2] * x[2] - 1.0);
}

}  // namespace

TEST(Grid, TotalWeightAndNorms) {
    for (int n = 2; n <= 5; ++n) {
        SphericalGrid g = build_grid(n, n <= 3 ? 32 : 12);
        EXPECT_NEAR(pairwise_sum(g.weights) / sphere_area(n), 1.0, 1e-12) << n;
        for (int k = 0; k < g.size(); ++k) {
            EXPECT_NEAR(g.nodes.col(k).norm(), 1.0, 1e-14);
            EXPECT_GT(g.weights[k], 0.0);
        }
    }
    EXPECT_NEAR(pairwise_sum(build_grid(4, 16).weights), 2 * kPi * kPi, 1e-10);
}

TEST(Grid, RejectsBadParameters) {
    EXPECT_THROW(build_grid(1, 8), std::invalid_argument);
    EXPECT_THROW(build_grid(3, 3), std::invalid_argument);
}

TEST(Grid, IntegratesMonomialsExactly) {
    SphericalGrid g = build_grid(3, 32);
    Eigen::VectorXd x1sq = g.nodes.row(0).array().square().transpose();
    EXPECT_NEAR(quadrature(g, x1sq), 4 * kPi / 3, 1e-10);
    // int x1^4 x2^2 x3^6 over S^2 from Gamma functions.
    SphericalGrid h = build_grid(3, 8);
    auto moment = [](int a, int b, int c) {
        auto G = [](double z) { return std::tgamma(z); };
        return 2.0 * G((a + 1) / 2.0) * G((b + 1) / 2.0) * G((c + 1) / 2.0) / G((a + b + c + 3) / 2.0);
    };
    Eigen::VectorXd mono(h.size());
    for (int k = 0; k < h.size(); ++k)
        mono[k] = std::pow(h.nodes(0, k), 4) * std::pow(h.nodes(1, k), 2) * std::pow(h.nodes(2, k), 8);
    EXPECT_NEAR(quadrature(h, mono) / moment(4, 2, 8), 1.0, 1e-10);
    SphericalGrid g4 = build_grid(4, 6);
    Eigen::VectorXd m4(g4.size());
    for (int k = 0; k < g4.size(); ++k)
        m4[k] = std::pow(g4.nodes(0, k), 2) * std::pow(g4.nodes(1, k), 4) * std::pow(g4.nodes(3, k), 4);
    // Beta-function moment on S^3.
    auto G = [](double z) { return std::tgamma(z); };
    double exact = 2.0 * G(1.5) * G(2.5) * G(0.5) * G(2.5) / G(7.0);
    EXPECT_NEAR(quadrature(g4, m4) / exact, 1.0, 1e-10);
}

TEST(Quadrature, MonteCarloOracle) {
    auto sphere = make_sphere(3, 32);
    auto f = [](const Eigen::VectorXd& x) { return std::pow(1.0 + 0.1 * y20(x), 3); };
    double q = quadrature(field_from_function(sphere, f));
    std::mt19937_64 rng(20240611);
    std::normal_distribution<double> normal;
    const int samples = 1000000;
    double sum = 0, sum2 = 0;
    Eigen::VectorXd x(3);
    for (int i = 0; i < samples; ++i) {
        for (int d = 0; d < 3; ++d) x[d] = normal(rng);
        x.normalize();
        double v = 4 * kPi * f(x);
        sum += v;
        sum2 += v * v;
    }
    double mean = sum / samples;
    double sigma = std::sqrt((sum2 / samples - mean * mean) / samples);
    EXPECT_LT(std::abs(q - mean), 3 * sigma);
}

TEST(Basis, EigenvaluesStartWithZeroNMinusOneTwoN) {
    for (int n = 2; n <= 5; ++n) {
        auto s = make_sphere(n, 8, 3);
        auto ev = s->basis().eigenvalues();
        EXPECT_EQ(ev[0], 0.0);
        EXPECT_EQ(ev[1], n - 1.0);
        EXPECT_EQ(ev[2], 2.0 * n);
    }
    EXPECT_EQ(make_sphere(3, 8, 4)->basis().multiplicities(), (std::vector<int>{1, 3, 5, 7, 9}));
    EXPECT_EQ(make_sphere(4, 8, 3)->basis().multiplicities(), (std::vector<int>{1, 4, 9, 16}));
}

class AllDims : public ::testing::TestWithParam<int> {
protected:
    SpherePtr sphere() const {
        int n = GetParam();
        return n <= 3 ? make_sphere(n, 16) : (n == 4 ? make_sphere(n, 10, 5) : make_sphere(n, 8, 4));
    }
};

TEST_P(AllDims, Orthonormality) {
    auto s = sphere();
    const auto& b = s->basis();
    Eigen::MatrixXd Y(s->size(), b.size());
    for (int a = 0; a < b.size(); ++a) {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(b.size());
        c[a] = 1;
        Y.col(a) = synthesize(c, s).values;
    }
    Eigen::MatrixXd G = Y.transpose() * s->grid().weights.asDiagonal() * Y;
    EXPECT_LT((G - Eigen::MatrixXd::Identity(b.size(), b.size())).cwiseAbs().maxCoeff(), 1e-10);
}

TEST_P(AllDims, RoundTripAndParseval) {
    auto s = sphere();
    int L = s->max_degree();
    Eigen::VectorXd c = random_coeffs(*s, L, 7);
    ScalarField f = synthesize(c, s);
    ScalarField g = analyze(field_from_values(s, f.values), L);
    EXPECT_LT((*g.coeffs - c).cwiseAbs().maxCoeff(), 1e-10);
    Eigen::VectorXd sq = f.values.array().square();
    EXPECT_NEAR(c.squaredNorm() / quadrature(s->grid(), sq), 1.0, 1e-9);
}

TEST_P(AllDims, EigenRelationTangencyAndTrace) {
    auto s = sphere();
    const int n = s->n();
    const auto& b = s->basis();
    for (int a = 0; a < b.size(); a += std::max(1, b.size() / 17)) {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(b.size());
        c[a] = 1;
        ScalarField f = synthesize(c, s);
        FieldJets j = jets(f);
        double lam = b.eigenvalue(b.degree_of(a));
        EXPECT_LT((j.laplacian + lam * j.value).cwiseAbs().maxCoeff(), 1e-8);
        for (int k = 0; k < s->size(); ++k) {
            auto h = j.hessian_at(k, n);
            EXPECT_LT(std::abs(s->grid().nodes.col(k).dot(j.grad.col(k))), 1e-10);
            EXPECT_LT((h - h.transpose()).cwiseAbs().maxCoeff(), 1e-10);
            EXPECT_NEAR(h.trace(), j.laplacian[k], 1e-8);
            EXPECT_LT((h * s->grid().nodes.col(k)).norm(), 1e-10);
        }
    }
}

TEST_P(AllDims, IntegrationByParts) {
    auto s = sphere();
    int L = std::min(s->max_degree(), 5);
    ScalarField f = synthesize(random_coeffs(*s, L, 11), s);
    ScalarField g = synthesize(random_coeffs(*s, L, 12), s);
    FieldJets jf = jets(f), jg = jets(g);
    Eigen::VectorXd a = f.values.cwiseProduct(jg.laplacian);
    Eigen::VectorXd d = (jf.grad.cwiseProduct(jg.grad)).colwise().sum().transpose();
    EXPECT_NEAR(quadrature(s->grid(), a) + quadrature(s->grid(), d), 0.0, 1e-8);
}

TEST_P(AllDims, WeakDivergenceMatchesLaplacian) {
    auto s = sphere();
    int L = std::min(s->max_degree(), 4);
    ScalarField f = synthesize(random_coeffs(*s, L, 3), s);
    FieldJets j = jets(f);
    Eigen::VectorXd div = s->basis().weak_divergence(j.grad);
    ScalarField lap = laplacian(f);
    EXPECT_LT((div - *lap.coeffs).cwiseAbs().maxCoeff(), 1e-10);
}

TEST_P(AllDims, PointEvaluationMatchesNodes) {
    auto s = sphere();
    ScalarField f = synthesize(random_coeffs(*s, s->max_degree(), 5), s);
    for (int k = 0; k < s->size(); k += 37)
        EXPECT_NEAR(evaluate(f, s->grid().nodes.col(k)), f.values[k], 1e-10);
}

INSTANTIATE_TEST_SUITE_P(Dims, AllDims, ::testing::Values(2, 3, 4, 5));

TEST(Synthesis, ConstantAndCoordinate) {
    for (int n : {3, 4}) {
        auto s = make_sphere(n, 8, 3);
        ScalarField one = synthesize(unit_coeffs(*s, 0, 0), s);
        EXPECT_LT((one.values.array() - 1.0 / std::sqrt(sphere_area(n))).abs().maxCoeff(), 1e-12);
        ScalarField x1 = analyze(field_from_function(s, [](const Eigen::VectorXd& x) { return x[0]; }), 3);
        int nonzero = 0;
        for (int i = 0; i < x1.coeffs->size(); ++i) {
            if (std::abs((*x1.coeffs)[i]) > 1e-12) {
                ++nonzero;
                if (n == 3) EXPECT_EQ(s->basis().degree_of(i), 1);
            }
        }
        if (n == 3) EXPECT_EQ(nonzero, 1);
        double norm1 = 0;
        for (int i = s->basis().offset(1); i < s->basis().offset(2); ++i) norm1 += std::pow((*x1.coeffs)[i], 2);
        EXPECT_NEAR(norm1, sphere_area(n) / n, 1e-10);
    }
}

TEST(Derivatives, GradientEnergyOfCoordinate) {
    auto s = make_sphere(3, 32);
    ScalarField x1 = analyze(field_from_function(s, [](const Eigen::VectorXd& x) { return x[0]; }), 4);
    Eigen::MatrixXd g = gradient(x1);
    Eigen::VectorXd e = g.colwise().squaredNorm().transpose();
    Eigen::VectorXd sq = x1.values.array().square();
    double oracle = 2.0 * quadrature(s->grid(), sq);
    EXPECT_NEAR(quadrature(s->grid(), e), oracle, 1e-9);
    EXPECT_NEAR(oracle, 8 * kPi / 3, 1e-10);
}

TEST(Derivatives, ConstantHasNoDerivatives) {
    auto s = make_sphere(4, 8, 3);
    FieldJets j = jets(constant_field(s, 2.5));
    EXPECT_LT(j.grad.cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT(j.hess.cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_THROW(jets(field_from_values(s, Eigen::VectorXd::Ones(s->size()))), std::logic_error);
}

TEST(Split, Frequencies) {
    for (int n : {3, 4}) {
        auto s = n == 3 ? make_sphere(3, 16) : make_sphere(4, 10, 5);
        ScalarField x1 = analyze(field_from_function(s, [](const Eigen::VectorXd& x) { return x[0]; }), 5);
        auto [a, b] = split_frequencies(x1, n);
        EXPECT_LT(b.values.cwiseAbs().maxCoeff(), 1e-12);
        auto [c, d] = split_frequencies(x1, 0.5);
        EXPECT_LT(c.values.cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_THROW(split_frequencies(x1, 0.0), std::invalid_argument);

        const auto& basis = s->basis();
        Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(basis.size());
        coeffs[basis.offset(1)] = 0.3;
        coeffs[basis.offset(2) + 1] = -0.7;
        coeffs[basis.offset(5) + 2] = 0.4;
        coeffs[basis.offset(5) + 4] = 0.1;
        ScalarField mix = synthesize(coeffs, s);
        auto [lo, hi] = split_frequencies(mix, 2.0 * n + 1);
        EXPECT_LT((lo.values + hi.values - mix.values).cwiseAbs().maxCoeff(), 1e-10);
        Eigen::VectorXd g2 = gradient(hi).colwise().squaredNorm().transpose();
        Eigen::VectorXd u2 = hi.values.array().square();
        double ratio = quadrature(s->grid(), g2) / quadrature(s->grid(), u2);
        EXPECT_NEAR(ratio / (5.0 * (n + 3)), 1.0, 1e-8);
        EXPECT_NEAR((*hi.coeffs)[basis.offset(5) + 2], 0.4, 1e-14);
        EXPECT_EQ((*hi.coeffs)[basis.offset(2) + 1], 0.0);
    }
}

TEST(Grid, RefinementStability) {
    auto f = [](const Eigen::VectorXd& x) { return std::exp(0.3 * x[0] - 0.2 * x[2]) / (1.5 + x[1]); };
    for (int n : {3, 4}) {
        int r = n == 3 ? 24 : 16;
        double a = quadrature(field_from_function(make_sphere(n, r, 3), f));
        double b = quadrature(field_from_function(make_sphere(n, 2 * r, 3), f));
        EXPECT_NEAR(a / b, 1.0, 1e-9);
    }
}

TEST(Zonal, HarmonicIsUnitNormalized) {
    for (int n : {3, 4, 5}) {
        auto s = make_sphere(n, 12, 2);
        for (int l = 0; l <= 6; ++l) {
            ScalarField z = field_from_function(s, [&](const Eigen::VectorXd& x) { return zonal_harmonic(n, l, x[n - 1]); });
            Eigen::VectorXd sq = z.values.array().square();
            EXPECT_NEAR(quadrature(s->grid(), sq), 1.0, 1e-10);
        }
    }
}
