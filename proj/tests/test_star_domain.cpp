#include <cmath>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "quermass/inequality_lab.hpp"
#include "quermass/numerics.hpp"

using namespace quermass;

namespace {

double y20(const Eigen::VectorXd& x) { return std::sqrt(5.0 / (16.0 * kPi)) * (3.0 * x[2] * x[2] - 1.0); }

StarDomain from_function(SpherePtr s, const std::function<double(const Eigen::VectorXd&)>& f, int L) {
    return make_domain(analyze(field_from_function(std::move(s), f), L));
}

}  // namespace

TEST(StarDomain, UnitBallClosedForms) {
    for (int n : {3, 4, 5}) {
        auto s = n == 3 ? make_sphere(3, 32) : make_sphere(n, 8, 3);
        StarDomain B = unit_ball(s);
        double area = sphere_area(n);
        EXPECT_NEAR(volume(B) / ball_volume(n), 1.0, 1e-12);
        EXPECT_NEAR(perimeter(B) / area, 1.0, 1e-12);
        CurvatureBundle cb = curvatures(B);
        EXPECT_LT((cb.H.array() - (n - 1)).abs().maxCoeff(), 1e-12);
        EXPECT_LT((cb.H_div.array() - (n - 1)).abs().maxCoeff(), 1e-12);
        for (const auto& S : cb.second_fundamental)
            EXPECT_LT((S - Eigen::MatrixXd::Identity(n - 1, n - 1)).cwiseAbs().maxCoeff(), 1e-12);
        CurvatureIntegrals ci = curvature_integrals(B, cb);
        for (int k = 0; k < n; ++k) EXPECT_NEAR(ci.sigma[k] / (binomial(n - 1, k) * area), 1.0, 1e-12) << k;
        EXPECT_NEAR(ci.nuclear, (n - 1) * area, 1e-10);
        EXPECT_NEAR(eps_size(B).value, 0.0, 1e-14);
    }
}

TEST(StarDomain, ConstantProfileIsScaledSphere) {
    const double c = 0.3;
    for (int n : {3, 4}) {
        auto s = n == 3 ? make_sphere(3, 16) : make_sphere(4, 8, 3);
        StarDomain D = make_domain(constant_field(s, c));
        EXPECT_NEAR(volume(D), std::pow(1 + c, n) * ball_volume(n), 1e-12);
        EXPECT_NEAR(perimeter(D), std::pow(1 + c, n - 1) * sphere_area(n), 1e-12);
        CurvatureBundle cb = curvatures(D);
        EXPECT_LT((cb.H.array() - (n - 1) / (1 + c)).abs().maxCoeff(), 1e-12);
        Eigen::MatrixXd nu = normal_field(D);
        EXPECT_LT((nu - D.grid().nodes).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT(eps_size(D).value, 1e-14);
    }
    EXPECT_THROW(make_domain(constant_field(make_sphere(3, 8), -1.0)), std::invalid_argument);
}

TEST(StarDomain, VolumeMonteCarloOracle) {
    auto s = make_sphere(3, 32);
    auto u = [](const Eigen::VectorXd& x) { return 0.05 * y20(x); };
    StarDomain D = from_function(s, u, 4);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unif(-1.1, 1.1);
    const int samples = 1000000;
    int inside = 0;
    Eigen::VectorXd p(3);
    for (int i = 0; i < samples; ++i) {
        for (int d = 0; d < 3; ++d) p[d] = unif(rng);
        double r = p.norm();
        if (r < 1.0 + u(p / r)) ++inside;
    }
    double box = std::pow(2.2, 3), frac = double(inside) / samples;
    double mc = box * frac, sigma = box * std::sqrt(frac * (1 - frac) / samples);
    EXPECT_LT(std::abs(volume(D) - mc), 3 * sigma);
}

TEST(StarDomain, NormalsAreUnitAndObeyDeviationIdentity) {
    auto s = make_sphere(3, 24);
    StarDomain D = from_function(s, [](const Eigen::VectorXd& x) { return 0.1 * x[0]; }, 2);
    Eigen::MatrixXd nu = normal_field(D);
    for (int k = 0; k < nu.cols(); ++k) EXPECT_NEAR(nu.col(k).norm(), 1.0, 1e-12);
    Lemma32Report r = lemma32_check(D);
    EXPECT_LT(r.identity_residual, 1e-14);
    // |nu - x| <= |v| and |nu - x| >= |v| / sqrt(1 + |v|^2) pointwise.
    EXPECT_LE(r.pointwise_normal_over_gradient, 1.0 + 1e-12);
    EXPECT_LE(r.pointwise_gradient_over_normal, std::sqrt(1 + r.max_v * r.max_v) + 1e-12);
}

TEST(StarDomain, TraceOfSecondFundamentalFormIsMeanCurvature) {
    for (int n : {3, 4}) {
        auto s = n == 3 ? make_sphere(3, 32) : make_sphere(4, 12, 5);
        for (int seed = 0; seed < 3; ++seed) {
            StarDomain D = random_domain(s, 4, 0.2, 500 + seed);
            CurvatureBundle cb = curvatures(D, {false, false});
            for (int k = 0; k < D.grid().size(); ++k) {
                EXPECT_NEAR(cb.second_fundamental[k].trace(), cb.H[k], 1e-8);
                EXPECT_NEAR(cb.II_eigenvalues.col(k).sum(), cb.H[k], 1e-8);
                EXPECT_GE(cb.II_eigenvalues.col(k).cwiseAbs().sum(), std::abs(cb.H[k]) - 1e-14);
                EXPECT_EQ(cb.H_plus[k] * cb.H_minus[k], 0.0);
                EXPECT_EQ(cb.H_plus[k] - cb.H_minus[k], cb.H[k]);
            }
            CurvatureIntegrals ci = curvature_integrals(D, cb);
            EXPECT_GE(ci.nuclear, ci.abs_H);
            EXPECT_GE(ci.abs_H, std::abs(ci.H));
        }
    }
}

TEST(StarDomain, GaussCurvatureOfSpheroid) {
    // Spheroid x^2 + y^2 + z^2/c^2 = 1 has Gauss curvature 1/(c^2 (x^2 + y^2 + z^2/c^4)^2).
    const double c = 1.1;
    auto s = make_sphere(3, 48);
    auto r = [&](const Eigen::VectorXd& x) { return 1.0 / std::sqrt(1 - x[2] * x[2] + x[2] * x[2] / (c * c)) - 1.0; };
    StarDomain D = from_function(s, r, 47);
    CurvatureBundle cb = curvatures(D, {false, false});
    Eigen::MatrixXd T = boundary_points(D);
    for (int k = 0; k < D.grid().size(); k += 37) {
        Eigen::VectorXd p = T.col(k);
        double q = p[0] * p[0] + p[1] * p[1] + p[2] * p[2] / std::pow(c, 4);
        double exact = 1.0 / (c * c * q * q);
        EXPECT_NEAR(cb.II_eigenvalues(0, k) * cb.II_eigenvalues(1, k), exact, 1e-8);
        Eigen::VectorXd grad(3);
        grad << p[0], p[1], p[2] / (c * c);
        EXPECT_LT((cb.normal.col(k) - grad.normalized()).norm(), 1e-9);
    }
    CurvatureIntegrals ci = curvature_integrals(D, cb);
    EXPECT_NEAR(ci.sigma[2], 4 * kPi, 1e-9);
    EXPECT_NEAR(ci.nuclear, ci.H, 1e-9);
}

TEST(StarDomain, MeanCurvatureFormsAgreeOnRandomDomains) {
    auto s = make_sphere(3, 64);
    for (int i = 0; i < 5; ++i) {
        StarDomain D = random_domain(s, 6, 0.3, 900 + i);
        CurvatureBundle cb = curvatures(D, {true, true});
        EXPECT_LT(cb.max_form_discrepancy, 1e-7);
    }
    auto s4 = make_sphere(4, 14, 13);
    StarDomain D4 = random_domain(s4, 3, 0.05, 77);
    // The n >= 4 basis resolves the weak divergence less sharply.
    EXPECT_LT(curvatures(D4).max_form_discrepancy, 1e-6);
}

TEST(StarDomain, IntegralOfHExpansion) {
    auto s = make_sphere(3, 32);
    const double eps = 0.01;
    StarDomain D = from_function(s, [&](const Eigen::VectorXd& x) { return eps * y20(x); }, 4);
    CurvatureIntegrals ci = curvature_integrals(D);
    FieldJets J = jets(D.profile);
    const auto& g = D.grid();
    Eigen::VectorXd u2 = J.value.array().square(), g2 = J.grad.colwise().squaredNorm().transpose(), cubic(g.size());
    for (int k = 0; k < g.size(); ++k) {
        double a = 1 + J.value[k];
        cubic[k] = J.grad.col(k).dot(J.hessian_at(k, 3) * J.grad.col(k)) / (a * a + g2[k]);
    }
    // n = 3: (n-1)(n-2) int u + (n-2) int |grad u|^2 + cubic term.
    double model = 2 * quadrature(g, J.value) + quadrature(g, g2) + quadrature(g, cubic);
    double residual = ci.H - 8 * kPi - model;
    EXPECT_LE(std::abs(residual), 10 * eps * (quadrature(g, u2) + quadrature(g, g2)));
}

TEST(StarDomain, ScalingCovariance) {
    for (int n : {3, 4}) {
        auto s = n == 3 ? make_sphere(3, 32) : make_sphere(4, 12, 4);
        StarDomain D = random_domain(s, 4, 0.1, 5);
        CurvatureIntegrals a = curvature_integrals(D);
        for (double f : {0.5, 2.0}) {
            StarDomain E = scaled(D, f);
            EXPECT_NEAR(volume(E) / volume(D), std::pow(f, n), 1e-8 * std::pow(f, n));
            EXPECT_NEAR(perimeter(E) / perimeter(D), std::pow(f, n - 1), 1e-8 * std::pow(f, n - 1));
            CurvatureIntegrals b = curvature_integrals(E);
            for (int k = 0; k < n; ++k)
                EXPECT_NEAR(b.sigma[k] / a.sigma[k], std::pow(f, n - 1 - k), 1e-8 * std::pow(f, n - 1 - k));
        }
    }
}

TEST(StarDomain, RotationInvariance) {
    for (int n : {3, 4}) {
        auto s = n == 3 ? make_sphere(3, 32) : make_sphere(4, 12, 4);
        StarDomain D = random_domain(s, 4, 0.1, 6);
        StarDomain R = rotated(D, random_rotation(n, 42));
        EXPECT_NEAR(volume(R), volume(D), 1e-8);
        EXPECT_NEAR(perimeter(R), perimeter(D), 1e-8);
        CurvatureIntegrals a = curvature_integrals(D), b = curvature_integrals(R);
        EXPECT_NEAR(a.H, b.H, 1e-8);
        EXPECT_NEAR(a.nuclear, b.nuclear, 1e-8);
        for (int k = 0; k < n; ++k) EXPECT_NEAR(a.sigma[k], b.sigma[k], 1e-8);
    }
}

TEST(StarDomain, ConvexDomainNuclearEqualsH) {
    auto s = make_sphere(3, 32);
    StarDomain D = from_function(s, [](const Eigen::VectorXd& x) { return 0.01 * y20(x); }, 4);
    CurvatureIntegrals ci = curvature_integrals(D);
    ASSERT_GE(ci.min_principal, 0.0);
    EXPECT_NEAR(ci.nuclear, ci.H, 1e-9);
}

TEST(EpsSize, WithinDeviationBounds) {
    auto s = make_sphere(3, 32);
    StarDomain D = from_function(s, [](const Eigen::VectorXd& x) { return 0.1 * y20(x); }, 4);
    Lemma32Report r = lemma32_check(D);
    double e = eps_size(D).value;
    EXPECT_LE(e, r.max_v + 1e-12);
    EXPECT_GE(e, r.max_v / std::sqrt(1 + r.max_v * r.max_v) - 1e-9);
}

TEST(Lemma32, BallAndSmallPerturbations) {
    auto s = make_sphere(3, 24);
    Lemma32Report r0 = lemma32_check(unit_ball(s));
    EXPECT_EQ(r0.max_v, 0.0);
    EXPECT_EQ(r0.max_normal_deviation, 0.0);
    EXPECT_TRUE(r0.passes);
    Lemma32Report r1 = lemma32_check(from_function(s, [](const Eigen::VectorXd& x) { return 0.05 * x[2]; }, 2));
    EXPECT_TRUE(r1.passes);
    EXPECT_TRUE(std::isfinite(r1.mean_gradient_over_normal));
    for (int i = 0; i < 100; ++i) {
        Lemma32Report r = lemma32_check(random_domain(s, 5, 0.1, 3000 + i));
        EXPECT_TRUE(r.passes) << i;
    }
}

TEST(Mesh, ObjExport) {
    auto s = make_sphere(3, 8);
    StarDomain D = random_domain(s, 3, 0.1, 1);
    std::string path = ::testing::TempDir() + "mesh.obj";
    write_obj(D, path);
    std::ifstream in(path);
    int v = 0, f = 0, h = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("v ", 0) == 0) ++v;
        if (line.rfind("f ", 0) == 0) ++f;
        if (line.rfind("# H ", 0) == 0) ++h;
    }
    EXPECT_EQ(v, s->size());
    EXPECT_EQ(h, s->size());
    // Closed genus-0 triangulation: F = 2V - 4.
    EXPECT_EQ(f, 2 * v - 4);
    EXPECT_THROW(write_obj(unit_ball(make_sphere(4, 6, 2)), path), std::invalid_argument);
}
