#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "quermass/inequality_lab.hpp"
#include "quermass/numerics.hpp"

using namespace quermass;

namespace {

double y20(const Eigen::VectorXd& x) { return std::sqrt(5.0 / (16.0 * kPi)) * (3.0 * x[2] * x[2] - 1.0); }

// Profile of the unit ball centered at t e_1, seen from the origin.
double shifted_ball(const Eigen::VectorXd& x, double t) {
    return t * x[0] + std::sqrt(1.0 - t * t * (1.0 - x[0] * x[0])) - 1.0;
}

StarDomain from_function(SpherePtr s, const std::function<double(const Eigen::VectorXd&)>& f, int L) {
    return make_domain(analyze(field_from_function(std::move(s), f), L));
}

}  // namespace

TEST(Barycenter, BallAndSymmetry) {
    auto s = make_sphere(3, 32);
    EXPECT_LT(barycenter(unit_ball(s)).norm(), 1e-15);
    const double t = 0.05;
    StarDomain D = from_function(s, [&](const Eigen::VectorXd& x) { return shifted_ball(x, t); }, 31);
    Eigen::VectorXd b = barycenter(D);
    EXPECT_NEAR(b[0], t, 1e-6);
    EXPECT_NEAR(b[1], 0.0, 1e-10);
    EXPECT_NEAR(b[2], 0.0, 1e-10);

    // Monte Carlo centroid of the same body.
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    int count = 0;
    for (int i = 0; i < 400000; ++i) {
        Eigen::Vector3d p(unif(rng), unif(rng), unif(rng));
        if (p.squaredNorm() < 1.0) {
            sum += p + Eigen::Vector3d(t, 0, 0);
            ++count;
        }
    }
    Eigen::Vector3d mc = sum / count;
    double sigma = std::sqrt(0.2 / count);  // per-coordinate variance of the unit ball is 1/5
    EXPECT_LT(std::abs(mc[0] - b[0]), 3 * sigma);

    StarDomain odd = from_function(s, [](const Eigen::VectorXd& x) { return 0.05 * x[0] * x[1] * x[2]; }, 3);
    EXPECT_LT(barycenter(odd).norm(), 1e-10);
}

TEST(Normalize, ConstantAndTranslatedBall) {
    auto s = make_sphere(3, 32);
    StarDomain C = normalize(make_domain(constant_field(s, 0.2)), Normalization::Volume);
    EXPECT_LT(C.profile.values.cwiseAbs().maxCoeff(), 1e-10);
    StarDomain T = from_function(s, [](const Eigen::VectorXd& x) { return shifted_ball(x, 0.05); }, 31);
    StarDomain B = normalize(T, Normalization::Perimeter);
    EXPECT_LT(B.profile.values.cwiseAbs().maxCoeff(), 1e-7);
    EXPECT_LT(barycenter(B).norm(), 1e-8);
}

TEST(Normalize, RandomDomainSatisfiesConstraints) {
    auto s = make_sphere(3, 32);
    StarDomain D = random_domain(s, 5, 0.1, 17);
    StarDomain N = normalize(D, Normalization::Perimeter);
    EXPECT_NEAR(perimeter(N) / sphere_area(3), 1.0, 1e-10);
    EXPECT_LT(barycenter(N).norm(), 1e-8);
    FieldJets J = jets(N.profile, JetOrder::Gradient);
    Eigen::VectorXd u2 = J.value.array().square(), g2 = J.grad.colwise().squaredNorm().transpose();
    double scale = quadrature(N.grid(), u2) + quadrature(N.grid(), g2);
    EXPECT_LE(std::abs(perimeter_constraint_residual(N)), 10 * std::pow(scale, 1.5));
    // Idempotent.
    StarDomain M = normalize(N, Normalization::Perimeter);
    EXPECT_LT((M.profile.values - N.profile.values).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Deficits, EqualityAtBallsAndScaleInvariance) {
    for (int n : {3, 4}) {
        auto s = n == 3 ? make_sphere(3, 24) : make_sphere(4, 10, 4);
        for (double c : {0.0, 0.4}) {
            StarDomain D = make_domain(constant_field(s, c));
            DomainSummary sum = summarize(D);
            EXPECT_NEAR(minkowski_deficit(sum).margin, 0.0, 1e-12);
            EXPECT_NEAR(volumetric_minkowski_deficit(sum).margin, 0.0, 1e-12);
            EXPECT_NEAR(nuclear_minkowski_deficit(sum).margin, 0.0, 1e-12);
            for (int k = 1; k < n; ++k) EXPECT_NEAR(quermassintegral_ratio(D, k).margin, 0.0, 1e-9);
        }
        StarDomain D = random_domain(s, 4, 0.1, 8);
        DomainSummary a = summarize(D);
        for (double f : {0.5, 2.0}) {
            DomainSummary b = summarize(scaled(D, f));
            EXPECT_NEAR(minkowski_deficit(a).margin, minkowski_deficit(b).margin, 1e-9);
            EXPECT_NEAR(volumetric_minkowski_deficit(a).margin, volumetric_minkowski_deficit(b).margin, 1e-9);
            EXPECT_NEAR(nuclear_minkowski_deficit(a).margin, nuclear_minkowski_deficit(b).margin, 1e-9);
        }
        // Rotation resamples the profile, so the coarse n = 4 grid gets a looser tolerance.
        const double rot_tol = n == 3 ? 1e-9 : 1e-7;
        DomainSummary r = summarize(rotated(D, random_rotation(n, 5)));
        EXPECT_NEAR(minkowski_deficit(a).margin, minkowski_deficit(r).margin, rot_tol);
        EXPECT_NEAR(nuclear_minkowski_deficit(a).margin, nuclear_minkowski_deficit(r).margin, rot_tol);
        EXPECT_GE(nuclear_minkowski_deficit(a).lhs, minkowski_deficit(a).lhs);
        DeficitReport almost = almost_sharp_margin(a, 0.01);
        EXPECT_NEAR(almost.margin, minkowski_deficit(a).margin + 0.01, 1e-15);
    }
}

TEST(Deficits, NuclearNonnegativeOnRandomDomains) {
    auto s = make_sphere(3, 24);
    for (int i = 0; i < 30; ++i) {
        DomainSummary sum = summarize(random_domain(s, 6, 0.05, 40 + i));
        EXPECT_GE(nuclear_minkowski_deficit(sum).margin, -1e-8);
        EXPECT_LE(sum.eps.value, 0.05);
    }
}

TEST(Stability, BallMarkerAndQuadraticScaling) {
    auto s = make_sphere(4, 12, 4);
    EXPECT_TRUE(std::isinf(stability_ratio(unit_ball(s))));
    EXPECT_THROW(stability_ratio(unit_ball(make_sphere(3, 8))), std::invalid_argument);
    auto zonal2 = [](const Eigen::VectorXd& x) { return zonal_harmonic(4, 2, x[3]); };
    double r1 = stability_ratio(from_function(s, [&](const Eigen::VectorXd& x) { return 0.02 * zonal2(x); }, 4));
    double r2 = stability_ratio(from_function(s, [&](const Eigen::VectorXd& x) { return 0.01 * zonal2(x); }, 4));
    EXPECT_GT(r2, 0.0);
    EXPECT_NEAR(r1 / r2, 1.0, 0.2);
}

TEST(Fuglede, ExpansionAtSecondOrder) {
    auto s = make_sphere(3, 32);
    FugledeReport ball = fuglede_deficit(unit_ball(s));
    EXPECT_NEAR(ball.exact, 0.0, 1e-12);
    EXPECT_NEAR(ball.model, 0.0, 1e-12);
    const double eps = 0.01;
    FugledeReport lin = fuglede_deficit(from_function(s, [&](const Eigen::VectorXd& x) { return eps * x[0]; }, 2));
    EXPECT_LT(std::abs(lin.model), 10 * std::pow(eps, 3));
    FugledeReport r = fuglede_deficit(from_function(s, [&](const Eigen::VectorXd& x) { return eps * y20(x); }, 4));
    EXPECT_NEAR(r.model, 2 * eps * eps, 10 * std::pow(eps, 3));
    EXPECT_LT(std::abs(r.residual), 10 * std::pow(eps, 3));
}

TEST(Quermass, ConvexPerturbation) {
    auto s = make_sphere(3, 32);
    StarDomain D = from_function(s, [](const Eigen::VectorXd& x) { return 0.01 * y20(x); }, 4);
    DeficitReport r = quermassintegral_ratio(D, 2);
    EXPECT_TRUE(r.convex);
    EXPECT_GE(r.margin, -1e-8);
    DeficitReport r1 = quermassintegral_ratio(D, 1);
    EXPECT_GE(r1.margin, -1e-8);
    EXPECT_THROW(quermassintegral_ratio(D, 3), std::invalid_argument);
}

TEST(Sampler, ReproducibleAndScaled) {
    auto s = make_sphere(3, 16);
    StarDomain a = random_domain(s, 5, 0.05, 12), b = random_domain(s, 5, 0.05, 12);
    EXPECT_EQ(a.profile.values, b.profile.values);
    double e = eps_size(a).value;
    EXPECT_LE(e, 0.05);
    EXPECT_GE(e, 0.045);
}
