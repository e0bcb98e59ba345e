#include <cmath>

#include <gtest/gtest.h>

#include "quermass/axisym.hpp"
#include "quermass/numerics.hpp"

using namespace quermass;

TEST(Coarea, ElementaryIntegrals) {
    EXPECT_NEAR(coarea_integral([](double) { return 1.0; }, 3), 4 * kPi, 1e-12);
    EXPECT_NEAR(coarea_integral([](double) { return 1.0; }, 4), 2 * kPi * kPi, 1e-12);
    for (int n : {3, 4, 5}) EXPECT_NEAR(coarea_integral([](double t) { return std::cos(t); }, n), 0.0, 1e-13);
    EXPECT_NEAR(coarea_integral([](double t) { return std::cos(t) * std::cos(t); }, 3), 4 * kPi / 3, 1e-12);
}

TEST(Zonal, DerivativesMatchHarmonicAndDifferences) {
    for (int n : {3, 4, 6}) {
        for (int l : {0, 1, 2, 5}) {
            double t = 0.3, z, dz, ddz;
            zonal_derivatives(n, l, t, z, dz, ddz);
            EXPECT_NEAR(z, zonal_harmonic(n, l, t), 1e-13);
            const double h = 1e-5;
            double zp, zm, d1p, d1m, tmp;
            zonal_derivatives(n, l, t + h, zp, d1p, tmp);
            zonal_derivatives(n, l, t - h, zm, d1m, tmp);
            EXPECT_NEAR(dz, (zp - zm) / (2 * h), 1e-7);
            EXPECT_NEAR(ddz, (d1p - d1m) / (2 * h), 1e-6);
        }
    }
}

TEST(AxialProfile, RejectsInvalidProfiles) {
    EXPECT_THROW(axial_constant(3, -1.0), std::invalid_argument);
    EXPECT_THROW(axial_constant(2, 0.0), std::invalid_argument);
    EXPECT_THROW(AxialProfile(3, [](double t) { return AxialJet{0.01 * t, 0.01, 0.0}; }), std::invalid_argument);
}

TEST(AxialCurvature, ConstantProfiles) {
    for (int n : {3, 4, 5}) {
        for (double c : {0.0, 0.3}) {
            AxialCurvature k = axial_curvature(axial_constant(n, c));
            EXPECT_LT((k.H.array() - (n - 1) / (1 + c)).abs().maxCoeff(), 1e-13);
            EXPECT_LT(k.cubic_integrand.cwiseAbs().maxCoeff(), 1e-15);
        }
    }
    AxialFunctionals f4 = axial_functionals(axial_constant(4, 0.0));
    EXPECT_NEAR(f4.integrals.H, 6 * kPi * kPi, 1e-10);
    EXPECT_NEAR(f4.perimeter, 2 * kPi * kPi, 1e-11);
}

TEST(AxialCurvature, ScalingLaws) {
    for (int n : {3, 4, 5}) {
        const double c = 0.25, s = 1 + c;
        AxialFunctionals a = axial_functionals(axial_constant(n, 0.0));
        AxialFunctionals b = axial_functionals(axial_constant(n, c));
        EXPECT_NEAR(b.volume / a.volume, std::pow(s, n), 1e-12);
        EXPECT_NEAR(b.perimeter / a.perimeter, std::pow(s, n - 1), 1e-12);
        EXPECT_NEAR(b.integrals.H / a.integrals.H, std::pow(s, n - 2), 1e-12);
        EXPECT_NEAR(b.integrals.nuclear / a.integrals.nuclear, std::pow(s, n - 2), 1e-12);
    }
}

TEST(AxialCurvature, TraceOfPrincipalCurvatures) {
    for (int n : {3, 4, 5}) {
        AxialProfile V = axial_from_zonal(n, random_zonal_coefficients(n, 6, 0.2, 11 * n));
        AxialCurvature k = axial_curvature(V);
        Eigen::VectorXd trace = k.kappa_meridian + (n - 2) * k.kappa_rotation;
        EXPECT_LT((trace - k.H).cwiseAbs().maxCoeff(), 1e-12);
        // The pole limits agree with nearby values.
        AxialCurvature poles = axial_curvature_at(V, {0.0, 1e-6, kPi, kPi - 1e-6});
        EXPECT_NEAR(poles.H[0], poles.H[1], 1e-8);
        EXPECT_NEAR(poles.H[2], poles.H[3], 1e-8);
        EXPECT_NEAR(poles.laplacian[0], poles.laplacian[1], 1e-8);
    }
}

TEST(AxialCurvature, MatchesLiftedDomainPointwise) {
    const double eps = 0.05;
    AxialProfile V = axial_from_zonal(3, {0.0, eps / zonal_harmonic(3, 1, 1.0)});
    auto s = make_sphere(3, 32);
    StarDomain D = lift(V, s, 4);
    CurvatureOptions opt;
    opt.divergence_form = false;
    CurvatureBundle cb = curvatures(D, opt);
    std::vector<double> theta(s->size());
    for (int k = 0; k < s->size(); ++k) theta[k] = std::acos(s->grid().nodes(2, k));
    AxialCurvature a = axial_curvature_at(V, theta);
    EXPECT_LT((a.H - cb.H).cwiseAbs().maxCoeff(), 1e-6);
    Eigen::VectorXd nuc2d = cb.II_eigenvalues.cwiseAbs().colwise().sum().transpose();
    EXPECT_LT((a.kappa_meridian.cwiseAbs() + a.kappa_rotation.cwiseAbs() - nuc2d).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(AxialFunctionals, AgreeWithTwoDimensionalGrid) {
    auto s = make_sphere(3, 48);
    for (int i = 0; i < 3; ++i) {
        AxialProfile V = axial_from_zonal(3, random_zonal_coefficients(3, 6, 0.1, 100 + i));
        AxialFunctionals a = axial_functionals(V);
        StarDomain D = lift(V, s);
        CurvatureIntegrals ci = curvature_integrals(D);
        EXPECT_NEAR(a.volume / volume(D), 1.0, 1e-6);
        EXPECT_NEAR(a.perimeter / perimeter(D), 1.0, 1e-6);
        EXPECT_NEAR(a.integrals.H / ci.H, 1.0, 1e-6);
        EXPECT_NEAR(a.integrals.H_plus / ci.H_plus, 1.0, 1e-6);
        EXPECT_NEAR(a.integrals.nuclear / ci.nuclear, 1.0, 1e-6);
        EXPECT_NEAR(a.integrals.sigma[2], 4 * kPi, 1e-6);
    }
}

TEST(AxialFunctionals, ReflectionInvariance) {
    for (int n : {3, 4, 5}) {
        AxialProfile V = axial_from_zonal(n, random_zonal_coefficients(n, 7, 0.1, 7 + n));
        AxialFunctionals a = axial_functionals(V), b = axial_functionals(reflected(V));
        EXPECT_NEAR(a.volume, b.volume, 1e-10);
        EXPECT_NEAR(a.perimeter, b.perimeter, 1e-10);
        EXPECT_NEAR(a.integrals.H, b.integrals.H, 1e-10);
        EXPECT_NEAR(a.integrals.H_minus, b.integrals.H_minus, 1e-10);
        EXPECT_NEAR(a.integrals.nuclear, b.integrals.nuclear, 1e-10);
    }
}

TEST(AxialProfile, SamplesReproduceZonalProfile) {
    std::vector<double> c = {0.0, 0.02, -0.03, 0.01};
    AxialProfile exact = axial_from_zonal(4, c);
    GaussRule r = gauss_legendre(40, 0.0, kPi);
    std::vector<double> values;
    for (double t : r.nodes) values.push_back(exact.jet(t).V);
    AxialProfile sampled = axial_from_samples(4, r.nodes, values);
    EXPECT_LT((sampled.V() - exact.V()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((sampled.dV() - exact.dV()).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT((sampled.ddV() - exact.ddV()).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(Circle, CubicIdentityVanishes) {
    // For periodic V, V'' V'^2 = (V'^3 / 3)' integrates to zero.
    const int m = 256;
    double sum = 0;
    for (int k = 0; k < m; ++k) {
        double t = 2 * kPi * k / m;
        double d1 = 0.3 * std::cos(t) - 0.4 * std::sin(3 * t) + 0.1 * std::cos(5 * t);
        double d2 = -0.3 * std::sin(t) - 1.2 * std::cos(3 * t) - 0.5 * std::sin(5 * t);
        sum += d2 * d1 * d1;
    }
    EXPECT_NEAR(sum * 2 * kPi / m, 0.0, 1e-10);
}

TEST(PoleBound, TrivialAndMeanConvexProfiles) {
    PoleBoundReport r0 = pole_gradient_bound(axial_constant(3, 0.0), 0.2);
    EXPECT_TRUE(r0.holds);
    EXPECT_GE(r0.worst_margin, 0.0);
    AxialProfile V = axial_from_zonal(3, random_zonal_coefficients(3, 4, 0.1, 5));
    AxialCurvature k = axial_curvature(V);
    ASSERT_GE(k.H.minCoeff(), 0.0);
    PoleBoundReport r = pole_gradient_bound(V);
    EXPECT_DOUBLE_EQ(r.h_minus, 0.0);
    EXPECT_TRUE(r.holds);
    EXPECT_EQ(r.margins_by_c0.size(), 5u);
}

TEST(AxialDeficit, BallsAndRandomProfiles) {
    for (int n : {3, 4, 5}) {
        EXPECT_NEAR(axial_minkowski_deficit(axial_constant(n, 0.0)).margin, 0.0, 1e-12);
        EXPECT_NEAR(axial_minkowski_deficit(axial_constant(n, 0.4)).margin, 0.0, 1e-12);
        for (int i = 0; i < 10; ++i) {
            AxialProfile V = axial_from_zonal(n, random_zonal_coefficients(n, 8, 0.05, 1000 * n + i));
            DeficitReport r = axial_minkowski_deficit(V);
            EXPECT_LE(r.eps_size, 0.05 + 1e-9);
            EXPECT_GE(r.margin, -1e-8);
        }
    }
}

TEST(AxialEps, OnAxisCenterMatchesGridEpsSize) {
    AxialProfile V = axial_from_zonal(3, {0.0, 0.03, 0.02});
    EpsSize e = axial_eps_size(V);
    EXPECT_LE(e.value, axial_eps_size_at(V, 0.0));
    StarDomain D = lift(V, make_sphere(3, 32), 4);
    EpsSize g = eps_size(D);
    EXPECT_NEAR(e.value, g.value, 1e-4);
}
