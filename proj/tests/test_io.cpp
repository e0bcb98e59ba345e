#include <cmath>

#include <gtest/gtest.h>

#include "quermass/inequality_lab.hpp"
#include "quermass/io.hpp"
#include "quermass/numerics.hpp"

using namespace quermass;
using nlohmann::json;

TEST(FieldFile, CoefficientFormRoundTrip) {
    auto s = make_sphere(3, 20, 6);
    ScalarField u = synthesize(random_coefficients(*s, 6, 3), s);
    json j = field_to_json(u);
    EXPECT_EQ(j["L"], 6);
    ScalarField v = field_from_json(json::parse(j.dump()));
    EXPECT_EQ(*v.coeffs, *u.coeffs);
    EXPECT_EQ(v.values, u.values);
    // A different grid carries the same function.
    ScalarField w = field_from_json(j, 30);
    Eigen::VectorXd x(3);
    x << 0.6, 0.0, 0.8;
    EXPECT_NEAR(evaluate(w, x), evaluate(u, x), 1e-13);
}

TEST(FieldFile, ValuesForm) {
    json j = {{"n", 3}, {"grid_resolution", 4}, {"values", std::vector<double>(32, 0.25)}};
    ScalarField f = field_from_json(j);
    EXPECT_EQ(f.values.size(), 32);
    EXPECT_FALSE(f.coeffs.has_value());
    j["L"] = 3;
    ScalarField g = field_from_json(j);
    ASSERT_TRUE(g.coeffs.has_value());
    EXPECT_NEAR(quadrature(g), 0.25 * 4 * kPi, 1e-12);
    j["values"] = std::vector<double>(31, 0.0);
    EXPECT_THROW(field_from_json(j), std::invalid_argument);
}

TEST(FieldFile, MalformedInputsAreRejected) {
    EXPECT_THROW(field_from_json(json{{"n", 3}}), std::invalid_argument);
    EXPECT_THROW(field_from_json(json{{"L", 2}, {"coeffs", json::array()}}), std::invalid_argument);
    json bad = {{"n", 3}, {"L", 2}, {"coeffs", {{{"l", 3}, {"m_index", 0}, {"value", 1.0}}}}};
    EXPECT_THROW(field_from_json(bad), std::invalid_argument);
    bad["coeffs"] = {{{"l", 1}, {"m_index", 3}, {"value", 1.0}}};
    EXPECT_THROW(field_from_json(bad), std::invalid_argument);
}

TEST(DomainFile, UnitBallAndCenter) {
    json j = {{"n", 3}, {"L", 0}, {"grid_resolution", 32}, {"coeffs", json::array()}};
    StarDomain K = domain_from_json(j);
    EXPECT_NEAR(volume(K), 4 * kPi / 3, 1e-12);
    j["center"] = {0.1, 0.0, -0.2};
    StarDomain M = domain_from_json(j);
    EXPECT_DOUBLE_EQ(M.center[2], -0.2);
    StarDomain back = domain_from_json(domain_to_json(M));
    EXPECT_EQ(back.center, M.center);
    j["center"] = {0.1};
    EXPECT_THROW(domain_from_json(j), std::invalid_argument);
}

TEST(AxialFile, BothForms) {
    json z = {{"n", 4}, {"zonal_coeffs", {0.0, 0.02, -0.01}}};
    ASSERT_TRUE(is_axial_json(z));
    AxialProfile a = axial_from_json(z);
    std::vector<double> th, v;
    for (int i = 0; i <= 40; ++i) {
        th.push_back(0.5 * kPi * (1 - std::cos(kPi * i / 40)));  // Chebyshev points
        v.push_back(a.jet(th.back()).V);
    }
    AxialProfile b = axial_from_json(json{{"n", 4}, {"theta_nodes", th}, {"values", v}});
    for (double t : {0.3, 1.2, 2.9}) EXPECT_NEAR(b.jet(t).V, a.jet(t).V, 1e-10);
    EXPECT_THROW(axial_from_json(json{{"n", 4}, {"theta_nodes", th}, {"values", {1.0}}}), std::invalid_argument);
    ZonalField f = zonal_from_json(z);
    EXPECT_EQ(zonal_to_json(f), z);
}
