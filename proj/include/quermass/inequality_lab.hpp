#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "quermass/star_domain.hpp"

namespace quermass {

enum class Normalization { None, Perimeter, Volume };
std::string to_string(Normalization mode);

struct DeficitReport {
    std::string which;
    int n = 0;
    double lhs = 0;
    double rhs = 0;
    double margin = 0;
    Normalization normalization = Normalization::None;
    Eigen::VectorXd center_used;
    double eps_size = 0;
    bool degenerate = false;  // the curvature integral vanished; lhs set to 0
    bool convex = false;      // all principal curvatures >= 0 (quermassintegral report)
};

// Everything the deficit functionals need, computed once per domain.
struct DomainSummary {
    int n = 0;
    double volume = 0;
    double perimeter = 0;
    CurvatureIntegrals integrals;
    EpsSize eps;
    double mean_square_deviation = 0;  // average over the boundary of |nu - (y - xbar)/|y - xbar||^2
};

DomainSummary summarize(const StarDomain& K);

StarDomain normalize(const StarDomain& K, Normalization mode);

DeficitReport minkowski_deficit(const StarDomain& K);
DeficitReport minkowski_deficit(const DomainSummary& s);
DeficitReport volumetric_minkowski_deficit(const StarDomain& K);
DeficitReport volumetric_minkowski_deficit(const DomainSummary& s);
DeficitReport nuclear_minkowski_deficit(const StarDomain& K);
DeficitReport nuclear_minkowski_deficit(const DomainSummary& s);
// Minkowski with the right side lowered by delta.
DeficitReport almost_sharp_margin(const StarDomain& K, double delta);
DeficitReport almost_sharp_margin(const DomainSummary& s, double delta);

// Volumetric deficit divided by the mean-square normal deviation about the
// eps-size optimal center; +infinity when the deviation vanishes.
double stability_ratio(const StarDomain& K);
double stability_ratio(const DomainSummary& s);

struct FugledeReport {
    double exact = 0;  // Per - Per(B_1) of the volume-normalized domain
    double model = 0;  // 1/2 int |grad u|^2 - (n-1)/2 int u^2
    double residual = 0;
    double scale = 0;  // int u^2 + |grad u|^2
};
FugledeReport fuglede_deficit(const StarDomain& K);

// Ratio pair of the quermassintegral inequality for sigma_k, k = 1..n-1.
DeficitReport quermassintegral_ratio(const StarDomain& K, int k);

// Residuals of the linearized constraints of a normalized domain.
double perimeter_constraint_residual(const StarDomain& K);
double volume_constraint_residual(const StarDomain& K);

// Spectral-decay profile of degree <= L (variance max(l,1)^-4) scaled to eps-size target.
StarDomain random_domain(SpherePtr sphere, int L, double target_eps, std::uint64_t seed);
// Random coefficients with the same decay, no rescaling.
Eigen::VectorXd random_coefficients(const Sphere& sphere, int L, std::uint64_t seed, double decay = 4.0,
                                    int min_degree = 0);

void write_deficit_csv_header(std::ostream& out);
void write_deficit_csv_row(std::ostream& out, const DeficitReport& r, std::uint64_t seed);

}  // namespace quermass
