#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "quermass/spectral_sphere.hpp"

namespace quermass {

// Zonal function sum_l coeffs[l] Z_l(cos theta) on S^{n-1}, Z_l unit-norm.
struct ZonalField {
    int n = 0;
    std::vector<double> coeffs;
};

// Quadrature pieces of R(u) = int lap u |grad u|^2 / int |grad u|^2.
struct RatioParts {
    double numerator = 0;
    double denominator = 0;
    double max_laplacian = 0;  // over the quadrature nodes (and the poles for zonal fields)
    double grad_inf = 0;
    double laplacian_mean = 0;  // int lap u; zero on a closed manifold
};

RatioParts ratio_parts(const ScalarField& u);
RatioParts ratio_parts(const ZonalField& u, int nodes = -1);

// Throws std::invalid_argument when int |grad u|^2 <= 1e-14.
double ratio(const ScalarField& u);
double ratio(const ZonalField& u);

// 1 - max lap u over the nodes.
double feasibility(const ScalarField& u);
double feasibility(const ZonalField& u);

// int |grad u|^2 - int lap u |grad u|^2; nonnegative whenever lap u <= 1.
double trivial_bound_check(const ScalarField& u);

// u with lap u = target (mean-zero solution). Throws std::invalid_argument when
// int target is not zero, e.g. for a constant target on the closed sphere.
ScalarField field_with_laplacian(const ScalarField& target);

struct ConjectureCandidate {
    int n = 0;
    bool feasible = false;
    std::optional<ScalarField> u;  // full-basis search
    std::optional<ZonalField> zonal;
    double ratio = 0;
    double constraint_margin = 1;
    double grad_norm_inf = 0;
    double numerator = 0;
    double denominator = 0;
    // Ratio recomputed at doubled quadrature resolution when the candidate
    // exceeds (n-2)/(n-1); NaN otherwise.
    double reverified_ratio = std::numeric_limits<double>::quiet_NaN();
};

struct SearchOptions {
    std::vector<double> mu_ladder = {1e2, 1e4, 1e6};
    int iterations_per_mu = 150;
    double amplitude_cap = 0;  // cap on ||grad u||_inf; <= 0 disables
    bool check_gradient = true;
};

struct RestartRecord {
    std::uint64_t seed = 0;
    double gradient_rel_error = std::numeric_limits<double>::quiet_NaN();
    double ratio = 0;
    double constraint_margin = 0;
    double grad_norm_inf = 0;
    int steps = 0;
};

struct SearchResult {
    int n = 0;
    int basis_cap = 0;
    std::uint64_t seed = 0;
    ConjectureCandidate best;  // u = 0 marker (ratio 0, feasible = false) if nothing feasible
    std::vector<RestartRecord> restarts;
    double max_gradient_rel_error = 0;
};

double conjectured_bound(int n);

// Penalized gradient ascent of R over spectral coefficients. n <= 3 uses the
// full harmonic basis up to degree basis_cap on an exact grid; n >= 4 the
// zonal basis up to basis_cap.
SearchResult maximize_ratio(int n, int basis_cap, int restarts, std::uint64_t seed,
                            const SearchOptions& options = {});
// Full-basis search on a given sphere.
SearchResult maximize_ratio(SpherePtr sphere, int restarts, std::uint64_t seed, const SearchOptions& options = {});

// Relative sup-norm error of the analytic coefficient gradient of the penalized
// objective against central differences, at coefficients c.
double gradient_check(SpherePtr sphere, const Eigen::VectorXd& c, double mu);
double gradient_check(const ZonalField& u, double mu);

struct GreenStep {
    int k = 0;
    ConjectureCandidate candidate;
};

// Truncated zonal Green kernel u_k = -sum_{l=1}^k Z_l(1) Z_l / (l(l+n-2)), so that
// lap u_k is the degree-k projection of the point mass at the north pole minus
// its mean; rescaled so max lap u_k = 1. Requires n >= 4.
GreenStep green_step(int n, int k);
std::vector<GreenStep> green_sequence(int n, const std::vector<int>& ks = {8, 16, 32, 64});

void write_search_csv_header(std::ostream& out);
void write_search_row(std::ostream& out, const SearchResult& r);
void write_green_csv_header(std::ostream& out);
void write_green_row(std::ostream& out, int n, const GreenStep& s);

}  // namespace quermass
