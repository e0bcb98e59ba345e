#pragma once

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "quermass/spectral_sphere.hpp"

namespace quermass {

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Boundary {center + (1 + u(x)) x : x in S^{n-1}}. The profile is always
// analyzed so that its derivatives are spectral.
struct StarDomain {
    ScalarField profile;
    Eigen::VectorXd center;

    int n() const { return profile.n(); }
    const SphericalGrid& grid() const { return profile.sphere->grid(); }
};

// Validates 1 + u > 0. Unanalyzed profiles are analyzed at the basis degree.
StarDomain make_domain(ScalarField profile, Eigen::VectorXd center = Eigen::VectorXd());
StarDomain unit_ball(SpherePtr sphere);

// Pointwise geometry of the radial graph at direction x from the profile jet.
struct PointGeometry {
    double H = 0;               // mean-curvature formula
    double jacobian = 0;        // (1+u)^{n-1} sqrt(1+|v|^2)
    double v_sq = 0;            // |grad u|^2 / (1+u)^2
    Eigen::VectorXd normal;     // (x - v)/sqrt(1+|v|^2)
    Eigen::VectorXd kappa;      // principal curvatures, ascending
    Eigen::MatrixXd shape;      // second fundamental form in an orthonormal frame of the tangent space
};

PointGeometry point_geometry(const Eigen::VectorXd& x, double u, const Eigen::VectorXd& grad,
                             const Eigen::MatrixXd& hess, double lap);

struct CurvatureBundle {
    std::vector<Eigen::MatrixXd> second_fundamental;
    Eigen::VectorXd H;
    Eigen::VectorXd H_div;
    Eigen::VectorXd H_plus;
    Eigen::VectorXd H_minus;
    Eigen::MatrixXd II_eigenvalues;  // (n-1) x N, ascending per column
    Eigen::VectorXd jacobian;
    Eigen::MatrixXd normal;          // n x N
    Eigen::VectorXd v_sq;
    double max_form_discrepancy = 0;
    bool forms_consistent = true;
};

struct CurvatureOptions {
    bool divergence_form = true;
    // Throw NumericalError when the two mean-curvature forms disagree.
    bool strict = false;
};

CurvatureBundle curvatures(const StarDomain& K, const CurvatureOptions& options = {});

struct CurvatureIntegrals {
    double H = 0;
    double H_plus = 0;
    double H_minus = 0;
    double abs_H = 0;
    double nuclear = 0;
    // sigma[k] = int sigma_k(II) and abs_sigma[k] = int |sigma_k(II)|, k = 0..n-1.
    std::vector<double> sigma;
    std::vector<double> abs_sigma;
    double min_principal = 0;
};

CurvatureIntegrals curvature_integrals(const StarDomain& K, const CurvatureBundle& bundle);
CurvatureIntegrals curvature_integrals(const StarDomain& K);

// Elementary symmetric polynomials e_0..e_m of the entries.
std::vector<double> elementary_symmetric(const Eigen::VectorXd& kappa);

double volume(const StarDomain& K);
double perimeter(const StarDomain& K);
Eigen::MatrixXd normal_field(const StarDomain& K);
// Centroid of K: center + int (1+u)^{n+1} x / ((n+1)|K|).
Eigen::VectorXd barycenter(const StarDomain& K);
// Boundary points T(x) = center + (1 + u(x)) x at the nodes.
Eigen::MatrixXd boundary_points(const StarDomain& K);

struct EpsSize {
    double value = 0;
    Eigen::VectorXd center;  // optimal x-bar
};

// max_k |nu_k - (T_k - c)/|T_k - c|| for a fixed c.
double eps_size_at(const StarDomain& K, const Eigen::MatrixXd& normals, const Eigen::VectorXd& c);
// Minimized over c by Nelder-Mead seeded at the barycenter.
EpsSize eps_size(const StarDomain& K);
EpsSize eps_size(const StarDomain& K, const Eigen::MatrixXd& normals, const Eigen::VectorXd& seed);

struct Lemma32Report {
    double pointwise_gradient_over_normal = 0;  // item (1): max |v| / |nu - x|
    double pointwise_normal_over_gradient = 0;  // item (2): max |nu - x| / |v|
    double oscillation_ratio = 0;               // item (3): (max(1+u)/min(1+u) - 1) / max|v|
    double mean_gradient_over_normal = 0;       // item (4): mean |v|^2 over S / mean |nu - x|^2 over the boundary
    double mean_normal_over_gradient = 0;       // item (4): reciprocal
    double identity_residual = 0;               // |nu - x|^2 closed-form identity, max error
    double max_v = 0;
    double max_normal_deviation = 0;
    double bound = 0;
    bool passes = true;
};

Lemma32Report lemma32_check(const StarDomain& K, double bound);
Lemma32Report lemma32_check(const StarDomain& K);

// sK about the center: profile s(1 + u) - 1.
StarDomain scaled(const StarDomain& K, double s);
// Same boundary, profile re-expressed about center + shift.
StarDomain recentered(const StarDomain& K, const Eigen::VectorXd& shift);
// Boundary rotated by R about the center.
StarDomain rotated(const StarDomain& K, const Eigen::MatrixXd& R);

// Wavefront OBJ of T(S^2) in grid order with a per-vertex H comment block.
void write_obj(const StarDomain& K, const std::string& path);
// Same layout for arbitrary vertex positions over an S^2 grid.
void write_obj(const SphericalGrid& grid, const Eigen::MatrixXd& vertices, const Eigen::VectorXd& H,
               const std::string& path, const std::string& title);

void write_lemma32_csv_header(std::ostream& out);
void write_lemma32_csv_row(std::ostream& out, std::uint64_t seed, double eps_size, const Lemma32Report& r);

}  // namespace quermass
