#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "quermass/inequality_lab.hpp"
#include "quermass/star_domain.hpp"

namespace quermass {

// V and its first two theta-derivatives at one polar angle.
struct AxialJet {
    double V = 0;
    double dV = 0;
    double ddV = 0;
};

// Radial profile 1 + V(theta) of a domain symmetric about the x_n axis, theta
// the angle from e_n. Carries a composite Gauss-Legendre rule in theta whose
// panel edges include every breakpoint where the profile may lose smoothness.
class AxialProfile {
public:
    using JetFunction = std::function<AxialJet(double)>;

    // Throws std::invalid_argument unless V > -1 on the rule and V'(0) = V'(pi) = 0.
    AxialProfile(int n, JetFunction jet, std::vector<double> breaks = {}, int nodes = 512);

    int n() const { return n_; }
    AxialJet jet(double theta) const { return jet_(theta); }
    const JetFunction& jet_function() const { return jet_; }
    const std::vector<double>& breaks() const { return breaks_; }
    int node_count() const { return static_cast<int>(theta_.size()); }
    const Eigen::VectorXd& theta() const { return theta_; }
    const Eigen::VectorXd& weights() const { return weights_; }  // plain d(theta) weights
    const Eigen::VectorXd& V() const { return V_; }
    const Eigen::VectorXd& dV() const { return dV_; }
    const Eigen::VectorXd& ddV() const { return ddV_; }

private:
    int n_;
    JetFunction jet_;
    std::vector<double> breaks_;
    Eigen::VectorXd theta_, weights_, V_, dV_, ddV_;
};

AxialProfile axial_constant(int n, double c, int nodes = 512);
// V = sum_l c_l Z_l(cos theta), Z_l the unit-norm zonal harmonic of degree l on S^{n-1}.
AxialProfile axial_from_zonal(int n, const std::vector<double>& coeffs, int nodes = 512);
// Barycentric interpolant through (theta_i, V_i); derivatives from the
// interpolant's differentiation matrix.
AxialProfile axial_from_samples(int n, const std::vector<double>& theta, const std::vector<double>& values,
                                int nodes = 512);
// V(theta) -> V(pi - theta).
AxialProfile reflected(const AxialProfile& V);
// Unit-norm zonal harmonic and its first two derivatives in t = cos theta.
void zonal_derivatives(int n, int l, double t, double& z, double& dz, double& ddz);

// int_{S^{n-1}} f(theta) = |S^{n-2}| int_0^pi f(theta) sin(theta)^{n-2} d(theta).
double coarea_integral(const std::function<double(double)>& f, int n, int nodes = 512);

// Pointwise quantities at the rule nodes.
struct AxialCurvature {
    Eigen::VectorXd theta;
    Eigen::VectorXd H;
    Eigen::VectorXd grad_norm;         // |V'|
    Eigen::VectorXd laplacian;         // V'' + (n-2) V' cot(theta)
    Eigen::VectorXd hessian_gradient;  // V'^2 V''
    Eigen::VectorXd cubic_integrand;   // (1+V)^{n-3} V'' V'^2 / ((1+V)^2 + V'^2)
    Eigen::VectorXd kappa_meridian;
    Eigen::VectorXd kappa_rotation;    // multiplicity n-2
    Eigen::VectorXd jacobian;          // (1+V)^{n-1} sqrt(1 + V'^2/(1+V)^2)
};

AxialCurvature axial_curvature(const AxialProfile& V);
// Same quantities at a single angle; the cot(theta) term uses its pole limit.
AxialCurvature axial_curvature_at(const AxialProfile& V, const std::vector<double>& theta);

struct AxialFunctionals {
    double volume = 0;
    double perimeter = 0;
    CurvatureIntegrals integrals;
};

AxialFunctionals axial_functionals(const AxialProfile& V);

// max over the profile of |nu - (T - c)/|T - c|| for c = t e_n.
double axial_eps_size_at(const AxialProfile& V, double t);
// Minimized over centers on the axis.
EpsSize axial_eps_size(const AxialProfile& V);

DomainSummary axial_summary(const AxialProfile& V);
// (int H^+)^{1/(n-2)} / Per^{1/(n-1)} against the ball value, entirely in 1-D.
DeficitReport axial_minkowski_deficit(const AxialProfile& V);

struct PoleBoundReport {
    double theta0 = 0;
    double slack = 0;
    double c0 = 0;
    double h_minus = 0;       // int over the boundary of H^-
    double north_margin = 0;  // min over [0, theta0] of rhs - V'
    double south_margin = 0;  // min over [pi - theta0, pi] of rhs + V'
    double worst_margin = 0;
    bool holds = false;
    std::vector<std::pair<double, double>> margins_by_c0;  // (C0, worst margin)
};

// V'(theta) <= slack theta + C0 theta^{-(n-2)} int H^- near the north pole and
// the mirrored bound near the south pole. theta0 <= 0 selects sqrt(eps-size).
PoleBoundReport pole_gradient_bound(const AxialProfile& V, double theta0, double slack, double c0);
PoleBoundReport pole_gradient_bound(const AxialProfile& V, double theta0 = -1.0);

// Zonal coefficients with variance l^{-decay} for l = 1..L, scaled so that the
// axial eps-size about the origin equals target_eps.
std::vector<double> random_zonal_coefficients(int n, int L, double target_eps, std::uint64_t seed,
                                              double decay = 2.0);

// Samples the profile on the grid and analyzes it at the given degree.
StarDomain lift(const AxialProfile& V, SpherePtr sphere, int L = -1);

void write_pole_csv_header(std::ostream& out);
void write_pole_csv_row(std::ostream& out, int n, std::uint64_t seed, double eps_size, const PoleBoundReport& r);

}  // namespace quermass
