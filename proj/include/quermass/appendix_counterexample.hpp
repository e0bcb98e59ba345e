#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "quermass/axisym.hpp"

namespace quermass {

// Radial bump f on [0, R], R = 1/kappa, with f' = (eps/2) times a quintic
// smootherstep ramp on [0, R/8], 1 on [R/8, 7R/8], and the mirrored ramp
// down on [7R/8, R]; f(r) = -int_r^R f'.
class BumpProfile {
public:
    BumpProfile(double kappa, double eps);

    double kappa() const { return kappa_; }
    double eps() const { return eps_; }
    double radius() const { return 1.0 / kappa_; }
    std::vector<double> breaks() const;  // 0, R/8, 7R/8, R

    double f(double r) const;
    double df(double r) const;
    double ddf(double r) const;

private:
    double kappa_, eps_, h_, total_;
    double antiderivative(double r) const;  // int_0^r f'
};

BumpProfile make_bump(double kappa, double eps);

// The bump as a zonal profile centered at the north pole.
AxialProfile bump_axial_profile(const BumpProfile& bump, int n, int nodes = 512);

struct PackedPoints {
    int n = 0;
    double kappa = 0;
    std::int64_t count = 0;
    // Smallest Euclidean distance among accepted pairs closer than the search
    // radius 2/kappa; equal to 2/kappa when no such pair exists.
    double min_distance = std::numeric_limits<double>::infinity();
    double packing_constant = 0;  // count / kappa^{n-1}
    Eigen::MatrixXd points;       // n x count; empty when not stored
};

// Pairwise distances >= 2/kappa. n = 3 thins a Fibonacci lattice in z order
// (streamed, so very large counts need no storage); n >= 4 uses random
// sequential packing. The visitor, if set, sees each accepted point once.
PackedPoints pack_points(int n, double kappa, std::uint64_t seed, bool store_points = true,
                         const std::function<void(const Eigen::VectorXd&)>& visitor = {});

struct LemmaA1Report {
    double lhs = 0;              // |S^{n-2}| int a(f, f'^2) f'' f'^2 r^{n-2} dr
    double leading = 0;          // -((n-2)|S^{n-2}|/3) int f'^3 r^{n-3} dr
    double remainder_scale = 0;  // eps |leading| + int f'^2 r^{n-2} dr
    double c_rem = 0;
    double margin = 0;           // c_rem remainder_scale - |lhs - leading|
    bool passes = true;
};

LemmaA1Report lemma_a1_check(const BumpProfile& f, const std::function<double(double, double)>& a, int n,
                             double c_rem);
LemmaA1Report lemma_a1_check(const BumpProfile& f, const std::function<double(double, double)>& a, int n);

// int_0^R f'^p r^q dr on the bump's panels.
double bump_moment(const BumpProfile& f, int p, int q);

struct Counterexample {
    int n = 0;
    BumpProfile bump{1.0, 0.0};
    PackedPoints centers;
    double support_gap = 0;  // min geodesic distance between centers minus 2R
    double c1_norm = 0;      // max(sup |f|, sup |f'|)
    double eps_size = 0;     // max |nu - x| about the origin
};

// Throws std::runtime_error when the supports overlap.
Counterexample build_counterexample(int n, double eps, double kappa, std::uint64_t seed, bool store_points = true);

// u(x) = sum_i f(dist(x, x_i)) for stored centers.
double counterexample_value(const Counterexample& c, const Eigen::VectorXd& x);
Eigen::VectorXd counterexample_gradient(const Counterexample& c, const Eigen::VectorXd& x);

// int over one cap of (H J - (n-1)) dS, the change one bump makes to int H.
double bump_excess_zonal(const BumpProfile& bump, int n);
// Same cap integral on a 2-D geodesic polar grid around the given center,
// from ambient jets of the bump and the radial-graph mean-curvature formula (n = 3).
double bump_excess_grid(const BumpProfile& bump, const Eigen::Vector3d& center, int radial_per_panel = 12,
                        int angular = 16);

struct TotalHReport {
    int n = 0;
    double eps = 0;
    double kappa = 0;
    std::int64_t q = 0;
    double per_bump_zonal = 0;
    double total_zonal = 0;
    double total_grid = std::numeric_limits<double>::quiet_NaN();  // n = 3 only
    double relative_gap = std::numeric_limits<double>::quiet_NaN();
    double eps_size = 0;
    double support_gap = 0;
};

// int_{boundary} H = (n-1)|S^{n-1}| + sum over bumps of the cap excess.
// with_grid adds the per-cap 2-D evaluation over every packed center (n = 3).
TotalHReport total_H(int n, double eps, double kappa, std::uint64_t seed, bool with_grid);

struct NegativeHSearch {
    bool found = false;
    double kappa_star = 0;
    std::vector<TotalHReport> ladder;
};

// Doubles kappa from kappa_start until the total falls below -1 or kappa exceeds kappa_max.
NegativeHSearch find_negative_H(int n, double eps, std::uint64_t seed, double kappa_start, double kappa_max);
NegativeHSearch find_negative_H(int n, double eps, std::uint64_t seed);

// Least-squares line y = a + b x with coefficient of determination.
struct LineFit {
    double intercept = 0;
    double slope = 0;
    double r_squared = 0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

void write_lemma_a1_csv_header(std::ostream& out);
void write_lemma_a1_csv_row(std::ostream& out, int n, double kappa, double eps, const LemmaA1Report& r);
void write_total_h_csv_header(std::ostream& out);
void write_total_h_csv_row(std::ostream& out, const TotalHReport& r);

}  // namespace quermass
