#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace quermass {

constexpr double kPi = 3.14159265358979323846;

// Surface measure of the unit sphere S^{n-1} in R^n.
double sphere_area(int n);
// Volume of the unit ball in R^n.
double ball_volume(int n);
double binomial(int n, int k);
// Dimension of the space of degree-l spherical harmonics on S^{n-1}.
int harmonic_dimension(int n, int l);

// Pairwise (tree) summation, so reductions do not depend on thread count.
double pairwise_sum(const double* x, std::size_t count);
inline double pairwise_sum(const std::vector<double>& x) { return pairwise_sum(x.data(), x.size()); }
inline double pairwise_sum(const Eigen::VectorXd& x) {
    return pairwise_sum(x.data(), static_cast<std::size_t>(x.size()));
}
// sum_i w_i f_i with pairwise summation of the products.
double weighted_sum(const Eigen::VectorXd& w, const Eigen::VectorXd& f);

struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussRule gauss_legendre(int m, double a = -1.0, double b = 1.0);
// Gauss rule for the weight (1 - t^2)^{lambda - 1/2} on [-1, 1]; lambda = 1/2 is Legendre.
GaussRule gauss_gegenbauer(int m, double lambda);
// Gauss-Legendre on each panel [breaks[i], breaks[i+1]].
GaussRule composite_gauss_legendre(const std::vector<double>& breaks, int per_panel);

// C_0^alpha(t) .. C_lmax^alpha(t) by the three-term recurrence.
void gegenbauer(int lmax, double alpha, double t, double* out);
double gegenbauer_at_one(int l, double alpha);

// Number of worker threads (QUERMASS_THREADS, default hardware concurrency).
int thread_count();
// Runs body(i) for i in [0, count). Each index must write only its own output.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

std::uint64_t splitmix64(std::uint64_t x);
// Seed for the index-th sample of a suite started from base.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return splitmix64(base ^ splitmix64(index + 0x9e3779b97f4a7c15ULL));
}

// Uniformly random rotation of R^n (Haar measure) from the given seed.
Eigen::MatrixXd random_rotation(int n, std::uint64_t seed);

}  // namespace quermass
