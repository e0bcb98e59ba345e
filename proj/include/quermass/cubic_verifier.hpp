#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>

#include <Eigen/Dense>

#include "quermass/spectral_sphere.hpp"

namespace quermass {

// f(s, t) weights the cubic term; g(s, t) enters div(g grad u). Both are
// evaluated at s = u, t = |grad u|^2. g_s and g_t are the partials of g.
struct NonlinearityPair {
    std::string name;
    std::function<double(double, double)> f;
    std::function<double(double, double)> g;
    std::function<double(double, double)> g_s;
    std::function<double(double, double)> g_t;
};

// f = (1+s)^{n-3} / ((1+s)^2 + t), g = 1.
NonlinearityPair mean_curvature_pair(int n);
// Same f, g = (1 + t/(1+s)^2)^{-1/2}.
NonlinearityPair stability_pair(int n);
// f = g = 1.
NonlinearityPair unit_pair();

// Pointwise grad^2 u[grad u, grad u].
Eigen::VectorXd hessian_on_gradient(const FieldJets& J, int n);

// int f(u, |grad u|^2) grad^2 u[grad u, grad u].
double cubic_term(const ScalarField& u, const std::function<double(double, double)>& f);
double cubic_term(const ScalarField& u);

// Eigenvalues of the covariant Hessian on the tangent space, (n-1) x N, ascending per column.
Eigen::MatrixXd hessian_eigenfields(const ScalarField& u);

// max(sup |u|, sup |grad u|) over the grid.
double c1_norm(const ScalarField& u);

// div(g(u, |grad u|^2) grad u) = g lap u + g_s |grad u|^2 + 2 g_t grad^2 u[grad u, grad u].
Eigen::VectorXd weighted_divergence(const ScalarField& u, const NonlinearityPair& pair);

struct Lemma41Report {
    double lhs = 0;          // cubic_term(u, f)
    double rhs_main = 0;     // -1/2 int div(g grad u) |grad u_2|^2
    double slack_scale = 0;  // int ([div(g grad u)]^+ + 1) |grad u|^2
    double eps = 0;          // C^1 norm of u
    double c_slack = 0;
    double margin = 0;       // lhs - rhs_main + c_slack eps slack_scale
    double ratio = 0;        // (lhs - rhs_main) / slack_scale
    bool passes = true;
};

// Throws std::invalid_argument when the C^1 norm of u exceeds eps_cap.
Lemma41Report lemma41_check(const ScalarField& u, const NonlinearityPair& pair, double lambda, double eps_cap,
                            double c_slack);
Lemma41Report lemma41_check(const ScalarField& u, const NonlinearityPair& pair, double lambda, double eps_cap);

struct Lemma42Report {
    double lhs = 0;    // int grad^2 u[grad u, grad u]
    double rhs = 0;    // -1/3 int (lambda_2 + ... + lambda_{n-1}) |grad u|^2
    double margin = 0;
    double scale = 0;  // int |lap u| |grad u|^2, the size of either side
    bool passes = true;
};

Lemma42Report lemma42_check(const ScalarField& u, double eps_cap, double tolerance);
Lemma42Report lemma42_check(const ScalarField& u, double eps_cap);

// Band-limited random field (variance l^{-2} per degree, degrees min_degree..L)
// scaled to the given C^1 norm.
ScalarField random_field(SpherePtr sphere, int L, double c1, std::uint64_t seed, int min_degree = 1);

// One CSV row per check: lemma,n,seed,eps_scale,lhs,rhs,slack_scale,margin,ratio.
void write_lemma_csv_header(std::ostream& out);
void write_lemma41_row(std::ostream& out, int n, std::uint64_t seed, double eps_scale, const Lemma41Report& r);
void write_lemma42_row(std::ostream& out, int n, std::uint64_t seed, double eps_scale, const Lemma42Report& r);

}  // namespace quermass
