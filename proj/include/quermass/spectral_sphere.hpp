#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace quermass {

// Tensor-product quadrature on S^{n-1}. Nodes are ordered ring-major: for
// n >= 3 node k lies on ring k / ring_size at polar angle polar[k / ring_size]
// measured from e_n; each ring is a scaled copy of the S^{n-2} grid.
struct SphericalGrid {
    int n = 0;
    int resolution = 0;
    int exact_degree = 0;
    Eigen::MatrixXd nodes;  // n x N
    Eigen::VectorXd weights;
    std::vector<double> polar;
    int ring_size = 0;

    int size() const { return static_cast<int>(weights.size()); }
};

// resolution = polar node count per level; the innermost circle has 2*resolution
// equiangular nodes. Exact for ambient polynomials of degree <= 2*resolution - 1.
SphericalGrid build_grid(int n, int resolution);

enum class JetOrder { Value = 0, Gradient = 1, Hessian = 2 };

// Values and ambient-coordinate covariant derivatives at the grid nodes.
// grad.col(k) is tangent at node k; hess.col(k) holds the n x n tangent
// Hessian (column-major), extended by 0 along the node direction.
struct FieldJets {
    Eigen::VectorXd value;
    Eigen::MatrixXd grad;
    Eigen::MatrixXd hess;
    Eigen::VectorXd laplacian;

    Eigen::Map<const Eigen::MatrixXd> hessian_at(int k, int n) const {
        return Eigen::Map<const Eigen::MatrixXd>(hess.col(k).data(), n, n);
    }
};

// Unit-normalized real harmonic basis up to degree L, bound to a grid.
// Coefficient index of (l, m_index) is offset(l) + m_index.
class HarmonicBasis {
public:
    HarmonicBasis(int n, int max_degree);
    virtual ~HarmonicBasis() = default;

    int n() const { return n_; }
    int max_degree() const { return max_degree_; }
    int size() const { return offsets_.back(); }
    int offset(int l) const { return offsets_[l]; }
    int multiplicity(int l) const { return offsets_[l + 1] - offsets_[l]; }
    int degree_of(int index) const;
    double eigenvalue(int l) const { return static_cast<double>(l) * (l + n_ - 2); }
    std::vector<double> eigenvalues() const;
    std::vector<int> multiplicities() const;

    // Coefficients <f, Y_a> by grid quadrature for degrees <= L.
    virtual Eigen::VectorXd analyze(const Eigen::VectorXd& values, int L) const = 0;
    virtual FieldJets synthesize(const Eigen::VectorXd& coeffs, JetOrder order) const = 0;
    // Galerkin coefficients of div W for a tangent field W: -<W, grad Y_a>.
    virtual Eigen::VectorXd weak_divergence(const Eigen::MatrixXd& W) const = 0;
    virtual double evaluate(const Eigen::VectorXd& coeffs, const Eigen::VectorXd& x) const = 0;

protected:
    int n_;
    int max_degree_;
    std::vector<int> offsets_;
};

// A grid together with the harmonic basis bound to it.
class Sphere {
public:
    Sphere(SphericalGrid grid, std::unique_ptr<HarmonicBasis> basis)
        : grid_(std::move(grid)), basis_(std::move(basis)) {}

    const SphericalGrid& grid() const { return grid_; }
    const HarmonicBasis& basis() const { return *basis_; }
    int n() const { return grid_.n; }
    int size() const { return grid_.size(); }
    int max_degree() const { return basis_->max_degree(); }

private:
    SphericalGrid grid_;
    std::unique_ptr<HarmonicBasis> basis_;
};

using SpherePtr = std::shared_ptr<const Sphere>;

// L defaults to resolution - 1 for n <= 3 and min(resolution - 1, 6) for n >= 4.
// Degrees up to resolution - 1 are orthonormal under the grid quadrature.
SpherePtr make_sphere(int n, int resolution, int L = -1);

struct ScalarField {
    SpherePtr sphere;
    Eigen::VectorXd values;
    std::optional<Eigen::VectorXd> coeffs;
    int truncation = -1;

    int n() const { return sphere->n(); }
};

ScalarField field_from_values(SpherePtr sphere, Eigen::VectorXd values);
ScalarField field_from_function(SpherePtr sphere, const std::function<double(const Eigen::VectorXd&)>& f);
ScalarField constant_field(SpherePtr sphere, double c);

double quadrature(const ScalarField& f);
double quadrature(const SphericalGrid& grid, const Eigen::VectorXd& values);

ScalarField analyze(const ScalarField& f, int L);
ScalarField synthesize(const Eigen::VectorXd& coeffs, SpherePtr sphere);
// Coefficient vector with a single entry.
Eigen::VectorXd unit_coeffs(const Sphere& sphere, int l, int m_index, double value = 1.0);

FieldJets jets(const ScalarField& f, JetOrder order = JetOrder::Hessian);
Eigen::MatrixXd gradient(const ScalarField& f);
std::vector<Eigen::MatrixXd> hessian(const ScalarField& f);
ScalarField laplacian(const ScalarField& f);

std::pair<ScalarField, ScalarField> split_frequencies(const ScalarField& f, double lambda);

double evaluate(const ScalarField& f, const Eigen::VectorXd& x);

// Linear combinations of analyzed fields on the same sphere.
ScalarField scaled(const ScalarField& f, double s);
ScalarField add(const ScalarField& a, const ScalarField& b);

// Orthonormal basis of the tangent space at unit vector x (n x (n-1)).
Eigen::MatrixXd tangent_frame(const Eigen::VectorXd& x);

// Zonal harmonic of degree l about e_n, unit L2-normalized on S^{n-1}, n >= 3.
double zonal_harmonic(int n, int l, double t);

}  // namespace quermass
