#include "quermass/spectral_sphere.hpp"

#include <cmath>
#include <stdexcept>

#include "bases.hpp"
#include "quermass/numerics.hpp"

namespace quermass {

namespace {

SphericalGrid circle_grid(int resolution) {
    SphericalGrid g;
    g.n = 2;
    g.resolution = resolution;
    g.exact_degree = 2 * resolution - 1;
    int m = 2 * resolution;
    g.nodes.resize(2, m);
    g.weights.setConstant(m, 2.0 * kPi / m);
    for (int i = 0; i < m; ++i) {
        double phi = 2.0 * kPi * i / m;
        g.nodes(0, i) = std::cos(phi);
        g.nodes(1, i) = std::sin(phi);
    }
    g.ring_size = 1;
    return g;
}

}  // namespace

SphericalGrid build_grid(int n, int resolution) {
    if (n < 2) throw std::invalid_argument("build_grid: n must be at least 2");
    if (resolution < 4) throw std::invalid_argument("build_grid: resolution must be at least 4");
    if (n == 2) return circle_grid(resolution);

    SphericalGrid inner = build_grid(n - 1, resolution);
    GaussRule polar = gauss_gegenbauer(resolution, 0.5 * (n - 2));

    SphericalGrid g;
    g.n = n;
    g.resolution = resolution;
    g.exact_degree = 2 * resolution - 1;
    g.ring_size = inner.size();
    int total = resolution * g.ring_size;
    g.nodes.resize(n, total);
    g.weights.resize(total);
    g.polar.resize(resolution);
    // Rings ordered from the north pole (t = cos(theta) near 1) southwards.
    for (int j = 0; j < resolution; ++j) {
        double t = polar.nodes[resolution - 1 - j];
        double wt = polar.weights[resolution - 1 - j];
        double s = std::sqrt(std::max(0.0, 1.0 - t * t));
        g.polar[j] = std::acos(t);
        for (int i = 0; i < g.ring_size; ++i) {
            int k = j * g.ring_size + i;
            g.nodes.col(k).head(n - 1) = s * inner.nodes.col(i);
            g.nodes(n - 1, k) = t;
            g.weights[k] = wt * inner.weights[i];
        }
    }
    // The Gegenbauer weights carry the exact total; renormalize away rounding.
    double total_weight = pairwise_sum(g.weights);
    g.weights *= sphere_area(n) / total_weight;
    return g;
}

HarmonicBasis::HarmonicBasis(int n, int max_degree) : n_(n), max_degree_(max_degree) {
    offsets_.assign(max_degree + 2, 0);
    for (int l = 0; l <= max_degree; ++l) offsets_[l + 1] = offsets_[l] + harmonic_dimension(n, l);
}

int HarmonicBasis::degree_of(int index) const {
    int l = 0;
    while (offsets_[l + 1] <= index) ++l;
    return l;
}

std::vector<double> HarmonicBasis::eigenvalues() const {
    std::vector<double> out;
    for (int l = 0; l <= max_degree_; ++l) out.push_back(eigenvalue(l));
    return out;
}

std::vector<int> HarmonicBasis::multiplicities() const {
    std::vector<int> out;
    for (int l = 0; l <= max_degree_; ++l) out.push_back(multiplicity(l));
    return out;
}

SpherePtr make_sphere(int n, int resolution, int L) {
    SphericalGrid grid = build_grid(n, resolution);
    if (L < 0) L = n <= 3 ? resolution - 1 : std::min(resolution - 1, 6);
    if (L > resolution - 1)
        throw std::invalid_argument("make_sphere: degree exceeds the grid's exact-integration capability");
    std::unique_ptr<HarmonicBasis> basis;
    if (n == 2)
        basis = std::make_unique<CircleBasis>(grid, L);
    else if (n == 3)
        basis = std::make_unique<SurfaceHarmonicBasis>(grid, L);
    else
        basis = std::make_unique<AnchorBasis>(grid, L);
    return std::make_shared<const Sphere>(std::move(grid), std::move(basis));
}

ScalarField field_from_values(SpherePtr sphere, Eigen::VectorXd values) {
    if (values.size() != sphere->size()) throw std::invalid_argument("field size does not match grid");
    ScalarField f;
    f.sphere = std::move(sphere);
    f.values = std::move(values);
    return f;
}

ScalarField field_from_function(SpherePtr sphere, const std::function<double(const Eigen::VectorXd&)>& fn) {
    const auto& g = sphere->grid();
    Eigen::VectorXd v(g.size());
    for (int k = 0; k < g.size(); ++k) v[k] = fn(g.nodes.col(k));
    return field_from_values(std::move(sphere), std::move(v));
}

ScalarField constant_field(SpherePtr sphere, double c) {
    Eigen::VectorXd coeffs = unit_coeffs(*sphere, 0, 0, c * std::sqrt(sphere_area(sphere->n())));
    ScalarField f = synthesize(coeffs, sphere);
    f.values.setConstant(c);
    return f;
}

double quadrature(const SphericalGrid& grid, const Eigen::VectorXd& values) {
    return weighted_sum(grid.weights, values);
}

double quadrature(const ScalarField& f) { return quadrature(f.sphere->grid(), f.values); }

ScalarField analyze(const ScalarField& f, int L) {
    const auto& basis = f.sphere->basis();
    if (L < 0 || L > basis.max_degree())
        throw std::invalid_argument("analyze: degree exceeds the grid's capability");
    ScalarField out = f;
    out.coeffs = basis.analyze(f.values, L);
    out.truncation = L;
    return out;
}

ScalarField synthesize(const Eigen::VectorXd& coeffs, SpherePtr sphere) {
    const auto& basis = sphere->basis();
    if (coeffs.size() != basis.size()) throw std::invalid_argument("synthesize: coefficient count mismatch");
    ScalarField f;
    f.values = basis.synthesize(coeffs, JetOrder::Value).value;
    f.coeffs = coeffs;
    int top = 0;
    for (int i = 0; i < coeffs.size(); ++i)
        if (coeffs[i] != 0.0) top = basis.degree_of(i);
    f.truncation = top;
    f.sphere = std::move(sphere);
    return f;
}

Eigen::VectorXd unit_coeffs(const Sphere& sphere, int l, int m_index, double value) {
    const auto& basis = sphere.basis();
    if (l < 0 || l > basis.max_degree() || m_index < 0 || m_index >= basis.multiplicity(l))
        throw std::invalid_argument("unit_coeffs: (l, m_index) outside the basis");
    Eigen::VectorXd c = Eigen::VectorXd::Zero(basis.size());
    c[basis.offset(l) + m_index] = value;
    return c;
}

FieldJets jets(const ScalarField& f, JetOrder order) {
    if (!f.coeffs) throw std::logic_error("derivatives need an analyzed (band-limited) field");
    return f.sphere->basis().synthesize(*f.coeffs, order);
}

Eigen::MatrixXd gradient(const ScalarField& f) { return jets(f, JetOrder::Gradient).grad; }

std::vector<Eigen::MatrixXd> hessian(const ScalarField& f) {
    FieldJets j = jets(f, JetOrder::Hessian);
    int n = f.n();
    std::vector<Eigen::MatrixXd> out;
    out.reserve(j.hess.cols());
    for (int k = 0; k < j.hess.cols(); ++k) out.emplace_back(j.hessian_at(k, n));
    return out;
}

ScalarField laplacian(const ScalarField& f) {
    if (!f.coeffs) throw std::logic_error("derivatives need an analyzed (band-limited) field");
    const auto& basis = f.sphere->basis();
    Eigen::VectorXd c = *f.coeffs;
    for (int i = 0; i < c.size(); ++i) c[i] *= -basis.eigenvalue(basis.degree_of(i));
    ScalarField out = synthesize(c, f.sphere);
    out.truncation = f.truncation;
    return out;
}

std::pair<ScalarField, ScalarField> split_frequencies(const ScalarField& f, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("split_frequencies: lambda must be positive");
    if (!f.coeffs) throw std::logic_error("split_frequencies: field must be analyzed first");
    const auto& basis = f.sphere->basis();
    Eigen::VectorXd low = *f.coeffs, high = *f.coeffs;
    for (int i = 0; i < low.size(); ++i) {
        if (basis.eigenvalue(basis.degree_of(i)) < lambda)
            high[i] = 0.0;
        else
            low[i] = 0.0;
    }
    ScalarField u1 = synthesize(low, f.sphere), u2 = synthesize(high, f.sphere);
    u1.truncation = u2.truncation = f.truncation;
    return {std::move(u1), std::move(u2)};
}

double evaluate(const ScalarField& f, const Eigen::VectorXd& x) {
    if (!f.coeffs) throw std::logic_error("pointwise evaluation needs an analyzed field");
    return f.sphere->basis().evaluate(*f.coeffs, x);
}

ScalarField scaled(const ScalarField& f, double s) {
    ScalarField out = f;
    out.values *= s;
    if (out.coeffs) *out.coeffs *= s;
    return out;
}

ScalarField add(const ScalarField& a, const ScalarField& b) {
    if (a.sphere != b.sphere) throw std::invalid_argument("add: fields live on different spheres");
    ScalarField out = a;
    out.values += b.values;
    if (a.coeffs && b.coeffs) {
        *out.coeffs += *b.coeffs;
        out.truncation = std::max(a.truncation, b.truncation);
    } else {
        out.coeffs.reset();
        out.truncation = -1;
    }
    return out;
}

Eigen::MatrixXd tangent_frame(const Eigen::VectorXd& x) {
    const int n = static_cast<int>(x.size());
    // Householder reflection swapping x and +-e_n; its other columns span x^perp.
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[n - 1] = x[n - 1] >= 0 ? 1.0 : -1.0;
    Eigen::VectorXd w = x - e;
    double ww = w.squaredNorm();
    Eigen::MatrixXd frame(n, n - 1);
    for (int i = 0; i < n - 1; ++i) {
        Eigen::VectorXd ei = Eigen::VectorXd::Zero(n);
        ei[i] = 1.0;
        frame.col(i) = ww > 0 ? Eigen::VectorXd(ei - 2.0 * w * (w.dot(ei) / ww)) : ei;
    }
    return frame;
}

double zonal_harmonic(int n, int l, double t) {
    double alpha = 0.5 * (n - 2);
    std::vector<double> c(l + 1);
    gegenbauer(l, alpha, t, c.data());
    double dim = harmonic_dimension(n, l);
    double k1 = dim / sphere_area(n);
    return std::sqrt(k1) * c[l] / gegenbauer_at_one(l, alpha);
}

}  // namespace quermass
