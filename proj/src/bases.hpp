#pragma once

#include <vector>

#include "quermass/spectral_sphere.hpp"

namespace quermass {

// Fourier basis on the circle: 1/sqrt(2 pi), cos(l phi)/sqrt(pi), sin(l phi)/sqrt(pi).
class CircleBasis final : public HarmonicBasis {
public:
    CircleBasis(const SphericalGrid& grid, int L);
    Eigen::VectorXd analyze(const Eigen::VectorXd& values, int L) const override;
    FieldJets synthesize(const Eigen::VectorXd& coeffs, JetOrder order) const override;
    Eigen::VectorXd weak_divergence(const Eigen::MatrixXd& W) const override;
    double evaluate(const Eigen::VectorXd& coeffs, const Eigen::VectorXd& x) const override;

private:
    SphericalGrid grid_;
};

// Real spherical harmonics on S^2 without the Condon-Shortley phase.
// m_index 0 is m = 0, 2k-1 is cos(k phi), 2k is sin(k phi).
class SurfaceHarmonicBasis final : public HarmonicBasis {
public:
    SurfaceHarmonicBasis(const SphericalGrid& grid, int L);
    Eigen::VectorXd analyze(const Eigen::VectorXd& values, int L) const override;
    FieldJets synthesize(const Eigen::VectorXd& coeffs, JetOrder order) const override;
    Eigen::VectorXd weak_divergence(const Eigen::MatrixXd& W) const override;
    double evaluate(const Eigen::VectorXd& coeffs, const Eigen::VectorXd& x) const override;

private:
    int lm(int l, int m) const { return l * (l + 1) / 2 + m; }
    int coeff_index(int l, int m, bool sine) const { return l * l + (m == 0 ? 0 : 2 * m - (sine ? 0 : 1)); }

    SphericalGrid grid_;
    int rings_;
    int azimuths_;
    // Per ring, scaled associated Legendre functions (sqrt(2) folded in for m > 0)
    // and their first two theta derivatives, indexed by lm(l, m).
    std::vector<double> p_, dp_, ddp_;
    Eigen::MatrixXd cos_, sin_;  // azimuths x (L + 1)
};

// Degree-wise orthonormal bases on S^{n-1}, n >= 4, assembled from
// reproducing kernels K_l(x . p_j) at fixed anchor points p_j.
class AnchorBasis final : public HarmonicBasis {
public:
    AnchorBasis(const SphericalGrid& grid, int L);
    Eigen::VectorXd analyze(const Eigen::VectorXd& values, int L) const override;
    FieldJets synthesize(const Eigen::VectorXd& coeffs, JetOrder order) const override;
    Eigen::VectorXd weak_divergence(const Eigen::MatrixXd& W) const override;
    double evaluate(const Eigen::VectorXd& coeffs, const Eigen::VectorXd& x) const override;

private:
    // K_l(t), K_l'(t), K_l''(t) for l <= max_degree.
    void kernels(double t, int order, double* k0, double* k1, double* k2) const;
    // Anchor weights beta(l, j) of a coefficient vector.
    Eigen::MatrixXd ridge_weights(const Eigen::VectorXd& coeffs) const;
    Eigen::VectorXd coeffs_from_ridge(const Eigen::MatrixXd& g, int L) const;

    SphericalGrid grid_;
    double alpha_;
    Eigen::MatrixXd anchors_;          // n x M
    std::vector<Eigen::MatrixXd> A_;   // per degree, M x N_l
    std::vector<double> kscale_;       // N_l / |S| / C_l(1)
};

}  // namespace quermass
