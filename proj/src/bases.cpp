#include "bases.hpp"

#include <cmath>
#include <algorithm>
#include <random>
#include <stdexcept>

#include "quermass/numerics.hpp"

namespace quermass {

// ---------------------------------------------------------------- circle

CircleBasis::CircleBasis(const SphericalGrid& grid, int L) : HarmonicBasis(2, L), grid_(grid) {}

namespace {

// Value and first two derivatives of basis function `index` on the circle.
void circle_mode(int index, double phi, double& y, double& dy, double& ddy) {
    if (index == 0) {
        y = 1.0 / std::sqrt(2.0 * kPi);
        dy = ddy = 0.0;
        return;
    }
    int l = (index + 1) / 2;
    bool sine = index % 2 == 0;
    double s = 1.0 / std::sqrt(kPi);
    double c = std::cos(l * phi), sn = std::sin(l * phi);
    if (sine) {
        y = s * sn;
        dy = s * l * c;
        ddy = -s * l * l * sn;
    } else {
        y = s * c;
        dy = -s * l * sn;
        ddy = -s * l * l * c;
    }
}

}  // namespace

Eigen::VectorXd CircleBasis::analyze(const Eigen::VectorXd& values, int L) const {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(size());
    int top = offset(L + 1);
    Eigen::VectorXd prod(grid_.size());
    for (int a = 0; a < top; ++a) {
        for (int k = 0; k < grid_.size(); ++k) {
            double phi = std::atan2(grid_.nodes(1, k), grid_.nodes(0, k));
            double y, dy, ddy;
            circle_mode(a, phi, y, dy, ddy);
            prod[k] = grid_.weights[k] * values[k] * y;
        }
        c[a] = pairwise_sum(prod);
    }
    return c;
}

FieldJets CircleBasis::synthesize(const Eigen::VectorXd& coeffs, JetOrder order) const {
    const int N = grid_.size();
    FieldJets j;
    j.value = Eigen::VectorXd::Zero(N);
    if (order >= JetOrder::Gradient) j.grad = Eigen::MatrixXd::Zero(2, N);
    if (order >= JetOrder::Hessian) {
        j.hess = Eigen::MatrixXd::Zero(4, N);
        j.laplacian = Eigen::VectorXd::Zero(N);
    }
    for (int k = 0; k < N; ++k) {
        double phi = std::atan2(grid_.nodes(1, k), grid_.nodes(0, k));
        double f = 0, df = 0, ddf = 0;
        for (int a = 0; a < coeffs.size(); ++a) {
            if (coeffs[a] == 0.0) continue;
            double y, dy, ddy;
            circle_mode(a, phi, y, dy, ddy);
            f += coeffs[a] * y;
            df += coeffs[a] * dy;
            ddf += coeffs[a] * ddy;
        }
        j.value[k] = f;
        Eigen::Vector2d t(-std::sin(phi), std::cos(phi));
        if (order >= JetOrder::Gradient) j.grad.col(k) = df * t;
        if (order >= JetOrder::Hessian) {
            Eigen::Matrix2d h = ddf * t * t.transpose();
            j.hess.col(k) = Eigen::Map<Eigen::VectorXd>(h.data(), 4);
            j.laplacian[k] = ddf;
        }
    }
    return j;
}

Eigen::VectorXd CircleBasis::weak_divergence(const Eigen::MatrixXd& W) const {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(size());
    Eigen::VectorXd prod(grid_.size());
    for (int a = 0; a < size(); ++a) {
        for (int k = 0; k < grid_.size(); ++k) {
            double phi = std::atan2(grid_.nodes(1, k), grid_.nodes(0, k));
            double y, dy, ddy;
            circle_mode(a, phi, y, dy, ddy);
            double wt = -std::sin(phi) * W(0, k) + std::cos(phi) * W(1, k);
            prod[k] = grid_.weights[k] * wt * dy;
        }
        c[a] = -pairwise_sum(prod);
    }
    return c;
}

double CircleBasis::evaluate(const Eigen::VectorXd& coeffs, const Eigen::VectorXd& x) const {
    double phi = std::atan2(x[1], x[0]);
    double f = 0;
    for (int a = 0; a < coeffs.size(); ++a) {
        double y, dy, ddy;
        circle_mode(a, phi, y, dy, ddy);
        f += coeffs[a] * y;
    }
    return f;
}

// ---------------------------------------------------------------- S^2

namespace {

// Normalized associated Legendre functions and theta-derivatives at theta,
// with sqrt(2) folded in for m > 0. Layout index l(l+1)/2 + m.
void legendre_table(int L, double theta, double* p, double* dp, double* ddp) {
    auto lm = [](int l, int m) { return l * (l + 1) / 2 + m; };
    const double c = std::cos(theta), s = std::sin(theta);
    p[0] = 1.0 / std::sqrt(4.0 * kPi);
    for (int m = 1; m <= L; ++m) p[lm(m, m)] = std::sqrt((2.0 * m + 1) / (2.0 * m)) * s * p[lm(m - 1, m - 1)];
    for (int m = 0; m < L; ++m) p[lm(m + 1, m)] = std::sqrt(2.0 * m + 3) * c * p[lm(m, m)];
    for (int m = 0; m <= L; ++m) {
        for (int l = m + 2; l <= L; ++l) {
            double a = std::sqrt((4.0 * l * l - 1) / (double(l) * l - double(m) * m));
            double b = std::sqrt(((l - 1.0) * (l - 1.0) - double(m) * m) / (4.0 * (l - 1.0) * (l - 1.0) - 1));
            p[lm(l, m)] = a * (c * p[lm(l - 1, m)] - b * p[lm(l - 2, m)]);
        }
    }
    if (dp) {
        for (int m = 0; m <= L; ++m) {
            for (int l = m; l <= L; ++l) {
                double prev = l - 1 >= m ? p[lm(l - 1, m)] : 0.0;
                double k = std::sqrt((2.0 * l + 1) * (double(l) * l - double(m) * m) / (2.0 * l - 1));
                if (l == 0) k = 0.0;
                double d = (l * c * p[lm(l, m)] - k * prev) / s;
                dp[lm(l, m)] = d;
                ddp[lm(l, m)] = -(c / s) * d + (double(m) * m / (s * s) - double(l) * (l + 1)) * p[lm(l, m)];
            }
        }
    }
    const double r2 = std::sqrt(2.0);
    for (int m = 1; m <= L; ++m) {
        for (int l = m; l <= L; ++l) {
            p[lm(l, m)] *= r2;
            if (dp) {
                dp[lm(l, m)] *= r2;
                ddp[lm(l, m)] *= r2;
            }
        }
    }
}

}  // namespace

SurfaceHarmonicBasis::SurfaceHarmonicBasis(const SphericalGrid& grid, int L)
    : HarmonicBasis(3, L), grid_(grid), rings_(grid.resolution), azimuths_(grid.ring_size) {
    const int per = (L + 1) * (L + 2) / 2;
    p_.resize(static_cast<std::size_t>(rings_) * per);
    dp_.resize(p_.size());
    ddp_.resize(p_.size());
    for (int j = 0; j < rings_; ++j) {
        std::size_t off = static_cast<std::size_t>(j) * per;
        legendre_table(L, grid.polar[j], p_.data() + off, dp_.data() + off, ddp_.data() + off);
    }
    cos_.resize(azimuths_, L + 1);
    sin_.resize(azimuths_, L + 1);
    for (int i = 0; i < azimuths_; ++i) {
        double phi = 2.0 * kPi * i / azimuths_;
        for (int m = 0; m <= L; ++m) {
            cos_(i, m) = std::cos(m * phi);
            sin_(i, m) = std::sin(m * phi);
        }
    }
}

Eigen::VectorXd SurfaceHarmonicBasis::analyze(const Eigen::VectorXd& values, int L) const {
    const int Lb = max_degree_;
    const int per = (Lb + 1) * (Lb + 2) / 2;
    Eigen::VectorXd c = Eigen::VectorXd::Zero(size());
    Eigen::VectorXd fc(L + 1), fs(L + 1);
    for (int j = 0; j < rings_; ++j) {
        auto ring = values.segment(j * azimuths_, azimuths_);
        fc = cos_.leftCols(L + 1).transpose() * ring;
        fs = sin_.leftCols(L + 1).transpose() * ring;
        double w = grid_.weights[j * azimuths_];
        const double* p = p_.data() + static_cast<std::size_t>(j) * per;
        for (int l = 0; l <= L; ++l) {
            c[coeff_index(l, 0, false)] += w * p[lm(l, 0)] * fc[0];
            for (int m = 1; m <= l; ++m) {
                c[coeff_index(l, m, false)] += w * p[lm(l, m)] * fc[m];
                c[coeff_index(l, m, true)] += w * p[lm(l, m)] * fs[m];
            }
        }
    }
    return c;
}

FieldJets SurfaceHarmonicBasis::synthesize(const Eigen::VectorXd& coeffs, JetOrder order) const {
    const int L = max_degree_;
    const int per = (L + 1) * (L + 2) / 2;
    const int N = grid_.size();
    const bool want_grad = order >= JetOrder::Gradient;
    const bool want_hess = order >= JetOrder::Hessian;
    FieldJets out;
    out.value.resize(N);
    if (want_grad) out.grad.resize(3, N);
    if (want_hess) {
        out.hess.resize(9, N);
        out.laplacian.resize(N);
    }
    int top = 0;
    for (int a = 0; a < coeffs.size(); ++a)
        if (coeffs[a] != 0.0) top = degree_of(a);

    // Per-m theta profiles: value, d/dtheta, d2/dtheta2, and Laplacian coefficients.
    Eigen::MatrixXd A(top + 1, 4), B(top + 1, 4);
    for (int j = 0; j < rings_; ++j) {
        const double* p = p_.data() + static_cast<std::size_t>(j) * per;
        const double* dp = dp_.data() + static_cast<std::size_t>(j) * per;
        const double* ddp = ddp_.data() + static_cast<std::size_t>(j) * per;
        A.setZero();
        B.setZero();
        for (int l = 0; l <= top; ++l) {
            double lap = -double(l) * (l + 1);
            for (int m = 0; m <= l; ++m) {
                double cc = coeffs[coeff_index(l, m, false)];
                double cs = m > 0 ? coeffs[coeff_index(l, m, true)] : 0.0;
                int q = lm(l, m);
                A(m, 0) += cc * p[q];
                B(m, 0) += cs * p[q];
                if (want_grad) {
                    A(m, 1) += cc * dp[q];
                    B(m, 1) += cs * dp[q];
                }
                if (want_hess) {
                    A(m, 2) += cc * ddp[q];
                    B(m, 2) += cs * ddp[q];
                    A(m, 3) += lap * cc * p[q];
                    B(m, 3) += lap * cs * p[q];
                }
            }
        }
        const double theta = grid_.polar[j];
        const double ct = std::cos(theta), st = std::sin(theta);
        for (int i = 0; i < azimuths_; ++i) {
            const int k = j * azimuths_ + i;
            double f = 0, ft = 0, ftt = 0, fp = 0, fpp = 0, ftp = 0, lap = 0;
            for (int m = 0; m <= top; ++m) {
                double cm = cos_(i, m), sm = sin_(i, m);
                f += A(m, 0) * cm + B(m, 0) * sm;
                if (want_grad) {
                    ft += A(m, 1) * cm + B(m, 1) * sm;
                    fp += m * (-A(m, 0) * sm + B(m, 0) * cm);
                }
                if (want_hess) {
                    ftt += A(m, 2) * cm + B(m, 2) * sm;
                    fpp -= double(m) * m * (A(m, 0) * cm + B(m, 0) * sm);
                    ftp += m * (-A(m, 1) * sm + B(m, 1) * cm);
                    lap += A(m, 3) * cm + B(m, 3) * sm;
                }
            }
            out.value[k] = f;
            if (!want_grad) continue;
            const double phi = 2.0 * kPi * i / azimuths_;
            const double cp = std::cos(phi), sp = std::sin(phi);
            Eigen::Vector3d et(ct * cp, ct * sp, -st), ep(-sp, cp, 0.0);
            out.grad.col(k) = ft * et + (fp / st) * ep;
            if (!want_hess) continue;
            double htt = ftt;
            double htp = (ftp - (ct / st) * fp) / st;
            double hpp = fpp / (st * st) + (ct / st) * ft;
            Eigen::Matrix3d h = htt * et * et.transpose() + htp * (et * ep.transpose() + ep * et.transpose()) +
                                hpp * ep * ep.transpose();
            out.hess.col(k) = Eigen::Map<Eigen::VectorXd>(h.data(), 9);
            out.laplacian[k] = lap;
        }
    }
    return out;
}

Eigen::VectorXd SurfaceHarmonicBasis::weak_divergence(const Eigen::MatrixXd& W) const {
    const int L = max_degree_;
    const int per = (L + 1) * (L + 2) / 2;
    Eigen::VectorXd c = Eigen::VectorXd::Zero(size());
    Eigen::VectorXd wt(azimuths_), wp(azimuths_);
    Eigen::VectorXd mcol(L + 1);
    for (int m = 0; m <= L; ++m) mcol[m] = m;
    for (int j = 0; j < rings_; ++j) {
        const double theta = grid_.polar[j];
        const double ct = std::cos(theta), st = std::sin(theta);
        for (int i = 0; i < azimuths_; ++i) {
            const int k = j * azimuths_ + i;
            const double phi = 2.0 * kPi * i / azimuths_;
            const double cp = std::cos(phi), sp = std::sin(phi);
            wt[i] = W(0, k) * ct * cp + W(1, k) * ct * sp - W(2, k) * st;
            wp[i] = (-W(0, k) * sp + W(1, k) * cp) / st;
        }
        Eigen::VectorXd gc = cos_.transpose() * wt, gs = sin_.transpose() * wt;
        Eigen::VectorXd hc = -(sin_.transpose() * wp).cwiseProduct(mcol);
        Eigen::VectorXd hs = (cos_.transpose() * wp).cwiseProduct(mcol);
        double w = grid_.weights[j * azimuths_];
        const double* p = p_.data() + static_cast<std::size_t>(j) * per;
        const double* dp = dp_.data() + static_cast<std::size_t>(j) * per;
        for (int l = 0; l <= L; ++l) {
            for (int m = 0; m <= l; ++m) {
                int q = lm(l, m);
                c[coeff_index(l, m, false)] -= w * (dp[q] * gc[m] + p[q] * hc[m]);
                if (m > 0) c[coeff_index(l, m, true)] -= w * (dp[q] * gs[m] + p[q] * hs[m]);
            }
        }
    }
    return c;
}

double SurfaceHarmonicBasis::evaluate(const Eigen::VectorXd& coeffs, const Eigen::VectorXd& x) const {
    const int L = max_degree_;
    double theta = std::acos(std::clamp(x[2] / x.norm(), -1.0, 1.0));
    double phi = std::atan2(x[1], x[0]);
    std::vector<double> p((L + 1) * (L + 2) / 2);
    legendre_table(L, theta, p.data(), nullptr, nullptr);
    double f = 0;
    for (int l = 0; l <= L; ++l) {
        f += coeffs[coeff_index(l, 0, false)] * p[lm(l, 0)];
        for (int m = 1; m <= l; ++m) {
            f += p[lm(l, m)] *
                 (coeffs[coeff_index(l, m, false)] * std::cos(m * phi) + coeffs[coeff_index(l, m, true)] * std::sin(m * phi));
        }
    }
    return f;
}

// ---------------------------------------------------------------- S^{n-1}, n >= 4

AnchorBasis::AnchorBasis(const SphericalGrid& grid, int L)
    : HarmonicBasis(grid.n, L), grid_(grid), alpha_(0.5 * (grid.n - 2)) {
    const int n = grid.n;
    const int top_dim = multiplicity(L);
    const int M = 2 * top_dim + 8;
    std::mt19937_64 rng(0x5eedULL * 1315423911ULL + 131ULL * n + L);
    std::normal_distribution<double> normal;
    anchors_.resize(n, M);
    for (int j = 0; j < M; ++j) {
        for (int i = 0; i < n; ++i) anchors_(i, j) = normal(rng);
        anchors_.col(j).normalize();
    }
    kscale_.resize(L + 1);
    const double area = sphere_area(n);
    for (int l = 0; l <= L; ++l) kscale_[l] = multiplicity(l) / area / gegenbauer_at_one(l, alpha_);

    std::vector<Eigen::MatrixXd> gram(L + 1, Eigen::MatrixXd(M, M));
    std::vector<double> k0(L + 1);
    for (int a = 0; a < M; ++a) {
        for (int b = a; b < M; ++b) {
            double t = std::clamp(anchors_.col(a).dot(anchors_.col(b)), -1.0, 1.0);
            kernels(t, 0, k0.data(), nullptr, nullptr);
            for (int l = 0; l <= L; ++l) gram[l](a, b) = gram[l](b, a) = k0[l];
        }
    }
    A_.resize(L + 1);
    for (int l = 0; l <= L; ++l) {
        const int dim = multiplicity(l);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram[l]);
        const auto& ev = es.eigenvalues();
        double smallest_kept = ev[M - dim], largest = ev[M - 1];
        if (smallest_kept < 1e-9 * largest)
            throw std::runtime_error("anchor basis: anchor set does not span the harmonic space");
        A_[l].resize(M, dim);
        for (int a = 0; a < dim; ++a) {
            int col = M - 1 - a;
            A_[l].col(a) = es.eigenvectors().col(col) / std::sqrt(ev[col]);
        }
    }
}

void AnchorBasis::kernels(double t, int order, double* k0, double* k1, double* k2) const {
    const int L = max_degree_;
    double c0[64], c1[64], c2[64];
    std::vector<double> big0, big1, big2;
    double *p0 = c0, *p1 = c1, *p2 = c2;
    if (L + 1 > 64) {
        big0.resize(L + 1);
        big1.resize(L + 1);
        big2.resize(L + 1);
        p0 = big0.data();
        p1 = big1.data();
        p2 = big2.data();
    }
    gegenbauer(L, alpha_, t, p0);
    for (int l = 0; l <= L; ++l) k0[l] = kscale_[l] * p0[l];
    if (order >= 1) {
        if (L >= 1) gegenbauer(L - 1, alpha_ + 1.0, t, p1);
        k1[0] = 0.0;
        for (int l = 1; l <= L; ++l) k1[l] = kscale_[l] * 2.0 * alpha_ * p1[l - 1];
    }
    if (order >= 2) {
        if (L >= 2) gegenbauer(L - 2, alpha_ + 2.0, t, p2);
        k2[0] = 0.0;
        if (L >= 1) k2[1] = 0.0;
        for (int l = 2; l <= L; ++l) k2[l] = kscale_[l] * 4.0 * alpha_ * (alpha_ + 1.0) * p2[l - 2];
    }
}

Eigen::MatrixXd AnchorBasis::ridge_weights(const Eigen::VectorXd& coeffs) const {
    const int M = static_cast<int>(anchors_.cols());
    Eigen::MatrixXd beta(max_degree_ + 1, M);
    for (int l = 0; l <= max_degree_; ++l)
        beta.row(l) = (A_[l] * coeffs.segment(offset(l), multiplicity(l))).transpose();
    return beta;
}

Eigen::VectorXd AnchorBasis::coeffs_from_ridge(const Eigen::MatrixXd& g, int L) const {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(size());
    for (int l = 0; l <= L; ++l) c.segment(offset(l), multiplicity(l)) = A_[l].transpose() * g.row(l).transpose();
    return c;
}

Eigen::VectorXd AnchorBasis::analyze(const Eigen::VectorXd& values, int L) const {
    const int M = static_cast<int>(anchors_.cols());
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(max_degree_ + 1, M);
    std::vector<double> k0(max_degree_ + 1);
    for (int k = 0; k < grid_.size(); ++k) {
        double wf = grid_.weights[k] * values[k];
        if (wf == 0.0) continue;
        Eigen::VectorXd t = anchors_.transpose() * grid_.nodes.col(k);
        for (int j = 0; j < M; ++j) {
            kernels(std::clamp(t[j], -1.0, 1.0), 0, k0.data(), nullptr, nullptr);
            for (int l = 0; l <= L; ++l) g(l, j) += wf * k0[l];
        }
    }
    return coeffs_from_ridge(g, L);
}

FieldJets AnchorBasis::synthesize(const Eigen::VectorXd& coeffs, JetOrder order) const {
    const int n = n_;
    const int N = grid_.size();
    const int M = static_cast<int>(anchors_.cols());
    const int L = max_degree_;
    const bool want_grad = order >= JetOrder::Gradient;
    const bool want_hess = order >= JetOrder::Hessian;
    Eigen::MatrixXd beta = ridge_weights(coeffs);
    Eigen::MatrixXd beta_lap = beta;
    for (int l = 0; l <= L; ++l) beta_lap.row(l) *= -eigenvalue(l);
    int top = 0;
    for (int a = 0; a < coeffs.size(); ++a)
        if (coeffs[a] != 0.0) top = degree_of(a);

    FieldJets out;
    out.value.resize(N);
    if (want_grad) out.grad.resize(n, N);
    if (want_hess) {
        out.hess.resize(n * n, N);
        out.laplacian.resize(N);
    }
    std::vector<double> k0(L + 1), k1(L + 1), k2(L + 1);
    Eigen::VectorXd s1(M), s2(M);
    for (int k = 0; k < N; ++k) {
        Eigen::VectorXd x = grid_.nodes.col(k);
        Eigen::VectorXd t = anchors_.transpose() * x;
        double f = 0, lap = 0;
        for (int j = 0; j < M; ++j) {
            kernels(std::clamp(t[j], -1.0, 1.0), want_hess ? 2 : (want_grad ? 1 : 0), k0.data(), k1.data(), k2.data());
            double a0 = 0, a1 = 0, a2 = 0, al = 0;
            for (int l = 0; l <= top; ++l) {
                a0 += beta(l, j) * k0[l];
                if (want_grad) a1 += beta(l, j) * k1[l];
                if (want_hess) {
                    a2 += beta(l, j) * k2[l];
                    al += beta_lap(l, j) * k0[l];
                }
            }
            f += a0;
            lap += al;
            s1[j] = a1;
            s2[j] = a2;
        }
        out.value[k] = f;
        if (!want_grad) continue;
        Eigen::VectorXd dF = anchors_ * s1;
        double radial = x.dot(dF);
        out.grad.col(k) = dF - radial * x;
        if (!want_hess) continue;
        Eigen::MatrixXd D2 = anchors_ * s2.asDiagonal() * anchors_.transpose();
        Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n) - x * x.transpose();
        Eigen::MatrixXd h = P * D2 * P - radial * P;
        out.hess.col(k) = Eigen::Map<Eigen::VectorXd>(h.data(), n * n);
        out.laplacian[k] = lap;
    }
    return out;
}

Eigen::VectorXd AnchorBasis::weak_divergence(const Eigen::MatrixXd& W) const {
    const int M = static_cast<int>(anchors_.cols());
    const int L = max_degree_;
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(L + 1, M);
    std::vector<double> k0(L + 1), k1(L + 1);
    for (int k = 0; k < grid_.size(); ++k) {
        Eigen::VectorXd t = anchors_.transpose() * grid_.nodes.col(k);
        Eigen::VectorXd wp = anchors_.transpose() * W.col(k);
        double w = grid_.weights[k];
        for (int j = 0; j < M; ++j) {
            kernels(std::clamp(t[j], -1.0, 1.0), 1, k0.data(), k1.data(), nullptr);
            for (int l = 1; l <= L; ++l) g(l, j) += w * k1[l] * wp[j];
        }
    }
    return -coeffs_from_ridge(g, L);
}

double AnchorBasis::evaluate(const Eigen::VectorXd& coeffs, const Eigen::VectorXd& x) const {
    Eigen::MatrixXd beta = ridge_weights(coeffs);
    Eigen::VectorXd t = anchors_.transpose() * x.normalized();
    std::vector<double> k0(max_degree_ + 1);
    double f = 0;
    for (int j = 0; j < anchors_.cols(); ++j) {
        kernels(std::clamp(t[j], -1.0, 1.0), 0, k0.data(), nullptr, nullptr);
        for (int l = 0; l <= max_degree_; ++l) f += beta(l, j) * k0[l];
    }
    return f;
}

}  // namespace quermass
