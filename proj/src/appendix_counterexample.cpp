#include "quermass/appendix_counterexample.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include "quermass/config.hpp"
#include "quermass/numerics.hpp"
#include "quermass/star_domain.hpp"

namespace quermass {

namespace {

// Quintic smootherstep and its antiderivative and derivative on [0, 1].
double smoother(double x) { return x * x * x * (10.0 + x * (-15.0 + 6.0 * x)); }
double smoother_integral(double x) { return x * x * x * x * (2.5 + x * (-3.0 + x)); }
double smoother_slope(double x) { return 30.0 * x * x * (1.0 - x) * (1.0 - x); }

// Candidates per kappa^2 for the Fibonacci lattice. Near 2.8 the lattice's own
// spacing is just above 2/kappa so almost every candidate survives; denser
// lattices thin to fewer points (about 1.6 kappa^2 at 3.5).
constexpr double kFibonacciDensity = 2.8;

std::uint64_t cell_key3(long long ix, long long iy, long long iz) {
    const long long off = 1LL << 20;
    return (static_cast<std::uint64_t>(ix + off) << 42) | (static_cast<std::uint64_t>(iy + off) << 21) |
           static_cast<std::uint64_t>(iz + off);
}

// Streamed greedy thinning of a Fibonacci lattice. Candidates arrive in
// decreasing z, so cells more than one layer above the current one can be dropped.
PackedPoints pack_fibonacci(double kappa, std::uint64_t seed, bool store,
                            const std::function<void(const Eigen::VectorXd&)>& visitor) {
    PackedPoints out;
    out.n = 3;
    out.kappa = kappa;
    const double d = 2.0 / kappa;
    const double d2 = d * d;
    const double cell = d;
    const std::int64_t N = std::max<std::int64_t>(2, std::llround(kFibonacciDensity * kappa * kappa));
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    const double phase = 2.0 * kPi * static_cast<double>(splitmix64(seed) >> 11) * 0x1.0p-53;
    std::unordered_map<std::uint64_t, std::vector<Eigen::Vector3d>> cells;
    std::map<long long, std::vector<std::uint64_t>, std::greater<>> layers;
    std::vector<Eigen::Vector3d> stored;
    double min_d2 = d2;
    Eigen::VectorXd dyn(3);
    // The lattice is bracketed by the two poles so an antipodal pair is always offered.
    for (std::int64_t i = -1; i <= N; ++i) {
        Eigen::Vector3d p;
        if (i < 0 || i == N) {
            p = Eigen::Vector3d(0.0, 0.0, i < 0 ? 1.0 : -1.0);
        } else {
            const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(N);
            const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double phi = golden * static_cast<double>(i) + phase;
            p = Eigen::Vector3d(rho * std::cos(phi), rho * std::sin(phi), z);
        }
        const long long ix = static_cast<long long>(std::floor(p.x() / cell));
        const long long iy = static_cast<long long>(std::floor(p.y() / cell));
        const long long iz = static_cast<long long>(std::floor(p.z() / cell));
        while (!layers.empty() && layers.begin()->first > iz + 1) {
            for (std::uint64_t k : layers.begin()->second) cells.erase(k);
            layers.erase(layers.begin());
        }
        bool ok = true;
        double local_min = d2;
        for (long long a = -1; a <= 1 && ok; ++a)
            for (long long b = -1; b <= 1 && ok; ++b)
                for (long long c = -1; c <= 1 && ok; ++c) {
                    auto it = cells.find(cell_key3(ix + a, iy + b, iz + c));
                    if (it == cells.end()) continue;
                    for (const auto& q : it->second) {
                        double dd = (q - p).squaredNorm();
                        if (dd < d2) {
                            ok = false;
                            break;
                        }
                        local_min = std::min(local_min, dd);
                    }
                }
        if (!ok) continue;
        min_d2 = std::min(min_d2, local_min);
        std::uint64_t key = cell_key3(ix, iy, iz);
        auto& bucket = cells[key];
        if (bucket.empty()) layers[iz].push_back(key);
        bucket.push_back(p);
        ++out.count;
        if (store) stored.push_back(p);
        if (visitor) {
            dyn = p;
            visitor(dyn);
        }
    }
    out.min_distance = std::sqrt(min_d2);
    if (store) {
        out.points.resize(3, static_cast<Eigen::Index>(stored.size()));
        for (std::size_t k = 0; k < stored.size(); ++k) out.points.col(static_cast<Eigen::Index>(k)) = stored[k];
    }
    return out;
}

// Random sequential packing with a cell hash; stops after a run of rejections.
PackedPoints pack_random(int n, double kappa, std::uint64_t seed, bool store,
                         const std::function<void(const Eigen::VectorXd&)>& visitor) {
    PackedPoints out;
    out.n = n;
    out.kappa = kappa;
    const double d = 2.0 / kappa, d2 = d * d;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::map<std::vector<int>, std::vector<int>> cells;
    std::vector<Eigen::VectorXd> pts;
    const int max_rejections = 5000;
    const long long max_attempts = 5'000'000;
    double min_d2 = d2;
    int rejections = 0;
    std::vector<int> key(n), probe(n);
    for (long long attempt = 0; attempt < max_attempts && rejections < max_rejections; ++attempt) {
        Eigen::VectorXd p(n);
        if (pts.size() == 1) {
            // Offer the antipode of the first point so that any kappa >= 1 packs two.
            p = -pts[0];
        } else {
            for (int i = 0; i < n; ++i) p[i] = normal(rng);
            p.normalize();
        }
        for (int i = 0; i < n; ++i) key[i] = static_cast<int>(std::floor(p[i] / d));
        // The antipode is at distance 2 >= 2/kappa; rounding in |p| must not reject it.
        const bool antipode = pts.size() == 1;
        bool ok = true;
        double local_min = d2;
        // Visit the 3^n neighboring cells.
        int total = 1;
        for (int i = 0; i < n; ++i) total *= 3;
        for (int code = 0; code < total && ok; ++code) {
            int c = code;
            for (int i = 0; i < n; ++i) {
                probe[i] = key[i] + (c % 3) - 1;
                c /= 3;
            }
            auto it = cells.find(probe);
            if (it == cells.end()) continue;
            for (int j : it->second) {
                double dd = (pts[j] - p).squaredNorm();
                if (dd < d2 && !antipode) {
                    ok = false;
                    break;
                }
                local_min = std::min(local_min, dd);
            }
        }
        if (!ok) {
            ++rejections;
            continue;
        }
        rejections = 0;
        min_d2 = std::min(min_d2, local_min);
        cells[key].push_back(static_cast<int>(pts.size()));
        pts.push_back(p);
        if (visitor) visitor(p);
    }
    out.count = static_cast<std::int64_t>(pts.size());
    out.min_distance = std::sqrt(min_d2);
    if (store) {
        out.points.resize(n, out.count);
        for (std::size_t k = 0; k < pts.size(); ++k) out.points.col(static_cast<Eigen::Index>(k)) = pts[k];
    }
    return out;
}

// Composite Gauss-Legendre rule on the bump's smooth pieces.
GaussRule bump_rule(const BumpProfile& b, int per_panel) { return composite_gauss_legendre(b.breaks(), per_panel); }

}  // namespace

BumpProfile::BumpProfile(double kappa, double eps) : kappa_(kappa), eps_(eps) {
    if (!(kappa >= 1.0) || !std::isfinite(kappa)) throw std::invalid_argument("bump needs kappa >= 1");
    if (!(eps >= 0.0 && eps < 0.5)) throw std::invalid_argument("bump needs eps in [0, 1/2)");
    h_ = radius() / 8.0;
    total_ = antiderivative(radius());
}

std::vector<double> BumpProfile::breaks() const { return {0.0, h_, 7.0 * h_, radius()}; }

double BumpProfile::antiderivative(double r) const {
    const double R = radius(), s = 0.5 * eps_;
    if (r <= 0) return 0.0;
    if (r <= h_) return s * h_ * smoother_integral(r / h_);
    if (r <= 7.0 * h_) return s * (0.5 * h_ + (r - h_));
    if (r <= R) return s * (6.5 * h_ + h_ * (0.5 - smoother_integral((R - r) / h_)));
    return s * 7.0 * h_;
}

double BumpProfile::f(double r) const { return antiderivative(r) - total_; }

double BumpProfile::df(double r) const {
    const double R = radius(), s = 0.5 * eps_;
    if (r <= 0 || r >= R) return 0.0;
    if (r < h_) return s * smoother(r / h_);
    if (r <= 7.0 * h_) return s;
    return s * smoother((R - r) / h_);
}

double BumpProfile::ddf(double r) const {
    const double R = radius(), s = 0.5 * eps_;
    if (r <= 0 || r >= R) return 0.0;
    if (r < h_) return s * smoother_slope(r / h_) / h_;
    if (r <= 7.0 * h_) return 0.0;
    return -s * smoother_slope((R - r) / h_) / h_;
}

BumpProfile make_bump(double kappa, double eps) { return BumpProfile(kappa, eps); }

AxialProfile bump_axial_profile(const BumpProfile& bump, int n, int nodes) {
    if (bump.radius() >= kPi) throw std::invalid_argument("bump radius must be below pi");
    return AxialProfile(
        n, [bump](double t) { return AxialJet{bump.f(t), bump.df(t), bump.ddf(t)}; }, bump.breaks(), nodes);
}

PackedPoints pack_points(int n, double kappa, std::uint64_t seed, bool store_points,
                         const std::function<void(const Eigen::VectorXd&)>& visitor) {
    if (n < 3) throw std::invalid_argument("packing needs n >= 3");
    if (!(kappa >= 1.0)) throw std::invalid_argument("packing needs kappa >= 1");
    PackedPoints p = n == 3 ? pack_fibonacci(kappa, seed, store_points, visitor)
                            : pack_random(n, kappa, seed, store_points, visitor);
    p.packing_constant = static_cast<double>(p.count) / std::pow(kappa, n - 1);
    return p;
}

double bump_moment(const BumpProfile& f, int p, int q) {
    GaussRule r = bump_rule(f, 64);
    std::vector<double> terms(r.nodes.size());
    for (std::size_t i = 0; i < terms.size(); ++i)
        terms[i] = r.weights[i] * std::pow(f.df(r.nodes[i]), p) * std::pow(r.nodes[i], q);
    return pairwise_sum(terms);
}

LemmaA1Report lemma_a1_check(const BumpProfile& f, const std::function<double(double, double)>& a, int n,
                             double c_rem) {
    if (n < 3) throw std::invalid_argument("bump integral check needs n >= 3");
    const double area = sphere_area(n - 1);
    GaussRule r = bump_rule(f, 64);
    std::vector<double> terms(r.nodes.size());
    for (std::size_t i = 0; i < terms.size(); ++i) {
        double t = r.nodes[i], d = f.df(t);
        terms[i] = r.weights[i] * a(f.f(t), d * d) * f.ddf(t) * d * d * std::pow(t, n - 2);
    }
    LemmaA1Report rep;
    rep.c_rem = c_rem;
    rep.lhs = area * pairwise_sum(terms);
    rep.leading = -(n - 2) * area / 3.0 * bump_moment(f, 3, n - 3);
    rep.remainder_scale = f.eps() * std::abs(rep.leading) + bump_moment(f, 2, n - 2);
    rep.margin = c_rem * rep.remainder_scale - std::abs(rep.lhs - rep.leading);
    rep.passes = rep.margin >= 0.0;
    return rep;
}

LemmaA1Report lemma_a1_check(const BumpProfile& f, const std::function<double(double, double)>& a, int n) {
    return lemma_a1_check(f, a, n, default_tolerances().lemma_a1_c_rem);
}

Counterexample build_counterexample(int n, double eps, double kappa, std::uint64_t seed, bool store_points) {
    Counterexample c;
    c.n = n;
    c.bump = make_bump(kappa, eps);
    c.centers = pack_points(n, kappa, seed, store_points);
    const double R = c.bump.radius();
    double chord = std::min(c.centers.min_distance, 2.0);
    c.support_gap = 2.0 * std::asin(0.5 * chord) - 2.0 * R;
    if (c.support_gap < 0.0) throw std::runtime_error("bump supports overlap");
    GaussRule r = bump_rule(c.bump, 64);
    for (double t : r.nodes) c.c1_norm = std::max({c.c1_norm, std::abs(c.bump.f(t)), std::abs(c.bump.df(t))});
    c.c1_norm = std::max(c.c1_norm, std::abs(c.bump.f(0.0)));
    c.eps_size = axial_eps_size_at(bump_axial_profile(c.bump, n, 256), 0.0);
    return c;
}

double counterexample_value(const Counterexample& c, const Eigen::VectorXd& x) {
    const double R = c.bump.radius(), cosR = std::cos(R);
    double u = 0.0;
    for (Eigen::Index j = 0; j < c.centers.points.cols(); ++j) {
        double t = x.dot(c.centers.points.col(j));
        if (t <= cosR) continue;
        u += c.bump.f(std::acos(std::min(1.0, t)));
    }
    return u;
}

Eigen::VectorXd counterexample_gradient(const Counterexample& c, const Eigen::VectorXd& x) {
    const double R = c.bump.radius(), cosR = std::cos(R);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
    for (Eigen::Index j = 0; j < c.centers.points.cols(); ++j) {
        Eigen::VectorXd p = c.centers.points.col(j);
        double t = x.dot(p);
        if (t <= cosR || t >= 1.0) continue;
        double r = std::acos(t);
        // grad of the geodesic distance: -(p - t x)/sin r.
        g += -c.bump.df(r) * (p - t * x) / std::sin(r);
    }
    return g;
}

double bump_excess_zonal(const BumpProfile& bump, int n) {
    AxialProfile V = bump_axial_profile(bump, n, 128);
    GaussRule r = bump_rule(bump, 48);
    AxialCurvature k = axial_curvature_at(V, r.nodes);
    std::vector<double> terms(r.nodes.size());
    for (std::size_t i = 0; i < terms.size(); ++i)
        terms[i] = r.weights[i] * (k.H[i] * k.jacobian[i] - (n - 1)) * std::pow(std::sin(r.nodes[i]), n - 2);
    return sphere_area(n - 1) * pairwise_sum(terms);
}

double bump_excess_grid(const BumpProfile& bump, const Eigen::Vector3d& center, int radial_per_panel, int angular) {
    Eigen::Vector3d c = center.normalized();
    // Orthonormal frame (e1, e2) of the tangent plane at the center.
    Eigen::Vector3d seed = std::abs(c.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
    Eigen::Vector3d e1 = (seed - seed.dot(c) * c).normalized();
    Eigen::Vector3d e2 = c.cross(e1);
    GaussRule r = bump_rule(bump, radial_per_panel);
    const double dphi = 2.0 * kPi / angular;
    std::vector<double> ring(r.nodes.size());
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
        const double rr = r.nodes[i];
        double acc = 0.0;
        for (int k = 0; k < angular; ++k) {
            const double phi = (k + 0.5) * dphi;
            Eigen::Vector3d x = std::cos(rr) * c + std::sin(rr) * (std::cos(phi) * e1 + std::sin(phi) * e2);
            x.normalize();
            const double t = std::clamp(x.dot(c), -1.0, 1.0);
            const double d = std::acos(t), s = std::sin(d);
            Eigen::Vector3d gd = -(c - t * x) / s;  // unit tangent gradient of the distance
            const double f0 = bump.f(d), f1 = bump.df(d), f2 = bump.ddf(d);
            Eigen::Matrix3d P = Eigen::Matrix3d::Identity() - x * x.transpose();
            Eigen::Matrix3d G = gd * gd.transpose();
            Eigen::Matrix3d hess = f2 * G + f1 * (t / s) * (P - G);
            Eigen::Vector3d grad = f1 * gd;
            const double a = 1.0 + f0;
            const double g2 = grad.squaredNorm();
            const double w2 = g2 / (a * a), q = 1.0 + w2, sq = std::sqrt(q);
            const double lap = hess.trace();
            const double hgg = grad.dot(hess * grad);
            const double H = (2.0 - lap / a + w2 / q + hgg / (a * a * a * q)) / (a * sq);
            const double J = a * a * sq;
            acc += H * J - 2.0;
        }
        ring[i] = r.weights[i] * std::sin(rr) * acc * dphi;
    }
    return pairwise_sum(ring);
}

TotalHReport total_H(int n, double eps, double kappa, std::uint64_t seed, bool with_grid) {
    if (with_grid && n != 3) throw std::invalid_argument("the 2-D cap evaluation is implemented for n = 3");
    TotalHReport rep;
    rep.n = n;
    rep.eps = eps;
    rep.kappa = kappa;
    BumpProfile bump = make_bump(kappa, eps);
    std::vector<double> grid_terms;
    std::function<void(const Eigen::VectorXd&)> visitor;
    if (with_grid) visitor = [&](const Eigen::VectorXd& p) { grid_terms.push_back(bump_excess_grid(bump, p)); };
    PackedPoints centers = pack_points(n, kappa, seed, false, visitor);
    rep.q = centers.count;
    rep.support_gap = 2.0 * std::asin(0.5 * std::min(centers.min_distance, 2.0)) - 2.0 * bump.radius();
    if (rep.support_gap < 0.0) throw std::runtime_error("bump supports overlap");
    rep.per_bump_zonal = bump_excess_zonal(bump, n);
    const double base = (n - 1) * sphere_area(n);
    rep.total_zonal = base + static_cast<double>(rep.q) * rep.per_bump_zonal;
    if (with_grid) {
        rep.total_grid = base + pairwise_sum(grid_terms);
        rep.relative_gap = std::abs(rep.total_grid - rep.total_zonal) / std::max(1.0, std::abs(rep.total_zonal));
    }
    rep.eps_size = axial_eps_size_at(bump_axial_profile(bump, n, 256), 0.0);
    return rep;
}

NegativeHSearch find_negative_H(int n, double eps, std::uint64_t seed, double kappa_start, double kappa_max) {
    NegativeHSearch s;
    for (double kappa = kappa_start; kappa <= kappa_max; kappa *= 2.0) {
        TotalHReport r = total_H(n, eps, kappa, seed, false);
        s.ladder.push_back(r);
        if (r.total_zonal < -1.0) {
            s.found = true;
            s.kappa_star = kappa;
            return s;
        }
        // A flat bump never changes the total, so further rungs cannot succeed.
        if (r.per_bump_zonal == 0.0) break;
    }
    return s;
}

NegativeHSearch find_negative_H(int n, double eps, std::uint64_t seed) {
    return find_negative_H(n, eps, seed, 20.0, default_tolerances().counterexample_kappa_max);
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("line fit needs two or more points");
    const double m = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / m, my = sy / m;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r_squared = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
    return f;
}

void write_lemma_a1_csv_header(std::ostream& out) {
    out << "n,kappa,eps,lhs,leading,remainder_scale,c_rem,margin,passes\n";
}

void write_lemma_a1_csv_row(std::ostream& out, int n, double kappa, double eps, const LemmaA1Report& r) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", n, kappa, eps, r.lhs,
                  r.leading, r.remainder_scale, r.c_rem, r.margin, r.passes ? 1 : 0);
    out << buf;
}

void write_total_h_csv_header(std::ostream& out) {
    out << "n,eps,kappa,q,per_bump_zonal,total_zonal,total_grid,relative_gap,eps_size,support_gap\n";
}

void write_total_h_csv_row(std::ostream& out, const TotalHReport& r) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%lld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.n, r.eps, r.kappa,
                  static_cast<long long>(r.q), r.per_bump_zonal, r.total_zonal, r.total_grid, r.relative_gap,
                  r.eps_size, r.support_gap);
    out << buf;
}

}  // namespace quermass
