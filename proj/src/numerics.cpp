#include "quermass/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <thread>

namespace quermass {

double sphere_area(int n) {
    return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
}

double ball_volume(int n) { return sphere_area(n) / n; }

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return std::round(r);
}

int harmonic_dimension(int n, int l) {
    if (l < 0) return 0;
    if (n == 2) return l == 0 ? 1 : 2;
    if (l == 0) return 1;
    // (2l + n - 2)/l * binom(l + n - 3, l - 1)
    return static_cast<int>(std::llround((2.0 * l + n - 2) / l * binomial(l + n - 3, l - 1)));
}

double pairwise_sum(const double* x, std::size_t count) {
    if (count <= 16) {
        double s = 0.0;
        for (std::size_t i = 0; i < count; ++i) s += x[i];
        return s;
    }
    std::size_t half = count / 2;
    return pairwise_sum(x, half) + pairwise_sum(x + half, count - half);
}

double weighted_sum(const Eigen::VectorXd& w, const Eigen::VectorXd& f) {
    Eigen::VectorXd prod = w.cwiseProduct(f);
    return pairwise_sum(prod);
}

namespace {

// Orthonormal (w.r.t. the normalized weight) Gegenbauer-type polynomials
// p_0..p_m at t, together with p_m'.
struct OrthoEval {
    double pm;
    double dpm;
    double christoffel;  // sum_{k<m} p_k^2
};

OrthoEval ortho_eval(int m, const std::vector<double>& sqrt_beta, double t) {
    double p_prev = 0.0, p = 1.0;
    double d_prev = 0.0, d = 0.0;
    double ch = 0.0;
    for (int k = 0; k < m; ++k) {
        ch += p * p;
        double sb_k = k > 0 ? sqrt_beta[k] : 0.0;
        double p_next = (t * p - sb_k * p_prev) / sqrt_beta[k + 1];
        double d_next = (p + t * d - sb_k * d_prev) / sqrt_beta[k + 1];
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
    }
    return {p, d, ch};
}

}  // namespace

GaussRule gauss_gegenbauer(int m, double lambda) {
    if (m < 1) throw std::invalid_argument("gauss_gegenbauer: need at least one node");
    if (lambda <= 0.0) throw std::invalid_argument("gauss_gegenbauer: lambda must be positive");
    std::vector<double> sqrt_beta(m + 1, 0.0);
    for (int k = 1; k <= m; ++k) {
        double beta = k * (k + 2.0 * lambda - 1.0) / (4.0 * (k + lambda) * (k + lambda - 1.0));
        sqrt_beta[k] = std::sqrt(beta);
    }
    const double mu0 = std::sqrt(kPi) * std::tgamma(lambda + 0.5) / std::tgamma(lambda + 1.0);

    Eigen::VectorXd diag = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd sub(std::max(m - 1, 0));
    for (int k = 0; k + 1 < m; ++k) sub[k] = sqrt_beta[k + 1];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    std::vector<double> t(es.eigenvalues().data(), es.eigenvalues().data() + m);

    GaussRule rule;
    rule.nodes.resize(m);
    rule.weights.resize(m);
    for (int i = 0; i < m; ++i) {
        double x = t[i];
        for (int it = 0; it < 4; ++it) {
            OrthoEval e = ortho_eval(m, sqrt_beta, x);
            if (e.dpm == 0.0) break;
            double dx = e.pm / e.dpm;
            x -= dx;
            if (std::abs(dx) < 1e-17) break;
        }
        rule.nodes[i] = x;
    }
    // Enforce the reflection symmetry of the rule exactly.
    for (int i = 0; i < m / 2; ++i) {
        double a = 0.5 * (rule.nodes[m - 1 - i] - rule.nodes[i]);
        rule.nodes[i] = -a;
        rule.nodes[m - 1 - i] = a;
    }
    if (m % 2 == 1) rule.nodes[m / 2] = 0.0;
    double total = 0.0;
    for (int i = 0; i < m; ++i) {
        rule.weights[i] = mu0 / ortho_eval(m, sqrt_beta, rule.nodes[i]).christoffel;
    }
    for (int i = 0; i < m / 2; ++i) {
        double w = 0.5 * (rule.weights[i] + rule.weights[m - 1 - i]);
        rule.weights[i] = rule.weights[m - 1 - i] = w;
    }
    total = pairwise_sum(rule.weights);
    for (double& w : rule.weights) w *= mu0 / total;
    return rule;
}

GaussRule gauss_legendre(int m, double a, double b) {
    GaussRule r = gauss_gegenbauer(m, 0.5);
    double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (int i = 0; i < m; ++i) {
        r.nodes[i] = mid + half * r.nodes[i];
        r.weights[i] *= half;
    }
    return r;
}

GaussRule composite_gauss_legendre(const std::vector<double>& breaks, int per_panel) {
    GaussRule ref = gauss_legendre(per_panel);
    GaussRule out;
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        double a = breaks[p], b = breaks[p + 1];
        if (!(b > a)) continue;
        double half = 0.5 * (b - a), mid = 0.5 * (a + b);
        for (int i = 0; i < per_panel; ++i) {
            out.nodes.push_back(mid + half * ref.nodes[i]);
            out.weights.push_back(half * ref.weights[i]);
        }
    }
    return out;
}

void gegenbauer(int lmax, double alpha, double t, double* out) {
    out[0] = 1.0;
    if (lmax >= 1) out[1] = 2.0 * alpha * t;
    for (int l = 2; l <= lmax; ++l) {
        out[l] = (2.0 * t * (l + alpha - 1.0) * out[l - 1] - (l + 2.0 * alpha - 2.0) * out[l - 2]) / l;
    }
}

double gegenbauer_at_one(int l, double alpha) {
    double r = 1.0;
    for (int k = 1; k <= l; ++k) r *= (k + 2.0 * alpha - 1.0) / k;
    return r;
}

int thread_count() {
    static const int count = [] {
        int hw = static_cast<int>(std::thread::hardware_concurrency());
        if (hw <= 0) hw = 1;
        if (const char* env = std::getenv("QUERMASS_THREADS")) {
            int cap = std::atoi(env);
            if (cap > 0) hw = std::min(hw, cap);
        }
        return hw;
    }();
    return count;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    int threads = std::min<std::size_t>(thread_count(), count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= count || failed.load()) return;
                try {
                    body(i);
                } catch (...) {
                    if (!failed.exchange(true)) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Eigen::MatrixXd random_rotation(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd g(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) g(i, j) = normal(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j)
        if (r(j, j) < 0) q.col(j) = -q.col(j);
    if (q.determinant() < 0) q.col(0) = -q.col(0);
    return q;
}

}  // namespace quermass
