#include "defectscan/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "defectscan/errors.hpp"

namespace defectscan {

namespace {

constexpr double kDetGuard = 1e-280;
constexpr double kPivotGuard = 1e-300;
constexpr double kLog2 = 0.6931471805599453094172321214582;

void check_forward_args(int j, double k_star, double s, const ChainConfig& chain) {
    if (s < 0.0) throw std::invalid_argument("spectral: s must be >= 0");
    if (j < 2 || j > chain.n_masses)
        throw std::invalid_argument("spectral: defect index must be in [2, N], got " +
                                    std::to_string(j));
    if (!(k_star > 0.0)) throw std::invalid_argument("spectral: k_star must be > 0");
}

// Tridiagonal solve with partial pivoting (fill-in limited to a second
// superdiagonal). lower[i] couples row i to i-1, upper[i] row i to i+1.
std::vector<double> solve_tridiagonal(std::vector<double> lower, std::vector<double> diag,
                                      std::vector<double> upper, std::vector<double> rhs) {
    const std::size_t n = diag.size();
    if (n == 1) {
        if (std::abs(diag[0]) < kPivotGuard) throw SingularMatrix("direct solve: zero pivot");
        return {rhs[0] / diag[0]};
    }
    std::vector<double> upper2(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(lower[i + 1]) > std::abs(diag[i])) {
            std::swap(diag[i], lower[i + 1]);
            std::swap(upper[i], diag[i + 1]);
            if (i + 2 < n) std::swap(upper2[i], upper[i + 1]);
            std::swap(rhs[i], rhs[i + 1]);
        }
        if (std::abs(diag[i]) < kPivotGuard)
            throw SingularMatrix("direct solve: zero pivot at row " + std::to_string(i));
        const double w = lower[i + 1] / diag[i];
        diag[i + 1] -= w * upper[i];
        if (i + 2 < n) upper[i + 1] -= w * upper2[i];
        rhs[i + 1] -= w * rhs[i];
    }
    if (std::abs(diag[n - 1]) < kPivotGuard)
        throw SingularMatrix("direct solve: zero pivot at last row");

    std::vector<double> x(n);
    x[n - 1] = rhs[n - 1] / diag[n - 1];
    if (n >= 2) x[n - 2] = (rhs[n - 2] - upper[n - 2] * x[n - 1]) / diag[n - 2];
    for (std::size_t ip1 = n - 2; ip1 >= 1; --ip1) {
        const std::size_t i = ip1 - 1;
        x[i] = (rhs[i] - upper[i] * x[i + 1] - upper2[i] * x[i + 2]) / diag[i];
    }
    return x;
}

struct KernelRow {
    double r11, r1jm1, r1j, rjm1jm1, rjm1j, rjj;
};

KernelRow kernel_entries(int j, const SpectralPoint& sp, int n, double k) {
    KernelRow r;
    r.r11 = green_kernel(1, 1, sp, n, k);
    r.r1jm1 = green_kernel(1, j - 1, sp, n, k);
    r.r1j = green_kernel(1, j, sp, n, k);
    r.rjm1jm1 = green_kernel(j - 1, j - 1, sp, n, k);
    r.rjm1j = green_kernel(j - 1, j, sp, n, k);
    r.rjj = green_kernel(j, j, sp, n, k);
    return r;
}

} // namespace

SpectralPoint lambda_of_s(double s, const ChainConfig& chain) {
    if (s < 0.0) throw std::invalid_argument("lambda_of_s: s must be >= 0");
    const double k = chain.base_stiffness;
    const double q = s * s + chain.damping * s; // >= 0
    SpectralPoint sp;
    sp.s = s;
    sp.h = -(q + 2.0 * k);
    // arccosh(1 + u) with u = q/(2k), exact at u = 0 and stable for small u.
    const double u = q / (2.0 * k);
    sp.lambda = std::log1p(u + std::sqrt(u * (u + 2.0)));
    return sp;
}

double log_sinh(double x) {
    // x + log(1 - e^{-2x}) - log 2, with expm1 keeping small x accurate.
    return x + std::log(-std::expm1(-2.0 * x)) - kLog2;
}

double green_kernel(int m, int p, const SpectralPoint& sp, int n_masses,
                    double base_stiffness) {
    if (m < 1 || m > n_masses || p < 1 || p > n_masses)
        throw std::invalid_argument("green_kernel: indices out of range");
    const double lam = sp.lambda;
    const double a = static_cast<double>(std::min(m, p));
    const double b = static_cast<double>(n_masses + 1 - std::max(m, p));
    const double np1 = static_cast<double>(n_masses + 1);
    if (lam <= 0.0) return -(a * b) / (np1 * base_stiffness);
    const double log_mag = log_sinh(a * lam) + log_sinh(b * lam) - log_sinh(lam) -
                           log_sinh(np1 * lam);
    return -std::exp(log_mag) / base_stiffness;
}

DefectAdjacentPair defect_pair(int j, double k_star, const SpectralPoint& sp,
                               const ChainConfig& chain) {
    check_forward_args(j, k_star, sp.s, chain);
    const int n = chain.n_masses;
    const double k = chain.base_stiffness;
    const double gamma = chain.impulse;
    const double kappa = k - k_star;
    const KernelRow r = kernel_entries(j, sp, n, k);

    DefectAdjacentPair out;
    out.f = kappa * (r.rjm1j - r.rjj); // R_{j,j-1} = R_{j-1,j} by symmetry
    out.g = 1.0 + kappa * r.rjj;
    out.u = 1.0 + kappa * (r.rjm1jm1 - r.rjm1j);
    out.v = kappa * r.rjm1j;
    const double det = out.g * out.u - out.f * out.v;
    if (std::abs(det) < kDetGuard)
        throw NearSingularDeterminant("defect_pair: |GU - FV| = " + std::to_string(det) +
                                      " at s = " + std::to_string(sp.s));
    out.x_jm1 = -gamma * (r.r1jm1 * out.g - r.r1j * out.v) / det;
    out.x_j = -gamma * (r.r1j * out.u - r.r1jm1 * out.f) / det;
    return out;
}

double analytic_x1(int j, double k_star, double s, const ChainConfig& chain) {
    check_forward_args(j, k_star, s, chain);
    const SpectralPoint sp = lambda_of_s(s, chain);
    const double k = chain.base_stiffness;
    const double kappa = k - k_star;
    const DefectAdjacentPair pair = defect_pair(j, k_star, sp, chain);
    const double r11 = green_kernel(1, 1, sp, chain.n_masses, k);
    const double r1jm1 = green_kernel(1, j - 1, sp, chain.n_masses, k);
    const double r1j = green_kernel(1, j, sp, chain.n_masses, k);
    return -chain.impulse * r11 - kappa * (r1jm1 - r1j) * pair.x_jm1 -
           kappa * r1j * pair.x_j;
}

double homogeneous_x1(double s, const ChainConfig& chain) {
    const SpectralPoint sp = lambda_of_s(s, chain);
    return -chain.impulse * green_kernel(1, 1, sp, chain.n_masses, chain.base_stiffness);
}

std::vector<double> direct_solve_response(int j, double k_star, double s,
                                          const ChainConfig& chain) {
    check_forward_args(j, k_star, s, chain);
    const std::size_t n = static_cast<std::size_t>(chain.n_masses);
    const double k = chain.base_stiffness;
    const SpectralPoint sp = lambda_of_s(s, chain);

    std::vector<double> lower(n, k), diag(n, sp.h), upper(n, k), rhs(n, 0.0);
    diag[j - 2] = sp.h + k - k_star; // row j-1
    diag[j - 1] = sp.h + k - k_star; // row j
    lower[j - 1] = k_star;           // A_{j,j-1}
    rhs[0] = -chain.impulse;
    return solve_tridiagonal(std::move(lower), std::move(diag), std::move(upper),
                             std::move(rhs));
}

double direct_solve_x1(int j, double k_star, double s, const ChainConfig& chain) {
    return direct_solve_response(j, k_star, s, chain)[0];
}

DefectResponseEvaluator::DefectResponseEvaluator(const ChainConfig& chain, int j,
                                                 std::span<const double> s_nodes)
    : j_(j), gamma_(chain.impulse), base_k_(chain.base_stiffness) {
    if (j < 2 || j > chain.n_masses)
        throw std::invalid_argument("DefectResponseEvaluator: defect index out of range");
    const std::size_t m = s_nodes.size();
    r11g_.resize(m);
    r1jm1_.resize(m);
    r1j_.resize(m);
    fa_.resize(m);
    rjj_.resize(m);
    ub_.resize(m);
    rjm1j_.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const SpectralPoint sp = lambda_of_s(s_nodes[i], chain);
        const KernelRow r = kernel_entries(j, sp, chain.n_masses, base_k_);
        r11g_[i] = -gamma_ * r.r11;
        r1jm1_[i] = r.r1jm1;
        r1j_[i] = r.r1j;
        fa_[i] = r.rjm1j - r.rjj;
        rjj_[i] = r.rjj;
        ub_[i] = r.rjm1jm1 - r.rjm1j;
        rjm1j_[i] = r.rjm1j;
    }
}

double DefectResponseEvaluator::x1(double k_star, std::size_t i) const {
    const double kappa = base_k_ - k_star;
    const double f = kappa * fa_[i];
    const double g = 1.0 + kappa * rjj_[i];
    const double u = 1.0 + kappa * ub_[i];
    const double v = kappa * rjm1j_[i];
    const double det = g * u - f * v;
    if (std::abs(det) < kDetGuard)
        throw NearSingularDeterminant("DefectResponseEvaluator: near-singular determinant");
    const double inv = gamma_ / det;
    const double x_jm1 = -(r1jm1_[i] * g - r1j_[i] * v) * inv;
    const double x_j = -(r1j_[i] * u - r1jm1_[i] * f) * inv;
    return r11g_[i] - kappa * ((r1jm1_[i] - r1j_[i]) * x_jm1 + r1j_[i] * x_j);
}

} // namespace defectscan
