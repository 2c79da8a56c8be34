#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "defectscan/model.hpp"

namespace defectscan {

/// Laplace-domain spectral parameter at one real s >= 0.
///
/// h = -(s^2 + d*s + 2k) is the common diagonal of the homogeneous system
/// matrix A_h = tridiag(k, h, k), and lambda >= 0 solves h = -2k*cosh(lambda).
/// For s >= 0 the cosh argument (s^2 + d*s + 2k)/(2k) is >= 1, so lambda is
/// always real; lambda = 0 exactly at s = 0.
struct SpectralPoint {
    double s = 0.0;
    double h = 0.0;
    double lambda = 0.0;
};

/// Responses of the two masses adjacent to the defect spring, together with
/// the 2x2 system coefficients they solve:
///   F*x_{j-1} + G*x_j = -gamma*R_{j,1}
///   U*x_{j-1} + V*x_j = -gamma*R_{j-1,1}   (second row coefficients U, V)
struct DefectAdjacentPair {
    double x_jm1 = 0.0; // Laplace response of mass j-1
    double x_j = 0.0;   // Laplace response of mass j
    double f = 0.0;
    double g = 0.0;
    double u = 0.0;
    double v = 0.0;
};

/// Compute the spectral point for s >= 0. Uses a log1p-based arccosh so the
/// s -> 0 limit (lambda -> 0) is exact and large s keeps full precision.
SpectralPoint lambda_of_s(double s, const ChainConfig& chain);

/// log(sinh(x)) for x > 0 without overflow: x + log(1 - e^{-2x}) - log 2.
double log_sinh(double x);

/// Entry (m, p) of the inverse of the homogeneous system matrix
/// A_h = tridiag(k, h, k) of size n:
///
///   R_{m,p} = -sinh(min(m,p)*lambda) * sinh((n+1-max(m,p))*lambda)
///             / (k * sinh(lambda) * sinh((n+1)*lambda))
///
/// evaluated in the log domain, so nothing overflows even for
/// (n+1)*lambda ~ 1e4 (far entries underflow harmlessly to 0). The
/// lambda = 0 limit is the closed form -min*(n+1-max)/((n+1)*k).
///
/// Sign convention: R is the actual matrix inverse (A_h R = I), which is the
/// negative of the hyperbolic-ratio magnitude; with it, the defect response
/// formulas below agree identically with the direct linear solve.
double green_kernel(int m, int p, const SpectralPoint& sp, int n_masses,
                    double base_stiffness = 1.0);

/// Solve the 2x2 system for the responses of masses j-1 and j next to a
/// defect spring of stiffness k_star. With kappa = k - k_star:
///   F = kappa*(R_{j,j-1} - R_{j,j})        G = 1 + kappa*R_{j,j}
///   U = 1 + kappa*(R_{j-1,j-1} - R_{j-1,j})  V = kappa*R_{j-1,j}
///   x_{j-1} = -gamma*(R_{j-1,1}*G - R_{j,1}*V) / (GU - FV)
///   x_j     = -gamma*(R_{j,1}*U - R_{j-1,1}*F) / (GU - FV)
/// Throws NearSingularDeterminant when |GU - FV| falls below the guard.
DefectAdjacentPair defect_pair(int j, double k_star, const SpectralPoint& sp,
                               const ChainConfig& chain);

/// First-mass Laplace response of the defective chain via the Green's-kernel
/// route:
///   x1 = -gamma*R_{1,1} - kappa*(R_{1,j-1} - R_{1,j})*x_{j-1}
///        - kappa*R_{1,j}*x_j
/// Agrees with direct_solve_x1 to ~1e-12 relative; see the oracle tests.
double analytic_x1(int j, double k_star, double s, const ChainConfig& chain);

/// First-mass response of the homogeneous chain, -gamma*R_{1,1}.
double homogeneous_x1(double s, const ChainConfig& chain);

/// Assemble the full defective Laplace system and solve it directly
/// (tridiagonal elimination with partial pivoting). Diagonal is h except
/// h + k - k_star at rows j-1 and j; off-diagonals are k except the row-j
/// subdiagonal entry which is k_star; rhs is (-gamma, 0, ..., 0).
/// This is the synthetic-data generator: it shares no code path with the
/// kernel formulas above, which keeps the inversion free of inverse crime.
std::vector<double> direct_solve_response(int j, double k_star, double s,
                                          const ChainConfig& chain);

/// First component of direct_solve_response.
double direct_solve_x1(int j, double k_star, double s, const ChainConfig& chain);

/// Forward map x1(k_star) over a fixed s-grid for one candidate defect
/// location, with every k-independent quantity (lambda and the six kernel
/// entries per node) precomputed once. An inversion evaluates this thousands
/// of times per index; a single evaluation is a short branch-free loop.
class DefectResponseEvaluator {
public:
    DefectResponseEvaluator(const ChainConfig& chain, int j, std::span<const double> s_nodes);

    /// x1 at node i for defect stiffness k_star. Throws
    /// NearSingularDeterminant on a pathological point.
    double x1(double k_star, std::size_t i) const;

    std::size_t size() const { return r11g_.size(); }
    int defect_index() const { return j_; }

private:
    int j_;
    double gamma_;
    double base_k_;
    std::vector<double> r11g_;   // -gamma * R_{1,1}
    std::vector<double> r1jm1_;  // R_{1,j-1}
    std::vector<double> r1j_;    // R_{1,j}
    std::vector<double> fa_;     // R_{j,j-1} - R_{j,j}
    std::vector<double> rjj_;    // R_{j,j}
    std::vector<double> ub_;     // R_{j-1,j-1} - R_{j-1,j}
    std::vector<double> rjm1j_;  // R_{j-1,j}
};

} // namespace defectscan
