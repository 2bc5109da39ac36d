#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "mlheat/mixed_operator.hpp"

namespace mlheat {

/// Kernel values together with the quadrature's own convergence evidence.
struct KernelEvaluation {
  std::vector<double> values;
  double error_estimate = 0.0;  ///< max relative change under the last refinement
  int refinements = 0;
  bool converged = false;
};

/// P_t(x) on R^d as the continuous inverse Fourier transform of exp(-t m(xi)).
///
/// Points are coordinates for dim 1 and radii |x| for dim 2. The radial
/// integral is done with composite Gauss-Legendre panels (graded towards
/// xi = 0) and refined by panel doubling until values move by less than
/// 1e-9 relative (denominators floored at 1e-6 of the peak). Throws for t <= 0.
KernelEvaluation heat_kernel_fourier(const OperatorParams& params, int dim, double t,
                                     std::span<const double> x_points);

/// P_t(x) through the subordination representation: the analytic Gaussian
/// of the local part convolved, by real-space quadrature, with the
/// fractional heat kernel H of b(-Lap)^s tabulated independently of any
/// solver grid. Requires a > 0 and b > 0. Throws for t <= 0.
KernelEvaluation heat_kernel_subordination(const OperatorParams& params, int dim, double t,
                                           std::span<const double> x_points);

/// Fractional heat kernel H_tau^s(r) of exp(-tau |xi|^{2s}) on R^d.
/// s = 1/2 uses the Poisson kernel; other s use oscillatory quadrature.
double fractional_heat_kernel(int dim, double s, double tau, double r);

/// Mass of H_tau^s over a ball of radius `radius` plus the far-field tail,
/// integrated analytically beyond the ball (leading term tau*C_{d,s}/|y|^{d+2s}
/// and its series corrections).
double fractional_kernel_mass(int dim, double s, double tau, double radius);

/// Number of (dim, s) tables currently cached; tables are scale-free in tau.
std::size_t fractional_table_cache_size();

/// Max of |a - b| / max(|b|, floor * max|b|) over all points.
double max_relative_difference(std::span<const double> a, std::span<const double> b,
                               double floor = 1e-8);

/// CSV with columns x, kernel_fourier, kernel_subordination, abs_diff.
void write_kernel_csv(std::ostream& os, std::span<const double> x,
                      std::span<const double> fourier, std::span<const double> subordination);

}  // namespace mlheat
