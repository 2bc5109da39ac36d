#pragma once

#include <vector>

#include "mlheat/grid.hpp"
#include "mlheat/mixed_operator.hpp"
#include "mlheat/nonlinearity.hpp"

namespace mlheat {

struct PicardResult {
  std::vector<double> times;     ///< t_i = i T / mesh_n, i = 0..mesh_n
  std::vector<Field> trajectory;  ///< final iterate at each t_i
  std::vector<double> distances;  ///< sup_{i,x} |u^{k+1}(t_i) - u^k(t_i)|, k = 0, 1, ...
  std::vector<double> ratios;     ///< distances[k+1] / distances[k]
  int iterations = 0;
  bool converged = false;
};

/// Fixed-point iteration of the Duhamel map on a uniform mesh of [0, T]:
/// u^{k+1}(t_i) = e^{-t_i L} u0 + sum_j w_ij e^{-(t_i - t_j) L} f(u^k(t_j)),
/// trapezoid weights on [0, t_i], started from the free evolution. Stops when
/// the sup-norm distance drops below tol or after max_iter iterations;
/// non-convergence is reported, not thrown. Throws for T <= 0 or mesh_n < 8.
PicardResult picard_solve(const Field& u0, double T, int mesh_n, const MixedOperator& op,
                          const NonlinearitySpec& nl, double tol = 1e-12, int max_iter = 100);

}  // namespace mlheat
