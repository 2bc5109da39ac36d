#include "mlheat/picard.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "mlheat/parallel.hpp"
#include "mlheat/transform.hpp"

namespace mlheat {

using cd = std::complex<double>;

PicardResult picard_solve(const Field& u0, double T, int mesh_n, const MixedOperator& op,
                          const NonlinearitySpec& nl, double tol, int max_iter) {
  if (!(T > 0.0)) throw std::invalid_argument("picard_solve: T must be positive");
  if (mesh_n < 8) throw std::invalid_argument("picard_solve: mesh_n must be >= 8");
  if (!(u0.grid == op.grid())) throw std::invalid_argument("picard_solve: grid mismatch");
  if (max_iter < 1) throw std::invalid_argument("picard_solve: max_iter must be >= 1");

  const auto M = static_cast<std::size_t>(mesh_n);
  const std::size_t n = u0.size();
  const double h = T / mesh_n;
  Transformer tr(u0.grid);

  // E[k] = e^{-k h L}, k = 0..M.
  std::vector<std::vector<double>> E(M + 1, std::vector<double>(n));
  for (std::size_t k = 0; k <= M; ++k) kernels::exp_multiplier(op.symbols(), k * h, E[k]);

  std::vector<cd> u0_hat(n);
  tr.forward(u0.values, u0_hat);

  PicardResult res;
  for (std::size_t i = 0; i <= M; ++i) res.times.push_back(i * h);

  // u^0: free evolution.
  std::vector<Field> cur(M + 1, Field(u0.grid));
  std::vector<cd> acc(n);
  for (std::size_t i = 0; i <= M; ++i) {
    std::copy(u0_hat.begin(), u0_hat.end(), acc.begin());
    kernels::multiply(acc, E[i]);
    tr.inverse(acc, cur[i].values);
  }

  std::vector<std::vector<cd>> f_hat(M + 1, std::vector<cd>(n));
  std::vector<Field> next(M + 1, Field(u0.grid));
  std::vector<double> fu(n);
  for (int k = 0; k < max_iter; ++k) {
    bool finite = true;
    for (std::size_t j = 0; j <= M && finite; ++j) {
      if (eval_into(nl, cur[j].values, fu) != 0) finite = false;
      else tr.forward(fu, f_hat[j]);
    }
    if (!finite) break;

    double dist = 0.0;
    for (std::size_t i = 0; i <= M; ++i) {
      std::copy(u0_hat.begin(), u0_hat.end(), acc.begin());
      kernels::multiply(acc, E[i]);
      for (std::size_t j = 0; j <= i && i > 0; ++j) {
        const double w = (j == 0 || j == i) ? 0.5 * h : h;
        kernels::accumulate(acc, w, E[i - j], f_hat[j]);
      }
      tr.inverse(acc, next[i].values);
      dist = std::max(dist, kernels::max_abs_diff(next[i].values, cur[i].values));
    }
    std::swap(cur, next);
    res.iterations = k + 1;
    if (!res.distances.empty() && res.distances.back() > 0.0)
      res.ratios.push_back(dist / res.distances.back());
    res.distances.push_back(dist);
    if (!std::isfinite(dist)) break;
    if (dist < tol) {
      res.converged = true;
      break;
    }
  }
  res.trajectory = std::move(cur);
  return res;
}

}  // namespace mlheat
