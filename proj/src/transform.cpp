#include "mlheat/transform.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace mlheat {
namespace {

// The FFTW planner is not thread-safe; execution with fftw_execute_dft is.
// FFTW_ESTIMATE keeps plan choice (and so rounding) independent of timing.
fftw_plan cached_plan(const Grid& g, int sign) {
  static std::mutex mu;
  static std::map<std::tuple<int, std::size_t, int>, fftw_plan> plans;
  std::lock_guard lock(mu);
  const auto key = std::make_tuple(g.dim(), g.n(), sign);
  if (auto it = plans.find(key); it != plans.end()) return it->second;

  std::vector<std::complex<double>> a(g.size()), b(g.size());
  const int n = static_cast<int>(g.n());
  const int dims[2] = {n, n};
  fftw_plan p = fftw_plan_dft(g.dim(), dims, reinterpret_cast<fftw_complex*>(a.data()),
                              reinterpret_cast<fftw_complex*>(b.data()), sign,
                              FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (p == nullptr) throw std::runtime_error("fftw: plan creation failed");
  plans.emplace(key, p);
  return p;
}

}  // namespace

Transformer::Transformer(const Grid& grid)
    : grid_(grid),
      forward_plan_(cached_plan(grid, FFTW_FORWARD)),
      backward_plan_(cached_plan(grid, FFTW_BACKWARD)),
      scratch_(grid.size()) {}

void Transformer::forward(std::span<const double> in, std::span<std::complex<double>> out) {
  if (in.size() != grid_.size() || out.size() != grid_.size())
    throw std::invalid_argument("transform: buffer size does not match grid");
  for (std::size_t i = 0; i < in.size(); ++i) scratch_[i] = {in[i], 0.0};
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_),
                   reinterpret_cast<fftw_complex*>(scratch_.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  const double scale = 1.0 / static_cast<double>(grid_.size());
  for (auto& c : out) c *= scale;
}

void Transformer::inverse(std::span<const std::complex<double>> in, std::span<double> out) {
  if (in.size() != grid_.size() || out.size() != grid_.size())
    throw std::invalid_argument("transform: buffer size does not match grid");
  // fftw_execute_dft does not write to its input for out-of-place c2c plans.
  auto* src = const_cast<fftw_complex*>(reinterpret_cast<const fftw_complex*>(in.data()));
  fftw_execute_dft(static_cast<fftw_plan>(backward_plan_), src,
                   reinterpret_cast<fftw_complex*>(scratch_.data()));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = scratch_[i].real();
}

SpectralField forward(const Field& field) {
  SpectralField sf(field.grid);
  Transformer(field.grid).forward(field.values, sf.coeffs);
  return sf;
}

void inverse(const SpectralField& sf, Field& out) {
  if (!(out.grid == sf.grid)) throw std::invalid_argument("inverse: grid mismatch");
  Transformer(sf.grid).inverse(sf.coeffs, out.values);
}

Field inverse(const SpectralField& sf) {
  Field out(sf.grid);
  inverse(sf, out);
  return out;
}

}  // namespace mlheat
