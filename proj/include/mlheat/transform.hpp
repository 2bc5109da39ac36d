#pragma once

#include <complex>
#include <span>
#include <vector>

#include "mlheat/grid.hpp"

namespace mlheat {

/// Forward DFT with the 1/n^dim factor: coeffs[0] is the mean of the field.
SpectralField forward(const Field& field);
/// Inverse of forward(); returns the real part. Throws std::invalid_argument
/// if `out` lives on a different grid.
Field inverse(const SpectralField& sf);
void inverse(const SpectralField& sf, Field& out);

/// Reusable transform pair for one grid. Owns scratch storage, so an
/// instance must not be shared between threads; create one per worker.
class Transformer {
 public:
  explicit Transformer(const Grid& grid);

  const Grid& grid() const { return grid_; }

  void forward(std::span<const double> in, std::span<std::complex<double>> out);
  /// Writes the real part of the inverse transform.
  void inverse(std::span<const std::complex<double>> in, std::span<double> out);

 private:
  Grid grid_;
  void* forward_plan_;
  void* backward_plan_;
  std::vector<std::complex<double>> scratch_;
};

}  // namespace mlheat
