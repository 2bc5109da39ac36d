#include "mlheat/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "mlheat/parallel.hpp"

namespace mlheat {

Grid::Grid(int dim, std::size_t n, double box_len)
    : dim_(dim),
      n_(n),
      box_len_(box_len),
      dx_(box_len / static_cast<double>(n)),
      cell_volume_(dim == 1 ? dx_ : dx_ * dx_) {}

Grid Grid::make(int dim, std::size_t n, double box_len) {
  if (dim != 1 && dim != 2)
    throw std::invalid_argument("grid: dim must be 1 or 2, got " + std::to_string(dim));
  if (n < 8 || (n & (n - 1)) != 0)
    throw std::invalid_argument("grid: n must be a power of two >= 8, got " + std::to_string(n));
  if (!(box_len > 0.0) || !std::isfinite(box_len))
    throw std::invalid_argument("grid: box_len must be positive and finite");
  return Grid(dim, n, box_len);
}

double Grid::wavenumber(std::size_t k) const {
  return 2.0 * std::numbers::pi * static_cast<double>(signed_index(k)) / box_len_;
}

double Grid::wave_magnitude(std::size_t flat) const {
  if (dim_ == 1) return std::abs(wavenumber(flat));
  const double k1 = wavenumber(flat / n_);
  const double k2 = wavenumber(flat % n_);
  return std::hypot(k1, k2);
}

Field::Field(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size())
    throw std::invalid_argument("field: value count does not match grid size");
}

std::complex<double> SpectralField::at(long k1, long k2) const {
  const long n = static_cast<long>(grid.n());
  const auto wrap = [n](long k) { return static_cast<std::size_t>(((k % n) + n) % n); };
  if (grid.dim() == 1) return coeffs[wrap(k1)];
  return coeffs[wrap(k1) * grid.n() + wrap(k2)];
}

double lq_norm(std::span<const double> values, double cell_volume, double q) {
  if (!(q >= 1.0)) throw std::invalid_argument("lq_norm: q must be >= 1");
  const double m = kernels::max_abs(values);
  if (std::isinf(q) || m == 0.0 || !std::isfinite(m)) return m;
  // Scaling by the max keeps large q away from overflow.
  const double s = kernels::power_sum(values, q, m);
  return m * std::pow(s * cell_volume, 1.0 / q);
}

double lq_norm(const Field& u, double q) { return lq_norm(u.values, u.grid.cell_volume(), q); }

Field cyclic_shift(const Field& u, long shift) {
  const auto n = static_cast<long>(u.grid.n());
  const auto wrap = [n](long i) { return static_cast<std::size_t>(((i % n) + n) % n); };
  Field out(u.grid);
  if (u.grid.dim() == 1) {
    for (long i = 0; i < n; ++i) out[wrap(i + shift)] = u[static_cast<std::size_t>(i)];
  } else {
    for (long i = 0; i < n; ++i)
      for (long j = 0; j < n; ++j)
        out[wrap(i + shift) * u.grid.n() + wrap(j + shift)] =
            u[static_cast<std::size_t>(i) * u.grid.n() + static_cast<std::size_t>(j)];
  }
  return out;
}

}  // namespace mlheat
