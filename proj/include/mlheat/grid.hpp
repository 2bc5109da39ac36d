#pragma once

#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace mlheat {

/// Uniform periodic box [-L/2, L/2)^dim with n points per axis.
///
/// The box stands in for R^d; every field, norm and quadrature in the
/// library is a rectangle-rule sum over these nodes.
class Grid {
 public:
  /// Throws std::invalid_argument unless dim is 1 or 2, n is a power of
  /// two with n >= 8, and box_len > 0.
  static Grid make(int dim, std::size_t n, double box_len);

  int dim() const { return dim_; }
  std::size_t n() const { return n_; }
  double box_len() const { return box_len_; }
  double dx() const { return dx_; }
  double cell_volume() const { return cell_volume_; }
  double box_volume() const { return cell_volume_ * static_cast<double>(size()); }
  /// Total number of samples, n^dim.
  std::size_t size() const { return dim_ == 1 ? n_ : n_ * n_; }

  /// Coordinate of node j along one axis.
  double node(std::size_t j) const { return -0.5 * box_len_ + static_cast<double>(j) * dx_; }
  /// Signed wave index for storage slot k, in [-n/2, n/2).
  long signed_index(std::size_t k) const {
    return k < n_ / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n_);
  }
  /// Wave number 2*pi*k/L for storage slot k along one axis.
  double wavenumber(std::size_t k) const;
  /// |xi| for flat spectral index `flat` (row-major for dim 2).
  double wave_magnitude(std::size_t flat) const;

  bool operator==(const Grid&) const = default;

 private:
  Grid(int dim, std::size_t n, double box_len);

  int dim_ = 1;
  std::size_t n_ = 8;
  double box_len_ = 1.0;
  double dx_ = 0.125;
  double cell_volume_ = 0.125;
};

/// Real samples u(x_j) on a grid, row-major for dim 2.
struct Field {
  Grid grid;
  std::vector<double> values;

  explicit Field(const Grid& g) : grid(g), values(g.size(), 0.0) {}
  Field(const Grid& g, std::vector<double> v);

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const { return values.size(); }
};

/// Transform coefficients in FFT storage order; coeffs[0] is the field mean.
struct SpectralField {
  Grid grid;
  std::vector<std::complex<double>> coeffs;

  explicit SpectralField(const Grid& g) : grid(g), coeffs(g.size()) {}

  /// Coefficient at signed wave indices (k1) or (k1, k2); indices wrap mod n.
  std::complex<double> at(long k1, long k2 = 0) const;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Discrete L^q norm (sum |u_j|^q * cell_volume)^(1/q); q = kInf gives max |u_j|.
/// Throws std::invalid_argument for q < 1.
double lq_norm(const Field& u, double q);
double lq_norm(std::span<const double> values, double cell_volume, double q);

/// Field filled by evaluating fn at every node (fn(x) for dim 1, fn(x, y) for dim 2).
template <class Fn>
Field sample(const Grid& g, Fn&& fn) {
  Field f(g);
  if (g.dim() == 1) {
    for (std::size_t i = 0; i < g.n(); ++i) f[i] = fn(g.node(i), 0.0);
  } else {
    for (std::size_t i = 0; i < g.n(); ++i)
      for (std::size_t j = 0; j < g.n(); ++j) f[i * g.n() + j] = fn(g.node(i), g.node(j));
  }
  return f;
}

/// Cyclic shift by `shift` nodes along every axis.
Field cyclic_shift(const Field& u, long shift);

}  // namespace mlheat
