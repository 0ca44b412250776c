#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <algorithm>
#include <cstdlib>
#include <vector>

namespace asq {

/// N x N truncation of Z^2 paired with the N x N physical grid on
/// [-1/2, 1/2)^2. Coefficients are stored in the real-to-complex half layout:
/// row index i2 (k2 = i2 for i2 < N/2, i2 - N otherwise) and column index
/// i1 = k1 in [0, N/2]. The entries with i1 == N/2 or i2 == N/2 are the
/// unpaired Nyquist modes k = -N/2.
class FourierLattice {
public:
  explicit FourierLattice(int n);

  int n() const noexcept { return n_; }
  int half() const noexcept { return n_ / 2 + 1; }
  std::size_t spectral_size() const noexcept {
    return static_cast<std::size_t>(n_) * static_cast<std::size_t>(half());
  }
  std::size_t physical_size() const noexcept {
    return static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_);
  }

  std::size_t index(int i2, int i1) const noexcept {
    return static_cast<std::size_t>(i2) * static_cast<std::size_t>(half()) +
           static_cast<std::size_t>(i1);
  }

  int k1(int i1) const noexcept { return i1 == n_ / 2 ? -n_ / 2 : i1; }
  int k2(int i2) const noexcept { return i2 < n_ / 2 ? i2 : i2 - n_; }
  bool nyquist1(int i1) const noexcept { return i1 == n_ / 2; }
  bool nyquist2(int i2) const noexcept { return i2 == n_ / 2; }

  /// Number of full-lattice wavevectors represented by a half-layout entry
  /// (1 on the self-conjugate columns, 2 elsewhere).
  double multiplicity(int i1) const noexcept {
    return (i1 == 0 || i1 == n_ / 2) ? 1.0 : 2.0;
  }

  double kmag(int i2, int i1) const noexcept {
    return std::hypot(static_cast<double>(k1(i1)), static_cast<double>(k2(i2)));
  }

  /// 2/3 rule: modes with max(|k1|, |k2|) > N/3 are removed from products.
  bool dealiased_out(int i2, int i1) const noexcept {
    return 3 * std::max(std::abs(k1(i1)), std::abs(k2(i2))) > n_;
  }

  /// Physical coordinate of grid index i along either axis.
  double coordinate(int i) const noexcept {
    return -0.5 + static_cast<double>(i) / static_cast<double>(n_);
  }

  /// Half-layout indices sorted by descending |k|; used for norm summation.
  const std::vector<std::size_t>& descending_order() const { return *order_; }

  friend bool operator==(const FourierLattice& a, const FourierLattice& b) noexcept {
    return a.n_ == b.n_;
  }

private:
  int n_;
  std::shared_ptr<const std::vector<std::size_t>> order_;
};

/// Minimum-image displacement on the unit torus, componentwise in [-1/2, 1/2).
inline std::array<double, 2> torus_displacement(std::array<double, 2> a,
                                                std::array<double, 2> b) noexcept {
  std::array<double, 2> d{a[0] - b[0], a[1] - b[1]};
  for (double& c : d) c -= std::floor(c + 0.5);
  return d;
}

inline double torus_distance(std::array<double, 2> a, std::array<double, 2> b) noexcept {
  const auto d = torus_displacement(a, b);
  return std::hypot(d[0], d[1]);
}

} // namespace asq
