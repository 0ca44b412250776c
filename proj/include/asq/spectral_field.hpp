#pragma once

#include "asq/lattice.hpp"

#include <complex>
#include <span>
#include <vector>

namespace asq {

using Complex = std::complex<double>;

/// Real scalar field on the 2-torus held as truncated Fourier coefficients
/// u(x) = sum_k c(k) exp(2 pi i k.x), in the half layout of FourierLattice.
class SpectralField {
public:
  explicit SpectralField(FourierLattice lattice);
  SpectralField(FourierLattice lattice, std::vector<Complex> coeffs);

  const FourierLattice& lattice() const noexcept { return lattice_; }
  int n() const noexcept { return lattice_.n(); }

  std::span<Complex> coeffs() noexcept { return coeffs_; }
  std::span<const Complex> coeffs() const noexcept { return coeffs_; }

  Complex& at(int i2, int i1) { return coeffs_[lattice_.index(i2, i1)]; }
  const Complex& at(int i2, int i1) const { return coeffs_[lattice_.index(i2, i1)]; }

  /// Coefficient of the wavevector (k1, k2) on the full lattice, using the
  /// conjugate partner when k1 < 0.
  Complex mode(int k1, int k2) const;
  /// Sets c(k) and c(-k) = conj(c(k)).
  void set_mode(int k1, int k2, Complex value);

  Complex mean() const { return coeffs_[0]; }

  /// Projects onto Hermitian-symmetric coefficients on the self-conjugate
  /// columns k1 = 0 and k1 = -N/2 (the rest of the layout is implicit).
  void project_hermitian();

  /// Sum over the full lattice of |c(k)|^2.
  double energy() const;
  /// max over the full lattice of |c(k)|.
  double max_abs() const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s);
  /// this += s * other
  SpectralField& axpy(double s, const SpectralField& other);

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }
  friend SpectralField operator*(SpectralField a, double s) { return a *= s; }

  friend bool operator==(const SpectralField& a, const SpectralField& b) {
    return a.lattice_ == b.lattice_ && a.coeffs_ == b.coeffs_;
  }

private:
  FourierLattice lattice_;
  std::vector<Complex> coeffs_;
};

/// L2(T^2) inner product via Parseval: sum_k a(k) conj(b(k)).
double inner(const SpectralField& a, const SpectralField& b);

/// Max over the full lattice of |a(k) - b(k)| relative to max |b(k)| (absolute
/// when b is zero).
double max_relative_difference(const SpectralField& a, const SpectralField& b);

struct VectorField {
  SpectralField u1;
  SpectralField u2;
};

void require_same_lattice(const SpectralField& a, const SpectralField& b, const char* where);

} // namespace asq
