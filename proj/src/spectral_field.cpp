#include "asq/spectral_field.hpp"

#include "asq/error.hpp"

#include <algorithm>
#include <string>

namespace asq {

SpectralField::SpectralField(FourierLattice lattice)
    : lattice_(std::move(lattice)), coeffs_(lattice_.spectral_size(), Complex{}) {}

SpectralField::SpectralField(FourierLattice lattice, std::vector<Complex> coeffs)
    : lattice_(std::move(lattice)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != lattice_.spectral_size()) {
    throw Error("SpectralField: coefficient count does not match lattice");
  }
}

namespace {

int wrap_index(int k, int n) { return k >= 0 ? k : k + n; }

bool on_lattice(int k, int n) { return k >= -n / 2 && k < n / 2; }

} // namespace

Complex SpectralField::mode(int k1, int k2) const {
  const int n = lattice_.n();
  if (!on_lattice(k1, n) || !on_lattice(k2, n)) {
    throw Error("SpectralField::mode: wavevector outside lattice");
  }
  if (k1 == -n / 2) return at(wrap_index(k2, n), n / 2);
  if (k1 >= 0) return at(wrap_index(k2, n), k1);
  // conjugate partner; -k2 may fall off the lattice only at the Nyquist row
  const int mk2 = k2 == -n / 2 ? k2 : -k2;
  return std::conj(at(wrap_index(mk2, n), -k1));
}

void SpectralField::set_mode(int k1, int k2, Complex value) {
  const int n = lattice_.n();
  if (!on_lattice(k1, n) || !on_lattice(k2, n)) {
    throw Error("SpectralField::set_mode: wavevector outside lattice");
  }
  if (k1 < 0 && k1 != -n / 2) {
    k1 = -k1;
    k2 = k2 == -n / 2 ? k2 : -k2;
    value = std::conj(value);
  }
  const int i1 = k1 == -n / 2 ? n / 2 : k1;
  at(wrap_index(k2, n), i1) = value;
  if (i1 == 0 || i1 == n / 2) {
    const int mk2 = k2 == -n / 2 ? k2 : -k2;
    at(wrap_index(mk2, n), i1) = std::conj(value);
    if (mk2 == k2) at(wrap_index(k2, n), i1) = Complex(value.real(), 0.0);
  }
}

void SpectralField::project_hermitian() {
  const int n = lattice_.n();
  for (int i1 : {0, n / 2}) {
    for (int i2 = 0; i2 <= n / 2; ++i2) {
      const int j2 = (n - i2) % n;
      if (j2 == i2) {
        at(i2, i1) = Complex(at(i2, i1).real(), 0.0);
        continue;
      }
      const Complex avg = 0.5 * (at(i2, i1) + std::conj(at(j2, i1)));
      at(i2, i1) = avg;
      at(j2, i1) = std::conj(avg);
    }
  }
}

double SpectralField::energy() const {
  double sum = 0.0;
  const int n = lattice_.n();
  for (int i2 = 0; i2 < n; ++i2) {
    for (int i1 = 0; i1 < lattice_.half(); ++i1) {
      sum += lattice_.multiplicity(i1) * std::norm(at(i2, i1));
    }
  }
  return sum;
}

double SpectralField::max_abs() const {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same_lattice(*this, other, "SpectralField::operator+=");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same_lattice(*this, other, "SpectralField::operator-=");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

SpectralField& SpectralField::axpy(double s, const SpectralField& other) {
  require_same_lattice(*this, other, "SpectralField::axpy");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += s * other.coeffs_[i];
  return *this;
}

double inner(const SpectralField& a, const SpectralField& b) {
  require_same_lattice(a, b, "inner");
  const auto& lat = a.lattice();
  const auto ca = a.coeffs();
  const auto cb = b.coeffs();
  double sum = 0.0;
  for (int i2 = 0; i2 < lat.n(); ++i2) {
    for (int i1 = 0; i1 < lat.half(); ++i1) {
      const auto idx = lat.index(i2, i1);
      sum += lat.multiplicity(i1) * (ca[idx] * std::conj(cb[idx])).real();
    }
  }
  return sum;
}

double max_relative_difference(const SpectralField& a, const SpectralField& b) {
  require_same_lattice(a, b, "max_relative_difference");
  double diff = 0.0;
  for (std::size_t i = 0; i < a.coeffs().size(); ++i) {
    diff = std::max(diff, std::abs(a.coeffs()[i] - b.coeffs()[i]));
  }
  const double scale = b.max_abs();
  return scale > 0.0 ? diff / scale : diff;
}

void require_same_lattice(const SpectralField& a, const SpectralField& b, const char* where) {
  if (!(a.lattice() == b.lattice())) {
    throw Error(std::string(where) + ": lattice mismatch (" + std::to_string(a.n()) +
                " vs " + std::to_string(b.n()) + ")");
  }
}

} // namespace asq
