#include "asq/spectral_ops.hpp"

#include "asq/error.hpp"

#include <cmath>
#include <numbers>

namespace asq {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

void require_compatible(const SpectralField& field, const MultiplierSpec& spec) {
  if (!spec.compatible(field.lattice())) {
    throw Error("multiplier " + spec.name() + " validated on N=" +
                std::to_string(spec.validated_n()) + " but field has N=" +
                std::to_string(field.n()));
  }
}

} // namespace

SpectralField fractional_laplacian(const SpectralField& field, double r) {
  if (!(r >= 0.0)) throw Error("fractional_laplacian: exponent must be >= 0");
  if (r == 0.0) return field;
  SpectralField out = field;
  const auto& lat = field.lattice();
  for (int i2 = 0; i2 < lat.n(); ++i2) {
    for (int i1 = 0; i1 < lat.half(); ++i1) {
      const double k = lat.kmag(i2, i1);
      out.at(i2, i1) *= k == 0.0 ? 0.0 : std::pow(two_pi * k, 2.0 * r);
    }
  }
  return out;
}

double sobolev_norm(const SpectralField& field, double r, SobolevKind kind) {
  const auto& lat = field.lattice();
  const int half = lat.half();
  double sum = 0.0;
  for (std::size_t idx : lat.descending_order()) {
    const int i2 = static_cast<int>(idx / half);
    const int i1 = static_cast<int>(idx % half);
    const double k2 = lat.kmag(i2, i1) * lat.kmag(i2, i1);
    double w;
    if (kind == SobolevKind::homogeneous) {
      if (k2 == 0.0) continue;
      w = std::pow(k2, r);
    } else {
      w = std::pow(1.0 + k2, r);
    }
    sum += lat.multiplicity(i1) * w * std::norm(field.coeffs()[idx]);
  }
  return std::sqrt(sum);
}

SpectralField apply_symbol(const SpectralField& field, const Symbol& symbol) {
  SpectralField out = field;
  const auto& lat = field.lattice();
  for (int i2 = 0; i2 < lat.n(); ++i2) {
    for (int i1 = 0; i1 < lat.half(); ++i1) out.at(i2, i1) *= symbol(lat.k1(i1), lat.k2(i2));
  }
  out.at(0, 0) = 0.0;
  return out;
}

SpectralField apply_multiplier(const SpectralField& field, const MultiplierSpec& spec) {
  require_compatible(field, spec);
  return apply_symbol(field, spec.symbol());
}

SpectralField derivative(const SpectralField& field, int axis) {
  if (axis != 1 && axis != 2) throw Error("derivative: axis must be 1 or 2");
  SpectralField out = field;
  const auto& lat = field.lattice();
  for (int i2 = 0; i2 < lat.n(); ++i2) {
    for (int i1 = 0; i1 < lat.half(); ++i1) {
      const bool nyq = axis == 1 ? lat.nyquist1(i1) : lat.nyquist2(i2);
      const double k = axis == 1 ? lat.k1(i1) : lat.k2(i2);
      out.at(i2, i1) *= nyq ? Complex{} : Complex(0.0, two_pi * k);
    }
  }
  return out;
}

VectorField gradient(const SpectralField& field) {
  return {derivative(field, 1), derivative(field, 2)};
}

VectorField perp_gradient(const SpectralField& field) {
  return {-1.0 * derivative(field, 2), derivative(field, 1)};
}

VectorField velocity(const SpectralField& field, const Symbol& symbol) {
  return perp_gradient(apply_symbol(field, symbol));
}

VectorField velocity(const SpectralField& field, const MultiplierSpec& spec) {
  require_compatible(field, spec);
  return velocity(field, spec.symbol());
}

double spectral_divergence(const VectorField& u) {
  require_same_lattice(u.u1, u.u2, "spectral_divergence");
  const auto& lat = u.u1.lattice();
  double m = 0.0;
  for (int i2 = 0; i2 < lat.n(); ++i2) {
    for (int i1 = 0; i1 < lat.half(); ++i1) {
      const Complex d = two_pi * (double(lat.k1(i1)) * u.u1.at(i2, i1) +
                                  double(lat.k2(i2)) * u.u2.at(i2, i1));
      m = std::max(m, std::abs(d));
    }
  }
  return m;
}

SpectralField dealias(SpectralField field) {
  const auto& lat = field.lattice();
  for (int i2 = 0; i2 < lat.n(); ++i2) {
    for (int i1 = 0; i1 < lat.half(); ++i1) {
      if (lat.dealiased_out(i2, i1)) field.at(i2, i1) = 0.0;
    }
  }
  return field;
}

SpectralField transport(const SpectralField& a, const SpectralField& b, const Symbol& symbol,
                        double* max_speed) {
  require_same_lattice(a, b, "transport");
  const auto u = velocity(dealias(a), symbol);
  const auto g = gradient(dealias(b));
  const auto u1 = to_physical(u.u1);
  const auto u2 = to_physical(u.u2);
  const auto g1 = to_physical(g.u1);
  const auto g2 = to_physical(g.u2);
  PhysicalGrid prod(a.n());
  for (std::size_t i = 0; i < prod.values.size(); ++i) {
    prod.values[i] = u1.values[i] * g1.values[i] + u2.values[i] * g2.values[i];
  }
  if (max_speed) {
    double s2 = 0.0;
    for (std::size_t i = 0; i < prod.values.size(); ++i) {
      s2 = std::max(s2, u1.values[i] * u1.values[i] + u2.values[i] * u2.values[i]);
    }
    *max_speed = std::sqrt(s2);
  }
  auto out = dealias(to_spectral(prod, a.lattice()));
  out.at(0, 0) = 0.0;
  return out;
}

SpectralField advection_term(const SpectralField& theta, const MultiplierSpec& spec) {
  require_compatible(theta, spec);
  return transport(theta, theta, spec.symbol());
}

double kernel_physical(const Symbol& symbol, int n, std::array<double, 2> x) {
  const double r1 = x[0] - std::round(x[0]);
  const double r2 = x[1] - std::round(x[1]);
  if (r1 == 0.0 && r2 == 0.0) throw Error("kernel_physical: evaluation at the singularity x = 0");
  double sum = 0.0;
  for (int k2 = -n / 2; k2 < n / 2; ++k2) {
    for (int k1 = -n / 2; k1 < n / 2; ++k1) {
      if (k1 == 0 && k2 == 0) continue;
      sum += symbol(k1, k2) * std::cos(two_pi * (k1 * x[0] + k2 * x[1]));
    }
  }
  return sum;
}

double kernel_physical(const MultiplierSpec& spec, int n, std::array<double, 2> x) {
  if (n > spec.validated_n()) throw Error("kernel_physical: lattice larger than validated");
  return kernel_physical(spec.symbol(), n, x);
}

double triple_integral(const SpectralField& a, const SpectralField& b, const SpectralField& c) {
  require_same_lattice(a, b, "triple_integral");
  require_same_lattice(a, c, "triple_integral");
  const int m = 2 * a.n();
  const auto pa = to_physical_padded(a, m);
  const auto pb = to_physical_padded(b, m);
  const auto pc = to_physical_padded(c, m);
  double sum = 0.0;
  for (std::size_t i = 0; i < pa.values.size(); ++i) {
    sum += pa.values[i] * pb.values[i] * pc.values[i];
  }
  return sum / static_cast<double>(pa.values.size());
}

SpectralField strip_nyquist(SpectralField field) {
  const auto& lat = field.lattice();
  for (int i2 = 0; i2 < lat.n(); ++i2) {
    for (int i1 = 0; i1 < lat.half(); ++i1) {
      if (lat.nyquist1(i1) || lat.nyquist2(i2)) field.at(i2, i1) = 0.0;
    }
  }
  return field;
}

} // namespace asq
