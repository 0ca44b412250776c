#include "asq/window.hpp"

#include "asq/error.hpp"

#include <cmath>

namespace asq {

double smooth_step_down(double t) {
  if (t <= 0.0) return 1.0;
  if (t >= 1.0) return 0.0;
  const double t4 = t * t * t * t;
  return 1.0 - t4 * (35.0 - t * (84.0 - t * (70.0 - 20.0 * t)));
}

Window::Window(std::array<double, 2> center, double radius) : center_(center), radius_(radius) {
  if (!(radius > 0.0 && radius < 0.25)) throw Error("Window: radius must lie in (0, 1/4)");
}

double Window::mask_at(double x1, double x2) const {
  const double d = torus_distance({x1, x2}, center_);
  return smooth_step_down((d - 0.5 * radius_) / (0.5 * radius_));
}

double Window::exterior_at(double x1, double x2) const {
  const double d = torus_distance({x1, x2}, center_);
  return 1.0 - smooth_step_down((d - radius_) / (0.5 * radius_));
}

double Window::plateau_at(double x1, double x2) const {
  return torus_distance({x1, x2}, center_) <= 0.5 * radius_ ? 1.0 : 0.0;
}

PhysicalGrid Window::mask(int n) const {
  return sample(n, [this](double a, double b) { return mask_at(a, b); });
}

PhysicalGrid Window::exterior_mask(int n) const {
  return sample(n, [this](double a, double b) { return exterior_at(a, b); });
}

PhysicalGrid Window::plateau(int n) const {
  return sample(n, [this](double a, double b) { return plateau_at(a, b); });
}

PhysicalGrid Window::support(int n) const {
  return sample(n, [this](double a, double b) { return mask_at(a, b) > 0.0 ? 1.0 : 0.0; });
}

bool Window::contains_disk(std::array<double, 2> c, double r) const {
  return torus_distance(c, center_) + r <= 0.5 * radius_;
}

bool Window::avoids_disk(std::array<double, 2> c, double r) const {
  return torus_distance(c, center_) - r > radius_;
}

double spectral_tail(const SpectralField& field) {
  const auto& lat = field.lattice();
  const double kmax = lat.kmag(lat.n() / 2, lat.n() / 2);
  double tail = 0.0;
  for (int i2 = 0; i2 < lat.n(); ++i2) {
    for (int i1 = 0; i1 < lat.half(); ++i1) {
      if (lat.kmag(i2, i1) >= kmax - 1e-12) tail = std::max(tail, std::abs(field.at(i2, i1)));
    }
  }
  return tail;
}

} // namespace asq
