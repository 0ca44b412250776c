#include "asq/source_term.hpp"

#include "asq/error.hpp"

#include <cmath>
#include <memory>

namespace asq {

TimeGrid::TimeGrid(double final_time, int steps)
    : final_time_(final_time), steps_(steps), dt_(final_time / steps) {
  if (!(final_time > 0.0) || steps < 1) throw Error("TimeGrid: need T > 0 and M >= 1");
}

double temporal_bump(double t, double t_a, double t_b) {
  const double tau = (2.0 * t - t_a - t_b) / (t_b - t_a);
  if (!(std::abs(tau) < 1.0)) return 0.0;
  return std::exp(-1.0 / (1.0 - tau * tau));
}

SourceTerm::SourceTerm(FourierLattice lattice, Evaluator evaluator, double t_a, double t_b,
                       std::optional<Window> spatial_support)
    : lattice_(std::move(lattice)),
      evaluator_(std::move(evaluator)),
      t_a_(t_a),
      t_b_(t_b),
      support_(std::move(spatial_support)) {
  if (!(t_a_ <= t_b_)) throw Error("SourceTerm: temporal support must satisfy t_a <= t_b");
}

SourceTerm SourceTerm::zero(const FourierLattice& lattice) {
  return SourceTerm(lattice, [lattice](double) { return SpectralField(lattice); });
}

SourceTerm SourceTerm::steady(SpectralField profile) {
  auto lattice = profile.lattice();
  return SourceTerm(lattice, [p = std::move(profile)](double) { return p; });
}

SourceTerm SourceTerm::bump(SpectralField profile, double t_a, double t_b,
                            std::optional<Window> spatial_support) {
  if (!(t_a < t_b)) throw Error("SourceTerm::bump: need t_a < t_b");
  auto lattice = profile.lattice();
  return SourceTerm(
      lattice,
      [p = std::move(profile), t_a, t_b](double t) { return temporal_bump(t, t_a, t_b) * p; },
      t_a, t_b, std::move(spatial_support));
}

SourceTerm SourceTerm::separable(SpectralField profile, std::function<double(double)> shape,
                                 double t_a, double t_b) {
  auto lattice = profile.lattice();
  return SourceTerm(
      lattice, [p = std::move(profile), s = std::move(shape)](double t) { return s(t) * p; }, t_a,
      t_b);
}

SourceTerm SourceTerm::sampled(const TimeGrid& grid, std::vector<SpectralField> nodes,
                               std::optional<Window> spatial_support) {
  if (nodes.size() != static_cast<std::size_t>(grid.steps() + 1)) {
    throw Error("SourceTerm::sampled: need M+1 node values");
  }
  auto lattice = nodes.front().lattice();
  auto shared = std::make_shared<const std::vector<SpectralField>>(std::move(nodes));
  double first = grid.final_time();
  double last = 0.0;
  for (int m = 0; m <= grid.steps(); ++m) {
    if ((*shared)[m].max_abs() > 0.0) {
      first = std::min(first, grid.node(m));
      last = std::max(last, grid.node(m));
    }
  }
  if (first > last) first = last = 0.0;
  return SourceTerm(
      lattice,
      [shared, grid](double t) {
        const double pos = t / grid.dt();
        const long m = std::lround(pos);
        if (m < 0 || m > grid.steps() || std::abs(pos - static_cast<double>(m)) > 1e-9) {
          throw Error("sampled SourceTerm evaluated off the time grid at t=" + std::to_string(t));
        }
        return (*shared)[static_cast<std::size_t>(m)];
      },
      first, last, std::move(spatial_support));
}

SpectralField SourceTerm::operator()(double t) const {
  if (t < t_a_ || t > t_b_) return SpectralField(lattice_);
  auto f = evaluator_(t);
  require_same_lattice(f, SpectralField(lattice_), "SourceTerm");
  return f;
}

SourceTerm SourceTerm::combine(double a, const SourceTerm& other, double b) const {
  if (!(lattice_ == other.lattice_)) throw Error("SourceTerm::combine: lattice mismatch");
  auto self = *this;
  std::optional<Window> support;
  if (support_ && other.support_ && support_->center() == other.support_->center() &&
      support_->radius() == other.support_->radius()) {
    support = support_;
  }
  return SourceTerm(
      lattice_,
      [self, other, a, b](double t) {
        auto f = self(t);
        f *= a;
        f.axpy(b, other(t));
        return f;
      },
      std::min(t_a_, other.t_a_), std::max(t_b_, other.t_b_), support);
}

SourceTerm SourceTerm::scaled(double a) const {
  auto self = *this;
  return SourceTerm(
      lattice_, [self, a](double t) { return a * self(t); }, t_a_, t_b_, support_);
}

SourceTerm SourceTerm::reversed(double final_time) const {
  auto self = *this;
  return SourceTerm(
      lattice_, [self, final_time](double s) { return self(final_time - s); }, final_time - t_b_,
      final_time - t_a_, support_);
}

std::vector<SpectralField> SourceTerm::nodes(const TimeGrid& grid) const {
  std::vector<SpectralField> out;
  out.reserve(static_cast<std::size_t>(grid.steps()) + 1);
  for (int m = 0; m <= grid.steps(); ++m) out.push_back((*this)(grid.node(m)));
  return out;
}

SourceTerm operator+(const SourceTerm& a, const SourceTerm& b) { return a.combine(1.0, b, 1.0); }

} // namespace asq
