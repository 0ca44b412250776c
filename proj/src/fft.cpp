#include "asq/fft.hpp"

#include "asq/error.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace asq {

namespace {

// Plans are created once per size under a lock and executed through the
// new-array interface.
struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

const PlanPair& plans_for(int n) {
  static std::mutex mutex;
  static std::map<int, PlanPair> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  const std::size_t real_size = static_cast<std::size_t>(n) * n;
  const std::size_t cplx_size = static_cast<std::size_t>(n) * (n / 2 + 1);
  double* r = fftw_alloc_real(real_size);
  fftw_complex* c = fftw_alloc_complex(cplx_size);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair p;
  p.forward = fftw_plan_dft_r2c_2d(n, n, r, c, flags);
  // c2r overwrites its input; callers pass a scratch copy.
  p.backward = fftw_plan_dft_c2r_2d(n, n, c, r, flags);
  fftw_free(r);
  fftw_free(c);
  return cache.emplace(n, p).first->second;
}

// (-1)^(k1 + k2) from the grid offset -1/2, by storage index parity.
inline double shift_sign(int i2, int i1) { return ((i1 + i2) & 1) ? -1.0 : 1.0; }

} // namespace

double PhysicalGrid::integral() const {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double PhysicalGrid::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

PhysicalGrid to_physical(const SpectralField& field) {
  return to_physical_padded(field, field.n());
}

PhysicalGrid to_physical_padded(const SpectralField& field, int m) {
  const auto& lat = field.lattice();
  const int n = lat.n();
  if (m < n || m % 2 != 0) throw Error("to_physical_padded: target grid must be even and >= N");
  const int mh = m / 2 + 1;
  std::vector<Complex> buf(static_cast<std::size_t>(m) * mh, Complex{});

  auto put = [&](int k2, int k1, Complex v) {
    const int j2 = k2 >= 0 ? k2 : k2 + m;
    buf[static_cast<std::size_t>(j2) * mh + k1] += v * shift_sign(j2, k1);
  };
  for (int i2 = 0; i2 < n; ++i2) {
    for (int i1 = 0; i1 < lat.half(); ++i1) {
      Complex v = field.at(i2, i1);
      const int k2 = lat.k2(i2);
      const bool nyq1 = lat.nyquist1(i1);
      const bool nyq2 = lat.nyquist2(i2);
      if (m == n || (!nyq1 && !nyq2)) {
        // at m == n the Nyquist entries stay where they are
        put(k2, nyq1 ? n / 2 : i1, v);
        continue;
      }
      // split an unpaired mode into its symmetric pair
      const int k1abs = nyq1 ? n / 2 : i1;
      if (nyq2) {
        put(-n / 2, k1abs, 0.5 * v);
        put(n / 2, k1abs, 0.5 * v);
      } else {
        put(k2, k1abs, v);
      }
    }
  }
  if (m > n) {
    // k1 = N/2 column: halved, its -N/2 partner is carried by the Hermitian
    // extension.
    for (int j2 = 0; j2 < m; ++j2) buf[static_cast<std::size_t>(j2) * mh + n / 2] *= 0.5;
  }

  PhysicalGrid out(m);
  fftw_execute_dft_c2r(plans_for(m).backward, reinterpret_cast<fftw_complex*>(buf.data()),
                       out.values.data());
  return out;
}

SpectralField to_spectral(const PhysicalGrid& grid, const FourierLattice& lattice) {
  const int n = lattice.n();
  if (grid.n != n || grid.values.size() != lattice.physical_size()) {
    throw Error("to_spectral: grid is " + std::to_string(grid.n) + "x" + std::to_string(grid.n) +
                ", lattice expects " + std::to_string(n) + "x" + std::to_string(n));
  }
  SpectralField out(lattice);
  std::vector<double> in = grid.values;
  fftw_execute_dft_r2c(plans_for(n).forward, in.data(),
                       reinterpret_cast<fftw_complex*>(out.coeffs().data()));
  const double scale = 1.0 / static_cast<double>(lattice.physical_size());
  for (int i2 = 0; i2 < n; ++i2) {
    for (int i1 = 0; i1 < lattice.half(); ++i1) out.at(i2, i1) *= scale * shift_sign(i2, i1);
  }
  out.project_hermitian();
  return out;
}

PhysicalGrid sample(int n, const std::function<double(double, double)>& fn) {
  PhysicalGrid g(n);
  for (int i2 = 0; i2 < n; ++i2) {
    const double x2 = -0.5 + static_cast<double>(i2) / n;
    for (int i1 = 0; i1 < n; ++i1) g(i2, i1) = fn(-0.5 + static_cast<double>(i1) / n, x2);
  }
  return g;
}

SpectralField sample_spectral(const FourierLattice& lattice,
                              const std::function<double(double, double)>& fn) {
  return to_spectral(sample(lattice.n(), fn), lattice);
}

SpectralField multiply_pointwise(const SpectralField& field, const PhysicalGrid& weight) {
  auto g = to_physical(field);
  if (weight.n != g.n) throw Error("multiply_pointwise: grid size mismatch");
  for (std::size_t i = 0; i < g.values.size(); ++i) g.values[i] *= weight.values[i];
  return to_spectral(g, field.lattice());
}

} // namespace asq
