#include "asq/lattice.hpp"

#include "asq/error.hpp"

#include <map>
#include <mutex>
#include <numeric>
#include <string>

namespace asq {

namespace {

std::shared_ptr<const std::vector<std::size_t>> descending_order_for(int n) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const std::vector<std::size_t>>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) {
    const int half = n / 2 + 1;
    std::vector<double> mag(static_cast<std::size_t>(n) * half);
    for (int i2 = 0; i2 < n; ++i2) {
      const int k2 = i2 < n / 2 ? i2 : i2 - n;
      for (int i1 = 0; i1 < half; ++i1) {
        const int k1 = i1 == n / 2 ? -n / 2 : i1;
        mag[static_cast<std::size_t>(i2) * half + i1] = double(k1) * k1 + double(k2) * k2;
      }
    }
    std::vector<std::size_t> order(mag.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return mag[a] > mag[b]; });
    slot = std::make_shared<const std::vector<std::size_t>>(std::move(order));
  }
  return slot;
}

} // namespace

FourierLattice::FourierLattice(int n) : n_(n) {
  if (n < 16 || n % 2 != 0) {
    throw Error("FourierLattice: N must be even and >= 16, got " + std::to_string(n));
  }
  order_ = descending_order_for(n);
}

} // namespace asq
