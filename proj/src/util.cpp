#include "ism/exec.hpp"
#include "ism/random.hpp"

#ifdef ISM_HAVE_OPENMP
#include <omp.h>
#endif

namespace ism {

int worker_threads() {
#ifdef ISM_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
  std::uint64_t z = root ^ (index * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::size_t sample_index(std::span<const double> weights, Rng& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  std::uniform_real_distribution<double> u(0.0, total);
  double r = u(rng);
  std::size_t last = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    last = i;
    if (r < weights[i]) return i;
    r -= weights[i];
  }
  return last;
}

std::vector<double> sample_simplex(std::size_t n, Rng& rng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> v(n);
  double s = 0.0;
  for (auto& x : v) {
    x = e(rng);
    s += x;
  }
  for (auto& x : v) x /= s;
  return v;
}

}  // namespace ism
