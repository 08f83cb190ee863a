#include "hmod/parallel.hpp"

#include <cmath>

#include <omp.h>

namespace hmod {

namespace {
int g_threads = 0;
}

void set_threads(int n) {
  g_threads = n;
  if (n > 0) omp_set_num_threads(n);
}

int threads() { return g_threads > 0 ? g_threads : omp_get_max_threads(); }

std::complex<double> dot(const std::vector<std::complex<double>>& a,
                         const std::vector<std::complex<double>>& b, Exec exec) {
  const std::size_t n = a.size();
  const std::size_t chunks = (n + kReduceChunk - 1) / kReduceChunk;
  std::vector<std::complex<double>> part(chunks);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::size_t c = 0; c < chunks; ++c) {
    std::complex<double> s = 0.0;
    const std::size_t end = std::min(n, (c + 1) * kReduceChunk);
    for (std::size_t i = c * kReduceChunk; i < end; ++i) s += std::conj(b[i]) * a[i];
    part[c] = s;
  }
  std::complex<double> s = 0.0;
  for (const auto& p : part) s += p;
  return s;
}

double norm2(const std::vector<std::complex<double>>& a, Exec exec) {
  return std::sqrt(std::max(0.0, dot(a, a, exec).real()));
}

}  // namespace hmod
