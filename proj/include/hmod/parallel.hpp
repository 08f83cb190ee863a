#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace hmod {

enum class Exec { serial, parallel };

// Thread count used by the parallel kernels; 0 leaves the OpenMP default.
void set_threads(int n);
int threads();

// Sums are split into fixed-size chunks, each chunk summed left to right and
// the chunk partials combined in index order. The result does not depend on
// the thread count.
inline constexpr std::size_t kReduceChunk = 1024;

std::complex<double> dot(const std::vector<std::complex<double>>& a,
                         const std::vector<std::complex<double>>& b, Exec exec);
double norm2(const std::vector<std::complex<double>>& a, Exec exec);

}  // namespace hmod
