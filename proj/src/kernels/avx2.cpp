// Compiled with -mavx2; only reached after a runtime CPU check.
#include "trrsim/kernels.hpp"

#include <immintrin.h>

namespace trrsim::kernels::avx2 {

std::ptrdiff_t find_u32(std::span<const std::uint32_t> haystack, std::uint32_t needle) {
  const auto n = haystack.size();
  const auto* data = haystack.data();
  const __m256i key = _mm256_set1_epi32(static_cast<int>(needle));
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(data + i));
    const int mask = _mm256_movemask_ps(_mm256_castsi256_ps(_mm256_cmpeq_epi32(v, key)));
    if (mask != 0) return static_cast<std::ptrdiff_t>(i + static_cast<std::size_t>(__builtin_ctz(mask)));
  }
  for (; i < n; ++i) {
    if (data[i] == needle) return static_cast<std::ptrdiff_t>(i);
  }
  return -1;
}

void indices_at_or_above(std::span<const std::uint32_t> values, std::span<const std::uint32_t> limits,
                         std::vector<std::uint32_t>& out) {
  const auto n = values.size() < limits.size() ? values.size() : limits.size();
  const auto* v = values.data();
  const auto* l = limits.data();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256i a = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(v + i));
    const __m256i b = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(l + i));
    // unsigned a >= b  <=>  max(a, b) == a
    const __m256i ge = _mm256_cmpeq_epi32(_mm256_max_epu32(a, b), a);
    auto mask = static_cast<unsigned>(_mm256_movemask_ps(_mm256_castsi256_ps(ge)));
    while (mask != 0) {
      out.push_back(static_cast<std::uint32_t>(i + static_cast<std::size_t>(__builtin_ctz(mask))));
      mask &= mask - 1;
    }
  }
  for (; i < n; ++i) {
    if (v[i] >= l[i]) out.push_back(static_cast<std::uint32_t>(i));
  }
}

void indices_above(std::span<const double> values, double threshold, std::vector<std::size_t>& out) {
  const auto n = values.size();
  const auto* v = values.data();
  const __m256d t = _mm256_set1_pd(threshold);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(v + i);
    auto mask = static_cast<unsigned>(_mm256_movemask_pd(_mm256_cmp_pd(x, t, _CMP_GT_OQ)));
    while (mask != 0) {
      out.push_back(i + static_cast<std::size_t>(__builtin_ctz(mask)));
      mask &= mask - 1;
    }
  }
  for (; i < n; ++i) {
    if (v[i] > threshold) out.push_back(i);
  }
}

}  // namespace trrsim::kernels::avx2
