#include "trrsim/kernels.hpp"

namespace trrsim::kernels::scalar {

std::ptrdiff_t find_u32(std::span<const std::uint32_t> haystack, std::uint32_t needle) {
  for (std::size_t i = 0; i < haystack.size(); ++i) {
    if (haystack[i] == needle) return static_cast<std::ptrdiff_t>(i);
  }
  return -1;
}

void indices_at_or_above(std::span<const std::uint32_t> values, std::span<const std::uint32_t> limits,
                         std::vector<std::uint32_t>& out) {
  const auto n = values.size() < limits.size() ? values.size() : limits.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (values[i] >= limits[i]) out.push_back(static_cast<std::uint32_t>(i));
  }
}

void indices_above(std::span<const double> values, double threshold, std::vector<std::size_t>& out) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] > threshold) out.push_back(i);
  }
}

}  // namespace trrsim::kernels::scalar
