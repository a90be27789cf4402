#pragma once

// Data-parallel inner loops. Each kernel has a portable scalar reference and,
// on x86-64, an AVX2 variant; the dispatching entry points pick the widest
// variant the running CPU supports. Both variants must produce identical
// results, which tests/test_kernels.cpp checks.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace trrsim::kernels {

enum class Isa { scalar, avx2 };

const char* to_string(Isa isa);

/// Widest instruction set usable on this CPU.
Isa detected_isa();

/// Instruction set the dispatching entry points currently use.
Isa active_isa();

/// Overrides dispatch (tests and benchmarks). Requesting an unsupported ISA
/// falls back to scalar.
void set_active_isa(Isa isa);

/// Position of the first element equal to needle, or -1.
std::ptrdiff_t find_u32(std::span<const std::uint32_t> haystack, std::uint32_t needle);

/// Appends every i with values[i] >= limits[i] to out, in increasing order.
void indices_at_or_above(std::span<const std::uint32_t> values, std::span<const std::uint32_t> limits,
                         std::vector<std::uint32_t>& out);

/// Appends every i with values[i] > threshold to out, in increasing order.
void indices_above(std::span<const double> values, double threshold, std::vector<std::size_t>& out);

namespace scalar {
std::ptrdiff_t find_u32(std::span<const std::uint32_t> haystack, std::uint32_t needle);
void indices_at_or_above(std::span<const std::uint32_t> values, std::span<const std::uint32_t> limits,
                         std::vector<std::uint32_t>& out);
void indices_above(std::span<const double> values, double threshold, std::vector<std::size_t>& out);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define TRRSIM_HAVE_AVX2_KERNELS 1
namespace avx2 {
std::ptrdiff_t find_u32(std::span<const std::uint32_t> haystack, std::uint32_t needle);
void indices_at_or_above(std::span<const std::uint32_t> values, std::span<const std::uint32_t> limits,
                         std::vector<std::uint32_t>& out);
void indices_above(std::span<const double> values, double threshold, std::vector<std::size_t>& out);
}  // namespace avx2
#endif

}  // namespace trrsim::kernels
