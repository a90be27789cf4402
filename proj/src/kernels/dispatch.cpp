#include <atomic>
#include <cstdlib>
#include <cstring>

#include "trrsim/kernels.hpp"

namespace trrsim::kernels {

namespace {

Isa probe() {
#ifdef TRRSIM_HAVE_AVX2_KERNELS
  if (__builtin_cpu_supports("avx2")) return Isa::avx2;
#endif
  return Isa::scalar;
}

Isa initial() {
  // TRRSIM_ISA=scalar pins the reference kernels
  if (const char* env = std::getenv("TRRSIM_ISA"); env != nullptr && std::strcmp(env, "scalar") == 0)
    return Isa::scalar;
  return probe();
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{initial()};
  return isa;
}

}  // namespace

const char* to_string(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

Isa detected_isa() {
  static const Isa isa = probe();
  return isa;
}

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (isa == Isa::avx2 && detected_isa() != Isa::avx2) isa = Isa::scalar;
  active().store(isa, std::memory_order_relaxed);
}

std::ptrdiff_t find_u32(std::span<const std::uint32_t> haystack, std::uint32_t needle) {
#ifdef TRRSIM_HAVE_AVX2_KERNELS
  if (active_isa() == Isa::avx2) return avx2::find_u32(haystack, needle);
#endif
  return scalar::find_u32(haystack, needle);
}

void indices_at_or_above(std::span<const std::uint32_t> values, std::span<const std::uint32_t> limits,
                         std::vector<std::uint32_t>& out) {
#ifdef TRRSIM_HAVE_AVX2_KERNELS
  if (active_isa() == Isa::avx2) return avx2::indices_at_or_above(values, limits, out);
#endif
  scalar::indices_at_or_above(values, limits, out);
}

void indices_above(std::span<const double> values, double threshold, std::vector<std::size_t>& out) {
#ifdef TRRSIM_HAVE_AVX2_KERNELS
  if (active_isa() == Isa::avx2) return avx2::indices_above(values, threshold, out);
#endif
  scalar::indices_above(values, threshold, out);
}

}  // namespace trrsim::kernels
