#include "trrsim/geometry.hpp"

#include <string>

#include "trrsim/error.hpp"

namespace trrsim {

void DramGeometry::validate() const {
  if (banks < 1) throw ConfigError("geometry: banks must be >= 1");
  if (rows_per_bank < 8) throw ConfigError("geometry: rows_per_bank must be >= 8");
  if (columns_per_row < 1) throw ConfigError("geometry: columns_per_row must be >= 1");
  if (ranks < 1) throw ConfigError("geometry: ranks must be >= 1");
}

void TimingParams::validate() const {
  if (t_rc_ns <= 0) throw ConfigError("timing: t_rc_ns must be > 0");
  if (t_refi_ns <= 0) throw ConfigError("timing: t_refi_ns must be > 0");
  if (t_rfc_ns < 0) throw ConfigError("timing: t_rfc_ns must be >= 0");
  if (t_refw_ms <= 0) throw ConfigError("timing: t_refw_ms must be > 0");
  if (t_rfc_ns >= t_refi_ns) throw ConfigError("timing: t_rfc_ns must be shorter than t_refi_ns");
  if (refresh_slots < 1) throw ConfigError("timing: refresh_slots must be >= 1");
}

}  // namespace trrsim
