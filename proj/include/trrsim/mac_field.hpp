#pragma once

#include <cstdint>
#include <string>
#include <variant>

namespace trrsim {

/// Maximum Activate Count as advertised in the SPD.
struct MacUntested {
  friend bool operator==(MacUntested, MacUntested) = default;
};
struct MacUnlimited {
  friend bool operator==(MacUnlimited, MacUnlimited) = default;
};
struct MacLimit {
  /// 200'000 .. 700'000 in steps of 100'000.
  std::uint32_t activations = 0;
  friend bool operator==(MacLimit, MacLimit) = default;
};

using MacValue = std::variant<MacUntested, MacUnlimited, MacLimit>;

/// Decoded SPD MAC byte.
struct MacField {
  MacValue value = MacUntested{};
  /// Raw tMAW code (bits 4-5). Only code 0 (8192 x tREFI) is defined.
  std::uint8_t tmaw_code = 0;
  /// Bit 7, required by the memory controller to enable pTRR.
  bool ptrr_flag = false;

  friend bool operator==(const MacField&, const MacField&) = default;
};

std::string to_string(const MacValue& v);

/// Memory-controller reaction to the advertised MAC.
struct PtrrNoAction {
  friend bool operator==(PtrrNoAction, PtrrNoAction) = default;
};
struct PtrrDoubleRefresh {
  friend bool operator==(PtrrDoubleRefresh, PtrrDoubleRefresh) = default;
};
struct PtrrTargeted {
  std::uint32_t limit = 0;
  friend bool operator==(PtrrTargeted, PtrrTargeted) = default;
};

using PtrrMode = std::variant<PtrrNoAction, PtrrDoubleRefresh, PtrrTargeted>;

std::string to_string(const PtrrMode& m);

/// Maps a MAC field to the controller behavior: modules without the pTRR
/// flag, untested modules, and modules at the minimum 200K limit get double
/// refresh; unlimited modules get nothing; other limits get targeted refresh.
PtrrMode ptrr_controller_mode(const MacField& mac);

}  // namespace trrsim
