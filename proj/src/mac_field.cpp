#include "trrsim/mac_field.hpp"

namespace trrsim {

std::string to_string(const MacValue& v) {
  if (std::holds_alternative<MacUntested>(v)) return "untested";
  if (std::holds_alternative<MacUnlimited>(v)) return "unlimited";
  return std::to_string(std::get<MacLimit>(v).activations);
}

std::string to_string(const PtrrMode& m) {
  if (std::holds_alternative<PtrrNoAction>(m)) return "no_action";
  if (std::holds_alternative<PtrrDoubleRefresh>(m)) return "double_refresh";
  return "targeted(" + std::to_string(std::get<PtrrTargeted>(m).limit) + ")";
}

PtrrMode ptrr_controller_mode(const MacField& mac) {
  if (std::holds_alternative<MacUnlimited>(mac.value)) return PtrrNoAction{};
  if (std::holds_alternative<MacUntested>(mac.value)) return PtrrDoubleRefresh{};
  if (!mac.ptrr_flag) return PtrrDoubleRefresh{};
  const auto limit = std::get<MacLimit>(mac.value).activations;
  if (limit <= 200'000) return PtrrDoubleRefresh{};
  return PtrrTargeted{limit};
}

}  // namespace trrsim
