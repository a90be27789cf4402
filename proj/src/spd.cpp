#include "trrsim/spd.hpp"

#include "trrsim/error.hpp"

namespace trrsim {

namespace {

constexpr std::uint8_t kValueMask = 0x0f;
constexpr std::uint8_t kTmawShift = 4;
constexpr std::uint8_t kTmawMask = 0x30;
constexpr std::uint8_t kReservedBit = 0x40;
constexpr std::uint8_t kPtrrBit = 0x80;
constexpr std::uint8_t kUntested = 0b0000;
constexpr std::uint8_t kUnlimited = 0b1000;
constexpr std::uint32_t kLimitBase = 200'000;
constexpr std::uint32_t kLimitStep = 100'000;

std::string hex(std::uint8_t b) {
  static constexpr char digits[] = "0123456789abcdef";
  return std::string("0x") + digits[b >> 4] + digits[b & 0xf];
}

}  // namespace

std::size_t mac_byte_offset(DdrGeneration generation) { return generation == DdrGeneration::ddr3 ? 41 : 7; }

MacField decode_mac_byte(std::uint8_t byte) {
  MacField f;
  const std::uint8_t v = byte & kValueMask;
  if (v == kUntested)
    f.value = MacUntested{};
  else if (v == kUnlimited)
    f.value = MacUnlimited{};
  else if (v >= 0b0001 && v <= 0b0110)
    f.value = MacLimit{kLimitBase + (v - 1u) * kLimitStep};
  else
    throw DecodeError("MAC byte " + hex(byte) + ": undefined value nibble");
  f.tmaw_code = static_cast<std::uint8_t>((byte & kTmawMask) >> kTmawShift);
  if (f.tmaw_code != 0) throw DecodeError("MAC byte " + hex(byte) + ": undefined tMAW code");
  if (byte & kReservedBit) throw DecodeError("MAC byte " + hex(byte) + ": reserved bit 6 set");
  f.ptrr_flag = (byte & kPtrrBit) != 0;
  return f;
}

MacField decode_mac(std::span<const std::uint8_t> spd, DdrGeneration generation) {
  const auto offset = mac_byte_offset(generation);
  if (spd.size() <= offset)
    throw DecodeError("SPD dump of " + std::to_string(spd.size()) + " bytes has no byte " + std::to_string(offset));
  return decode_mac_byte(spd[offset]);
}

std::uint8_t encode_mac(const MacField& field) {
  std::uint8_t v = 0;
  if (std::holds_alternative<MacUntested>(field.value)) {
    v = kUntested;
  } else if (std::holds_alternative<MacUnlimited>(field.value)) {
    v = kUnlimited;
  } else {
    const auto a = std::get<MacLimit>(field.value).activations;
    if (a < kLimitBase || a > kLimitBase + 5 * kLimitStep || (a - kLimitBase) % kLimitStep != 0)
      throw ConfigError("MAC limit " + std::to_string(a) + " has no encoding");
    v = static_cast<std::uint8_t>(1 + (a - kLimitBase) / kLimitStep);
  }
  if (field.tmaw_code != 0) throw ConfigError("tMAW code " + std::to_string(field.tmaw_code) + " has no encoding");
  return static_cast<std::uint8_t>(v | (field.ptrr_flag ? kPtrrBit : 0));
}

bool is_defined_mac_byte(std::uint8_t byte) {
  try {
    decode_mac_byte(byte);
    return true;
  } catch (const DecodeError&) {
    return false;
  }
}

std::string to_string(Compliance c) {
  switch (c) {
    case Compliance::trr_compliant: return "trr_compliant";
    case Compliance::ptrr_compliant: return "ptrr_compliant";
    case Compliance::non_compliant: return "non_compliant";
  }
  return "non_compliant";
}

Compliance classify_compliance(const MacField& field) {
  if (std::holds_alternative<MacUntested>(field.value)) return Compliance::non_compliant;
  if (!field.ptrr_flag) return Compliance::trr_compliant;
  if (const auto* limit = std::get_if<MacLimit>(&field.value); limit && limit->activations <= kLimitBase)
    return Compliance::non_compliant;
  return Compliance::ptrr_compliant;
}

nlohmann::json describe_spd(std::span<const std::uint8_t> spd, DdrGeneration generation) {
  const auto field = decode_mac(spd, generation);
  return {{"generation", to_string(generation)},
          {"mac", to_string(field.value)},
          {"tmaw", field.tmaw_code},
          {"ptrr_flag", field.ptrr_flag},
          {"compliance", to_string(classify_compliance(field))},
          {"ptrr_mode", to_string(ptrr_controller_mode(field))}};
}

}  // namespace trrsim
