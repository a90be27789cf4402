#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

#include <json.hpp>

#include "trrsim/mac_field.hpp"
#include "trrsim/vulnerability.hpp"

namespace trrsim {

/// Offset of the MAC byte in the SPD of each generation.
std::size_t mac_byte_offset(DdrGeneration generation);

/// Decodes one MAC byte. Bits 0-3 hold the value (0b0000 untested, 0b1000
/// unlimited, 0b0001..0b0110 = 200K..700K), bits 4-5 tMAW, bit 6 is reserved
/// and bit 7 is the pTRR flag. Throws DecodeError on undefined encodings.
MacField decode_mac_byte(std::uint8_t byte);

/// Reads the MAC byte of a full SPD dump.
MacField decode_mac(std::span<const std::uint8_t> spd, DdrGeneration generation);

/// Inverse of decode_mac_byte. Throws ConfigError for unencodable fields.
std::uint8_t encode_mac(const MacField& field);

/// True when decode_mac_byte accepts the byte.
bool is_defined_mac_byte(std::uint8_t byte);

enum class Compliance : std::uint8_t { trr_compliant, ptrr_compliant, non_compliant };

std::string to_string(Compliance c);

/// ptrr_compliant: a tested MAC above the 200K minimum with the pTRR flag.
/// trr_compliant: a tested MAC without the pTRR prerequisites.
/// non_compliant: untested, or a pTRR-flagged module at the 200K minimum.
Compliance classify_compliance(const MacField& field);

/// Summary printed by the spd subcommand.
nlohmann::json describe_spd(std::span<const std::uint8_t> spd, DdrGeneration generation);

}  // namespace trrsim
