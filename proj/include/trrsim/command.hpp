#pragma once

#include <cstdint>
#include <string>

#include "trrsim/geometry.hpp"

namespace trrsim {

enum class CommandKind : std::uint8_t { act, pre, ref, idle };

std::string to_string(CommandKind kind);

/// One DRAM command. Only the fields relevant to `kind` are meaningful.
struct Command {
  CommandKind kind = CommandKind::idle;
  BankIndex bank = 0;
  RowIndex row = 0;
  std::int64_t duration_ns = 0;

  static Command act(BankIndex bank, RowIndex row) { return {CommandKind::act, bank, row, 0}; }
  static Command pre(BankIndex bank) { return {CommandKind::pre, bank, 0, 0}; }
  static Command ref() { return {CommandKind::ref, 0, 0, 0}; }
  static Command idle(std::int64_t ns) { return {CommandKind::idle, 0, 0, ns}; }

  friend bool operator==(const Command&, const Command&) = default;
};

}  // namespace trrsim
