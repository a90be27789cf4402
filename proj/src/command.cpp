#include "trrsim/command.hpp"

namespace trrsim {

std::string to_string(CommandKind kind) {
  switch (kind) {
    case CommandKind::act: return "ACT";
    case CommandKind::pre: return "PRE";
    case CommandKind::ref: return "REF";
    case CommandKind::idle: return "IDLE";
  }
  return "IDLE";
}

}  // namespace trrsim
