#include "emas/ledger.hpp"

namespace emas {

std::string to_string(LedgerKind kind) {
  switch (kind) {
    case LedgerKind::spawn: return "spawn";
    case LedgerKind::birth: return "birth";
    case LedgerKind::donate: return "donate";
    case LedgerKind::transfer: return "transfer";
    case LedgerKind::death: return "death";
    case LedgerKind::migrate: return "migrate";
    case LedgerKind::final: return "final";
    case LedgerKind::end: return "end";
  }
  return "unknown";
}

std::optional<LedgerKind> parse_ledger_kind(const std::string& name) {
  for (LedgerKind k : {LedgerKind::spawn, LedgerKind::birth, LedgerKind::donate,
                       LedgerKind::transfer, LedgerKind::death, LedgerKind::migrate,
                       LedgerKind::final, LedgerKind::end})
    if (to_string(k) == name) return k;
  return std::nullopt;
}

}  // namespace emas
