#include "ssmvc/core.hpp"

#include <stdexcept>

namespace ssmvc {

Thresholds thresholds(const SystemParams& p) {
  if (p.n < 3 * p.t + 1)
    throw std::invalid_argument("n must be at least 3t+1 (n=" + std::to_string(p.n) +
                                ", t=" + std::to_string(p.t) + ")");
  if (p.n > kMaxNodes) throw std::invalid_argument("n exceeds the supported maximum");
  Thresholds th;
  th.n_minus_t = p.n - p.t;
  th.n_minus_2t = p.n - 2 * p.t;
  th.t_plus_1 = p.t + 1;
  th.two_t_plus_1 = 2 * p.t + 1;
  th.echo_quorum = (p.n + p.t) / 2 + 1;
  return th;
}

std::string value_name(Value v) {
  if (v < kMaxAlphabet) return std::string(1, static_cast<char>('A' + v));
  return "V" + std::to_string(static_cast<int>(v));
}

std::string DeliveryResult::str() const {
  switch (kind) {
    case ResultKind::Pending: return "bot";
    case ResultKind::Error: return "ERR";
    case ResultKind::Decided: return value_name(value);
  }
  return "?";
}

int equal(Value v, const Multiset& rec) {
  int c = 0;
  for (const auto& e : rec.entries())
    if (!e.is_error && e.value == v) ++c;
  return c;
}

int differ(Value v, const Multiset& rec) {
  int c = 0;
  for (const auto& e : rec.entries())
    if (e.is_error || e.value != v) ++c;
  return c;
}

}  // namespace ssmvc
