#include "ssmvc/transport.hpp"

#include <sstream>

namespace ssmvc {

namespace {

const char* kKindNames[] = {"tick",   "send",   "recv",   "drop",  "brbdel", "vbbdel",
                            "bvdel",  "decide", "propose", "bcast", "recycle", "corrupt"};

void put_u8(std::vector<std::uint8_t>& out, std::uint8_t v) { out.push_back(v); }
void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}
void put_opt_payload(std::vector<std::uint8_t>& out, const std::optional<BrbPayload>& p) {
  if (!p) {
    out.push_back(0);
    return;
  }
  out.push_back(1);
  out.push_back(p->claimed);
  out.push_back(static_cast<std::uint8_t>(p->body));
  out.push_back(p->data);
}

}  // namespace

const char* event_kind_name(EventKind k) { return kKindNames[static_cast<int>(k)]; }

std::optional<EventKind> event_kind_from(const std::string& s) {
  for (int i = 0; i < 12; ++i)
    if (s == kKindNames[i]) return static_cast<EventKind>(i);
  return std::nullopt;
}

const char* policy_name(PolicyKind k) {
  switch (k) {
    case PolicyKind::Fifo: return "fifo";
    case PolicyKind::Random: return "random";
    case PolicyKind::AdversarialDelay: return "adversarial-delay";
    case PolicyKind::UnfairThenFair: return "unfair-until-k-then-fair";
  }
  return "?";
}

std::optional<PolicyKind> policy_from(const std::string& s) {
  if (s == "fifo") return PolicyKind::Fifo;
  if (s == "random") return PolicyKind::Random;
  if (s == "adversarial-delay") return PolicyKind::AdversarialDelay;
  if (s == "unfair-until-k-then-fair") return PolicyKind::UnfairThenFair;
  return std::nullopt;
}

std::uint64_t Message::digest() const {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(16 + brb.size() * 16 + bv.size() * 2 + bc.size() * 8);
  put_u8(bytes, src);
  put_u8(bytes, dst);
  for (const auto& s : brb) {
    put_u8(bytes, s.obj);
    put_u8(bytes, static_cast<std::uint8_t>(s.phase));
    put_u8(bytes, s.column);
    put_opt_payload(bytes, s.own);
    put_opt_payload(bytes, s.echo);
    put_opt_payload(bytes, s.ready);
    put_u8(bytes, s.done ? 1 : 0);
  }
  for (const auto& s : bv) {
    put_u8(bytes, s.obj);
    put_u8(bytes, s.lvl_false);
    put_u8(bytes, s.lvl_true);
  }
  for (const auto& s : bc) {
    put_u8(bytes, s.obj);
    put_u16(bytes, s.round);
    for (const auto& r : s.rounds) {
      put_u8(bytes, r.lvl_false);
      put_u8(bytes, r.lvl_true);
      put_u8(bytes, r.aux);
    }
    put_u8(bytes, static_cast<std::uint8_t>(s.decided + 1));
  }
  return fnv1a(bytes.data(), bytes.size());
}

std::string Trace::meta_value(const std::string& k) const {
  for (const auto& [key, val] : meta)
    if (key == k) return val;
  return {};
}

std::string Trace::render() const {
  std::ostringstream os;
  for (const auto& [k, v] : meta) os << "# " << k << ' ' << v << '\n';
  for (const auto& e : events) {
    os << e.step << ' ' << e.cycle << ' ' << static_cast<int>(e.node) << ' '
       << event_kind_name(e.kind) << ' ' << static_cast<int>(e.obj) << ' '
       << static_cast<int>(e.a) << ' ' << static_cast<int>(e.b) << ' ' << e.seq << ' '
       << e.payload << '\n';
  }
  return os.str();
}

std::optional<Trace> Trace::parse(const std::string& text) {
  Trace t;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ls(line.substr(1));
      std::string k, v;
      ls >> k;
      std::getline(ls, v);
      if (!v.empty() && v[0] == ' ') v.erase(0, 1);
      t.add_meta(k, v);
      continue;
    }
    std::istringstream ls(line);
    TraceEvent e;
    std::string kind;
    long long cycle;
    int node, obj, a, b;
    if (!(ls >> e.step >> cycle >> node >> kind >> obj >> a >> b >> e.seq >> e.payload))
      return std::nullopt;
    auto k = event_kind_from(kind);
    if (!k) return std::nullopt;
    e.kind = *k;
    e.cycle = static_cast<std::int32_t>(cycle);
    e.node = static_cast<NodeId>(node);
    e.obj = static_cast<std::uint8_t>(obj);
    e.a = static_cast<std::uint8_t>(a);
    e.b = static_cast<std::uint8_t>(b);
    t.events.push_back(e);
  }
  return t;
}

}  // namespace ssmvc
