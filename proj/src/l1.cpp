#include "polmod/l1.hpp"

#include <stdexcept>

namespace polmod {

L1Vector L1Vector::from_entries(
    RingPtr ring, const std::vector<std::pair<std::size_t, RingElement>>& entries) {
  L1Vector v(std::move(ring));
  for (const auto& [k, e] : entries) {
    if (v.entries_.count(k)) throw std::invalid_argument("l1: duplicate index in entries");
    v.set(k, e);
  }
  return v;
}

void L1Vector::set(std::size_t k, const RingElement& v) {
  if (ring_->is_zero(v)) {
    entries_.erase(k);
  } else {
    entries_[k] = v;
  }
}

nlohmann::ordered_json L1Vector::to_json() const {
  nlohmann::ordered_json j;
  j["ring"] = ring_->descriptor();
  auto arr = nlohmann::ordered_json::array();
  for (const auto& [k, e] : entries_) arr.push_back({k, ring_->format(e)});
  j["entries"] = arr;
  return j;
}

L1Vector L1Vector::from_json(const nlohmann::json& j) {
  return from_json(make_ring(j.at("ring")), j.at("entries"));
}

L1Vector L1Vector::from_json(RingPtr ring, const nlohmann::json& entries) {
  L1Vector v(ring);
  for (const auto& entry : entries) {
    if (!entry.is_array() || entry.size() != 2) {
      throw std::invalid_argument("l1: entries must be [index, element] pairs");
    }
    std::size_t k = entry.at(0).get<std::size_t>();
    auto e = ring->parse(entry.at(1).get<std::string>());
    if (!e) throw std::invalid_argument("l1: unparseable element");
    if (v.entries().count(k)) throw std::invalid_argument("l1: duplicate index in entries");
    v.set(k, *e);
  }
  return v;
}

L1NormResult l1_norm(const L1Vector& v, const NormBall& ball) {
  Rat total = 0;
  for (const auto& [k, e] : v.entries()) {
    auto n = ball.lookup(e);
    if (!n) return L1ExceedsCap{ball.radius, k};
    total += Rat(Int(*n), factorial(k));
  }
  return total;
}

L1NormResult l1_norm(const L1Vector& v, Weight cap) {
  return l1_norm(v, build_ball(v.ring(), cap));
}

namespace {

void require_same_ring(const L1Vector& u, const L1Vector& v) {
  if (!u.ring()->same_presentation(*v.ring())) {
    throw std::invalid_argument("l1: ring mismatch");
  }
}

}  // namespace

L1Vector l1_add(const L1Vector& u, const L1Vector& v) {
  require_same_ring(u, v);
  L1Vector out = u;
  for (const auto& [k, e] : v.entries()) {
    out.set(k, u.ring()->add(out.at(k), e));
  }
  return out;
}

L1Vector l1_scale(const RingElement& s, const L1Vector& v) {
  L1Vector out(v.ring());
  for (const auto& [k, e] : v.entries()) {
    out.set(k, v.ring()->mul(s, e));
  }
  return out;
}

L1Vector l1_neg(const L1Vector& v) {
  L1Vector out(v.ring());
  for (const auto& [k, e] : v.entries()) {
    out.set(k, v.ring()->neg(e));
  }
  return out;
}

L1Vector l1_quotient_map(const L1Vector& v, const PIDIdeal& ideal) {
  if (!v.ring()->same_presentation(*ideal.ring)) {
    throw std::invalid_argument("l1: ideal belongs to a different ring");
  }
  RingPtr target = quotient_ring(v.ring(), ideal);
  L1Vector out(target);
  for (const auto& [k, e] : v.entries()) {
    out.set(k, target->reduce(e));
  }
  return out;
}

bool kernel_membership(const L1Vector& v, const PIDIdeal& ideal) {
  for (const auto& [k, e] : v.entries()) {
    if (!ideal.contains(e)) return false;
  }
  return true;
}

std::string format_vector(const L1Vector& v) {
  if (v.is_zero()) return "0";
  std::string out;
  for (const auto& [k, e] : v.entries()) {
    if (!out.empty()) out += " + ";
    out += v.ring()->format(e) + "*e" + std::to_string(k);
  }
  return out;
}

}  // namespace polmod
