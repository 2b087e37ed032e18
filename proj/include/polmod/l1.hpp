#pragma once

#include <cstddef>
#include <map>
#include <variant>
#include <vector>

#include "json.hpp"
#include "polmod/ideal.hpp"
#include "polmod/norm_engine.hpp"
#include "polmod/ring.hpp"

namespace polmod {

// Finitely supported sequence over a ring; only nonzero entries are stored.
// The norm is sum over the support of |r_k|/k!, an exact rational.
class L1Vector {
 public:
  explicit L1Vector(RingPtr ring) : ring_(std::move(ring)) {}

  static L1Vector from_entries(RingPtr ring,
                               const std::vector<std::pair<std::size_t, RingElement>>& entries);

  const RingPtr& ring() const { return ring_; }
  const std::map<std::size_t, RingElement>& entries() const { return entries_; }
  bool is_zero() const { return entries_.empty(); }

  RingElement at(std::size_t k) const {
    auto it = entries_.find(k);
    return it == entries_.end() ? ring_->zero() : it->second;
  }
  // drops the entry when v = 0
  void set(std::size_t k, const RingElement& v);

  bool operator==(const L1Vector& o) const { return entries_ == o.entries_; }

  nlohmann::ordered_json to_json() const;
  static L1Vector from_json(const nlohmann::json& j);
  static L1Vector from_json(RingPtr ring, const nlohmann::json& entries);

 private:
  RingPtr ring_;
  std::map<std::size_t, RingElement> entries_;
};

struct L1ExceedsCap {
  Weight cap;
  std::size_t index;  // first coordinate whose ring norm is unresolved
};

using L1NormResult = std::variant<Rat, L1ExceedsCap>;

L1NormResult l1_norm(const L1Vector& v, Weight cap);
L1NormResult l1_norm(const L1Vector& v, const NormBall& ball);

// coordinatewise; throws on presentation mismatch
L1Vector l1_add(const L1Vector& u, const L1Vector& v);
L1Vector l1_scale(const RingElement& s, const L1Vector& v);
L1Vector l1_neg(const L1Vector& v);

// coordinatewise reduction onto l1(R/I); entries landing in I are dropped
L1Vector l1_quotient_map(const L1Vector& v, const PIDIdeal& ideal);
// true iff every entry lies in I, i.e. v is in the kernel l1(I)
bool kernel_membership(const L1Vector& v, const PIDIdeal& ideal);

std::string format_vector(const L1Vector& v);

}  // namespace polmod
