#pragma once

#include <string>

#include "polmod/ring.hpp"

namespace polmod {

// Principal ideal, canonical generator: non-negative for Z, monic for
// GF(p)[x], 0 or 1 for fields.  Ideal equality is generator equality.
struct PIDIdeal {
  RingPtr ring;
  RingElement generator;

  bool is_zero() const { return ring->is_zero(generator); }
  bool is_unit() const { return generator == ring->one(); }
  bool proper() const { return !is_unit(); }
  bool contains(const RingElement& r) const;

  bool operator==(const PIDIdeal& o) const {
    return ring->same_presentation(*o.ring) && generator == o.generator;
  }
};

// Canonicalizes the generator.  Throws if the ring has no ideal arithmetic.
PIDIdeal make_ideal(const RingPtr& ring, const RingElement& generator);
PIDIdeal parse_ideal(const RingPtr& ring, std::string_view generator_text);

std::string format_ideal(const PIDIdeal& ideal);

}  // namespace polmod
