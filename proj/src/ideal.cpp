#include "polmod/ideal.hpp"

#include <stdexcept>

namespace polmod {

bool PIDIdeal::contains(const RingElement& r) const {
  return ring->divides(generator, r);
}

PIDIdeal make_ideal(const RingPtr& ring, const RingElement& generator) {
  switch (ring->kind()) {
    case RingKind::integers:
      return PIDIdeal{ring, RingElement(abs_int(generator.as_int()))};
    case RingKind::rationals:
      return PIDIdeal{ring, generator.as_rat() == 0 ? ring->zero() : ring->one()};
    case RingKind::prime_field:
      return PIDIdeal{ring, generator.as_int() == 0 ? ring->zero() : ring->one()};
    case RingKind::poly_over_gf: {
      if (ring->is_zero(generator)) return PIDIdeal{ring, generator};
      // monic canonical generator
      RingElement lead{PolyCoeffs{generator.as_poly().back()}};
      return PIDIdeal{ring, ring->divide_exact(generator, lead)};
    }
    default:
      throw std::invalid_argument("make_ideal: " + ring->name() +
                                  " has no principal ideal arithmetic");
  }
}

PIDIdeal parse_ideal(const RingPtr& ring, std::string_view generator_text) {
  auto g = ring->parse(generator_text);
  if (!g) {
    throw std::invalid_argument("parse_ideal: bad generator \"" +
                                std::string(generator_text) + "\"");
  }
  return make_ideal(ring, *g);
}

std::string format_ideal(const PIDIdeal& ideal) {
  return "(" + ideal.ring->format(ideal.generator) + ")";
}

}  // namespace polmod
