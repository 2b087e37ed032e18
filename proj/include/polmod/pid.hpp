#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "polmod/ideal.hpp"
#include "polmod/l1.hpp"

namespace polmod {

// I = p * s with p the smallest prime divisor (least prime factor over Z,
// least monic irreducible in the canonical polynomial order over GF(p)[x]).
// The transcript records the divisor scan that certifies primality.
struct PrimeFactor {
  PIDIdeal ideal;
  PIDIdeal prime;
  RingElement cofactor;
  std::vector<std::string> transcript;

  nlohmann::ordered_json to_json() const;
};

// Throws on I = (0) or I = R, and on rings without factorization (Z and
// GF(p)[x] only).
PrimeFactor factor_ideal(const PIDIdeal& ideal);

bool is_prime_ideal(const PIDIdeal& ideal);

// The injection l1(R/p) -> l1(R/I) induced by r |-> r*s: lift each entry
// canonically, multiply by the cofactor, reduce mod I.  Throws when the
// vector's ring is not R/p or when prime*cofactor != generator(I).
L1Vector prime_embedding(const PrimeFactor& factor, const L1Vector& v);

// {r in R : r*v = 0 in l1(R/p)} as a principal ideal of the base ring;
// per-coordinate annihilator ideals intersect, so generators combine by lcm.
// Returns (1) = R for v = 0.  The base ring and p are inferred from the
// vector's quotient presentation.
PIDIdeal annihilator(const L1Vector& v);

struct DistinguishReport {
  bool equal = false;
  PIDIdeal p, q;
  // when p != q: a nonzero witness over R/p whose annihilator is p, which no
  // linear injection into l1(R/q) can preserve
  std::optional<L1Vector> obstruction;
  std::optional<PIDIdeal> obstruction_annihilator;

  nlohmann::ordered_json to_json() const;
};

// Throws on non-prime input.
DistinguishReport distinguish_primes(const PIDIdeal& p, const PIDIdeal& q);

}  // namespace polmod
