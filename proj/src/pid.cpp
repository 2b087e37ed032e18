#include "polmod/pid.hpp"

#include <algorithm>
#include <stdexcept>

namespace polmod {

namespace {

// monic polynomials of the given degree, in canonical order
std::vector<RingElement> monic_polys(const Ring& ring, std::size_t degree) {
  std::vector<RingElement> out;
  auto one = ring.one();
  // characteristic: add 1 to itself until it wraps to 0
  std::int64_t p = 1;
  RingElement acc = one;
  while (!ring.is_zero(acc)) {
    acc = ring.add(acc, one);
    ++p;
    if (p > (1 << 20)) throw std::logic_error("monic_polys: bad characteristic");
  }
  std::vector<std::int64_t> buf(degree, 0);
  for (;;) {
    PolyCoeffs c(buf.begin(), buf.end());
    c.push_back(1);
    out.emplace_back(c);
    std::size_t i = 0;
    while (i < degree) {
      if (++buf[i] < p) break;
      buf[i] = 0;
      ++i;
    }
    if (i == degree) break;
  }
  std::sort(out.begin(), out.end(), [&](const RingElement& a, const RingElement& b) {
    return ring.canonical_less(a, b);
  });
  return out;
}

PrimeFactor factor_integer_ideal(const PIDIdeal& ideal) {
  PrimeFactor out{ideal, PIDIdeal{}, ideal.ring->zero(), {}};
  const Int n = ideal.generator.as_int();
  for (Int d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.transcript.push_back(d.str() + " divides " + n.str());
      out.prime = make_ideal(ideal.ring, RingElement(d));
      out.cofactor = RingElement(Int(n / d));
      return out;
    }
    out.transcript.push_back(d.str() + " does not divide " + n.str());
  }
  out.transcript.push_back("no divisor up to sqrt(" + n.str() + "); prime");
  out.prime = ideal;
  out.cofactor = ideal.ring->one();
  return out;
}

PrimeFactor factor_poly_ideal(const PIDIdeal& ideal) {
  PrimeFactor out{ideal, PIDIdeal{}, ideal.ring->zero(), {}};
  const Ring& ring = *ideal.ring;
  std::size_t deg = ideal.generator.as_poly().size() - 1;
  for (std::size_t d = 1; 2 * d <= deg; ++d) {
    for (const auto& f : monic_polys(ring, d)) {
      if (ring.divides(f, ideal.generator)) {
        out.transcript.push_back(ring.format(f) + " divides " + ring.format(ideal.generator));
        // a divisor of minimal degree is irreducible
        out.prime = PIDIdeal{ideal.ring, f};
        out.cofactor = ring.divide_exact(ideal.generator, f);
        return out;
      }
      out.transcript.push_back(ring.format(f) + " does not divide " +
                               ring.format(ideal.generator));
    }
  }
  out.transcript.push_back("no proper monic divisor; irreducible");
  out.prime = ideal;
  out.cofactor = ring.one();
  return out;
}

}  // namespace

PrimeFactor factor_ideal(const PIDIdeal& ideal) {
  if (ideal.is_zero()) throw std::invalid_argument("factor_ideal: I = (0)");
  if (ideal.is_unit()) throw std::invalid_argument("factor_ideal: I = R");
  switch (ideal.ring->kind()) {
    case RingKind::integers:
      return factor_integer_ideal(ideal);
    case RingKind::poly_over_gf:
      return factor_poly_ideal(ideal);
    default:
      throw std::invalid_argument("factor_ideal: supported over Z and GF(p)[x] only");
  }
}

bool is_prime_ideal(const PIDIdeal& ideal) {
  if (ideal.is_unit()) return false;
  if (ideal.is_zero()) {
    // the zero ideal is prime exactly in the integral domains we present
    switch (ideal.ring->kind()) {
      case RingKind::integers:
      case RingKind::rationals:
      case RingKind::prime_field:
      case RingKind::poly_over_gf:
        return true;
      default:
        return false;
    }
  }
  switch (ideal.ring->kind()) {
    case RingKind::rationals:
    case RingKind::prime_field:
      return false;  // nonzero ideals in a field are the whole ring
    case RingKind::integers:
    case RingKind::poly_over_gf: {
      auto f = factor_ideal(ideal);
      return f.prime == ideal;
    }
    default:
      return false;
  }
}

L1Vector prime_embedding(const PrimeFactor& factor, const L1Vector& v) {
  const RingPtr& base = factor.ideal.ring;
  if (base->mul(factor.prime.generator, factor.cofactor) != factor.ideal.generator) {
    throw std::invalid_argument("prime_embedding: factor data inconsistent with the ideal");
  }
  RingPtr source = quotient_ring(base, factor.prime);
  if (!v.ring()->same_presentation(*source)) {
    throw std::invalid_argument("prime_embedding: vector is not over R/p");
  }
  RingPtr target = quotient_ring(base, factor.ideal);

  // check, not assume: r |-> r*s must be injective on residues mod p
  if (auto card = source->cardinality(); card && *card <= 100000) {
    std::map<RingElement, RingElement> seen;
    for (const auto& r : source->atoms_up_to(~Weight(0) >> 1)) {
      RingElement image = target->reduce(base->mul(source->lift(r), factor.cofactor));
      auto [it, fresh] = seen.emplace(image, r);
      if (!fresh) {
        throw std::invalid_argument("prime_embedding: induced map is not injective");
      }
    }
  }

  L1Vector out(target);
  for (const auto& [k, e] : v.entries()) {
    out.set(k, target->reduce(base->mul(v.ring()->lift(e), factor.cofactor)));
  }
  return out;
}

namespace {

// base ring and ideal generator of the presentation R/(g); domains are their
// own quotient by (0)
std::pair<RingPtr, RingElement> base_of(const RingPtr& ring) {
  if (auto qs = ring->quotient_structure()) return *qs;
  switch (ring->kind()) {
    case RingKind::integers:
    case RingKind::rationals:
    case RingKind::poly_over_gf:
      return {ring, ring->zero()};
    default:
      throw std::invalid_argument("annihilator: unsupported presentation " + ring->name());
  }
}

RingElement ideal_lcm(const Ring& base, const RingElement& a, const RingElement& b) {
  if (base.is_zero(a) || base.is_zero(b)) return base.zero();
  RingElement g = base.gcd(a, b);
  return base.mul(base.divide_exact(a, g), b);
}

}  // namespace

PIDIdeal annihilator(const L1Vector& v) {
  auto [base, modulus] = base_of(v.ring());
  PIDIdeal acc = make_ideal(base, base->one());  // ann(0) = R
  for (const auto& [k, e] : v.entries()) {
    RingElement lifted = v.ring()->quotient_structure() ? v.ring()->lift(e) : e;
    RingElement coord_gen;
    if (base->is_zero(modulus)) {
      // over the domain itself: r*c = 0 forces r = 0 for c != 0
      coord_gen = base->zero();
    } else {
      coord_gen = base->divide_exact(modulus, base->gcd(lifted, modulus));
    }
    acc = make_ideal(base, ideal_lcm(*base, acc.generator, coord_gen));
  }
  return acc;
}

nlohmann::ordered_json PrimeFactor::to_json() const {
  nlohmann::ordered_json j;
  j["ring"] = ideal.ring->descriptor();
  j["ideal"] = ideal.ring->format(ideal.generator);
  j["prime"] = ideal.ring->format(prime.generator);
  j["cofactor"] = ideal.ring->format(cofactor);
  j["transcript"] = transcript;
  return j;
}

DistinguishReport distinguish_primes(const PIDIdeal& p, const PIDIdeal& q) {
  if (!p.ring->same_presentation(*q.ring)) {
    throw std::invalid_argument("distinguish_primes: ideals over different rings");
  }
  if (!is_prime_ideal(p) || !is_prime_ideal(q)) {
    throw std::invalid_argument("distinguish_primes: both ideals must be prime");
  }
  DistinguishReport report;
  report.p = p;
  report.q = q;
  if (p.generator == q.generator) {
    report.equal = true;
    return report;
  }
  RingPtr mod_p = p.is_zero() ? p.ring : quotient_ring(p.ring, p);
  L1Vector witness(mod_p);
  witness.set(0, mod_p->one());
  report.obstruction = witness;
  report.obstruction_annihilator = annihilator(witness);
  return report;
}

nlohmann::ordered_json DistinguishReport::to_json() const {
  nlohmann::ordered_json j;
  j["ring"] = p.ring->descriptor();
  j["p"] = format_ideal(p);
  j["q"] = format_ideal(q);
  j["equal"] = equal;
  if (obstruction) {
    j["obstruction"] = obstruction->to_json();
    j["obstruction_annihilator"] = format_ideal(*obstruction_annihilator);
    j["conclusion"] = "annihilator " + format_ideal(*obstruction_annihilator) +
                      " differs from " + format_ideal(q) +
                      "; no linear injection can carry the witness into l1(R/q)";
  }
  return j;
}

}  // namespace polmod
