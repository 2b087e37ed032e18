#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "polmod/rational.hpp"

namespace polmod {

// Canonical element payloads:
//   integers / residues : Int (residues stored as least non-negative value)
//   rationals           : Rat (lowest terms, positive denominator)
//   polynomials         : coefficient vector, little-endian, no trailing
//                         zeros, coefficients in [0, p)
using PolyCoeffs = std::vector<std::int64_t>;
using ElementValue = std::variant<Int, Rat, PolyCoeffs>;

class RingElement {
 public:
  RingElement() : value_(Int(0)) {}
  explicit RingElement(Int v) : value_(std::move(v)) {}
  explicit RingElement(Rat v) : value_(std::move(v)) {}
  explicit RingElement(PolyCoeffs v) : value_(std::move(v)) {}

  const Int& as_int() const { return std::get<Int>(value_); }
  const Rat& as_rat() const { return std::get<Rat>(value_); }
  const PolyCoeffs& as_poly() const { return std::get<PolyCoeffs>(value_); }
  const ElementValue& value() const { return value_; }

  bool operator==(const RingElement& o) const { return value_ == o.value_; }
  // Payload order; used for map keys, not for display order.
  bool operator<(const RingElement& o) const { return value_ < o.value_; }

 private:
  ElementValue value_;
};

enum class RingKind {
  integers,      // Z
  modular,       // Z/n (also the quotient presentation Z/(n))
  rationals,     // Q
  prime_field,   // GF(p)
  poly_over_gf,  // GF(p)[x]
  poly_quotient  // GF(p)[x]/(f)
};

// A computable presentation of a countable ring.  Immutable after
// construction; all operations are pure.
class Ring {
 public:
  virtual ~Ring() = default;

  virtual RingKind kind() const = 0;
  virtual std::string name() const = 0;

  virtual RingElement zero() const = 0;
  virtual RingElement one() const = 0;
  virtual RingElement add(const RingElement& a, const RingElement& b) const = 0;
  virtual RingElement neg(const RingElement& a) const = 0;
  virtual RingElement mul(const RingElement& a, const RingElement& b) const = 0;

  bool eq(const RingElement& a, const RingElement& b) const { return a == b; }
  bool is_zero(const RingElement& a) const { return a == zero(); }
  RingElement sub(const RingElement& a, const RingElement& b) const {
    return add(a, neg(b));
  }

  // Atom weight: w(0) = 0, w(r) >= 2 otherwise, w(r) = w(-r), finite-to-one.
  // Saturates instead of overflowing for absurdly large inputs.
  Weight weight(const RingElement& r) const;

  // All r with weight(r) <= n, sorted by (weight, canonical order).
  std::vector<RingElement> atoms_up_to(Weight n) const;

  virtual bool finite() const = 0;
  // Element count for finite rings.
  virtual std::optional<std::uint64_t> cardinality() const { return {}; }

  // Display / enumeration order within a weight class (|.|-then-sign for
  // numbers, degree-then-coefficients for polynomials).
  virtual bool canonical_less(const RingElement& a, const RingElement& b) const = 0;

  virtual std::string format(const RingElement& r) const = 0;
  virtual std::optional<RingElement> parse(std::string_view text) const = 0;

  // Exact division and gcd where the ring supports them (Z, Q, GF, GF[x]).
  virtual bool divides(const RingElement& d, const RingElement& a) const;
  virtual RingElement gcd(const RingElement& a, const RingElement& b) const;
  virtual RingElement divide_exact(const RingElement& a, const RingElement& d) const;
  // Least canonical representative of a modulo (g), g != 0.
  virtual RingElement canonical_mod(const RingElement& a, const RingElement& g) const;

  // For quotient presentations: map between base-ring and quotient elements.
  virtual RingElement reduce(const RingElement& base_element) const;
  virtual RingElement lift(const RingElement& element) const;
  // (base ring, ideal generator) when this presentation is R/(g); GF(p) is
  // reported as Z/(p).
  virtual std::optional<std::pair<std::shared_ptr<const Ring>, RingElement>>
  quotient_structure() const {
    return {};
  }

  // Structural descriptor; two presentations behave identically iff their
  // descriptors are equal.
  nlohmann::ordered_json descriptor() const;
  bool same_presentation(const Ring& other) const;

  const std::map<RingElement, Weight>& weight_overrides() const { return overrides_; }

 protected:
  virtual Weight default_weight(const RingElement& r) const = 0;
  virtual std::vector<RingElement> default_atoms(Weight n) const = 0;
  virtual nlohmann::ordered_json base_descriptor() const = 0;

  // Validated in make_ring: w(0) = 0 stays, overrides >= 2, symmetric.
  std::map<RingElement, Weight> overrides_;

  friend std::shared_ptr<const Ring> make_ring(const nlohmann::json&);
};

using RingPtr = std::shared_ptr<const Ring>;

// Descriptor: {"ring": "Z" | {"Zmod": n} | "Q" | {"GF": p} | {"PolyGF": p},
//              "weights": [[element, weight], ...] (optional)}
// Throws std::invalid_argument on bad moduli/characteristics or on override
// tables violating the weight constraints.
RingPtr make_ring(const nlohmann::json& descriptor);
// Shorthand: "Z", "Q", "Zmod6", "GF5", "PolyGF2".
RingPtr make_ring(std::string_view shorthand);
inline RingPtr make_ring(const char* shorthand) { return make_ring(std::string_view(shorthand)); }

struct PIDIdeal;
// R/I with canonical representatives.  R must be Z or GF(p)[x]; I proper and
// nonzero.  The quotient's weight function is the inherited default for its
// representatives; the true quotient norm lives in norm_engine.
RingPtr quotient_ring(const RingPtr& ring, const PIDIdeal& ideal);

}  // namespace polmod
