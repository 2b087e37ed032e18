#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "polmod/ideal.hpp"
#include "polmod/ring.hpp"

namespace polmod {

// A (+,*)-term over ring atoms.  Weight composes additively over sums and
// multiplicatively over products; the norm of r is the minimal weight of a
// term evaluating to r.
struct TermNode;
using TermPtr = std::shared_ptr<const TermNode>;

struct TermNode {
  enum class Op { atom, sum, product };
  Op op;
  RingElement value;
  Weight weight;
  TermPtr lhs, rhs;
  std::uint32_t nodes;
};

TermPtr make_atom(const Ring& ring, const RingElement& v);
// Children are stored in canonical (encoding) order; value and weight are
// composed at construction.
TermPtr make_composite(const Ring& ring, TermNode::Op op, const TermPtr& a, const TermPtr& b);
// Prefix notation, e.g. "(+ 1 (* 2 3))".
std::string format_term(const Ring& ring, const TermNode& t);
// Independent re-evaluation / weight recomputation, for certificate checks.
RingElement evaluate_term(const Ring& ring, const TermNode& t);
Weight recompute_term_weight(const Ring& ring, const TermNode& t);

struct BallEntry {
  Weight norm;
  TermPtr witness;
};

// {r : |r| <= radius} with exact minimal norms and one witness per element.
struct NormBall {
  RingPtr ring;
  Weight radius = 0;
  std::map<RingElement, BallEntry> entries;

  std::optional<Weight> lookup(const RingElement& r) const {
    auto it = entries.find(r);
    if (it == entries.end()) return {};
    return it->second.norm;
  }
  const TermPtr* witness(const RingElement& r) const {
    auto it = entries.find(r);
    if (it == entries.end()) return nullptr;
    return &it->second.witness;
  }
  // Rows sorted by (norm, canonical order); the CLI table order.
  std::vector<std::pair<RingElement, BallEntry>> sorted_rows() const;
};

// Level-synchronous closure: seed with atoms, then close level j under sums
// (j1 + j2 = j) and products (j1 * j2 = j, j1, j2 >= 2) in nondecreasing
// order.  First appearance is the norm; witness ties break on fewer nodes,
// then smaller prefix encoding.
NormBall build_ball(const RingPtr& ring, Weight radius);

struct ExceedsCap {
  Weight cap;
};

using NormResult = std::variant<Weight, ExceedsCap>;

NormResult norm(const RingPtr& ring, const RingElement& r, Weight cap);
NormResult norm(const NormBall& ball, const RingElement& r);

// min over the coset r + I, by intersecting the ball with the coset.
NormResult quotient_norm(const RingPtr& ring, const PIDIdeal& ideal, const RingElement& r,
                         Weight cap);
NormResult quotient_norm(const NormBall& ball, const PIDIdeal& ideal, const RingElement& r);

struct AxiomViolation {
  std::string axiom;
  std::string lhs, rhs;
  std::string detail;
};

struct AxiomReport {
  Weight radius = 0;
  Weight lookup_radius = 0;
  std::uint64_t pairs_checked = 0;
  // product bounds larger than the lookup ball are certified by composing
  // the two retained witnesses instead of exact norm lookup
  std::uint64_t exact_product_checks = 0;
  std::uint64_t certified_product_checks = 0;
  std::vector<AxiomViolation> violations;
  bool ok() const { return violations.empty(); }
};

// Exhaustive over pairs from ball(radius): |r+s| <= |r|+|s|, |rs| <= |r||s|,
// |-r| = |r|, |r| = 0 iff r = 0, plus witness validity for every entry.
// lookup_cap defaults to radius^2 for non-polynomial rings and 2*radius for
// polynomial ones.  threads > 1 parallelizes the pair scan.
AxiomReport check_norm_axioms(const RingPtr& ring, Weight radius,
                              std::optional<Weight> lookup_cap = {}, unsigned threads = 1);

}  // namespace polmod
