#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "json.hpp"
#include "polmod/l1.hpp"
#include "polmod/norm_engine.hpp"
#include "polmod/rational.hpp"
#include "polmod/ring.hpp"

namespace polmod {

// Pinned enumeration of Q: q_0 = 0; positive rationals ordered by height
// max(numerator, denominator) and by value within a height, interleaved with
// their negatives (q_1 = 1, q_2 = -1, q_3 = 1/2, q_4 = -1/2, q_5 = 2, ...).
// Every window of the enumeration is reproducible byte for byte.
Rat rational_at(std::uint64_t m);

// chi_x prefix: bit m is 1 iff q_m < x.
struct ChiVector {
  Rat x;
  std::size_t window = 0;
  std::vector<bool> bits;
  RingPtr ring;      // where the 0/1 entries live
  Weight one_norm;   // |1| in that ring
  Rat prefix_norm;   // sum of |1|/m! over the support
  Rat tail_bound;    // |1| * 2/n! for n >= 1, |1| * 3 for n = 0

  L1Vector to_vector() const;
  nlohmann::ordered_json to_json() const;
};

ChiVector chi_prefix(const Rat& x, std::size_t window, const RingPtr& ring);

struct IndependenceResult {
  bool independent = false;
  std::size_t rank = 0;
  // one column per parameter: first q below the least parameter, then the
  // first q in each consecutive gap; the restricted matrix is unit
  // triangular, so these certify full rank over any field
  std::vector<std::size_t> witness_columns;
  // when the window is too small: the least window that separates
  std::optional<std::size_t> minimal_window;

  nlohmann::ordered_json to_json() const;
};

// Rank of the |params| x window prefix matrix over Q.  Throws on duplicate
// parameters.
IndependenceResult independence_check(const std::vector<Rat>& params, std::size_t window);

struct EscapeWitness {
  RingElement witness;
  Weight norm;           // exact ring norm of the witness
  Rat threshold;         // n! * eps
  L1Vector extended;     // (r_0, ..., r_{n-1}, witness, 0, ...)
  Rat extended_norm;     // exact; > eps by construction

  nlohmann::ordered_json to_json() const;
};

// First element in canonical order with |r| > n!*eps, where n is the prefix
// length.  Properness guarantees existence; the scan stops at atoms of
// weight cap and throws when exhausted.
EscapeWitness erdos_escape_witness(const RingPtr& ring, const std::vector<RingElement>& prefix,
                                   const Rat& eps, Weight cap);

}  // namespace polmod
