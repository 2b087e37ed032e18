#pragma once

#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "polmod/ideal.hpp"
#include "polmod/l1.hpp"
#include "polmod/norm_engine.hpp"
#include "polmod/ring.hpp"

namespace polmod {

// Ring norm used inside a module presentation: the minimal-term norm, or the
// direct 0/1 norm available on finite rings.
enum class NormMode { term, indicator };

// M = l1(R) presented through its dense submodule of finitely supported
// vectors, with N = l1((g)).  N is closed and nowhere dense whenever (g) is
// proper, so the level sets F_k are all taken to be N itself; distances to N
// are exact coordinatewise quotient norms.
class SequenceModule {
 public:
  SequenceModule(RingPtr ring, PIDIdeal submodule_ideal, NormMode mode);

  const RingPtr& ring() const { return ring_; }
  const PIDIdeal& submodule_ideal() const { return ideal_; }
  NormMode norm_mode() const { return mode_; }

  Weight ring_norm(const RingElement& r) const;
  // |r + (g)| = min over the coset; equals ring_norm when g = 0
  Weight coset_norm(const RingElement& r) const;
  Rat vector_norm(const L1Vector& v) const;
  bool in_submodule(const L1Vector& v) const;
  Rat distance_to_submodule(const L1Vector& v) const;
  bool in_level_set(const L1Vector& v, std::size_t k) const;
  Rat distance_to_level_set(const L1Vector& v, std::size_t k) const;

  // pinned ring enumeration: by (atom weight, canonical order); wraps around
  // for finite rings
  RingElement element_at(std::uint64_t index) const;
  // sorted by (ring norm, canonical order); includes 0
  std::vector<std::pair<RingElement, Weight>> elements_with_norm_at_most(Weight cap) const;
  // pinned dense enumeration of finitely supported vectors, t >= 1:
  // coordinate j carries element_at(e_j) where e_j is the exponent of the
  // j-th prime in t
  L1Vector vector_at(std::uint64_t t) const;

  nlohmann::ordered_json descriptor() const;
  static SequenceModule from_descriptor(const nlohmann::json& j);

 private:
  void ensure_ball(Weight radius) const;

  RingPtr ring_;
  PIDIdeal ideal_;
  NormMode mode_;

  mutable std::mutex mu_;
  mutable NormBall ball_;
  mutable std::map<RingElement, Weight> coset_cache_;
  mutable std::vector<RingElement> enumeration_;
  mutable Weight enumeration_radius_ = 0;
  mutable bool enumeration_complete_ = false;
};

struct BuilderConfig {
  std::uint64_t steps = 1;
  std::uint64_t scan_bound = 100000;
  // floor for the scalar-norm cap in the avoidance condition (the smallness
  // cap k*k! vanishes at k = 0)
  Weight avoid_scalar_floor = 8;
  // coefficient ball for span testing when R/(g) is infinite; finite
  // quotients are exhausted instead
  Weight coeff_cap = 8;
  std::uint64_t detect_depth = 4;
  std::uint64_t detect_elements = 64;
  // coefficient budget the certificate is replayed at; also the bound
  // accepted by evaluate_map
  Rat verify_bound = 3;

  nlohmann::ordered_json to_json() const;
  static BuilderConfig from_json(const nlohmann::json& j);
};

struct EpsilonEvidence {
  std::uint64_t tuples_checked = 0;
  std::optional<Rat> min_combo_norm;
  std::vector<std::string> min_combo_tuple;
  std::optional<Rat> min_distance;
  std::vector<std::string> min_distance_tuple;
};

struct SmallnessEvidence {
  Weight scalar_cap = 0;  // k * k!
  std::uint64_t scalars_checked = 0;
  std::optional<Rat> max_scaled_norm;  // must stay < eps_k / 2
  std::optional<std::string> argmax_scalar;
};

struct AvoidanceEvidence {
  Weight scalar_cap = 0;  // norms of the r not in I that were tested
  std::uint64_t scalars_checked = 0;
  std::uint64_t coefficient_tuples = 0;  // span combinations per scalar
  bool coefficients_exhaustive = false;  // true when R/(g) is finite
  Weight coeff_cap = 0;
};

struct BuildStep {
  std::size_t k = 0;
  Rat epsilon;
  EpsilonEvidence epsilon_evidence;
  L1Vector generator;
  std::uint64_t found_at = 0;  // index in the dense enumeration
  SmallnessEvidence smallness;
  AvoidanceEvidence avoidance;

  explicit BuildStep(RingPtr ring) : generator(std::move(ring)) {}
};

struct IdealDetection {
  PIDIdeal ideal;
  std::uint64_t stabilized_at = 0;
  std::uint64_t probes = 0;
  std::uint64_t depth = 0;
  std::uint64_t elements = 0;
};

struct EmbeddingCertificate {
  nlohmann::ordered_json module;
  BuilderConfig config;
  IdealDetection detection;
  std::vector<BuildStep> steps;

  nlohmann::ordered_json to_json() const;
  static EmbeddingCertificate from_json(const nlohmann::json& j);
};

struct BuildError : std::runtime_error {
  BuildError(std::size_t step_, std::string condition_, const std::string& what_)
      : std::runtime_error(what_), step(step_), condition(std::move(condition_)) {}
  std::size_t step;
  std::string condition;
};

// I_k = {r : r*u in N for the sampled u in U_k} with U_k the open 2^-k ball,
// probed over the dense enumeration plus scaled basis vectors; returns the
// stabilized ideal or throws BuildError when the sequence keeps moving.
IdealDetection detect_ideal(const SequenceModule& P, std::uint64_t depth,
                            std::uint64_t elements);

// The inductive construction: detect the ideal, then alternate epsilon and
// generator choices.  Epsilons are pinned to half the minimum available
// slack; generators are first-fit along the dense enumeration.
EmbeddingCertificate build_embedding(const SequenceModule& P, const BuilderConfig& config);

// Exact finite sum of r_k m_k; coefficients must satisfy the certificate's
// verified budget.
L1Vector evaluate_map(const SequenceModule& P, const EmbeddingCertificate& cert,
                      const std::vector<RingElement>& coeffs);

struct VerifyCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  std::uint64_t tuples_checked = 0;
  std::uint64_t kernel_tuples = 0;
  std::uint64_t replayed_inequalities = 0;
  std::uint64_t difference_tuples = 0;
  Rat bound;

  bool pass() const;
  nlohmann::ordered_json to_json() const;
};

// Replays the certificate from the presentation oracles alone: the epsilon
// cascade and pinned formula, both generator conditions, first-fit
// provenance, and the exhaustive tuple replay at the given budget (kernel
// flags, submodule avoidance with the proof's tail inequalities, and
// distinctness of cosets via difference tuples at twice the budget).
VerifyReport verify_certificate(const SequenceModule& P, const EmbeddingCertificate& cert,
                                const Rat& bound);

}  // namespace polmod
