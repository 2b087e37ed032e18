#include "polmod/builder.hpp"

#include <algorithm>

namespace polmod {

// ---------------------------------------------------------------------------
// SequenceModule

SequenceModule::SequenceModule(RingPtr ring, PIDIdeal submodule_ideal, NormMode mode)
    : ring_(std::move(ring)), ideal_(std::move(submodule_ideal)), mode_(mode) {
  if (!ring_->same_presentation(*ideal_.ring)) {
    throw std::invalid_argument("SequenceModule: ideal belongs to a different ring");
  }
  if (ideal_.is_unit()) {
    throw std::invalid_argument("SequenceModule: submodule equals the module");
  }
  if (mode_ == NormMode::indicator && !ring_->finite()) {
    throw std::invalid_argument("SequenceModule: indicator norm needs a finite ring");
  }
  ball_.ring = ring_;
}

void SequenceModule::ensure_ball(Weight radius) const {
  if (ball_.radius >= radius && !ball_.entries.empty()) return;
  Weight target = std::max<Weight>(4, ball_.radius);
  while (target < radius) target *= 2;
  ball_ = build_ball(ring_, target);
}

Weight SequenceModule::ring_norm(const RingElement& r) const {
  if (mode_ == NormMode::indicator) return ring_->is_zero(r) ? 0 : 1;
  std::lock_guard<std::mutex> lock(mu_);
  ensure_ball(ring_->weight(r));
  return *ball_.lookup(r);  // |r| <= w(r), so the entry exists
}

Weight SequenceModule::coset_norm(const RingElement& r) const {
  if (mode_ == NormMode::indicator) return ideal_.contains(r) ? 0 : 1;
  if (ideal_.is_zero()) return ring_norm(r);
  std::lock_guard<std::mutex> lock(mu_);
  RingElement key = ring_->canonical_mod(r, ideal_.generator);
  auto it = coset_cache_.find(key);
  if (it != coset_cache_.end()) return it->second;
  ensure_ball(ring_->weight(r));
  // the coset holds r itself, so its minimum lies inside ball(|r|)
  std::optional<Weight> best;
  for (const auto& [e, entry] : ball_.entries) {
    if (best && entry.norm >= *best) continue;
    if (ideal_.contains(ring_->sub(e, key))) best = entry.norm;
  }
  coset_cache_[key] = *best;
  return *best;
}

Rat SequenceModule::vector_norm(const L1Vector& v) const {
  Rat total = 0;
  for (const auto& [k, e] : v.entries()) {
    total += Rat(Int(ring_norm(e)), factorial(k));
  }
  return total;
}

bool SequenceModule::in_submodule(const L1Vector& v) const {
  for (const auto& [k, e] : v.entries()) {
    if (!ideal_.contains(e)) return false;
  }
  return true;
}

Rat SequenceModule::distance_to_submodule(const L1Vector& v) const {
  Rat total = 0;
  for (const auto& [k, e] : v.entries()) {
    total += Rat(Int(coset_norm(e)), factorial(k));
  }
  return total;
}

bool SequenceModule::in_level_set(const L1Vector& v, std::size_t) const {
  return in_submodule(v);
}

Rat SequenceModule::distance_to_level_set(const L1Vector& v, std::size_t) const {
  return distance_to_submodule(v);
}

RingElement SequenceModule::element_at(std::uint64_t index) const {
  std::lock_guard<std::mutex> lock(mu_);
  while (!enumeration_complete_ && enumeration_.size() <= index) {
    enumeration_radius_ = std::max<Weight>(4, enumeration_radius_ * 2);
    std::size_t before = enumeration_.size();
    enumeration_ = ring_->atoms_up_to(enumeration_radius_);
    if (auto card = ring_->cardinality(); card && enumeration_.size() == *card) {
      enumeration_complete_ = true;
    }
    if (enumeration_.size() == before && enumeration_radius_ > (Weight(1) << 18)) {
      throw std::logic_error("element_at: enumeration stalled");
    }
  }
  if (enumeration_complete_) return enumeration_[index % enumeration_.size()];
  return enumeration_[index];
}

std::vector<std::pair<RingElement, Weight>> SequenceModule::elements_with_norm_at_most(
    Weight cap) const {
  std::vector<std::pair<RingElement, Weight>> out;
  if (mode_ == NormMode::indicator) {
    out.emplace_back(ring_->zero(), 0);
    if (cap >= 1) {
      auto all = ring_->atoms_up_to(~Weight(0) >> 1);
      for (const auto& e : all) {
        if (!ring_->is_zero(e)) out.emplace_back(e, 1);
      }
      std::sort(out.begin() + 1, out.end(), [&](const auto& a, const auto& b) {
        return ring_->canonical_less(a.first, b.first);
      });
    }
    return out;
  }
  {
    std::lock_guard<std::mutex> lock(mu_);
    ensure_ball(cap);
    for (const auto& [e, entry] : ball_.entries) {
      if (entry.norm <= cap) out.emplace_back(e, entry.norm);
    }
  }
  std::sort(out.begin(), out.end(), [&](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second < b.second;
    return ring_->canonical_less(a.first, b.first);
  });
  return out;
}

namespace {

std::uint64_t grow_primes(std::vector<std::uint64_t>& primes, std::size_t count) {
  while (primes.size() < count) {
    std::uint64_t candidate = primes.empty() ? 2 : primes.back() + 1;
    for (;;) {
      bool prime = true;
      for (auto p : primes) {
        if (p * p > candidate) break;
        if (candidate % p == 0) {
          prime = false;
          break;
        }
      }
      if (prime) break;
      ++candidate;
    }
    primes.push_back(candidate);
  }
  return primes[count - 1];
}

std::uint64_t nth_prime(std::size_t j) {
  static std::vector<std::uint64_t> primes;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  return grow_primes(primes, j + 1);
}

std::size_t index_of_prime(std::uint64_t p) {
  static std::vector<std::uint64_t> primes;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  while (primes.empty() || primes.back() < p) grow_primes(primes, primes.size() + 1);
  auto it = std::lower_bound(primes.begin(), primes.end(), p);
  return static_cast<std::size_t>(it - primes.begin());
}

}  // namespace

L1Vector SequenceModule::vector_at(std::uint64_t t) const {
  if (t == 0) throw std::invalid_argument("vector_at: index starts at 1");
  L1Vector v(ring_);
  std::uint64_t rest = t;
  for (std::size_t j = 0; rest > 1; ++j) {
    std::uint64_t p = nth_prime(j);
    if (p * p > rest) {
      // the remainder is a prime beyond every factor seen so far
      v.set(index_of_prime(rest), element_at(1));
      break;
    }
    std::uint64_t e = 0;
    while (rest % p == 0) {
      rest /= p;
      ++e;
    }
    if (e > 0) v.set(j, element_at(e));
  }
  return v;
}

nlohmann::ordered_json SequenceModule::descriptor() const {
  nlohmann::ordered_json j;
  j["ring"] = ring_->descriptor();
  j["norm"] = mode_ == NormMode::term ? "term" : "indicator";
  j["submodule_ideal"] = ring_->format(ideal_.generator);
  return j;
}

SequenceModule SequenceModule::from_descriptor(const nlohmann::json& j) {
  for (const auto& [key, value] : j.items()) {
    if (key != "ring" && key != "norm" && key != "submodule_ideal") {
      throw std::invalid_argument("module descriptor: unknown field \"" + key + "\"");
    }
  }
  RingPtr ring = make_ring(j.at("ring"));
  NormMode mode = NormMode::term;
  if (j.contains("norm")) {
    std::string m = j.at("norm").get<std::string>();
    if (m == "indicator") {
      mode = NormMode::indicator;
    } else if (m != "term") {
      throw std::invalid_argument("module descriptor: bad norm mode \"" + m + "\"");
    }
  }
  PIDIdeal ideal = parse_ideal(ring, j.at("submodule_ideal").get<std::string>());
  return SequenceModule(ring, ideal, mode);
}

// ---------------------------------------------------------------------------
// budgeted coefficient tuples

namespace {

Weight floor_to_weight(const Rat& q) {
  Int f = numerator(q) / denominator(q);
  if (f < 0) return 0;
  if (f > Int(1) << 20) throw std::invalid_argument("coefficient cap too large");
  return static_cast<Weight>(f);
}

using Slot = std::vector<std::pair<RingElement, Weight>>;

std::vector<Slot> budget_slots(const SequenceModule& P, std::size_t len, const Rat& budget) {
  std::vector<Slot> slots;
  for (std::size_t i = 0; i < len; ++i) {
    slots.push_back(P.elements_with_norm_at_most(floor_to_weight(budget * Rat(factorial(i)))));
  }
  return slots;
}

// visits every tuple with sum of |r_i|/i! <= budget, including the all-zero
// one; partials[i] = sum of r_j m_j over j < i
void for_each_tuple(
    const SequenceModule& P, const std::vector<L1Vector>& generators,
    const std::vector<Slot>& slots, const Rat& budget,
    const std::function<void(const std::vector<RingElement>&, const std::vector<Weight>&,
                             const std::vector<L1Vector>&)>& visit) {
  std::size_t len = slots.size();
  std::vector<RingElement> coeffs(len, P.ring()->zero());
  std::vector<Weight> norms(len, 0);
  std::vector<L1Vector> partials;
  partials.reserve(len + 1);
  partials.emplace_back(P.ring());

  std::function<void(std::size_t, const Rat&)> descend = [&](std::size_t i,
                                                             const Rat& remaining) {
    if (i == len) {
      visit(coeffs, norms, partials);
      return;
    }
    for (const auto& [elem, nrm] : slots[i]) {
      Rat cost = Rat(Int(nrm), factorial(i));
      if (cost > remaining) break;  // slots are sorted by norm
      coeffs[i] = elem;
      norms[i] = nrm;
      partials.push_back(P.ring()->is_zero(elem)
                             ? partials.back()
                             : l1_add(partials.back(), l1_scale(elem, generators[i])));
      descend(i + 1, remaining - cost);
      partials.pop_back();
    }
    coeffs[i] = P.ring()->zero();
    norms[i] = 0;
  };
  descend(0, budget);
}

}  // namespace

// ---------------------------------------------------------------------------
// ideal detection

IdealDetection detect_ideal(const SequenceModule& P, std::uint64_t depth,
                            std::uint64_t elements) {
  if (depth == 0 || elements == 0) {
    throw std::invalid_argument("detect_ideal: depth and elements must be positive");
  }
  const RingPtr& R = P.ring();

  std::vector<RingElement> candidates;
  for (std::uint64_t i = 0; i < elements; ++i) candidates.push_back(P.element_at(i));

  std::vector<RingElement> generators;
  std::uint64_t probes = 0;

  for (std::uint64_t k = 0; k < depth; ++k) {
    Rat radius(Int(1), Int(1) << k);

    std::vector<L1Vector> samples;
    for (std::uint64_t t = 1; t <= 64; ++t) {
      L1Vector v = P.vector_at(t);
      if (!v.is_zero() && P.vector_norm(v) < radius) samples.push_back(v);
    }
    // scaled basis vectors far enough out to fall inside U_k
    for (std::uint64_t c = 1; c <= 2; ++c) {
      RingElement scale = P.element_at(c);
      if (R->is_zero(scale)) continue;
      Rat n(Int(P.ring_norm(scale)));
      std::size_t j = 0;
      while (n / Rat(factorial(j)) >= radius) ++j;
      for (std::size_t jj = j; jj < j + 2; ++jj) {
        L1Vector e(R);
        e.set(jj, scale);
        samples.push_back(e);
      }
    }
    probes += samples.size();

    RingElement gen = R->zero();
    for (const auto& c : candidates) {
      bool member = true;
      for (const auto& u : samples) {
        if (!P.in_submodule(l1_scale(c, u))) {
          member = false;
          break;
        }
      }
      if (member) gen = R->gcd(gen, c);
    }
    // the fold must itself annihilate every sample into N
    for (const auto& u : samples) {
      if (!P.in_submodule(l1_scale(gen, u))) {
        throw BuildError(0, "detect_ideal",
                         "gcd of sampled members fails membership; presentation inconsistent");
      }
    }
    generators.push_back(make_ideal(R, gen).generator);
  }

  std::uint64_t stabilized = depth - 1;
  while (stabilized > 0 && generators[stabilized - 1] == generators.back()) --stabilized;
  if (depth >= 2 && generators[depth - 2] != generators[depth - 1]) {
    throw BuildError(0, "detect_ideal",
                     "ideal sequence did not stabilize within depth " + std::to_string(depth));
  }

  IdealDetection out{make_ideal(R, generators.back()), stabilized, probes, depth, elements};
  return out;
}

// ---------------------------------------------------------------------------
// step conditions, shared by the builder and the verifier

namespace {

struct StepContext {
  Weight smallness_cap = 0;
  Weight avoid_cap = 0;
  Weight coeff_cap = 0;
  bool coeff_exhaustive = false;
  std::vector<std::pair<RingElement, Weight>> small_scalars;  // nonzero
  std::vector<RingElement> avoid_scalars;                     // not in the ideal
  RingPtr quotient;  // null when the submodule ideal is zero
  std::vector<L1Vector> reduced_generators;
  std::vector<RingElement> coeff_elements;
};

Weight step_smallness_cap(std::size_t k) {
  Int cap = Int(k) * factorial(k);
  if (cap > Int(1) << 20) throw std::invalid_argument("step smallness cap too large");
  return static_cast<Weight>(cap);
}

L1Vector reduce_vector(const StepContext& ctx, const L1Vector& v) {
  if (!ctx.quotient) return v;
  L1Vector out(ctx.quotient);
  for (const auto& [k, e] : v.entries()) out.set(k, ctx.quotient->reduce(e));
  return out;
}

StepContext make_step_context(const SequenceModule& P, const std::vector<L1Vector>& generators,
                              std::size_t k, const PIDIdeal& detected,
                              const BuilderConfig& config) {
  StepContext ctx;
  ctx.smallness_cap = step_smallness_cap(k);
  ctx.avoid_cap = std::max(ctx.smallness_cap, config.avoid_scalar_floor);
  for (const auto& [e, n] : P.elements_with_norm_at_most(ctx.smallness_cap)) {
    if (!P.ring()->is_zero(e)) ctx.small_scalars.emplace_back(e, n);
  }
  for (const auto& [e, n] : P.elements_with_norm_at_most(ctx.avoid_cap)) {
    if (!detected.contains(e)) ctx.avoid_scalars.push_back(e);
  }

  const PIDIdeal& J = P.submodule_ideal();
  RingPtr coeff_ring = P.ring();
  if (!J.is_zero()) {
    ctx.quotient = quotient_ring(P.ring(), J);
    coeff_ring = ctx.quotient;
  }
  for (std::size_t i = 0; i < k; ++i) {
    ctx.reduced_generators.push_back(reduce_vector(ctx, generators[i]));
  }
  if (coeff_ring->finite()) {
    ctx.coeff_exhaustive = true;
    ctx.coeff_cap = 0;
    ctx.coeff_elements = coeff_ring->atoms_up_to(~Weight(0) >> 1);
  } else {
    ctx.coeff_exhaustive = false;
    ctx.coeff_cap = config.coeff_cap;
    for (const auto& [e, n] : P.elements_with_norm_at_most(ctx.coeff_cap)) {
      ctx.coeff_elements.push_back(e);
    }
  }
  return ctx;
}

// is target a coefficient combination of the reduced generators?
bool in_bounded_span(const StepContext& ctx, const L1Vector& target) {
  const RingPtr ring = ctx.quotient ? ctx.quotient : target.ring();
  std::size_t k = ctx.reduced_generators.size();
  L1Vector acc(ring);
  std::function<bool(std::size_t, const L1Vector&)> descend =
      [&](std::size_t i, const L1Vector& sum) -> bool {
    if (i == k) return sum == target;
    for (const auto& s : ctx.coeff_elements) {
      L1Vector next = ring->is_zero(s)
                          ? sum
                          : l1_add(sum, l1_scale(s, ctx.reduced_generators[i]));
      if (descend(i + 1, next)) return true;
    }
    return false;
  };
  return descend(0, acc);
}

std::uint64_t coefficient_tuple_count(const StepContext& ctx) {
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < ctx.reduced_generators.size(); ++i) {
    total *= ctx.coeff_elements.size();
  }
  return total;
}

// both generator conditions; fills smallness evidence when requested
bool generator_passes(const SequenceModule& P, const StepContext& ctx, const Rat& epsilon,
                      const L1Vector& candidate, SmallnessEvidence* smallness_out) {
  if (candidate.is_zero()) return false;
  Rat half = epsilon / 2;

  std::optional<Rat> max_norm;
  std::optional<std::string> argmax;
  for (const auto& [r, nrm] : ctx.small_scalars) {
    Rat n = P.vector_norm(l1_scale(r, candidate));
    if (!max_norm || n > *max_norm) {
      max_norm = n;
      argmax = P.ring()->format(r);
    }
    if (n >= half) return false;
  }

  for (const auto& r : ctx.avoid_scalars) {
    L1Vector target = reduce_vector(ctx, l1_scale(r, candidate));
    if (in_bounded_span(ctx, target)) return false;
  }

  if (smallness_out) {
    smallness_out->scalar_cap = ctx.smallness_cap;
    smallness_out->scalars_checked = ctx.small_scalars.size();
    smallness_out->max_scaled_norm = max_norm;
    smallness_out->argmax_scalar = argmax;
  }
  return true;
}

Rat pinned_epsilon(const SequenceModule& P, const std::vector<L1Vector>& generators,
                   const std::vector<Rat>& epsilons, std::size_t k, EpsilonEvidence& evidence) {
  if (k == 0) return 1;
  Rat slack = epsilons[k - 1] / 2;

  auto slots = budget_slots(P, k, Rat(Int(k)));
  std::optional<Rat> min_norm, min_dist;
  std::vector<std::string> argmin_norm, argmin_dist;

  for_each_tuple(P, generators, slots, Rat(Int(k)),
                 [&](const std::vector<RingElement>& coeffs, const std::vector<Weight>&,
                     const std::vector<L1Vector>& partials) {
                   ++evidence.tuples_checked;
                   const L1Vector& combo = partials.back();
                   if (!combo.is_zero()) {
                     Rat n = P.vector_norm(combo);
                     if (!min_norm || n < *min_norm) {
                       min_norm = n;
                       argmin_norm.clear();
                       for (const auto& c : coeffs) argmin_norm.push_back(P.ring()->format(c));
                     }
                   }
                   if (!P.in_level_set(combo, k)) {
                     Rat d = P.distance_to_level_set(combo, k);
                     if (d == 0) {
                       throw BuildError(k, "epsilon",
                                        "zero distance to the level set for a combination "
                                        "outside N; presentation inconsistent");
                     }
                     if (!min_dist || d < *min_dist) {
                       min_dist = d;
                       argmin_dist.clear();
                       for (const auto& c : coeffs) argmin_dist.push_back(P.ring()->format(c));
                     }
                   }
                 });

  evidence.min_combo_norm = min_norm;
  evidence.min_combo_tuple = argmin_norm;
  evidence.min_distance = min_dist;
  evidence.min_distance_tuple = argmin_dist;

  Rat m = slack;
  if (min_norm && *min_norm < m) m = *min_norm;
  if (min_dist && *min_dist < m) m = *min_dist;
  return m / 2;
}

}  // namespace

// ---------------------------------------------------------------------------
// build

EmbeddingCertificate build_embedding(const SequenceModule& P, const BuilderConfig& config) {
  if (config.steps == 0) throw std::invalid_argument("build_embedding: steps must be >= 1");

  EmbeddingCertificate cert;
  cert.module = P.descriptor();
  cert.config = config;
  cert.detection = detect_ideal(P, config.detect_depth, config.detect_elements);

  std::vector<L1Vector> generators;
  std::vector<Rat> epsilons;

  for (std::size_t k = 0; k < config.steps; ++k) {
    BuildStep step(P.ring());
    step.k = k;
    step.epsilon = pinned_epsilon(P, generators, epsilons, k, step.epsilon_evidence);

    StepContext ctx = make_step_context(P, generators, k, cert.detection.ideal, config);

    bool found = false;
    for (std::uint64_t t = 1; t <= config.scan_bound; ++t) {
      L1Vector candidate = P.vector_at(t);
      SmallnessEvidence smallness;
      if (generator_passes(P, ctx, step.epsilon, candidate, &smallness)) {
        step.generator = candidate;
        step.found_at = t;
        step.smallness = smallness;
        step.avoidance.scalar_cap = ctx.avoid_cap;
        step.avoidance.scalars_checked = ctx.avoid_scalars.size();
        step.avoidance.coefficient_tuples = coefficient_tuple_count(ctx);
        step.avoidance.coefficients_exhaustive = ctx.coeff_exhaustive;
        step.avoidance.coeff_cap = ctx.coeff_cap;
        found = true;
        break;
      }
    }
    if (!found) {
      throw BuildError(k, "generator",
                       "enumeration exhausted within scan bound " +
                           std::to_string(config.scan_bound) + " at step " + std::to_string(k));
    }
    generators.push_back(step.generator);
    epsilons.push_back(step.epsilon);
    cert.steps.push_back(std::move(step));
  }
  return cert;
}

L1Vector evaluate_map(const SequenceModule& P, const EmbeddingCertificate& cert,
                      const std::vector<RingElement>& coeffs) {
  if (coeffs.size() > cert.steps.size()) {
    throw std::invalid_argument("evaluate_map: more coefficients than generators");
  }
  Rat budget = 0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    budget += Rat(Int(P.ring_norm(coeffs[k])), factorial(k));
  }
  if (budget > cert.config.verify_bound) {
    throw std::invalid_argument("evaluate_map: coefficient outside verified bound " +
                                format_rat(cert.config.verify_bound));
  }
  L1Vector sum(P.ring());
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    if (!P.ring()->is_zero(coeffs[k])) {
      sum = l1_add(sum, l1_scale(coeffs[k], cert.steps[k].generator));
    }
  }
  return sum;
}

// ---------------------------------------------------------------------------
// verification

namespace {

std::string tuple_to_string(const SequenceModule& P, const std::vector<RingElement>& coeffs) {
  std::string out = "(";
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (i) out += ", ";
    out += P.ring()->format(coeffs[i]);
  }
  return out + ")";
}

}  // namespace

bool VerifyReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.pass; });
}

VerifyReport verify_certificate(const SequenceModule& P, const EmbeddingCertificate& cert,
                                const Rat& bound) {
  VerifyReport report;
  report.bound = bound;
  auto check = [&](std::string name, bool pass, std::string detail = {}) {
    report.checks.push_back({std::move(name), pass, std::move(detail)});
  };

  check("module-descriptor", nlohmann::json(P.descriptor()) == nlohmann::json(cert.module),
        "certificate module descriptor matches the presentation");
  check("steps-count", cert.steps.size() == cert.config.steps);

  try {
    IdealDetection det = detect_ideal(P, cert.detection.depth, cert.detection.elements);
    check("ideal-detection",
          det.ideal == cert.detection.ideal && det.stabilized_at == cert.detection.stabilized_at,
          "re-derived " + format_ideal(det.ideal) + " stabilized at " +
              std::to_string(det.stabilized_at));
  } catch (const std::exception& e) {
    check("ideal-detection", false, e.what());
  }

  std::size_t K = cert.steps.size();
  std::vector<L1Vector> generators;
  std::vector<Rat> epsilons;
  for (const auto& step : cert.steps) {
    generators.push_back(step.generator);
    epsilons.push_back(step.epsilon);
  }

  // epsilon cascade
  {
    bool ok = true;
    std::string detail;
    for (std::size_t k = 0; k < K && ok; ++k) {
      if (epsilons[k] <= 0) {
        ok = false;
        detail = "epsilon_" + std::to_string(k) + " must be positive";
      }
      for (std::size_t i = 0; i < k && ok; ++i) {
        if (!(epsilons[k] < epsilons[i] / 2)) {
          ok = false;
          detail = "epsilon_" + std::to_string(k) + " >= epsilon_" + std::to_string(i) + "/2";
        }
      }
    }
    check("epsilon-cascade", ok, detail);
  }

  for (std::size_t k = 0; k < K; ++k) {
    const BuildStep& step = cert.steps[k];
    std::vector<L1Vector> prefix(generators.begin(), generators.begin() + k);
    std::vector<Rat> eps_prefix(epsilons.begin(), epsilons.begin() + k);
    std::string tag = "[" + std::to_string(k) + "]";

    // pinned epsilon formula and conditions (ii)/(iii)
    try {
      EpsilonEvidence ev;
      Rat expected = pinned_epsilon(P, prefix, eps_prefix, k, ev);
      bool ok = expected == step.epsilon &&
                ev.tuples_checked == step.epsilon_evidence.tuples_checked &&
                ev.min_combo_norm == step.epsilon_evidence.min_combo_norm &&
                ev.min_combo_tuple == step.epsilon_evidence.min_combo_tuple &&
                ev.min_distance == step.epsilon_evidence.min_distance &&
                ev.min_distance_tuple == step.epsilon_evidence.min_distance_tuple;
      bool ineq = (!ev.min_combo_norm || step.epsilon <= *ev.min_combo_norm) &&
                  (!ev.min_distance || step.epsilon <= *ev.min_distance);
      check("epsilon-pinned" + tag, ok,
            ok ? "re-derived " + format_rat(expected)
               : "recorded " + format_rat(step.epsilon) + ", re-derived " + format_rat(expected));
      check("epsilon-inequalities" + tag, ineq);
    } catch (const std::exception& e) {
      check("epsilon-pinned" + tag, false, e.what());
    }

    // generator conditions and first-fit provenance
    try {
      StepContext ctx = make_step_context(P, prefix, k, cert.detection.ideal, cert.config);
      SmallnessEvidence smallness;
      bool passes = generator_passes(P, ctx, step.epsilon, step.generator, &smallness);
      check("generator-conditions" + tag, passes);
      check("generator-evidence" + tag,
            passes && smallness.scalar_cap == step.smallness.scalar_cap &&
                smallness.scalars_checked == step.smallness.scalars_checked &&
                smallness.max_scaled_norm == step.smallness.max_scaled_norm &&
                smallness.argmax_scalar == step.smallness.argmax_scalar &&
                ctx.avoid_cap == step.avoidance.scalar_cap &&
                ctx.avoid_scalars.size() == step.avoidance.scalars_checked &&
                coefficient_tuple_count(ctx) == step.avoidance.coefficient_tuples &&
                ctx.coeff_exhaustive == step.avoidance.coefficients_exhaustive &&
                ctx.coeff_cap == step.avoidance.coeff_cap);

      bool first_fit = P.vector_at(step.found_at) == step.generator;
      std::string detail;
      for (std::uint64_t t = 1; t < step.found_at && first_fit; ++t) {
        if (generator_passes(P, ctx, step.epsilon, P.vector_at(t), nullptr)) {
          first_fit = false;
          detail = "candidate at index " + std::to_string(t) + " already satisfies the conditions";
        }
      }
      check("first-fit" + tag, first_fit, detail);
    } catch (const std::exception& e) {
      check("generator-conditions" + tag, false, e.what());
    }
  }

  // exhaustive tuple replay at the bound
  {
    std::uint64_t kernel_failures = 0, replay_failures = 0;
    std::string first_failure;
    auto slots = budget_slots(P, K, bound);
    for_each_tuple(
        P, generators, slots, bound,
        [&](const std::vector<RingElement>& coeffs, const std::vector<Weight>& norms,
            const std::vector<L1Vector>& partials) {
          ++report.tuples_checked;
          bool kernel_expected = true;
          for (const auto& c : coeffs) {
            if (!cert.detection.ideal.contains(c)) {
              kernel_expected = false;
              break;
            }
          }
          const L1Vector& image = partials.back();
          bool in_n = P.in_submodule(image);
          if (in_n != kernel_expected) {
            ++kernel_failures;
            if (first_failure.empty()) {
              first_failure = "tuple " + tuple_to_string(P, coeffs) +
                              (in_n ? " lands in N but has a coefficient outside I"
                                    : " is flagged kernel but misses N");
            }
            return;
          }
          if (kernel_expected) {
            ++report.kernel_tuples;
            return;
          }
          // the proof's inequality replay at the first applicable level
          Rat total = 0;
          for (std::size_t i = 0; i < K; ++i) total += Rat(Int(norms[i]), factorial(i));
          for (std::size_t n = 1; n < K; ++n) {
            if (total > Rat(Int(n))) continue;
            if (P.in_level_set(partials[n], n)) continue;
            bool tails_in_range = true;
            for (std::size_t i = 0; n + i < K; ++i) {
              if (Int(norms[n + i]) > Int(n + i) * factorial(n + i)) {
                tails_in_range = false;
                break;
              }
            }
            if (!tails_in_range) continue;

            bool ok = epsilons[n] <= P.distance_to_level_set(partials[n], n);
            Rat tail_sum = 0;
            for (std::size_t i = 0; n + i < K && ok; ++i) {
              Rat term = P.vector_norm(l1_scale(coeffs[n + i], generators[n + i]));
              if (!(term < epsilons[n] / Rat(Int(1) << (i + 1)))) ok = false;
              tail_sum += term;
            }
            if (ok && !(tail_sum < epsilons[n])) ok = false;
            if (!ok) {
              ++replay_failures;
              if (first_failure.empty()) {
                first_failure = "inequality replay failed for tuple " +
                                tuple_to_string(P, coeffs) + " at level " + std::to_string(n);
              }
            } else {
              ++report.replayed_inequalities;
            }
            break;
          }
        });
    check("kernel-replay", kernel_failures == 0,
          kernel_failures ? first_failure
                          : std::to_string(report.kernel_tuples) + " kernel tuples of " +
                                std::to_string(report.tuples_checked));
    check("avoidance-replay", replay_failures == 0,
          replay_failures ? first_failure
                          : std::to_string(report.replayed_inequalities) +
                                " inequality replays re-verified");
  }

  // distinct cosets: by linearity it is enough that every difference tuple
  // within twice the bound stays outside N unless it lies in the kernel
  {
    std::uint64_t failures = 0;
    std::string first_failure;
    Rat twice = bound * 2;
    auto slots = budget_slots(P, K, twice);
    for_each_tuple(P, generators, slots, twice,
                   [&](const std::vector<RingElement>& coeffs, const std::vector<Weight>&,
                       const std::vector<L1Vector>& partials) {
                     ++report.difference_tuples;
                     bool kernel_expected = true;
                     for (const auto& c : coeffs) {
                       if (!cert.detection.ideal.contains(c)) {
                         kernel_expected = false;
                         break;
                       }
                     }
                     if (P.in_submodule(partials.back()) != kernel_expected) {
                       ++failures;
                       if (first_failure.empty()) {
                         first_failure = "difference tuple " + tuple_to_string(P, coeffs);
                       }
                     }
                   });
    check("distinct-cosets", failures == 0,
          failures ? first_failure
                   : std::to_string(report.difference_tuples) + " difference tuples separated");
  }

  return report;
}

// ---------------------------------------------------------------------------
// serialization

nlohmann::ordered_json BuilderConfig::to_json() const {
  nlohmann::ordered_json j;
  j["steps"] = steps;
  j["scan_bound"] = scan_bound;
  j["avoid_scalar_floor"] = avoid_scalar_floor;
  j["coeff_cap"] = coeff_cap;
  j["detect_depth"] = detect_depth;
  j["detect_elements"] = detect_elements;
  j["verify_bound"] = format_rat(verify_bound);
  return j;
}

BuilderConfig BuilderConfig::from_json(const nlohmann::json& j) {
  BuilderConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "steps") {
      c.steps = value.get<std::uint64_t>();
    } else if (key == "scan_bound") {
      c.scan_bound = value.get<std::uint64_t>();
    } else if (key == "avoid_scalar_floor") {
      c.avoid_scalar_floor = value.get<Weight>();
    } else if (key == "coeff_cap") {
      c.coeff_cap = value.get<Weight>();
    } else if (key == "detect_depth") {
      c.detect_depth = value.get<std::uint64_t>();
    } else if (key == "detect_elements") {
      c.detect_elements = value.get<std::uint64_t>();
    } else if (key == "verify_bound") {
      std::optional<Rat> b = value.is_string() ? parse_rat(value.get<std::string>())
                                               : Rat(value.get<std::int64_t>());
      if (!b || *b <= 0) throw std::invalid_argument("config: bad verify_bound");
      c.verify_bound = *b;
    } else {
      throw std::invalid_argument("config: unknown field \"" + key + "\"");
    }
  }
  if (c.steps == 0) throw std::invalid_argument("config: steps must be >= 1");
  if (c.scan_bound == 0 || c.detect_depth == 0 || c.detect_elements == 0) {
    throw std::invalid_argument("config: bounds must be positive");
  }
  return c;
}

namespace {

nlohmann::ordered_json rat_or_null(const std::optional<Rat>& q) {
  if (!q) return nullptr;
  return format_rat(*q);
}

std::optional<Rat> rat_from(const nlohmann::json& j) {
  if (j.is_null()) return {};
  auto q = parse_rat(j.get<std::string>());
  if (!q) throw std::invalid_argument("certificate: bad rational");
  return q;
}

nlohmann::ordered_json entries_json(const L1Vector& v) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& [k, e] : v.entries()) arr.push_back({k, v.ring()->format(e)});
  return arr;
}

}  // namespace

nlohmann::ordered_json EmbeddingCertificate::to_json() const {
  nlohmann::ordered_json j;
  j["format"] = "embedding-certificate";
  j["version"] = 1;
  j["module"] = module;
  j["config"] = config.to_json();
  {
    nlohmann::ordered_json d;
    d["ideal"] = detection.ideal.ring->format(detection.ideal.generator);
    d["zero"] = detection.ideal.is_zero();
    d["stabilized_at"] = detection.stabilized_at;
    d["probes"] = detection.probes;
    d["depth"] = detection.depth;
    d["elements"] = detection.elements;
    j["detection"] = d;
  }
  auto steps_json = nlohmann::ordered_json::array();
  for (const auto& s : steps) {
    nlohmann::ordered_json sj;
    sj["k"] = s.k;
    sj["epsilon"] = format_rat(s.epsilon);
    sj["epsilon_evidence"] = {{"tuples_checked", s.epsilon_evidence.tuples_checked},
                              {"min_combo_norm", rat_or_null(s.epsilon_evidence.min_combo_norm)},
                              {"min_combo_tuple", s.epsilon_evidence.min_combo_tuple},
                              {"min_distance", rat_or_null(s.epsilon_evidence.min_distance)},
                              {"min_distance_tuple", s.epsilon_evidence.min_distance_tuple}};
    sj["generator"] = entries_json(s.generator);
    sj["found_at"] = s.found_at;
    sj["smallness"] = {
        {"scalar_cap", s.smallness.scalar_cap},
        {"scalars_checked", s.smallness.scalars_checked},
        {"max_scaled_norm", rat_or_null(s.smallness.max_scaled_norm)},
        {"argmax_scalar",
         s.smallness.argmax_scalar ? nlohmann::ordered_json(*s.smallness.argmax_scalar)
                                   : nlohmann::ordered_json(nullptr)}};
    sj["avoidance"] = {{"scalar_cap", s.avoidance.scalar_cap},
                       {"scalars_checked", s.avoidance.scalars_checked},
                       {"coefficient_tuples", s.avoidance.coefficient_tuples},
                       {"coefficients_exhaustive", s.avoidance.coefficients_exhaustive},
                       {"coeff_cap", s.avoidance.coeff_cap}};
    steps_json.push_back(sj);
  }
  j["steps"] = steps_json;
  return j;
}

EmbeddingCertificate EmbeddingCertificate::from_json(const nlohmann::json& j) {
  if (!j.contains("format") || j.at("format") != "embedding-certificate") {
    throw std::invalid_argument("certificate: bad format marker");
  }
  EmbeddingCertificate cert;
  cert.module = j.at("module");
  cert.config = BuilderConfig::from_json(j.at("config"));

  RingPtr ring = make_ring(cert.module.at("ring"));
  const auto& d = j.at("detection");
  cert.detection.ideal = parse_ideal(ring, d.at("ideal").get<std::string>());
  cert.detection.stabilized_at = d.at("stabilized_at").get<std::uint64_t>();
  cert.detection.probes = d.at("probes").get<std::uint64_t>();
  cert.detection.depth = d.at("depth").get<std::uint64_t>();
  cert.detection.elements = d.at("elements").get<std::uint64_t>();

  for (const auto& sj : j.at("steps")) {
    BuildStep s(ring);
    s.k = sj.at("k").get<std::size_t>();
    auto eps = parse_rat(sj.at("epsilon").get<std::string>());
    if (!eps) throw std::invalid_argument("certificate: bad epsilon");
    s.epsilon = *eps;
    const auto& ee = sj.at("epsilon_evidence");
    s.epsilon_evidence.tuples_checked = ee.at("tuples_checked").get<std::uint64_t>();
    s.epsilon_evidence.min_combo_norm = rat_from(ee.at("min_combo_norm"));
    s.epsilon_evidence.min_combo_tuple =
        ee.at("min_combo_tuple").get<std::vector<std::string>>();
    s.epsilon_evidence.min_distance = rat_from(ee.at("min_distance"));
    s.epsilon_evidence.min_distance_tuple =
        ee.at("min_distance_tuple").get<std::vector<std::string>>();
    s.generator = L1Vector::from_json(ring, sj.at("generator"));
    s.found_at = sj.at("found_at").get<std::uint64_t>();
    const auto& sm = sj.at("smallness");
    s.smallness.scalar_cap = sm.at("scalar_cap").get<Weight>();
    s.smallness.scalars_checked = sm.at("scalars_checked").get<std::uint64_t>();
    s.smallness.max_scaled_norm = rat_from(sm.at("max_scaled_norm"));
    if (!sm.at("argmax_scalar").is_null()) {
      s.smallness.argmax_scalar = sm.at("argmax_scalar").get<std::string>();
    }
    const auto& av = sj.at("avoidance");
    s.avoidance.scalar_cap = av.at("scalar_cap").get<Weight>();
    s.avoidance.scalars_checked = av.at("scalars_checked").get<std::uint64_t>();
    s.avoidance.coefficient_tuples = av.at("coefficient_tuples").get<std::uint64_t>();
    s.avoidance.coefficients_exhaustive = av.at("coefficients_exhaustive").get<bool>();
    s.avoidance.coeff_cap = av.at("coeff_cap").get<Weight>();
    cert.steps.push_back(std::move(s));
  }
  return cert;
}

nlohmann::ordered_json VerifyReport::to_json() const {
  nlohmann::ordered_json j;
  j["bound"] = format_rat(bound);
  auto arr = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json cj;
    cj["name"] = c.name;
    cj["pass"] = c.pass;
    if (!c.detail.empty()) cj["detail"] = c.detail;
    arr.push_back(cj);
  }
  j["checks"] = arr;
  j["tuples_checked"] = tuples_checked;
  j["kernel_tuples"] = kernel_tuples;
  j["replayed_inequalities"] = replayed_inequalities;
  j["difference_tuples"] = difference_tuples;
  j["pass"] = pass();
  return j;
}

}  // namespace polmod
