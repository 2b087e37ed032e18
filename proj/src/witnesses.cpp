#include "polmod/witnesses.hpp"

#include <algorithm>
#include <mutex>
#include <stdexcept>

namespace polmod {

namespace {

// positive rationals of height h = max(num, den), by value: a/h for a
// coprime ascending, then h/b for b coprime descending
std::vector<Rat> positives_of_height(std::uint64_t h) {
  if (h == 1) return {Rat(1)};
  std::vector<Rat> out;
  for (std::uint64_t a = 1; a < h; ++a) {
    if (boost::multiprecision::gcd(Int(a), Int(h)) == 1) out.emplace_back(Int(a), Int(h));
  }
  for (std::uint64_t b = h - 1; b >= 1; --b) {
    if (boost::multiprecision::gcd(Int(h), Int(b)) == 1) out.emplace_back(Int(h), Int(b));
  }
  return out;
}

Rat positive_at(std::uint64_t i) {
  static std::vector<Rat> cache;
  static std::uint64_t next_height = 1;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  while (cache.size() <= i) {
    for (auto& q : positives_of_height(next_height)) cache.push_back(std::move(q));
    ++next_height;
    if (next_height > (std::uint64_t(1) << 24)) {
      throw std::invalid_argument("rational_at: index too large");
    }
  }
  return cache[i];
}

}  // namespace

Rat rational_at(std::uint64_t m) {
  if (m == 0) return Rat(0);
  Rat p = positive_at((m - 1) / 2);
  return m % 2 == 1 ? p : Rat(-p);
}

ChiVector chi_prefix(const Rat& x, std::size_t window, const RingPtr& ring) {
  ChiVector chi;
  chi.x = x;
  chi.window = window;
  chi.ring = ring;
  auto one_norm = norm(ring, ring->one(), ring->weight(ring->one()));
  chi.one_norm = std::get<Weight>(one_norm);  // |1| <= w(1) always resolves
  chi.bits.resize(window);
  chi.prefix_norm = 0;
  for (std::size_t m = 0; m < window; ++m) {
    chi.bits[m] = rational_at(m) < x;
    if (chi.bits[m]) chi.prefix_norm += Rat(Int(chi.one_norm), factorial(m));
  }
  if (window == 0) {
    chi.tail_bound = Rat(Int(chi.one_norm) * 3);
  } else {
    chi.tail_bound = Rat(Int(chi.one_norm) * 2, factorial(window));
  }
  return chi;
}

L1Vector ChiVector::to_vector() const {
  L1Vector v(ring);
  for (std::size_t m = 0; m < bits.size(); ++m) {
    if (bits[m]) v.set(m, ring->one());
  }
  return v;
}

nlohmann::ordered_json ChiVector::to_json() const {
  nlohmann::ordered_json j;
  j["x"] = format_rat(x);
  j["window"] = window;
  j["ring"] = ring->descriptor();
  std::string bitstring;
  for (bool b : bits) bitstring += b ? '1' : '0';
  j["bits"] = bitstring;
  auto support = nlohmann::ordered_json::array();
  for (std::size_t m = 0; m < bits.size(); ++m) {
    if (bits[m]) support.push_back(m);
  }
  j["support"] = support;
  j["one_norm"] = one_norm;
  j["prefix_norm"] = format_rat(prefix_norm);
  j["tail_bound"] = format_rat(tail_bound);
  return j;
}

namespace {

std::size_t rank_over_q(std::vector<std::vector<Rat>> m) {
  std::size_t rank = 0;
  std::size_t rows = m.size();
  if (rows == 0) return 0;
  std::size_t cols = m[0].size();
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t pivot = rank;
    while (pivot < rows && m[pivot][c] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(m[rank], m[pivot]);
    for (std::size_t r = rank + 1; r < rows; ++r) {
      if (m[r][c] == 0) continue;
      Rat f = m[r][c] / m[rank][c];
      for (std::size_t cc = c; cc < cols; ++cc) m[r][cc] -= f * m[rank][cc];
    }
    ++rank;
  }
  return rank;
}

// first index m < limit with low <= q_m < high (low empty means q_m < high)
std::optional<std::size_t> first_separator(const std::optional<Rat>& low, const Rat& high,
                                           std::size_t limit) {
  for (std::size_t m = 0; m < limit; ++m) {
    Rat q = rational_at(m);
    if (q < high && (!low || *low <= q)) return m;
  }
  return {};
}

}  // namespace

IndependenceResult independence_check(const std::vector<Rat>& params, std::size_t window) {
  std::vector<Rat> sorted = params;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("independence_check: parameters must be distinct");
  }
  IndependenceResult out;

  std::vector<std::vector<Rat>> matrix(params.size(), std::vector<Rat>(window));
  for (std::size_t m = 0; m < window; ++m) {
    Rat q = rational_at(m);
    for (std::size_t i = 0; i < params.size(); ++i) {
      matrix[i][m] = q < params[i] ? 1 : 0;
    }
  }
  out.rank = rank_over_q(std::move(matrix));
  out.independent = out.rank == params.size();

  bool all_found = true;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    std::optional<Rat> low;
    if (i > 0) low = sorted[i - 1];
    auto col = first_separator(low, sorted[i], window);
    if (col) {
      out.witness_columns.push_back(*col);
    } else {
      all_found = false;
    }
  }
  if (!all_found) out.witness_columns.clear();

  if (!out.independent) {
    // least window for which every gap is separated
    constexpr std::size_t kScanLimit = std::size_t(1) << 22;
    std::size_t needed = 0;
    bool ok = true;
    for (std::size_t i = 0; i < sorted.size() && ok; ++i) {
      std::optional<Rat> low;
      if (i > 0) low = sorted[i - 1];
      auto col = first_separator(low, sorted[i], kScanLimit);
      if (col) {
        needed = std::max(needed, *col + 1);
      } else {
        ok = false;
      }
    }
    if (ok) out.minimal_window = needed;
  }
  return out;
}

nlohmann::ordered_json IndependenceResult::to_json() const {
  nlohmann::ordered_json j;
  j["independent"] = independent;
  j["rank"] = rank;
  j["witness_columns"] = witness_columns;
  if (minimal_window) j["minimal_window"] = *minimal_window;
  return j;
}

EscapeWitness erdos_escape_witness(const RingPtr& ring, const std::vector<RingElement>& prefix,
                                   const Rat& eps, Weight cap) {
  if (ring->finite()) {
    throw std::invalid_argument("erdos_escape_witness: ring must be infinite");
  }
  std::size_t n = prefix.size();
  Rat threshold = Rat(factorial(n)) * eps;
  if (threshold < 0) throw std::invalid_argument("erdos_escape_witness: eps must be >= 0");
  Int floor_t = numerator(threshold) / denominator(threshold);
  if (floor_t > Int(1) << 20) {
    throw std::invalid_argument("erdos_escape_witness: threshold too large");
  }
  Weight ball_radius = static_cast<Weight>(floor_t);
  NormBall ball = build_ball(ring, ball_radius);

  for (const auto& candidate : ring->atoms_up_to(cap)) {
    if (ball.lookup(candidate)) continue;
    // candidate is outside ball(floor(threshold)), so |r| > threshold;
    // resolve the exact norm (always possible within the atom weight)
    Weight exact = std::get<Weight>(norm(ring, candidate, ring->weight(candidate)));
    L1Vector extended(ring);
    for (std::size_t k = 0; k < n; ++k) extended.set(k, prefix[k]);
    extended.set(n, candidate);
    Weight entry_cap = exact;
    for (const auto& [k, e] : extended.entries()) {
      entry_cap = std::max(entry_cap, ring->weight(e));
    }
    Rat extended_norm = std::get<Rat>(l1_norm(extended, entry_cap));
    return EscapeWitness{candidate, exact, threshold, extended, extended_norm};
  }
  throw std::runtime_error("erdos_escape_witness: cap " + std::to_string(cap) +
                           " exhausted before finding a witness");
}

nlohmann::ordered_json EscapeWitness::to_json() const {
  nlohmann::ordered_json j;
  j["witness"] = extended.ring()->format(witness);
  j["norm"] = norm;
  j["threshold"] = format_rat(threshold);
  j["extended_vector"] = extended.to_json();
  j["extended_norm"] = format_rat(extended_norm);
  return j;
}

}  // namespace polmod
