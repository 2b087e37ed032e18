#include "polmod/ring.hpp"

#include <algorithm>
#include <stdexcept>

#include "polmod/ideal.hpp"

namespace polmod {

namespace {

constexpr Weight kWeightMax = ~Weight(0);

Weight saturating_from_int(const Int& w) {
  if (w > Int(kWeightMax)) return kWeightMax;
  return static_cast<Weight>(w);
}

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

std::int64_t coeff_lift(std::int64_t c, std::int64_t p) {
  // least-absolute-value lift, so that w(f) = w(-f)
  return std::min(c, p - c);
}

void trim(PolyCoeffs& c) {
  while (!c.empty() && c.back() == 0) c.pop_back();
}

int poly_degree(const PolyCoeffs& c) { return static_cast<int>(c.size()) - 1; }

}  // namespace

Weight Ring::weight(const RingElement& r) const {
  auto it = overrides_.find(r);
  if (it != overrides_.end()) return it->second;
  return default_weight(r);
}

std::vector<RingElement> Ring::atoms_up_to(Weight n) const {
  std::vector<RingElement> out;
  for (auto& r : default_atoms(n)) {
    if (weight(r) <= n) out.push_back(r);
  }
  for (auto& [r, w] : overrides_) {
    if (w <= n && default_weight(r) > n) out.push_back(r);
  }
  std::sort(out.begin(), out.end(), [&](const RingElement& a, const RingElement& b) {
    Weight wa = weight(a), wb = weight(b);
    if (wa != wb) return wa < wb;
    return canonical_less(a, b);
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool Ring::divides(const RingElement&, const RingElement&) const {
  throw std::invalid_argument(name() + ": divisibility not supported");
}
RingElement Ring::gcd(const RingElement&, const RingElement&) const {
  throw std::invalid_argument(name() + ": gcd not supported");
}
RingElement Ring::divide_exact(const RingElement&, const RingElement&) const {
  throw std::invalid_argument(name() + ": exact division not supported");
}
RingElement Ring::canonical_mod(const RingElement&, const RingElement&) const {
  throw std::invalid_argument(name() + ": modular reduction not supported");
}
RingElement Ring::reduce(const RingElement&) const {
  throw std::invalid_argument(name() + ": not a quotient presentation");
}
RingElement Ring::lift(const RingElement&) const {
  throw std::invalid_argument(name() + ": not a quotient presentation");
}

nlohmann::ordered_json Ring::descriptor() const {
  auto d = base_descriptor();
  if (!overrides_.empty()) {
    auto table = nlohmann::ordered_json::array();
    for (auto& [r, w] : overrides_) {
      table.push_back({format(r), w});
    }
    d["weights"] = table;
  }
  return d;
}

bool Ring::same_presentation(const Ring& other) const {
  if (this == &other) return true;
  // key-order-insensitive comparison
  return nlohmann::json(descriptor()) == nlohmann::json(other.descriptor());
}

// ---------------------------------------------------------------------------
// Z

class IntegerRing final : public Ring {
 public:
  RingKind kind() const override { return RingKind::integers; }
  std::string name() const override { return "Z"; }
  bool finite() const override { return false; }

  RingElement zero() const override { return RingElement(Int(0)); }
  RingElement one() const override { return RingElement(Int(1)); }
  RingElement add(const RingElement& a, const RingElement& b) const override {
    return RingElement(Int(a.as_int() + b.as_int()));
  }
  RingElement neg(const RingElement& a) const override {
    return RingElement(Int(-a.as_int()));
  }
  RingElement mul(const RingElement& a, const RingElement& b) const override {
    return RingElement(Int(a.as_int() * b.as_int()));
  }

  bool canonical_less(const RingElement& a, const RingElement& b) const override {
    Int aa = abs_int(a.as_int()), ab = abs_int(b.as_int());
    if (aa != ab) return aa < ab;
    return a.as_int() > b.as_int();  // positive before negative
  }

  std::string format(const RingElement& r) const override { return r.as_int().str(); }
  std::optional<RingElement> parse(std::string_view text) const override {
    auto n = parse_int(text);
    if (!n) return {};
    return RingElement(*n);
  }

  bool divides(const RingElement& d, const RingElement& a) const override {
    if (d.as_int() == 0) return a.as_int() == 0;
    return a.as_int() % d.as_int() == 0;
  }
  RingElement gcd(const RingElement& a, const RingElement& b) const override {
    return RingElement(Int(boost::multiprecision::gcd(a.as_int(), b.as_int())));
  }
  RingElement divide_exact(const RingElement& a, const RingElement& d) const override {
    if (d.as_int() == 0 || a.as_int() % d.as_int() != 0) {
      throw std::invalid_argument("Z: not exactly divisible");
    }
    return RingElement(Int(a.as_int() / d.as_int()));
  }
  RingElement canonical_mod(const RingElement& a, const RingElement& g) const override {
    Int m = abs_int(g.as_int());
    if (m == 0) throw std::invalid_argument("Z: reduction modulo (0)");
    Int r = a.as_int() % m;
    if (r < 0) r += m;
    return RingElement(r);
  }

 protected:
  Weight default_weight(const RingElement& r) const override {
    if (r.as_int() == 0) return 0;
    return saturating_from_int(abs_int(r.as_int()) + 1);
  }
  std::vector<RingElement> default_atoms(Weight n) const override {
    std::vector<RingElement> out{zero()};
    for (Weight k = 1; k + 1 <= n; ++k) {
      out.emplace_back(Int(k));
      out.emplace_back(Int(-Int(k)));
    }
    return out;
  }
  nlohmann::ordered_json base_descriptor() const override {
    return nlohmann::ordered_json{{"ring", "Z"}};
  }
};

// ---------------------------------------------------------------------------
// Z/n  (also serves as the quotient presentation Z/(n))

class ModularRing final : public Ring {
 public:
  explicit ModularRing(Int modulus) : modulus_(std::move(modulus)) {
    if (modulus_ < 2) throw std::invalid_argument("Zmod: modulus must be >= 2");
  }

  RingKind kind() const override { return RingKind::modular; }
  std::string name() const override { return "Z/" + modulus_.str(); }
  bool finite() const override { return true; }
  std::optional<std::uint64_t> cardinality() const override {
    if (modulus_ > Int(~std::uint64_t(0))) return {};
    return static_cast<std::uint64_t>(modulus_);
  }
  const Int& modulus() const { return modulus_; }

  RingElement zero() const override { return RingElement(Int(0)); }
  RingElement one() const override { return RingElement(Int(1)); }
  RingElement add(const RingElement& a, const RingElement& b) const override {
    Int s = a.as_int() + b.as_int();
    if (s >= modulus_) s -= modulus_;
    return RingElement(s);
  }
  RingElement neg(const RingElement& a) const override {
    if (a.as_int() == 0) return a;
    return RingElement(Int(modulus_ - a.as_int()));
  }
  RingElement mul(const RingElement& a, const RingElement& b) const override {
    return RingElement(Int(a.as_int() * b.as_int() % modulus_));
  }

  bool canonical_less(const RingElement& a, const RingElement& b) const override {
    return a.as_int() < b.as_int();
  }

  std::string format(const RingElement& r) const override { return r.as_int().str(); }
  std::optional<RingElement> parse(std::string_view text) const override {
    auto n = parse_int(text);
    if (!n) return {};
    Int r = *n % modulus_;
    if (r < 0) r += modulus_;
    return RingElement(r);
  }

  RingElement reduce(const RingElement& base) const override {
    Int r = base.as_int() % modulus_;
    if (r < 0) r += modulus_;
    return RingElement(r);
  }
  RingElement lift(const RingElement& e) const override {
    return RingElement(Int(e.as_int()));
  }
  std::optional<std::pair<RingPtr, RingElement>> quotient_structure() const override {
    return std::make_pair(make_ring("Z"), RingElement(modulus_));
  }

 protected:
  Weight default_weight(const RingElement& r) const override {
    if (r.as_int() == 0) return 0;
    Int m = std::min(r.as_int(), Int(modulus_ - r.as_int()));
    return saturating_from_int(m + 1);
  }
  std::vector<RingElement> default_atoms(Weight n) const override {
    // residues in [0, n-1] and [modulus - n + 1, modulus)
    std::vector<RingElement> out;
    if (n == 0) {
      out.push_back(zero());
      return out;
    }
    for (Int r = 0; r < modulus_ && r <= Int(n) - 1; ++r) out.emplace_back(Int(r));
    for (Int r = std::max(Int(n), modulus_ - Int(n) + 1); r < modulus_; ++r) {
      out.emplace_back(Int(r));
    }
    return out;
  }
  nlohmann::ordered_json base_descriptor() const override {
    return nlohmann::ordered_json{{"ring", {{"Zmod", modulus_.str()}}}};
  }

 private:
  Int modulus_;
};

// ---------------------------------------------------------------------------
// Q

class RationalRing final : public Ring {
 public:
  RingKind kind() const override { return RingKind::rationals; }
  std::string name() const override { return "Q"; }
  bool finite() const override { return false; }

  RingElement zero() const override { return RingElement(Rat(0)); }
  RingElement one() const override { return RingElement(Rat(1)); }
  RingElement add(const RingElement& a, const RingElement& b) const override {
    return RingElement(Rat(a.as_rat() + b.as_rat()));
  }
  RingElement neg(const RingElement& a) const override {
    return RingElement(Rat(-a.as_rat()));
  }
  RingElement mul(const RingElement& a, const RingElement& b) const override {
    return RingElement(Rat(a.as_rat() * b.as_rat()));
  }

  bool canonical_less(const RingElement& a, const RingElement& b) const override {
    const Rat &qa = a.as_rat(), &qb = b.as_rat();
    if (denominator(qa) != denominator(qb)) return denominator(qa) < denominator(qb);
    Int na = abs_int(numerator(qa)), nb = abs_int(numerator(qb));
    if (na != nb) return na < nb;
    return numerator(qa) > numerator(qb);
  }

  std::string format(const RingElement& r) const override { return format_rat(r.as_rat()); }
  std::optional<RingElement> parse(std::string_view text) const override {
    auto q = parse_rat(text);
    if (!q) return {};
    return RingElement(*q);
  }

  bool divides(const RingElement& d, const RingElement& a) const override {
    if (d.as_rat() == 0) return a.as_rat() == 0;
    return true;
  }
  RingElement gcd(const RingElement& a, const RingElement& b) const override {
    if (a.as_rat() == 0 && b.as_rat() == 0) return zero();
    return one();
  }
  RingElement divide_exact(const RingElement& a, const RingElement& d) const override {
    if (d.as_rat() == 0) throw std::invalid_argument("Q: division by zero");
    return RingElement(Rat(a.as_rat() / d.as_rat()));
  }
  RingElement canonical_mod(const RingElement& a, const RingElement& g) const override {
    if (g.as_rat() == 0) throw std::invalid_argument("Q: reduction modulo (0)");
    (void)a;
    return zero();  // (g) = Q for g != 0
  }

 protected:
  Weight default_weight(const RingElement& r) const override {
    if (r.as_rat() == 0) return 0;
    return saturating_from_int(abs_int(numerator(r.as_rat())) + denominator(r.as_rat()) + 1);
  }
  std::vector<RingElement> default_atoms(Weight n) const override {
    std::vector<RingElement> out{zero()};
    for (Weight b = 1; b + 2 <= n; ++b) {
      for (Weight a = 1; a + b + 1 <= n; ++a) {
        if (boost::multiprecision::gcd(Int(a), Int(b)) != 1) continue;
        out.emplace_back(Rat(Int(a), Int(b)));
        out.emplace_back(Rat(-Int(a), Int(b)));
      }
    }
    return out;
  }
  nlohmann::ordered_json base_descriptor() const override {
    return nlohmann::ordered_json{{"ring", "Q"}};
  }
};

// ---------------------------------------------------------------------------
// GF(p)

class PrimeFieldRing final : public Ring {
 public:
  explicit PrimeFieldRing(std::uint64_t p) : p_(p) {
    if (!is_prime_u64(p)) throw std::invalid_argument("GF: characteristic must be prime");
  }

  RingKind kind() const override { return RingKind::prime_field; }
  std::string name() const override { return "GF(" + std::to_string(p_) + ")"; }
  bool finite() const override { return true; }
  std::optional<std::uint64_t> cardinality() const override { return p_; }
  std::uint64_t characteristic() const { return p_; }

  RingElement zero() const override { return RingElement(Int(0)); }
  RingElement one() const override { return RingElement(Int(1)); }
  RingElement add(const RingElement& a, const RingElement& b) const override {
    Int s = a.as_int() + b.as_int();
    if (s >= p_) s -= p_;
    return RingElement(s);
  }
  RingElement neg(const RingElement& a) const override {
    if (a.as_int() == 0) return a;
    return RingElement(Int(Int(p_) - a.as_int()));
  }
  RingElement mul(const RingElement& a, const RingElement& b) const override {
    return RingElement(Int(a.as_int() * b.as_int() % p_));
  }

  bool canonical_less(const RingElement& a, const RingElement& b) const override {
    return a.as_int() < b.as_int();
  }
  std::string format(const RingElement& r) const override { return r.as_int().str(); }
  std::optional<RingElement> parse(std::string_view text) const override {
    auto n = parse_int(text);
    if (!n) return {};
    Int r = *n % p_;
    if (r < 0) r += p_;
    return RingElement(r);
  }

  bool divides(const RingElement& d, const RingElement& a) const override {
    if (d.as_int() == 0) return a.as_int() == 0;
    return true;
  }
  RingElement gcd(const RingElement& a, const RingElement& b) const override {
    if (a.as_int() == 0 && b.as_int() == 0) return zero();
    return one();
  }
  RingElement divide_exact(const RingElement& a, const RingElement& d) const override {
    if (d.as_int() == 0) throw std::invalid_argument("GF: division by zero");
    // Fermat inverse; p is small
    Int inv = 1, base = d.as_int(), e = Int(p_) - 2;
    while (e > 0) {
      if (e % 2 == 1) inv = inv * base % p_;
      base = base * base % p_;
      e /= 2;
    }
    return RingElement(Int(a.as_int() * inv % p_));
  }
  RingElement canonical_mod(const RingElement& a, const RingElement& g) const override {
    if (g.as_int() == 0) throw std::invalid_argument("GF: reduction modulo (0)");
    (void)a;
    return zero();
  }

  RingElement reduce(const RingElement& base) const override {
    Int r = base.as_int() % p_;
    if (r < 0) r += p_;
    return RingElement(r);
  }
  RingElement lift(const RingElement& e) const override {
    return RingElement(Int(e.as_int()));
  }
  std::optional<std::pair<RingPtr, RingElement>> quotient_structure() const override {
    return std::make_pair(make_ring("Z"), RingElement(Int(p_)));
  }

 protected:
  Weight default_weight(const RingElement& r) const override {
    if (r.as_int() == 0) return 0;
    Int m = std::min(r.as_int(), Int(Int(p_) - r.as_int()));
    return saturating_from_int(m + 1);
  }
  std::vector<RingElement> default_atoms(Weight n) const override {
    std::vector<RingElement> out;
    for (std::uint64_t r = 0; r < p_; ++r) {
      RingElement e{Int(r)};
      if (default_weight(e) <= n) out.push_back(e);
    }
    return out;
  }
  nlohmann::ordered_json base_descriptor() const override {
    return nlohmann::ordered_json{{"ring", {{"GF", p_}}}};
  }

 private:
  std::uint64_t p_;
};

// ---------------------------------------------------------------------------
// GF(p)[x] and GF(p)[x]/(f)

namespace poly {

PolyCoeffs add(const PolyCoeffs& a, const PolyCoeffs& b, std::int64_t p) {
  PolyCoeffs out(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::int64_t s = (i < a.size() ? a[i] : 0) + (i < b.size() ? b[i] : 0);
    out[i] = s % p;
  }
  trim(out);
  return out;
}

PolyCoeffs neg(const PolyCoeffs& a, std::int64_t p) {
  PolyCoeffs out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (p - a[i]) % p;
  trim(out);
  return out;
}

PolyCoeffs mul(const PolyCoeffs& a, const PolyCoeffs& b, std::int64_t p) {
  if (a.empty() || b.empty()) return {};
  PolyCoeffs out(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      out[i + j] = (out[i + j] + a[i] * b[j]) % p;
    }
  }
  trim(out);
  return out;
}

std::int64_t inv_mod(std::int64_t a, std::int64_t p) {
  std::int64_t r = 1, base = a % p, e = p - 2;
  while (e > 0) {
    if (e & 1) r = r * base % p;
    base = base * base % p;
    e >>= 1;
  }
  return r;
}

// a = q*d + r with deg r < deg d
void divmod(const PolyCoeffs& a, const PolyCoeffs& d, std::int64_t p, PolyCoeffs& q,
            PolyCoeffs& r) {
  if (d.empty()) throw std::invalid_argument("poly: division by zero");
  r = a;
  q.assign(a.size() > d.size() ? a.size() - d.size() + 1 : 1, 0);
  std::int64_t lead_inv = inv_mod(d.back(), p);
  while (r.size() >= d.size() && !r.empty()) {
    std::size_t shift = r.size() - d.size();
    std::int64_t c = r.back() * lead_inv % p;
    q[shift] = c;
    for (std::size_t i = 0; i < d.size(); ++i) {
      r[shift + i] = ((r[shift + i] - c * d[i]) % p + p) % p;
    }
    trim(r);
  }
  trim(q);
}

PolyCoeffs monic(const PolyCoeffs& a, std::int64_t p) {
  if (a.empty()) return a;
  std::int64_t s = inv_mod(a.back(), p);
  PolyCoeffs out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * s % p;
  return out;
}

PolyCoeffs gcd(PolyCoeffs a, PolyCoeffs b, std::int64_t p) {
  while (!b.empty()) {
    PolyCoeffs q, r;
    divmod(a, b, p, q, r);
    a = std::move(b);
    b = std::move(r);
  }
  return monic(a, p);
}

std::string format(const PolyCoeffs& c) {
  if (c.empty()) return "0";
  std::string out;
  for (int d = poly_degree(c); d >= 0; --d) {
    if (c[d] == 0) continue;
    if (!out.empty()) out += "+";
    if (d == 0) {
      out += std::to_string(c[d]);
    } else {
      if (c[d] != 1) out += std::to_string(c[d]);
      out += "x";
      if (d > 1) out += "^" + std::to_string(d);
    }
  }
  return out;
}

std::optional<PolyCoeffs> parse(std::string_view text, std::int64_t p) {
  PolyCoeffs out;
  std::size_t pos = 0;
  if (text.empty()) return {};
  while (pos < text.size()) {
    std::size_t next = text.find('+', pos);
    std::string_view term =
        text.substr(pos, next == std::string_view::npos ? next : next - pos);
    pos = next == std::string_view::npos ? text.size() : next + 1;
    if (term.empty()) return {};
    std::int64_t coeff = 1;
    std::size_t degree = 0;
    auto x = term.find('x');
    if (x == std::string_view::npos) {
      auto n = parse_int(term);
      if (!n || *n < 0) return {};
      coeff = static_cast<std::int64_t>(*n % p);
      degree = 0;
    } else {
      if (x > 0) {
        auto n = parse_int(term.substr(0, x));
        if (!n || *n < 0) return {};
        coeff = static_cast<std::int64_t>(*n % p);
      }
      if (x + 1 < term.size()) {
        if (term[x + 1] != '^') return {};
        auto d = parse_int(term.substr(x + 2));
        if (!d || *d < 1 || *d > 512) return {};
        degree = static_cast<std::size_t>(*d);
      } else {
        degree = 1;
      }
    }
    if (out.size() < degree + 1) out.resize(degree + 1, 0);
    out[degree] = (out[degree] + coeff) % p;
  }
  trim(out);
  return out;
}

bool less(const PolyCoeffs& a, const PolyCoeffs& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (std::size_t i = a.size(); i-- > 0;) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

}  // namespace poly

class PolyRing final : public Ring {
 public:
  explicit PolyRing(std::uint64_t p) : p_(static_cast<std::int64_t>(p)) {
    if (!is_prime_u64(p)) throw std::invalid_argument("PolyGF: characteristic must be prime");
    if (p >= (std::uint64_t(1) << 20)) {
      throw std::invalid_argument("PolyGF: characteristic too large");
    }
  }

  RingKind kind() const override { return RingKind::poly_over_gf; }
  std::string name() const override { return "GF(" + std::to_string(p_) + ")[x]"; }
  bool finite() const override { return false; }
  std::int64_t characteristic() const { return p_; }

  RingElement zero() const override { return RingElement(PolyCoeffs{}); }
  RingElement one() const override { return RingElement(PolyCoeffs{1}); }
  RingElement add(const RingElement& a, const RingElement& b) const override {
    return RingElement(poly::add(a.as_poly(), b.as_poly(), p_));
  }
  RingElement neg(const RingElement& a) const override {
    return RingElement(poly::neg(a.as_poly(), p_));
  }
  RingElement mul(const RingElement& a, const RingElement& b) const override {
    return RingElement(poly::mul(a.as_poly(), b.as_poly(), p_));
  }

  bool canonical_less(const RingElement& a, const RingElement& b) const override {
    return poly::less(a.as_poly(), b.as_poly());
  }
  std::string format(const RingElement& r) const override { return poly::format(r.as_poly()); }
  std::optional<RingElement> parse(std::string_view text) const override {
    auto c = poly::parse(text, p_);
    if (!c) return {};
    return RingElement(*c);
  }

  bool divides(const RingElement& d, const RingElement& a) const override {
    if (d.as_poly().empty()) return a.as_poly().empty();
    PolyCoeffs q, r;
    poly::divmod(a.as_poly(), d.as_poly(), p_, q, r);
    return r.empty();
  }
  RingElement gcd(const RingElement& a, const RingElement& b) const override {
    return RingElement(poly::gcd(a.as_poly(), b.as_poly(), p_));
  }
  RingElement divide_exact(const RingElement& a, const RingElement& d) const override {
    PolyCoeffs q, r;
    poly::divmod(a.as_poly(), d.as_poly(), p_, q, r);
    if (!r.empty()) throw std::invalid_argument("PolyGF: not exactly divisible");
    return RingElement(q);
  }
  RingElement canonical_mod(const RingElement& a, const RingElement& g) const override {
    PolyCoeffs q, r;
    poly::divmod(a.as_poly(), g.as_poly(), p_, q, r);
    return RingElement(r);
  }

 protected:
  Weight default_weight(const RingElement& r) const override {
    const PolyCoeffs& c = r.as_poly();
    if (c.empty()) return 0;
    Weight w = static_cast<Weight>(poly_degree(c)) + 1;
    for (auto v : c) w += static_cast<Weight>(coeff_lift(v, p_));
    return w;
  }
  std::vector<RingElement> default_atoms(Weight n) const override {
    std::vector<RingElement> out{zero()};
    for (Weight d = 0; d + 2 <= n; ++d) {
      PolyCoeffs buf(d + 1, 0);
      enumerate(buf, 0, d, static_cast<std::int64_t>(n - d - 1), out);
    }
    return out;
  }
  nlohmann::ordered_json base_descriptor() const override {
    return nlohmann::ordered_json{{"ring", {{"PolyGF", p_}}}};
  }

 private:
  void enumerate(PolyCoeffs& buf, std::size_t pos, Weight deg, std::int64_t budget,
                 std::vector<RingElement>& out) const {
    if (pos == deg) {
      for (std::int64_t c = 1; c < p_; ++c) {
        if (coeff_lift(c, p_) > budget) continue;
        buf[pos] = c;
        out.emplace_back(buf);
      }
      buf[pos] = 0;
      return;
    }
    for (std::int64_t c = 0; c < p_; ++c) {
      std::int64_t cost = c == 0 ? 0 : coeff_lift(c, p_);
      if (cost > budget) continue;
      buf[pos] = c;
      enumerate(buf, pos + 1, deg, budget - cost, out);
    }
    buf[pos] = 0;
  }

  std::int64_t p_;
};

class PolyQuotientRing final : public Ring {
 public:
  PolyQuotientRing(std::uint64_t p, PolyCoeffs modulus)
      : p_(static_cast<std::int64_t>(p)), modulus_(std::move(modulus)) {
    if (!is_prime_u64(p)) throw std::invalid_argument("PolyQuot: characteristic must be prime");
    if (poly_degree(modulus_) < 1) {
      throw std::invalid_argument("PolyQuot: modulus must have degree >= 1");
    }
    modulus_ = poly::monic(modulus_, p_);
  }

  RingKind kind() const override { return RingKind::poly_quotient; }
  std::string name() const override {
    return "GF(" + std::to_string(p_) + ")[x]/(" + poly::format(modulus_) + ")";
  }
  bool finite() const override { return true; }
  std::optional<std::uint64_t> cardinality() const override {
    std::uint64_t card = 1;
    for (int i = 0; i < poly_degree(modulus_); ++i) card *= static_cast<std::uint64_t>(p_);
    return card;
  }
  const PolyCoeffs& modulus() const { return modulus_; }

  RingElement zero() const override { return RingElement(PolyCoeffs{}); }
  RingElement one() const override { return RingElement(PolyCoeffs{1}); }
  RingElement add(const RingElement& a, const RingElement& b) const override {
    return RingElement(poly::add(a.as_poly(), b.as_poly(), p_));
  }
  RingElement neg(const RingElement& a) const override {
    return RingElement(poly::neg(a.as_poly(), p_));
  }
  RingElement mul(const RingElement& a, const RingElement& b) const override {
    PolyCoeffs prod = poly::mul(a.as_poly(), b.as_poly(), p_), q, r;
    if (prod.size() < modulus_.size()) return RingElement(prod);
    poly::divmod(prod, modulus_, p_, q, r);
    return RingElement(r);
  }

  bool canonical_less(const RingElement& a, const RingElement& b) const override {
    return poly::less(a.as_poly(), b.as_poly());
  }
  std::string format(const RingElement& r) const override { return poly::format(r.as_poly()); }
  std::optional<RingElement> parse(std::string_view text) const override {
    auto c = poly::parse(text, p_);
    if (!c) return {};
    if (c->size() >= modulus_.size()) {
      PolyCoeffs q, r;
      poly::divmod(*c, modulus_, p_, q, r);
      return RingElement(r);
    }
    return RingElement(*c);
  }

  RingElement reduce(const RingElement& base) const override {
    if (base.as_poly().size() < modulus_.size()) return base;
    PolyCoeffs q, r;
    poly::divmod(base.as_poly(), modulus_, p_, q, r);
    return RingElement(r);
  }
  RingElement lift(const RingElement& e) const override {
    return RingElement(PolyCoeffs(e.as_poly()));
  }
  std::optional<std::pair<RingPtr, RingElement>> quotient_structure() const override {
    nlohmann::json desc{{"ring", {{"PolyGF", static_cast<std::uint64_t>(p_)}}}};
    return std::make_pair(make_ring(desc), RingElement(PolyCoeffs(modulus_)));
  }

 protected:
  Weight default_weight(const RingElement& r) const override {
    const PolyCoeffs& c = r.as_poly();
    if (c.empty()) return 0;
    Weight w = static_cast<Weight>(poly_degree(c)) + 1;
    for (auto v : c) w += static_cast<Weight>(coeff_lift(v, p_));
    return w;
  }
  std::vector<RingElement> default_atoms(Weight n) const override {
    std::vector<RingElement> out;
    PolyCoeffs buf;
    all_elements(buf, out);
    std::erase_if(out, [&](const RingElement& e) { return default_weight(e) > n; });
    return out;
  }
  nlohmann::ordered_json base_descriptor() const override {
    return nlohmann::ordered_json{
        {"ring", {{"PolyQuot", {{"p", p_}, {"mod", poly::format(modulus_)}}}}}};
  }

 private:
  void all_elements(PolyCoeffs& buf, std::vector<RingElement>& out) const {
    if (buf.size() + 1 == modulus_.size()) {
      PolyCoeffs c = buf;
      trim(c);
      out.emplace_back(c);
      return;
    }
    for (std::int64_t v = 0; v < p_; ++v) {
      buf.push_back(v);
      all_elements(buf, out);
      buf.pop_back();
    }
  }

  std::int64_t p_;
  PolyCoeffs modulus_;
};

// ---------------------------------------------------------------------------
// Construction

namespace {

std::shared_ptr<Ring> instantiate(const nlohmann::json& desc) {
  if (!desc.contains("ring")) throw std::invalid_argument("descriptor: missing \"ring\"");
  const auto& r = desc.at("ring");
  if (r.is_string()) {
    std::string s = r.get<std::string>();
    if (s == "Z") return std::make_shared<IntegerRing>();
    if (s == "Q") return std::make_shared<RationalRing>();
    throw std::invalid_argument("descriptor: unknown ring \"" + s + "\"");
  }
  if (r.is_object() && r.size() == 1) {
    if (r.contains("Zmod")) {
      Int n;
      if (r.at("Zmod").is_string()) {
        auto parsed = parse_int(r.at("Zmod").get<std::string>());
        if (!parsed) throw std::invalid_argument("descriptor: bad Zmod modulus");
        n = *parsed;
      } else {
        n = Int(r.at("Zmod").get<std::int64_t>());
      }
      return std::make_shared<ModularRing>(n);
    }
    if (r.contains("GF")) return std::make_shared<PrimeFieldRing>(r.at("GF").get<std::uint64_t>());
    if (r.contains("PolyGF")) {
      return std::make_shared<PolyRing>(r.at("PolyGF").get<std::uint64_t>());
    }
    if (r.contains("PolyQuot")) {
      const auto& q = r.at("PolyQuot");
      auto p = q.at("p").get<std::uint64_t>();
      auto mod = poly::parse(q.at("mod").get<std::string>(), static_cast<std::int64_t>(p));
      if (!mod) throw std::invalid_argument("descriptor: bad PolyQuot modulus");
      return std::make_shared<PolyQuotientRing>(p, *mod);
    }
  }
  throw std::invalid_argument("descriptor: unrecognized ring form");
}

void apply_weight_overrides(Ring& ring, std::map<RingElement, Weight>& table,
                            const nlohmann::json& weights) {
  if (!weights.is_array()) throw std::invalid_argument("weights: expected an array of pairs");
  for (const auto& entry : weights) {
    if (!entry.is_array() || entry.size() != 2) {
      throw std::invalid_argument("weights: expected [element, weight] pairs");
    }
    auto elem = ring.parse(entry.at(0).get<std::string>());
    if (!elem) throw std::invalid_argument("weights: unparseable element");
    Weight w = entry.at(1).get<Weight>();
    if (ring.is_zero(*elem)) {
      if (w != 0) throw std::invalid_argument("weights: w(0) must be 0");
      continue;
    }
    if (w < 2) throw std::invalid_argument("weights: w(r) must be >= 2 for r != 0");
    table[*elem] = w;
  }
}

}  // namespace

RingPtr make_ring(const nlohmann::json& descriptor) {
  for (const auto& [key, value] : descriptor.items()) {
    if (key != "ring" && key != "weights") {
      throw std::invalid_argument("descriptor: unknown field \"" + key + "\"");
    }
  }
  auto ring = instantiate(descriptor);
  if (descriptor.contains("weights")) {
    std::map<RingElement, Weight> table;
    apply_weight_overrides(*ring, table, descriptor.at("weights"));
    ring->overrides_ = std::move(table);
    // effective weights must stay symmetric under negation
    for (const auto& [r, w] : ring->overrides_) {
      if (ring->weight(ring->neg(r)) != w) {
        throw std::invalid_argument("weights: w(r) = w(-r) violated");
      }
    }
  }
  return ring;
}

RingPtr make_ring(std::string_view shorthand) {
  nlohmann::json desc;
  if (shorthand == "Z" || shorthand == "Q") {
    desc["ring"] = std::string(shorthand);
  } else if (shorthand.starts_with("Zmod")) {
    desc["ring"] = {{"Zmod", std::string(shorthand.substr(4))}};
  } else if (shorthand.starts_with("PolyGF")) {
    auto p = parse_int(shorthand.substr(6));
    if (!p) throw std::invalid_argument("bad ring shorthand");
    desc["ring"] = {{"PolyGF", static_cast<std::uint64_t>(*p)}};
  } else if (shorthand.starts_with("GF")) {
    auto p = parse_int(shorthand.substr(2));
    if (!p) throw std::invalid_argument("bad ring shorthand");
    desc["ring"] = {{"GF", static_cast<std::uint64_t>(*p)}};
  } else {
    throw std::invalid_argument("bad ring shorthand: " + std::string(shorthand));
  }
  return make_ring(desc);
}

RingPtr quotient_ring(const RingPtr& ring, const PIDIdeal& ideal) {
  if (!ring->same_presentation(*ideal.ring)) {
    throw std::invalid_argument("quotient_ring: ideal belongs to a different ring");
  }
  if (ideal.is_zero()) {
    throw std::invalid_argument("quotient_ring: quotient by (0) rejected");
  }
  if (ring->kind() == RingKind::integers) {
    Int n = abs_int(ideal.generator.as_int());
    if (n == 1) throw std::invalid_argument("quotient_ring: quotient by a unit is the zero ring");
    return std::make_shared<ModularRing>(n);
  }
  if (ring->kind() == RingKind::poly_over_gf) {
    const auto& pr = static_cast<const PolyRing&>(*ring);
    const PolyCoeffs& g = ideal.generator.as_poly();
    if (poly_degree(g) < 1) {
      throw std::invalid_argument("quotient_ring: quotient by a unit is the zero ring");
    }
    return std::make_shared<PolyQuotientRing>(static_cast<std::uint64_t>(pr.characteristic()), g);
  }
  throw std::invalid_argument("quotient_ring: supported only for Z and GF(p)[x]");
}

}  // namespace polmod
