#include "polmod/norm_engine.hpp"

#include <algorithm>
#include <stdexcept>
#include <thread>

namespace polmod {

TermPtr make_atom(const Ring& ring, const RingElement& v) {
  auto node = std::make_shared<TermNode>();
  node->op = TermNode::Op::atom;
  node->value = v;
  node->weight = ring.weight(v);
  node->nodes = 1;
  return node;
}

TermPtr make_composite(const Ring& ring, TermNode::Op op, const TermPtr& a, const TermPtr& b) {
  auto node = std::make_shared<TermNode>();
  node->op = op;
  if (op == TermNode::Op::sum) {
    node->value = ring.add(a->value, b->value);
    node->weight = a->weight + b->weight;
  } else {
    node->value = ring.mul(a->value, b->value);
    node->weight = a->weight * b->weight;
  }
  // canonical child order keeps witness encodings reproducible
  if (format_term(ring, *a) <= format_term(ring, *b)) {
    node->lhs = a;
    node->rhs = b;
  } else {
    node->lhs = b;
    node->rhs = a;
  }
  node->nodes = a->nodes + b->nodes + 1;
  return node;
}

std::string format_term(const Ring& ring, const TermNode& t) {
  switch (t.op) {
    case TermNode::Op::atom:
      return ring.format(t.value);
    case TermNode::Op::sum:
      return "(+ " + format_term(ring, *t.lhs) + " " + format_term(ring, *t.rhs) + ")";
    case TermNode::Op::product:
      return "(* " + format_term(ring, *t.lhs) + " " + format_term(ring, *t.rhs) + ")";
  }
  return {};
}

RingElement evaluate_term(const Ring& ring, const TermNode& t) {
  switch (t.op) {
    case TermNode::Op::atom:
      return t.value;
    case TermNode::Op::sum:
      return ring.add(evaluate_term(ring, *t.lhs), evaluate_term(ring, *t.rhs));
    case TermNode::Op::product:
      return ring.mul(evaluate_term(ring, *t.lhs), evaluate_term(ring, *t.rhs));
  }
  return ring.zero();
}

Weight recompute_term_weight(const Ring& ring, const TermNode& t) {
  switch (t.op) {
    case TermNode::Op::atom:
      return ring.weight(t.value);
    case TermNode::Op::sum:
      return recompute_term_weight(ring, *t.lhs) + recompute_term_weight(ring, *t.rhs);
    case TermNode::Op::product:
      return recompute_term_weight(ring, *t.lhs) * recompute_term_weight(ring, *t.rhs);
  }
  return 0;
}

std::vector<std::pair<RingElement, BallEntry>> NormBall::sorted_rows() const {
  std::vector<std::pair<RingElement, BallEntry>> rows(entries.begin(), entries.end());
  std::sort(rows.begin(), rows.end(), [&](const auto& a, const auto& b) {
    if (a.second.norm != b.second.norm) return a.second.norm < b.second.norm;
    return ring->canonical_less(a.first, b.first);
  });
  return rows;
}

namespace {

// prefer fewer nodes, then the smaller prefix encoding
bool witness_better(const Ring& ring, const TermPtr& a, const TermPtr& b) {
  if (a->nodes != b->nodes) return a->nodes < b->nodes;
  return format_term(ring, *a) < format_term(ring, *b);
}

void consider(const Ring& ring, const std::map<RingElement, BallEntry>& finalized,
              std::map<RingElement, TermPtr>& cand, const TermPtr& t) {
  if (finalized.count(t->value)) return;  // appeared at a lower level already
  auto [it, inserted] = cand.try_emplace(t->value, t);
  if (!inserted && witness_better(ring, t, it->second)) it->second = t;
}

}  // namespace

NormBall build_ball(const RingPtr& ring, Weight radius) {
  if (radius > (Weight(1) << 20)) {
    throw std::invalid_argument("build_ball: radius too large");
  }
  NormBall ball;
  ball.ring = ring;
  ball.radius = radius;

  // elements finalized at each level, in canonical order
  std::vector<std::vector<RingElement>> levels(radius + 1);

  auto atoms = ring->atoms_up_to(radius);
  std::size_t next_atom = 0;

  for (Weight j = 0; j <= radius; ++j) {
    std::map<RingElement, TermPtr> cand;

    while (next_atom < atoms.size() && ring->weight(atoms[next_atom]) == j) {
      consider(*ring, ball.entries, cand, make_atom(*ring, atoms[next_atom]));
      ++next_atom;
    }

    // sums: level j1 + level j2 with j1 + j2 = j, both >= 2
    for (Weight j1 = 2; j1 * 2 <= j; ++j1) {
      Weight j2 = j - j1;
      const auto& xs = levels[j1];
      const auto& ys = levels[j2];
      for (std::size_t ix = 0; ix < xs.size(); ++ix) {
        std::size_t start = (j1 == j2) ? ix : 0;
        for (std::size_t iy = start; iy < ys.size(); ++iy) {
          consider(*ring, ball.entries, cand,
                   make_composite(*ring, TermNode::Op::sum, ball.entries.at(xs[ix]).witness,
                                  ball.entries.at(ys[iy]).witness));
        }
      }
    }

    // products: level j1 * level j2 with j1 * j2 = j, both >= 2
    for (Weight j1 = 2; j1 * j1 <= j; ++j1) {
      if (j % j1 != 0) continue;
      Weight j2 = j / j1;
      const auto& xs = levels[j1];
      const auto& ys = levels[j2];
      for (std::size_t ix = 0; ix < xs.size(); ++ix) {
        std::size_t start = (j1 == j2) ? ix : 0;
        for (std::size_t iy = start; iy < ys.size(); ++iy) {
          consider(*ring, ball.entries, cand,
                   make_composite(*ring, TermNode::Op::product, ball.entries.at(xs[ix]).witness,
                                  ball.entries.at(ys[iy]).witness));
        }
      }
    }

    for (auto& [elem, witness] : cand) {
      ball.entries.emplace(elem, BallEntry{j, witness});
      levels[j].push_back(elem);
    }
    std::sort(levels[j].begin(), levels[j].end(),
              [&](const RingElement& a, const RingElement& b) {
                return ring->canonical_less(a, b);
              });
  }
  return ball;
}

NormResult norm(const NormBall& ball, const RingElement& r) {
  auto v = ball.lookup(r);
  if (!v) return ExceedsCap{ball.radius};
  return *v;
}

NormResult norm(const RingPtr& ring, const RingElement& r, Weight cap) {
  return norm(build_ball(ring, cap), r);
}

NormResult quotient_norm(const NormBall& ball, const PIDIdeal& ideal, const RingElement& r) {
  if (!ball.ring->same_presentation(*ideal.ring)) {
    throw std::invalid_argument("quotient_norm: ideal belongs to a different ring");
  }
  std::optional<Weight> best;
  for (const auto& [e, entry] : ball.entries) {
    if (best && entry.norm >= *best) continue;
    if (ideal.contains(ball.ring->sub(e, r))) best = entry.norm;
  }
  if (!best) return ExceedsCap{ball.radius};
  return *best;
}

NormResult quotient_norm(const RingPtr& ring, const PIDIdeal& ideal, const RingElement& r,
                         Weight cap) {
  return quotient_norm(build_ball(ring, cap), ideal, r);
}

namespace {

bool is_poly_kind(RingKind k) {
  return k == RingKind::poly_over_gf || k == RingKind::poly_quotient;
}

Weight default_lookup_cap(const RingPtr& ring, Weight radius) {
  if (is_poly_kind(ring->kind())) return 2 * radius;
  Weight sq = radius > 4096 ? 4096 : radius * radius;
  return std::max(2 * radius, sq);
}

}  // namespace

AxiomReport check_norm_axioms(const RingPtr& ring, Weight radius,
                              std::optional<Weight> lookup_cap, unsigned threads) {
  AxiomReport report;
  report.radius = radius;
  report.lookup_radius = lookup_cap ? *lookup_cap : default_lookup_cap(ring, radius);
  if (report.lookup_radius < 2 * radius) report.lookup_radius = 2 * radius;

  NormBall ball = build_ball(ring, radius);
  NormBall big = build_ball(ring, report.lookup_radius);

  auto rows = ball.sorted_rows();

  // per-element checks: witness validity, |r| = 0 iff r = 0, |-r| = |r|
  for (const auto& [elem, entry] : rows) {
    if (evaluate_term(*ring, *entry.witness) != elem) {
      report.violations.push_back(
          {"witness-value", ring->format(elem), "", "witness does not evaluate to the element"});
    }
    if (recompute_term_weight(*ring, *entry.witness) != entry.norm) {
      report.violations.push_back(
          {"witness-weight", ring->format(elem), "", "witness weight differs from recorded norm"});
    }
    if ((entry.norm == 0) != ring->is_zero(elem)) {
      report.violations.push_back({"zero-norm", ring->format(elem), "",
                                   "|r| = 0 must hold exactly for r = 0"});
    }
    auto neg_norm = ball.lookup(ring->neg(elem));
    if (!neg_norm || *neg_norm != entry.norm) {
      report.violations.push_back({"negation", ring->format(elem), "", "|-r| != |r|"});
    }
  }

  struct ChunkResult {
    std::vector<AxiomViolation> violations;
    std::uint64_t pairs = 0, exact = 0, certified = 0;
  };

  auto scan = [&](std::size_t begin, std::size_t end, ChunkResult& out) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto& [a, ea] = rows[i];
      for (std::size_t j = i; j < rows.size(); ++j) {
        const auto& [b, eb] = rows[j];
        ++out.pairs;

        RingElement s = ring->add(a, b);
        Weight sum_bound = ea.norm + eb.norm;
        auto sn = big.lookup(s);
        if (!sn) {
          if (sum_bound <= big.radius) {
            out.violations.push_back({"triangle", ring->format(a), ring->format(b),
                                      "r+s missing from ball(" + std::to_string(big.radius) +
                                          ") despite bound " + std::to_string(sum_bound)});
          }
        } else if (*sn > sum_bound) {
          out.violations.push_back({"triangle", ring->format(a), ring->format(b),
                                    "|r+s| = " + std::to_string(*sn) + " > " +
                                        std::to_string(sum_bound)});
        }

        RingElement p = ring->mul(a, b);
        Weight prod_bound = ea.norm * eb.norm;
        auto pn = big.lookup(p);
        if (pn && *pn > prod_bound) {
          out.violations.push_back({"submultiplicative", ring->format(a), ring->format(b),
                                    "|rs| = " + std::to_string(*pn) + " > " +
                                        std::to_string(prod_bound)});
        } else if (pn || prod_bound <= big.radius) {
          if (!pn) {
            out.violations.push_back({"submultiplicative", ring->format(a), ring->format(b),
                                      "rs missing from ball(" + std::to_string(big.radius) +
                                          ") despite bound " + std::to_string(prod_bound)});
          } else {
            ++out.exact;
          }
        } else {
          // bound exceeds the lookup ball; certify |rs| <= |r||s| by the
          // composed witness term
          auto composed = make_composite(*ring, TermNode::Op::product, ea.witness, eb.witness);
          if (evaluate_term(*ring, *composed) != p ||
              recompute_term_weight(*ring, *composed) != prod_bound) {
            out.violations.push_back({"submultiplicative-certificate", ring->format(a),
                                      ring->format(b), "composed witness failed to re-verify"});
          } else {
            ++out.certified;
          }
        }
      }
    }
  };

  if (threads <= 1 || rows.size() < 2 * threads) {
    ChunkResult r;
    scan(0, rows.size(), r);
    report.pairs_checked = r.pairs;
    report.exact_product_checks = r.exact;
    report.certified_product_checks = r.certified;
    for (auto& v : r.violations) report.violations.push_back(std::move(v));
  } else {
    std::vector<ChunkResult> results(threads);
    std::vector<std::thread> workers;
    std::size_t chunk = (rows.size() + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      std::size_t begin = t * chunk;
      std::size_t end = std::min(rows.size(), begin + chunk);
      if (begin >= end) break;
      workers.emplace_back([&, begin, end, t] { scan(begin, end, results[t]); });
    }
    for (auto& w : workers) w.join();
    for (auto& r : results) {
      report.pairs_checked += r.pairs;
      report.exact_product_checks += r.exact;
      report.certified_product_checks += r.certified;
      for (auto& v : r.violations) report.violations.push_back(std::move(v));
    }
  }
  return report;
}

}  // namespace polmod
