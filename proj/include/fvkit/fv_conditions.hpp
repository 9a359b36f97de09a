#ifndef FVKIT_FV_CONDITIONS_HPP
#define FVKIT_FV_CONDITIONS_HPP

// Cardinality conditions for the set formula of an acceptable sequence, built
// along the decomposition instead of by searching the (large) formula.
//
// A condition is a conjunction of group bounds lo <= sum_{s in G} c_s <= hi
// over the cell counts c. Every level of the recursion keeps two unions of
// conditions over its own cells: `pos` (the product satisfies the subformula)
// and `neg` (it does not).
//
//   atom     pos = {c1 = 0}, neg = {c1 >= 1}
//   not      swap pos and neg
//   binary   cell (j, k) refines child cells j and k: a bound on child cell j
//            becomes a bound on row j, then conditions are intersected or
//            united as the connective asks
//   exists   outer cell s is the set of inner cells realised in a factor; the
//            product has a witness iff the outer counts can be split into
//            inner counts inside a pos condition. The inner conditions are
//            first unfolded into boxes of per-cell bounds; for one box the
//            split is a bipartite transportation problem whose feasibility
//            is a conjunction of group bounds (Hoffman's conditions over
//            subsets T of inner cells). neg is the complement of the union.
//   forall   the same with the inner neg, sides swapped.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "fvkit/error.hpp"
#include "fvkit/fv.hpp"
#include "fvkit/logic.hpp"
#include "fvkit/set_eval.hpp"
#include "fvkit/skolem.hpp"

namespace fvkit {

namespace detail {

inline constexpr std::uint32_t kNoBound = std::numeric_limits<std::uint32_t>::max();

class CellSet {
public:
  CellSet() = default;
  explicit CellSet(std::size_t n) : w_((n + 63) / 64, 0) {}

  void set(std::size_t j) { w_[j / 64] |= std::uint64_t{1} << (j % 64); }
  bool test(std::size_t j) const { return (w_[j / 64] >> (j % 64)) & 1U; }
  bool empty() const {
    return std::all_of(w_.begin(), w_.end(), [](auto x) { return x == 0; });
  }
  bool subset_of(const CellSet& o) const {
    for (std::size_t i = 0; i < w_.size(); ++i)
      if (w_[i] & ~o.w_[i]) return false;
    return true;
  }
  CellSet& operator|=(const CellSet& o) {
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
    return *this;
  }
  CellSet& remove(const CellSet& o) {
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= ~o.w_[i];
    return *this;
  }
  std::vector<std::size_t> members() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < w_.size(); ++i)
      for (auto x = w_[i]; x; x &= x - 1) out.push_back(i * 64 + static_cast<std::size_t>(__builtin_ctzll(x)));
    return out;
  }
  friend auto operator<=>(const CellSet&, const CellSet&) = default;

private:
  std::vector<std::uint64_t> w_;
};

struct Bound {
  CellSet cells;
  std::uint32_t lo = 0;
  std::uint32_t hi = kNoBound;
  friend auto operator<=>(const Bound&, const Bound&) = default;
};

/// Cells in `zero` are empty; every bound ranges over the remaining cells.
struct Cond {
  CellSet zero;
  std::vector<Bound> bounds;
  friend auto operator<=>(const Cond&, const Cond&) = default;
};

using CondList = std::vector<Cond>;

/// Brings c to a canonical form and returns false when it is unsatisfiable
/// for a reason visible between pairs of bounds.
inline bool normalize(Cond& c) {
  while (true) {
    bool grew = false;
    std::vector<Bound> kept;
    for (auto& b : c.bounds) {
      b.cells.remove(c.zero);
      if (b.cells.empty()) {
        if (b.lo > 0) return false;
        continue;
      }
      if (b.hi == 0) {
        c.zero |= b.cells;
        grew = true;
        continue;
      }
      if (b.lo > 0 || b.hi != kNoBound) kept.push_back(std::move(b));
    }
    c.bounds = std::move(kept);
    if (grew) continue;

    std::sort(c.bounds.begin(), c.bounds.end());
    std::vector<Bound> merged;
    for (auto& b : c.bounds) {
      if (!merged.empty() && merged.back().cells == b.cells) {
        merged.back().lo = std::max(merged.back().lo, b.lo);
        merged.back().hi = std::min(merged.back().hi, b.hi);
      } else {
        merged.push_back(std::move(b));
      }
    }
    c.bounds = std::move(merged);
    for (const auto& b : c.bounds) {
      if (b.lo > b.hi) return false;
      grew = grew || b.hi == 0;
    }
    if (grew) continue;

    // A sum over a subgroup never exceeds the sum over the group.
    const std::size_t n = c.bounds.size();
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        if (a == b || !c.bounds[a].cells.subset_of(c.bounds[b].cells)) continue;
        auto& x = c.bounds[a];
        auto& y = c.bounds[b];
        if (x.lo > y.hi) return false;
        if (y.lo > 0 && x.lo >= y.lo) y.lo = 0;
        if (x.hi != kNoBound && y.hi <= x.hi) x.hi = kNoBound;
      }
    std::erase_if(c.bounds, [](const Bound& b) { return b.lo == 0 && b.hi == kNoBound; });
    return true;
  }
}

/// Whether every count vector satisfying a also satisfies b (sufficient test).
inline bool implies(const Cond& a, const Cond& b) {
  if (!b.zero.subset_of(a.zero)) return false;
  for (const auto& y : b.bounds) {
    if (y.lo > 0) {
      bool ok = false;
      for (const auto& x : a.bounds)
        if (x.lo >= y.lo && x.cells.subset_of(y.cells)) {
          ok = true;
          break;
        }
      if (!ok) return false;
    }
    if (y.hi != kNoBound) {
      CellSet rest = y.cells;
      rest.remove(a.zero);
      if (rest.empty()) continue;
      bool ok = false;
      for (const auto& x : a.bounds)
        if (x.hi <= y.hi && rest.subset_of(x.cells)) {
          ok = true;
          break;
        }
      if (!ok) return false;
    }
  }
  return true;
}

/// Drops conditions implied by another one of the union.
inline void prune(CondList& u) {
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());
  std::vector<bool> dead(u.size(), false);
  for (std::size_t a = 0; a < u.size(); ++a)
    for (std::size_t b = 0; b < u.size() && !dead[a]; ++b)
      if (a != b && !dead[b] && implies(u[a], u[b])) dead[a] = true;
  CondList out;
  for (std::size_t a = 0; a < u.size(); ++a)
    if (!dead[a]) out.push_back(std::move(u[a]));
  u = std::move(out);
}

inline Cond top_cond(const CellSet& known_empty) { return Cond{known_empty, {}}; }

/// Stops runaway unions; the sentence is then out of reach.
struct CondBudget {
  std::size_t left;
  void spend(std::size_t n) {
    if (n > left) throw CeilingError("cardinality conditions exceeded their budget");
    left -= n;
  }
};

inline std::optional<Cond> intersect(const Cond& a, const Cond& b) {
  Cond c{a.zero, a.bounds};
  c.zero |= b.zero;
  c.bounds.insert(c.bounds.end(), b.bounds.begin(), b.bounds.end());
  if (!normalize(c)) return std::nullopt;
  return c;
}

inline CondList product(const CondList& a, const CondList& b, CondBudget& budget) {
  budget.spend(a.size() * b.size());
  CondList out;
  for (const auto& x : a)
    for (const auto& y : b)
      if (auto c = intersect(x, y)) out.push_back(std::move(*c));
  prune(out);
  return out;
}

inline CondList unite(CondList a, const CondList& b) {
  a.insert(a.end(), b.begin(), b.end());
  prune(a);
  return a;
}

/// Count vectors (with known-empty cells at 0) outside every condition of u.
inline CondList complement(const CondList& u, const CellSet& known_empty, CondBudget& budget) {
  CondList result{top_cond(known_empty)};
  for (const auto& a : u) {
    // not a == some bound of a fails.
    std::vector<Bound> fails;
    CellSet z = a.zero;
    z.remove(known_empty);
    if (!z.empty()) fails.push_back({z, 1, kNoBound});
    for (const auto& b : a.bounds) {
      if (b.lo > 0) fails.push_back({b.cells, 0, b.lo - 1});
      if (b.hi != kNoBound) fails.push_back({b.cells, b.hi + 1, kNoBound});
    }
    budget.spend(result.size() * fails.size());
    CondList next;
    for (const auto& r : result)
      for (const auto& f : fails)
        if (auto c = intersect(r, Cond{known_empty, {f}})) next.push_back(std::move(*c));
    prune(next);
    result = std::move(next);
    if (result.empty()) break;
  }
  return result;
}

/// Rewrites conditions over child cells as conditions over parent cells, where
/// child cell j stands for the parent cells in image[j].
inline CondList lift(const CondList& u, const std::vector<CellSet>& image, const CellSet& known_empty) {
  auto map = [&](const CellSet& s) {
    CellSet out = known_empty;
    out.remove(known_empty);  // empty, parent width
    for (auto j : s.members()) out |= image[j];
    return out;
  };
  CondList out;
  for (const auto& c : u) {
    Cond l{known_empty, {}};
    l.zero |= map(c.zero);
    for (const auto& b : c.bounds) l.bounds.push_back({map(b.cells), b.lo, b.hi});
    if (normalize(l)) out.push_back(std::move(l));
  }
  prune(out);
  return out;
}

/// Three-valued membership of an interval box (SAT = unbounded) in u.
inline Truth member(const CondList& u, const std::vector<Interval>& box, std::uint32_t sat) {
  bool unknown = false;
  for (const auto& c : u) {
    bool sure = true, fails = false;
    for (auto j : c.zero.members()) {
      if (j >= box.size()) continue;
      if (box[j].lo > 0) fails = true;
      if (box[j].hi > 0) sure = false;
    }
    for (const auto& b : c.bounds) {
      if (fails) break;
      std::uint64_t lo = 0, hi = 0;
      bool inf = false;
      for (auto j : b.cells.members()) {
        lo += box[j].lo;
        if (box[j].hi >= sat) inf = true;
        else hi += box[j].hi;
      }
      if (lo > b.hi || (!inf && hi < b.lo)) fails = true;
      if (lo < b.lo || inf || hi > b.hi) {
        if (!(b.hi == kNoBound && lo >= b.lo)) sure = false;
      }
    }
    if (fails) continue;
    if (sure) return Truth::True;
    unknown = true;
  }
  return unknown ? Truth::Unknown : Truth::False;
}

inline std::uint32_t threshold(const CondList& u) {
  std::uint32_t t = 1;
  for (const auto& c : u)
    for (const auto& b : c.bounds) t = std::max({t, b.lo, b.hi == kNoBound ? 0U : b.hi});
  return t;
}

struct Level {
  std::size_t cells = 0;
  CellSet known_empty;
  CondList pos, neg;
};

class ConditionBuilder {
public:
  ConditionBuilder(const DecomposeOptions& dopt, std::size_t budget, std::size_t max_boxes)
      : dopt_(dopt), budget_{budget}, max_boxes_(max_boxes) {}

  Level build(const FormulaPtr& fp) {
    using K = Formula::Kind;
    const Formula& f = *fp;
    switch (f.kind) {
    case K::Equal:
    case K::Relation: {
      Level l;
      l.cells = 2;
      l.known_empty = CellSet(2);
      if (f.kind == K::Equal && serialize_term(*f.terms[0]) == serialize_term(*f.terms[1])) l.known_empty.set(1);
      CellSet second(2);
      second.set(1);
      Cond p{l.known_empty, {{second, 0, 0}}};
      Cond n{l.known_empty, {{second, 1, kNoBound}}};
      if (normalize(p)) l.pos.push_back(std::move(p));
      if (normalize(n)) l.neg.push_back(std::move(n));
      return l;
    }
    case K::Not: {
      auto l = build(f.children[0]);
      std::swap(l.pos, l.neg);
      return l;
    }
    case K::And:
    case K::Or:
    case K::Implies:
      return binary(fp);
    case K::Exists:
    case K::Forall:
      return quantifier(fp);
    }
    throw Error("internal error: unknown formula kind");
  }

  std::size_t boxes_examined() const { return examined_; }

private:
  CellSet known_empty(const FormulaPtr& fp) const {
    auto seq = decompose(fp, dopt_);
    CellSet out(seq.size());
    for (std::size_t j = 0; j < seq.size(); ++j)
      if (!seq.realizable[j]) out.set(j);
    return out;
  }

  Level binary(const FormulaPtr& fp) {
    const Formula& f = *fp;
    auto a = build(f.children[0]);
    auto b = build(f.children[1]);
    Level l;
    l.cells = a.cells * b.cells;
    l.known_empty = known_empty(fp);
    std::vector<CellSet> rows(a.cells, CellSet(l.cells)), cols(b.cells, CellSet(l.cells));
    for (std::size_t j = 0; j < a.cells; ++j)
      for (std::size_t k = 0; k < b.cells; ++k) {
        rows[j].set(j * b.cells + k);
        cols[k].set(j * b.cells + k);
      }
    auto ap = lift(a.pos, rows, l.known_empty), an = lift(a.neg, rows, l.known_empty);
    auto bp = lift(b.pos, cols, l.known_empty), bn = lift(b.neg, cols, l.known_empty);
    switch (f.kind) {
    case Formula::Kind::And:
      l.pos = product(ap, bp, budget_);
      l.neg = unite(std::move(an), bn);
      break;
    case Formula::Kind::Or:
      l.pos = unite(std::move(ap), bp);
      l.neg = product(an, bn, budget_);
      break;
    default:
      l.pos = unite(std::move(an), bp);
      l.neg = product(ap, bn, budget_);
    }
    return l;
  }

  // Per-cell boxes (rays as hi == kNoBound) whose union is u, over few cells.
  std::vector<std::vector<Interval>> unfold(const CondList& u, std::size_t cells, const CellSet& empty) {
    const std::uint32_t cap = threshold(u);
    BoxSearch search([&](const std::vector<Interval>& box) { return member(u, box, cap + 1); }, cap, max_boxes_);
    std::vector<bool> fixed(cells);
    for (std::size_t j = 0; j < cells; ++j) fixed[j] = empty.test(j);
    search.run(cells, fixed);
    examined_ += search.examined();
    auto boxes = search.true_boxes();
    for (auto& b : boxes)
      for (auto& iv : b)
        if (iv.hi == search.sat()) iv.hi = kNoBound;
    return boxes;
  }

  // Outer counts that split into inner counts inside `box` (Hoffman):
  //   for T within the bounded inner cells: sum_{s subset of T} c_s <= sum_T hi
  //   for T within the cells with lo > 0:  sum_{s meets T} c_s     >= sum_T lo
  static std::optional<Cond> image(const std::vector<Interval>& box, std::size_t k, const CellSet& empty) {
    const std::size_t n = std::size_t{1} << k;
    std::uint32_t bounded = 0, positive = 0;
    for (std::size_t j = 0; j < k; ++j) {
      if (box[j].hi != kNoBound) bounded |= 1U << j;
      if (box[j].lo > 0) positive |= 1U << j;
    }
    auto total = [&](std::uint32_t T) {
      std::uint32_t t = 0;
      for (std::size_t j = 0; j < k; ++j)
        if ((T >> j) & 1U) t += box[j].lo;
      return t;
    };
    Cond c{empty, {}};
    for (std::uint32_t T = bounded; T != 0; T = (T - 1) & bounded) {
      CellSet g(n);
      for (std::uint32_t s = T;; s = (s - 1) & T) {
        g.set(s);
        if (s == 0) break;
      }
      c.bounds.push_back({std::move(g), 0, total(T)});
    }
    for (std::uint32_t T = positive; T != 0; T = (T - 1) & positive) {
      CellSet g(n);
      for (std::size_t s = 0; s < n; ++s)
        if (s & T) g.set(s);
      c.bounds.push_back({std::move(g), total(T), kNoBound});
    }
    if (!normalize(c)) return std::nullopt;
    return c;
  }

  Level quantifier(const FormulaPtr& fp) {
    const Formula& f = *fp;
    auto inner = build(f.children[0]);
    const bool universal = f.kind == Formula::Kind::Forall;
    Level l;
    l.cells = std::size_t{1} << inner.cells;
    l.known_empty = known_empty(fp);
    CondList some;
    for (const auto& box : unfold(universal ? inner.neg : inner.pos, inner.cells, inner.known_empty)) {
      if (auto c = image(box, inner.cells, l.known_empty)) some.push_back(std::move(*c));
    }
    prune(some);
    budget_.spend(some.size());
    auto none = complement(some, l.known_empty, budget_);
    l.pos = universal ? std::move(none) : std::move(some);
    l.neg = universal ? std::move(some) : std::move(none);
    return l;
  }

  DecomposeOptions dopt_;
  CondBudget budget_;
  std::size_t max_boxes_;
  std::size_t examined_ = 0;
};

} // namespace detail

/// Cardinality conditions for the set formula of decompose(phi), over its
/// cells. Bounds on one cell become g / exact, larger groups stay groups.
inline SkolemConditionSet fv_skolem_conditions(const FormulaPtr& phi, const AcceptableSequence& seq,
                                               const DecomposeOptions& dopt = {}, std::size_t budget = 2'000'000,
                                               std::size_t max_boxes = 1'000'000) {
  detail::ConditionBuilder builder(dopt, budget, max_boxes);
  auto top = builder.build(phi);
  if (top.cells != seq.size()) throw Error("internal error: condition cells disagree with the decomposition");
  SkolemConditionSet out;
  out.variables = seq.cell_variables();
  out.boxes_examined = builder.boxes_examined();
  for (const auto& cond : top.pos) {
    SkolemCondition c;
    c.g.assign(seq.size(), 0);
    c.exact.assign(seq.size(), false);
    for (std::size_t j = 0; j < seq.size(); ++j)
      if (cond.zero.test(j) || !seq.realizable[j]) c.exact[j] = true;
    for (const auto& b : cond.bounds) {
      auto cells = b.cells.members();
      std::optional<std::size_t> hi;
      if (b.hi != detail::kNoBound) hi = b.hi;
      if (cells.size() == 1 && (!hi || *hi == b.lo)) {
        c.g[cells[0]] = b.lo;
        c.exact[cells[0]] = hi.has_value();
      } else {
        c.groups.push_back({std::move(cells), b.lo, hi});
      }
      out.cap = std::max<std::size_t>({out.cap, b.lo, hi.value_or(0)});
    }
    out.N = std::max(out.N, c.weight());
    out.conditions.push_back(std::move(c));
  }
  return out;
}

} // namespace fvkit

#endif
