#ifndef FVKIT_SKOLEM_HPP
#define FVKIT_SKOLEM_HPP

// Cardinality conditions equivalent to a set formula on partitions.
//
// For Psi(y0..ym) evaluated on partitions of I, the set of count vectors
// (|Y0|, ..., |Ym|) satisfying Psi is a finite union of boxes whose sides are
// either a single value or a ray [g, infinity). The search below finds such a
// cover by splitting interval profiles until the three-valued evaluator gives
// a definite answer, then merges adjacent boxes along each coordinate.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fvkit/error.hpp"
#include "fvkit/set_algebra.hpp"
#include "fvkit/set_eval.hpp"

namespace fvkit {

/// lo <= |Y_j1| + ... + |Y_jr| <= hi (no upper bound when hi is empty).
struct GroupBound {
  std::vector<std::size_t> cells;
  std::size_t lo = 0;
  std::optional<std::size_t> hi;
  friend bool operator==(const GroupBound&, const GroupBound&) = default;
};

/// |Y_j| == g[j] for exact j, |Y_j| >= g[j] otherwise, plus bounds on sums
/// of several cells. Only the conditions of support_bound use `groups`.
struct SkolemCondition {
  std::vector<std::size_t> g;
  std::vector<bool> exact;
  std::vector<GroupBound> groups;

  bool matches(const std::vector<std::size_t>& counts) const {
    for (std::size_t j = 0; j < g.size(); ++j)
      if (exact[j] ? counts[j] != g[j] : counts[j] < g[j]) return false;
    for (const auto& b : groups) {
      std::size_t sum = 0;
      for (auto j : b.cells) sum += counts[j];
      if (sum < b.lo || (b.hi && sum > *b.hi)) return false;
    }
    return true;
  }
  /// Size of the index set the support construction picks for this condition:
  /// g[j] per cell, the whole group when it is bounded above, else lo members.
  std::size_t weight() const {
    std::size_t w = 0;
    for (auto v : g) w += v;
    for (const auto& b : groups) w += b.hi ? *b.hi : b.lo;
    return w;
  }
  friend bool operator==(const SkolemCondition&, const SkolemCondition&) = default;
};

struct SkolemConditionSet {
  std::vector<std::string> variables;
  std::size_t cap = 0;
  /// Their union is exactly the satisfying count vectors; they may overlap.
  std::vector<SkolemCondition> conditions;
  /// Largest sum of lower bounds over all conditions (0 when there are none).
  std::size_t N = 0;
  /// Interval boxes evaluated by the search.
  std::size_t boxes_examined = 0;

  /// Index of the condition matching `counts`, if any.
  std::optional<std::size_t> match(const std::vector<std::size_t>& counts) const {
    for (std::size_t k = 0; k < conditions.size(); ++k)
      if (conditions[k].matches(counts)) return k;
    return std::nullopt;
  }
};

struct SkolemOptions {
  /// Ladder cap; defaults to cap_bound(psi).
  std::optional<std::size_t> cap;
  /// Cells known to be empty in every instance; their count is fixed at 0.
  std::vector<bool> known_empty;
  /// Boxes examined before giving up.
  std::size_t max_boxes = 1'000'000;
  EvalLimits eval;
};

namespace detail {

/// Splits interval boxes on the ladder 0..cap, SAT until a three-valued
/// predicate decides them. Each decided leaf is widened as far as the
/// predicate stays decided, and boxes inside an earlier widened box are
/// settled without asking the predicate again. The True boxes and the False
/// boxes may overlap among themselves; together they cover the root box.
class BoxSearch {
public:
  using Box = std::vector<Interval>;
  using Predicate = std::function<Truth(const Box&)>;

  BoxSearch(Predicate pred, std::size_t cap, std::size_t max_boxes)
      : pred_(std::move(pred)), sat_(static_cast<std::uint32_t>(cap + 1)), max_boxes_(max_boxes) {}

  /// Coordinates flagged in `known_empty` are fixed at 0.
  void run(std::size_t cells, const std::vector<bool>& known_empty) {
    root_.assign(cells, Interval{0, sat_});
    for (std::size_t j = 0; j < cells && j < known_empty.size(); ++j)
      if (known_empty[j]) root_[j] = Interval{0, 0};
    search(root_, value(root_), 0);
    prune(true_);
    prune(false_);
    merge(true_);
    merge(false_);
  }

  const std::vector<Box>& true_boxes() const { return true_; }
  const std::vector<Box>& false_boxes() const { return false_; }
  std::size_t examined() const { return examined_; }
  std::uint32_t sat() const { return sat_; }

private:
  static bool inside(const Box& a, const Box& b) {
    for (std::size_t j = 0; j < a.size(); ++j)
      if (a[j].lo < b[j].lo || a[j].hi > b[j].hi) return false;
    return true;
  }

  // A stored box only restricts a few coordinates; the rest span the root.
  struct Stored {
    std::vector<std::pair<std::size_t, Interval>> restricted;
  };

  bool inside_stored(const Box& box, const Stored& s) const {
    for (const auto& [j, iv] : s.restricted)
      if (box[j].lo < iv.lo || box[j].hi > iv.hi) return false;
    return true;
  }

  Truth covered(const Box& box) const {
    for (const auto& s : stored_true_)
      if (inside_stored(box, s)) return Truth::True;
    for (const auto& s : stored_false_)
      if (inside_stored(box, s)) return Truth::False;
    return Truth::Unknown;
  }

  Truth value(const Box& box) {
    if (++examined_ > max_boxes_) throw CeilingError("Skolem condition search exceeded its box budget");
    Truth v = pred_(box);
    return v == Truth::Unknown ? covered(box) : v;
  }

  // Truth is inherited by sub-boxes, so one pass over the coordinates
  // reaches a box that no single coordinate can widen further.
  void settle(Box box, Truth v) {
    for (std::size_t j = 0; j < box.size(); ++j) {
      if (box[j] == root_[j]) continue;
      const Interval keep = box[j];
      box[j] = root_[j];
      if (value(box) == v) continue;
      box[j] = keep;
      if (keep.lo > 0 && keep.hi == sat_) {
        box[j].lo = 1;
        if (keep.lo > 1 && value(box) == v) continue;
        box[j] = keep;
      } else if (keep.exact() && keep.lo < sat_) {
        box[j].hi = sat_;
        if (value(box) == v) continue;
        box[j] = keep;
      }
    }
    Stored st;
    for (std::size_t j = 0; j < box.size(); ++j)
      if (box[j] != root_[j]) st.restricted.emplace_back(j, box[j]);
    (v == Truth::True ? stored_true_ : stored_false_).push_back(std::move(st));
    (v == Truth::True ? true_ : false_).push_back(std::move(box));
  }

  void search(const Box& box, Truth v, std::size_t start) {
    if (v == Truth::Unknown) v = covered(box);
    if (v != Truth::Unknown) {
      if (covered(box) == Truth::Unknown) settle(box, v);
      return;
    }

    // Pick a coordinate where one of the two halves is already decided.
    // Undecided emptiness (lo == 0) goes first, and probing resumes after the
    // parent's pick: coordinates the parent found useless usually still are.
    std::optional<std::size_t> pick;
    Truth lo_v = Truth::Unknown, hi_v = Truth::Unknown;
    const std::size_t n = box.size();
    bool decided = false;
    for (int pass = 0; pass < 2 && !decided; ++pass)
      for (std::size_t t = 0; t < n && !decided; ++t) {
        std::size_t j = (start + t) % n;
        if (box[j].exact() || (box[j].lo == 0) != (pass == 0)) continue;
        auto [lo, hi] = halves(box, j);
        Truth a = value(lo), b = value(hi);
        decided = a != Truth::Unknown || b != Truth::Unknown;
        if (!pick || decided) {
          pick = j;
          lo_v = a;
          hi_v = b;
        }
      }
    if (!pick) throw Error("internal error: exact box evaluated to unknown");
    auto [lo, hi] = halves(box, *pick);
    search(lo, lo_v, *pick + 1);
    search(hi, hi_v, *pick + 1);
  }

  std::pair<Box, Box> halves(const Box& box, std::size_t j) const {
    auto lo = box, hi = box;
    lo[j] = {box[j].lo, box[j].lo};
    hi[j] = {box[j].lo + 1, box[j].hi};
    return {lo, hi};
  }

  static void prune(std::vector<Box>& boxes) {
    std::vector<Box> kept;
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      bool dominated = false;
      for (std::size_t k = 0; k < boxes.size() && !dominated; ++k)
        dominated = k != i && inside(boxes[i], boxes[k]) && (boxes[i] != boxes[k] || k < i);
      if (!dominated) kept.push_back(boxes[i]);
    }
    boxes = std::move(kept);
  }

  // Boxes that differ only in coordinate j, as [v, v] and [v+1, SAT], become
  // [v, SAT]. Boxes are grouped by their other coordinates, one j at a time.
  void merge(std::vector<Box>& boxes) const {
    if (boxes.size() < 2) return;
    const std::size_t n = boxes.front().size();
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t j = 0; j < n; ++j) {
        std::map<Box, std::vector<std::size_t>> groups;
        for (std::size_t i = 0; i < boxes.size(); ++i) {
          Box key = boxes[i];
          key[j] = Interval{};
          groups[std::move(key)].push_back(i);
        }
        std::vector<bool> dead(boxes.size(), false);
        bool any = false;
        for (auto& [key, members] : groups) {
          if (members.size() < 2) continue;
          // Absorb exact values into the ray from the top down.
          std::sort(members.begin(), members.end(),
                    [&](std::size_t x, std::size_t y) { return boxes[x][j].lo > boxes[y][j].lo; });
          std::optional<std::size_t> ray;
          for (auto i : members) {
            const auto& iv = boxes[i][j];
            if (iv.hi == sat_ && !iv.exact()) {
              ray = i;
            } else if (ray && iv.exact() && iv.lo + 1 == boxes[*ray][j].lo) {
              boxes[*ray][j].lo = iv.lo;
              dead[i] = true;
              any = true;
            }
          }
        }
        if (!any) continue;
        changed = true;
        std::vector<Box> kept;
        for (std::size_t i = 0; i < boxes.size(); ++i)
          if (!dead[i]) kept.push_back(std::move(boxes[i]));
        boxes = std::move(kept);
      }
    }
  }

  Predicate pred_;
  std::uint32_t sat_;
  std::size_t max_boxes_;
  std::size_t examined_ = 0;
  Box root_;
  std::vector<Stored> stored_true_, stored_false_;
  std::vector<Box> true_, false_;
};

/// Box -> condition: exact coordinates below SAT are exact, the rest are rays.
inline SkolemCondition to_condition(const std::vector<Interval>& box, std::uint32_t sat) {
  SkolemCondition c;
  for (const auto& iv : box) {
    c.g.push_back(iv.lo);
    c.exact.push_back(iv.exact() && iv.lo != sat);
  }
  return c;
}

} // namespace detail

/// Cardinality conditions for psi(vars) over partitions: a partition with cell
/// counts c satisfies psi iff c matches one of the returned conditions.
inline SkolemConditionSet skolem_conditions(const SetFormula& psi, const std::vector<std::string>& vars,
                                            const SkolemOptions& opt = {}) {
  for (const auto& v : free_variables(psi))
    if (std::find(vars.begin(), vars.end(), v) == vars.end())
      throw PreconditionError("free set variable '" + v + "' is not a partition cell");
  const std::size_t cap = opt.cap.value_or(cap_bound(psi));
  if (cap < cap_bound(psi))
    throw PreconditionError("cap " + std::to_string(cap) + " is below cap_bound " + std::to_string(cap_bound(psi)));
  detail::CompiledSetFormula cf(psi, vars);
  detail::ProfileEngine engine(cf, opt.eval.max_steps);
  detail::BoxSearch search([&](const std::vector<Interval>& box) { return eval_partition_intervals(cf, box, cap, engine); }, cap,
                           opt.max_boxes);
  search.run(vars.size(), opt.known_empty);
  SkolemConditionSet out{vars, cap, {}, 0, search.examined()};
  for (const auto& box : search.true_boxes()) {
    auto c = detail::to_condition(box, search.sat());
    out.N = std::max(out.N, c.weight());
    out.conditions.push_back(std::move(c));
  }
  return out;
}

/// A quantifier-free formula over the cell variables equivalent to psi on partitions.
inline SetFormulaPtr quantifier_eliminate(const SetFormula& psi, const std::vector<std::string>& vars,
                                          const SkolemOptions& opt = {}) {
  auto conds = skolem_conditions(psi, vars, opt);
  std::vector<SetFormulaPtr> cases;
  for (const auto& c : conds.conditions) {
    std::vector<SetFormulaPtr> parts;
    for (std::size_t j = 0; j < vars.size(); ++j) {
      auto y = set::var(vars[j]);
      if (c.g[j] > 0) parts.push_back(set::at_least(c.g[j], y));
      if (c.exact[j]) parts.push_back(set::negate(set::at_least(c.g[j] + 1, y)));
    }
    cases.push_back(parts.empty() ? set::top() : set::conj(std::move(parts)));
  }
  if (cases.empty()) return set::bottom();
  return set::disj(std::move(cases));
}

} // namespace fvkit

#endif
