#ifndef FVKIT_SET_EVAL_HPP
#define FVKIT_SET_EVAL_HPP

// Two semantics for set formulas.
//
// eval_enumeration is the reference: every set quantifier ranges over all
// 2^|I| subsets.
//
// eval_profile works on Venn-region counts instead of subsets. Counts live on
// the ladder 0, 1, ..., cap, SAT where SAT stands for "more than cap"; an
// existential quantifier splits every region count into two parts. The same
// engine also accepts interval counts [lo, hi] on that ladder and then answers
// in three values, which is what the Skolem condition search runs on.
//
// Both evaluators treat a block of existential quantifiers followed by a
// conjunction specially: conjuncts are checked as soon as all the block
// variables they mention are bound. When every conjunct that is not an
// emptiness test t == 0 mentions block variables only, the profile evaluator
// distributes each region over the admissible block patterns and keeps only
// the resulting sums, projected to the block.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fvkit/error.hpp"
#include "fvkit/set_algebra.hpp"

namespace fvkit {

struct EvalLimits {
  /// Largest |I| eval_enumeration accepts.
  std::size_t enumeration_limit = 12;
  /// Work units (candidate splits or DP states) before giving up.
  std::size_t max_steps = 50'000'000;
};

enum class Truth : std::uint8_t { False, True, Unknown };

inline Truth not3(Truth t) {
  return t == Truth::True ? Truth::False : t == Truth::False ? Truth::True : Truth::Unknown;
}
inline Truth and3(Truth a, Truth b) {
  if (a == Truth::False || b == Truth::False) return Truth::False;
  if (a == Truth::True && b == Truth::True) return Truth::True;
  return Truth::Unknown;
}
inline Truth or3(Truth a, Truth b) { return not3(and3(not3(a), not3(b))); }

/// A count on the ladder 0..cap, SAT (= cap + 1), possibly an interval.
struct Interval {
  std::uint32_t lo = 0;
  std::uint32_t hi = 0;

  bool exact() const { return lo == hi; }
  bool zero() const { return hi == 0; }
  friend auto operator<=>(const Interval&, const Interval&) = default;
};

namespace detail {

using Pattern = std::vector<std::uint64_t>;

inline bool test_bit(const Pattern& p, std::size_t slot) { return (p[slot / 64] >> (slot % 64)) & 1U; }
inline void set_bit(Pattern& p, std::size_t slot) { p[slot / 64] |= std::uint64_t{1} << (slot % 64); }

struct CTerm {
  SetTerm::Kind kind;
  std::size_t slot = 0;
  std::vector<std::size_t> args;
};

struct CNode {
  /// Forall is compiled to Not Exists Not; Equal(a, b) and Not C[1](t) to Empty.
  enum class Kind { True, False, AtLeast, Empty, Not, And, Or, Exists };

  Kind kind;
  std::size_t bound = 0;
  std::size_t term = 0;
  std::size_t slot = 0;
  std::vector<std::size_t> children{};
  std::vector<std::size_t> free_slots{};
};

struct BlockInfo {
  std::vector<std::size_t> slots;
  std::vector<std::size_t> conjuncts;
  /// Position in `slots` of the last block variable a conjunct mentions; -1 if none.
  std::vector<int> last_index;
  bool projectable = false;
  /// cap_bound of the conjunction of the projected (non-emptiness) conjuncts.
  std::size_t rest_cap = 1;
  /// Region pattern -> admissible block patterns projected onto the slots.
  mutable std::map<Pattern, std::vector<Pattern>> admissible_cache;
};

/// A set formula with variables resolved to integer slots: the given free
/// variables occupy slots 0..free_count-1, each quantifier gets its own slot.
class CompiledSetFormula {
public:
  CompiledSetFormula(const SetFormula& f, const std::vector<std::string>& free_vars) {
    std::vector<std::pair<std::string, std::size_t>> scope;
    for (const auto& v : free_vars) scope.emplace_back(v, slot_count_++);
    free_count_ = slot_count_;
    root_ = compile(f, scope);
  }

  std::size_t root() const { return root_; }
  std::size_t slot_count() const { return slot_count_; }
  std::size_t free_count() const { return free_count_; }
  std::size_t words() const { return (slot_count_ + 63) / 64; }
  const CNode& node(std::size_t i) const { return nodes_[i]; }
  const CTerm& term(std::size_t i) const { return terms_[i]; }

  std::size_t max_index(std::size_t n) const {
    const auto& nd = nodes_[n];
    std::size_t m = nd.kind == CNode::Kind::AtLeast ? nd.bound : nd.kind == CNode::Kind::Empty ? 1 : 0;
    for (auto c : nd.children) m = std::max(m, max_index(c));
    return m;
  }
  std::size_t quantifiers(std::size_t n) const {
    std::size_t q = nodes_[n].kind == CNode::Kind::Exists ? 1 : 0;
    for (auto c : nodes_[n].children) q += quantifiers(c);
    return q;
  }

  const BlockInfo& block(std::size_t n) const {
    auto it = blocks_.find(n);
    if (it != blocks_.end()) return it->second;
    BlockInfo b;
    std::size_t cur = n;
    while (nodes_[cur].kind == CNode::Kind::Exists) {
      b.slots.push_back(nodes_[cur].slot);
      cur = nodes_[cur].children[0];
    }
    flatten_and(cur, b.conjuncts);
    b.projectable = true;
    std::size_t rest_index = 0, rest_quant = 0;
    for (auto c : b.conjuncts) {
      int last = -1;
      bool outer = false;
      for (auto s : nodes_[c].free_slots) {
        auto pos = std::find(b.slots.begin(), b.slots.end(), s);
        if (pos == b.slots.end())
          outer = true;
        else
          last = std::max(last, static_cast<int>(pos - b.slots.begin()));
      }
      b.last_index.push_back(last);
      if (last >= 0 && nodes_[c].kind != CNode::Kind::Empty) {
        if (outer) b.projectable = false;
        rest_index = std::max(rest_index, max_index(c));
        rest_quant += quantifiers(c);
      }
    }
    b.rest_cap = rest_index + rest_quant + 1;
    return blocks_.emplace(n, std::move(b)).first->second;
  }

private:
  void flatten_and(std::size_t n, std::vector<std::size_t>& out) const {
    if (nodes_[n].kind == CNode::Kind::And) {
      for (auto c : nodes_[n].children) flatten_and(c, out);
    } else {
      out.push_back(n);
    }
  }

  std::size_t add_term(CTerm t) {
    terms_.push_back(std::move(t));
    return terms_.size() - 1;
  }

  std::size_t compile_term(const SetTerm& t, const std::vector<std::pair<std::string, std::size_t>>& scope,
                           std::set<std::size_t>& slots) {
    if (t.kind == SetTerm::Kind::Var) {
      for (auto it = scope.rbegin(); it != scope.rend(); ++it)
        if (it->first == t.name) {
          slots.insert(it->second);
          return add_term({SetTerm::Kind::Var, it->second, {}});
        }
      throw PreconditionError("set variable '" + t.name + "' is not assigned");
    }
    CTerm c{t.kind, 0, {}};
    for (const auto& a : t.args) c.args.push_back(compile_term(*a, scope, slots));
    return add_term(std::move(c));
  }

  std::size_t add_node(CNode n) {
    nodes_.push_back(std::move(n));
    return nodes_.size() - 1;
  }

  std::size_t make(CNode::Kind kind, std::vector<std::size_t> children) {
    CNode n{kind};
    std::set<std::size_t> fs;
    for (auto c : children) fs.insert(nodes_[c].free_slots.begin(), nodes_[c].free_slots.end());
    n.children = std::move(children);
    n.free_slots.assign(fs.begin(), fs.end());
    return add_node(std::move(n));
  }

  std::size_t compile(const SetFormula& f, std::vector<std::pair<std::string, std::size_t>>& scope) {
    using K = SetFormula::Kind;
    switch (f.kind) {
    case K::True:
      return add_node({CNode::Kind::True});
    case K::False:
      return add_node({CNode::Kind::False});
    case K::Equal: {
      std::set<std::size_t> slots;
      auto a = compile_term(*f.terms[0], scope, slots);
      auto b = compile_term(*f.terms[1], scope, slots);
      CNode n{CNode::Kind::Empty};
      n.term = add_term({SetTerm::Kind::Sum, 0, {a, b}});
      n.free_slots.assign(slots.begin(), slots.end());
      return add_node(std::move(n));
    }
    case K::AtLeast: {
      if (f.bound == 0) return add_node({CNode::Kind::True});
      std::set<std::size_t> slots;
      CNode n{CNode::Kind::AtLeast, f.bound};
      n.term = compile_term(*f.terms[0], scope, slots);
      n.free_slots.assign(slots.begin(), slots.end());
      return add_node(std::move(n));
    }
    case K::Not: {
      auto c = compile(*f.children[0], scope);
      if (nodes_[c].kind == CNode::Kind::AtLeast && nodes_[c].bound == 1) {
        CNode n = nodes_[c];
        n.kind = CNode::Kind::Empty;
        return add_node(std::move(n));
      }
      return make(CNode::Kind::Not, {c});
    }
    case K::And:
    case K::Or: {
      std::vector<std::size_t> cs;
      for (const auto& c : f.children) cs.push_back(compile(*c, scope));
      return make(f.kind == K::And ? CNode::Kind::And : CNode::Kind::Or, std::move(cs));
    }
    case K::Exists:
    case K::Forall: {
      std::size_t slot = slot_count_++;
      scope.emplace_back(f.var, slot);
      auto body = compile(*f.children[0], scope);
      scope.pop_back();
      if (f.kind == K::Forall) body = make(CNode::Kind::Not, {body});
      auto ex = make(CNode::Kind::Exists, {body});
      nodes_[ex].slot = slot;
      auto& fs = nodes_[ex].free_slots;
      fs.erase(std::remove(fs.begin(), fs.end(), slot), fs.end());
      if (f.kind == K::Forall) return make(CNode::Kind::Not, {ex});
      return ex;
    }
    }
    return add_node({CNode::Kind::False});
  }

  std::vector<CTerm> terms_;
  std::vector<CNode> nodes_;
  std::size_t root_ = 0;
  std::size_t slot_count_ = 0;
  std::size_t free_count_ = 0;
  mutable std::map<std::size_t, BlockInfo> blocks_;
};

// ---------------------------------------------------------------------------
// Reference semantics over subsets

class EnumerationEngine {
public:
  EnumerationEngine(const CompiledSetFormula& cf, std::size_t n, std::size_t max_steps)
      : cf_(cf), n_(n), full_(full_subset(n)), max_steps_(max_steps) {}

  bool eval(std::size_t node, std::vector<Subset>& env) {
    const auto& nd = cf_.node(node);
    switch (nd.kind) {
    case CNode::Kind::True:
      return true;
    case CNode::Kind::False:
      return false;
    case CNode::Kind::AtLeast:
      return cardinality(value(nd.term, env)) >= nd.bound;
    case CNode::Kind::Empty:
      return value(nd.term, env) == 0;
    case CNode::Kind::Not:
      return !eval(nd.children[0], env);
    case CNode::Kind::And:
      for (auto c : nd.children)
        if (!eval(c, env)) return false;
      return true;
    case CNode::Kind::Or:
      for (auto c : nd.children)
        if (eval(c, env)) return true;
      return false;
    case CNode::Kind::Exists: {
      const auto& b = cf_.block(node);
      for (std::size_t i = 0; i < b.conjuncts.size(); ++i)
        if (b.last_index[i] < 0 && !eval(b.conjuncts[i], env)) return false;
      return block(b, 0, env);
    }
    }
    return false;
  }

private:
  bool block(const BlockInfo& b, std::size_t t, std::vector<Subset>& env) {
    if (t == b.slots.size()) return true;
    std::size_t slot = b.slots[t];
    for (Subset s = 0;; ++s) {
      if (++steps_ > max_steps_) throw CeilingError("set formula enumeration exceeded its step budget");
      env[slot] = s;
      bool ok = true;
      for (std::size_t i = 0; i < b.conjuncts.size() && ok; ++i)
        if (b.last_index[i] == static_cast<int>(t)) ok = eval(b.conjuncts[i], env);
      if (ok && block(b, t + 1, env)) return true;
      if (s == full_) break;
    }
    return false;
  }

  Subset value(std::size_t term, const std::vector<Subset>& env) const {
    const auto& t = cf_.term(term);
    using K = SetTerm::Kind;
    switch (t.kind) {
    case K::Var:
      return env[t.slot] & full_;
    case K::Zero:
      return 0;
    case K::One:
      return full_;
    case K::Complement:
      return ~value(t.args[0], env) & full_;
    case K::Meet:
    case K::Product: {
      Subset r = full_;
      for (auto a : t.args) r &= value(a, env);
      return r;
    }
    case K::Join: {
      Subset r = 0;
      for (auto a : t.args) r |= value(a, env);
      return r;
    }
    case K::Sum: {
      Subset r = 0;
      for (auto a : t.args) r ^= value(a, env);
      return r;
    }
    }
    return 0;
  }

  const CompiledSetFormula& cf_;
  std::size_t n_;
  Subset full_;
  std::size_t max_steps_;
  std::size_t steps_ = 0;
};

// ---------------------------------------------------------------------------
// Region-count semantics

struct Region {
  Pattern pattern;
  Interval count;
};

struct Profile {
  std::uint32_t cap = 0;
  std::vector<Region> regions;

  std::uint32_t sat() const { return cap + 1; }
};

class ProfileEngine {
public:
  ProfileEngine(const CompiledSetFormula& cf, std::size_t max_steps)
      : cf_(cf), max_steps_(max_steps), split_width_(std::max<std::size_t>(1, cf.max_index(cf.root()))) {}

  /// Top-level entry: the step budget applies per call.
  Truth evaluate(const Profile& p) {
    steps_ = 0;
    return eval(cf_.root(), p);
  }

  Truth eval(std::size_t node, const Profile& p) {
    const auto& nd = cf_.node(node);
    switch (nd.kind) {
    case CNode::Kind::True:
      return Truth::True;
    case CNode::Kind::False:
      return Truth::False;
    case CNode::Kind::AtLeast:
      return at_least(nd.bound, nd.term, p);
    case CNode::Kind::Empty:
      return not3(at_least(1, nd.term, p));
    case CNode::Kind::Not:
      return not3(eval(nd.children[0], p));
    case CNode::Kind::And: {
      Truth r = Truth::True;
      for (auto c : nd.children) {
        r = and3(r, eval(c, p));
        if (r == Truth::False) break;
      }
      return r;
    }
    case CNode::Kind::Or: {
      Truth r = Truth::False;
      for (auto c : nd.children) {
        r = or3(r, eval(c, p));
        if (r == Truth::True) break;
      }
      return r;
    }
    case CNode::Kind::Exists:
      return exists_block(node, p);
    }
    return Truth::Unknown;
  }

private:
  struct Option {
    Interval in, out;
    bool uniform, cover;
  };

  void tick(std::size_t n = 1) {
    steps_ += n;
    if (steps_ > max_steps_) throw CeilingError("region-profile search exceeded its step budget");
  }

  static std::uint32_t add(std::uint32_t a, std::uint32_t b, std::uint32_t sat) { return std::min(a + b, sat); }
  static std::uint32_t sub(std::uint32_t a, std::uint32_t b, std::uint32_t sat) { return a == sat ? sat : a - b; }

  bool inside(std::size_t term, const Pattern& pat) const {
    const auto& t = cf_.term(term);
    using K = SetTerm::Kind;
    switch (t.kind) {
    case K::Var:
      return test_bit(pat, t.slot);
    case K::Zero:
      return false;
    case K::One:
      return true;
    case K::Complement:
      return !inside(t.args[0], pat);
    case K::Meet:
    case K::Product:
      for (auto a : t.args)
        if (!inside(a, pat)) return false;
      return true;
    case K::Join:
      for (auto a : t.args)
        if (inside(a, pat)) return true;
      return false;
    case K::Sum: {
      bool r = false;
      for (auto a : t.args) r ^= inside(a, pat);
      return r;
    }
    }
    return false;
  }

  Truth at_least(std::size_t j, std::size_t term, const Profile& p) const {
    std::uint32_t lo = 0, hi = 0;
    for (const auto& r : p.regions) {
      if (!inside(term, r.pattern)) continue;
      lo = add(lo, r.count.lo, p.sat());
      hi = add(hi, r.count.hi, p.sat());
    }
    if (lo >= j) return Truth::True;
    if (hi < j) return Truth::False;
    return Truth::Unknown;
  }

  std::vector<Option> split_options(Interval c, std::uint32_t cap) const {
    const std::uint32_t sat = cap + 1;
    std::vector<Option> out;
    if (c.exact() && c.lo <= cap) {
      for (std::uint32_t a = 0; a <= c.lo; ++a) out.push_back({{a, a}, {c.lo - a, c.lo - a}, true, true});
    } else if (c.exact()) {
      for (std::uint32_t v = 0; v <= cap; ++v) {
        out.push_back({{sat, sat}, {v, v}, true, true});
        out.push_back({{v, v}, {sat, sat}, true, true});
      }
      out.push_back({{sat, sat}, {sat, sat}, true, true});
    } else {
      std::uint32_t width = std::min<std::uint32_t>(c.lo, static_cast<std::uint32_t>(split_width_));
      for (std::uint32_t a = 0; a <= width; ++a) {
        Interval rest{c.lo - a, sub(c.hi, a, sat)};
        out.push_back({{a, a}, rest, true, false});
        out.push_back({rest, {a, a}, true, false});
      }
      out.push_back({{0, c.hi}, {0, c.hi}, false, true});
    }
    return out;
  }

  Truth exists_block(std::size_t node, const Profile& p) {
    const auto& b = cf_.block(node);
    Truth upfront = Truth::True;
    for (std::size_t i = 0; i < b.conjuncts.size() && upfront != Truth::False; ++i)
      if (b.last_index[i] < 0) upfront = and3(upfront, eval(b.conjuncts[i], p));
    if (upfront == Truth::False) return Truth::False;
    Truth r = b.projectable ? projected(b, p) : generic(b, 0, p, Truth::True);
    return and3(upfront, r);
  }

  // Splits every region by one block variable at a time.
  Truth generic(const BlockInfo& b, std::size_t t, const Profile& p, Truth acc) {
    if (t == b.slots.size()) return acc;
    const std::size_t slot = b.slots[t];
    std::vector<std::vector<Option>> opts;
    for (const auto& r : p.regions) opts.push_back(split_options(r.count, p.cap));
    std::vector<std::size_t> idx(opts.size(), 0);
    bool all_cover_false = true;
    Profile q;
    q.cap = p.cap;
    while (true) {
      tick();
      bool uniform = true, cover = true;
      q.regions.clear();
      for (std::size_t r = 0; r < opts.size(); ++r) {
        const auto& o = opts[r][idx[r]];
        uniform &= o.uniform;
        cover &= o.cover;
        if (!o.in.zero()) {
          Region in{p.regions[r].pattern, o.in};
          set_bit(in.pattern, slot);
          q.regions.push_back(std::move(in));
        }
        if (!o.out.zero()) q.regions.push_back({p.regions[r].pattern, o.out});
      }
      if (uniform || cover) {
        Truth v = acc;
        for (std::size_t i = 0; i < b.conjuncts.size() && v != Truth::False; ++i)
          if (b.last_index[i] == static_cast<int>(t)) v = and3(v, eval(b.conjuncts[i], q));
        if (v != Truth::False) v = generic(b, t + 1, q, v);
        if (uniform && v == Truth::True) return Truth::True;
        if (cover && v != Truth::False) all_cover_false = false;
      }
      std::size_t r = 0;
      for (; r < idx.size(); ++r) {
        if (++idx[r] < opts[r].size()) break;
        idx[r] = 0;
      }
      if (r == idx.size()) break;
    }
    return all_cover_false ? Truth::False : Truth::Unknown;
  }

  // Block patterns admissible for a region under the emptiness conjuncts.
  void admissible(const BlockInfo& b, std::size_t t, Pattern& pat, std::vector<Pattern>& out) {
    tick();
    if (t == b.slots.size()) {
      out.push_back(pat);
      return;
    }
    for (int bit = 0; bit < 2; ++bit) {
      Pattern next = pat;
      if (bit) set_bit(next, b.slots[t]);
      bool ok = true;
      for (std::size_t i = 0; i < b.conjuncts.size() && ok; ++i) {
        if (b.last_index[i] != static_cast<int>(t)) continue;
        const auto& nd = cf_.node(b.conjuncts[i]);
        if (nd.kind == CNode::Kind::Empty) ok = !inside(nd.term, next);
      }
      if (ok) admissible(b, t + 1, next, out);
    }
  }

  using State = std::vector<std::pair<std::size_t, Interval>>;

  static void compositions(std::uint32_t total, std::size_t parts, std::vector<std::uint32_t>& cur,
                           std::vector<std::vector<std::uint32_t>>& out) {
    if (parts == 0) return;
    if (cur.size() + 1 == parts) {
      cur.push_back(total);
      out.push_back(cur);
      cur.pop_back();
      return;
    }
    for (std::uint32_t a = 0; a <= total; ++a) {
      cur.push_back(a);
      compositions(total - a, parts, cur, out);
      cur.pop_back();
    }
  }

  // Distributes each region over its admissible block patterns, keeping only
  // the per-pattern sums on the ladder of the remaining conjuncts.
  Truth projected(const BlockInfo& b, const Profile& p) {
    const std::uint32_t cap2 = static_cast<std::uint32_t>(std::min<std::size_t>(p.cap, b.rest_cap));
    const std::uint32_t sat2 = cap2 + 1;
    auto conv = [&](std::uint32_t v) { return v > cap2 ? sat2 : v; };

    std::map<Pattern, std::size_t> pattern_ids;
    std::vector<Pattern> patterns;
    struct Dist {
      std::vector<std::pair<std::size_t, Interval>> parts;
      bool uniform, cover;
    };

    std::set<State> uniform_states{State{}}, cover_states{State{}};
    bool all_exact = true;
    for (const auto& r : p.regions) {
      if (r.count.zero()) continue;
      auto cached = b.admissible_cache.find(r.pattern);
      if (cached == b.admissible_cache.end()) {
        std::vector<Pattern> adm, projs;
        Pattern start = r.pattern;
        admissible(b, 0, start, adm);
        for (auto& full : adm) {
          Pattern proj(cf_.words(), 0);
          for (auto s : b.slots)
            if (test_bit(full, s)) set_bit(proj, s);
          projs.push_back(std::move(proj));
        }
        cached = b.admissible_cache.emplace(r.pattern, std::move(projs)).first;
      }
      std::vector<std::size_t> ids;
      for (const auto& proj : cached->second) {
        auto [it, fresh] = pattern_ids.emplace(proj, patterns.size());
        if (fresh) patterns.push_back(proj);
        ids.push_back(it->second);
      }

      std::vector<Dist> dists;
      const Interval c = r.count;
      if (c.exact() && c.lo <= p.cap) {
        std::vector<std::vector<std::uint32_t>> comps;
        std::vector<std::uint32_t> cur;
        compositions(c.lo, ids.size(), cur, comps);
        std::set<std::vector<std::pair<std::size_t, Interval>>> seen;
        for (const auto& comp : comps) {
          tick();
          std::vector<std::pair<std::size_t, Interval>> parts;
          for (std::size_t k = 0; k < ids.size(); ++k)
            if (comp[k]) parts.push_back({ids[k], {conv(comp[k]), conv(comp[k])}});
          if (seen.insert(parts).second) dists.push_back({std::move(parts), true, true});
        }
      } else if (c.exact()) {
        // SAT splits into parts with at least one SAT part.
        std::vector<std::uint32_t> digit(ids.size(), 0);
        while (!ids.empty()) {
          tick();
          bool has_sat = std::find(digit.begin(), digit.end(), sat2) != digit.end();
          if (has_sat) {
            std::vector<std::pair<std::size_t, Interval>> parts;
            for (std::size_t k = 0; k < ids.size(); ++k)
              if (digit[k]) parts.push_back({ids[k], {digit[k], digit[k]}});
            dists.push_back({std::move(parts), true, true});
          }
          std::size_t k = 0;
          for (; k < digit.size(); ++k) {
            if (++digit[k] <= sat2) break;
            digit[k] = 0;
          }
          if (k == digit.size()) break;
        }
      } else {
        all_exact = false;
        Interval whole{conv(c.lo), conv(c.hi)};
        for (auto id : ids) dists.push_back({{{id, whole}}, true, false});
        // Cover: some admissible pattern receives a nonempty part when the
        // region is nonempty; the others receive anything up to the total.
        if (c.lo == 0) {
          std::vector<std::pair<std::size_t, Interval>> parts;
          for (auto id : ids) parts.push_back({id, Interval{0, conv(c.hi)}});
          dists.push_back({std::move(parts), false, true});
        } else {
          for (std::size_t q = 0; q < ids.size(); ++q) {
            std::vector<std::pair<std::size_t, Interval>> parts;
            for (std::size_t k = 0; k < ids.size(); ++k)
              parts.push_back({ids[k], Interval{k == q ? 1U : 0U, conv(c.hi)}});
            dists.push_back({std::move(parts), false, true});
          }
        }
      }

      auto extend = [&](const std::set<State>& from, bool want_uniform) {
        std::set<State> to;
        for (const auto& s : from)
          for (const auto& d : dists) {
            if (want_uniform ? !d.uniform : !d.cover) continue;
            tick();
            State n = s;
            for (const auto& [id, iv] : d.parts) {
              auto it = std::find_if(n.begin(), n.end(), [&](const auto& e) { return e.first == id; });
              if (it == n.end())
                n.push_back({id, iv});
              else
                it->second = {add(it->second.lo, iv.lo, sat2), add(it->second.hi, iv.hi, sat2)};
            }
            std::sort(n.begin(), n.end());
            to.insert(std::move(n));
          }
        return to;
      };
      uniform_states = extend(uniform_states, true);
      cover_states = all_exact ? uniform_states : extend(cover_states, false);
    }

    // The remaining conjuncts on a state, refined to exact counts while the
    // interval answer is inconclusive (states live on the small ladder cap2).
    auto evaluate_state = [&](auto&& self, const State& s) -> Truth {
      tick();
      Profile q;
      q.cap = cap2;
      for (const auto& [id, iv] : s)
        if (!iv.zero()) q.regions.push_back({patterns[id], iv});
      Truth v = Truth::True;
      for (std::size_t i = 0; i < b.conjuncts.size() && v != Truth::False; ++i) {
        if (b.last_index[i] < 0 || cf_.node(b.conjuncts[i]).kind == CNode::Kind::Empty) continue;
        v = and3(v, eval(b.conjuncts[i], q));
      }
      if (v != Truth::Unknown) return v;
      for (std::size_t k = 0; k < s.size(); ++k) {
        if (s[k].second.exact()) continue;
        State lo = s, hi = s;
        lo[k].second = {s[k].second.lo, s[k].second.lo};
        hi[k].second = {s[k].second.lo + 1, s[k].second.hi};
        Truth a = self(self, lo);
        if (a == Truth::Unknown) return a;
        Truth c = self(self, hi);
        return a == c ? a : Truth::Unknown;
      }
      return v;
    };

    std::map<State, Truth> seen;
    for (const auto& s : uniform_states) {
      Truth v = evaluate_state(evaluate_state, s);
      if (v == Truth::True) return Truth::True;
      seen.emplace(s, v);
    }
    for (const auto& s : cover_states) {
      auto it = seen.find(s);
      Truth v = it != seen.end() ? it->second : evaluate_state(evaluate_state, s);
      if (v != Truth::False) return Truth::Unknown;
    }
    return Truth::False;
  }

  const CompiledSetFormula& cf_;
  std::size_t max_steps_;
  std::size_t split_width_;
  std::size_t steps_ = 0;
};

} // namespace detail

// ---------------------------------------------------------------------------
// Public interface

using SetAssignment = std::map<std::string, Subset>;

/// Satisfaction of `f` in P(I), |I| = n, by brute-force enumeration of subsets.
inline bool eval_enumeration(const SetFormula& f, const SetAssignment& assignment, std::size_t n,
                             const EvalLimits& limits = {}) {
  if (n > limits.enumeration_limit || n > 63)
    throw CeilingError("|I| = " + std::to_string(n) + " exceeds the enumeration limit of " +
                       std::to_string(std::min<std::size_t>(limits.enumeration_limit, 63)));
  std::vector<std::string> vars;
  std::vector<Subset> env;
  for (const auto& [name, s] : assignment) {
    vars.push_back(name);
    env.push_back(s & full_subset(n));
  }
  detail::CompiledSetFormula cf(f, vars);
  env.resize(cf.slot_count(), 0);
  detail::EnumerationEngine engine(cf, n, limits.max_steps);
  return engine.eval(cf.root(), env);
}

/// A region count: an exact value up to the cap, or saturated (more than cap).
struct RegionCount {
  std::size_t value = 0;
  bool saturated = false;

  friend bool operator==(const RegionCount&, const RegionCount&) = default;
};

/// Venn-region cardinalities of a tuple of subsets, capped. Regions not listed
/// have count zero; region membership is a sign pattern over `variables`.
struct RegionProfile {
  std::vector<std::string> variables;
  std::size_t cap = 0;
  std::vector<std::pair<std::vector<bool>, RegionCount>> regions;

  static RegionCount capped(std::size_t n, std::size_t cap) {
    return n > cap ? RegionCount{cap, true} : RegionCount{n, false};
  }

  /// The profile induced by subsets of I = {0..n-1}.
  static RegionProfile of_assignment(const std::vector<std::string>& vars, const SetAssignment& a, std::size_t n,
                                     std::size_t cap) {
    std::map<std::vector<bool>, std::size_t> counts;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<bool> sign;
      for (const auto& v : vars) {
        auto it = a.find(v);
        if (it == a.end()) throw PreconditionError("set variable '" + v + "' is not assigned");
        sign.push_back((it->second >> i) & 1U);
      }
      ++counts[sign];
    }
    RegionProfile p{vars, cap, {}};
    for (const auto& [sign, c] : counts) p.regions.push_back({sign, capped(c, cap)});
    return p;
  }

  /// The profile of a partition whose cell j (variable vars[j]) has counts[j] elements.
  static RegionProfile of_partition(const std::vector<std::string>& vars, const std::vector<std::size_t>& counts,
                                    std::size_t cap) {
    if (vars.size() != counts.size()) throw ValidationError("partition profile length mismatch");
    RegionProfile p{vars, cap, {}};
    for (std::size_t j = 0; j < vars.size(); ++j) {
      if (counts[j] == 0) continue;
      std::vector<bool> sign(vars.size(), false);
      sign[j] = true;
      p.regions.push_back({sign, capped(counts[j], cap)});
    }
    return p;
  }
};

namespace detail {

inline Profile to_internal(const CompiledSetFormula& cf, const RegionProfile& rp) {
  Profile p;
  p.cap = static_cast<std::uint32_t>(rp.cap);
  for (const auto& [sign, count] : rp.regions) {
    if (sign.size() != rp.variables.size()) throw ValidationError("region sign pattern has the wrong length");
    if (!count.saturated && count.value == 0) continue;
    if (!count.saturated && count.value > rp.cap) throw ValidationError("region count above cap");
    Pattern pat(cf.words(), 0);
    for (std::size_t j = 0; j < sign.size(); ++j)
      if (sign[j]) set_bit(pat, j);
    std::uint32_t v = count.saturated ? p.sat() : static_cast<std::uint32_t>(count.value);
    p.regions.push_back({std::move(pat), {v, v}});
  }
  return p;
}

} // namespace detail

/// Satisfaction of `f` on a capped region profile. Requires cap >= cap_bound(f).
inline bool eval_profile(const SetFormula& f, const RegionProfile& profile, const EvalLimits& limits = {}) {
  if (profile.cap < cap_bound(f))
    throw PreconditionError("profile cap " + std::to_string(profile.cap) + " is below cap_bound " +
                            std::to_string(cap_bound(f)));
  detail::CompiledSetFormula cf(f, profile.variables);
  detail::ProfileEngine engine(cf, limits.max_steps);
  Truth t = engine.evaluate(detail::to_internal(cf, profile));
  if (t == Truth::Unknown) throw Error("internal error: exact profile evaluated to unknown");
  return t == Truth::True;
}

/// Three-valued evaluation on a partition profile with interval counts: cell j
/// (variable vars[j]) has a count in counts[j] on the ladder 0..cap, cap+1.
inline Truth eval_partition_intervals(const detail::CompiledSetFormula& cf, const std::vector<Interval>& counts,
                                      std::size_t cap, detail::ProfileEngine& engine) {
  detail::Profile p;
  p.cap = static_cast<std::uint32_t>(cap);
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (counts[j].zero()) continue;
    detail::Pattern pat(cf.words(), 0);
    detail::set_bit(pat, j);
    p.regions.push_back({std::move(pat), counts[j]});
  }
  return engine.evaluate(p);
}

} // namespace fvkit

#endif
