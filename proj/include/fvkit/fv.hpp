#ifndef FVKIT_FV_HPP
#define FVKIT_FV_HPP

// Feferman-Vaught decomposition of first-order formulas over direct products.
//
// decompose(phi) returns a set formula Psi(y0..ym) and sentences (or formulas
// with phi's free variables) theta_0..theta_m forming a partition: every
// structure satisfies exactly one theta_j. For a family (M_i) and a tuple of
// product elements,
//
//   prod M_i |= phi   iff   P(I) |= Psi([[theta_0]], ..., [[theta_m]])
//
// where [[theta_j]] is the set of indices whose factor (with the coordinates of
// the tuple) satisfies theta_j.
//
// Cell numbering is fixed by the recursion: atoms give <phi, not phi>; binary
// connectives refine row-major (cell j*b + k is theta_j & theta'_k); the
// existential step numbers sigma_S by the bitmask of S.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fvkit/error.hpp"
#include "fvkit/logic.hpp"
#include "fvkit/parser.hpp"
#include "fvkit/set_algebra.hpp"
#include "fvkit/set_syntax.hpp"

namespace fvkit {

/// Formulas that are jointly exhaustive and pairwise exclusive.
struct PartitionSequence {
  /// Free variables shared by the cells (sorted).
  std::vector<std::string> free;
  std::vector<FormulaPtr> cells;

  std::size_t size() const { return cells.size(); }
};

struct AcceptableSequence {
  SetFormulaPtr psi;
  PartitionSequence partition;
  /// False for cells the construction proves unsatisfiable: sigma_empty in an
  /// existential step, negations of t = t, and anything refined from those.
  std::vector<bool> realizable;

  std::size_t size() const { return partition.size(); }
  /// y0..ym, the free set variables of psi in cell order.
  std::vector<std::string> cell_variables() const;
};

/// Name of the set variable standing for cell j.
inline std::string cell_variable(std::size_t j) { return "y" + std::to_string(j); }

inline std::vector<std::string> AcceptableSequence::cell_variables() const {
  std::vector<std::string> out;
  for (std::size_t j = 0; j < size(); ++j) out.push_back(cell_variable(j));
  return out;
}

struct DecomposeOptions {
  /// Largest partition any recursion step may build.
  std::size_t cell_ceiling = 4096;
};

/// Number of cells decompose(phi) produces, saturating at SIZE_MAX.
inline std::size_t cell_count(const Formula& f) {
  constexpr std::size_t inf = std::numeric_limits<std::size_t>::max();
  using K = Formula::Kind;
  switch (f.kind) {
  case K::Equal:
  case K::Relation:
    return 2;
  case K::Not:
    return cell_count(*f.children[0]);
  case K::And:
  case K::Or:
  case K::Implies: {
    std::size_t a = cell_count(*f.children[0]), b = cell_count(*f.children[1]);
    if (a == inf || b == inf || a > inf / b) return inf;
    return a * b;
  }
  case K::Exists:
  case K::Forall: {
    std::size_t m = cell_count(*f.children[0]);
    return m >= 63 ? inf : std::size_t{1} << m;
  }
  }
  return inf;
}

/// Result of refining two partitions: cells in row-major order plus, for each
/// original cell, the refined cells it splits into.
struct Refinement {
  PartitionSequence partition;
  std::vector<std::vector<std::size_t>> left;
  std::vector<std::vector<std::size_t>> right;
};

inline std::vector<std::string> merge_free(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::string> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline Refinement refine(const PartitionSequence& p, const PartitionSequence& q) {
  Refinement r;
  r.partition.free = merge_free(p.free, q.free);
  r.left.resize(p.size());
  r.right.resize(q.size());
  for (std::size_t j = 0; j < p.size(); ++j)
    for (std::size_t k = 0; k < q.size(); ++k) {
      std::size_t idx = r.partition.cells.size();
      r.partition.cells.push_back(conj(p.cells[j], q.cells[k]));
      r.left[j].push_back(idx);
      r.right[k].push_back(idx);
    }
  return r;
}

namespace detail {

class Decomposer {
public:
  explicit Decomposer(const DecomposeOptions& opt) : opt_(opt) {}

  AcceptableSequence run(const FormulaPtr& f) {
    check(cell_count(*f), *f);
    return go(f).seq;
  }

private:
  // Every cell is a conjunction of literals over atoms (first-order atoms or
  // the existential sentences of an earlier step), keyed by their text.
  using Literals = std::vector<std::pair<std::string, bool>>;

  struct Built {
    AcceptableSequence seq;
    std::vector<Literals> lits;
  };

  static std::optional<Literals> combine(const Literals& a, const Literals& b) {
    Literals out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    for (std::size_t i = 1; i < out.size(); ++i)
      if (out[i].first == out[i - 1].first) return std::nullopt;
    return out;
  }

  void check(std::size_t cells, const Formula& f) const {
    if (cells > opt_.cell_ceiling) {
      std::string n = cells == std::numeric_limits<std::size_t>::max() ? "more than 2^63" : std::to_string(cells);
      throw CeilingError("decomposition of '" + serialize_formula(f) + "' needs " + n +
                         " cells, above the ceiling of " + std::to_string(opt_.cell_ceiling));
    }
  }

  static SetTermPtr join_of(const std::vector<std::size_t>& cells) {
    std::vector<SetTermPtr> vs;
    for (auto c : cells) vs.push_back(set::var(cell_variable(c)));
    return set::join(std::move(vs));
  }

  Built go(const FormulaPtr& fp) {
    using K = Formula::Kind;
    const Formula& f = *fp;
    switch (f.kind) {
    case K::Equal:
    case K::Relation: {
      bool trivial = f.kind == K::Equal && serialize_term(*f.terms[0]) == serialize_term(*f.terms[1]);
      std::string key = serialize_formula(f);
      return {{set::equal(set::var(cell_variable(0)), set::one()), {f.free, {fp, negate(fp)}}, {true, !trivial}},
              {{{key, true}}, {{key, false}}}};
    }
    case K::Not: {
      auto inner = go(f.children[0]);
      inner.seq.psi = set::negate(inner.seq.psi);
      return inner;
    }
    case K::And:
    case K::Or:
    case K::Implies:
      return binary(f);
    case K::Exists:
      return existential(f.symbol, f.children[0], false);
    case K::Forall:
      // forall x phi == not exists x not phi; not leaves the partition alone.
      return existential(f.symbol, f.children[0], true);
    }
    throw Error("internal error: unknown formula kind");
  }

  Built binary(const Formula& f) {
    auto ba = go(f.children[0]);
    auto bb = go(f.children[1]);
    const auto& a = ba.seq;
    const auto& b = bb.seq;
    auto r = refine(a.partition, b.partition);
    std::map<std::string, SetTermPtr> sa, sb;
    for (std::size_t j = 0; j < a.size(); ++j) sa[cell_variable(j)] = join_of(r.left[j]);
    for (std::size_t k = 0; k < b.size(); ++k) sb[cell_variable(k)] = join_of(r.right[k]);
    auto pa = substitute(a.psi, sa);
    auto pb = substitute(b.psi, sb);
    std::vector<bool> real;
    std::vector<Literals> lits;
    for (std::size_t j = 0; j < a.size(); ++j)
      for (std::size_t k = 0; k < b.size(); ++k) {
        auto l = combine(ba.lits[j], bb.lits[k]);
        real.push_back(a.realizable[j] && b.realizable[k] && l.has_value());
        lits.push_back(l ? std::move(*l) : Literals{});
      }
    SetFormulaPtr psi;
    switch (f.kind) {
    case Formula::Kind::And:
      psi = set::conj(pa, pb);
      break;
    case Formula::Kind::Or:
      psi = set::disj(pa, pb);
      break;
    default:
      psi = set::disj(set::negate(pa), pb);
    }
    return {{psi, std::move(r.partition), std::move(real)}, std::move(lits)};
  }

  Built existential(const std::string& x, const FormulaPtr& body, bool universal) {
    auto built = go(body);
    auto& inner = built.seq;
    const std::size_t m1 = inner.size();
    const std::size_t cells = std::size_t{1} << m1;

    std::vector<FormulaPtr> ex;
    std::vector<std::string> keys;
    for (std::size_t j = 0; j < m1; ++j) {
      ex.push_back(exists(x, inner.partition.cells[j]));
      keys.push_back(inner.realizable[j] ? serialize_formula(*ex.back()) : std::string());
    }
    std::vector<Literals> lits(cells);

    PartitionSequence part;
    std::vector<bool> real(cells, false);
    for (const auto& v : inner.partition.free)
      if (v != x) part.free.push_back(v);
    for (std::size_t s = 0; s < cells; ++s) {
      // Some inner cell holds of every element, and an unsatisfiable one of none.
      real[s] = s != 0;
      for (std::size_t j = 0; j < m1; ++j) {
        if ((s >> j) & 1U && !inner.realizable[j]) real[s] = false;
        // An unrealizable theta_j makes "not exists x theta_j" valid: no literal.
        if (inner.realizable[j]) lits[s].push_back({keys[j], ((s >> j) & 1U) != 0});
      }
      std::sort(lits[s].begin(), lits[s].end());
      FormulaPtr sigma;
      for (std::size_t j = 0; j < m1; ++j) {
        auto lit = (s >> j) & 1U ? ex[j] : negate(ex[j]);
        sigma = sigma ? conj(sigma, lit) : lit;
      }
      part.cells.push_back(sigma);
    }

    // Fresh witnesses z_j for the inner cells, constrained to form a partition
    // of I that refines the outer one consistently.
    std::vector<std::string> z;
    std::map<std::string, SetTermPtr> rename;
    for (std::size_t j = 0; j < m1; ++j) {
      z.push_back("z" + std::to_string(fresh_++));
      rename[cell_variable(j)] = set::var(z.back());
    }
    std::vector<SetFormulaPtr> body_parts;
    for (std::size_t j = 0; j < m1; ++j)
      for (std::size_t k = j + 1; k < m1; ++k)
        body_parts.push_back(set::equal(set::meet(set::var(z[j]), set::var(z[k])), set::zero()));
    {
      std::vector<SetTermPtr> zs;
      for (const auto& n : z) zs.push_back(set::var(n));
      body_parts.push_back(set::equal(set::join(std::move(zs)), set::one()));
    }
    for (std::size_t j = 0; j < m1; ++j) {
      std::vector<std::size_t> w;
      for (std::size_t s = 0; s < cells; ++s)
        if ((s >> j) & 1U) w.push_back(s);
      body_parts.push_back(set::equal(set::meet(set::var(z[j]), set::complement(join_of(w))), set::zero()));
    }
    auto psi0 = substitute(universal ? set::negate(inner.psi) : inner.psi, rename);
    body_parts.push_back(psi0);

    SetFormulaPtr psi = set::conj(std::move(body_parts));
    for (std::size_t j = m1; j-- > 0;) psi = set::exists(z[j], psi);
    if (universal) psi = set::negate(psi);
    return {{psi, std::move(part), std::move(real)}, std::move(lits)};
  }

  DecomposeOptions opt_;
  std::size_t fresh_ = 0;
};

} // namespace detail

/// The acceptable sequence of phi. Throws CeilingError before building more
/// than opt.cell_ceiling cells at any step.
inline AcceptableSequence decompose(const FormulaPtr& phi, const DecomposeOptions& opt = {}) {
  return detail::Decomposer(opt).run(phi);
}

namespace detail {

inline std::size_t cell_index(Evaluator& ev, const FiniteStructure& s, const Formula& f, Assignment& a) {
  using K = Formula::Kind;
  switch (f.kind) {
  case K::Equal:
  case K::Relation:
    return ev.eval(f, a) ? 0 : 1;
  case K::Not:
    return cell_index(ev, s, *f.children[0], a);
  case K::And:
  case K::Or:
  case K::Implies:
    return cell_index(ev, s, *f.children[0], a) * cell_count(*f.children[1]) +
           cell_index(ev, s, *f.children[1], a);
  case K::Exists:
  case K::Forall: {
    auto saved = a.find(f.symbol) != a.end() ? std::optional<Element>(a[f.symbol]) : std::nullopt;
    std::size_t mask = 0;
    for (Element e = 0; e < s.size(); ++e) {
      a[f.symbol] = e;
      mask |= std::size_t{1} << cell_index(ev, s, *f.children[0], a);
    }
    if (saved)
      a[f.symbol] = *saved;
    else
      a.erase(f.symbol);
    return mask;
  }
  }
  return 0;
}

} // namespace detail

/// The unique j with s |= theta_j[a] in decompose(phi), computed by following
/// the recursion instead of evaluating every cell.
inline std::size_t cell_index(const FiniteStructure& s, const Formula& phi, const Assignment& a = {}) {
  if (cell_count(phi) > (std::size_t{1} << 62)) throw CeilingError("cell index does not fit in 62 bits");
  Evaluator ev(s);
  Assignment copy = a;
  return detail::cell_index(ev, s, phi, copy);
}

namespace detail {

// The cells of a partition as one DAG over shared subformulas; evaluation is
// memoized per structure and assignment, so each shared literal is decided once.
class CellDag {
public:
  explicit CellDag(const PartitionSequence& p) {
    for (const auto& c : p.cells) roots_.push_back(add(c.get()));
  }

  std::size_t size() const { return roots_.size(); }

  void reset() { memo_.assign(nodes_.size(), -1); }

  bool holds(std::size_t cell, Evaluator& ev, const Assignment& a) { return eval(roots_[cell], ev, a); }

private:
  struct Node {
    const Formula* f;
    std::vector<std::size_t> kids;
  };

  std::size_t add(const Formula* f) {
    auto it = ids_.find(f);
    if (it != ids_.end()) return it->second;
    Node n{f, {}};
    using K = Formula::Kind;
    if (f->kind == K::Not || f->kind == K::And || f->kind == K::Or || f->kind == K::Implies)
      for (const auto& c : f->children) n.kids.push_back(add(c.get()));
    nodes_.push_back(std::move(n));
    return ids_[f] = nodes_.size() - 1;
  }

  bool eval(std::size_t id, Evaluator& ev, const Assignment& a) {
    if (memo_[id] >= 0) return memo_[id] != 0;
    const Node& n = nodes_[id];
    bool v = false;
    switch (n.f->kind) {
    case Formula::Kind::Not:
      v = !eval(n.kids[0], ev, a);
      break;
    case Formula::Kind::And:
      v = eval(n.kids[0], ev, a) && eval(n.kids[1], ev, a);
      break;
    case Formula::Kind::Or:
      v = eval(n.kids[0], ev, a) || eval(n.kids[1], ev, a);
      break;
    case Formula::Kind::Implies:
      v = !eval(n.kids[0], ev, a) || eval(n.kids[1], ev, a);
      break;
    default:
      v = ev.eval(*n.f, a);
    }
    memo_[id] = v ? 1 : 0;
    return v;
  }

  std::map<const Formula*, std::size_t> ids_;
  std::vector<Node> nodes_;
  std::vector<std::size_t> roots_;
  std::vector<signed char> memo_;
};

} // namespace detail

/// Semantic audit of a partition on all structures of size <= check_size and
/// all assignments to its free variables. Returns human-readable violations.
inline std::vector<std::string> check_partition(const PartitionSequence& p, const Signature& sig,
                                                std::size_t check_size, std::size_t max_reports = 20) {
  if (check_size == 0) throw PreconditionError("check_size must be at least 1");
  for (const auto& c : p.cells) check_formula(sig, *c);
  detail::CellDag dag(p);
  std::vector<std::string> out;
  StructureEnumerator gen(sig, check_size);
  std::size_t structure_no = 0;
  while (auto s = gen.next()) {
    Evaluator ev(*s);
    Assignment a;
    for (const auto& v : p.free) a[v] = 0;
    while (true) {
      dag.reset();
      std::vector<std::size_t> hits;
      for (std::size_t j = 0; j < dag.size(); ++j)
        if (dag.holds(j, ev, a)) hits.push_back(j);
      if (hits.size() != 1 && out.size() < max_reports) {
        std::string where = "structure #" + std::to_string(structure_no) + " (size " + std::to_string(s->size()) + ")";
        for (const auto& [v, e] : a) where += ", " + v + "=" + std::to_string(e);
        if (hits.empty()) {
          out.push_back("exhaustiveness fails on " + where + ": no cell holds");
        } else {
          std::string cells;
          for (auto h : hits) cells += (cells.empty() ? "" : ", ") + std::to_string(h);
          out.push_back("exclusivity fails on " + where + ": cells " + cells + " all hold");
        }
      }
      // Next assignment in odometer order.
      auto it = a.begin();
      for (; it != a.end(); ++it) {
        if (++it->second < s->size()) break;
        it->second = 0;
      }
      if (it == a.end()) break;
    }
    ++structure_no;
  }
  return out;
}

/// Text dump: header line, the set formula, then one line per cell.
inline std::string serialize_acceptable_sequence(const AcceptableSequence& seq) {
  std::string out = "cells " + std::to_string(seq.size()) + "\n";
  out += "psi " + serialize_set_formula(*seq.psi) + "\n";
  for (std::size_t j = 0; j < seq.size(); ++j)
    out += "theta " + std::to_string(j) + " " + serialize_formula(*seq.partition.cells[j]) + "\n";
  return out;
}

} // namespace fvkit

#endif
