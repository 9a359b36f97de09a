#ifndef FVKIT_SET_ALGEBRA_HPP
#define FVKIT_SET_ALGEBRA_HPP

// The Boolean-algebra sort: terms and formulas over the power set of an index
// set, with the cardinality predicates C[j](t) ("t has at least j elements").

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iterator>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fvkit/error.hpp"

namespace fvkit {

struct SetTerm;
using SetTermPtr = std::shared_ptr<const SetTerm>;

struct SetTerm {
  /// Meet, Join, Sum (symmetric difference) and Product (intersection) are
  /// n-ary with at least two arguments.
  enum class Kind { Var, Zero, One, Meet, Join, Complement, Sum, Product };

  Kind kind;
  std::string name;
  std::vector<SetTermPtr> args;
};

namespace set {

inline SetTermPtr var(std::string name) {
  return std::make_shared<const SetTerm>(SetTerm{SetTerm::Kind::Var, std::move(name), {}});
}
inline SetTermPtr zero() {
  static const auto z = std::make_shared<const SetTerm>(SetTerm{SetTerm::Kind::Zero, {}, {}});
  return z;
}
inline SetTermPtr one() {
  static const auto o = std::make_shared<const SetTerm>(SetTerm{SetTerm::Kind::One, {}, {}});
  return o;
}
inline SetTermPtr complement(SetTermPtr t) {
  return std::make_shared<const SetTerm>(SetTerm{SetTerm::Kind::Complement, {}, {std::move(t)}});
}

namespace detail {
inline SetTermPtr nary(SetTerm::Kind kind, std::vector<SetTermPtr> args, SetTermPtr empty) {
  if (args.empty()) return empty;
  if (args.size() == 1) return args[0];
  return std::make_shared<const SetTerm>(SetTerm{kind, {}, std::move(args)});
}
} // namespace detail

/// Join of the arguments; 0 when empty, the argument itself when singular.
inline SetTermPtr join(std::vector<SetTermPtr> args) {
  return detail::nary(SetTerm::Kind::Join, std::move(args), zero());
}
inline SetTermPtr meet(std::vector<SetTermPtr> args) {
  return detail::nary(SetTerm::Kind::Meet, std::move(args), one());
}
inline SetTermPtr sum(std::vector<SetTermPtr> args) {
  return detail::nary(SetTerm::Kind::Sum, std::move(args), zero());
}
inline SetTermPtr prod(std::vector<SetTermPtr> args) {
  return detail::nary(SetTerm::Kind::Product, std::move(args), one());
}
inline SetTermPtr join(SetTermPtr a, SetTermPtr b) { return join(std::vector<SetTermPtr>{a, b}); }
inline SetTermPtr meet(SetTermPtr a, SetTermPtr b) { return meet(std::vector<SetTermPtr>{a, b}); }
inline SetTermPtr sum(SetTermPtr a, SetTermPtr b) { return sum(std::vector<SetTermPtr>{a, b}); }
inline SetTermPtr prod(SetTermPtr a, SetTermPtr b) { return prod(std::vector<SetTermPtr>{a, b}); }

} // namespace set

struct SetFormula;
using SetFormulaPtr = std::shared_ptr<const SetFormula>;

struct SetFormula {
  /// And/Or are n-ary. AtLeast is C[bound](terms[0]); Equal compares two terms.
  enum class Kind { True, False, Equal, AtLeast, Not, And, Or, Exists, Forall };

  Kind kind;
  std::size_t bound = 0;
  std::string var{};
  std::vector<SetTermPtr> terms{};
  std::vector<SetFormulaPtr> children{};

  bool is_quantifier() const { return kind == Kind::Exists || kind == Kind::Forall; }
};

namespace set {

inline SetFormulaPtr top() {
  static const auto t = std::make_shared<const SetFormula>(SetFormula{SetFormula::Kind::True});
  return t;
}
inline SetFormulaPtr bottom() {
  static const auto f = std::make_shared<const SetFormula>(SetFormula{SetFormula::Kind::False});
  return f;
}
inline SetFormulaPtr equal(SetTermPtr a, SetTermPtr b) {
  return std::make_shared<const SetFormula>(
      SetFormula{SetFormula::Kind::Equal, 0, {}, {std::move(a), std::move(b)}, {}});
}
/// C[j](t). C[0] is accepted and means true.
inline SetFormulaPtr at_least(std::size_t j, SetTermPtr t) {
  return std::make_shared<const SetFormula>(SetFormula{SetFormula::Kind::AtLeast, j, {}, {std::move(t)}, {}});
}
inline SetFormulaPtr negate(SetFormulaPtr f) {
  return std::make_shared<const SetFormula>(SetFormula{SetFormula::Kind::Not, 0, {}, {}, {std::move(f)}});
}
inline SetFormulaPtr conj(std::vector<SetFormulaPtr> fs) {
  if (fs.empty()) return top();
  if (fs.size() == 1) return fs[0];
  return std::make_shared<const SetFormula>(SetFormula{SetFormula::Kind::And, 0, {}, {}, std::move(fs)});
}
inline SetFormulaPtr disj(std::vector<SetFormulaPtr> fs) {
  if (fs.empty()) return bottom();
  if (fs.size() == 1) return fs[0];
  return std::make_shared<const SetFormula>(SetFormula{SetFormula::Kind::Or, 0, {}, {}, std::move(fs)});
}
inline SetFormulaPtr conj(SetFormulaPtr a, SetFormulaPtr b) { return conj(std::vector<SetFormulaPtr>{a, b}); }
inline SetFormulaPtr disj(SetFormulaPtr a, SetFormulaPtr b) { return disj(std::vector<SetFormulaPtr>{a, b}); }
inline SetFormulaPtr exists(std::string z, SetFormulaPtr body) {
  return std::make_shared<const SetFormula>(
      SetFormula{SetFormula::Kind::Exists, 0, std::move(z), {}, {std::move(body)}});
}
inline SetFormulaPtr forall(std::string z, SetFormulaPtr body) {
  return std::make_shared<const SetFormula>(
      SetFormula{SetFormula::Kind::Forall, 0, std::move(z), {}, {std::move(body)}});
}

} // namespace set

inline bool operator==(const SetTerm& a, const SetTerm& b) {
  if (a.kind != b.kind || a.name != b.name || a.args.size() != b.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (a.args[i] != b.args[i] && !(*a.args[i] == *b.args[i])) return false;
  return true;
}

inline bool operator==(const SetFormula& a, const SetFormula& b) {
  if (a.kind != b.kind || a.bound != b.bound || a.var != b.var || a.terms.size() != b.terms.size() ||
      a.children.size() != b.children.size())
    return false;
  for (std::size_t i = 0; i < a.terms.size(); ++i)
    if (!(*a.terms[i] == *b.terms[i])) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (a.children[i] != b.children[i] && !(*a.children[i] == *b.children[i])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Structural queries

inline void collect_variables(const SetTerm& t, std::set<std::string>& out) {
  if (t.kind == SetTerm::Kind::Var) out.insert(t.name);
  for (const auto& a : t.args) collect_variables(*a, out);
}

inline std::set<std::string> free_variables(const SetFormula& f) {
  std::set<std::string> out;
  for (const auto& t : f.terms) collect_variables(*t, out);
  for (const auto& c : f.children) {
    auto sub = free_variables(*c);
    out.insert(sub.begin(), sub.end());
  }
  if (f.is_quantifier()) out.erase(f.var);
  return out;
}

inline std::size_t max_cardinality_index(const SetFormula& f) {
  std::size_t m = f.kind == SetFormula::Kind::AtLeast ? f.bound : 0;
  if (f.kind == SetFormula::Kind::Equal) m = 1;
  for (const auto& c : f.children) m = std::max(m, max_cardinality_index(*c));
  return m;
}

inline std::size_t quantifier_count(const SetFormula& f) {
  std::size_t n = f.is_quantifier() ? 1 : 0;
  for (const auto& c : f.children) n += quantifier_count(*c);
  return n;
}

inline std::size_t quantifier_depth(const SetFormula& f) {
  std::size_t d = 0;
  for (const auto& c : f.children) d = std::max(d, quantifier_depth(*c));
  return d + (f.is_quantifier() ? 1 : 0);
}

inline bool uses_ring_operations(const SetTerm& t) {
  if (t.kind == SetTerm::Kind::Sum || t.kind == SetTerm::Kind::Product) return true;
  return std::any_of(t.args.begin(), t.args.end(), [](const auto& a) { return uses_ring_operations(*a); });
}

inline bool uses_ring_operations(const SetFormula& f) {
  return std::any_of(f.terms.begin(), f.terms.end(), [](const auto& t) { return uses_ring_operations(*t); }) ||
         std::any_of(f.children.begin(), f.children.end(), [](const auto& c) { return uses_ring_operations(*c); });
}

/// Smallest count cap at which capped-region evaluation of `f` is trusted:
/// largest C index (equality counts as C[1]) plus number of set quantifiers
/// plus one.
inline std::size_t cap_bound(const SetFormula& f) { return max_cardinality_index(f) + quantifier_count(f) + 1; }

/// Replaces free occurrences of variables by terms. The caller guarantees that
/// the replacement terms do not mention variables bound inside `f`.
inline SetTermPtr substitute(const SetTermPtr& t, const std::map<std::string, SetTermPtr>& sub) {
  if (t->kind == SetTerm::Kind::Var) {
    auto it = sub.find(t->name);
    return it == sub.end() ? t : it->second;
  }
  if (t->args.empty()) return t;
  std::vector<SetTermPtr> args;
  args.reserve(t->args.size());
  bool changed = false;
  for (const auto& a : t->args) {
    args.push_back(substitute(a, sub));
    changed |= args.back() != a;
  }
  if (!changed) return t;
  return std::make_shared<const SetTerm>(SetTerm{t->kind, t->name, std::move(args)});
}

inline SetFormulaPtr substitute(const SetFormulaPtr& f, const std::map<std::string, SetTermPtr>& sub) {
  if (sub.empty()) return f;
  std::map<std::string, SetTermPtr> inner;
  const auto* active = &sub;
  if (f->is_quantifier() && sub.count(f->var)) {
    inner = sub;
    inner.erase(f->var);
    active = &inner;
  }
  SetFormula copy = *f;
  bool changed = false;
  for (auto& t : copy.terms) {
    auto n = substitute(t, *active);
    changed |= n != t;
    t = n;
  }
  for (auto& c : copy.children) {
    auto n = substitute(c, *active);
    changed |= n != c;
    c = n;
  }
  if (!changed) return f;
  return std::make_shared<const SetFormula>(std::move(copy));
}

// ---------------------------------------------------------------------------
// Direct semantics on bitmask subsets (|I| <= 64)

using Subset = std::uint64_t;

inline Subset full_subset(std::size_t n) { return n >= 64 ? ~Subset{0} : (Subset{1} << n) - 1; }

inline std::size_t cardinality(Subset s) { return static_cast<std::size_t>(__builtin_popcountll(s)); }

/// Value of `t` over P(I), |I| = n, with variables looked up in `value`.
template <class Lookup>
Subset eval_term(const SetTerm& t, std::size_t n, const Lookup& value) {
  using K = SetTerm::Kind;
  const Subset full = full_subset(n);
  switch (t.kind) {
  case K::Var:
    return value(t.name) & full;
  case K::Zero:
    return 0;
  case K::One:
    return full;
  case K::Complement:
    return ~eval_term(*t.args[0], n, value) & full;
  case K::Meet:
  case K::Product: {
    Subset r = full;
    for (const auto& a : t.args) r &= eval_term(*a, n, value);
    return r;
  }
  case K::Join: {
    Subset r = 0;
    for (const auto& a : t.args) r |= eval_term(*a, n, value);
    return r;
  }
  case K::Sum: {
    Subset r = 0;
    for (const auto& a : t.args) r ^= eval_term(*a, n, value);
    return r;
  }
  }
  return 0;
}

/// Rewrites ring operations by their lattice definitions:
/// x (+) y = (x & ~y) | (~x & y) and x (.) y = x & y.
inline SetTermPtr expand_ring_operations(const SetTermPtr& t) {
  using K = SetTerm::Kind;
  std::vector<SetTermPtr> args;
  for (const auto& a : t->args) args.push_back(expand_ring_operations(a));
  switch (t->kind) {
  case K::Sum: {
    SetTermPtr acc = args[0];
    for (std::size_t i = 1; i < args.size(); ++i) {
      const auto& y = args[i];
      acc = set::join(set::meet(acc, set::complement(y)), set::meet(set::complement(acc), y));
    }
    return acc;
  }
  case K::Product:
    return set::meet(std::move(args));
  default:
    if (args.empty()) return t;
    return std::make_shared<const SetTerm>(SetTerm{t->kind, t->name, std::move(args)});
  }
}

// ---------------------------------------------------------------------------
// F2-linear polynomials

/// eps_0 y_0 (+) ... (+) eps_m y_m (+) c over F2.
struct LinearPolynomial {
  std::vector<bool> coefficients;
  bool constant = false;

  bool is_zero() const {
    return !constant && std::none_of(coefficients.begin(), coefficients.end(), [](bool b) { return b; });
  }
  std::vector<std::size_t> support() const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < coefficients.size(); ++j)
      if (coefficients[j]) out.push_back(j);
    return out;
  }

  friend bool operator==(const LinearPolynomial&, const LinearPolynomial&) = default;
};

/// Normal form over the variables `vars` (y_j is vars[j]) of a term built from
/// (+), (.), 0, 1 and variables. Products collapse by idempotence (y (.) y = y);
/// a product of distinct variables is not linear and is rejected.
inline LinearPolynomial to_linear_polynomial(const SetTerm& t, const std::vector<std::string>& vars) {
  // Multilinear form: set of monomials, each a sorted set of variable indices.
  using Monomial = std::vector<std::size_t>;
  std::function<std::set<Monomial>(const SetTerm&)> go = [&](const SetTerm& u) -> std::set<Monomial> {
    using K = SetTerm::Kind;
    switch (u.kind) {
    case K::Zero:
      return {};
    case K::One:
      return {Monomial{}};
    case K::Var: {
      auto it = std::find(vars.begin(), vars.end(), u.name);
      if (it == vars.end()) throw ValidationError("variable '" + u.name + "' not in polynomial context");
      return {Monomial{static_cast<std::size_t>(it - vars.begin())}};
    }
    case K::Sum: {
      std::set<Monomial> acc;
      for (const auto& a : u.args)
        for (const auto& m : go(*a))
          if (!acc.erase(m)) acc.insert(m);
      return acc;
    }
    case K::Product: {
      std::set<Monomial> acc{Monomial{}};
      for (const auto& a : u.args) {
        std::set<Monomial> next;
        for (const auto& m1 : acc)
          for (const auto& m2 : go(*a)) {
            Monomial m;
            std::set_union(m1.begin(), m1.end(), m2.begin(), m2.end(), std::back_inserter(m));
            if (!next.erase(m)) next.insert(m);
          }
        acc = std::move(next);
      }
      return acc;
    }
    default:
      throw ValidationError("lattice operator in ring term; only (+), (.), 0, 1 and variables are allowed");
    }
  };
  LinearPolynomial p;
  p.coefficients.assign(vars.size(), false);
  for (const auto& m : go(t)) {
    if (m.empty())
      p.constant = true;
    else if (m.size() == 1)
      p.coefficients[m[0]] = true;
    else
      throw ValidationError("product of distinct variables is not linear");
  }
  return p;
}

inline SetTermPtr to_term(const LinearPolynomial& p, const std::vector<std::string>& vars) {
  std::vector<SetTermPtr> parts;
  for (auto j : p.support()) parts.push_back(set::var(vars.at(j)));
  if (p.constant) parts.push_back(set::one());
  return set::sum(std::move(parts));
}

// ---------------------------------------------------------------------------
// Reduction of C-atoms on linear polynomials to single-cell conditions

/// A condition C[bound] on the ring sum of the listed partition cells, or its
/// negation.
struct CardinalityCondition {
  std::size_t bound;
  std::vector<std::size_t> cells;
  bool negated = false;

  friend bool operator==(const CardinalityCondition&, const CardinalityCondition&) = default;
};

namespace detail {

/// All (l_0, ..., l_p) with sum q.
inline void compositions(std::size_t parts, std::size_t q, std::vector<std::size_t>& cur,
                         std::vector<std::vector<std::size_t>>& out) {
  if (cur.size() + 1 == parts) {
    cur.push_back(q);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (std::size_t l = 0; l <= q; ++l) {
    cur.push_back(l);
    compositions(parts, q - l, cur, out);
    cur.pop_back();
  }
}

} // namespace detail

/// Rewrites C[q](p) (or its negation) into a Boolean combination of C atoms on
/// single cells, valid whenever vars[0..m] are interpreted by a partition of I.
///
///   C[q](y_j0 (+) ... (+) y_jp)  ->  OR over l_0+...+l_p = q of AND_l C[l_l](y_jl)
///   C[q](1)                       ->  C[q](1)        (q <= |I|)
///   C[q](d (+) 1)                 ->  C[q] of the sum of the cells outside d
///
/// C[0] atoms are emitted as true, and the redundancy of the disjunction is
/// kept as is.
inline SetFormulaPtr reduce_to_cardinality_conditions(std::size_t q, const LinearPolynomial& p,
                                                      const std::vector<std::string>& vars, bool negated = false) {
  if (p.coefficients.size() != vars.size()) throw ValidationError("polynomial/context length mismatch");
  auto wrap = [&](SetFormulaPtr f) { return negated ? set::negate(f) : f; };

  std::vector<std::size_t> cells = p.support();
  if (p.constant) {
    if (cells.empty()) return wrap(q == 0 ? set::top() : set::at_least(q, set::one()));
    std::vector<std::size_t> rest;
    for (std::size_t j = 0; j < vars.size(); ++j)
      if (!p.coefficients[j]) rest.push_back(j);
    cells = std::move(rest);
  }
  if (q == 0) return wrap(set::top());
  if (cells.empty()) return wrap(set::bottom());

  std::vector<std::vector<std::size_t>> lambdas;
  std::vector<std::size_t> cur;
  detail::compositions(cells.size(), q, cur, lambdas);
  std::vector<SetFormulaPtr> disjuncts;
  for (const auto& lam : lambdas) {
    std::vector<SetFormulaPtr> conjuncts;
    for (std::size_t l = 0; l < cells.size(); ++l)
      conjuncts.push_back(lam[l] == 0 ? set::top() : set::at_least(lam[l], set::var(vars[cells[l]])));
    disjuncts.push_back(set::conj(std::move(conjuncts)));
  }
  return wrap(set::disj(std::move(disjuncts)));
}

} // namespace fvkit

#endif
