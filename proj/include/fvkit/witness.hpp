#ifndef FVKIT_WITNESS_HPP
#define FVKIT_WITNESS_HPP

// Finite support and finite witnesses for sentences true in a product.
//
// support_bound(phi) turns the set formula of phi's decomposition into
// cardinality conditions (g_k, s_k); N is the largest sum of a g_k. If the
// product of a family satisfies phi, its cell counts match some condition k,
// and picking g_k(j) indices from every cell gives I' with |I'| <= N such that
// every subproduct over I'' with I' <= I'' <= I still satisfies phi.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fvkit/error.hpp"
#include "fvkit/fv.hpp"
#include "fvkit/fv_conditions.hpp"
#include "fvkit/logic.hpp"
#include "fvkit/parser.hpp"
#include "fvkit/set_eval.hpp"
#include "fvkit/skolem.hpp"

namespace fvkit {

struct WitnessOptions {
  DecomposeOptions decompose;
  SkolemOptions skolem;
  EvalLimits eval;
  ProductLimits product;
};

struct SupportBound {
  AcceptableSequence sequence;
  SkolemConditionSet conditions;
  std::size_t N = 0;
};

inline SupportBound support_bound(const FormulaPtr& phi, const WitnessOptions& opt = {}) {
  if (!phi->is_sentence()) throw PreconditionError("support_bound expects a sentence");
  SupportBound b;
  b.sequence = decompose(phi, opt.decompose);
  b.conditions = fv_skolem_conditions(phi, b.sequence, opt.decompose, opt.skolem.max_boxes);
  b.N = b.conditions.N;
  return b;
}

/// Cell counts |[[theta_j]]| for the decomposition of phi, without evaluating
/// every cell: each factor's cell is found by following the recursion.
inline std::vector<IndexSet> cell_truth_sets(const Family& fam, const FormulaPtr& phi, std::size_t cells) {
  std::vector<IndexSet> out(cells, IndexSet(fam.size()));
  for (std::size_t i = 0; i < fam.size(); ++i) out[cell_index(fam.at(i), *phi)].insert(i);
  return out;
}

inline std::vector<std::size_t> counts_of(const std::vector<IndexSet>& sets) {
  std::vector<std::size_t> out;
  for (const auto& s : sets) out.push_back(s.count());
  return out;
}

/// prod fam |= phi, decided through the decomposition. The empty family is
/// allowed here (its product is the one-point structure).
inline bool eval_product_via_fv(const Family& fam, const FormulaPtr& phi, const AcceptableSequence& seq,
                                const EvalLimits& limits = {}) {
  auto counts = counts_of(cell_truth_sets(fam, phi, seq.size()));
  auto profile = RegionProfile::of_partition(seq.cell_variables(), counts, cap_bound(*seq.psi));
  return eval_profile(*seq.psi, profile, limits);
}

inline bool eval_product_via_fv(const Family& fam, const FormulaPtr& phi, const WitnessOptions& opt = {}) {
  if (!phi->is_sentence()) throw PreconditionError("eval_product_via_fv expects a sentence");
  check_formula(fam.signature(), *phi);
  return eval_product_via_fv(fam, phi, decompose(phi, opt.decompose), opt.eval);
}

struct SupportWitness {
  /// I' = Z_0 | ... | Z_m.
  IndexSet support;
  std::size_t N = 0;
  std::size_t matched_condition = 0;
  std::vector<IndexSet> chosen;
  std::vector<IndexSet> cells;
  SupportBound bound;
};

/// `bound` must be support_bound(phi); it depends on phi alone and can be
/// shared across families.
inline SupportWitness finite_support(const Family& fam, const FormulaPtr& phi, const SupportBound& bound,
                                     const WitnessOptions& opt = {}) {
  if (!phi->is_sentence()) throw PreconditionError("finite_support expects a sentence");
  check_formula(fam.signature(), *phi);
  SupportWitness w;
  w.bound = bound;
  if (!eval_product_via_fv(fam, phi, w.bound.sequence, opt.eval))
    throw PreconditionError("the product does not satisfy the sentence");
  w.N = w.bound.N;
  w.cells = cell_truth_sets(fam, phi, w.bound.sequence.size());
  auto k = w.bound.conditions.match(counts_of(w.cells));
  if (!k) throw Error("internal error: no cardinality condition matches a satisfying product");
  w.matched_condition = *k;
  const auto& cond = w.bound.conditions.conditions[*k];
  w.support = IndexSet(fam.size());
  for (std::size_t j = 0; j < w.cells.size(); ++j) {
    IndexSet z(fam.size());
    if (cond.exact[j]) {
      z = w.cells[j];
    } else {
      auto pos = w.cells[j].positions();
      for (std::size_t t = 0; t < cond.g[j]; ++t) z.insert(pos[t]);
    }
    w.support = w.support | z;
    w.chosen.push_back(std::move(z));
  }
  // A group bounded above is taken whole; otherwise its first lo members.
  for (const auto& b : cond.groups) {
    IndexSet members(fam.size());
    for (auto j : b.cells) members = members | w.cells[j];
    auto pos = members.positions();
    std::size_t take = b.hi ? pos.size() : std::min(b.lo, pos.size());
    for (std::size_t t = 0; t < take; ++t) {
      w.support.insert(pos[t]);
      for (auto j : b.cells)
        if (w.cells[j].contains(pos[t])) w.chosen[j].insert(pos[t]);
    }
  }
  return w;
}

inline SupportWitness finite_support(const Family& fam, const FormulaPtr& phi, const WitnessOptions& opt = {}) {
  if (!phi->is_sentence()) throw PreconditionError("finite_support expects a sentence");
  return finite_support(fam, phi, support_bound(phi, opt), opt);
}

struct Replacement {
  std::string label;
  std::size_t cell = 0;
  std::optional<FiniteStructure> structure;
};

struct ReplacementPlan {
  std::vector<Replacement> entries;

  bool complete() const {
    for (const auto& e : entries)
      if (!e.structure) return false;
    return true;
  }

  Family family(const Signature& sig) const {
    Family out(sig);
    for (const auto& e : entries) {
      if (!e.structure) throw BudgetError("no replacement for index '" + e.label + "'");
      out.add(e.label, *e.structure);
    }
    return out;
  }
};

/// For every index, the first enumerated structure of size <= search_size in
/// the same cell of phi's partition. Missing replacements are left empty; use
/// require_complete to turn them into an error.
inline ReplacementPlan replace_with_finite(const Family& fam, const FormulaPtr& phi, std::size_t search_size,
                                          const WitnessOptions& opt = {}) {
  if (!phi->is_sentence()) throw PreconditionError("replace_with_finite expects a sentence");
  check_formula(fam.signature(), *phi);
  auto seq = decompose(phi, opt.decompose);
  if (!eval_product_via_fv(fam, phi, seq, opt.eval)) throw PreconditionError("the product does not satisfy the sentence");
  if (search_size == 0) throw PreconditionError("search_size must be at least 1");

  std::map<std::size_t, std::optional<FiniteStructure>> found;
  auto search = [&](std::size_t cell) -> const std::optional<FiniteStructure>& {
    auto it = found.find(cell);
    if (it != found.end()) return it->second;
    std::optional<FiniteStructure> hit;
    StructureEnumerator gen(fam.signature(), search_size);
    while (auto s = gen.next())
      if (cell_index(*s, *phi) == cell) {
        hit = std::move(*s);
        break;
      }
    return found.emplace(cell, std::move(hit)).first->second;
  };

  ReplacementPlan plan;
  for (std::size_t i = 0; i < fam.size(); ++i) {
    std::size_t cell = cell_index(fam.at(i), *phi);
    plan.entries.push_back({fam.label(i), cell, search(cell)});
  }
  return plan;
}

inline void require_complete(const ReplacementPlan& plan, const Family& fam, std::size_t search_size) {
  std::string missing;
  for (std::size_t i = 0; i < plan.entries.size(); ++i) {
    const auto& e = plan.entries[i];
    if (e.structure) continue;
    missing += "\n  index '" + e.label + "' (cell " + std::to_string(e.cell) + "): no model of size <= " +
               std::to_string(search_size) + "; the factor itself has size " + std::to_string(fam.at(i).size());
  }
  if (!missing.empty()) throw BudgetError("finite replacement search exhausted its budget:" + missing);
}

struct PseudofiniteWitness {
  ReplacementPlan plan;
  SupportWitness support;
  /// Indices of the finite product: I', enlarged by one index when I' is empty.
  IndexSet J;
  bool enlarged = false;
  FiniteStructure product;
};

inline PseudofiniteWitness pseudofinite_witness(const Family& fam, const FormulaPtr& phi, std::size_t search_size,
                                                const SupportBound& bound, const WitnessOptions& opt = {}) {
  if (fam.empty()) throw PreconditionError("pseudofinite_witness needs a nonempty family");
  auto plan = replace_with_finite(fam, phi, search_size, opt);
  require_complete(plan, fam, search_size);
  Family replaced = plan.family(fam.signature());
  auto support = finite_support(replaced, phi, bound, opt);
  IndexSet J = support.support;
  bool enlarged = false;
  if (J.empty()) {
    J.insert(0);
    enlarged = true;
  }
  auto prod = product(replaced.restrict_to(J), opt.product);
  return {std::move(plan), std::move(support), std::move(J), enlarged, std::move(prod)};
}

inline PseudofiniteWitness pseudofinite_witness(const Family& fam, const FormulaPtr& phi, std::size_t search_size,
                                                const WitnessOptions& opt = {}) {
  if (!phi->is_sentence()) throw PreconditionError("pseudofinite_witness expects a sentence");
  return pseudofinite_witness(fam, phi, search_size, support_bound(phi, opt), opt);
}

namespace detail {

inline std::string label_list(const Family& fam, const IndexSet& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& l : fam.labels_of(s)) {
    out += (first ? "" : ", ") + l;
    first = false;
  }
  return out + "}";
}

} // namespace detail

/// Text report: N, the matched condition, one line per nonempty or demanded
/// cell, and I'.
inline std::string support_report(const Family& fam, const SupportWitness& w) {
  const auto& cond = w.bound.conditions.conditions[w.matched_condition];
  std::string out;
  out += "N " + std::to_string(w.N) + "\n";
  out += "conditions " + std::to_string(w.bound.conditions.conditions.size()) + "\n";
  out += "matched " + std::to_string(w.matched_condition) + "\n";
  for (std::size_t j = 0; j < w.cells.size(); ++j) {
    if (w.cells[j].empty() && cond.g[j] == 0) continue;
    out += "cell " + std::to_string(j) + " g=" + std::to_string(cond.g[j]) +
           (cond.exact[j] ? " exact" : " at-least") + " size=" + std::to_string(w.cells[j].count()) +
           " Z=" + detail::label_list(fam, w.chosen[j]) + "\n";
  }
  for (const auto& b : cond.groups) {
    out += "group";
    for (auto j : b.cells) out += " " + std::to_string(j);
    out += " lo=" + std::to_string(b.lo) + (b.hi ? " hi=" + std::to_string(*b.hi) : std::string()) + "\n";
  }
  out += "support " + detail::label_list(fam, w.support) + "\n";
  return out;
}

inline std::string witness_report(const Family& fam, const PseudofiniteWitness& w) {
  std::string out;
  for (const auto& e : w.plan.entries)
    out += "replace " + e.label + " cell " + std::to_string(e.cell) + " size " +
           std::to_string(e.structure ? e.structure->size() : 0) + "\n";
  out += support_report(fam, w.support);
  out += "J " + detail::label_list(fam, w.J) + (w.enlarged ? " (support empty, enlarged by one index)" : "") + "\n";
  out += "product size " + std::to_string(w.product.size()) + "\n";
  out += serialize_structure(w.product) + "\n";
  return out;
}

} // namespace fvkit

#endif
