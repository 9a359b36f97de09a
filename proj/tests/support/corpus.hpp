#ifndef FVKIT_TESTS_CORPUS_HPP
#define FVKIT_TESTS_CORPUS_HPP

// Shared test corpus: the E/P/c signature, curated and generated sentences,
// random families, random set formulas and partition assignments.

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "fvkit/fvkit.hpp"

namespace corpus {

using namespace fvkit;

inline Signature signature() {
  Signature sig;
  sig.add_relation("E", 2);
  sig.add_relation("P", 1);
  sig.add_constant("c");
  return sig;
}

// Quantifier depth <= 2, binary connective nesting <= 2, at most 4096 cells.
inline const std::vector<std::string>& curated_sentences() {
  static const std::vector<std::string> s = {
      "P(c)",
      "E(c,c)",
      "c = c",
      "!P(c)",
      "P(c) & E(c,c)",
      "P(c) | !E(c,c)",
      "P(c) -> E(c,c)",
      "exists x. P(x)",
      "forall x. P(x)",
      "exists x. !P(x)",
      "exists x. E(x,x)",
      "forall x. E(x,x)",
      "exists x. E(x,c)",
      "exists x. E(c,x)",
      "forall x. E(c,x)",
      "exists x. x = c",
      "forall x. x = c",
      "exists x. !(x = c)",
      "forall x. x = x",
      "exists x. !(x = x)",
      "exists x. (P(x) & E(x,c))",
      "forall x. (P(x) -> E(x,x))",
      "forall x. (P(x) | E(c,x))",
      "exists x. (P(x) & !E(x,x))",
      "exists x. (P(x) & !P(x))",
      "exists x. exists y. E(x,y)",
      "forall x. exists y. E(x,y)",
      "exists x. forall y. E(x,y)",
      "forall x. forall y. E(x,y)",
      "exists x. exists y. !(x = y)",
      "forall x. forall y. x = y",
      "forall x. exists y. !E(x,y)",
      "exists x. forall y. !E(y,x)",
      "exists x. (P(x) & exists y. E(x,y))",
      "forall x. (P(x) | exists y. E(y,x))",
      "exists x. (!P(x) & forall y. E(x,y))",
      "forall x. (E(x,c) -> exists y. E(y,x))",
      "(exists x. P(x)) & (exists x. !P(x))",
      "(forall x. P(x)) | (forall x. !P(x))",
      "(exists x. P(x)) -> P(c)",
      "P(c) -> (forall x. P(x))",
      "!(exists x. E(x,x))",
      "exists x. ((P(x) & E(x,c)) & !E(c,x))",
      "(exists x. E(x,x)) & !(forall x. E(x,x))",
      "(exists x. P(x)) & !P(c)",
      "forall x. (x = c -> P(x))",
      "exists x. (E(x,c) & E(c,x))",
      "(exists x. exists y. !(x = y)) & P(c)",
      "!(exists x. P(x)) | E(c,c)",
      "(forall x. E(x,c)) & (exists x. (P(x) & exists y. E(x,y)))",
  };
  return s;
}

class SentenceGenerator {
public:
  explicit SentenceGenerator(std::uint64_t seed) : rng_(seed) {}

  FormulaPtr next() {
    while (true) {
      auto f = gen({}, 2, 2);
      if (cell_count(*f) > 4096) continue;
      return f;
    }
  }

private:
  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

  TermPtr term(const std::vector<std::string>& vars) {
    std::size_t k = pick(vars.size() + 1);
    return k == vars.size() ? constant("c") : variable(vars[k]);
  }

  FormulaPtr atom(const std::vector<std::string>& vars) {
    switch (pick(5)) {
    case 0:
    case 1:
      return relation("P", {term(vars)});
    case 2:
    case 3:
      return relation("E", {term(vars), term(vars)});
    default:
      return equals(term(vars), term(vars));
    }
  }

  FormulaPtr gen(std::vector<std::string> vars, int depth, int nesting) {
    std::size_t r = pick(10);
    if (r < 3 || (depth == 0 && nesting == 0)) {
      auto a = atom(vars);
      return pick(3) == 0 ? negate(a) : a;
    }
    if (r < 6 && depth > 0) {
      std::string x = vars.empty() ? "x" : "y";
      if (vars.size() == 2) x = pick(2) ? "x" : "y";
      auto inner = vars;
      if (std::find(inner.begin(), inner.end(), x) == inner.end()) inner.push_back(x);
      // No vacuous quantifiers: x must occur free in the body.
      FormulaPtr body;
      do body = gen(inner, depth - 1, nesting);
      while (!std::binary_search(body->free.begin(), body->free.end(), x));
      return pick(2) ? exists(x, body) : forall(x, body);
    }
    if (nesting > 0) {
      auto a = gen(vars, depth, nesting - 1);
      auto b = gen(vars, depth, nesting - 1);
      switch (pick(3)) {
      case 0:
        return conj(a, b);
      case 1:
        return disj(a, b);
      default:
        return implies(a, b);
      }
    }
    if (r == 9) return negate(gen(vars, depth, nesting));
    return atom(vars);
  }

  std::mt19937_64 rng_;
};

/// `count` distinct sentences, serialized and parsed back.
inline std::vector<std::string> generated_sentences(std::size_t count, std::uint64_t seed) {
  SentenceGenerator g(seed);
  std::set<std::string> seen(curated_sentences().begin(), curated_sentences().end());
  std::vector<std::string> out;
  while (out.size() < count) {
    auto text = serialize_formula(*g.next());
    if (seen.insert(text).second) out.push_back(text);
  }
  return out;
}

inline FiniteStructure random_structure(const Signature& sig, std::size_t size, std::mt19937_64& rng) {
  FiniteStructure s(sig, size);
  std::bernoulli_distribution coin(std::uniform_real_distribution<double>(0.2, 0.8)(rng));
  std::uniform_int_distribution<Element> elem(0, static_cast<Element>(size - 1));
  for (const auto& [name, ar] : sig.relations()) {
    std::size_t entries = s.relation_table(name).size();
    for (std::size_t code = 0; code < entries; ++code)
      if (coin(rng)) s.set_relation(name, s.decode(code, ar));
  }
  for (const auto& [name, ar] : sig.functions()) {
    std::size_t entries = s.function_table(name).size();
    for (std::size_t code = 0; code < entries; ++code) s.set_function(name, s.decode(code, ar), elem(rng));
  }
  for (const auto& name : sig.constants()) s.set_constant(name, elem(rng));
  return s;
}

inline Family random_family(const Signature& sig, std::size_t indices, std::size_t max_size, std::mt19937_64& rng) {
  Family fam(sig);
  std::uniform_int_distribution<std::size_t> size(1, max_size);
  for (std::size_t i = 0; i < indices; ++i) fam.add("i" + std::to_string(i), random_structure(sig, size(rng), rng));
  return fam;
}

// ---------------------------------------------------------------------------
// Set formulas

/// At most three variables in total (free and bound), quantifier depth <= 2,
/// C-indices <= 3. Free variables are y0..y{free-1}; bound ones are z0, z1.
class SetFormulaGenerator {
public:
  explicit SetFormulaGenerator(std::uint64_t seed) : rng_(seed) {}

  SetFormulaPtr next(std::size_t free) {
    std::vector<std::string> vars;
    for (std::size_t j = 0; j < free; ++j) vars.push_back("y" + std::to_string(j));
    return formula(vars, static_cast<int>(std::min<std::size_t>(2, 3 - free)), 2);
  }

private:
  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

  SetTermPtr term(const std::vector<std::string>& vars, int size) {
    std::size_t r = pick(size > 0 ? 8 : 4);
    if (r < 2 && !vars.empty()) return set::var(vars[pick(vars.size())]);
    if (r == 2) return pick(2) ? set::zero() : set::one();
    if (r < 4) return vars.empty() ? set::one() : set::var(vars[pick(vars.size())]);
    if (r == 4) return set::complement(term(vars, size - 1));
    auto a = term(vars, size - 1);
    auto b = term(vars, size - 1);
    switch (pick(4)) {
    case 0:
      return set::meet(a, b);
    case 1:
      return set::join(a, b);
    case 2:
      return set::sum(a, b);
    default:
      return set::prod(a, b);
    }
  }

  SetFormulaPtr atom(const std::vector<std::string>& vars) {
    if (pick(2)) return set::at_least(pick(4), term(vars, 2));
    return set::equal(term(vars, 2), term(vars, 1));
  }

  SetFormulaPtr formula(std::vector<std::string> vars, int quant, int nesting) {
    std::size_t r = pick(10);
    if (r < 3 && quant > 0) {
      std::string z = "z" + std::to_string(bound_++ % 2);
      while (std::find(vars.begin(), vars.end(), z) != vars.end()) z = "z" + std::to_string(bound_++ % 2);
      vars.push_back(z);
      auto body = formula(vars, quant - 1, nesting);
      return pick(2) ? set::exists(z, body) : set::forall(z, body);
    }
    if (r < 6 && nesting > 0) {
      auto a = formula(vars, quant, nesting - 1);
      auto b = formula(vars, quant, nesting - 1);
      return pick(2) ? set::conj(a, b) : set::disj(a, b);
    }
    if (r < 7) return set::negate(formula(vars, quant, nesting));
    return atom(vars);
  }

  std::mt19937_64 rng_;
  std::size_t bound_ = 0;
};

/// Every map of n points onto `cells` labelled blocks (blocks may be empty),
/// as one subset per block.
inline std::vector<std::vector<Subset>> partition_assignments(std::size_t n, std::size_t cells) {
  std::vector<std::vector<Subset>> out;
  if (cells == 0) {
    if (n == 0) out.emplace_back();
    return out;
  }
  std::vector<std::size_t> owner(n, 0);
  while (true) {
    std::vector<Subset> blocks(cells, 0);
    for (std::size_t e = 0; e < n; ++e) blocks[owner[e]] |= Subset{1} << e;
    out.push_back(std::move(blocks));
    std::size_t e = 0;
    for (; e < n; ++e) {
      if (++owner[e] < cells) break;
      owner[e] = 0;
    }
    if (e == n) break;
  }
  return out;
}

inline SetAssignment as_assignment(const std::vector<Subset>& blocks) {
  SetAssignment a;
  for (std::size_t j = 0; j < blocks.size(); ++j) a["y" + std::to_string(j)] = blocks[j];
  return a;
}

inline std::vector<std::size_t> block_counts(const std::vector<Subset>& blocks) {
  std::vector<std::size_t> out;
  for (auto b : blocks) out.push_back(cardinality(b));
  return out;
}

inline std::vector<std::string> cell_names(std::size_t cells) {
  std::vector<std::string> out;
  for (std::size_t j = 0; j < cells; ++j) out.push_back("y" + std::to_string(j));
  return out;
}

} // namespace corpus

#endif
