// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <map>
#include <set>
#include <functional>
#include <iostream>
#include <random>
#include <string>

#include "support/corpus.hpp"

using namespace fvkit;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Pair {
  FormulaPtr phi;
  std::string text;
  Family fam;
};

// Criterion 1's corpus, reused by 3, 4 and 5.
struct Corpus {
  Signature sig = corpus::signature();
  std::vector<std::string> sentences;
  std::vector<Pair> pairs;

  Corpus() {
    sentences = corpus::curated_sentences();
    for (const auto& s : corpus::generated_sentences(200, 2026)) sentences.push_back(s);
    std::mt19937_64 rng(2026);
    for (const auto& text : sentences) {
      auto phi = parse_formula(text, sig);
      for (std::size_t k = 1; k <= 3; ++k) pairs.push_back({phi, text, corpus::random_family(sig, k, 3, rng)});
    }
  }
};

// 1. eval_product_via_fv against brute force.
Outcome fv_contract(const Corpus& c) {
  auto t0 = Clock::now();
  std::size_t bad = 0, truths = 0;
  for (const auto& p : c.pairs) {
    bool fv = eval_product_via_fv(p.fam, p.phi);
    bool direct = evaluate(product(p.fam), *p.phi);
    truths += direct;
    if (fv != direct) {
      ++bad;
      std::cerr << "  mismatch: " << p.text << "\n" << serialize_family(p.fam);
    }
  }
  double t = seconds_since(t0);
  bool pass = bad == 0 && c.pairs.size() >= 500 && t < 600;
  return {pass, std::to_string(c.sentences.size()) + " sentences, " + std::to_string(c.pairs.size()) + " pairs (" +
                    std::to_string(truths) + " true), " + std::to_string(bad) + " mismatches, " + std::to_string(t) +
                    "s"};
}

// 2. eval_profile (cap, cap+2) and quantifier_eliminate against enumeration.
Outcome qe_soundness() {
  corpus::SetFormulaGenerator gen(2026);
  std::size_t formulas = 0, checks = 0, bad = 0;
  for (; formulas < 1200; ++formulas) {
    std::size_t cells = 1 + formulas % 3;
    auto f = gen.next(cells);
    auto vars = corpus::cell_names(cells);
    auto qe = quantifier_eliminate(*f, vars);
    std::size_t cap = cap_bound(*f);
    for (std::size_t n = 0; n <= 5; ++n)
      for (const auto& blocks : corpus::partition_assignments(n, cells)) {
        auto a = corpus::as_assignment(blocks);
        auto counts = corpus::block_counts(blocks);
        bool want = eval_enumeration(*f, a, n);
        bool ok = eval_profile(*f, RegionProfile::of_partition(vars, counts, cap)) == want &&
                  eval_profile(*f, RegionProfile::of_partition(vars, counts, cap + 2)) == want &&
                  eval_enumeration(*qe, a, n) == want;
        ++checks;
        if (!ok && bad++ < 5) std::cerr << "  disagreement: " << serialize_set_formula(*f) << " |I|=" << n << "\n";
      }
  }
  return {bad == 0, std::to_string(formulas) + " set formulas, " + std::to_string(checks) + " partition checks, " +
                        std::to_string(bad) + " disagreements"};
}

// 3. check_partition at size 3 and the truth-set identities.
Outcome partition_invariants(const Corpus& c) {
  std::size_t violations = 0, identity_failures = 0;
  for (const auto& text : c.sentences) {
    auto seq = decompose(parse_formula(text, c.sig));
    auto v = check_partition(seq.partition, c.sig, 3);
    violations += v.size();
    for (const auto& s : v) std::cerr << "  " << text << ": " << s << "\n";
  }
  for (const auto& p : c.pairs) {
    auto seq = decompose(p.phi);
    IndexSet join(p.fam.size());
    bool disjoint = true;
    for (const auto& theta : seq.partition.cells) {
      auto t = truth_set(p.fam, *theta);
      disjoint = disjoint && (join & t).empty();
      join = join | t;
    }
    if (!disjoint || join != IndexSet(p.fam.size(), true)) ++identity_failures;
  }
  return {violations == 0 && identity_failures == 0,
          std::to_string(c.sentences.size()) + " partitions, " + std::to_string(violations) + " violations; " +
              std::to_string(c.pairs.size()) + " families, " + std::to_string(identity_failures) +
              " truth-set identity failures"};
}

// 4. Superset sweep for finite_support with |I| <= 5.
Outcome monotonicity(const Corpus& c) {
  std::mt19937_64 rng(4);
  std::size_t cases = 0, checks = 0, bad = 0, maxN = 0;
  for (const auto& text : c.sentences) {
    auto phi = parse_formula(text, c.sig);
    auto bound = support_bound(phi);
    maxN = std::max(maxN, bound.N);
    std::vector<Family> fams;
    for (const auto& p : c.pairs)
      if (p.text == text) fams.push_back(p.fam);
    for (int r = 0; r < 4; ++r) fams.push_back(corpus::random_family(c.sig, 4 + r % 2, 2, rng));
    for (const auto& fam : fams) {
      if (!eval_product_via_fv(fam, phi, bound.sequence)) continue;
      auto w = finite_support(fam, phi, bound);
      ++cases;
      bool ok = w.support.count() <= w.N;
      std::size_t n = fam.size();
      for (std::size_t m = 0; ok && m < (std::size_t{1} << n); ++m) {
        IndexSet sub(n);
        for (std::size_t i = 0; i < n; ++i)
          if ((m >> i) & 1U) sub.insert(i);
        if ((sub & w.support) != w.support) continue;
        ++checks;
        auto part = fam.restrict_to(sub);
        ok = part.empty() ? eval_product_via_fv(part, phi, bound.sequence) : evaluate(product(part), *phi);
      }
      if (!ok) {
        ++bad;
        std::cerr << "  support failure: " << text << "\n" << serialize_family(fam);
      }
    }
  }
  return {bad == 0, std::to_string(cases) + " satisfying pairs, " + std::to_string(checks) +
                        " superset checks, max N " + std::to_string(maxN) + ", " + std::to_string(bad) + " failures"};
}

// 5. Replacement preserves truth sets; the witness product satisfies phi.
Outcome pipeline(const Corpus& c) {
  std::size_t cases = 0, bad = 0;
  double worst = 0;
  std::map<std::string, SupportBound> bounds;
  for (const auto& p : c.pairs) {
    auto t0 = Clock::now();
    auto it = bounds.find(p.text);
    if (it == bounds.end()) it = bounds.emplace(p.text, support_bound(p.phi)).first;
    const auto& bound = it->second;
    if (!eval_product_via_fv(p.fam, p.phi, bound.sequence)) continue;
    ++cases;
    bool ok = false;
    try {
      auto w = pseudofinite_witness(p.fam, p.phi, 3, bound);
      std::size_t m = bound.sequence.size();
      ok = cell_truth_sets(w.plan.family(c.sig), p.phi, m) == cell_truth_sets(p.fam, p.phi, m) &&
           evaluate(w.product, *p.phi);
    } catch (const Error& e) {
      std::cerr << "  " << p.text << ": " << e.what() << "\n";
    }
    double t = seconds_since(t0);
    worst = std::max(worst, t);
    if (!ok || t >= 5) {
      ++bad;
      std::cerr << "  pipeline failure (" << t << "s): " << p.text << "\n";
    }
  }
  return {bad == 0, std::to_string(cases) + " satisfying pairs, " + std::to_string(bad) + " failures, worst case " +
                        std::to_string(worst) + "s"};
}

// 6. Boolean-ring table, C_j semantics and |P(I_n)| = 2^n.
Outcome ring_table() {
  std::size_t bad = 0, checks = 0;
  auto x = set::var("x"), y = set::var("y");
  auto sum = set::sum(x, y), prod = set::prod(x, y);
  auto sum_def = set::join(set::meet(x, set::complement(y)), set::meet(set::complement(x), y));
  auto prod_def = set::meet(x, y);
  for (std::size_t n = 0; n <= 4; ++n)
    for (Subset a = 0; a <= full_subset(n); ++a)
      for (Subset b = 0; b <= full_subset(n); ++b) {
        auto val = [&](const SetTermPtr& t) {
          return eval_term(*t, n, [&](const std::string& v) { return v == "x" ? a : b; });
        };
        bad += val(sum) != val(sum_def);
        bad += val(prod) != val(prod_def);
        bad += !eval_enumeration(*set::equal(sum, sum_def), {{"x", a}, {"y", b}}, n);
        checks += 3;
      }
  for (std::size_t n = 0; n <= 6; ++n)
    for (std::size_t j = 0; j <= 7; ++j)
      for (Subset w = 0; w <= full_subset(n); ++w) {
        bad += eval_enumeration(*set::at_least(j, set::var("w")), {{"w", w}}, n) != (cardinality(w) >= j);
        ++checks;
      }
  // Terms take values in P(I_n): 2^n distinct values, whatever bits are fed in.
  for (std::size_t n = 0; n <= 6; ++n) {
    std::set<Subset> values;
    for (Subset w = 0; w < (Subset{1} << (n + 2)); ++w)
      values.insert(eval_term(*set::join(set::var("w"), set::zero()), n, [&](const std::string&) { return w; }));
    bad += values.size() != (std::size_t{1} << n);
    ++checks;
  }
  return {bad == 0, std::to_string(checks) + " checks, " + std::to_string(bad) + " failures"};
}

} // namespace

int main() {
  auto t0 = Clock::now();
  Corpus c;
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 FV main contract", [&] { return fv_contract(c); }},
      {"2 QE/profile soundness", [] { return qe_soundness(); }},
      {"3 partition invariants", [&] { return partition_invariants(c); }},
      {"4 support monotonicity", [&] { return monotonicity(c); }},
      {"5 finite witness pipeline", [&] { return pipeline(c); }},
      {"6 Boolean-ring table", [] { return ring_table(); }},
  };
  bool all = true;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = all && o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << name << ": " << o.detail << std::endl;
  }
  std::cout << "total " << seconds_since(t0) << "s" << std::endl;
  return all ? 0 : 1;
}
