#include <gtest/gtest.h>

#include "support/corpus.hpp"

using namespace fvkit;

namespace {

bool enum_eval(const std::string& text, const SetAssignment& a, std::size_t n) {
  return eval_enumeration(*parse_set_formula(text), a, n);
}

Subset value_of(const SetTerm& t, std::size_t n, Subset x, Subset y) {
  return eval_term(t, n, [&](const std::string& v) { return v == "x" ? x : y; });
}

} // namespace

// ---------------------------------------------------------------------------
// Boolean-ring table

TEST(RingTable, SumAndProductAgreeWithLattice) {
  auto x = set::var("x"), y = set::var("y");
  auto sum = set::sum(x, y), prod = set::prod(x, y);
  auto sum_def = set::join(set::meet(x, set::complement(y)), set::meet(set::complement(x), y));
  auto prod_def = set::meet(x, y);
  for (std::size_t n = 0; n <= 4; ++n)
    for (Subset a = 0; a <= full_subset(n); ++a)
      for (Subset b = 0; b <= full_subset(n); ++b) {
        ASSERT_EQ(value_of(*sum, n, a, b), value_of(*sum_def, n, a, b));
        ASSERT_EQ(value_of(*prod, n, a, b), value_of(*prod_def, n, a, b));
        ASSERT_EQ(value_of(*expand_ring_operations(sum), n, a, b), value_of(*sum, n, a, b));
      }
}

TEST(RingTable, CardinalityAtoms) {
  for (std::size_t n = 0; n <= 6; ++n)
    for (std::size_t j = 0; j <= 7; ++j)
      for (Subset w = 0; w <= full_subset(n); ++w)
        ASSERT_EQ(eval_enumeration(*set::at_least(j, set::var("w")), {{"w", w}}, n), cardinality(w) >= j);
}

TEST(RingTable, PowerSetSize) {
  for (std::size_t n = 0; n <= 6; ++n) {
    // Count the z with z = z, i.e. all subsets, via a C-free enumeration.
    std::size_t count = 0;
    for (Subset z = 0; z <= full_subset(n); ++z) count += eval_enumeration(*parse_set_formula("z == z"), {{"z", z}}, n);
    EXPECT_EQ(count, std::size_t{1} << n);
  }
}

// ---------------------------------------------------------------------------
// Enumeration semantics

TEST(EvalEnumeration, Examples) {
  EXPECT_TRUE(enum_eval("C[1](1)", {}, 1));
  EXPECT_FALSE(enum_eval("C[2](y0)", {{"y0", 0b1}}, 1));
  EXPECT_TRUE(enum_eval("setexists z. (C[1](z) && C[1](~z))", {}, 2));
  EXPECT_FALSE(enum_eval("setexists z. (C[1](z) && C[1](~z))", {}, 1));
}

TEST(EvalEnumeration, LimitAndUnassigned) {
  EXPECT_THROW(eval_enumeration(*parse_set_formula("true"), {}, 13), CeilingError);
  EXPECT_THROW(eval_enumeration(*parse_set_formula("C[1](y0)"), {}, 2), Error);
}

// ---------------------------------------------------------------------------
// Linear polynomials and cardinality reduction

TEST(LinearPolynomial, Examples) {
  std::vector<std::string> vars = {"y0", "y1", "y2"};
  auto p = to_linear_polynomial(*parse_set_term("y0 (+) y0"), vars);
  EXPECT_TRUE(p.is_zero());
  p = to_linear_polynomial(*parse_set_term("y1 (.) y1"), vars);
  EXPECT_EQ(p.coefficients, (std::vector<bool>{false, true, false}));
  EXPECT_FALSE(p.constant);
  p = to_linear_polynomial(*parse_set_term("y0 (+) y2 (+) 1"), vars);
  EXPECT_EQ(p.coefficients, (std::vector<bool>{true, false, true}));
  EXPECT_TRUE(p.constant);
}

TEST(Reduce, SumOfTwoCells) {
  std::vector<std::string> vars = {"y0", "y1"};
  auto f = reduce_to_cardinality_conditions(2, to_linear_polynomial(*parse_set_term("y0 (+) y1"), vars), vars);
  // Equivalent to C2(y0 (+) y1) on every partition of |I| <= 5.
  auto ref = parse_set_formula("C[2](y0 (+) y1)");
  for (std::size_t n = 0; n <= 5; ++n)
    for (const auto& blocks : corpus::partition_assignments(n, 2))
      EXPECT_EQ(eval_enumeration(*f, corpus::as_assignment(blocks), n),
                eval_enumeration(*ref, corpus::as_assignment(blocks), n));
}

TEST(Reduce, ConstantPicksTheOtherCells) {
  std::vector<std::string> vars = {"y0", "y1", "y2"};
  auto f = reduce_to_cardinality_conditions(1, to_linear_polynomial(*parse_set_term("y0 (+) y1 (+) 1"), vars), vars);
  auto ref = parse_set_formula("C[1](y2)");
  for (std::size_t n = 0; n <= 4; ++n)
    for (const auto& blocks : corpus::partition_assignments(n, 3))
      EXPECT_EQ(eval_enumeration(*f, corpus::as_assignment(blocks), n),
                eval_enumeration(*ref, corpus::as_assignment(blocks), n));
}

TEST(Reduce, WholeSet) {
  std::vector<std::string> vars = {"y0"};
  auto f = reduce_to_cardinality_conditions(3, to_linear_polynomial(*parse_set_term("1"), vars), vars);
  EXPECT_FALSE(eval_enumeration(*f, {{"y0", 0b11}}, 2));
  EXPECT_TRUE(eval_enumeration(*f, {{"y0", 0b11111}}, 5));
}

// ---------------------------------------------------------------------------
// Profiles

TEST(EvalProfile, Examples) {
  auto whole = parse_set_formula("C[1](1)");
  EXPECT_TRUE(eval_profile(*whole, RegionProfile{{}, 3, {{{}, {3, false}}}}));
  auto split = parse_set_formula("setexists z. (C[1](z) && C[1](~z))");
  EXPECT_TRUE(eval_profile(*split, RegionProfile{{}, 3, {{{}, {2, false}}}}));
  EXPECT_FALSE(eval_profile(*split, RegionProfile{{}, 3, {{{}, {1, false}}}}));
}

TEST(EvalProfile, CapBelowBoundIsRejected) {
  auto f = parse_set_formula("C[3](y0)");
  EXPECT_THROW(eval_profile(*f, RegionProfile::of_partition({"y0"}, {1}, 2)), PreconditionError);
}

// eval_profile and eval_enumeration agree on arbitrary assignments, at cap
// and cap + 2.
TEST(EvalProfileProperty, AgreesWithEnumeration) {
  corpus::SetFormulaGenerator gen(7);
  for (int k = 0; k < 150; ++k) {
    std::size_t free = static_cast<std::size_t>(k % 3);
    auto f = gen.next(free);
    auto vars = corpus::cell_names(free);
    std::size_t cap = cap_bound(*f);
    for (std::size_t n = 0; n <= 4; ++n) {
      std::vector<Subset> vals(free, 0);
      // Every assignment of the free variables to subsets of I.
      std::size_t total = std::size_t{1} << (n * free);
      for (std::size_t code = 0; code < total; ++code) {
        SetAssignment a;
        for (std::size_t j = 0; j < free; ++j) a[vars[j]] = (code >> (n * j)) & full_subset(n);
        bool want = eval_enumeration(*f, a, n);
        ASSERT_EQ(eval_profile(*f, RegionProfile::of_assignment(vars, a, n, cap)), want) << serialize_set_formula(*f);
        ASSERT_EQ(eval_profile(*f, RegionProfile::of_assignment(vars, a, n, cap + 2)), want);
      }
    }
  }
}

TEST(Serialize, SetFormulaRoundTrip) {
  corpus::SetFormulaGenerator gen(8);
  for (int k = 0; k < 100; ++k) {
    auto f = gen.next(static_cast<std::size_t>(k % 3));
    auto text = serialize_set_formula(*f);
    EXPECT_EQ(serialize_set_formula(*parse_set_formula(text)), text);
  }
}
