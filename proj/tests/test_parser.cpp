#include <gtest/gtest.h>

#include <random>

#include "support/corpus.hpp"

using namespace fvkit;

TEST(ParseFormula, Exists) {
  auto f = parse_formula("exists x. P(x)");
  EXPECT_EQ(*f, *exists("x", relation("P", {variable("x")})));
}

TEST(ParseFormula, Symmetry) {
  auto f = parse_formula("forall x. forall y. (E(x,y) -> E(y,x))");
  auto x = variable("x"), y = variable("y");
  EXPECT_EQ(*f, *forall("x", forall("y", implies(relation("E", {x, y}), relation("E", {y, x})))));
  EXPECT_TRUE(f->is_sentence());
}

TEST(ParseFormula, TermWhereFormulaExpected) {
  EXPECT_THROW(parse_formula("exists x. x"), ParseError);
}

TEST(ParseFormula, ErrorsCarryLocation) {
  try {
    parse_formula("P(x) &\n  & Q(x)");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_GT(e.column(), 0u);
  }
}

TEST(ParseFormula, ChecksArityAgainstSignature) {
  auto sig = corpus::signature();
  EXPECT_THROW(parse_formula("E(c)", sig), Error);
  EXPECT_THROW(parse_formula("Q(c)", sig), Error);
  EXPECT_NO_THROW(parse_formula("E(c,c)", sig));
}

TEST(SerializeFormula, CanonicalParentheses) {
  EXPECT_EQ(serialize_formula(*parse_formula("P(x) & Q(x)")), "(P(x) & Q(x))");
}

TEST(SerializeFormula, RoundTripIsFixpoint) {
  auto sig = corpus::signature();
  corpus::SentenceGenerator gen(99);
  for (int k = 0; k < 100; ++k) {
    // Parsing renames reused bound variables apart; after that, stable.
    auto once = serialize_formula(*parse_formula(serialize_formula(*gen.next()), sig));
    auto parsed = parse_formula(once, sig);
    EXPECT_EQ(serialize_formula(*parsed), once);
    EXPECT_EQ(*parse_formula(serialize_formula(*parsed), sig), *parsed);
  }
}

TEST(SerializeFormula, CuratedCorpusRoundTrips) {
  auto sig = corpus::signature();
  for (const auto& text : corpus::curated_sentences()) {
    auto f = parse_formula(text, sig);
    EXPECT_TRUE(f->is_sentence()) << text;
    EXPECT_EQ(serialize_formula(*parse_formula(serialize_formula(*f), sig)), serialize_formula(*f)) << text;
  }
}

TEST(ParseStructure, Basic) {
  Signature sig;
  sig.add_relation("E", 2);
  auto s = parse_structure("size 2; rel E = {(0,1)}", sig);
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.tuples("E"), (std::vector<std::vector<Element>>{{0, 1}}));
}

TEST(ParseStructure, OutOfRangeElement) {
  Signature sig;
  sig.add_relation("E", 2);
  EXPECT_THROW(parse_structure("size 2; rel E = {(0,2)}", sig), Error);
}

TEST(ParseStructure, MissingSymbolIsRejected) {
  auto sig = corpus::signature();
  EXPECT_THROW(parse_structure("size 2; rel E = {}; rel P = {}", sig), Error);
}

TEST(SerializeStructure, SortedTuplesAndRoundTrip) {
  Signature sig;
  sig.add_relation("E", 2);
  auto s = parse_structure("size 2; rel E = {(1,0),(0,1)}", sig);
  EXPECT_EQ(serialize_structure(s, " "), "size 2; rel E = {(0,1),(1,0)};");

  auto csig = corpus::signature();
  std::mt19937_64 rng(4);
  for (int k = 0; k < 50; ++k) {
    auto r = corpus::random_structure(csig, 1 + k % 3, rng);
    auto text = serialize_structure(r);
    EXPECT_EQ(serialize_structure(parse_structure(text, csig)), text);
  }
}

TEST(ParseSignature, RoundTrip) {
  auto sig = parse_signature("rel E/2\nrel P/1\nconst c\n");
  EXPECT_EQ(sig, corpus::signature());
  EXPECT_EQ(parse_signature(serialize_signature(sig)), sig);
  EXPECT_THROW(parse_signature("rel E/2\nrel E/1\n"), Error);
}

TEST(ParseFamily, InlineAndResolved) {
  Signature sig;
  sig.add_relation("P", 1);
  auto fam = parse_family("# comment\na: size 1; rel P = {}\nb: file.struct\n", sig, [](const std::string& path) {
    EXPECT_EQ(path, "file.struct");
    return std::string("size 2; rel P = {(1)}");
  });
  ASSERT_EQ(fam.size(), 2u);
  EXPECT_EQ(fam.label(1), "b");
  EXPECT_EQ(fam.at(1).size(), 2u);
  EXPECT_EQ(parse_family(serialize_family(fam), sig).labels(), fam.labels());
}

TEST(ParseFamily, DuplicateLabel) {
  Signature sig;
  sig.add_relation("P", 1);
  try {
    parse_family("a: size 1; rel P = {}\nb: size 1; rel P = {}\na: size 2; rel P = {}\n", sig);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}
