#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "fvkit/fvkit.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

const std::string kSamples = FVKIT_SAMPLES_DIR;

std::string sample(const std::string& name) { return "'" + kSamples + "/" + name + "'"; }

Run run(const std::string& args, const std::string& env = "") {
  std::string cmd = env + (env.empty() ? "" : " ") + "'" + std::string(FVKIT_CLI_PATH) + "' " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string base(const std::string& formula, bool family = true) {
  return "--sig " + sample("signature.txt") + (family ? " --family " + sample("family.txt") : "") + " --formula " +
         formula;
}

fs::path scratch_dir() {
  auto dir = fs::temp_directory_path() / ("fvkit_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

} // namespace

TEST(Cli, DecomposeAtomic) {
  auto dir = scratch_dir();
  auto dump = (dir / "psi.txt").string();
  auto r = run("decompose " + base("'P(c)'", false) + " --psi-dump '" + dump + "'");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("cells 2\n", 0), 0u);
  std::ifstream in(dump);
  std::string text((std::istreambuf_iterator<char>(in)), {});
  EXPECT_NE(text.find("psi y0 == 1"), std::string::npos);
}

TEST(Cli, DecomposeExistsWithAudit) {
  auto r = run("decompose " + base(sample("exists_p.txt"), false) + " --check-size 3");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("cells 4\n", 0), 0u);
  EXPECT_NE(r.out.find("0 violations"), std::string::npos);
}

TEST(Cli, ParseErrorExitsTwo) {
  EXPECT_EQ(run("decompose " + base("'exists x. x'", false)).code, 2);
  EXPECT_EQ(run("decompose " + base("'P(c) &'", false)).code, 2);
  EXPECT_EQ(run("decompose --sig " + sample("signature.txt")).code, 2);
}

TEST(Cli, CeilingExitsThree) {
  EXPECT_EQ(run("decompose " + base("'forall x. exists y. E(x,y)'", false) + " --cell-ceiling 4").code, 3);
  EXPECT_EQ(run("decompose " + base("'forall x. exists y. E(x,y)'", false), "FVKIT_CELL_CEILING=4").code, 3);
  EXPECT_EQ(run("decompose " + base("'forall x. exists y. E(x,y)'", false), "FVKIT_CELL_CEILING=4096").code, 0);
}

TEST(Cli, EvalWithOracleAgrees) {
  auto r = run("eval " + base(sample("exists_p.txt")) + " --oracle");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "fv true\noracle true\n");
  EXPECT_EQ(run("eval " + base(sample("forall_p.txt"))).out, "false\n");
}

TEST(Cli, EvalSingletonMatchesDirect) {
  auto dir = scratch_dir();
  auto fam = (dir / "single.txt").string();
  std::ofstream(fam) << "x: size 2; rel E = {(0,1)}; rel P = {(1)}; const c = 0;\n";
  auto sig = fvkit::parse_signature("rel E/2\nrel P/1\nconst c\n");
  auto s = fvkit::parse_structure("size 2; rel E = {(0,1)}; rel P = {(1)}; const c = 0;", sig);
  for (std::string f : {"exists x. E(c,x)", "P(c)", "forall x. P(x)"}) {
    bool direct = fvkit::evaluate(s, *fvkit::parse_formula(f, sig));
    auto r = run("eval --sig " + sample("signature.txt") + " --family '" + fam + "' --formula '" + f + "'");
    EXPECT_EQ(r.out, direct ? "true\n" : "false\n") << f;
  }
}

TEST(Cli, OversizedOracleExitsThree) {
  auto dir = scratch_dir();
  auto fam = (dir / "big.txt").string();
  {
    std::ofstream out(fam);
    for (int i = 0; i < 21; ++i) out << "i" << i << ": size 2; rel E = {}; rel P = {(0)}; const c = 0;\n";
  }
  auto args = "eval --sig " + sample("signature.txt") + " --family '" + fam + "' --formula " + sample("exists_p.txt");
  EXPECT_EQ(run(args).code, 0);
  EXPECT_EQ(run(args + " --oracle").code, 3);
}

TEST(Cli, SupportReport) {
  auto r = run("support " + base(sample("two_elements.txt")));
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("N ", 0), 0u);
  EXPECT_NE(r.out.find("support "), std::string::npos);
}

TEST(Cli, FalseProductExitsFive) {
  EXPECT_EQ(run("support " + base(sample("forall_p.txt"))).code, 5);
  EXPECT_EQ(run("witness " + base(sample("forall_p_or_pred.txt"))).code, 5);
}

TEST(Cli, WitnessBudgetExitsSix) {
  EXPECT_EQ(run("witness " + base(sample("two_elements.txt")) + " --search-size 1").code, 6);
}

TEST(Cli, WitnessStructureRoundTrips) {
  auto sig = fvkit::parse_signature("rel E/2\nrel P/1\nconst c\n");
  for (std::string f : {"exists_p.txt", "two_elements.txt"}) {
    auto r = run("witness " + base(sample(f)));
    ASSERT_EQ(r.code, 0) << f;
    auto at = r.out.find("product size ");
    ASSERT_NE(at, std::string::npos);
    auto text = r.out.substr(r.out.find('\n', at) + 1);
    auto s = fvkit::parse_structure(text, sig);
    std::ifstream in(kSamples + "/" + f);
    std::string formula((std::istreambuf_iterator<char>(in)), {});
    EXPECT_TRUE(fvkit::evaluate(s, *fvkit::parse_formula(formula, sig))) << f;
  }
}

TEST(Cli, Deterministic) {
  for (std::string cmd : {"witness", "support", "decompose"}) {
    auto args = cmd + " " + base(sample("two_elements.txt"));
    auto a = run(args), b = run(args);
    EXPECT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out) << cmd;
  }
}

TEST(Cli, ReportFileMatchesStdout) {
  auto dir = scratch_dir();
  auto report = (dir / "report.txt").string();
  auto r = run("support " + base(sample("exists_p.txt")) + " --report '" + report + "'");
  ASSERT_EQ(r.code, 0);
  std::ifstream in(report);
  std::string text((std::istreambuf_iterator<char>(in)), {});
  EXPECT_EQ(text, r.out);
}
