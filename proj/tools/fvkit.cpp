// fvkit command-line tool: decompose, eval, support, witness.
//
// Exit codes: 0 ok, 2 parse, 3 ceiling, 4 oracle or audit mismatch,
// 5 precondition, 6 budget, 1 anything else.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "fvkit/fvkit.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kOther = 1, kParse = 2, kCeiling = 3, kMismatch = 4, kPrecondition = 5, kBudget = 6 };

struct Config {
  std::string sig_path, family_path, formula;
  bool oracle = false;
  std::size_t check_size = 0;
  std::size_t search_size = 3;
  std::size_t cell_ceiling = 4096;
  std::size_t enumeration_limit = 12;
  std::string psi_dump, report;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw fvkit::PreconditionError("cannot read '" + p.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out || !(out << text)) throw fvkit::PreconditionError("cannot write '" + p.string() + "'");
}

// --formula names a file when one exists at that path, else it is the text.
std::string formula_text(const std::string& arg) {
  std::error_code ec;
  if (fs::is_regular_file(arg, ec)) return read_file(arg);
  return arg;
}

struct Inputs {
  fvkit::Signature sig;
  fvkit::FormulaPtr phi;
  std::optional<fvkit::Family> family;
};

Inputs load(const Config& cfg, bool need_family) {
  Inputs in;
  in.sig = fvkit::parse_signature(read_file(cfg.sig_path));
  in.phi = fvkit::parse_formula(formula_text(cfg.formula), in.sig);
  if (need_family) {
    fs::path base = fs::path(cfg.family_path).parent_path();
    in.family = fvkit::parse_family(read_file(cfg.family_path), in.sig,
                                    [&](const std::string& p) { return read_file(base / p); });
  }
  return in;
}

fvkit::WitnessOptions options(const Config& cfg) {
  fvkit::WitnessOptions opt;
  opt.decompose.cell_ceiling = cfg.cell_ceiling;
  opt.eval.enumeration_limit = cfg.enumeration_limit;
  return opt;
}

int emit(const Config& cfg, const std::string& text, int code = kOk) {
  std::cout << text;
  if (!cfg.report.empty()) write_file(cfg.report, text);
  return code;
}

int cmd_decompose(const Config& cfg) {
  auto in = load(cfg, false);
  auto seq = fvkit::decompose(in.phi, options(cfg).decompose);
  if (!cfg.psi_dump.empty()) write_file(cfg.psi_dump, fvkit::serialize_acceptable_sequence(seq));
  std::string out = "cells " + std::to_string(seq.size()) + "\n";
  for (std::size_t j = 0; j < seq.size(); ++j)
    out += "theta " + std::to_string(j) + " " + fvkit::serialize_formula(*seq.partition.cells[j]) + "\n";
  int code = kOk;
  if (cfg.check_size > 0) {
    auto violations = fvkit::check_partition(seq.partition, in.sig, cfg.check_size);
    out += "check_partition size " + std::to_string(cfg.check_size) + ": " + std::to_string(violations.size()) +
           " violations\n";
    for (const auto& v : violations) out += "  " + v + "\n";
    if (!violations.empty()) code = kMismatch;
  }
  return emit(cfg, out, code);
}

int cmd_eval(const Config& cfg) {
  auto in = load(cfg, true);
  auto opt = options(cfg);
  if (!in.phi->is_sentence()) throw fvkit::PreconditionError("eval expects a sentence");
  bool fv = fvkit::eval_product_via_fv(*in.family, in.phi, opt);
  if (!cfg.oracle) return emit(cfg, fv ? "true\n" : "false\n");
  if (in.family->empty()) throw fvkit::PreconditionError("--oracle needs a nonempty family");
  bool direct = fvkit::evaluate(fvkit::product(*in.family, opt.product), *in.phi);
  std::string out = std::string("fv ") + (fv ? "true" : "false") + "\noracle " + (direct ? "true" : "false") + "\n";
  if (fv != direct) out += "MISMATCH\n";
  return emit(cfg, out, fv == direct ? kOk : kMismatch);
}

int cmd_support(const Config& cfg) {
  auto in = load(cfg, true);
  auto w = fvkit::finite_support(*in.family, in.phi, options(cfg));
  return emit(cfg, fvkit::support_report(*in.family, w));
}

int cmd_witness(const Config& cfg) {
  auto in = load(cfg, true);
  auto w = fvkit::pseudofinite_witness(*in.family, in.phi, cfg.search_size, options(cfg));
  return emit(cfg, fvkit::witness_report(*in.family, w));
}

} // namespace

int main(int argc, char** argv) {
  Config cfg;
  if (const char* env = std::getenv("FVKIT_CELL_CEILING")) {
    try {
      cfg.cell_ceiling = std::stoul(env);
    } catch (const std::exception&) {
      std::cerr << "error: FVKIT_CELL_CEILING is not a number\n";
      return kParse;
    }
  }

  CLI::App app{"Feferman-Vaught toolkit: decompose sentences, evaluate and witness products"};
  app.require_subcommand(1);
  auto common = [&](CLI::App* sub, bool family) {
    sub->add_option("--sig", cfg.sig_path, "signature file")->required()->check(CLI::ExistingFile);
    auto f = sub->add_option("--family", cfg.family_path, "family file")->check(CLI::ExistingFile);
    if (family) f->required();
    sub->add_option("--formula", cfg.formula, "sentence text, or a file containing it")->required();
    sub->add_option("--cell-ceiling", cfg.cell_ceiling, "largest partition (env FVKIT_CELL_CEILING)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--enumeration-limit", cfg.enumeration_limit, "largest index set for subset enumeration")
        ->check(CLI::PositiveNumber);
    sub->add_option("--report", cfg.report, "also write the output to this file");
  };
  auto* dec = app.add_subcommand("decompose", "print the partition; optionally dump the sequence and audit it");
  common(dec, false);
  dec->add_option("--psi-dump", cfg.psi_dump, "write cells, psi and thetas here");
  dec->add_option("--check-size", cfg.check_size, "audit the partition on all structures up to this size")
      ->check(CLI::PositiveNumber);
  auto* ev = app.add_subcommand("eval", "truth of the sentence in the product of the family");
  common(ev, true);
  ev->add_flag("--oracle", cfg.oracle, "also build the product and compare");
  auto* sup = app.add_subcommand("support", "support bound N and a support I' for the family");
  common(sup, true);
  auto* wit = app.add_subcommand("witness", "finite replacements and a finite product satisfying the sentence");
  common(wit, true);
  wit->add_option("--search-size", cfg.search_size, "largest replacement structure tried")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kParse;
  }

  try {
    if (*dec) return cmd_decompose(cfg);
    if (*ev) return cmd_eval(cfg);
    if (*sup) return cmd_support(cfg);
    return cmd_witness(cfg);
  } catch (const fvkit::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const fvkit::ValidationError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const fvkit::CeilingError& e) {
    std::cerr << "ceiling: " << e.what() << "\n";
    return kCeiling;
  } catch (const fvkit::PreconditionError& e) {
    std::cerr << "precondition: " << e.what() << "\n";
    return kPrecondition;
  } catch (const fvkit::BudgetError& e) {
    std::cerr << "budget: " << e.what() << "\n";
    return kBudget;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOther;
  }
}
