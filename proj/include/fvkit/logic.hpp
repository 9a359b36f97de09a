#ifndef FVKIT_LOGIC_HPP
#define FVKIT_LOGIC_HPP

// First-order syntax over a finite signature, explicit finite structures,
// brute-force satisfaction, coordinatewise products and truth sets.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fvkit/error.hpp"

namespace fvkit {

using Element = std::size_t;

// ---------------------------------------------------------------------------
// Signature

class Signature {
public:
  void add_relation(const std::string& name, std::size_t arity) {
    check_new(name, arity);
    relations_.emplace(name, arity);
  }
  void add_function(const std::string& name, std::size_t arity) {
    check_new(name, arity);
    functions_.emplace(name, arity);
  }
  void add_constant(const std::string& name) {
    check_new(name, 1);
    constants_.insert(name);
  }

  const std::map<std::string, std::size_t>& relations() const { return relations_; }
  const std::map<std::string, std::size_t>& functions() const { return functions_; }
  const std::set<std::string>& constants() const { return constants_; }

  std::optional<std::size_t> relation_arity(const std::string& name) const {
    auto it = relations_.find(name);
    if (it == relations_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<std::size_t> function_arity(const std::string& name) const {
    auto it = functions_.find(name);
    if (it == functions_.end()) return std::nullopt;
    return it->second;
  }
  bool has_constant(const std::string& name) const { return constants_.count(name) != 0; }
  bool has_symbol(const std::string& name) const {
    return relations_.count(name) || functions_.count(name) || constants_.count(name);
  }

  friend bool operator==(const Signature&, const Signature&) = default;

private:
  void check_new(const std::string& name, std::size_t arity) const {
    if (name.empty()) throw ValidationError("empty symbol name");
    if (arity == 0) throw ValidationError("symbol '" + name + "' must have positive arity");
    if (has_symbol(name)) throw ValidationError("duplicate symbol '" + name + "'");
  }

  std::map<std::string, std::size_t> relations_;
  std::map<std::string, std::size_t> functions_;
  std::set<std::string> constants_;
};

// ---------------------------------------------------------------------------
// Terms and formulas

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  enum class Kind { Variable, Constant, Apply };

  Kind kind;
  std::string name;
  std::vector<TermPtr> args;
};

inline TermPtr variable(std::string name) {
  return std::make_shared<const Term>(Term{Term::Kind::Variable, std::move(name), {}});
}
inline TermPtr constant(std::string name) {
  return std::make_shared<const Term>(Term{Term::Kind::Constant, std::move(name), {}});
}
inline TermPtr apply(std::string name, std::vector<TermPtr> args) {
  return std::make_shared<const Term>(Term{Term::Kind::Apply, std::move(name), std::move(args)});
}

inline bool operator==(const Term& a, const Term& b) {
  if (a.kind != b.kind || a.name != b.name || a.args.size() != b.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (a.args[i] != b.args[i] && !(*a.args[i] == *b.args[i])) return false;
  return true;
}

inline void collect_variables(const Term& t, std::set<std::string>& out) {
  if (t.kind == Term::Kind::Variable) out.insert(t.name);
  for (const auto& a : t.args) collect_variables(*a, out);
}

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  enum class Kind { Equal, Relation, Not, And, Or, Implies, Exists, Forall };

  Kind kind;
  /// Relation symbol for Relation, bound variable for Exists/Forall.
  std::string symbol;
  std::vector<TermPtr> terms;
  std::vector<FormulaPtr> children;
  /// Sorted free variables, computed at construction.
  std::vector<std::string> free;

  bool is_quantifier() const { return kind == Kind::Exists || kind == Kind::Forall; }
  bool is_sentence() const { return free.empty(); }
};

namespace detail {

inline FormulaPtr make_formula(Formula::Kind kind, std::string symbol, std::vector<TermPtr> terms,
                               std::vector<FormulaPtr> children) {
  std::set<std::string> fv;
  for (const auto& t : terms) collect_variables(*t, fv);
  for (const auto& c : children) fv.insert(c->free.begin(), c->free.end());
  if (kind == Formula::Kind::Exists || kind == Formula::Kind::Forall) fv.erase(symbol);
  return std::make_shared<const Formula>(Formula{kind, std::move(symbol), std::move(terms),
                                                 std::move(children), {fv.begin(), fv.end()}});
}

} // namespace detail

inline FormulaPtr equals(TermPtr a, TermPtr b) {
  return detail::make_formula(Formula::Kind::Equal, {}, {std::move(a), std::move(b)}, {});
}
inline FormulaPtr relation(std::string name, std::vector<TermPtr> args) {
  return detail::make_formula(Formula::Kind::Relation, std::move(name), std::move(args), {});
}
inline FormulaPtr negate(FormulaPtr f) {
  return detail::make_formula(Formula::Kind::Not, {}, {}, {std::move(f)});
}
inline FormulaPtr conj(FormulaPtr a, FormulaPtr b) {
  return detail::make_formula(Formula::Kind::And, {}, {}, {std::move(a), std::move(b)});
}
inline FormulaPtr disj(FormulaPtr a, FormulaPtr b) {
  return detail::make_formula(Formula::Kind::Or, {}, {}, {std::move(a), std::move(b)});
}
inline FormulaPtr implies(FormulaPtr a, FormulaPtr b) {
  return detail::make_formula(Formula::Kind::Implies, {}, {}, {std::move(a), std::move(b)});
}
inline FormulaPtr exists(std::string var, FormulaPtr body) {
  return detail::make_formula(Formula::Kind::Exists, std::move(var), {}, {std::move(body)});
}
inline FormulaPtr forall(std::string var, FormulaPtr body) {
  return detail::make_formula(Formula::Kind::Forall, std::move(var), {}, {std::move(body)});
}

/// The valid sentence forall x. x = x.
inline FormulaPtr verum() { return forall("x", equals(variable("x"), variable("x"))); }

inline bool operator==(const Formula& a, const Formula& b) {
  if (a.kind != b.kind || a.symbol != b.symbol || a.terms.size() != b.terms.size() ||
      a.children.size() != b.children.size())
    return false;
  for (std::size_t i = 0; i < a.terms.size(); ++i)
    if (!(*a.terms[i] == *b.terms[i])) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (a.children[i] != b.children[i] && !(*a.children[i] == *b.children[i])) return false;
  return true;
}

inline std::size_t quantifier_depth(const Formula& f) {
  std::size_t d = 0;
  for (const auto& c : f.children) d = std::max(d, quantifier_depth(*c));
  return d + (f.is_quantifier() ? 1 : 0);
}

namespace detail {

inline void check_term(const Signature& sig, const Term& t) {
  switch (t.kind) {
  case Term::Kind::Variable:
    return;
  case Term::Kind::Constant:
    if (!sig.has_constant(t.name)) throw ValidationError("unknown constant '" + t.name + "'");
    return;
  case Term::Kind::Apply: {
    auto ar = sig.function_arity(t.name);
    if (!ar) throw ValidationError("unknown function symbol '" + t.name + "'");
    if (*ar != t.args.size())
      throw ValidationError("function '" + t.name + "' expects " + std::to_string(*ar) +
                            " arguments, got " + std::to_string(t.args.size()));
    for (const auto& a : t.args) check_term(sig, *a);
    return;
  }
  }
}

} // namespace detail

/// Throws ValidationError if some symbol of `f` is missing from `sig` or used
/// with the wrong arity.
inline void check_formula(const Signature& sig, const Formula& f) {
  if (f.kind == Formula::Kind::Relation) {
    auto ar = sig.relation_arity(f.symbol);
    if (!ar) throw ValidationError("unknown relation symbol '" + f.symbol + "'");
    if (*ar != f.terms.size())
      throw ValidationError("relation '" + f.symbol + "' expects " + std::to_string(*ar) +
                            " arguments, got " + std::to_string(f.terms.size()));
  }
  for (const auto& t : f.terms) detail::check_term(sig, *t);
  for (const auto& c : f.children) check_formula(sig, *c);
}

// ---------------------------------------------------------------------------
// Finite structures

namespace detail {

inline std::size_t checked_power(std::size_t base, std::size_t exp, std::size_t limit) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && r > limit / base) return limit + 1;
    r *= base;
  }
  return r;
}

} // namespace detail

/// A structure whose universe is {0, ..., size-1}. Relation and function
/// tables are dense, indexed by the mixed-radix encoding of the argument tuple.
class FiniteStructure {
public:
  /// Largest table (size^arity entries) a structure may hold.
  static constexpr std::size_t max_table_entries = 10'000'000;

  FiniteStructure(Signature sig, std::size_t size) : sig_(std::move(sig)), size_(size) {
    if (size == 0) throw ValidationError("universe must be nonempty");
    for (const auto& [name, ar] : sig_.relations()) relations_[name].assign(table_size(ar), false);
    for (const auto& [name, ar] : sig_.functions()) functions_[name].assign(table_size(ar), 0);
    for (const auto& name : sig_.constants()) constants_[name] = 0;
  }

  const Signature& signature() const { return sig_; }
  std::size_t size() const { return size_; }

  bool holds(const std::string& rel, std::span<const Element> args) const {
    return relation_table(rel)[encode(args, arity_of_relation(rel))];
  }
  Element apply(const std::string& fun, std::span<const Element> args) const {
    return function_table(fun)[encode(args, arity_of_function(fun))];
  }
  Element constant(const std::string& name) const {
    auto it = constants_.find(name);
    if (it == constants_.end()) throw ValidationError("unknown constant '" + name + "'");
    return it->second;
  }

  void set_relation(const std::string& rel, std::span<const Element> args, bool value = true) {
    auto& table = relations_.at(checked_relation(rel));
    table[encode(args, arity_of_relation(rel))] = value;
  }
  void set_function(const std::string& fun, std::span<const Element> args, Element value) {
    check_element(value);
    auto& table = functions_.at(checked_function(fun));
    table[encode(args, arity_of_function(fun))] = value;
  }
  void set_constant(const std::string& name, Element value) {
    check_element(value);
    auto it = constants_.find(name);
    if (it == constants_.end()) throw ValidationError("unknown constant '" + name + "'");
    it->second = value;
  }

  const std::vector<bool>& relation_table(const std::string& rel) const {
    auto it = relations_.find(rel);
    if (it == relations_.end()) throw ValidationError("unknown relation symbol '" + rel + "'");
    return it->second;
  }
  const std::vector<Element>& function_table(const std::string& fun) const {
    auto it = functions_.find(fun);
    if (it == functions_.end()) throw ValidationError("unknown function symbol '" + fun + "'");
    return it->second;
  }

  /// Sorted list of the tuples in relation `rel`.
  std::vector<std::vector<Element>> tuples(const std::string& rel) const {
    const auto& table = relation_table(rel);
    std::size_t ar = arity_of_relation(rel);
    std::vector<std::vector<Element>> out;
    for (std::size_t code = 0; code < table.size(); ++code)
      if (table[code]) out.push_back(decode(code, ar));
    return out;
  }

  std::vector<Element> decode(std::size_t code, std::size_t arity) const {
    std::vector<Element> t(arity);
    for (std::size_t k = arity; k-- > 0;) {
      t[k] = code % size_;
      code /= size_;
    }
    return t;
  }

  std::size_t encode(std::span<const Element> args, std::size_t arity) const {
    if (args.size() != arity)
      throw ValidationError("expected " + std::to_string(arity) + " arguments, got " +
                            std::to_string(args.size()));
    std::size_t code = 0;
    for (Element e : args) {
      check_element(e);
      code = code * size_ + e;
    }
    return code;
  }

  friend bool operator==(const FiniteStructure&, const FiniteStructure&) = default;

private:
  std::size_t table_size(std::size_t arity) const {
    std::size_t n = detail::checked_power(size_, arity, max_table_entries);
    if (n > max_table_entries)
      throw CeilingError("table of " + std::to_string(size_) + "^" + std::to_string(arity) +
                         " entries exceeds " + std::to_string(max_table_entries));
    return n;
  }
  void check_element(Element e) const {
    if (e >= size_)
      throw ValidationError("element " + std::to_string(e) + " out of range for universe size " +
                            std::to_string(size_));
  }
  std::size_t arity_of_relation(const std::string& rel) const {
    auto ar = sig_.relation_arity(rel);
    if (!ar) throw ValidationError("unknown relation symbol '" + rel + "'");
    return *ar;
  }
  std::size_t arity_of_function(const std::string& fun) const {
    auto ar = sig_.function_arity(fun);
    if (!ar) throw ValidationError("unknown function symbol '" + fun + "'");
    return *ar;
  }
  const std::string& checked_relation(const std::string& rel) const {
    arity_of_relation(rel);
    return rel;
  }
  const std::string& checked_function(const std::string& fun) const {
    arity_of_function(fun);
    return fun;
  }

  Signature sig_;
  std::size_t size_;
  std::map<std::string, std::vector<bool>> relations_;
  std::map<std::string, std::vector<Element>> functions_;
  std::map<std::string, Element> constants_;
};

// ---------------------------------------------------------------------------
// Families and index sets

/// Positions 0..|I|-1 of an index set I, as a membership vector.
class IndexSet {
public:
  IndexSet() = default;
  explicit IndexSet(std::size_t universe, bool full = false) : bits_(universe, full) {}

  static IndexSet from_positions(std::size_t universe, const std::vector<std::size_t>& pos) {
    IndexSet s(universe);
    for (auto p : pos) s.insert(p);
    return s;
  }

  std::size_t universe() const { return bits_.size(); }
  bool contains(std::size_t i) const { return bits_.at(i); }
  void insert(std::size_t i) { bits_.at(i) = true; }
  void erase(std::size_t i) { bits_.at(i) = false; }
  std::size_t count() const { return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), true)); }
  bool empty() const { return count() == 0; }

  std::vector<std::size_t> positions() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < bits_.size(); ++i)
      if (bits_[i]) out.push_back(i);
    return out;
  }

  IndexSet complement() const {
    IndexSet r(universe());
    for (std::size_t i = 0; i < bits_.size(); ++i) r.bits_[i] = !bits_[i];
    return r;
  }

  friend IndexSet operator|(const IndexSet& a, const IndexSet& b) { return combine(a, b, 0); }
  friend IndexSet operator&(const IndexSet& a, const IndexSet& b) { return combine(a, b, 1); }
  friend IndexSet operator^(const IndexSet& a, const IndexSet& b) { return combine(a, b, 2); }
  friend bool operator==(const IndexSet&, const IndexSet&) = default;

private:
  static IndexSet combine(const IndexSet& a, const IndexSet& b, int op) {
    if (a.universe() != b.universe()) throw ValidationError("index sets over different universes");
    IndexSet r(a.universe());
    for (std::size_t i = 0; i < a.bits_.size(); ++i) {
      bool x = a.bits_[i], y = b.bits_[i];
      r.bits_[i] = op == 0 ? (x || y) : op == 1 ? (x && y) : (x != y);
    }
    return r;
  }

  std::vector<bool> bits_;
};

/// An indexed family of finite structures over one signature.
class Family {
public:
  explicit Family(Signature sig) : sig_(std::move(sig)) {}

  void add(std::string label, FiniteStructure s) {
    if (!(s.signature() == sig_))
      throw ValidationError("structure for index '" + label + "' has a different signature");
    if (std::find(labels_.begin(), labels_.end(), label) != labels_.end())
      throw ValidationError("duplicate index label '" + label + "'");
    labels_.push_back(std::move(label));
    structures_.push_back(std::move(s));
  }

  const Signature& signature() const { return sig_; }
  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<FiniteStructure>& structures() const { return structures_; }
  const FiniteStructure& at(std::size_t i) const { return structures_.at(i); }
  const std::string& label(std::size_t i) const { return labels_.at(i); }

  /// The subfamily indexed by `subset`, in the parent's order.
  Family restrict_to(const IndexSet& subset) const {
    Family r(sig_);
    for (auto i : subset.positions()) r.add(labels_[i], structures_[i]);
    return r;
  }

  std::vector<std::string> labels_of(const IndexSet& subset) const {
    std::vector<std::string> out;
    for (auto i : subset.positions()) out.push_back(labels_[i]);
    return out;
  }

private:
  Signature sig_;
  std::vector<std::string> labels_;
  std::vector<FiniteStructure> structures_;
};

// ---------------------------------------------------------------------------
// Satisfaction

using Assignment = std::map<std::string, Element>;

/// Tarskian satisfaction over one structure. Quantified subformulas are
/// memoized on the values of their free variables, so repeated evaluation of
/// formulas that share subterms (as decomposition cells do) stays cheap.
class Evaluator {
public:
  explicit Evaluator(const FiniteStructure& s) : s_(s) {}

  bool eval(const Formula& f, const Assignment& a) {
    for (const auto& v : f.free)
      if (!a.count(v)) throw ValidationError("unbound free variable '" + v + "'");
    Frame frame{a, {}};
    return eval(f, frame);
  }

  bool eval(const Formula& f) { return eval(f, Assignment{}); }

private:
  struct Frame {
    const Assignment& base;
    std::vector<std::pair<const std::string*, Element>> bound;

    Element lookup(const std::string& name) const {
      for (auto it = bound.rbegin(); it != bound.rend(); ++it)
        if (*it->first == name) return it->second;
      auto it = base.find(name);
      if (it == base.end()) throw ValidationError("unbound free variable '" + name + "'");
      return it->second;
    }
  };

  Element term(const Term& t, const Frame& fr) const {
    switch (t.kind) {
    case Term::Kind::Variable:
      return fr.lookup(t.name);
    case Term::Kind::Constant:
      return s_.constant(t.name);
    case Term::Kind::Apply: {
      std::vector<Element> args;
      args.reserve(t.args.size());
      for (const auto& a : t.args) args.push_back(term(*a, fr));
      return s_.apply(t.name, args);
    }
    }
    return 0;
  }

  bool eval(const Formula& f, Frame& fr) {
    using K = Formula::Kind;
    switch (f.kind) {
    case K::Equal:
      return term(*f.terms[0], fr) == term(*f.terms[1], fr);
    case K::Relation: {
      std::vector<Element> args;
      args.reserve(f.terms.size());
      for (const auto& t : f.terms) args.push_back(term(*t, fr));
      return s_.holds(f.symbol, args);
    }
    case K::Not:
      return !eval(*f.children[0], fr);
    case K::And:
      return eval(*f.children[0], fr) && eval(*f.children[1], fr);
    case K::Or:
      return eval(*f.children[0], fr) || eval(*f.children[1], fr);
    case K::Implies:
      return !eval(*f.children[0], fr) || eval(*f.children[1], fr);
    case K::Exists:
    case K::Forall:
      return quantifier(f, fr);
    }
    return false;
  }

  bool quantifier(const Formula& f, Frame& fr) {
    std::vector<Element> key;
    key.reserve(f.free.size());
    for (const auto& v : f.free) key.push_back(fr.lookup(v));
    auto& slot = memo_[&f];
    if (auto it = slot.find(key); it != slot.end()) return it->second;

    bool want = f.kind == Formula::Kind::Exists;
    bool result = !want;
    fr.bound.emplace_back(&f.symbol, 0);
    for (Element e = 0; e < s_.size(); ++e) {
      fr.bound.back().second = e;
      if (eval(*f.children[0], fr) == want) {
        result = want;
        break;
      }
    }
    fr.bound.pop_back();
    slot.emplace(std::move(key), result);
    return result;
  }

  const FiniteStructure& s_;
  std::unordered_map<const Formula*, std::map<std::vector<Element>, bool>> memo_;
};

/// Satisfaction of `f` in `s` under `a`. Checks symbols against the signature.
inline bool evaluate(const FiniteStructure& s, const Formula& f, const Assignment& a = {}) {
  check_formula(s.signature(), f);
  return Evaluator(s).eval(f, a);
}

// ---------------------------------------------------------------------------
// Products

struct ProductLimits {
  std::size_t max_universe = 1'000'000;
};

/// Coordinatewise product. Element e of the product encodes the tuple of
/// coordinates in lexicographic order, first factor most significant.
inline FiniteStructure product(const Family& fam, const ProductLimits& limits = {}) {
  if (fam.empty()) throw PreconditionError("product over an empty index set is not supported");
  const auto k = fam.size();
  std::size_t n = 1;
  for (const auto& s : fam.structures()) {
    if (n > limits.max_universe / s.size())
      throw CeilingError("product universe exceeds " + std::to_string(limits.max_universe) +
                         " elements");
    n *= s.size();
  }

  std::vector<std::vector<Element>> coords(n, std::vector<Element>(k));
  for (std::size_t e = 0; e < n; ++e) {
    std::size_t code = e;
    for (std::size_t c = k; c-- > 0;) {
      coords[e][c] = code % fam.at(c).size();
      code /= fam.at(c).size();
    }
  }
  auto encode = [&](const std::vector<Element>& t) {
    std::size_t code = 0;
    for (std::size_t c = 0; c < k; ++c) code = code * fam.at(c).size() + t[c];
    return code;
  };

  const Signature& sig = fam.signature();
  FiniteStructure out(sig, n);

  for (const auto& [name, ar] : sig.relations()) {
    std::size_t entries = out.relation_table(name).size();
    std::vector<Element> coord_args(ar);
    for (std::size_t code = 0; code < entries; ++code) {
      auto args = out.decode(code, ar);
      bool all = true;
      for (std::size_t c = 0; c < k && all; ++c) {
        for (std::size_t a = 0; a < ar; ++a) coord_args[a] = coords[args[a]][c];
        all = fam.at(c).holds(name, coord_args);
      }
      if (all) out.set_relation(name, args);
    }
  }
  for (const auto& [name, ar] : sig.functions()) {
    std::size_t entries = out.function_table(name).size();
    std::vector<Element> coord_args(ar), value(k);
    for (std::size_t code = 0; code < entries; ++code) {
      auto args = out.decode(code, ar);
      for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t a = 0; a < ar; ++a) coord_args[a] = coords[args[a]][c];
        value[c] = fam.at(c).apply(name, coord_args);
      }
      out.set_function(name, args, encode(value));
    }
  }
  for (const auto& name : sig.constants()) {
    std::vector<Element> value(k);
    for (std::size_t c = 0; c < k; ++c) value[c] = fam.at(c).constant(name);
    out.set_constant(name, encode(value));
  }
  return out;
}

/// [[θ]]_I: the indices whose structure satisfies the sentence θ.
inline IndexSet truth_set(const Family& fam, const Formula& theta) {
  if (!theta.is_sentence()) throw PreconditionError("truth_set expects a sentence");
  check_formula(fam.signature(), theta);
  IndexSet out(fam.size());
  for (std::size_t i = 0; i < fam.size(); ++i)
    if (Evaluator(fam.at(i)).eval(theta)) out.insert(i);
  return out;
}

// ---------------------------------------------------------------------------
// Structure enumeration

/// Yields every structure over a signature with universe size 1..max_size,
/// tables enumerated as an odometer (relations, then functions, then
/// constants, each in symbol order). Not quotiented by isomorphism.
class StructureEnumerator {
public:
  StructureEnumerator(Signature sig, std::size_t max_size) : sig_(std::move(sig)), max_size_(max_size) {
    if (max_size == 0) throw PreconditionError("max_size must be at least 1");
  }

  std::optional<FiniteStructure> next() {
    if (done_) return std::nullopt;
    if (!started_) {
      start_size(1);
      started_ = true;
    } else if (!advance()) {
      if (size_ == max_size_) {
        done_ = true;
        return std::nullopt;
      }
      start_size(size_ + 1);
    }
    return build();
  }

private:
  void start_size(std::size_t n) {
    size_ = n;
    radices_.clear();
    FiniteStructure probe(sig_, n);
    for (const auto& [name, ar] : sig_.relations())
      radices_.insert(radices_.end(), probe.relation_table(name).size(), 2);
    for (const auto& [name, ar] : sig_.functions())
      radices_.insert(radices_.end(), probe.function_table(name).size(), n);
    radices_.insert(radices_.end(), sig_.constants().size(), n);
    digits_.assign(radices_.size(), 0);
  }

  bool advance() {
    for (std::size_t i = digits_.size(); i-- > 0;) {
      if (++digits_[i] < radices_[i]) return true;
      digits_[i] = 0;
    }
    return false;
  }

  FiniteStructure build() const {
    FiniteStructure s(sig_, size_);
    std::size_t d = 0;
    for (const auto& [name, ar] : sig_.relations()) {
      std::size_t entries = s.relation_table(name).size();
      for (std::size_t code = 0; code < entries; ++code, ++d)
        if (digits_[d]) s.set_relation(name, s.decode(code, ar));
    }
    for (const auto& [name, ar] : sig_.functions()) {
      std::size_t entries = s.function_table(name).size();
      for (std::size_t code = 0; code < entries; ++code, ++d)
        s.set_function(name, s.decode(code, ar), digits_[d]);
    }
    for (const auto& name : sig_.constants()) s.set_constant(name, digits_[d++]);
    return s;
  }

  Signature sig_;
  std::size_t max_size_;
  std::size_t size_ = 0;
  bool started_ = false;
  bool done_ = false;
  std::vector<std::size_t> radices_;
  std::vector<std::size_t> digits_;
};

inline std::vector<FiniteStructure> enumerate_structures(const Signature& sig, std::size_t max_size) {
  std::vector<FiniteStructure> out;
  StructureEnumerator gen(sig, max_size);
  while (auto s = gen.next()) out.push_back(std::move(*s));
  return out;
}

} // namespace fvkit

#endif
