#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "formlet/term.hpp"

namespace formlet {

// One wildcard of an `id` left-hand side.  Set restriction and paired
// replacement apply to head wildcards only.
struct WildcardSlot {
  enum class Kind { Symbol, Index, Head, ArgField };
  Kind kind = Kind::Symbol;
  std::string name;
  int restrict_set = -1;
  int replace_set = -1;
};

struct PatArg {
  enum class Kind { Concrete, SymbolWild, IndexWild, ArgField };
  Kind kind = Kind::Concrete;
  Arg concrete;
  int slot = -1;

  static PatArg of(Arg a) {
    PatArg p;
    p.concrete = std::move(a);
    return p;
  }
  static PatArg wild(Kind k, int slot) {
    PatArg p;
    p.kind = k;
    p.slot = slot;
    return p;
  }
};

// `head` is the concrete head, or the representative head naming the wildcard
// (its commuting class decides where the factor lives).  A bare head wildcard
// (written without parentheses) matches a factor with any argument list and
// captures the arguments; a bare concrete head matches argumentless factors.
struct PatFactor {
  int head = -1;
  int head_slot = -1;
  bool bare = false;
  std::vector<PatArg> args;

  bool has_argfield() const {
    for (const auto& a : args)
      if (a.kind == PatArg::Kind::ArgField) return true;
    return false;
  }
};

struct Pattern {
  std::vector<WildcardSlot> slots;
  std::map<int, int> sympow;  // must divide the term's symbol powers
  std::vector<PatFactor> cfactors;
  std::vector<PatFactor> nfactors;  // matches a contiguous run
};

struct HeadBinding {
  int matched = -1;
  int replacement_head = -1;  // from the paired set; -1 when unpaired
  std::vector<Arg> args;      // captured by a bare wildcard, spliced back by a
                              // bare mention on the right-hand side
};

using BoundValue = std::variant<Polynomial, IndexRef, HeadBinding, std::vector<Arg>>;

struct Binding {
  std::vector<std::optional<BoundValue>> values;  // parallel to Pattern::slots
  int sign = 1;  // parity collected from antisymmetric argument permutations
};

// Where one match landed: the noncommuting run [nbegin,nend), plus the
// commuting positions taken, listed in pattern-cfactor order.  One copy of the
// pattern's sympow is consumed per match.
struct MatchSpan {
  size_t nbegin = 0;
  size_t nend = 0;
  std::vector<size_t> cpositions;
  Binding binding;
};

enum class MatchMode { First, AllDisjoint };

// First mode stops at the leftmost match; AllDisjoint keeps scanning to the
// right of each noncommuting run and never reuses a commuting factor or an
// exhausted symbol power.  Empty result when nothing matches.
std::vector<MatchSpan> match_term(const Pattern& p, const Term& t,
                                  const Declarations& decls, MatchMode mode);

// Right-hand-side templates.  Polynomial slots use an extended variable space:
// ids below wild_base are declared symbols, id wild_base+s refers to symbol
// wildcard slot s.
struct TemplateArg {
  enum class Kind { Index, WildIndex, Poly, ArgField };
  Kind kind = Kind::Index;
  IndexRef index;
  int slot = -1;
  Polynomial poly;
};

struct TemplateFactor {
  int head = -1;
  int head_slot = -1;
  int expr = -1;  // >= 0: splice the referenced expression's current value
  std::vector<TemplateArg> args;
};

// One written product: rational coefficient, scalar polynomial atoms, and
// factors in source order.  Instantiation routes each factor to the commuting
// or noncommuting side by the head it resolves to, expands the scalar product
// into monomials, and distributes spliced expressions.
struct TemplateTerm {
  RationalCoefficient coeff = RationalCoefficient::integer(1);
  std::vector<Polynomial> scalars;
  std::vector<TemplateFactor> factors;
};

struct TemplateExpr {
  int wild_base = 0;
  std::vector<TemplateTerm> terms;
};

struct InstantiationContext {
  const Declarations* decls = nullptr;
  const Pattern* pattern = nullptr;  // slot table; may be null with binding null
  const Binding* binding = nullptr;
  std::function<const Expression*(int)> lookup_expr;
  const Term* host = nullptr;  // its internal ordinals are avoided when splicing
  int* counter = nullptr;      // advanced when fresh ordinals are drawn
};

// Instantiates the template, one output term per distributed piece.  Errors
// with UnboundWildcard when a referenced slot has no binding.
std::vector<Term> substitute(const TemplateExpr& rhs, const InstantiationContext& ctx);

// Rewrites every term of e: the leftmost match when once is set, otherwise all
// disjoint matches in one left-to-right pass (replacement output is not
// rescanned).  The result is normalized.
Expression apply_id(const Pattern& p, const TemplateExpr& rhs, const Expression& e,
                    bool once, const Declarations& decls, int& counter);

}  // namespace formlet
