#pragma once

#include <compare>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "formlet/decls.hpp"
#include "formlet/polynomial.hpp"
#include "formlet/rational.hpp"

namespace formlet {

// An index slot.  Declared and Open refer to the declaration table; Internal
// ids are per-term ordinals (printed N1_?, N2_?, ...) produced by summation.
struct IndexRef {
  enum class Cls : int { Declared = 0, Open = 1, Internal = 2 };
  Cls cls = Cls::Declared;
  int id = 0;

  friend bool operator==(const IndexRef&, const IndexRef&) = default;
};

int index_cmp(const IndexRef& a, const IndexRef& b);

// A factor argument: an index slot or a polynomial scalar argument.
struct Arg {
  std::variant<IndexRef, Polynomial> v;

  Arg() : v(IndexRef{}) {}
  explicit Arg(IndexRef i) : v(i) {}
  explicit Arg(Polynomial p) : v(std::move(p)) {}

  bool is_index() const { return std::holds_alternative<IndexRef>(v); }
  const IndexRef& index() const { return std::get<IndexRef>(v); }
  IndexRef& index() { return std::get<IndexRef>(v); }
  const Polynomial& poly() const { return std::get<Polynomial>(v); }
};

int arg_cmp(const Arg& a, const Arg& b);

struct FactorApp {
  int head = -1;
  std::vector<Arg> args;
};

// Head id first, then args slotwise; a list precedes its proper prefix, so a
// missing slot compares high.
int factor_cmp(const FactorApp& a, const FactorApp& b);
int factor_list_cmp(const std::vector<FactorApp>& a, const std::vector<FactorApp>& b);

// One product term: coefficient * symbol powers * commuting factors (sorted
// multiset) * noncommuting factors (order significant).
struct Term {
  RationalCoefficient coeff = RationalCoefficient::integer(1);
  std::map<int, int> sympow;
  std::vector<FactorApp> cfactors;
  std::vector<FactorApp> nfactors;

  bool is_zero() const { return coeff.is_zero(); }
};

// Order used both for merging and for printing: terms with no noncommuting
// part first, then by noncommuting factors, commuting factors, symbol powers.
int term_structure_cmp(const Term& a, const Term& b);
bool same_structure(const Term& a, const Term& b);

struct Expression {
  std::vector<Term> terms;
};

// Sorts the args of one factor.  Returns +1/-1 with the antisymmetric swap
// sign, or 0 when an antisymmetric factor repeats an argument.
int sort_factor_args(FactorApp& f, Symmetry sym);

// Full per-term normal form: fold rational-function factors into the
// coefficient, contract deltas, sort symmetric args and commuting factors,
// and relabel internal indices canonically.
Term canonicalize_term(Term t, const Declarations& decls);

// Canonicalize every term, merge equal structures, drop zeros, sort.  When
// apply_expansion is set and an expansion order is declared, coefficients are
// replaced by their truncated series first.
Expression normalize_expression(Expression e, const Declarations& decls,
                                bool apply_expansion = false);

// Replaces the two occurrences of declared index `which` in t by a fresh
// internal index.  `counter` carries the last ordinal used within the current
// statement pass; it is advanced so parallel sums in one term stay distinct.
// One occurrence is an error; zero occurrences leave t untouched.
void sum_indices(Term& t, int which, int& counter);

// Largest internal ordinal appearing in t, 0 when none.
int max_internal_ordinal(const Term& t);

// Calls fn(IndexRef&) for every index slot of every factor, nfactors first.
template <class F>
void for_each_index(Term& t, F&& fn) {
  for (auto* vec : {&t.nfactors, &t.cfactors})
    for (auto& f : *vec)
      for (auto& a : f.args)
        if (a.is_index()) fn(a.index());
}
template <class F>
void for_each_index(const Term& t, F&& fn) {
  for (auto* vec : {&t.nfactors, &t.cfactors})
    for (auto& f : *vec)
      for (auto& a : f.args)
        if (a.is_index()) fn(a.index());
}

}  // namespace formlet
