#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "formlet/error.hpp"
#include "formlet/term.hpp"

namespace formlet {
namespace {

Term zero_term() {
  Term z;
  z.coeff = RationalCoefficient::integer(0);
  return z;
}

void fold_ratfun(Term& t, const Declarations& d) {
  int rf = d.ratfun_head();
  if (rf < 0) return;
  std::vector<FactorApp> keep;
  keep.reserve(t.cfactors.size());
  for (auto& f : t.cfactors) {
    if (f.head != rf) {
      keep.push_back(std::move(f));
      continue;
    }
    if (f.args.empty() || f.args.size() > 2)
      throw Error(ErrorKind::BadDeclaration,
                  "rational-function factor takes one or two arguments");
    for (const auto& a : f.args)
      if (a.is_index())
        throw Error(ErrorKind::BadDeclaration,
                    "rational-function factor takes polynomial arguments");
    Polynomial num = f.args[0].poly();
    Polynomial den = f.args.size() == 2 ? f.args[1].poly() : Polynomial::constant(1);
    t.coeff = rat_mul(t.coeff, RationalCoefficient::of(std::move(num), std::move(den)));
  }
  t.cfactors = std::move(keep);
}

struct IndexKey {
  int cls;
  int id;
  bool operator<(const IndexKey& o) const {
    return cls != o.cls ? cls < o.cls : id < o.id;
  }
};

void validate_indices(const Term& t, const Declarations& d) {
  std::map<IndexKey, int> counts;
  for_each_index(t, [&](const IndexRef& ix) {
    ++counts[IndexKey{(int)ix.cls, ix.id}];
  });
  for (const auto& [k, c] : counts) {
    if (c <= 2) continue;
    std::string name = k.cls == (int)IndexRef::Cls::Internal
                           ? "N" + std::to_string(k.id) + "_?"
                           : d.index(k.id).name;
    throw Error(ErrorKind::IndexArityViolation,
                "index appears more than twice in a term: " + name);
  }
}

template <class F>
void each_index_skipping(Term& t, const FactorApp* skip, F&& fn) {
  for (auto* vec : {&t.nfactors, &t.cfactors})
    for (auto& f : *vec) {
      if (&f == skip) continue;
      for (auto& a : f.args)
        if (a.is_index()) fn(a.index());
    }
}

void apply_dimension(Term& t, const Declarations& d) {
  if (!d.has_dimension())
    throw Error(ErrorKind::InvalidDelta, "contracted d_ needs a declared dimension");
  if (d.dimension_is_symbol())
    t.sympow[d.dimension_symbol()] += 1;
  else
    t.coeff = rat_mul(t.coeff, RationalCoefficient::integer(d.dimension_value()));
}

void contract_deltas(Term& t, const Declarations& d) {
  bool progress = true;
  while (progress) {
    progress = false;
    for (size_t fi = 0; fi < t.cfactors.size(); ++fi) {
      FactorApp& f = t.cfactors[fi];
      if (!d.head(f.head).is_delta) continue;
      if (f.args.size() != 2 || !f.args[0].is_index() || !f.args[1].is_index())
        throw Error(ErrorKind::InvalidDelta, "d_ takes exactly two index arguments");
      IndexRef i = f.args[0].index(), j = f.args[1].index();
      if (i == j) {
        apply_dimension(t, d);
        t.cfactors.erase(t.cfactors.begin() + (long)fi);
        progress = true;
        break;
      }
      int ci = 0, cj = 0;
      each_index_skipping(t, &f, [&](const IndexRef& ix) {
        if (ix == i) ++ci;
        if (ix == j) ++cj;
      });
      if (ci == 0 && cj == 0) continue;  // both free: the delta survives
      // keep the index that prints best: open over declared over internal
      auto keep_rank = [](const IndexRef& ix) {
        switch (ix.cls) {
          case IndexRef::Cls::Open: return 2;
          case IndexRef::Cls::Declared: return 1;
          default: return 0;
        }
      };
      IndexRef survivor, victim;
      if (ci == 0) {
        survivor = i;
        victim = j;
      } else if (cj == 0) {
        survivor = j;
        victim = i;
      } else if (keep_rank(i) != keep_rank(j)) {
        survivor = keep_rank(i) > keep_rank(j) ? i : j;
        victim = keep_rank(i) > keep_rank(j) ? j : i;
      } else {
        survivor = index_cmp(i, j) < 0 ? i : j;
        victim = index_cmp(i, j) < 0 ? j : i;
      }
      each_index_skipping(t, &f, [&](IndexRef& ix) {
        if (ix == victim) ix = survivor;
      });
      t.cfactors.erase(t.cfactors.begin() + (long)fi);
      progress = true;
      break;
    }
  }
}

// Returns the accumulated antisymmetric sign, or 0 when some antisymmetric
// factor has a repeated argument.
int sort_all_sym_args(Term& t, const Declarations& d) {
  int sign = 1;
  for (auto* vec : {&t.nfactors, &t.cfactors})
    for (auto& f : *vec) {
      int s = sort_factor_args(f, d.head(f.head).sym);
      if (s == 0) return 0;
      sign *= s;
    }
  return sign;
}

void sort_cfactors(Term& t) {
  std::stable_sort(t.cfactors.begin(), t.cfactors.end(),
                   [](const FactorApp& a, const FactorApp& b) { return factor_cmp(a, b) < 0; });
}

std::vector<int> internal_ordinals(const Term& t) {
  std::set<int> s;
  for_each_index(t, [&](const IndexRef& ix) {
    if (ix.cls == IndexRef::Cls::Internal) s.insert(ix.id);
  });
  return std::vector<int>(s.begin(), s.end());
}

using Desc = std::vector<long long>;

// Label-independent signature of a factor's argument list.  Internal ids are
// anonymized so the signature is invariant under internal relabeling.
Desc arg_signature(const FactorApp& f, const Declarations& d,
                   const std::vector<Polynomial>& polys) {
  std::vector<std::pair<long long, long long>> enc;
  enc.reserve(f.args.size());
  for (const auto& a : f.args) {
    if (a.is_index()) {
      const IndexRef& ix = a.index();
      if (ix.cls == IndexRef::Cls::Internal)
        enc.emplace_back(2, 0);
      else
        enc.emplace_back((long long)ix.cls, ix.id);
    } else {
      auto it = std::lower_bound(polys.begin(), polys.end(), a.poly(),
                                 [](const Polynomial& x, const Polynomial& y) {
                                   return Polynomial::compare(x, y) < 0;
                                 });
      enc.emplace_back(3, it - polys.begin());
    }
  }
  if (d.head(f.head).sym != Symmetry::None) std::sort(enc.begin(), enc.end());
  Desc out;
  for (auto& [a, b] : enc) {
    out.push_back(a);
    out.push_back(b);
  }
  return out;
}

std::map<int, Desc> fingerprint_internals(const Term& t, const Declarations& d) {
  std::vector<Polynomial> polys;
  for (auto* vec : {&t.nfactors, &t.cfactors})
    for (auto& f : *vec)
      for (auto& a : f.args)
        if (!a.is_index()) polys.push_back(a.poly());
  std::sort(polys.begin(), polys.end(), [](const Polynomial& x, const Polynomial& y) {
    return Polynomial::compare(x, y) < 0;
  });
  polys.erase(std::unique(polys.begin(), polys.end()), polys.end());

  std::map<int, std::vector<Desc>> occ;
  auto visit = [&](bool in_nf, size_t pos, const FactorApp& f) {
    bool symm = d.head(f.head).sym != Symmetry::None;
    Desc sig = arg_signature(f, d, polys);
    for (size_t slot = 0; slot < f.args.size(); ++slot) {
      if (!f.args[slot].is_index()) continue;
      const IndexRef& ix = f.args[slot].index();
      if (ix.cls != IndexRef::Cls::Internal) continue;
      Desc dd;
      dd.push_back(in_nf ? 0 : 1);
      dd.push_back(in_nf ? (long long)pos : -1);
      dd.push_back(f.head);
      dd.push_back(symm ? -1 : (long long)slot);
      dd.push_back((long long)f.args.size());
      dd.insert(dd.end(), sig.begin(), sig.end());
      occ[ix.id].push_back(std::move(dd));
    }
  };
  for (size_t p = 0; p < t.nfactors.size(); ++p) visit(true, p, t.nfactors[p]);
  for (size_t p = 0; p < t.cfactors.size(); ++p) visit(false, p, t.cfactors[p]);

  std::map<int, Desc> out;
  for (auto& [id, descs] : occ) {
    std::sort(descs.begin(), descs.end());
    Desc flat;
    for (auto& dd : descs) {
      flat.push_back((long long)dd.size());
      flat.insert(flat.end(), dd.begin(), dd.end());
    }
    out[id] = std::move(flat);
  }
  return out;
}

struct Candidate {
  Term term;
  int sign = 1;
};

Candidate relabel_and_resort(const Term& t, const Declarations& d,
                             const std::map<int, int>& newlab) {
  Candidate c{t, 1};
  for_each_index(c.term, [&](IndexRef& ix) {
    if (ix.cls == IndexRef::Cls::Internal) ix.id = newlab.at(ix.id);
  });
  c.sign = sort_all_sym_args(c.term, d);
  if (c.sign == 0)
    throw Error(ErrorKind::Internal, "relabeling produced a repeated antisymmetric argument");
  sort_cfactors(c.term);
  return c;
}

// Canonical internal labels: group internals by label-independent fingerprint,
// hand each group a block of fresh ordinals in fingerprint order, and keep the
// smallest resorted term over all in-group permutations.  Two permutations
// reaching the same structure with opposite antisymmetric sign kill the term.
// Returns false when the term vanished.
bool relabel_internals(Term& t, const Declarations& d) {
  std::vector<int> ords = internal_ordinals(t);
  if (ords.empty()) return true;

  auto fps = fingerprint_internals(t, d);
  std::vector<std::vector<int>> classes;  // old ordinals grouped, fingerprint order
  {
    std::map<Desc, std::vector<int>> by_fp;
    for (int o : ords) by_fp[fps.at(o)].push_back(o);
    for (auto& [fp, mem] : by_fp) classes.push_back(mem);
  }

  long long total = 1;
  for (auto& c : classes) {
    for (size_t i = 2; i <= c.size(); ++i) total *= (long long)i;
    if (total > 40320)
      throw Error(ErrorKind::Internal, "too many interchangeable summed indices");
  }

  // blocks[i] holds the fresh ordinals assigned to classes[i]
  std::vector<std::vector<int>> blocks(classes.size());
  {
    int next = 1;
    for (size_t i = 0; i < classes.size(); ++i)
      for (size_t j = 0; j < classes[i].size(); ++j) blocks[i].push_back(next++);
  }

  bool have_best = false;
  Candidate best;
  while (true) {
    std::map<int, int> newlab;
    for (size_t i = 0; i < classes.size(); ++i)
      for (size_t j = 0; j < classes[i].size(); ++j) newlab[classes[i][j]] = blocks[i][j];
    Candidate c = relabel_and_resort(t, d, newlab);
    if (!have_best) {
      best = std::move(c);
      have_best = true;
    } else {
      int cmp = term_structure_cmp(c.term, best.term);
      if (cmp == 0 && c.sign != best.sign) return false;
      if (cmp < 0) best = std::move(c);
    }
    // odometer over per-class permutations
    size_t i = classes.size();
    while (i > 0) {
      --i;
      if (std::next_permutation(blocks[i].begin(), blocks[i].end())) break;
      if (i == 0) {
        i = classes.size() + 1;  // wrapped everywhere: done
        break;
      }
    }
    if (i > classes.size() || classes.empty()) break;
  }

  if (best.sign < 0) best.term.coeff = rat_neg(best.term.coeff);
  t = std::move(best.term);
  return true;
}

// Renames internals into first-appearance scan order and iterates to a
// fixpoint, so labels read left to right in the printed term.  Resorting can
// cycle; after the guard the pre-pass term is restored, which is already
// canonical.
void scan_order_pass(Term& t, const Declarations& d) {
  std::vector<int> ords = internal_ordinals(t);
  int k = (int)ords.size();
  if (k == 0) return;

  Term saved = t;
  Term cur = t;
  int cursign = 1;
  bool converged = false;
  for (int it = 0; it < k + 2; ++it) {
    std::map<int, int> order;
    int next = 1;
    for_each_index(cur, [&](const IndexRef& ix) {
      if (ix.cls == IndexRef::Cls::Internal && !order.count(ix.id)) order[ix.id] = next++;
    });
    bool identity = true;
    for (auto& [o, n] : order)
      if (o != n) identity = false;
    if (identity) {
      converged = true;
      break;
    }
    for_each_index(cur, [&](IndexRef& ix) {
      if (ix.cls == IndexRef::Cls::Internal) ix.id = order.at(ix.id);
    });
    int s = sort_all_sym_args(cur, d);
    if (s == 0) throw Error(ErrorKind::Internal, "scan relabeling repeated an argument");
    cursign *= s;
    sort_cfactors(cur);
  }
  if (converged) {
    if (cursign < 0) cur.coeff = rat_neg(cur.coeff);
    t = std::move(cur);
  } else {
    t = std::move(saved);
  }
}

}  // namespace

Term canonicalize_term(Term t, const Declarations& decls) {
  for (auto it = t.sympow.begin(); it != t.sympow.end();)
    it = it->second == 0 ? t.sympow.erase(it) : std::next(it);

  fold_ratfun(t, decls);
  if (t.coeff.is_zero()) return zero_term();

  validate_indices(t, decls);
  contract_deltas(t, decls);

  int sign = sort_all_sym_args(t, decls);
  if (sign == 0) return zero_term();
  if (sign < 0) t.coeff = rat_neg(t.coeff);
  sort_cfactors(t);

  if (!relabel_internals(t, decls)) return zero_term();
  scan_order_pass(t, decls);
  return t;
}

Expression normalize_expression(Expression e, const Declarations& decls,
                                bool apply_expansion) {
  std::vector<Term> canon;
  canon.reserve(e.terms.size());
  for (auto& t : e.terms) {
    Term c = canonicalize_term(std::move(t), decls);
    if (!c.is_zero()) canon.push_back(std::move(c));
  }
  std::sort(canon.begin(), canon.end(),
            [](const Term& a, const Term& b) { return term_structure_cmp(a, b) < 0; });

  Expression out;
  for (auto& t : canon) {
    if (!out.terms.empty() && same_structure(out.terms.back(), t))
      out.terms.back().coeff = rat_add(out.terms.back().coeff, t.coeff);
    else
      out.terms.push_back(std::move(t));
  }
  std::erase_if(out.terms, [](const Term& t) { return t.coeff.is_zero(); });

  if (apply_expansion && decls.expansion()) {
    for (auto& t : out.terms) t.coeff = rat_expand_series(t.coeff, *decls.expansion());
    std::erase_if(out.terms, [](const Term& t) { return t.coeff.is_zero(); });
  }
  return out;
}

}  // namespace formlet
