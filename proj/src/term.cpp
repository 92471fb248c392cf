#include "formlet/term.hpp"

#include <algorithm>

#include "formlet/error.hpp"

namespace formlet {

int index_cmp(const IndexRef& a, const IndexRef& b) {
  if (a.cls != b.cls) return (int)a.cls < (int)b.cls ? -1 : 1;
  if (a.id != b.id) return a.id < b.id ? -1 : 1;
  return 0;
}

int arg_cmp(const Arg& a, const Arg& b) {
  bool ia = a.is_index(), ib = b.is_index();
  if (ia != ib) return ia ? -1 : 1;  // index slots before scalar arguments
  if (ia) return index_cmp(a.index(), b.index());
  return Polynomial::compare(a.poly(), b.poly());
}

int factor_cmp(const FactorApp& a, const FactorApp& b) {
  if (a.head != b.head) return a.head < b.head ? -1 : 1;
  size_t n = std::min(a.args.size(), b.args.size());
  for (size_t i = 0; i < n; ++i)
    if (int c = arg_cmp(a.args[i], b.args[i])) return c;
  if (a.args.size() != b.args.size())
    return a.args.size() > b.args.size() ? -1 : 1;  // longer list first
  return 0;
}

int factor_list_cmp(const std::vector<FactorApp>& a, const std::vector<FactorApp>& b) {
  size_t n = std::min(a.size(), b.size());
  for (size_t i = 0; i < n; ++i)
    if (int c = factor_cmp(a[i], b[i])) return c;
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  return 0;
}

static int sympow_cmp(const std::map<int, int>& a, const std::map<int, int>& b) {
  auto ia = a.begin(), ib = b.begin();
  for (; ia != a.end() && ib != b.end(); ++ia, ++ib) {
    if (ia->first != ib->first) return ia->first < ib->first ? -1 : 1;
    if (ia->second != ib->second) return ia->second < ib->second ? -1 : 1;
  }
  if (ia != a.end()) return 1;
  if (ib != b.end()) return -1;
  return 0;
}

int term_structure_cmp(const Term& a, const Term& b) {
  bool ea = a.nfactors.empty(), eb = b.nfactors.empty();
  if (ea != eb) return ea ? -1 : 1;
  if (int c = factor_list_cmp(a.nfactors, b.nfactors)) return c;
  if (int c = factor_list_cmp(a.cfactors, b.cfactors)) return c;
  return sympow_cmp(a.sympow, b.sympow);
}

bool same_structure(const Term& a, const Term& b) {
  return term_structure_cmp(a, b) == 0;
}

int sort_factor_args(FactorApp& f, Symmetry sym) {
  if (sym == Symmetry::None || f.args.size() < 2) return 1;
  // bubble sort: swap count gives the antisymmetric sign
  int sign = 1;
  size_t n = f.args.size();
  for (size_t i = 0; i + 1 < n; ++i)
    for (size_t j = 0; j + 1 < n - i; ++j) {
      int c = arg_cmp(f.args[j], f.args[j + 1]);
      if (c > 0) {
        std::swap(f.args[j], f.args[j + 1]);
        if (sym == Symmetry::Antisymmetric) sign = -sign;
      }
    }
  if (sym == Symmetry::Antisymmetric)
    for (size_t i = 0; i + 1 < n; ++i)
      if (arg_cmp(f.args[i], f.args[i + 1]) == 0) return 0;
  return sign;
}

int max_internal_ordinal(const Term& t) {
  int m = 0;
  for_each_index(t, [&](const IndexRef& ix) {
    if (ix.cls == IndexRef::Cls::Internal && ix.id > m) m = ix.id;
  });
  return m;
}

void sum_indices(Term& t, int which, int& counter) {
  auto hits = [&](const IndexRef& ix) {
    return ix.cls != IndexRef::Cls::Internal && ix.id == which;
  };
  int count = 0;
  for_each_index(t, [&](const IndexRef& ix) {
    if (hits(ix)) ++count;
  });
  if (count == 0) return;
  if (count != 2)
    throw Error(ErrorKind::IndexArityViolation,
                "summed index must appear exactly twice in a term");
  int fresh = std::max(counter, max_internal_ordinal(t)) + 1;
  counter = fresh;
  for_each_index(t, [&](IndexRef& ix) {
    if (hits(ix)) ix = IndexRef{IndexRef::Cls::Internal, fresh};
  });
}

}  // namespace formlet
