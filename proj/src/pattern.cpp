#include "formlet/pattern.hpp"

#include <algorithm>
#include <numeric>

#include "formlet/error.hpp"

namespace formlet {
namespace {

bool args_equal(const std::vector<Arg>& x, const std::vector<Arg>& y) {
  if (x.size() != y.size()) return false;
  for (size_t i = 0; i < x.size(); ++i)
    if (arg_cmp(x[i], y[i]) != 0) return false;
  return true;
}

bool bound_equal(const BoundValue& a, const BoundValue& b) {
  if (a.index() != b.index()) return false;
  switch (a.index()) {
    case 0:
      return std::get<Polynomial>(a) == std::get<Polynomial>(b);
    case 1:
      return std::get<IndexRef>(a) == std::get<IndexRef>(b);
    case 2: {
      const auto& x = std::get<HeadBinding>(a);
      const auto& y = std::get<HeadBinding>(b);
      return x.matched == y.matched && x.replacement_head == y.replacement_head &&
             args_equal(x.args, y.args);
    }
    default:
      return args_equal(std::get<std::vector<Arg>>(a), std::get<std::vector<Arg>>(b));
  }
}

int permutation_parity(const std::vector<size_t>& perm) {
  int inv = 0;
  for (size_t i = 0; i < perm.size(); ++i)
    for (size_t j = i + 1; j < perm.size(); ++j)
      if (perm[i] > perm[j]) ++inv;
  return inv % 2 == 0 ? 1 : -1;
}

using Cont = std::function<bool()>;

struct Matcher {
  const Pattern& p;
  const Term& t;
  const Declarations& d;
  const std::vector<char>& cused;

  Binding b;
  std::vector<size_t> cpos;  // chosen position per pattern cfactor, so far
  std::vector<int> trail;

  Matcher(const Pattern& p_, const Term& t_, const Declarations& d_,
          const std::vector<char>& cused_)
      : p(p_), t(t_), d(d_), cused(cused_) {
    b.values.resize(p.slots.size());
  }

  void reset() {
    b.values.assign(p.slots.size(), std::nullopt);
    b.sign = 1;
    trail.clear();
    cpos.clear();
  }

  size_t mark() const { return trail.size(); }
  void rewind(size_t m) {
    while (trail.size() > m) {
      b.values[(size_t)trail.back()].reset();
      trail.pop_back();
    }
  }

  bool bind(int slot, BoundValue v) {
    auto& cell = b.values[(size_t)slot];
    if (cell) return bound_equal(*cell, v);
    cell = std::move(v);
    trail.push_back(slot);
    return true;
  }

  bool match_single(const PatArg& a, const Arg& c) {
    switch (a.kind) {
      case PatArg::Kind::Concrete:
        return arg_cmp(a.concrete, c) == 0;
      case PatArg::Kind::SymbolWild:
        return !c.is_index() && bind(a.slot, c.poly());
      case PatArg::Kind::IndexWild:
        return c.is_index() && bind(a.slot, c.index());
      default:
        return false;  // argfields are handled by the sequence walk
    }
  }

  // Aligns pattern arguments with candidate arguments; argfields absorb zero
  // or more, shortest first.
  bool match_args(const std::vector<PatArg>& pa, const std::vector<Arg>& ca, size_t pi,
                  size_t ci, const Cont& k) {
    if (pi == pa.size()) return ci == ca.size() && k();
    const PatArg& a = pa[pi];
    if (a.kind == PatArg::Kind::ArgField) {
      for (size_t len = 0; ci + len <= ca.size(); ++len) {
        size_t m = mark();
        std::vector<Arg> piece(ca.begin() + (long)ci, ca.begin() + (long)(ci + len));
        if (bind(a.slot, std::move(piece)) && match_args(pa, ca, pi + 1, ci + len, k))
          return true;
        rewind(m);
      }
      return false;
    }
    if (ci >= ca.size()) return false;
    size_t m = mark();
    if (match_single(a, ca[ci]) && match_args(pa, ca, pi + 1, ci + 1, k)) return true;
    rewind(m);
    return false;
  }

  // Checks the head and, for a restricted wildcard, finds the paired
  // replacement.  Unrestricted head wildcards accept any head of the same
  // commuting class as the representative.
  bool head_ok(const PatFactor& pf, int cand, int& replacement) {
    replacement = -1;
    if (pf.head_slot < 0) return pf.head == cand;
    const WildcardSlot& s = p.slots[(size_t)pf.head_slot];
    if (s.restrict_set < 0)
      return d.head(cand).commuting() == d.head(pf.head).commuting();
    const auto& members = d.set(s.restrict_set).members;
    auto it = std::find(members.begin(), members.end(), cand);
    if (it == members.end()) return false;
    if (s.replace_set >= 0) {
      const auto& repl = d.set(s.replace_set).members;
      size_t at = (size_t)(it - members.begin());
      if (at >= repl.size())
        throw Error(ErrorKind::BadPattern, "paired sets differ in length");
      replacement = repl[at];
    }
    return true;
  }

  bool match_factor(const PatFactor& pf, const FactorApp& cf, const Cont& k) {
    int replacement = -1;
    if (!head_ok(pf, cf.head, replacement)) return false;
    size_t m0 = mark();
    if (pf.head_slot >= 0) {
      HeadBinding hb{cf.head, replacement, {}};
      if (pf.bare) hb.args = cf.args;
      if (!bind(pf.head_slot, std::move(hb))) {
        rewind(m0);
        return false;
      }
    }
    if (pf.bare) {
      // a bare wildcard swallows the whole factor; a bare concrete head only
      // stands for its argumentless form
      if ((pf.head_slot >= 0 || cf.args.empty()) && k()) return true;
      rewind(m0);
      return false;
    }
    Symmetry sym = d.head(cf.head).sym;
    if (sym == Symmetry::None || cf.args.size() < 2) {
      if (match_args(pf.args, cf.args, 0, 0, k)) return true;
      rewind(m0);
      return false;
    }
    // symmetric candidate: argument fields are not supported here, other
    // patterns match modulo permutation (antisymmetric heads contribute the
    // permutation parity to the binding's sign)
    if (pf.has_argfield() || pf.args.size() != cf.args.size()) {
      rewind(m0);
      return false;
    }
    std::vector<size_t> perm(cf.args.size());
    std::iota(perm.begin(), perm.end(), (size_t)0);
    do {
      std::vector<Arg> arranged;
      arranged.reserve(perm.size());
      for (size_t i : perm) arranged.push_back(cf.args[i]);
      size_t m = mark();
      int oldsign = b.sign;
      if (sym == Symmetry::Antisymmetric) b.sign *= permutation_parity(perm);
      if (match_args(pf.args, arranged, 0, 0, k)) return true;
      b.sign = oldsign;
      rewind(m);
    } while (std::next_permutation(perm.begin(), perm.end()));
    rewind(m0);
    return false;
  }

  bool match_nc(size_t i, size_t base, const Cont& k) {
    if (i == p.nfactors.size()) return k();
    return match_factor(p.nfactors[i], t.nfactors[base + i],
                        [&] { return match_nc(i + 1, base, k); });
  }

  bool match_cf(size_t j, const Cont& k) {
    if (j == p.cfactors.size()) return k();
    for (size_t pos = 0; pos < t.cfactors.size(); ++pos) {
      if (cused[pos]) continue;
      if (std::find(cpos.begin(), cpos.end(), pos) != cpos.end()) continue;
      cpos.push_back(pos);
      if (match_factor(p.cfactors[j], t.cfactors[pos], [&] { return match_cf(j + 1, k); }))
        return true;
      cpos.pop_back();
    }
    return false;
  }
};

bool sympow_fits(const std::map<int, int>& need, const std::map<int, int>& have) {
  for (const auto& [s, e] : need) {
    auto it = have.find(s);
    if (it == have.end() || it->second < e) return false;
  }
  return true;
}

std::optional<MatchSpan> find_one(const Pattern& p, const Term& t, const Declarations& d,
                                  const std::vector<char>& cused,
                                  const std::map<int, int>& budget, size_t nstart) {
  if (!sympow_fits(p.sympow, budget)) return std::nullopt;
  Matcher m(p, t, d, cused);
  if (!p.nfactors.empty()) {
    if (t.nfactors.size() < p.nfactors.size()) return std::nullopt;
    for (size_t anchor = nstart; anchor + p.nfactors.size() <= t.nfactors.size(); ++anchor) {
      m.reset();
      if (m.match_nc(0, anchor, [&] { return m.match_cf(0, [] { return true; }); }))
        return MatchSpan{anchor, anchor + p.nfactors.size(), m.cpos, m.b};
    }
    return std::nullopt;
  }
  m.reset();
  if (m.match_cf(0, [] { return true; })) return MatchSpan{0, 0, m.cpos, m.b};
  return std::nullopt;
}

}  // namespace

std::vector<MatchSpan> match_term(const Pattern& p, const Term& t,
                                  const Declarations& decls, MatchMode mode) {
  std::vector<MatchSpan> out;
  std::vector<char> cused(t.cfactors.size(), 0);
  std::map<int, int> budget = t.sympow;
  size_t nstart = 0;
  while (true) {
    auto span = find_one(p, t, decls, cused, budget, nstart);
    if (!span) break;
    for (size_t pos : span->cpositions) cused[pos] = 1;
    for (const auto& [s, e] : p.sympow) budget[s] -= e;
    nstart = span->nend;
    bool consumed = !span->cpositions.empty() || span->nend > span->nbegin ||
                    !p.sympow.empty();
    out.push_back(std::move(*span));
    if (mode == MatchMode::First || !consumed) break;
  }
  return out;
}

namespace {

const BoundValue& require_bound(const InstantiationContext& ctx, int slot) {
  if (!ctx.binding || slot < 0 || (size_t)slot >= ctx.binding->values.size() ||
      !ctx.binding->values[(size_t)slot])
    throw Error(ErrorKind::UnboundWildcard,
                ctx.pattern && slot >= 0 && (size_t)slot < ctx.pattern->slots.size()
                    ? "no binding for wildcard " + ctx.pattern->slots[(size_t)slot].name
                    : "no binding for wildcard");
  return *ctx.binding->values[(size_t)slot];
}

Polynomial subst_wilds(const Polynomial& tpl, int wild_base,
                       const InstantiationContext& ctx) {
  Polynomial out = tpl;
  for (int v = out.max_symbol(); v >= wild_base; --v) {
    if (!out.uses_symbol(v)) continue;
    const BoundValue& val = require_bound(ctx, v - wild_base);
    const Polynomial* poly = std::get_if<Polynomial>(&val);
    if (!poly)
      throw Error(ErrorKind::UnboundWildcard,
                  "wildcard used as a symbol is not bound to a polynomial");
    out = out.substitute(v, *poly);
  }
  return out;
}

// Relabels the internals of `piece` above every ordinal visible in `into`,
// the host term, and the counter, then advances the counter.
void freshen_internals(Term& piece, const Term& into, const InstantiationContext& ctx) {
  std::vector<int> ords;
  for_each_index(piece, [&](const IndexRef& ix) {
    if (ix.cls == IndexRef::Cls::Internal) ords.push_back(ix.id);
  });
  if (ords.empty()) return;
  std::sort(ords.begin(), ords.end());
  ords.erase(std::unique(ords.begin(), ords.end()), ords.end());
  int base = max_internal_ordinal(into);
  if (ctx.host) base = std::max(base, max_internal_ordinal(*ctx.host));
  if (ctx.counter) base = std::max(base, *ctx.counter);
  std::map<int, int> relab;
  for (size_t i = 0; i < ords.size(); ++i) relab[ords[i]] = base + 1 + (int)i;
  if (ctx.counter) *ctx.counter = base + (int)ords.size();
  for_each_index(piece, [&](IndexRef& ix) {
    if (ix.cls == IndexRef::Cls::Internal) ix.id = relab.at(ix.id);
  });
}

}  // namespace

std::vector<Term> substitute(const TemplateExpr& rhs, const InstantiationContext& ctx) {
  const Declarations& d = *ctx.decls;
  std::vector<Term> out;
  for (const TemplateTerm& tt : rhs.terms) {
    Polynomial scalars = Polynomial::constant(1);
    for (const Polynomial& s : tt.scalars)
      scalars = scalars * subst_wilds(s, rhs.wild_base, ctx);
    if (scalars.is_zero()) continue;

    std::vector<Term> pieces(1);
    pieces[0].coeff = tt.coeff;
    if (ctx.binding && ctx.binding->sign < 0)
      pieces[0].coeff = rat_neg(pieces[0].coeff);

    for (const TemplateFactor& tf : tt.factors) {
      if (tf.expr >= 0) {
        const Expression* val = ctx.lookup_expr ? ctx.lookup_expr(tf.expr) : nullptr;
        if (!val)
          throw Error(ErrorKind::Internal, "expression reference not available here");
        std::vector<Term> next;
        next.reserve(pieces.size() * val->terms.size());
        for (const Term& pc : pieces)
          for (const Term& src : val->terms) {
            Term q = pc;
            Term spliced = src;
            freshen_internals(spliced, q, ctx);
            q.coeff = rat_mul(q.coeff, spliced.coeff);
            for (const auto& [s, e] : spliced.sympow) q.sympow[s] += e;
            q.cfactors.insert(q.cfactors.end(), spliced.cfactors.begin(),
                              spliced.cfactors.end());
            q.nfactors.insert(q.nfactors.end(), spliced.nfactors.begin(),
                              spliced.nfactors.end());
            next.push_back(std::move(q));
          }
        pieces = std::move(next);
        continue;
      }
      int h = tf.head;
      const std::vector<Arg>* captured = nullptr;
      if (tf.head_slot >= 0) {
        const BoundValue& val = require_bound(ctx, tf.head_slot);
        const HeadBinding* hb = std::get_if<HeadBinding>(&val);
        if (!hb)
          throw Error(ErrorKind::UnboundWildcard,
                      "wildcard used as a head is not bound to a head");
        h = hb->replacement_head >= 0 ? hb->replacement_head : hb->matched;
        if (tf.args.empty()) captured = &hb->args;
      }
      FactorApp fa;
      fa.head = h;
      if (captured) fa.args = *captured;
      for (const TemplateArg& ta : tf.args) {
        switch (ta.kind) {
          case TemplateArg::Kind::Index:
            fa.args.push_back(Arg(ta.index));
            break;
          case TemplateArg::Kind::WildIndex: {
            const BoundValue& val = require_bound(ctx, ta.slot);
            const IndexRef* ix = std::get_if<IndexRef>(&val);
            if (!ix)
              throw Error(ErrorKind::UnboundWildcard,
                          "wildcard used as an index is not bound to an index");
            fa.args.push_back(Arg(*ix));
            break;
          }
          case TemplateArg::Kind::Poly:
            fa.args.push_back(Arg(subst_wilds(ta.poly, rhs.wild_base, ctx)));
            break;
          case TemplateArg::Kind::ArgField: {
            const BoundValue& val = require_bound(ctx, ta.slot);
            const std::vector<Arg>* lst = std::get_if<std::vector<Arg>>(&val);
            if (!lst)
              throw Error(ErrorKind::UnboundWildcard,
                          "wildcard used as an argument field is not bound to one");
            fa.args.insert(fa.args.end(), lst->begin(), lst->end());
            break;
          }
        }
      }
      bool commuting = d.head(h).commuting();
      for (Term& pc : pieces)
        (commuting ? pc.cfactors : pc.nfactors).push_back(fa);
    }

    for (const Term& pc : pieces)
      for (const auto& [mono, c] : scalars.terms()) {
        Term t = pc;
        t.coeff = rat_mul(t.coeff, RationalCoefficient::integer(c));
        for (size_t v = 0; v < mono.size(); ++v)
          if (mono[v] != 0) t.sympow[(int)v] += mono[v];
        out.push_back(std::move(t));
      }
  }
  return out;
}

Expression apply_id(const Pattern& p, const TemplateExpr& rhs, const Expression& e,
                    bool once, const Declarations& decls, int& counter) {
  Expression out;
  for (const Term& t : e.terms) {
    auto spans = match_term(p, t, decls, once ? MatchMode::First : MatchMode::AllDisjoint);
    if (spans.empty()) {
      out.terms.push_back(t);
      continue;
    }

    std::vector<char> used(t.cfactors.size(), 0);
    for (const auto& sp : spans)
      for (size_t pos : sp.cpositions) used[pos] = 1;

    std::map<int, int> residual_sympow = t.sympow;
    for (size_t i = 0; i < spans.size(); ++i)
      for (const auto& [s, ex] : p.sympow) residual_sympow[s] -= ex;
    for (auto it = residual_sympow.begin(); it != residual_sympow.end();)
      it = it->second == 0 ? residual_sympow.erase(it) : std::next(it);

    std::vector<std::vector<Term>> choice(spans.size());
    bool deleted = false;
    for (size_t i = 0; i < spans.size(); ++i) {
      InstantiationContext ctx;
      ctx.decls = &decls;
      ctx.pattern = &p;
      ctx.binding = &spans[i].binding;
      ctx.host = &t;
      ctx.counter = &counter;
      choice[i] = substitute(rhs, ctx);
      if (choice[i].empty()) deleted = true;  // replacement by zero
    }
    if (deleted) continue;

    std::vector<size_t> pick(spans.size(), 0);
    while (true) {
      Term r;
      r.coeff = t.coeff;
      r.sympow = residual_sympow;
      for (size_t pos = 0; pos < t.cfactors.size(); ++pos)
        if (!used[pos]) r.cfactors.push_back(t.cfactors[pos]);

      if (!p.nfactors.empty()) {
        size_t cur = 0;
        for (size_t i = 0; i < spans.size(); ++i) {
          for (size_t q = cur; q < spans[i].nbegin; ++q)
            r.nfactors.push_back(t.nfactors[q]);
          const Term& piece = choice[i][pick[i]];
          r.nfactors.insert(r.nfactors.end(), piece.nfactors.begin(),
                            piece.nfactors.end());
          cur = spans[i].nend;
        }
        for (size_t q = cur; q < t.nfactors.size(); ++q)
          r.nfactors.push_back(t.nfactors[q]);
      } else {
        r.nfactors = t.nfactors;
        for (size_t i = 0; i < spans.size(); ++i) {
          const Term& piece = choice[i][pick[i]];
          r.nfactors.insert(r.nfactors.end(), piece.nfactors.begin(),
                            piece.nfactors.end());
        }
      }

      for (size_t i = 0; i < spans.size(); ++i) {
        const Term& piece = choice[i][pick[i]];
        r.coeff = rat_mul(r.coeff, piece.coeff);
        for (const auto& [s, ex] : piece.sympow) r.sympow[s] += ex;
        r.cfactors.insert(r.cfactors.end(), piece.cfactors.begin(),
                          piece.cfactors.end());
      }
      out.terms.push_back(std::move(r));

      size_t i = pick.size();
      while (i > 0) {
        --i;
        if (++pick[i] < choice[i].size()) break;
        pick[i] = 0;
        if (i == 0) {
          i = pick.size() + 1;
          break;
        }
      }
      if (i > pick.size()) break;
    }
  }
  return normalize_expression(std::move(out), decls);
}

}  // namespace formlet
