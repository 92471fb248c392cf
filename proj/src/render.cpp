#include "formlet/render.hpp"

#include <algorithm>
#include <utility>

#include "formlet/error.hpp"

namespace formlet {

namespace {

SymbolNamer namer(const Declarations& decls) {
  return [&decls](int id) { return decls.symbol_name(id); };
}

std::string index_text(const IndexRef& ix, const Declarations& decls) {
  if (ix.cls == IndexRef::Cls::Internal)
    return "N" + std::to_string(ix.id) + "_?";
  return decls.index(ix.id).name;
}

std::string arg_text(const Arg& a, const Declarations& decls) {
  if (a.is_index()) return index_text(a.index(), decls);
  return a.poly().to_string(namer(decls));
}

std::string factor_text(const FactorApp& f, const Declarations& decls) {
  std::string s = decls.head(f.head).name;
  if (!f.args.empty()) {
    s += '(';
    for (size_t i = 0; i < f.args.size(); ++i) {
      if (i) s += ',';
      s += arg_text(f.args[i], decls);
    }
    s += ')';
  }
  return s;
}

// Same monomial conventions as Polynomial::to_string, ordered by ascending
// power of `var` instead of the canonical descending order.
std::string series_text(const Polynomial& p, int var, const SymbolNamer& names) {
  if (p.is_zero()) return "0";
  std::vector<std::pair<Monomial, Int>> monos(p.terms().begin(), p.terms().end());
  std::stable_sort(monos.begin(), monos.end(), [var](const auto& a, const auto& b) {
    int ea = var < (int)a.first.size() ? a.first[var] : 0;
    int eb = var < (int)b.first.size() ? b.first[var] : 0;
    return ea < eb;
  });
  std::string out;
  bool first = true;
  bool single = monos.size() == 1;
  for (const auto& [m, c] : monos) {
    bool neg = c < 0;
    Int mag = neg ? Int(-c) : c;
    if (first)
      out += neg ? (single ? "-" : " - ") : "";
    else
      out += neg ? " - " : " + ";
    first = false;
    std::string body;
    for (size_t v = 0; v < m.size(); ++v) {
      if (m[v] == 0) continue;
      if (!body.empty()) body += '*';
      body += names((int)v);
      if (m[v] != 1) body += '^' + std::to_string(m[v]);
    }
    if (body.empty()) {
      out += mag.str();
    } else {
      if (mag != 1) out += mag.str() + "*";
      out += body;
    }
  }
  return out;
}

std::string ratfun_text(const RationalCoefficient& c, const Declarations& decls) {
  std::string s = decls.head(decls.ratfun_head()).name;
  const auto nm = namer(decls);
  if (decls.expansion() && c.den.is_constant()) {
    s += '(' + series_text(c.num, decls.expansion()->variable, nm);
    if (!c.den.is_one()) s += ',' + c.den.to_string(nm);
    s += ')';
    return s;
  }
  s += '(' + c.num.to_string(nm) + ',' + c.den.to_string(nm) + ')';
  return s;
}

// Runs of an identical argumentless commuting factor print as head^n; factors
// with arguments always print one by one.
void append_cfactors(std::vector<std::string>& parts, const std::vector<FactorApp>& fs,
                     const Declarations& decls) {
  for (size_t i = 0; i < fs.size();) {
    if (fs[i].args.empty()) {
      size_t j = i + 1;
      while (j < fs.size() && fs[j].head == fs[i].head && fs[j].args.empty()) ++j;
      std::string s = decls.head(fs[i].head).name;
      if (j - i > 1) s += '^' + std::to_string(j - i);
      parts.push_back(std::move(s));
      i = j;
    } else {
      parts.push_back(factor_text(fs[i], decls));
      ++i;
    }
  }
}

void append_sympow(std::vector<std::string>& parts, const std::map<int, int>& pow,
                   const Declarations& decls) {
  for (const auto& [sym, exp] : pow) {
    if (exp == 0) continue;
    std::string s = decls.symbol_name(sym);
    if (exp != 1) s += '^' + std::to_string(exp);
    parts.push_back(std::move(s));
  }
}

std::string join_product(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += '*';
    out += p;
  }
  return out;
}

bool coeff_is_constant(const RationalCoefficient& c) {
  return c.num.is_constant() && c.den.is_constant();
}

}  // namespace

std::string render_term_body(const Term& t, const Declarations& decls,
                             bool ratfun_display, int* sign_out) {
  std::vector<std::string> parts;
  for (const auto& f : t.nfactors) parts.push_back(factor_text(f, decls));
  append_cfactors(parts, t.cfactors, decls);
  append_sympow(parts, t.sympow, decls);

  if (ratfun_display) {
    if (decls.ratfun_head() < 0)
      throw Error(ErrorKind::Internal, "rational coefficient with no ratfun head");
    if (sign_out) *sign_out = 1;
    parts.push_back(ratfun_text(t.coeff, decls));
    return join_product(parts);
  }

  const Int& n = t.coeff.num.constant_value();
  const Int& d = t.coeff.den.constant_value();
  if (sign_out) *sign_out = n < 0 ? -1 : 1;
  Int mag = n < 0 ? Int(-n) : n;
  std::string c = mag.str();
  if (d != 1) c += '/' + d.str();
  if (parts.empty()) return c;
  if (c != "1") parts.insert(parts.begin(), c);
  return join_product(parts);
}

namespace {

struct RenderedTerm {
  int sign = 1;
  std::string body;
};

RenderedTerm rendered(const Term& t, const Declarations& decls, bool plus_s) {
  bool ratfun = decls.ratfun_head() >= 0 && (plus_s || !coeff_is_constant(t.coeff));
  RenderedTerm r;
  r.body = render_term_body(t, decls, ratfun, &r.sign);
  return r;
}

// One-line layout: `   name = a + b - c;` broken greedily at term joins, six
// spaces of continuation indent.
std::vector<std::string> plain_layout(const std::string& name, const Expression& e,
                                      const Declarations& decls, int width) {
  std::vector<std::string> lines;
  std::string cur = "   " + name + " =";
  if (e.terms.empty()) cur += " 0";
  bool first = true;
  for (const auto& t : e.terms) {
    RenderedTerm r = rendered(t, decls, false);
    std::string piece;
    if (first)
      piece = r.sign < 0 ? " -" + r.body : " " + r.body;
    else
      piece = r.sign < 0 ? " - " + r.body : " + " + r.body;
    first = false;
    if (!cur.empty() && (int)(cur.size() + piece.size()) > width &&
        cur != "   " + name + " =") {
      lines.push_back(cur);
      cur = "      " + piece.substr(1);
    } else {
      cur += piece;
    }
  }
  cur += ';';
  lines.push_back(cur);
  return lines;
}

std::string signed_line(const std::string& indent, const RenderedTerm& r) {
  return indent + (r.sign < 0 ? "- " : "+ ") + r.body;
}

// Factors with a bracketed head move to the group key; key order and the
// order of the remaining terms both follow the canonical factor order.
struct BracketGroup {
  std::vector<FactorApp> key;
  std::vector<Term> terms;
};

std::vector<BracketGroup> group_by_bracket(const Expression& e,
                                           const std::vector<int>& heads) {
  std::vector<BracketGroup> groups;
  for (const auto& t : e.terms) {
    Term rest = t;
    std::vector<FactorApp> key;
    auto split = [&](std::vector<FactorApp>& fs) {
      std::vector<FactorApp> kept;
      for (auto& f : fs) {
        if (std::find(heads.begin(), heads.end(), f.head) != heads.end())
          key.push_back(f);
        else
          kept.push_back(f);
      }
      fs = std::move(kept);
    };
    split(rest.nfactors);
    split(rest.cfactors);
    BracketGroup* g = nullptr;
    for (auto& cand : groups)
      if (factor_list_cmp(cand.key, key) == 0) g = &cand;
    if (!g) {
      groups.push_back({std::move(key), {}});
      g = &groups.back();
    }
    g->terms.push_back(std::move(rest));
  }
  std::sort(groups.begin(), groups.end(), [](const BracketGroup& a, const BracketGroup& b) {
    return factor_list_cmp(a.key, b.key) < 0;
  });
  return groups;
}

std::vector<std::string> term_per_line_layout(const std::string& name, const Expression& e,
                                              const Declarations& decls,
                                              const RenderOptions& opt) {
  std::vector<std::string> lines;
  lines.push_back("   " + name + " =");
  if (e.terms.empty()) {
    lines.push_back("       + 0");
    lines.push_back("      ;");
    return lines;
  }

  if (opt.bracket_heads.empty()) {
    for (const auto& t : e.terms)
      lines.push_back(signed_line("       ", rendered(t, decls, true)));
    lines.push_back("      ;");
    return lines;
  }

  lines.push_back("");
  auto groups = group_by_bracket(e, opt.bracket_heads);
  for (size_t gi = 0; gi < groups.size(); ++gi) {
    const auto& g = groups[gi];
    bool last = gi + 1 == groups.size();
    if (g.key.empty()) {
      for (size_t ti = 0; ti < g.terms.size(); ++ti) {
        std::string line = signed_line("       ", rendered(g.terms[ti], decls, true));
        if (last && ti + 1 == g.terms.size()) line += ';';
        lines.push_back(line);
      }
      continue;
    }
    std::vector<std::string> keyparts;
    for (const auto& f : g.key) keyparts.push_back(factor_text(f, decls));
    lines.push_back("       + " + join_product(keyparts) + " * (");
    for (const auto& t : g.terms)
      lines.push_back(signed_line("          ", rendered(t, decls, true)));
    lines.push_back(last ? "          );" : "          )");
  }
  return lines;
}

}  // namespace

std::vector<std::string> render_expression(const std::string& name, const Expression& e,
                                           const Declarations& decls,
                                           const RenderOptions& opt) {
  if (opt.term_per_line) return term_per_line_layout(name, e, decls, opt);
  return plain_layout(name, e, decls, opt.width);
}

}  // namespace formlet
