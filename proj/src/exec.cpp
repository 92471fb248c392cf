#include "formlet/exec.hpp"

#include <algorithm>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "formlet/error.hpp"
#include "formlet/pattern.hpp"
#include "formlet/render.hpp"

namespace formlet {

StoredExpression* Session::find_active(const std::string& name) {
  for (auto& e : active)
    if (e.name == name) return &e;
  return nullptr;
}

StoredExpression* Session::find_hidden(const std::string& name) {
  for (auto& e : hidden)
    if (e.name == name) return &e;
  return nullptr;
}

namespace {

// what() without the kind prefix, so an error can be rethrown with a location
// attached without doubling the prefix.
std::string bare_message(const Error& e) {
  std::string w = e.what();
  std::string k = Error::kind_name(e.kind());
  if (w == k) return "";
  if (w.rfind(k + ": ", 0) == 0) return w.substr(k.size() + 2);
  return w;
}

Int int_pow(const Int& base, long e) {
  Int r = 1;
  for (long i = 0; i < e; ++i) r *= base;
  return r;
}

constexpr long kMaxNumericPower = 4096;
constexpr long kMaxParenPower = 32;

// ---------------------------------------------------------------------------
// Statement compilation: surface atoms resolved against the live tables.

struct CompiledId {
  Pattern pat;
  TemplateExpr rhs;
};

struct Compiler {
  Declarations& decls;
  Session* sess = nullptr;  // expression names resolve only when present
  std::string file;
  int line = 0;

  std::vector<WildcardSlot> slots;
  std::vector<std::string> expr_names;  // right-hand-side splices, first-use order

  Compiler(Declarations& d, Session* s, std::string f, int ln)
      : decls(d), sess(s), file(std::move(f)), line(ln) {}

  [[noreturn]] void fail(ErrorKind k, const std::string& msg) const {
    throw Error(k, msg, file, line);
  }

  IndexRef index_ref(int id) const {
    return IndexRef{decls.index(id).open ? IndexRef::Cls::Open : IndexRef::Cls::Declared,
                    id};
  }

  int find_slot(const std::string& name, bool argfield) const {
    for (size_t i = 0; i < slots.size(); ++i) {
      bool f = slots[i].kind == WildcardSlot::Kind::ArgField;
      if (f == argfield && slots[i].name == name) return (int)i;
    }
    return -1;
  }

  int make_slot(WildcardSlot::Kind kind, const std::string& name) {
    int s = find_slot(name, kind == WildcardSlot::Kind::ArgField);
    if (s >= 0) {
      if (slots[s].kind != kind)
        fail(ErrorKind::BadPattern, "wildcard " + name + " used as two different kinds");
      return s;
    }
    WildcardSlot w;
    w.kind = kind;
    w.name = name;
    slots.push_back(std::move(w));
    return (int)slots.size() - 1;
  }

  // -- polynomial arguments --------------------------------------------------

  // in_pattern selects the error kind: a malformed left-hand side is a bad
  // pattern, a malformed right-hand side is plain syntax.
  ErrorKind side(bool in_pattern) const {
    return in_pattern ? ErrorKind::BadPattern : ErrorKind::Syntax;
  }

  Polynomial eval_poly(const SExpr& e, bool in_pattern) {
    Polynomial out;
    for (const auto& prod : e.prods) {
      Polynomial acc = Polynomial::constant(prod.sign);
      for (const auto& a : prod.atoms) acc = acc * atom_poly(a, in_pattern);
      out += acc;
    }
    return out;
  }

  Polynomial atom_poly(const SAtom& a, bool in_pattern) {
    if (a.divides)
      fail(side(in_pattern), "fractions are not supported inside arguments");
    if (a.exponent < 0) fail(side(in_pattern), "negative powers are not supported");
    if (a.exponent > kMaxNumericPower) fail(side(in_pattern), "power too large");
    Polynomial base;
    switch (a.kind) {
      case SAtom::Kind::Number:
        base = Polynomial::constant(a.number);
        break;
      case SAtom::Kind::Paren:
        base = eval_poly(a.sub[0], in_pattern);
        break;
      case SAtom::Kind::Internal:
        fail(side(in_pattern), "an index cannot appear in arithmetic");
      case SAtom::Kind::Name: {
        if (a.argfield)
          fail(side(in_pattern), "an argument field cannot appear in arithmetic");
        if (a.wild) {
          if (in_pattern)
            fail(ErrorKind::BadPattern, "wildcards must stand alone in an argument");
          fail(ErrorKind::Syntax, "wildcard suffix belongs on the left-hand side");
        }
        if (a.has_args)
          fail(side(in_pattern), "a function cannot appear inside an argument");
        if (!in_pattern) {
          int s = find_slot(a.name, false);
          if (s >= 0) {
            if (slots[s].kind == WildcardSlot::Kind::Symbol) {
              base = Polynomial::symbol(decls.symbol_count() + s);
              break;
            }
            fail(ErrorKind::Syntax, "an index cannot appear in arithmetic");
          }
        }
        int sym = decls.find_symbol(a.name);
        if (sym >= 0) {
          base = Polynomial::symbol(sym);
          break;
        }
        if (decls.find_index(a.name) >= 0 || decls.resolve_index(a.name) >= 0)
          fail(side(in_pattern), "an index cannot appear in arithmetic");
        if (decls.find_head(a.name) >= 0)
          fail(side(in_pattern), "a function cannot appear inside an argument");
        fail(ErrorKind::UndeclaredName, "name not declared: " + a.name);
      }
    }
    return a.exponent == 1 ? base : poly_pow(base, (int)a.exponent);
  }

  // True when the argument expression is one bare atom (no sign, no power).
  static const SAtom* single_atom(const SExpr& e) {
    if (e.prods.size() != 1) return nullptr;
    const SProd& p = e.prods[0];
    if (p.sign != 1 || p.atoms.size() != 1) return nullptr;
    const SAtom& a = p.atoms[0];
    if (a.exponent != 1 || a.divides) return nullptr;
    return &a;
  }

  // -- left-hand side ---------------------------------------------------------

  Pattern pattern(const SProd& lhs) {
    Pattern p;
    for (const auto& a : lhs.atoms) add_pattern_atom(p, a);
    return p;
  }

  void add_pattern_atom(Pattern& p, const SAtom& a) {
    switch (a.kind) {
      case SAtom::Kind::Number:
        fail(ErrorKind::BadPattern, "a pattern has no numeric coefficient");
      case SAtom::Kind::Paren:
        fail(ErrorKind::BadPattern, "parentheses cannot appear in a pattern");
      case SAtom::Kind::Internal:
        fail(ErrorKind::BadPattern, "internal indices cannot be matched directly");
      case SAtom::Kind::Name:
        break;
    }
    if (a.divides) fail(ErrorKind::BadPattern, "division in a pattern");
    if (a.argfield)
      fail(ErrorKind::BadPattern, "an argument field belongs inside an argument list");
    if (a.exponent < 1) fail(ErrorKind::BadPattern, "nonpositive power in a pattern");

    if (a.wild) {
      int head = decls.find_head(a.name);
      if (head < 0) {
        if (decls.find_symbol(a.name) >= 0)
          fail(ErrorKind::BadPattern, "a symbol wildcard matches inside arguments");
        if (decls.find_index(a.name) >= 0 || decls.resolve_index(a.name) >= 0)
          fail(ErrorKind::BadPattern, "an index cannot stand alone in a pattern");
        fail(ErrorKind::UndeclaredName, "name not declared: " + a.name);
      }
      int s = make_slot(WildcardSlot::Kind::Head, a.name);
      if (!a.restrict_set.empty()) {
        int rs = decls.find_set(a.restrict_set);
        if (rs < 0)
          fail(ErrorKind::UndeclaredName, "set not declared: " + a.restrict_set);
        slots[s].restrict_set = rs;
        if (!a.replace_set.empty()) {
          int ps = decls.find_set(a.replace_set);
          if (ps < 0)
            fail(ErrorKind::UndeclaredName, "set not declared: " + a.replace_set);
          if (decls.set(ps).members.size() != decls.set(rs).members.size())
            fail(ErrorKind::BadPattern, "paired sets differ in length");
          slots[s].replace_set = ps;
        }
      } else if (!a.replace_set.empty()) {
        fail(ErrorKind::BadPattern, "a replacement set needs a match set first");
      }
      PatFactor f;
      f.head = head;
      f.head_slot = s;
      f.bare = !a.has_args;
      if (a.has_args) f.args = pattern_args(a, decls.head(head));
      push_pattern_factor(p, std::move(f), a.exponent, decls.head(head));
      return;
    }

    if (!a.restrict_set.empty() || !a.replace_set.empty())
      fail(ErrorKind::BadPattern, "set restriction needs a wildcard");

    int sym = decls.find_symbol(a.name);
    if (sym >= 0) {
      if (a.has_args) fail(ErrorKind::BadPattern, "a symbol takes no arguments");
      p.sympow[sym] += (int)a.exponent;
      return;
    }
    int head = decls.find_head(a.name);
    if (head >= 0) {
      PatFactor f;
      f.head = head;
      f.bare = !a.has_args;
      if (a.has_args) f.args = pattern_args(a, decls.head(head));
      push_pattern_factor(p, std::move(f), a.exponent, decls.head(head));
      return;
    }
    if (decls.find_index(a.name) >= 0 || decls.resolve_index(a.name) >= 0)
      fail(ErrorKind::BadPattern, "an index cannot stand alone in a pattern");
    fail(ErrorKind::UndeclaredName, "name not declared: " + a.name);
  }

  void push_pattern_factor(Pattern& p, PatFactor f, long reps, const HeadDecl& h) {
    auto& side_list = h.commuting() ? p.cfactors : p.nfactors;
    for (long i = 0; i < reps; ++i) side_list.push_back(f);
  }

  std::vector<PatArg> pattern_args(const SAtom& host, const HeadDecl& h) {
    std::vector<PatArg> out;
    for (const auto& arg : host.args) {
      const SAtom* a = single_atom(arg);
      if (!a) {
        out.push_back(PatArg::of(Arg(eval_poly(arg, true))));
        continue;
      }
      if (a->kind == SAtom::Kind::Internal)
        fail(ErrorKind::BadPattern, "internal indices cannot be matched directly");
      if (a->kind != SAtom::Kind::Name) {
        out.push_back(PatArg::of(Arg(eval_poly(arg, true))));
        continue;
      }
      if (a->has_args)
        fail(ErrorKind::BadPattern, "a function cannot appear inside an argument");
      if (a->argfield) {
        if (h.sym != Symmetry::None)
          fail(ErrorKind::BadPattern,
               "argument fields do not combine with symmetric or antisymmetric objects");
        out.push_back(PatArg::wild(PatArg::Kind::ArgField,
                                   make_slot(WildcardSlot::Kind::ArgField, a->name)));
        continue;
      }
      if (a->wild) {
        if (!a->restrict_set.empty())
          fail(ErrorKind::BadPattern,
               "set restriction applies to function and tensor wildcards");
        if (decls.find_index(a->name) >= 0) {
          out.push_back(PatArg::wild(PatArg::Kind::IndexWild,
                                     make_slot(WildcardSlot::Kind::Index, a->name)));
        } else if (decls.find_symbol(a->name) >= 0) {
          out.push_back(PatArg::wild(PatArg::Kind::SymbolWild,
                                     make_slot(WildcardSlot::Kind::Symbol, a->name)));
        } else if (decls.resolve_index(a->name) >= 0) {
          out.push_back(PatArg::wild(PatArg::Kind::IndexWild,
                                     make_slot(WildcardSlot::Kind::Index, a->name)));
        } else if (decls.find_head(a->name) >= 0) {
          fail(ErrorKind::BadPattern, "a function wildcard cannot appear inside an argument");
        } else {
          fail(ErrorKind::UndeclaredName, "name not declared: " + a->name);
        }
        continue;
      }
      int ix = decls.find_index(a->name);
      if (ix >= 0) {
        out.push_back(PatArg::of(Arg(index_ref(ix))));
        continue;
      }
      if (decls.find_symbol(a->name) >= 0) {
        out.push_back(PatArg::of(Arg(eval_poly(arg, true))));
        continue;
      }
      ix = decls.resolve_index(a->name);
      if (ix >= 0) {
        out.push_back(PatArg::of(Arg(index_ref(ix))));
        continue;
      }
      if (decls.find_head(a->name) >= 0)
        fail(ErrorKind::BadPattern, "a function cannot appear inside an argument");
      fail(ErrorKind::UndeclaredName, "name not declared: " + a->name);
    }
    return out;
  }

  // -- right-hand side ---------------------------------------------------------

  struct FlatProd {
    int sign = 1;
    std::vector<const SAtom*> atoms;
  };

  std::vector<FlatProd> flatten(const SExpr& e) {
    std::vector<FlatProd> out;
    for (const auto& prod : e.prods) {
      std::vector<FlatProd> cur{FlatProd{prod.sign, {}}};
      for (const auto& a : prod.atoms) {
        if (a.kind != SAtom::Kind::Paren) {
          for (auto& c : cur) c.atoms.push_back(&a);
          continue;
        }
        if (a.divides)
          fail(ErrorKind::Syntax, "cannot divide by a parenthesized expression");
        if (a.exponent < 0) fail(ErrorKind::Syntax, "negative powers are not supported");
        if (a.exponent > kMaxParenPower)
          fail(ErrorKind::Syntax, "parenthesized power too large to expand");
        std::vector<FlatProd> sub = flatten(a.sub[0]);
        std::vector<FlatProd> pieces{FlatProd{}};
        for (long i = 0; i < a.exponent; ++i) {
          std::vector<FlatProd> next;
          for (const auto& lhs : pieces)
            for (const auto& rhs : sub) {
              FlatProd f = lhs;
              f.sign *= rhs.sign;
              f.atoms.insert(f.atoms.end(), rhs.atoms.begin(), rhs.atoms.end());
              next.push_back(std::move(f));
            }
          pieces = std::move(next);
        }
        std::vector<FlatProd> next;
        for (const auto& lhs : cur)
          for (const auto& rhs : pieces) {
            FlatProd f = lhs;
            f.sign *= rhs.sign;
            f.atoms.insert(f.atoms.end(), rhs.atoms.begin(), rhs.atoms.end());
            next.push_back(std::move(f));
          }
        cur = std::move(next);
      }
      out.insert(out.end(), cur.begin(), cur.end());
    }
    return out;
  }

  TemplateExpr template_expr(const SExpr& rhs, bool allow_expr) {
    TemplateExpr out;
    out.wild_base = decls.symbol_count();
    for (const auto& fp : flatten(rhs)) out.terms.push_back(template_term(fp, allow_expr));
    return out;
  }

  TemplateTerm template_term(const FlatProd& fp, bool allow_expr) {
    TemplateTerm t;
    Int num = fp.sign, den = 1;
    for (const SAtom* a : fp.atoms) {
      if (a->exponent < 0) fail(ErrorKind::Syntax, "negative powers are not supported");
      switch (a->kind) {
        case SAtom::Kind::Number: {
          if (a->exponent > kMaxNumericPower) fail(ErrorKind::Syntax, "power too large");
          Int v = int_pow(a->number, a->exponent);
          if (a->divides) {
            if (v == 0) fail(ErrorKind::DivisionByZero, "division by zero");
            den *= v;
          } else {
            num *= v;
          }
          break;
        }
        case SAtom::Kind::Internal:
          fail(ErrorKind::Syntax, "an index cannot stand alone");
        case SAtom::Kind::Paren:
          throw Error(ErrorKind::Internal, "parenthesis survived flattening");
        case SAtom::Kind::Name:
          add_rhs_name(t, *a, allow_expr);
          break;
      }
    }
    t.coeff = RationalCoefficient::integer(num, den);
    return t;
  }

  void add_rhs_name(TemplateTerm& t, const SAtom& a, bool allow_expr) {
    if (a.wild) fail(ErrorKind::Syntax, "wildcard suffix belongs on the left-hand side");
    if (a.argfield)
      fail(ErrorKind::Syntax, "an argument field belongs inside an argument list");
    if (a.divides) fail(ErrorKind::Syntax, "only numbers can divide");
    if (a.exponent > kMaxNumericPower) fail(ErrorKind::Syntax, "power too large");

    int s = find_slot(a.name, false);
    if (s >= 0) {
      switch (slots[s].kind) {
        case WildcardSlot::Kind::Symbol: {
          Polynomial p = Polynomial::symbol(decls.symbol_count() + s);
          t.scalars.push_back(a.exponent == 1 ? p : poly_pow(p, (int)a.exponent));
          if (a.has_args) fail(ErrorKind::Syntax, "a symbol takes no arguments");
          return;
        }
        case WildcardSlot::Kind::Index:
          fail(ErrorKind::Syntax, "an index cannot stand alone");
        case WildcardSlot::Kind::ArgField:
          fail(ErrorKind::Syntax, "an argument field belongs inside an argument list");
        case WildcardSlot::Kind::Head: {
          TemplateFactor f;
          f.head_slot = s;
          if (a.has_args) fill_factor_args(f, a);
          for (long i = 0; i < a.exponent; ++i) t.factors.push_back(f);
          return;
        }
      }
    }

    int sym = decls.find_symbol(a.name);
    if (sym >= 0) {
      if (a.has_args) fail(ErrorKind::Syntax, "a symbol takes no arguments");
      Polynomial p = Polynomial::symbol(sym);
      t.scalars.push_back(a.exponent == 1 ? p : poly_pow(p, (int)a.exponent));
      return;
    }
    int head = decls.find_head(a.name);
    if (head >= 0) {
      TemplateFactor f;
      f.head = head;
      if (a.has_args) fill_factor_args(f, a);
      for (long i = 0; i < a.exponent; ++i) t.factors.push_back(f);
      return;
    }
    if (decls.find_index(a.name) >= 0 || decls.resolve_index(a.name) >= 0)
      fail(ErrorKind::Syntax, "an index cannot stand alone");
    if (allow_expr && sess &&
        (sess->find_active(a.name) || sess->find_hidden(a.name))) {
      if (a.has_args) fail(ErrorKind::Syntax, "an expression takes no arguments");
      TemplateFactor f;
      f.expr = intern_expr(a.name);
      for (long i = 0; i < a.exponent; ++i) t.factors.push_back(f);
      return;
    }
    fail(ErrorKind::UndeclaredName, "name not declared: " + a.name);
  }

  int intern_expr(const std::string& name) {
    for (size_t i = 0; i < expr_names.size(); ++i)
      if (expr_names[i] == name) return (int)i;
    expr_names.push_back(name);
    return (int)expr_names.size() - 1;
  }

  void fill_factor_args(TemplateFactor& f, const SAtom& host) {
    for (const auto& arg : host.args) {
      const SAtom* a = single_atom(arg);
      TemplateArg ta;
      if (!a) {
        ta.kind = TemplateArg::Kind::Poly;
        ta.poly = eval_poly(arg, false);
        f.args.push_back(std::move(ta));
        continue;
      }
      if (a->kind == SAtom::Kind::Internal) {
        ta.kind = TemplateArg::Kind::Index;
        ta.index = IndexRef{IndexRef::Cls::Internal, a->internal_ordinal};
        f.args.push_back(std::move(ta));
        continue;
      }
      if (a->kind != SAtom::Kind::Name) {
        ta.kind = TemplateArg::Kind::Poly;
        ta.poly = eval_poly(arg, false);
        f.args.push_back(std::move(ta));
        continue;
      }
      if (a->wild)
        fail(ErrorKind::Syntax, "wildcard suffix belongs on the left-hand side");
      if (a->has_args)
        fail(ErrorKind::Syntax, "a function cannot appear inside an argument");
      if (a->argfield) {
        int s = find_slot(a->name, true);
        if (s < 0)
          fail(ErrorKind::UnboundWildcard,
               "argument field ?" + a->name + " does not appear on the left-hand side");
        ta.kind = TemplateArg::Kind::ArgField;
        ta.slot = s;
        f.args.push_back(std::move(ta));
        continue;
      }
      int s = find_slot(a->name, false);
      if (s >= 0) {
        switch (slots[s].kind) {
          case WildcardSlot::Kind::Index:
            ta.kind = TemplateArg::Kind::WildIndex;
            ta.slot = s;
            break;
          case WildcardSlot::Kind::Symbol:
            ta.kind = TemplateArg::Kind::Poly;
            ta.poly = Polynomial::symbol(decls.symbol_count() + s);
            break;
          case WildcardSlot::Kind::Head:
            fail(ErrorKind::Syntax, "a function cannot appear inside an argument");
          case WildcardSlot::Kind::ArgField:
            fail(ErrorKind::UndeclaredName, "name not declared: " + a->name);
        }
        f.args.push_back(std::move(ta));
        continue;
      }
      int ix = decls.find_index(a->name);
      if (ix < 0 && decls.find_symbol(a->name) < 0 && decls.find_head(a->name) < 0)
        ix = decls.resolve_index(a->name);
      if (ix >= 0) {
        ta.kind = TemplateArg::Kind::Index;
        ta.index = index_ref(ix);
        f.args.push_back(std::move(ta));
        continue;
      }
      ta.kind = TemplateArg::Kind::Poly;
      ta.poly = eval_poly(arg, false);
      f.args.push_back(std::move(ta));
    }
  }
};

// ---------------------------------------------------------------------------
// Statement execution.

struct ModuleOutput {
  bool print = false;
  bool plus_s = false;
  std::vector<int> bracket;
};

bool expr_equal(const Expression& a, const Expression& b) {
  if (a.terms.size() != b.terms.size()) return false;
  for (size_t i = 0; i < a.terms.size(); ++i) {
    if (!same_structure(a.terms[i], b.terms[i])) return false;
    if (a.terms[i].coeff != b.terms[i].coeff) return false;
  }
  return true;
}

struct Probes {
  std::vector<int> syms, indices, heads;
};

bool term_occurs(const Term& t, const Probes& p) {
  for (int s : p.syms) {
    auto it = t.sympow.find(s);
    if (it != t.sympow.end() && it->second != 0) return true;
  }
  for (const auto* vec : {&t.nfactors, &t.cfactors})
    for (const auto& f : *vec) {
      for (int h : p.heads)
        if (f.head == h) return true;
      for (const auto& a : f.args) {
        if (a.is_index()) {
          if (a.index().cls == IndexRef::Cls::Internal) continue;
          for (int ix : p.indices)
            if (a.index().id == ix) return true;
        } else {
          for (int s : p.syms)
            if (a.poly().uses_symbol(s)) return true;
        }
      }
    }
  return false;
}

struct Runner {
  Session& S;
  std::vector<OutputEvent> events;

  explicit Runner(Session& s) : S(s) {}

  void program(const Program& p) {
    for (const auto& m : p.modules) {
      module(m);
      if (m.is_end) break;
    }
  }

  void module(const Module& m) {
    ModuleOutput out;
    for (const auto& st : m.stmts) statement(st, out, false);
    module_end(out);
  }

  void statement(const Stmt& st, ModuleOutput& out, bool nested) {
    try {
      dispatch(st, out, nested);
    } catch (const Error& e) {
      if (e.line() == 0 && !st.file.empty())
        throw Error(e.kind(), bare_message(e), st.file, st.line);
      throw;
    }
  }

  void dispatch(const Stmt& st, ModuleOutput& out, bool nested) {
    if (nested && !std::holds_alternative<IdStmt>(st.v) &&
        !std::holds_alternative<SumStmt>(st.v) &&
        !std::holds_alternative<RepeatStmt>(st.v) &&
        !std::holds_alternative<IfOccursStmt>(st.v))
      throw Error(ErrorKind::Syntax, "only id, sum, repeat, and if may appear inside a block",
                  st.file, st.line);

    if (const auto* d = std::get_if<DeclStmt>(&st.v)) return run_decl(*d, st);
    if (const auto* l = std::get_if<LocalStmt>(&st.v)) return run_local(*l, st);
    if (const auto* i = std::get_if<IdStmt>(&st.v)) return run_id(*i, st);
    if (const auto* s = std::get_if<SumStmt>(&st.v)) return run_sum(*s, st);
    if (const auto* r = std::get_if<RepeatStmt>(&st.v)) return run_repeat(*r, st, out);
    if (const auto* f = std::get_if<IfOccursStmt>(&st.v)) return run_if(*f, st, out);
    if (const auto* h = std::get_if<HideStmt>(&st.v)) return run_hide(*h, st);
    if (const auto* b = std::get_if<BracketStmt>(&st.v)) return run_bracket(*b, st, out);
    if (const auto* p = std::get_if<PrintStmt>(&st.v)) {
      out.print = true;
      out.plus_s = p->plus_s;
      return;
    }
    if (const auto* f = std::get_if<FormatStmt>(&st.v)) {
      S.format_width = (int)f->width;
      return;
    }
    throw Error(ErrorKind::Internal, "unhandled statement", st.file, st.line);
  }

  // -- declarations -----------------------------------------------------------

  static void reject_attributes(const DeclStmt& d, const Stmt& st) {
    for (const auto& it : d.items)
      if (it.sym != Symmetry::None)
        throw Error(ErrorKind::BadDeclaration,
                    "only functions and tensors take symmetry attributes", st.file,
                    st.line);
  }

  void run_decl(const DeclStmt& d, const Stmt& st) {
    switch (d.kind) {
      case DeclKind::Symbol:
        reject_attributes(d, st);
        for (const auto& it : d.items) S.decls.declare_symbol(it.name);
        return;
      case DeclKind::Index:
        reject_attributes(d, st);
        for (const auto& it : d.items) S.decls.declare_index(it.name);
        return;
      case DeclKind::AutoIndex:
        reject_attributes(d, st);
        for (const auto& it : d.items) S.decls.declare_autodeclare_prefix(it.name);
        return;
      case DeclKind::Function:
        for (const auto& it : d.items)
          S.decls.declare_head(it.name, HeadKind::Function, it.sym);
        return;
      case DeclKind::CFunction:
        for (const auto& it : d.items)
          S.decls.declare_head(it.name, HeadKind::CFunction, it.sym);
        return;
      case DeclKind::NTensor:
        for (const auto& it : d.items)
          S.decls.declare_head(it.name, HeadKind::NTensor, it.sym);
        return;
      case DeclKind::CTensor:
        for (const auto& it : d.items)
          S.decls.declare_head(it.name, HeadKind::CTensor, it.sym);
        return;
      case DeclKind::Dimension: {
        int sym = S.decls.find_symbol(d.dim_name);
        if (sym >= 0) {
          S.decls.set_dimension_symbol(sym);
          return;
        }
        bool digits = !d.dim_name.empty() &&
                      d.dim_name.find_first_not_of("0123456789") == std::string::npos;
        if (!digits)
          throw Error(ErrorKind::BadDeclaration,
                      "dimension must be a declared symbol or an integer", st.file,
                      st.line);
        S.decls.set_dimension_value(Int(d.dim_name));
        return;
      }
      case DeclKind::Set: {
        std::vector<int> members;
        for (const auto& n : d.set_members) {
          int h = S.decls.find_head(n);
          if (h < 0)
            throw Error(ErrorKind::UndeclaredName,
                        "a set lists declared functions or tensors: " + n, st.file,
                        st.line);
          members.push_back(h);
        }
        S.decls.declare_set(d.set_name, std::move(members));
        return;
      }
      case DeclKind::PolyRatFun: {
        int h = S.decls.find_head(d.prf_head);
        if (h < 0)
          throw Error(ErrorKind::UndeclaredName, "name not declared: " + d.prf_head,
                      st.file, st.line);
        const HeadDecl& hd = S.decls.head(h);
        if (!hd.commuting() || hd.is_delta)
          throw Error(ErrorKind::BadDeclaration,
                      "the rational-coefficient head must be a commuting function",
                      st.file, st.line);
        if (!d.prf_expand) {
          S.decls.set_ratfun(h);
          return;
        }
        int sym = S.decls.find_symbol(d.prf_symbol);
        if (sym < 0)
          throw Error(ErrorKind::UndeclaredName, "name not declared: " + d.prf_symbol,
                      st.file, st.line);
        if (d.prf_order < 0)
          throw Error(ErrorKind::BadDeclaration, "expansion order must be nonnegative",
                      st.file, st.line);
        S.decls.set_ratfun_expansion(h, ExpansionSetting{sym, (int)d.prf_order});
        return;
      }
    }
  }

  // -- expressions ------------------------------------------------------------

  void run_local(const LocalStmt& l, const Stmt& st) {
    if (S.decls.name_taken(l.name))
      throw Error(ErrorKind::DuplicateName, "name already declared: " + l.name, st.file,
                  st.line);
    if (S.find_active(l.name) || S.find_hidden(l.name))
      throw Error(ErrorKind::DuplicateName, "expression already defined: " + l.name,
                  st.file, st.line);
    Compiler c(S.decls, &S, st.file, st.line);
    TemplateExpr rhs = c.template_expr(l.rhs, true);

    InstantiationContext ctx;
    ctx.decls = &S.decls;
    ctx.counter = &S.counter;
    std::vector<std::string> names = c.expr_names;
    Session* sp = &S;
    ctx.lookup_expr = [sp, names](int i) -> const Expression* {
      if (auto* a = sp->find_active(names[i])) return &a->value;
      if (auto* h = sp->find_hidden(names[i])) return &h->value;
      return nullptr;
    };
    Expression e;
    e.terms = substitute(rhs, ctx);
    StoredExpression s;
    s.name = l.name;
    s.value = normalize_expression(std::move(e), S.decls);
    s.serial = S.next_serial++;
    S.active.push_back(std::move(s));
  }

  void run_id(const IdStmt& i, const Stmt& st) {
    Compiler c(S.decls, &S, st.file, st.line);
    CompiledId ci;
    ci.pat = c.pattern(i.lhs);
    ci.rhs = c.template_expr(i.rhs, false);
    ci.pat.slots = std::move(c.slots);
    for (auto& e : S.active)
      e.value = apply_id(ci.pat, ci.rhs, e.value, i.once, S.decls, S.counter);
  }

  void run_sum(const SumStmt& s, const Stmt& st) {
    for (const auto& name : s.names) {
      int ix = S.decls.resolve_index(name);
      if (ix < 0)
        throw Error(ErrorKind::UndeclaredName, "name not declared: " + name, st.file,
                    st.line);
      for (auto& e : S.active) {
        for (auto& t : e.value.terms) sum_indices(t, ix, S.counter);
        e.value = normalize_expression(std::move(e.value), S.decls);
      }
    }
  }

  void run_repeat(const RepeatStmt& r, const Stmt& st, ModuleOutput& out) {
    int passes = 0;
    for (;;) {
      if (passes >= S.repeat_cap)
        throw Error(ErrorKind::RepeatDivergence,
                    "no fixed point after " + std::to_string(passes) + " passes", st.file,
                    st.line);
      std::vector<Expression> before;
      before.reserve(S.active.size());
      for (const auto& e : S.active) before.push_back(e.value);
      for (const auto& b : r.body) statement(b, out, true);
      ++passes;
      bool changed = before.size() != S.active.size();
      for (size_t i = 0; !changed && i < before.size(); ++i)
        changed = !expr_equal(before[i], S.active[i].value);
      if (!changed) break;
    }
    S.stats.repeat_passes.push_back(passes);
  }

  void run_if(const IfOccursStmt& f, const Stmt& st, ModuleOutput& out) {
    Probes p;
    for (const auto& name : f.names) {
      int v = S.decls.find_symbol(name);
      if (v >= 0) {
        p.syms.push_back(v);
        continue;
      }
      v = S.decls.find_index(name);
      if (v >= 0) {
        p.indices.push_back(v);
        continue;
      }
      v = S.decls.find_head(name);
      if (v >= 0) {
        p.heads.push_back(v);
        continue;
      }
      throw Error(ErrorKind::UndeclaredName, "name not declared: " + name, st.file,
                  st.line);
    }
    // Terms whose occurs value differs from the target sit the block out.
    std::vector<std::vector<Term>> parked(S.active.size());
    for (size_t i = 0; i < S.active.size(); ++i) {
      std::vector<Term> in, park;
      for (auto& t : S.active[i].value.terms) {
        long v = term_occurs(t, p) ? 1 : 0;
        (v == f.target ? in : park).push_back(std::move(t));
      }
      S.active[i].value.terms = std::move(in);
      parked[i] = std::move(park);
    }
    for (const auto& b : f.body) statement(b, out, true);
    for (size_t i = 0; i < S.active.size(); ++i) {
      auto& terms = S.active[i].value.terms;
      terms.insert(terms.end(), std::make_move_iterator(parked[i].begin()),
                   std::make_move_iterator(parked[i].end()));
      S.active[i].value = normalize_expression(std::move(S.active[i].value), S.decls);
    }
  }

  // -- stores and output -------------------------------------------------------

  void sort_by_serial(std::vector<StoredExpression>& v) {
    std::sort(v.begin(), v.end(),
              [](const StoredExpression& a, const StoredExpression& b) {
                return a.serial < b.serial;
              });
  }

  void run_hide(const HideStmt& h, const Stmt& st) {
    auto& from = h.hide ? S.active : S.hidden;
    auto& to = h.hide ? S.hidden : S.active;
    if (h.names.empty()) {
      for (auto& e : from) to.push_back(std::move(e));
      from.clear();
    } else {
      for (const auto& name : h.names) {
        auto it = std::find_if(from.begin(), from.end(),
                               [&](const StoredExpression& e) { return e.name == name; });
        if (it == from.end())
          throw Error(ErrorKind::UndeclaredName,
                      std::string("no ") + (h.hide ? "active" : "hidden") +
                          " expression named " + name,
                      st.file, st.line);
        to.push_back(std::move(*it));
        from.erase(it);
      }
    }
    sort_by_serial(to);
  }

  void run_bracket(const BracketStmt& b, const Stmt& st, ModuleOutput& out) {
    out.bracket.clear();
    for (const auto& name : b.names) {
      int h = S.decls.find_head(name);
      if (h < 0)
        throw Error(ErrorKind::UndeclaredName,
                    "bracket needs declared functions or tensors: " + name, st.file,
                    st.line);
      out.bracket.push_back(h);
    }
  }

  void module_end(const ModuleOutput& out) {
    size_t total = 0;
    for (auto& e : S.active) {
      e.value = normalize_expression(std::move(e.value), S.decls, true);
      total += e.value.terms.size();
    }
    S.stats.module_terms.push_back(total);
    if (out.print) {
      RenderOptions opt;
      opt.width = S.format_width;
      opt.term_per_line = out.plus_s;
      opt.bracket_heads = out.bracket;
      for (const auto& e : S.active) {
        OutputEvent ev;
        ev.name = e.name;
        ev.lines = render_expression(e.name, e.value, S.decls, opt);
        ev.value = e.value;
        events.push_back(std::move(ev));
      }
    }
    S.counter = 0;
  }
};

}  // namespace

std::vector<OutputEvent> run_program(const Program& p, Session& sess) {
  Runner r(sess);
  r.program(p);
  return std::move(r.events);
}

Expression evaluate_expression(const SExpr& e, Declarations& decls) {
  Compiler c(decls, nullptr, "", 0);
  TemplateExpr t = c.template_expr(e, false);
  int counter = 0;
  InstantiationContext ctx;
  ctx.decls = &decls;
  ctx.counter = &counter;
  Expression out;
  out.terms = substitute(t, ctx);
  return normalize_expression(std::move(out), decls, true);
}

}  // namespace formlet
