#include "formlet/parser.hpp"

#include <algorithm>
#include <cctype>

#include "formlet/error.hpp"

namespace formlet {
namespace {

struct Token {
  enum class Kind { Name, Number, Internal, Punct, DotWord, End };
  Kind kind = Kind::End;
  std::string text;  // Name / DotWord
  Int number = 0;    // Number
  int ordinal = 0;   // Internal
  char punct = 0;
  int line = 0;
};

struct Lexer {
  const std::string& file;
  std::vector<Token> toks;

  [[noreturn]] void fail(const std::string& msg, int line) const {
    throw Error(ErrorKind::Syntax, msg, file, line);
  }

  void lex_line(const std::string& s, int line) {
    size_t i = 0;
    while (i < s.size()) {
      char c = s[i];
      if (std::isspace((unsigned char)c)) {
        ++i;
        continue;
      }
      if (c == '[') {
        size_t close = s.find(']', i);
        if (close == std::string::npos) fail("unterminated [name]", line);
        std::string name = "[";
        for (size_t k = i + 1; k < close; ++k)
          if (!std::isspace((unsigned char)s[k])) name += s[k];
        name += ']';
        toks.push_back({Token::Kind::Name, name, 0, 0, 0, line});
        i = close + 1;
        continue;
      }
      if (std::isdigit((unsigned char)c)) {
        size_t b = i;
        while (i < s.size() && std::isdigit((unsigned char)s[i])) ++i;
        Token t;
        t.kind = Token::Kind::Number;
        t.number = Int(s.substr(b, i - b));
        t.line = line;
        toks.push_back(std::move(t));
        continue;
      }
      if (std::isalpha((unsigned char)c)) {
        size_t b = i;
        while (i < s.size() &&
               (std::isalnum((unsigned char)s[i]) || s[i] == '_'))
          ++i;
        std::string name = s.substr(b, i - b);
        // internal index: N<k>_ followed by ?
        if (name.size() >= 3 && name[0] == 'N' && name.back() == '_' &&
            i < s.size() && s[i] == '?' &&
            std::all_of(name.begin() + 1, name.end() - 1,
                        [](char d) { return std::isdigit((unsigned char)d); })) {
          Token t;
          t.kind = Token::Kind::Internal;
          t.ordinal = std::stoi(name.substr(1, name.size() - 2));
          t.line = line;
          toks.push_back(std::move(t));
          ++i;  // the ?
          continue;
        }
        toks.push_back({Token::Kind::Name, name, 0, 0, 0, line});
        continue;
      }
      if (c == '.') {
        size_t b = ++i;
        while (i < s.size() && std::isalpha((unsigned char)s[i])) ++i;
        if (i == b) fail("stray '.'", line);
        toks.push_back({Token::Kind::DotWord, s.substr(b, i - b), 0, 0, 0, line});
        continue;
      }
      if (std::string(";,=()+-*/^?:").find(c) != std::string::npos) {
        toks.push_back({Token::Kind::Punct, "", 0, 0, c, line});
        ++i;
        continue;
      }
      fail(std::string("unexpected character '") + c + "'", line);
    }
  }
};

std::string lower(std::string s) {
  for (char& c : s) c = (char)std::tolower((unsigned char)c);
  return s;
}

struct Parser {
  const std::string& file;
  std::vector<Token> toks;
  size_t pos = 0;

  [[noreturn]] void fail(const std::string& msg, int line) const {
    throw Error(ErrorKind::Syntax, msg, file, line);
  }
  [[noreturn]] void fail_here(const std::string& msg) const { fail(msg, line()); }

  const Token& peek(size_t ahead = 0) const {
    static const Token sentinel;
    return pos + ahead < toks.size() ? toks[pos + ahead] : sentinel;
  }
  int line() const {
    return pos < toks.size() ? toks[pos].line
                             : (toks.empty() ? 0 : toks.back().line);
  }
  bool at_punct(char c) const {
    return peek().kind == Token::Kind::Punct && peek().punct == c;
  }
  bool eat_punct(char c) {
    if (!at_punct(c)) return false;
    ++pos;
    return true;
  }
  void expect_punct(char c) {
    if (!eat_punct(c)) fail_here(std::string("expected '") + c + "'");
  }
  std::string expect_name(const char* what) {
    if (peek().kind != Token::Kind::Name) fail_here(std::string("expected ") + what);
    return toks[pos++].text;
  }
  Int expect_number(const char* what) {
    if (peek().kind != Token::Kind::Number)
      fail_here(std::string("expected ") + what);
    return toks[pos++].number;
  }
  // statement keyword at the current (statement-initial) position
  bool at_keyword(const char* kw) const {
    return peek().kind == Token::Kind::Name && lower(peek().text) == kw;
  }

  // ----- expressions -----

  SExpr parse_expr() {
    SExpr e;
    int sign = 1;
    if (eat_punct('+'))
      sign = 1;
    else if (eat_punct('-'))
      sign = -1;
    e.prods.push_back(parse_prod(sign));
    while (at_punct('+') || at_punct('-')) {
      sign = peek().punct == '+' ? 1 : -1;
      ++pos;
      e.prods.push_back(parse_prod(sign));
    }
    return e;
  }

  SProd parse_prod(int sign) {
    SProd p;
    p.sign = sign;
    p.atoms.push_back(parse_atom(false));
    while (at_punct('*') || at_punct('/')) {
      bool div = peek().punct == '/';
      ++pos;
      p.atoms.push_back(parse_atom(div));
    }
    return p;
  }

  SAtom parse_atom(bool divides) {
    SAtom a;
    a.divides = divides;
    const Token& t = peek();
    switch (t.kind) {
      case Token::Kind::Number:
        a.kind = SAtom::Kind::Number;
        a.number = t.number;
        ++pos;
        break;
      case Token::Kind::Internal:
        a.kind = SAtom::Kind::Internal;
        a.internal_ordinal = t.ordinal;
        ++pos;
        break;
      case Token::Kind::Name:
        a = parse_name_atom();
        a.divides = divides;
        break;
      case Token::Kind::Punct:
        if (t.punct == '(') {
          ++pos;
          a.kind = SAtom::Kind::Paren;
          a.sub.push_back(parse_expr());
          expect_punct(')');
          break;
        }
        if (t.punct == '?') {
          ++pos;
          a.kind = SAtom::Kind::Name;
          a.argfield = true;
          a.name = expect_name("argument-field name after '?'");
          break;
        }
        [[fallthrough]];
      default:
        fail_here("expected a value");
    }
    if (eat_punct('^')) {
      Int e = expect_number("exponent");
      if (e > 1000000) fail_here("exponent out of range");
      a.exponent = (long)e;
    }
    return a;
  }

  SAtom parse_name_atom() {
    SAtom a;
    a.kind = SAtom::Kind::Name;
    a.name = toks[pos++].text;
    if (at_punct('?')) {
      ++pos;
      a.wild = true;
      if (peek().kind == Token::Kind::Name) {
        a.restrict_set = toks[pos++].text;
        if (at_punct('?')) {
          ++pos;
          a.replace_set = expect_name("replacement set name");
        }
      }
    }
    if (at_punct('(')) {
      ++pos;
      a.has_args = true;
      if (!at_punct(')')) {
        a.args.push_back(parse_expr());
        while (eat_punct(',')) a.args.push_back(parse_expr());
      }
      expect_punct(')');
    }
    return a;
  }

  // ----- statements -----

  std::vector<DeclItem> parse_decl_items() {
    std::vector<DeclItem> items;
    do {
      DeclItem it;
      it.name = expect_name("a name");
      if (eat_punct('(')) {
        std::string attr = lower(expect_name("symmetry attribute"));
        if (attr == "symmetric")
          it.sym = Symmetry::Symmetric;
        else if (attr == "antisymmetric")
          it.sym = Symmetry::Antisymmetric;
        else
          fail_here("unknown attribute " + attr);
        expect_punct(')');
      }
      items.push_back(std::move(it));
    } while (eat_punct(','));
    expect_punct(';');
    return items;
  }

  std::vector<std::string> parse_name_list_semi() {
    std::vector<std::string> names;
    if (!at_punct(';')) {
      do {
        names.push_back(expect_name("a name"));
      } while (eat_punct(','));
    }
    expect_punct(';');
    return names;
  }

  Stmt parse_statement() {
    Stmt s;
    s.file = file;
    s.line = line();
    const Token& t = peek();
    if (t.kind != Token::Kind::Name) fail_here("expected a statement");
    std::string kw = lower(t.text);

    auto decl_list = [&](DeclKind k) {
      ++pos;
      DeclStmt d;
      d.kind = k;
      d.items = parse_decl_items();
      s.v = std::move(d);
      return s;
    };

    if (kw == "symbol" || kw == "symbols") return decl_list(DeclKind::Symbol);
    if (kw == "index" || kw == "indices") return decl_list(DeclKind::Index);
    if (kw == "function" || kw == "functions") return decl_list(DeclKind::Function);
    if (kw == "cfunction" || kw == "cfunctions")
      return decl_list(DeclKind::CFunction);
    if (kw == "ntensor" || kw == "ntensors") return decl_list(DeclKind::NTensor);
    if (kw == "ctensor" || kw == "ctensors") return decl_list(DeclKind::CTensor);

    if (kw == "autodeclare") {
      ++pos;
      std::string what = lower(expect_name("index"));
      if (what != "index" && what != "indices")
        fail_here("only autodeclare index is supported");
      DeclStmt d;
      d.kind = DeclKind::AutoIndex;
      d.items = parse_decl_items();
      s.v = std::move(d);
      return s;
    }

    if (kw == "dimension") {
      ++pos;
      DeclStmt d;
      d.kind = DeclKind::Dimension;
      if (peek().kind == Token::Kind::Number)
        d.dim_name = (toks[pos++].number).str();
      else
        d.dim_name = expect_name("a symbol or integer");
      expect_punct(';');
      s.v = std::move(d);
      return s;
    }

    if (kw == "set") {
      ++pos;
      DeclStmt d;
      d.kind = DeclKind::Set;
      d.set_name = expect_name("a set name");
      expect_punct(':');
      do {
        d.set_members.push_back(expect_name("a set member"));
      } while (eat_punct(','));
      expect_punct(';');
      s.v = std::move(d);
      return s;
    }

    if (kw == "polyratfun") {
      ++pos;
      DeclStmt d;
      d.kind = DeclKind::PolyRatFun;
      d.prf_head = expect_name("a function name");
      if (eat_punct('(')) {
        std::string mode = lower(expect_name("expand"));
        if (mode != "expand") fail_here("unknown PolyRatFun mode " + mode);
        d.prf_expand = true;
        expect_punct(',');
        d.prf_symbol = expect_name("a symbol");
        expect_punct(',');
        d.prf_order = (long)expect_number("an expansion order");
        expect_punct(')');
      }
      expect_punct(';');
      s.v = std::move(d);
      return s;
    }

    if (kw == "local") {
      ++pos;
      LocalStmt l;
      l.name = expect_name("an expression name");
      expect_punct('=');
      l.rhs = parse_expr();
      expect_punct(';');
      s.v = std::move(l);
      return s;
    }

    if (kw == "id") {
      ++pos;
      IdStmt d;
      if (at_keyword("once")) {
        ++pos;
        d.once = true;
      }
      SExpr lhs = parse_expr();
      if (lhs.prods.size() != 1 || lhs.prods[0].sign != 1)
        fail("the left-hand side of id must be a single product", s.line);
      d.lhs = std::move(lhs.prods[0]);
      expect_punct('=');
      d.rhs = parse_expr();
      expect_punct(';');
      s.v = std::move(d);
      return s;
    }

    if (kw == "sum") {
      ++pos;
      SumStmt d;
      d.names = parse_name_list_semi();
      if (d.names.empty()) fail("sum needs at least one index", s.line);
      s.v = std::move(d);
      return s;
    }

    if (kw == "repeat") {
      ++pos;
      RepeatStmt r;
      if (eat_punct(';')) {
        while (!at_keyword("endrepeat")) {
          if (peek().kind == Token::Kind::End)
            fail("repeat without endrepeat", s.line);
          if (peek().kind == Token::Kind::DotWord)
            fail_here("repeat blocks cannot cross a module boundary");
          r.body.push_back(parse_statement());
        }
        ++pos;  // endrepeat
        expect_punct(';');
      } else {
        r.body.push_back(parse_statement());
      }
      s.v = std::move(r);
      return s;
    }
    if (kw == "endrepeat") fail("endrepeat without repeat", s.line);

    if (kw == "if") {
      ++pos;
      IfOccursStmt d;
      expect_punct('(');
      std::string fn = lower(expect_name("occurs"));
      if (fn != "occurs") fail_here("only occurs(...) conditions are supported");
      expect_punct('(');
      do {
        d.names.push_back(expect_name("a name"));
      } while (eat_punct(','));
      expect_punct(')');
      expect_punct('=');
      d.target = (long)expect_number("0 or 1");
      expect_punct(')');
      if (eat_punct(';')) {
        while (!at_keyword("endif")) {
          if (peek().kind == Token::Kind::End)
            fail("if without endif", s.line);
          if (peek().kind == Token::Kind::DotWord)
            fail_here("if blocks cannot cross a module boundary");
          d.body.push_back(parse_statement());
        }
        ++pos;  // endif
        expect_punct(';');
      } else {
        d.body.push_back(parse_statement());
      }
      s.v = std::move(d);
      return s;
    }
    if (kw == "endif") fail("endif without if", s.line);

    if (kw == "hide" || kw == "unhide") {
      ++pos;
      HideStmt d;
      d.hide = kw == "hide";
      d.names = parse_name_list_semi();
      s.v = std::move(d);
      return s;
    }

    if (kw == "bracket") {
      ++pos;
      BracketStmt d;
      d.names = parse_name_list_semi();
      if (d.names.empty()) fail("bracket needs at least one name", s.line);
      s.v = std::move(d);
      return s;
    }

    if (kw == "print") {
      ++pos;
      PrintStmt d;
      if (eat_punct('+')) {
        std::string style = expect_name("a print style");
        if (style != "s") fail_here("unknown print style +" + style);
        d.plus_s = true;
      }
      expect_punct(';');
      s.v = std::move(d);
      return s;
    }

    if (kw == "format") {
      ++pos;
      FormatStmt d;
      d.width = (long)expect_number("a line width");
      if (d.width < 40) fail("format width below 40", s.line);
      expect_punct(';');
      s.v = std::move(d);
      return s;
    }

    fail("unknown statement " + t.text, s.line);
  }

  Program parse_program() {
    Program prog;
    Module cur;
    bool saw_end = false;
    while (peek().kind != Token::Kind::End) {
      if (saw_end) fail_here("statements after .end");
      if (peek().kind == Token::Kind::DotWord) {
        std::string word = lower(peek().text);
        int dotline = line();
        ++pos;
        eat_punct(';');
        if (word == "sort") {
          prog.modules.push_back(std::move(cur));
          cur = Module{};
        } else if (word == "end") {
          cur.is_end = true;
          prog.modules.push_back(std::move(cur));
          cur = Module{};
          saw_end = true;
        } else {
          fail("unknown module terminator ." + word, dotline);
        }
        continue;
      }
      cur.stmts.push_back(parse_statement());
    }
    if (!saw_end)
      fail("program must finish with .end", toks.empty() ? 0 : toks.back().line);
    return prog;
  }
};

}  // namespace

Program parse_program(const PreprocessedSource& src) {
  Lexer lex{src.file};
  for (const SourceLine& l : src.lines) lex.lex_line(l.text, l.origin);
  Parser p{src.file, std::move(lex.toks)};
  return p.parse_program();
}

SExpr parse_expression_text(const std::string& text, const std::string& file,
                            int line) {
  Lexer lex{file};
  lex.lex_line(text, line);
  Parser p{file, std::move(lex.toks)};
  SExpr e = p.parse_expr();
  if (p.peek().kind != Token::Kind::End)
    throw Error(ErrorKind::Syntax, "trailing input after expression", file, line);
  return e;
}

namespace {

void put_atom(std::string& out, const SAtom& a) {
  switch (a.kind) {
    case SAtom::Kind::Number:
      out += a.number.str();
      break;
    case SAtom::Kind::Internal:
      out += 'N';
      out += std::to_string(a.internal_ordinal);
      out += "_?";
      break;
    case SAtom::Kind::Paren:
      out += '(';
      out += to_text(a.sub.front());
      out += ')';
      break;
    case SAtom::Kind::Name:
      if (a.argfield) out += '?';
      out += a.name;
      if (a.wild) {
        out += '?';
        out += a.restrict_set;
        if (!a.replace_set.empty()) {
          out += '?';
          out += a.replace_set;
        }
      }
      if (a.has_args) {
        out += '(';
        for (size_t i = 0; i < a.args.size(); ++i) {
          if (i) out += ',';
          out += to_text(a.args[i]);
        }
        out += ')';
      }
      break;
  }
  if (a.exponent != 1) {
    out += '^';
    out += std::to_string(a.exponent);
  }
}

void put_names(std::string& out, const std::vector<std::string>& names) {
  for (size_t i = 0; i < names.size(); ++i) {
    if (i) out += ',';
    out += names[i];
  }
}

struct StmtPrinter {
  std::string out;

  void operator()(const DeclStmt& d) {
    switch (d.kind) {
      case DeclKind::Symbol: out += "symbol "; break;
      case DeclKind::Index: out += "index "; break;
      case DeclKind::AutoIndex: out += "autodeclare index "; break;
      case DeclKind::Function: out += "function "; break;
      case DeclKind::CFunction: out += "cfunction "; break;
      case DeclKind::NTensor: out += "ntensor "; break;
      case DeclKind::CTensor: out += "ctensor "; break;
      case DeclKind::Dimension:
        out += "dimension " + d.dim_name + ";";
        return;
      case DeclKind::Set: {
        out += "set " + d.set_name + ": ";
        put_names(out, d.set_members);
        out += ';';
        return;
      }
      case DeclKind::PolyRatFun:
        out += "polyratfun " + d.prf_head;
        if (d.prf_expand)
          out += "(expand," + d.prf_symbol + "," + std::to_string(d.prf_order) + ")";
        out += ';';
        return;
    }
    for (size_t i = 0; i < d.items.size(); ++i) {
      if (i) out += ',';
      out += d.items[i].name;
      if (d.items[i].sym == Symmetry::Symmetric) out += "(symmetric)";
      if (d.items[i].sym == Symmetry::Antisymmetric) out += "(antisymmetric)";
    }
    out += ';';
  }
  void operator()(const LocalStmt& l) {
    out += "local " + l.name + " = " + to_text(l.rhs) + ";";
  }
  void operator()(const IdStmt& d) {
    out += d.once ? "id once " : "id ";
    SExpr lhs;
    lhs.prods.push_back(d.lhs);
    out += to_text(lhs) + " = " + to_text(d.rhs) + ";";
  }
  void operator()(const SumStmt& d) {
    out += "sum ";
    put_names(out, d.names);
    out += ';';
  }
  void operator()(const RepeatStmt& r) {
    out += "repeat;\n";
    for (const Stmt& b : r.body) out += to_text(b) + "\n";
    out += "endrepeat;";
  }
  void operator()(const IfOccursStmt& d) {
    out += "if (occurs(";
    put_names(out, d.names);
    out += ")=" + std::to_string(d.target) + ");\n";
    for (const Stmt& b : d.body) out += to_text(b) + "\n";
    out += "endif;";
  }
  void operator()(const HideStmt& d) {
    out += d.hide ? "hide" : "unhide";
    if (!d.names.empty()) {
      out += ' ';
      put_names(out, d.names);
    }
    out += ';';
  }
  void operator()(const BracketStmt& d) {
    out += "bracket ";
    put_names(out, d.names);
    out += ';';
  }
  void operator()(const PrintStmt& d) { out += d.plus_s ? "print +s;" : "print;"; }
  void operator()(const FormatStmt& d) {
    out += "format " + std::to_string(d.width) + ";";
  }
};

}  // namespace

std::string to_text(const SExpr& e) {
  std::string out;
  for (size_t i = 0; i < e.prods.size(); ++i) {
    const SProd& p = e.prods[i];
    if (i == 0)
      out += p.sign < 0 ? "-" : "";
    else
      out += p.sign < 0 ? " - " : " + ";
    for (size_t k = 0; k < p.atoms.size(); ++k) {
      if (k) out += p.atoms[k].divides ? '/' : '*';
      put_atom(out, p.atoms[k]);
    }
  }
  return out;
}

std::string to_text(const Stmt& s) {
  StmtPrinter pr;
  std::visit(pr, s.v);
  return std::move(pr.out);
}

std::string to_text(const Program& p) {
  std::string out;
  for (const Module& m : p.modules) {
    for (const Stmt& s : m.stmts) out += to_text(s) + "\n";
    out += m.is_end ? ".end\n" : ".sort;\n";
  }
  return out;
}

}  // namespace formlet
