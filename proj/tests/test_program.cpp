#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include "formlet/error.hpp"
#include "formlet/parser.hpp"
#include "formlet/preprocess.hpp"
#include "randgen.hpp"

using namespace formlet;

namespace {

PreprocessedSource pp(const std::string& text) { return preprocess(text, "t.frm"); }

Program parse(const std::string& text) { return parse_program(pp(text)); }

ErrorKind kind_of(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Internal;
}

const char* kIntro =
    "#-\n"
    "symbol d,x;\n"
    "dimension d;\n"
    "index A,B;\n"
    "\n"
    "function start,end,h;\n"
    "\n"
    "ntensor X,I,Dhat,P;\n"
    "\n"
    "local [X.P] = start*X(A)*P(A,B)*end;\n"
    "sum A;\n"
    "\n"
    "id P(A?,B?)*end = Dhat(A)*I(B)*end;\n"
    "id X(A?)*Dhat(A?) = (1/2)*(h(0)-d);\n"
    "id h(x?)*I(A?) = I(A)*h(x);\n"
    "id h(x?)*end = end*(d+x);\n"
    "\n"
    "print;\n"
    ".end\n";

}  // namespace

TEST_CASE("preprocessor substitutes variables when a line is emitted") {
  PreprocessedSource src = pp(
      "#define dpp \"d\"\n"
      "id d = drat('dpp'+x,1);\n");
  REQUIRE(src.lines.size() == 1);
  CHECK(src.lines[0].text == "id d = drat(d+x,1);");
  CHECK(src.lines[0].origin == 2);

  // redefinition wins for later lines, including spliced procedure bodies
  src = pp(
      "#define v \"1\"\n"
      "#procedure use()\n"
      "id a = 'v';\n"
      "#endprocedure\n"
      "#call use()\n"
      "#define v \"2\"\n"
      "#call use()\n");
  REQUIRE(src.lines.size() == 2);
  CHECK(src.lines[0].text == "id a = 1;");
  CHECK(src.lines[1].text == "id a = 2;");
  CHECK(src.lines[0].origin == 3);
  CHECK(src.lines[1].origin == 3);
}

TEST_CASE("preprocessor passes directive-free text through unchanged") {
  const char* text =
      "symbol a;\n"
      "* a full-line comment\n"
      "local e = a;\n"
      "\n"
      "  * indented star is not a comment\n"
      "print;\n"
      ".end\n";
  PreprocessedSource src = pp(text);
  REQUIRE(src.lines.size() == 5);
  CHECK(src.lines[0].text == "symbol a;");
  CHECK(src.lines[1].text == "local e = a;");
  CHECK(src.lines[2].text == "  * indented star is not a comment");
  CHECK(src.lines[3].text == "print;");
  CHECK(src.lines[4].text == ".end");
  CHECK(src.lines[1].origin == 3);
}

TEST_CASE("procedure bodies splice at the call site") {
  PreprocessedSource src = pp(
      "#-\n"
      "function A,B,C;\n"
      "\n"
      "#procedure square()\n"
      "id A = A*A;\n"
      "id B = B*B;\n"
      "id C = C*C;\n"
      "#end procedure\n"
      "\n"
      "local expr = A + B + C;\n"
      "#call square()\n"
      "print;\n"
      ".end\n");
  std::vector<std::string> texts;
  for (const SourceLine& l : src.lines) texts.push_back(l.text);
  CHECK(texts == std::vector<std::string>{"function A,B,C;",
                                          "local expr = A + B + C;",
                                          "id A = A*A;", "id B = B*B;",
                                          "id C = C*C;", "print;", ".end"});
  CHECK(src.lines[2].origin == 5);
  CHECK(src.lines[4].origin == 7);

  // calls nest, and the prose spelling with a trailing colon is accepted
  src = pp(
      "#procedure inner():\n"
      "id p = q;\n"
      "#endprocedure\n"
      "#procedure outer()\n"
      "#call inner()\n"
      "id q = r;\n"
      "#endprocedure\n"
      "#call outer()\n");
  REQUIRE(src.lines.size() == 2);
  CHECK(src.lines[0].text == "id p = q;");
  CHECK(src.lines[1].text == "id q = r;");
}

TEST_CASE("preprocessor failure modes") {
  auto pp_kind = [](const std::string& text) {
    try {
      pp(text);
    } catch (const Error& e) {
      return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::Internal;
  };
  CHECK(pp_kind("id a = 'nope';\n") == ErrorKind::UnknownPreprocessorVariable);
  CHECK(pp_kind("#call nope()\n") == ErrorKind::UnknownProcedure);
  CHECK(pp_kind("#procedure p()\nid a = b;\n") == ErrorKind::UnterminatedProcedure);
  CHECK(pp_kind("#procedure loop()\n#call loop()\n#endprocedure\n#call loop()\n") ==
        ErrorKind::RecursionDepthExceeded);
  CHECK(pp_kind("#endprocedure\n") == ErrorKind::Syntax);
  CHECK(pp_kind("#do i=1,5\n") == ErrorKind::Syntax);
  CHECK(pp_kind("#define x\n") == ErrorKind::Syntax);
  CHECK(pp_kind("id a = 'unterminated;\n") == ErrorKind::Syntax);
  // a procedure definition inside a spliced body cannot nest
  CHECK(pp_kind("#procedure outer()\n#procedure inner()\n#endprocedure\n"
                "#endprocedure\n#call outer()\n") == ErrorKind::Syntax);
}

TEST_CASE("statement shapes of a full program") {
  Program prog = parse(kIntro);
  REQUIRE(prog.modules.size() == 1);
  const Module& m = prog.modules[0];
  CHECK(m.is_end);
  REQUIRE(m.stmts.size() == 12);

  auto& d0 = std::get<DeclStmt>(m.stmts[0].v);
  CHECK(d0.kind == DeclKind::Symbol);
  REQUIRE(d0.items.size() == 2);
  CHECK(d0.items[0].name == "d");
  CHECK(d0.items[1].name == "x");

  auto& d1 = std::get<DeclStmt>(m.stmts[1].v);
  CHECK(d1.kind == DeclKind::Dimension);
  CHECK(d1.dim_name == "d");

  CHECK(std::get<DeclStmt>(m.stmts[2].v).kind == DeclKind::Index);
  CHECK(std::get<DeclStmt>(m.stmts[3].v).kind == DeclKind::Function);
  auto& d4 = std::get<DeclStmt>(m.stmts[4].v);
  CHECK(d4.kind == DeclKind::NTensor);
  REQUIRE(d4.items.size() == 4);
  CHECK(d4.items[3].name == "P");

  auto& loc = std::get<LocalStmt>(m.stmts[5].v);
  CHECK(loc.name == "[X.P]");
  REQUIRE(loc.rhs.prods.size() == 1);
  const SProd& p = loc.rhs.prods[0];
  REQUIRE(p.atoms.size() == 4);
  CHECK(p.atoms[0].name == "start");
  CHECK_FALSE(p.atoms[0].has_args);
  CHECK(p.atoms[1].name == "X");
  REQUIRE(p.atoms[1].args.size() == 1);
  CHECK(p.atoms[1].args[0].prods[0].atoms[0].name == "A");
  CHECK_FALSE(p.atoms[1].args[0].prods[0].atoms[0].wild);
  CHECK(p.atoms[2].args.size() == 2);
  CHECK(m.stmts[5].line == 10);

  auto& sum = std::get<SumStmt>(m.stmts[6].v);
  CHECK(sum.names == std::vector<std::string>{"A"});

  auto& id0 = std::get<IdStmt>(m.stmts[7].v);
  CHECK_FALSE(id0.once);
  REQUIRE(id0.lhs.atoms.size() == 2);
  CHECK(id0.lhs.atoms[0].name == "P");
  CHECK(id0.lhs.atoms[0].args[0].prods[0].atoms[0].wild);
  CHECK(id0.lhs.atoms[1].name == "end");

  // rhs of the second id: (1/2)*(h(0)-d)
  auto& id1 = std::get<IdStmt>(m.stmts[8].v);
  REQUIRE(id1.rhs.prods.size() == 1);
  const SProd& r = id1.rhs.prods[0];
  REQUIRE(r.atoms.size() == 2);
  CHECK(r.atoms[0].kind == SAtom::Kind::Paren);
  const SProd& half = r.atoms[0].sub[0].prods[0];
  REQUIRE(half.atoms.size() == 2);
  CHECK(half.atoms[0].number == 1);
  CHECK(half.atoms[1].number == 2);
  CHECK(half.atoms[1].divides);
  const SExpr& diff = r.atoms[1].sub[0];
  REQUIRE(diff.prods.size() == 2);
  CHECK(diff.prods[1].sign == -1);
  CHECK(diff.prods[1].atoms[0].name == "d");

  CHECK_FALSE(std::get<PrintStmt>(m.stmts[11].v).plus_s);
}

TEST_CASE("declaration forms") {
  Program prog = parse(
      "symbols a,b;\n"
      "indices i,j;\n"
      "functions f;\n"
      "cfunctions drat;\n"
      "ntensors nt;\n"
      "ctensors g(symmetric),W2(antisymmetric),nC;\n"
      "autodeclare index a,b,[a],[b];\n"
      "set xyz: T1,T2,T3;\n"
      "dimension 4;\n"
      "PolyRatFun drat(expand,x,3);\n"
      ".end\n");
  const auto& st = prog.modules[0].stmts;
  CHECK(std::get<DeclStmt>(st[0].v).kind == DeclKind::Symbol);
  CHECK(std::get<DeclStmt>(st[1].v).kind == DeclKind::Index);
  CHECK(std::get<DeclStmt>(st[2].v).kind == DeclKind::Function);
  CHECK(std::get<DeclStmt>(st[3].v).kind == DeclKind::CFunction);
  CHECK(std::get<DeclStmt>(st[4].v).kind == DeclKind::NTensor);

  auto& ct = std::get<DeclStmt>(st[5].v);
  CHECK(ct.kind == DeclKind::CTensor);
  CHECK(ct.items[0].sym == Symmetry::Symmetric);
  CHECK(ct.items[1].sym == Symmetry::Antisymmetric);
  CHECK(ct.items[2].sym == Symmetry::None);

  auto& ai = std::get<DeclStmt>(st[6].v);
  CHECK(ai.kind == DeclKind::AutoIndex);
  REQUIRE(ai.items.size() == 4);
  CHECK(ai.items[2].name == "[a]");

  auto& set = std::get<DeclStmt>(st[7].v);
  CHECK(set.set_name == "xyz");
  CHECK(set.set_members == std::vector<std::string>{"T1", "T2", "T3"});

  CHECK(std::get<DeclStmt>(st[8].v).dim_name == "4");

  auto& prf = std::get<DeclStmt>(st[9].v);
  CHECK(prf.prf_head == "drat");
  CHECK(prf.prf_expand);
  CHECK(prf.prf_symbol == "x");
  CHECK(prf.prf_order == 3);

  auto& plain = std::get<DeclStmt>(
      parse("PolyRatFun drat;\n.end\n").modules[0].stmts[0].v);
  CHECK_FALSE(plain.prf_expand);
}

TEST_CASE("empty modules and module splitting") {
  Program prog = parse(".sort;\n.end\n");
  REQUIRE(prog.modules.size() == 2);
  CHECK(prog.modules[0].stmts.empty());
  CHECK_FALSE(prog.modules[0].is_end);
  CHECK(prog.modules[1].is_end);

  prog = parse("symbol a;\n.sort\nlocal e = a;\n.sort;\n.end;\n");
  REQUIRE(prog.modules.size() == 3);
  CHECK(prog.modules[1].stmts.size() == 1);
}

TEST_CASE("bracket names are atomic with inner whitespace stripped") {
  Program prog = parse(
      "ntensor [del, del],[d^n^],[1/h],[delta2-q(T)];\n"
      "local e = [del, del]*[1/h](x);\n"
      ".end\n");
  auto& d = std::get<DeclStmt>(prog.modules[0].stmts[0].v);
  REQUIRE(d.items.size() == 4);
  CHECK(d.items[0].name == "[del,del]");
  CHECK(d.items[1].name == "[d^n^]");
  CHECK(d.items[2].name == "[1/h]");
  CHECK(d.items[3].name == "[delta2-q(T)]");

  auto& loc = std::get<LocalStmt>(prog.modules[0].stmts[1].v);
  const SProd& p = loc.rhs.prods[0];
  CHECK(p.atoms[0].name == "[del,del]");
  CHECK(p.atoms[1].name == "[1/h]");
  REQUIRE(p.atoms[1].args.size() == 1);
}

TEST_CASE("wildcard suffixes and argument fields") {
  Program prog = parse(
      "id T1?xyz?abc = T1;\n"
      "id X(?A,B?) = Y(?A);\n"
      "id once dn^2 = dn*n(a)*del(a);\n"
      "repeat id GenTenNN?*circ = circ*GenTenNN;\n"
      ".end\n");
  const auto& st = prog.modules[0].stmts;

  auto& paired = std::get<IdStmt>(st[0].v).lhs.atoms[0];
  CHECK(paired.wild);
  CHECK(paired.restrict_set == "xyz");
  CHECK(paired.replace_set == "abc");
  CHECK_FALSE(paired.has_args);

  auto& argf = std::get<IdStmt>(st[1].v);
  const SAtom& x = argf.lhs.atoms[0];
  REQUIRE(x.args.size() == 2);
  CHECK(x.args[0].prods[0].atoms[0].argfield);
  CHECK(x.args[0].prods[0].atoms[0].name == "A");
  CHECK(x.args[1].prods[0].atoms[0].wild);
  CHECK(argf.rhs.prods[0].atoms[0].args[0].prods[0].atoms[0].argfield);

  auto& once = std::get<IdStmt>(st[2].v);
  CHECK(once.once);
  CHECK(once.lhs.atoms[0].exponent == 2);

  auto& rep = std::get<RepeatStmt>(st[3].v);
  REQUIRE(rep.body.size() == 1);
  auto& bare = std::get<IdStmt>(rep.body[0].v).lhs.atoms[0];
  CHECK(bare.wild);
  CHECK(bare.restrict_set.empty());
  CHECK_FALSE(bare.has_args);
}

TEST_CASE("internal index tokens") {
  SExpr e = parse_expression_text("T(N1_?)*U(N10_?)", "t", 1);
  const SProd& p = e.prods[0];
  const SAtom& a = p.atoms[0].args[0].prods[0].atoms[0];
  CHECK(a.kind == SAtom::Kind::Internal);
  CHECK(a.internal_ordinal == 1);
  CHECK(p.atoms[1].args[0].prods[0].atoms[0].internal_ordinal == 10);

  // without the trailing ? this is an ordinary identifier
  SExpr plain = parse_expression_text("N1_", "t", 1);
  CHECK(plain.prods[0].atoms[0].kind == SAtom::Kind::Name);
  CHECK(plain.prods[0].atoms[0].name == "N1_");

  // golden lines lead with a sign
  SExpr g = parse_expression_text("+ k^2*drat(31,18)", "t", 1);
  REQUIRE(g.prods.size() == 1);
  CHECK(g.prods[0].atoms[0].exponent == 2);

  CHECK_THROWS_AS(parse_expression_text("a b", "t", 1), Error);
}

TEST_CASE("repeat and if blocks") {
  Program prog = parse(
      "repeat;\n"
      "id a = b;\n"
      "if (occurs(circ,top)=1);\n"
      "id b = c;\n"
      "sum A;\n"
      "endif;\n"
      "endrepeat;\n"
      "if (occurs(d)=0) id c = e;\n"
      ".end\n");
  const auto& st = prog.modules[0].stmts;
  auto& rep = std::get<RepeatStmt>(st[0].v);
  REQUIRE(rep.body.size() == 2);
  auto& cond = std::get<IfOccursStmt>(rep.body[1].v);
  CHECK(cond.names == std::vector<std::string>{"circ", "top"});
  CHECK(cond.target == 1);
  REQUIRE(cond.body.size() == 2);

  auto& inl = std::get<IfOccursStmt>(st[1].v);
  CHECK(inl.target == 0);
  REQUIRE(inl.body.size() == 1);
}

TEST_CASE("output control statements") {
  Program prog = parse(
      "hide;\n"
      "hide expr1,[X.P];\n"
      "unhide;\n"
      "bracket circ,top;\n"
      "print +s;\n"
      "Format 200;\n"
      ".end\n");
  const auto& st = prog.modules[0].stmts;
  CHECK(std::get<HideStmt>(st[0].v).names.empty());
  CHECK(std::get<HideStmt>(st[1].v).names ==
        std::vector<std::string>{"expr1", "[X.P]"});
  CHECK_FALSE(std::get<HideStmt>(st[2].v).hide);
  CHECK(std::get<BracketStmt>(st[3].v).names ==
        std::vector<std::string>{"circ", "top"});
  CHECK(std::get<PrintStmt>(st[4].v).plus_s);
  CHECK(std::get<FormatStmt>(st[5].v).width == 200);
}

TEST_CASE("keywords are case-insensitive, names are not") {
  Program prog = parse(
      "Symbol d,X;\n"
      "LOCAL expr = X*d;\n"
      "Print;\n"
      ".END\n");
  CHECK(prog.modules[0].is_end);
  auto& loc = std::get<LocalStmt>(prog.modules[0].stmts[1].v);
  CHECK(loc.rhs.prods[0].atoms[0].name == "X");
}

TEST_CASE("malformed programs are rejected") {
  CHECK(kind_of("id a + b = c;\n.end\n") == ErrorKind::Syntax);
  CHECK(kind_of("id -a = c;\n.end\n") == ErrorKind::Syntax);
  CHECK(kind_of("endrepeat;\n.end\n") == ErrorKind::Syntax);
  CHECK(kind_of("repeat;\nid a = b;\n.end\n") == ErrorKind::Syntax);
  CHECK(kind_of("repeat;\nid a = b;\n.sort;\nendrepeat;\n.end\n") ==
        ErrorKind::Syntax);
  CHECK(kind_of("if (occurs(a)=1);\nid a = b;\n.end\n") == ErrorKind::Syntax);
  CHECK(kind_of("print;\n") == ErrorKind::Syntax);
  CHECK(kind_of(".end\nprint;\n") == ErrorKind::Syntax);
  CHECK(kind_of("frobnicate a;\n.end\n") == ErrorKind::Syntax);
  CHECK(kind_of("sum;\n.end\n") == ErrorKind::Syntax);
  CHECK(kind_of("Format 30;\n.end\n") == ErrorKind::Syntax);
  CHECK(kind_of("local e = ;\n.end\n") == ErrorKind::Syntax);
  CHECK(kind_of("local e = a\n.end\n") == ErrorKind::Syntax);
  CHECK(kind_of("ctensor q(orthogonal);\n.end\n") == ErrorKind::Syntax);
  CHECK(kind_of(".shuffle;\n.end\n") == ErrorKind::Syntax);

  // errors carry the origin line
  try {
    parse("symbol a;\nlocal e = ;\n.end\n");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.line() == 2);
    CHECK(e.file() == "t.frm");
  }
}

TEST_CASE("printed programs reparse to the same text") {
  auto fixpoint = [](const std::string& src) {
    std::string one = to_text(parse(src));
    std::string two = to_text(parse(one));
    CHECK(one == two);
  };
  fixpoint(kIntro);
  fixpoint(
      "#define dpp \"d\"\n"
      "symbol d,x,w;\n"
      "dimension d;\n"
      "autodeclare index a,b,[a];\n"
      "function start,end,h;\n"
      "cfunction drat;\n"
      "ntensor X,dn,circ,top;\n"
      "ctensor g(symmetric),W2(antisymmetric),nC;\n"
      "set xyz: T1,T2,T3;\n"
      "set abc: U1,U2,U3;\n"
      "PolyRatFun drat(expand,x,3);\n"
      "local [X.P] = start*X(a)*end - (1/2)*h(2*(w-2)+x)^2;\n"
      "sum a,b;\n"
      "id once T1?xyz?abc*X(?A,B?) = T1*X(?A)/3;\n"
      "repeat;\n"
      "id h(x?)*end = end*(d+x);\n"
      "if (occurs(d)=0);\n"
      "id X(A?)*dn = (1/2)*(h(0)-d);\n"
      "endif;\n"
      "endrepeat;\n"
      "repeat id GenTenNN?*circ = circ*GenTenNN;\n"
      "id d = drat('dpp',1);\n"
      "hide [X.P];\n"
      ".sort;\n"
      "unhide;\n"
      "bracket circ,top;\n"
      "Format 200;\n"
      "print +s;\n"
      ".end\n");
}

TEST_CASE("random expressions survive a print and reparse") {
  testing::Rng rng(0x9e3779b97f4a7c15ull);
  const std::vector<std::string> names = {"a",  "bb",   "C3",  "[X.P]",
                                          "dn", "[1/h]", "N1_", "w"};

  // depth-bounded random surface expression
  struct Gen {
    testing::Rng& rng;
    const std::vector<std::string>& names;
    int pick(int lo, int hi) { return testing::rand_int(rng, lo, hi); }

    SExpr expr(int depth) {
      SExpr e;
      int nprods = pick(1, 3);
      for (int i = 0; i < nprods; ++i) e.prods.push_back(prod(depth));
      return e;
    }
    SProd prod(int depth) {
      SProd p;
      p.sign = pick(0, 3) ? 1 : -1;
      int n = pick(1, 3);
      for (int i = 0; i < n; ++i) p.atoms.push_back(atom(depth, i > 0));
      return p;
    }
    SAtom atom(int depth, bool may_divide) {
      SAtom a;
      a.divides = may_divide && pick(0, 3) == 0;
      int what = pick(0, depth > 0 ? 9 : 6);
      if (what <= 1) {
        a.kind = SAtom::Kind::Number;
        a.number = pick(0, 99);
      } else if (what == 2) {
        a.kind = SAtom::Kind::Internal;
        a.internal_ordinal = pick(1, 12);
      } else if (what <= 6) {
        a.kind = SAtom::Kind::Name;
        a.name = names[pick(0, (int)names.size() - 1)];
        int suffix = pick(0, 5);
        // a ? after a name of internal shape lexes as an internal index
        if (a.name == "N1_" && (suffix == 1 || suffix == 2)) suffix = 0;
        if (suffix == 1) {
          a.wild = true;
        } else if (suffix == 2) {
          a.wild = true;
          a.restrict_set = "xyz";
          if (pick(0, 1)) a.replace_set = "abc";
        } else if (suffix == 3) {
          a.argfield = true;
        }
        if (!a.argfield && depth > 0 && pick(0, 1)) {
          a.has_args = true;
          int nargs = pick(0, 3);
          for (int i = 0; i < nargs; ++i) a.args.push_back(expr(depth - 1));
        }
      } else {
        a.kind = SAtom::Kind::Paren;
        a.sub.push_back(expr(depth - 1));
      }
      if (pick(0, 4) == 0) a.exponent = pick(2, 5);
      return a;
    }
  } gen{rng, names};

  for (int trial = 0; trial < 2000; ++trial) {
    SExpr e = gen.expr(2);
    std::string one = to_text(e);
    std::string two = to_text(parse_expression_text(one, "t", 1));
    CHECK(one == two);
    if (one != two) break;
  }
}
