#include "formlet/exec.hpp"

#include <functional>
#include <string>
#include <vector>

#include "doctest.h"
#include "formlet/error.hpp"
#include "formlet/parser.hpp"
#include "formlet/preprocess.hpp"

using namespace formlet;

namespace {

struct RunResult {
  Session S;
  std::vector<OutputEvent> events;
};

RunResult run_src(const std::string& text,
                  const std::function<void(Session&)>& setup = {}) {
  RunResult r;
  if (setup) setup(r.S);
  Program p = parse_program(preprocess(text, "t.frm"));
  r.events = run_program(p, r.S);
  return r;
}

const OutputEvent& event(const RunResult& r, const std::string& name) {
  const OutputEvent* found = nullptr;
  for (const auto& e : r.events)
    if (e.name == name) found = &e;
  REQUIRE(found != nullptr);
  return *found;
}

bool expr_eq(const Expression& a, const Expression& b) {
  if (a.terms.size() != b.terms.size()) return false;
  for (size_t i = 0; i < a.terms.size(); ++i)
    if (!same_structure(a.terms[i], b.terms[i]) || a.terms[i].coeff != b.terms[i].coeff)
      return false;
  return true;
}

// Reference values written as source text and evaluated against the same
// declaration tables the program ended with.
Expression ref(RunResult& r, const std::string& src) {
  return evaluate_expression(parse_expression_text(src, "ref", 1), r.S.decls);
}

ErrorKind kind_of(const std::string& text) {
  try {
    run_src(text);
  } catch (const Error& e) {
    return e.kind();
  }
  REQUIRE(false);
  return ErrorKind::Internal;
}

const char* kIntro = R"(#-
symbol d,x;
dimension d;
index A,B;

function start,end,h;

ntensor X,I,Dhat,P;

local [X.P] = start*X(A)*P(A,B)*end;
sum A;

id P(A?,B?)*end = Dhat(A)*I(B)*end;
id X(A?)*Dhat(A?) = (1/2)*(h(0)-d);
id h(x?)*I(A?) = I(A)*h(x);
id h(x?)*end = end*(d+x);

print;
.end
)";

}  // namespace

TEST_CASE("tractor contraction program prints a zero expression") {
  RunResult r = run_src(kIntro);
  REQUIRE(r.events.size() == 1);
  CHECK(r.events[0].name == "[X.P]");
  CHECK(r.events[0].value.terms.empty());
  REQUIRE(r.events[0].lines.size() == 1);
  CHECK(r.events[0].lines[0] == "   [X.P] = 0;");
}

TEST_CASE("two runs of the same program produce identical output events") {
  RunResult a = run_src(kIntro);
  RunResult b = run_src(kIntro);
  REQUIRE(a.events.size() == b.events.size());
  for (size_t i = 0; i < a.events.size(); ++i) {
    CHECK(a.events[i].name == b.events[i].name);
    CHECK(a.events[i].lines == b.events[i].lines);
    CHECK(expr_eq(a.events[i].value, b.events[i].value));
  }
}

TEST_CASE("hidden expressions are readable on a local right-hand side but not rewritten") {
  RunResult r = run_src(R"(#-
symbol X,Y,Z;

local expr1 = X;
id X = Y;
.sort;
hide;
.sort;

local expr2 = Y + expr1;
id Y = Z;
.sort;
unhide;
.sort;
print;
.end
)");
  REQUIRE(r.events.size() == 2);
  CHECK(r.events[0].name == "expr1");  // creation order, not unhide order
  CHECK(r.events[1].name == "expr2");
  CHECK(expr_eq(event(r, "expr1").value, ref(r, "Y")));
  CHECK(expr_eq(event(r, "expr2").value, ref(r, "2*Z")));
  CHECK(event(r, "expr1").lines == std::vector<std::string>{"   expr1 = Y;"});
  CHECK(event(r, "expr2").lines == std::vector<std::string>{"   expr2 = 2*Z;"});
}

TEST_CASE("a procedure call splices its statements at the call site") {
  RunResult r = run_src(R"(#-
function A,B,C;

#procedure square()
id A = A*A;
id B = B*B;
id C = C*C;
#end procedure

local expr = A + B + C;
#call square()
print;
.end
)");
  CHECK(expr_eq(event(r, "expr").value, ref(r, "A*A + B*B + C*C")));
  CHECK(event(r, "expr").lines ==
        std::vector<std::string>{"   expr = A*A + B*B + C*C;"});
}

TEST_CASE("id once replaces only the leftmost instance per term") {
  RunResult r = run_src(R"(#-
function a,b;

local expr1 = a*a*a;
id a = b;
.sort;
hide expr1;
.sort;

local expr2 = a*a*a;
id once a = b;
.sort;
unhide;
.sort;
print;
.end
)");
  CHECK(expr_eq(event(r, "expr1").value, ref(r, "b*b*b")));
  CHECK(expr_eq(event(r, "expr2").value, ref(r, "b*a*a")));
}

TEST_CASE("paired sets replace each matched head by its partner") {
  RunResult r = run_src(R"(#-
ntensor T1,T2,T3,T4,U1,U2,U3,U4;
Set xyz:T1,T2,T3;
Set abc:U1,U2,U3;

local expr = T1 + T2 + T3 + T4;
id T1?xyz?abc = T1;
print;
.end
)");
  CHECK(expr_eq(event(r, "expr").value, ref(r, "U1 + U2 + U3 + T4")));
}

TEST_CASE("occurs filters per term, leaving the other terms untouched") {
  RunResult r = run_src(R"(#-
symbol x,y;
local expr = y*x^2 + y;
if (occurs(x)=1) id y = 1;
print;
.end
)");
  CHECK(expr_eq(event(r, "expr").value, ref(r, "x^2 + y")));

  RunResult r0 = run_src(R"(#-
symbol x,y;
local expr = y*x^2 + y;
if (occurs(x)=0) id y = 1;
print;
.end
)");
  CHECK(expr_eq(event(r0, "expr").value, ref(r0, "y*x^2 + 1")));
}

TEST_CASE("occurs sees heads and indices as well as symbols") {
  RunResult r = run_src(R"(#-
symbol y;
index A,B;
ntensor X,G;
local expr = y*X(A,B) + y*G(A,B);
if (occurs(X)=1) id y = 1;
print;
.end
)");
  CHECK(expr_eq(event(r, "expr").value, ref(r, "X(A,B) + y*G(A,B)")));

  RunResult r2 = run_src(R"(#-
symbol y;
index A,B;
ntensor X;
local expr = y*X(A,A) + y*X(B,B);
if (occurs(B)=1) id y = 1;
print;
.end
)");
  CHECK(expr_eq(event(r2, "expr").value, ref(r2, "y*X(A,A) + X(B,B)")));
}

TEST_CASE("a declared expansion turns the coefficient into a truncated series") {
  RunResult r = run_src(R"(#-
symbol x;
cfunction f;
PolyRatFun f(expand,x,3);

local expr = f(1,1-x);
print;
.end
)");
  CHECK(expr_eq(event(r, "expr").value, ref(r, "f(1+x+x^2+x^3)")));
  CHECK(event(r, "expr").lines ==
        std::vector<std::string>{"   expr = f(1 + x + x^2 + x^3);"});
}

TEST_CASE("rational-function factors multiply into the coefficient") {
  RunResult r = run_src(R"(#-
symbol a,b,x,y;
cfunction f;
PolyRatFun f;

local expr = f(x,y)*f(a,b);
print;
.end
)");
  CHECK(expr_eq(event(r, "expr").value, ref(r, "f(a*x,b*y)")));
  CHECK(event(r, "expr").lines == std::vector<std::string>{"   expr = f(a*x,b*y);"});
}

TEST_CASE("repeat reruns its body to a fixed point and counts the passes") {
  RunResult r = run_src(R"(#-
symbol d,x;
function start,end,h;

local T = start*h(0)*h(2)*end;
repeat id h(x?)*end = end*(d+x);
print;
.end
)");
  CHECK(expr_eq(event(r, "T").value, ref(r, "start*end*d^2 + 2*start*end*d")));
  // two changing passes plus the pass that confirms the fixed point
  CHECK(r.S.stats.repeat_passes == std::vector<int>{3});
}

TEST_CASE("repeat over an already-fixed expression makes exactly one pass") {
  RunResult r = run_src(R"(#-
function a,b;
local e = b;
repeat id a = b;
.end
)");
  CHECK(r.S.stats.repeat_passes == std::vector<int>{1});
}

TEST_CASE("a repeat that never converges stops at the pass cap") {
  try {
    run_src(R"(#-
function a,b;
local e = a;
repeat id a = a*b;
.end
)",
            [](Session& s) { s.repeat_cap = 25; });
    REQUIRE(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::RepeatDivergence);
    CHECK(e.line() == 4);
  }
}

TEST_CASE("block repeat and nested if execute together") {
  RunResult r = run_src(R"(#-
symbol x,n;
function g;

local e = g(3);
repeat;
if (occurs(g)=1) id g(x?) = n*g(x-1);
id g(0) = 1;
endrepeat;
print;
.end
)");
  CHECK(expr_eq(event(r, "e").value, ref(r, "n^3")));
}

TEST_CASE("hidden expressions are isolated from id statements") {
  RunResult r = run_src(R"(#-
function a,b;
local e1 = a;
local e2 = a;
.sort;
hide e1;
.sort;
id a = b;
.sort;
unhide;
.sort;
print;
.end
)");
  CHECK(expr_eq(event(r, "e1").value, ref(r, "a")));
  CHECK(expr_eq(event(r, "e2").value, ref(r, "b")));
}

TEST_CASE("hide and unhide accept explicit name lists") {
  RunResult r = run_src(R"(#-
function a,b;
local e1 = a;
local e2 = a;
local e3 = a;
.sort;
hide e1,e3;
.sort;
id a = b;
.sort;
unhide e1;
.sort;
id a = a*b;
.sort;
unhide;
.sort;
print;
.end
)");
  CHECK(expr_eq(event(r, "e1").value, ref(r, "a*b")));
  CHECK(expr_eq(event(r, "e2").value, ref(r, "b")));
  CHECK(expr_eq(event(r, "e3").value, ref(r, "a")));
}

TEST_CASE("an expression spliced twice gets fresh internal indices per copy") {
  RunResult r = run_src(R"(#-
index A;
ntensor X,Y;
local e1 = X(A)*Y(A);
sum A;
.sort;
local e2 = e1*e1;
print;
.end
)");
  CHECK(expr_eq(event(r, "e2").value,
                ref(r, "X(N1_?)*Y(N1_?)*X(N2_?)*Y(N2_?)")));
}

TEST_CASE("sum converts a paired bracketed index like any other") {
  RunResult r = run_src(R"(#-
index [a],[c];
ntensor X,Y;
local e = X([a],[c])*Y([c]);
sum [c];
print;
.end
)");
  CHECK(event(r, "e").lines ==
        std::vector<std::string>{"   e = X([a],N1_?)*Y(N1_?);"});
}

TEST_CASE("sum pairs a declared index into a fresh internal index") {
  RunResult r = run_src(R"(#-
index A,B;
ntensor X,Y;
local e = X(A,B)*Y(A);
sum A;
print;
.end
)");
  CHECK(expr_eq(event(r, "e").value, ref(r, "X(N1_?,B)*Y(N1_?)")));
  CHECK(event(r, "e").lines ==
        std::vector<std::string>{"   e = X(N1_?,B)*Y(N1_?);"});
}

TEST_CASE("internal numbering restarts at each module boundary") {
  RunResult r = run_src(R"(#-
index A,B;
ntensor X,Y;
local e = X(A)*Y(A);
sum A;
.sort;
local f = X(B)*Y(B);
sum B;
print;
.end
)");
  CHECK(event(r, "e").lines == std::vector<std::string>{"   e = X(N1_?)*Y(N1_?);"});
  CHECK(event(r, "f").lines == std::vector<std::string>{"   f = X(N1_?)*Y(N1_?);"});
}

TEST_CASE("an argument field carries any argument list across an id") {
  RunResult r = run_src(R"(#-
index A,B;
ntensor X,I;
local e = X(A,B) + X(A) + X;
id X(?A) = I(?A);
print;
.end
)");
  CHECK(expr_eq(event(r, "e").value, ref(r, "I(A,B) + I(A) + I")));
}

TEST_CASE("several argument fields can bracket single-argument wildcards") {
  RunResult r = run_src(R"(#-
index a,A,B,C;
ntensor w;
local e = w(A,B,A) + w(A,B,C);
id w(?X,a?,?Y,a?,?Z) = 0;
print;
.end
)");
  CHECK(expr_eq(event(r, "e").value, ref(r, "w(A,B,C)")));
}

TEST_CASE("argument fields splice into several replacement factors") {
  RunResult r = run_src(R"(#-
index a,b,A,B,E;
ntensor gb,w,n;
local e = gb(A,B)*w(E,B);
id gb(a?,b?)*w(?X,b?,?Y) = w(?X,a,?Y) - n(a)*n(b)*w(?X,b,?Y);
print;
.end
)");
  CHECK(expr_eq(event(r, "e").value, ref(r, "w(E,A) - n(A)*n(B)*w(E,B)")));
}

TEST_CASE("an id applied to a sum equals its termwise application") {
  const char* body = R"(
id a = b + c;
print;
.end
)";
  std::string decls = "#-\nfunction a,b,c;\n";
  RunResult whole = run_src(decls + "local e = a*a + b*a;" + body);
  RunResult first = run_src(decls + "local e = a*a;" + body);
  RunResult second = run_src(decls + "local e = b*a;" + body);
  Expression merged = first.events[0].value;
  merged.terms.insert(merged.terms.end(), second.events[0].value.terms.begin(),
                      second.events[0].value.terms.end());
  merged = normalize_expression(std::move(merged), whole.S.decls);
  CHECK(expr_eq(event(whole, "e").value, merged));
}

TEST_CASE("print renders every active expression in creation order") {
  RunResult r = run_src(R"(#-
symbol x;
local b = x;
local a = x;
print;
.end
)");
  REQUIRE(r.events.size() == 2);
  CHECK(r.events[0].name == "b");
  CHECK(r.events[1].name == "a");
}

TEST_CASE("term-per-line layout prints one signed term per line") {
  RunResult r = run_src(R"(#-
cfunction k;
function K;
local e = k*k*k - K*K;
print +s;
.end
)");
  CHECK(event(r, "e").lines ==
        std::vector<std::string>{"   e =", "       + k^3", "       - K*K", "      ;"});
}

TEST_CASE("a declared rational head shows every term-per-line coefficient") {
  RunResult r = run_src(R"(#-
symbol d;
cfunction k,drat;
PolyRatFun drat;
local e = 3*k - d*k*k;
print +s;
.end
)");
  // d is a symbol, not a rational-function argument, so it stays in the term
  CHECK(event(r, "e").lines ==
        std::vector<std::string>{"   e =", "       + k*drat(3,1)",
                                 "       + k^2*d*drat(-1,1)", "      ;"});
}

TEST_CASE("bracketed heads factor out in front of their group") {
  RunResult r = run_src(R"(#-
function circ,top,K;
ntensor G;
index [a];
local e = circ*top*K*G([a]) + circ*top*K*K;
bracket circ,top;
print +s;
.end
)");
  CHECK(event(r, "e").lines ==
        std::vector<std::string>{"   e =", "", "       + circ*top * (",
                                 "          + K*K", "          + K*G([a])",
                                 "          );"});
}

TEST_CASE("terms without the bracketed heads print before any group") {
  RunResult r = run_src(R"(#-
function circ,K;
local e = circ*K + K;
bracket circ;
print +s;
.end
)");
  CHECK(event(r, "e").lines ==
        std::vector<std::string>{"   e =", "", "       + K", "       + circ * (",
                                 "          + K", "          );"});
}

TEST_CASE("format narrows the wrap column of the one-line layout") {
  RunResult r = run_src(R"(#-
function alpha,beta,gamma;
local e = alpha*beta*gamma + beta*alpha*gamma + gamma*alpha*beta;
format 40;
print;
.end
)");
  const auto& lines = event(r, "e").lines;
  REQUIRE(lines.size() > 1);
  for (const auto& l : lines) CHECK(l.size() <= 40);
  for (size_t i = 1; i < lines.size(); ++i) CHECK(lines[i].rfind("      ", 0) == 0);
}

TEST_CASE("the wrap width persists across module boundaries") {
  RunResult r = run_src(R"(#-
function alpha,beta,gamma;
local e = alpha*beta*gamma + beta*alpha*gamma;
format 40;
.sort;
print;
.end
)");
  for (const auto& l : event(r, "e").lines) CHECK(l.size() <= 40);
}

TEST_CASE("an empty program and declaration-only modules emit nothing") {
  CHECK(run_src("#-\n.end\n").events.empty());
  CHECK(run_src("#-\nsymbol x;\n.sort;\n.sort;\n.end\n").events.empty());
}

TEST_CASE("local e = 0 stores an expression with no terms") {
  RunResult r = run_src(R"(#-
local e = 0;
print;
.end
)");
  CHECK(event(r, "e").value.terms.empty());
  CHECK(event(r, "e").lines == std::vector<std::string>{"   e = 0;"});
}

TEST_CASE("statement errors carry the statement location") {
  try {
    run_src("#-\nsymbol x;\nlocal e = x;\nid y? = x;\n.end\n");
    REQUIRE(false);
  } catch (const Error& e) {
    CHECK(e.line() == 4);
    CHECK(e.file() == "t.frm");
  }
}

TEST_CASE("executable statement failure modes") {
  CHECK(kind_of("#-\nsymbol x;\nlocal e = y;\n.end\n") == ErrorKind::UndeclaredName);
  CHECK(kind_of("#-\nsymbol x;\nlocal e = x;\nlocal e = x;\n.end\n") ==
        ErrorKind::DuplicateName);
  CHECK(kind_of("#-\nsymbol x;\nlocal x = 1;\n.end\n") == ErrorKind::DuplicateName);
  CHECK(kind_of("#-\nhide e;\n.end\n") == ErrorKind::UndeclaredName);
  CHECK(kind_of("#-\nsymbol x;\nunhide e;\n.end\n") == ErrorKind::UndeclaredName);
  CHECK(kind_of("#-\nfunction f;\nPolyRatFun f;\n.end\n") == ErrorKind::BadDeclaration);
  CHECK(kind_of("#-\nPolyRatFun f;\n.end\n") == ErrorKind::UndeclaredName);
  CHECK(kind_of("#-\ncfunction f;\nPolyRatFun f(expand,x,3);\n.end\n") ==
        ErrorKind::UndeclaredName);
  CHECK(kind_of("#-\ndimension q;\n.end\n") == ErrorKind::BadDeclaration);
  CHECK(kind_of("#-\nindex [a];\nntensor X;\nlocal e = X([a]);\nsum [a];\n.end\n") ==
        ErrorKind::IndexArityViolation);
  CHECK(kind_of("#-\nindex A;\nntensor X;\nlocal e = X(A);\nsum A;\n.end\n") ==
        ErrorKind::IndexArityViolation);
  CHECK(kind_of("#-\nsymbol x;\nlocal e = x;\nrepeat local f = x;\n.end\n") ==
        ErrorKind::Syntax);
  CHECK(kind_of("#-\nsymbol x;\nlocal e = x;\nif (occurs(x)=1) print;\n.end\n") ==
        ErrorKind::Syntax);
  CHECK(kind_of("#-\nsymbol x;\nlocal e = x;\nif (occurs(q)=1) id x = 1;\n.end\n") ==
        ErrorKind::UndeclaredName);
  CHECK(kind_of("#-\nntensor T1,T2;\nlocal e = T1;\nid T1?xyz = T2;\n.end\n") ==
        ErrorKind::UndeclaredName);
  CHECK(kind_of("#-\nntensor T1,T2,U1;\nSet a:T1,T2;\nSet b:U1;\nlocal e = T1;\n"
                "id T1?a?b = T1;\n.end\n") == ErrorKind::BadPattern);
  CHECK(kind_of("#-\nfunction f;\nlocal e = f;\nlocal g = f;\nid f = g;\n.end\n") ==
        ErrorKind::UndeclaredName);
  CHECK(kind_of("#-\nsymbol x;\nbracket x;\n.end\n") == ErrorKind::UndeclaredName);
  CHECK(kind_of("#-\nfunction f;\nlocal e = f;\nid 2*f = f;\n.end\n") ==
        ErrorKind::BadPattern);
  CHECK(kind_of("#-\nsymbol x;\nlocal e = x/x;\n.end\n") == ErrorKind::Syntax);
  CHECK(kind_of("#-\nlocal e = 1/0;\n.end\n") == ErrorKind::DivisionByZero);
}

TEST_CASE("sets may repeat a member") {
  RunResult r = run_src(R"(#-
cfunction k,j;
Set both:k,k,j;
local e = k + j;
id k?both = k*k;
print;
.end
)");
  CHECK(expr_eq(event(r, "e").value, ref(r, "k^2 + j^2")));
}

TEST_CASE("dimension accepts an integer literal") {
  RunResult r = run_src(R"(#-
index A,B;
dimension 4;
local e = d_(A,A);
print;
.end
)");
  CHECK(expr_eq(event(r, "e").value, ref(r, "4")));
}

TEST_CASE("a contracted delta picks up the symbolic dimension") {
  RunResult r = run_src(R"(#-
symbol d;
dimension d;
index A;
local e = d_(A,A);
print;
.end
)");
  CHECK(expr_eq(event(r, "e").value, ref(r, "d")));
  CHECK(event(r, "e").lines == std::vector<std::string>{"   e = d;"});
}
