#pragma once

#include <string>
#include <variant>
#include <vector>

#include "formlet/bigint.hpp"
#include "formlet/decls.hpp"
#include "formlet/preprocess.hpp"

namespace formlet {

// Surface expression grammar, names unresolved.  Statements are compiled
// against the live declaration tables when they first execute, so the parser
// only has to get the shape right.

struct SExpr;

struct SAtom {
  enum class Kind { Number, Name, Internal, Paren };
  Kind kind = Kind::Number;

  Int number = 0;  // Number

  std::string name;          // Name: identifier or [bracket-name]
  bool wild = false;         // trailing ?
  std::string restrict_set;  // T1?xyz
  std::string replace_set;   // T1?xyz?abc
  bool argfield = false;     // leading ?, as in ?A
  bool has_args = false;     // parenthesized argument list present
  std::vector<SExpr> args;

  int internal_ordinal = 0;  // Internal: Nk_?

  std::vector<SExpr> sub;  // Paren: exactly one element

  long exponent = 1;
  bool divides = false;  // atom was introduced by '/'
};

struct SProd {
  int sign = 1;
  std::vector<SAtom> atoms;
};

struct SExpr {
  std::vector<SProd> prods;
};

enum class DeclKind {
  Symbol,
  Dimension,
  Index,
  AutoIndex,
  Function,
  CFunction,
  NTensor,
  CTensor,
  Set,
  PolyRatFun
};

struct DeclItem {
  std::string name;
  Symmetry sym = Symmetry::None;
};

struct DeclStmt {
  DeclKind kind = DeclKind::Symbol;
  std::vector<DeclItem> items;  // names for the list-style declarations

  std::string set_name;  // Set
  std::vector<std::string> set_members;

  std::string prf_head;  // PolyRatFun
  bool prf_expand = false;
  std::string prf_symbol;
  long prf_order = 0;

  std::string dim_name;  // Dimension: symbol name or integer text
};

struct LocalStmt {
  std::string name;
  SExpr rhs;
};

struct IdStmt {
  bool once = false;
  SProd lhs;
  SExpr rhs;
};

struct SumStmt {
  std::vector<std::string> names;
};

struct Stmt;

struct RepeatStmt {
  std::vector<Stmt> body;
};

struct IfOccursStmt {
  std::vector<std::string> names;
  long target = 1;
  std::vector<Stmt> body;
};

struct HideStmt {
  bool hide = true;
  std::vector<std::string> names;  // empty: all
};

struct BracketStmt {
  std::vector<std::string> names;
};

struct PrintStmt {
  bool plus_s = false;
};

struct FormatStmt {
  long width = 80;
};

struct Stmt {
  std::variant<DeclStmt, LocalStmt, IdStmt, SumStmt, RepeatStmt, IfOccursStmt,
               HideStmt, BracketStmt, PrintStmt, FormatStmt>
      v;
  std::string file;
  int line = 0;
};

struct Module {
  std::vector<Stmt> stmts;
  bool is_end = false;  // ended by .end rather than .sort
};

struct Program {
  std::vector<Module> modules;
};

// Parses the directive-free source into modules.  The final module must end
// with `.end`; repeat/endrepeat and if/endif nest within a single module.
Program parse_program(const PreprocessedSource& src);

// Expression-only entry used by the golden reader and round-trip tests.
SExpr parse_expression_text(const std::string& text, const std::string& file, int line);

// Statement text that reparses to a structurally identical tree.  Block
// statements always print in their block form.
std::string to_text(const SExpr& e);
std::string to_text(const Stmt& s);
std::string to_text(const Program& p);

}  // namespace formlet
