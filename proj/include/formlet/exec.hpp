#pragma once

#include <string>
#include <vector>

#include "formlet/decls.hpp"
#include "formlet/parser.hpp"
#include "formlet/term.hpp"

namespace formlet {

// One printed expression: the rendered block plus the canonical terms behind
// it, kept for layout-insensitive comparison.
struct OutputEvent {
  std::string name;
  std::vector<std::string> lines;
  Expression value;
};

struct RunStats {
  std::vector<size_t> module_terms;  // active terms at each module boundary
  std::vector<int> repeat_passes;    // body passes per completed repeat block
};

struct StoredExpression {
  std::string name;
  Expression value;
  long serial = 0;  // creation order; also the print order
};

// Whole-run state.  Statements act on every active expression; hidden
// expressions are readable from a local's right-hand side but never rewritten.
struct Session {
  Declarations decls;
  std::vector<StoredExpression> active;
  std::vector<StoredExpression> hidden;
  int format_width = 80;
  int repeat_cap = 100000;
  int counter = 0;  // internal-index ordinal, restarts at each module boundary
  long next_serial = 0;
  RunStats stats;

  StoredExpression* find_active(const std::string& name);
  StoredExpression* find_hidden(const std::string& name);
};

// Runs modules in order; the end-module behaves like a sort boundary and then
// stops.  Returns the print output of the whole run.
std::vector<OutputEvent> run_program(const Program& p, Session& sess);

// Evaluates a standalone source expression against the tables: names must
// resolve to declared symbols, indices, or heads.  Autodeclared index names
// are materialized on first use.  Used by the golden-file reader and the
// dump round trip.
Expression evaluate_expression(const SExpr& e, Declarations& decls);

}  // namespace formlet
