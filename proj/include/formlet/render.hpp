#pragma once

#include <string>
#include <vector>

#include "formlet/decls.hpp"
#include "formlet/term.hpp"

namespace formlet {

struct RenderOptions {
  int width = 80;               // wrap column for the one-line layout
  bool term_per_line = false;   // print +s
  std::vector<int> bracket_heads;  // heads factored out front, term_per_line only
};

// One term as written source, no leading sign: noncommuting factors in stored
// order, commuting factors, symbol powers, coefficient.  With ratfun_display
// the coefficient trails as `head(num,den)` (series form under an expansion
// setting) and carries its own sign; otherwise the magnitude leads and the
// sign is reported through `sign_out` for the caller's join.
std::string render_term_body(const Term& t, const Declarations& decls,
                             bool ratfun_display, int* sign_out = nullptr);

// Full printed block for one expression, layout selected by opt.
std::vector<std::string> render_expression(const std::string& name, const Expression& e,
                                           const Declarations& decls,
                                           const RenderOptions& opt);

}  // namespace formlet
