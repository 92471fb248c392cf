#pragma once

#include <string>
#include <vector>

namespace formlet {

struct SourceLine {
  std::string text;
  int origin = 0;  // 1-based line in the original file
};

// Directive-free program text.  Every emitted line carries the line it came
// from so later stages can report positions in the user's file.
struct PreprocessedSource {
  std::string file;
  std::vector<SourceLine> lines;
};

// Resolves the line-based directive layer: `#define name "value"` with
// textual 'name' substitution, `#procedure`/`#endprocedure` bodies spliced by
// `#call` (recursively, capped), `#-`/`#+` dropped, and full-line comments
// (`*` in column one) removed.  Variable references substitute when a line is
// emitted, so procedure bodies see the definitions live at call time.
PreprocessedSource preprocess(const std::string& text, const std::string& filename);

}  // namespace formlet
