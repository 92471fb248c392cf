#pragma once

#include <string>
#include <vector>

#include "formlet/decls.hpp"
#include "formlet/exec.hpp"

namespace formlet {

// One `# expr <name>` section with its term lines exactly as written.
struct GoldenSection {
  std::string name;
  std::vector<std::string> term_lines;
  int line = 0;  // header position, for diagnostics
};

struct GoldenFile {
  std::string filename;
  std::vector<GoldenSection> sections;
};

// Reads the golden format: `# expr <name>` headers, one term per following
// line (`+ body`, `- body`, or `0`), `#` comments and blank lines skipped.
GoldenFile parse_golden(const std::string& text, const std::string& filename);

struct CompareReport {
  bool pass = true;
  std::vector<std::string> messages;  // one finding per line
};

// Layout-insensitive comparison.  Each section is evaluated against the
// post-run declaration tables and matched against the last printed value of
// the same name: canonical term structure with exact coefficient equality.
// Sections and printed names must cover each other.
CompareReport compare_golden(const GoldenFile& g,
                             const std::vector<OutputEvent>& events,
                             Declarations& decls);

// Canonical listing of the printed expressions, one signed term per line
// under a `# expr <name>` header.  Reading the listing back through the
// golden reader compares equal to the run it came from.
std::vector<std::string> dump_terms(const std::vector<OutputEvent>& events,
                                    const Declarations& decls);

}  // namespace formlet
