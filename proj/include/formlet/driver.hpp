#pragma once

#include <optional>
#include <string>
#include <vector>

namespace formlet {

struct RunConfig {
  enum class Mode { Run, Compare, Dump };
  Mode mode = Mode::Run;
  std::string input;
  std::string golden;  // Compare only
  std::optional<int> repeat_cap;
  bool stats = false;
};

// exit_code: 0 success or compare PASS, 1 compare FAIL, 2 unusable
// configuration (unreadable paths), 3 interpreter or golden-format error.
struct DriverResult {
  int exit_code = 0;
  std::vector<std::string> out;  // standard output, one line per entry
  std::vector<std::string> err;  // diagnostics
};

DriverResult run_driver(const RunConfig& cfg);

}  // namespace formlet
