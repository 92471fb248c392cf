#include "formlet/driver.hpp"

#include <fstream>
#include <sstream>

#include "formlet/error.hpp"
#include "formlet/exec.hpp"
#include "formlet/golden.hpp"
#include "formlet/parser.hpp"
#include "formlet/preprocess.hpp"

namespace formlet {

namespace {

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream buf;
  buf << in.rdbuf();
  out = buf.str();
  return true;
}

struct RunOutcome {
  Session sess;
  std::vector<OutputEvent> events;
};

RunOutcome run_input(const RunConfig& cfg, const std::string& text) {
  RunOutcome r;
  if (cfg.repeat_cap) r.sess.repeat_cap = *cfg.repeat_cap;
  Program p = parse_program(preprocess(text, cfg.input));
  r.events = run_program(p, r.sess);
  return r;
}

void append_stats(const RunStats& stats, std::vector<std::string>& out) {
  for (size_t i = 0; i < stats.module_terms.size(); ++i)
    out.push_back("module " + std::to_string(i + 1) + ": " +
                  std::to_string(stats.module_terms[i]) + " terms");
  for (size_t i = 0; i < stats.repeat_passes.size(); ++i)
    out.push_back("repeat " + std::to_string(i + 1) + ": " +
                  std::to_string(stats.repeat_passes[i]) + " passes");
}

}  // namespace

DriverResult run_driver(const RunConfig& cfg) {
  DriverResult res;
  std::string text;
  if (!read_file(cfg.input, text)) {
    res.exit_code = 2;
    res.err.push_back("cannot read " + cfg.input);
    return res;
  }
  std::string golden_text;
  if (cfg.mode == RunConfig::Mode::Compare && !read_file(cfg.golden, golden_text)) {
    res.exit_code = 2;
    res.err.push_back("cannot read " + cfg.golden);
    return res;
  }

  try {
    RunOutcome r = run_input(cfg, text);
    switch (cfg.mode) {
      case RunConfig::Mode::Run:
        for (size_t i = 0; i < r.events.size(); ++i) {
          if (i) res.out.push_back("");
          res.out.insert(res.out.end(), r.events[i].lines.begin(),
                         r.events[i].lines.end());
        }
        if (cfg.stats) append_stats(r.sess.stats, res.out);
        break;
      case RunConfig::Mode::Dump:
        res.out = dump_terms(r.events, r.sess.decls);
        break;
      case RunConfig::Mode::Compare: {
        GoldenFile g = parse_golden(golden_text, cfg.golden);
        CompareReport rep = compare_golden(g, r.events, r.sess.decls);
        if (rep.pass) {
          res.out.push_back("PASS: " + std::to_string(g.sections.size()) +
                            " expressions compared");
        } else {
          res.out = rep.messages;
          res.out.push_back("FAIL: " + std::to_string(rep.messages.size()) +
                            " differences");
          res.exit_code = 1;
        }
        break;
      }
    }
  } catch (const Error& e) {
    res.exit_code = 3;
    res.err.push_back(e.what());
  }
  return res;
}

}  // namespace formlet
