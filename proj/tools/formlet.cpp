#include <iostream>

#include "CLI11.hpp"
#include "formlet/driver.hpp"

int main(int argc, char** argv) {
  CLI::App app{"formlet: a rewrite engine for noncommutative tensor algebra"};
  app.require_subcommand(1);

  formlet::RunConfig cfg;
  int repeat_cap = 0;

  auto* run = app.add_subcommand("run", "execute a program and print its output");
  run->add_option("file", cfg.input, "program file")->required();
  auto* cap_opt =
      run->add_option("--repeat-cap", repeat_cap, "pass limit for repeat blocks")
          ->check(CLI::PositiveNumber);
  run->add_flag("--stats", cfg.stats, "print per-module term and pass counts");

  auto* compare =
      app.add_subcommand("compare", "run a program and diff it against a golden file");
  compare->add_option("file", cfg.input, "program file")->required();
  compare->add_option("--golden", cfg.golden, "expected term listing")->required();

  auto* dump = app.add_subcommand("dump", "print the result as one canonical term per line");
  dump->add_option("file", cfg.input, "program file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (compare->parsed()) cfg.mode = formlet::RunConfig::Mode::Compare;
  if (dump->parsed()) cfg.mode = formlet::RunConfig::Mode::Dump;
  if (cap_opt->count()) cfg.repeat_cap = repeat_cap;

  formlet::DriverResult res = formlet::run_driver(cfg);
  for (const auto& l : res.out) std::cout << l << '\n';
  for (const auto& l : res.err) std::cerr << l << '\n';
  return res.exit_code;
}
