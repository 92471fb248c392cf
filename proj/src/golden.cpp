#include "formlet/golden.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

#include "formlet/error.hpp"
#include "formlet/parser.hpp"
#include "formlet/render.hpp"

namespace formlet {

namespace {

std::string strip(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string term_text(const Term& t, const Declarations& decls) {
  int sign = 1;
  std::string body =
      render_term_body(t, decls, decls.ratfun_head() >= 0, &sign);
  return (sign < 0 ? "- " : "+ ") + body;
}

std::string coeff_text(const RationalCoefficient& c, const Declarations& decls) {
  SymbolNamer nm = [&decls](int id) { return decls.symbol_name(id); };
  std::string s = c.num.to_string(nm);
  if (!c.den.is_one()) s += " / " + c.den.to_string(nm);
  return s;
}

// Final printed value per name, in first-print order.
std::vector<std::pair<std::string, const Expression*>> final_values(
    const std::vector<OutputEvent>& events) {
  std::vector<std::pair<std::string, const Expression*>> out;
  for (const auto& e : events) {
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const auto& p) { return p.first == e.name; });
    if (it != out.end())
      it->second = &e.value;
    else
      out.emplace_back(e.name, &e.value);
  }
  return out;
}

}  // namespace

GoldenFile parse_golden(const std::string& text, const std::string& filename) {
  GoldenFile g;
  g.filename = filename;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = strip(raw);
    if (line.empty()) continue;
    if (line.rfind("# expr ", 0) == 0) {
      std::string name = strip(line.substr(7));
      if (name.empty())
        throw Error(ErrorKind::GoldenFormat, "empty expression name", filename, lineno);
      for (const auto& sec : g.sections)
        if (sec.name == name)
          throw Error(ErrorKind::GoldenFormat, "duplicate section " + name,
                      filename, lineno);
      g.sections.push_back({name, {}, lineno});
      continue;
    }
    if (line[0] == '#') continue;
    if (g.sections.empty())
      throw Error(ErrorKind::GoldenFormat, "term line before any `# expr` header",
                  filename, lineno);
    g.sections.back().term_lines.push_back(line);
  }
  return g;
}

CompareReport compare_golden(const GoldenFile& g,
                             const std::vector<OutputEvent>& events,
                             Declarations& decls) {
  CompareReport rep;
  auto note = [&rep](std::string m) {
    rep.pass = false;
    rep.messages.push_back(std::move(m));
  };

  auto printed = final_values(events);
  for (const auto& [name, value] : printed) {
    (void)value;
    bool covered = std::any_of(g.sections.begin(), g.sections.end(),
                               [&](const GoldenSection& s) { return s.name == name; });
    if (!covered) note("printed expression " + name + " has no golden section");
  }

  for (const auto& sec : g.sections) {
    const Expression* actual = nullptr;
    for (const auto& [name, value] : printed)
      if (name == sec.name) actual = value;
    if (!actual) {
      note("golden section " + sec.name + " was never printed");
      continue;
    }

    std::string text;
    for (const auto& l : sec.term_lines) {
      if (l == "0") continue;
      if (!text.empty()) text += ' ';
      text += l;
    }
    Expression want;
    if (!text.empty())
      want = evaluate_expression(parse_expression_text(text, g.filename, sec.line),
                                 decls);

    size_t i = 0, j = 0;
    while (i < want.terms.size() || j < actual->terms.size()) {
      int c = i >= want.terms.size()    ? 1
              : j >= actual->terms.size() ? -1
                  : term_structure_cmp(want.terms[i], actual->terms[j]);
      if (c == 0) {
        if (!(want.terms[i].coeff == actual->terms[j].coeff))
          note(sec.name + ": coefficient mismatch on " +
               term_text(actual->terms[j], decls) + " (golden has " +
               coeff_text(want.terms[i].coeff, decls) + ")");
        ++i;
        ++j;
      } else if (c < 0) {
        note(sec.name + ": missing term " + term_text(want.terms[i], decls));
        ++i;
      } else {
        note(sec.name + ": extra term " + term_text(actual->terms[j], decls));
        ++j;
      }
    }
  }
  return rep;
}

std::vector<std::string> dump_terms(const std::vector<OutputEvent>& events,
                                    const Declarations& decls) {
  std::vector<std::string> out;
  for (const auto& [name, value] : final_values(events)) {
    out.push_back("# expr " + name);
    if (value->terms.empty()) out.push_back("0");
    for (const auto& t : value->terms) out.push_back(term_text(t, decls));
  }
  return out;
}

}  // namespace formlet
