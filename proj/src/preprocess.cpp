#include "formlet/preprocess.hpp"

#include <cctype>
#include <map>

#include "formlet/error.hpp"

namespace formlet {
namespace {

constexpr int kMaxCallDepth = 64;

std::string strip(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool is_name_char(char c) {
  return std::isalnum((unsigned char)c) || c == '_';
}

struct Procedure {
  std::vector<SourceLine> body;
};

struct Expander {
  const std::string& file;
  std::map<std::string, std::string> vars;
  std::map<std::string, Procedure> procs;
  PreprocessedSource out;

  [[noreturn]] void fail(ErrorKind kind, const std::string& msg, int line) {
    throw Error(kind, msg, file, line);
  }

  std::string substitute_vars(const std::string& text, int line) {
    std::string r;
    size_t i = 0;
    while (i < text.size()) {
      if (text[i] != '\'') {
        r += text[i++];
        continue;
      }
      size_t close = text.find('\'', i + 1);
      if (close == std::string::npos)
        fail(ErrorKind::Syntax, "unterminated preprocessor variable reference", line);
      std::string name = text.substr(i + 1, close - i - 1);
      auto it = vars.find(name);
      if (it == vars.end())
        fail(ErrorKind::UnknownPreprocessorVariable,
             "undefined preprocessor variable '" + name + "'", line);
      r += it->second;
      i = close + 1;
    }
    return r;
  }

  // One word after the directive name, e.g. the variable or procedure name.
  static std::string leading_name(const std::string& s, size_t& pos) {
    while (pos < s.size() && std::isspace((unsigned char)s[pos])) ++pos;
    size_t b = pos;
    while (pos < s.size() && is_name_char(s[pos])) ++pos;
    return s.substr(b, pos - b);
  }

  void handle_define(const std::string& rest, int line) {
    size_t pos = 0;
    std::string name = leading_name(rest, pos);
    if (name.empty()) fail(ErrorKind::Syntax, "#define needs a variable name", line);
    size_t q1 = rest.find('"', pos);
    if (q1 == std::string::npos)
      fail(ErrorKind::Syntax, "#define value must be quoted", line);
    size_t q2 = rest.find('"', q1 + 1);
    if (q2 == std::string::npos)
      fail(ErrorKind::Syntax, "unterminated #define value", line);
    vars[name] = rest.substr(q1 + 1, q2 - q1 - 1);
  }

  void process_line(const std::string& raw, int origin, int depth) {
    if (!raw.empty() && raw[0] == '*') return;  // full-line comment
    std::string line = strip(raw);
    if (line.empty()) return;
    if (line[0] != '#') {
      out.lines.push_back({substitute_vars(raw, origin), origin});
      return;
    }
    std::string body = line.substr(1);
    if (body == "-" || body == "+") return;
    if (body.rfind("define", 0) == 0) {
      handle_define(body.substr(6), origin);
      return;
    }
    if (body.rfind("call", 0) == 0) {
      size_t pos = 4;
      std::string name = leading_name(body, pos);
      auto it = procs.find(name);
      if (it == procs.end())
        fail(ErrorKind::UnknownProcedure, "call to unknown procedure " + name, origin);
      if (depth + 1 > kMaxCallDepth)
        fail(ErrorKind::RecursionDepthExceeded,
             "procedure calls nested deeper than " + std::to_string(kMaxCallDepth),
             origin);
      for (const SourceLine& b : it->second.body)
        process_line(b.text, b.origin, depth + 1);
      return;
    }
    if (body.rfind("procedure", 0) == 0)
      fail(ErrorKind::Syntax, "procedure definitions cannot nest", origin);
    if (body.rfind("endprocedure", 0) == 0 || body.rfind("end procedure", 0) == 0)
      fail(ErrorKind::Syntax, "#endprocedure without #procedure", origin);
    fail(ErrorKind::Syntax, "unknown preprocessor directive #" + body, origin);
  }

  void run(const std::vector<std::string>& raw_lines) {
    for (size_t i = 0; i < raw_lines.size(); ++i) {
      int origin = (int)i + 1;
      std::string line = strip(raw_lines[i]);
      if (line.rfind("#procedure", 0) == 0) {
        size_t pos = 10;
        std::string name = leading_name(line, pos);
        if (name.empty())
          fail(ErrorKind::Syntax, "#procedure needs a name", origin);
        Procedure proc;
        int open_line = origin;
        bool closed = false;
        while (++i < raw_lines.size()) {
          std::string inner = strip(raw_lines[i]);
          if (inner.rfind("#endprocedure", 0) == 0 ||
              inner.rfind("#end procedure", 0) == 0) {
            closed = true;
            break;
          }
          proc.body.push_back({raw_lines[i], (int)i + 1});
        }
        if (!closed)
          fail(ErrorKind::UnterminatedProcedure,
               "procedure " + name + " has no #endprocedure", open_line);
        procs[name] = std::move(proc);
        continue;
      }
      process_line(raw_lines[i], origin, 0);
    }
  }
};

}  // namespace

PreprocessedSource preprocess(const std::string& text, const std::string& filename) {
  std::vector<std::string> raw;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      raw.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  if (!cur.empty()) raw.push_back(cur);

  Expander ex{filename};
  ex.out.file = filename;
  ex.run(raw);
  return std::move(ex.out);
}

}  // namespace formlet
