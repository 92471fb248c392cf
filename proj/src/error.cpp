#include "formlet/error.hpp"

namespace formlet {

const char* Error::kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::Syntax: return "syntax error";
    case ErrorKind::UnknownPreprocessorVariable: return "unknown preprocessor variable";
    case ErrorKind::UnknownProcedure: return "unknown procedure";
    case ErrorKind::UnterminatedProcedure: return "unterminated procedure";
    case ErrorKind::RecursionDepthExceeded: return "recursion depth exceeded";
    case ErrorKind::UndeclaredName: return "undeclared name";
    case ErrorKind::DuplicateName: return "duplicate name";
    case ErrorKind::BadDeclaration: return "bad declaration";
    case ErrorKind::IndexArityViolation: return "index appears more than twice";
    case ErrorKind::InvalidDelta: return "invalid delta";
    case ErrorKind::UnboundWildcard: return "unbound wildcard";
    case ErrorKind::BadPattern: return "bad pattern";
    case ErrorKind::RepeatDivergence: return "repeat did not converge";
    case ErrorKind::DenominatorVanishesAtZero: return "denominator vanishes at 0";
    case ErrorKind::NonIntegralSeries: return "series has non-integer coefficients";
    case ErrorKind::ExpansionUnsupported: return "coefficient not expandable in the declared variable";
    case ErrorKind::DivisionByZero: return "division by zero";
    case ErrorKind::GoldenFormat: return "golden file format error";
    case ErrorKind::Io: return "i/o error";
    case ErrorKind::Internal: return "internal error";
  }
  return "error";
}

std::string Error::format(ErrorKind kind, const std::string& message,
                          const std::string& file, int line) {
  std::string s;
  if (!file.empty()) {
    s += file;
    s += ':';
    if (line > 0) {
      s += std::to_string(line);
      s += ':';
    }
    s += ' ';
  }
  s += kind_name(kind);
  if (!message.empty()) {
    s += ": ";
    s += message;
  }
  return s;
}

}  // namespace formlet
