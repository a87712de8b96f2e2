#include "llfun/error.hpp"

namespace llfun {

const char *to_string(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::Io: return "io error";
  case ErrorKind::Lex: return "lex error";
  case ErrorKind::Parse: return "parse error";
  case ErrorKind::Unsupported: return "unsupported construct";
  case ErrorKind::Analysis: return "analysis rejected";
  case ErrorKind::Runtime: return "runtime fault";
  case ErrorKind::Budget: return "budget exhausted";
  }
  return "error";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::Io: return 1;
  case ErrorKind::Lex:
  case ErrorKind::Parse: return 2;
  case ErrorKind::Unsupported: return 3;
  case ErrorKind::Analysis: return 4;
  case ErrorKind::Runtime: return 5;
  case ErrorKind::Budget: return 6;
  }
  return 1;
}

static std::string format_message(ErrorKind kind, const std::string &message,
                                  SourcePos pos) {
  std::string out;
  if (pos.line != 0)
    out = std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": ";
  out += to_string(kind);
  out += ": ";
  out += message;
  return out;
}

Error::Error(ErrorKind kind, const std::string &message, SourcePos pos)
    : std::runtime_error(format_message(kind, message, pos)), kind_(kind),
      pos_(pos), message_(message) {}

} // namespace llfun
