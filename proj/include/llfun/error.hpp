#pragma once

#include <stdexcept>
#include <string>

namespace llfun {

/// Line/column of a token in a .ll source, 1-based. Zero line means unknown.
struct SourcePos {
  unsigned line = 0;
  unsigned column = 0;

  // Positions are diagnostic payload only; they never take part in
  // structural comparison of ASTs.
  friend bool operator==(const SourcePos &, const SourcePos &) { return true; }
};

enum class ErrorKind {
  Io,
  Lex,
  Parse,        // malformed input
  Unsupported,  // well-formed LLVM outside the accepted subset
  Analysis,     // CFG / SSA / loop-shape rejection
  Runtime,      // evaluation fault
  Budget,       // step budget exhausted
};

const char *to_string(ErrorKind kind);

/// Process exit status for each error class. 0 is success, 1 is usage.
int exit_code(ErrorKind kind);

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &message, SourcePos pos = {});

  ErrorKind kind() const { return kind_; }
  const SourcePos &pos() const { return pos_; }
  const std::string &message() const { return message_; }

private:
  ErrorKind kind_;
  SourcePos pos_;
  std::string message_;
};

} // namespace llfun
