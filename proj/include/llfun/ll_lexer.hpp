#pragma once

#include "llfun/error.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace llfun::ll {

enum class TokenKind : std::uint8_t {
  Keyword,     // bare word: opcodes, attributes, linkage, `to`, `x`, ...
  LocalIdent,  // %name, text without the sigil
  GlobalIdent, // @name, text without the sigil
  Label,       // `name:` at a block start, text without the colon
  Integer,     // decimal literal, possibly negative
  TypeToken,   // iN, void, ptr, label, float, ...
  Punct,       // = , ( ) [ ] { } * < > ...
  String,      // "..." contents, escapes kept verbatim
  Metadata,    // !name or !123 (text without '!'), bare '!' as empty text
  AttrGroup,   // #0
};

const char *to_string(TokenKind kind);

struct Token {
  TokenKind kind;
  std::string text;
  SourcePos pos;

  bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
  bool is_punct(std::string_view t) const { return is(TokenKind::Punct, t); }
  bool is_keyword(std::string_view t) const { return is(TokenKind::Keyword, t); }
};

/// Splits .ll source into tokens; `;` comments and whitespace are dropped.
/// Throws Error(ErrorKind::Lex) on an illegal character.
std::vector<Token> tokenize(std::string_view source);

} // namespace llfun::ll
