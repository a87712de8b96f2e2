#include "llfun/ll_lexer.hpp"

#include <cctype>

namespace llfun::ll {

const char *to_string(TokenKind kind) {
  switch (kind) {
  case TokenKind::Keyword: return "keyword";
  case TokenKind::LocalIdent: return "local identifier";
  case TokenKind::GlobalIdent: return "global identifier";
  case TokenKind::Label: return "label";
  case TokenKind::Integer: return "integer";
  case TokenKind::TypeToken: return "type";
  case TokenKind::Punct: return "punctuation";
  case TokenKind::String: return "string";
  case TokenKind::Metadata: return "metadata";
  case TokenKind::AttrGroup: return "attribute group";
  }
  return "token";
}

namespace {

bool is_name_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '$';
}

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
         c == '$' || c == '-';
}

bool is_bare_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '$';
}

bool is_type_word(std::string_view word) {
  if (word.size() > 1 && word[0] == 'i') {
    for (std::size_t i = 1; i < word.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(word[i])))
        return false;
    return true;
  }
  return word == "void" || word == "ptr" || word == "label" || word == "float" ||
         word == "double" || word == "half" || word == "fp128" || word == "x86_fp80" ||
         word == "ppc_fp128" || word == "x86_mmx" || word == "metadata" ||
         word == "opaque" || word == "token" || word == "bfloat";
}

class Lexer {
public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_trivia();
      if (at_end())
        break;
      out.push_back(next());
    }
    return out;
  }

private:
  std::string_view src_;
  std::size_t i_ = 0;
  unsigned line_ = 1;
  unsigned col_ = 1;

  bool at_end() const { return i_ >= src_.size(); }
  char peek(std::size_t ahead = 0) const {
    return i_ + ahead < src_.size() ? src_[i_ + ahead] : '\0';
  }

  char advance() {
    char c = src_[i_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_trivia() {
    while (!at_end()) {
      char c = peek();
      if (c == ';') {
        while (!at_end() && peek() != '\n')
          advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  [[noreturn]] void fail(const std::string &msg, SourcePos pos) const {
    throw Error(ErrorKind::Lex, msg, pos);
  }

  std::string quoted(SourcePos pos) {
    advance(); // opening quote
    std::string text;
    while (true) {
      if (at_end() || peek() == '\n')
        fail("unterminated string literal", pos);
      char c = advance();
      if (c == '"')
        break;
      text.push_back(c);
    }
    return text;
  }

  std::string name_chars() {
    std::string text;
    while (!at_end() && is_name_char(peek()))
      text.push_back(advance());
    return text;
  }

  Token sigiled(TokenKind kind, SourcePos pos) {
    char sigil = advance();
    std::string text;
    if (peek() == '"')
      text = quoted(pos);
    else if (is_name_char(peek()))
      text = name_chars();
    else
      fail(std::string("expected a name after '") + sigil + "'", pos);
    return {kind, std::move(text), pos};
  }

  Token next() {
    SourcePos pos{line_, col_};
    char c = peek();

    if (c == '%')
      return sigiled(TokenKind::LocalIdent, pos);
    if (c == '@')
      return sigiled(TokenKind::GlobalIdent, pos);
    if (c == '!') {
      advance();
      std::string text;
      while (!at_end() && is_name_char(peek()))
        text.push_back(advance());
      return {TokenKind::Metadata, std::move(text), pos};
    }
    if (c == '#') {
      advance();
      std::string text;
      while (!at_end() && std::isdigit(static_cast<unsigned char>(peek())))
        text.push_back(advance());
      if (text.empty())
        fail("expected digits after '#'", pos);
      return {TokenKind::AttrGroup, std::move(text), pos};
    }
    if (c == '"') {
      std::string text = quoted(pos);
      if (peek() == ':') {
        advance();
        return {TokenKind::Label, std::move(text), pos};
      }
      return {TokenKind::String, std::move(text), pos};
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      std::string text;
      text.push_back(advance());
      while (!at_end() && std::isdigit(static_cast<unsigned char>(peek())))
        text.push_back(advance());
      if (peek() == ':' && text[0] != '-') {
        advance();
        return {TokenKind::Label, std::move(text), pos};
      }
      if (is_name_start(peek()))
        fail("malformed numeric literal", pos);
      return {TokenKind::Integer, std::move(text), pos};
    }
    if (c == '.' && peek(1) == '.' && peek(2) == '.') {
      advance();
      advance();
      advance();
      return {TokenKind::Punct, "...", pos};
    }
    if (is_name_start(c)) {
      std::string text;
      while (!at_end() && is_bare_char(peek()))
        text.push_back(advance());
      // Labels may contain '-' as well.
      if (peek() == '-' || peek() == ':') {
        std::size_t save_i = i_;
        unsigned save_line = line_, save_col = col_;
        std::string extended = text;
        while (!at_end() && is_name_char(peek()))
          extended.push_back(advance());
        if (peek() == ':') {
          advance();
          return {TokenKind::Label, std::move(extended), pos};
        }
        i_ = save_i;
        line_ = save_line;
        col_ = save_col;
      }
      TokenKind kind = is_type_word(text) ? TokenKind::TypeToken : TokenKind::Keyword;
      return {kind, std::move(text), pos};
    }
    switch (c) {
    case '=': case ',': case '(': case ')': case '[': case ']': case '{':
    case '}': case '*': case '<': case '>': case ':': case '|':
      advance();
      return {TokenKind::Punct, std::string(1, c), pos};
    default:
      break;
    }
    fail(std::string("illegal character '") + c + "'", pos);
  }
};

} // namespace

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

} // namespace llfun::ll
