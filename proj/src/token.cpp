#include "tb/token.hpp"

#include <array>
#include <cctype>

namespace tb {

namespace {

bool is_symbol_char(char c) {
  static const std::string_view symbols = "!#$%&*+./<=>?@\\^|~:-";
  return symbols.find(c) != std::string_view::npos;
}

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

}  // namespace

bool is_reserved_op(std::string_view text) {
  static const std::array<std::string_view, 11> ops = {
      "=", "|", "->", "<-", "=>", "::", "\\", "@", "~", "..", ":"};
  for (auto op : ops)
    if (text == op) return true;
  return false;
}

bool is_keyword_word(std::string_view text) {
  static const std::array<std::string_view, 16> words = {
      "where", "let", "in", "case", "of", "if", "then", "else",
      "do",    "class", "instance", "data", "type", "newtype", "deriving", "_"};
  for (auto w : words)
    if (text == w) return true;
  return false;
}

bool names_binding(const Token& tok) {
  switch (tok.kind) {
    case TokenKind::Identifier:
    case TokenKind::Operator:
    case TokenKind::Backtick:
      return true;
    default:
      return false;
  }
}

std::string binding_key(const Token& tok) {
  switch (tok.kind) {
    case TokenKind::Operator:
      return "(" + tok.text + ")";
    case TokenKind::Backtick:
      return tok.text.substr(1, tok.text.size() - 2);
    default:
      return tok.text;
  }
}

bool is_operator_name(std::string_view name) {
  return name.size() >= 3 && name.front() == '(' && name.back() == ')' &&
         is_symbol_char(name[1]);
}

std::string operator_symbol(std::string_view name) {
  return std::string(name.substr(1, name.size() - 2));
}

std::string TokenStream::join() const {
  std::string out;
  for (const auto& t : tokens) out += t.text;
  return out;
}

namespace {

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  TokenStream run() {
    TokenStream ts;
    while (!eof()) ts.tokens.push_back(next());
    return ts;
  }

 private:
  bool eof() const { return i_ >= src_.size(); }
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

  SourcePos here() const { return SourcePos{line_, col_, i_}; }

  Token make(TokenKind kind, SourcePos start) {
    return Token{kind, std::string(src_.substr(start.offset, i_ - start.offset)),
                 start};
  }

  Token next() {
    SourcePos start = here();
    char c = peek();

    if (std::isspace(static_cast<unsigned char>(c))) {
      while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) advance();
      return make(TokenKind::Space, start);
    }

    if (c == '{' && peek(1) == '-') return block_comment(start);

    if (is_ident_start(c)) {
      while (!eof() && is_ident_char(peek())) advance();
      std::string_view text = src_.substr(start.offset, i_ - start.offset);
      return Token{is_keyword_word(text) ? TokenKind::Keyword : TokenKind::Identifier,
                   std::string(text), start};
    }

    if (is_digit(c)) {
      while (!eof() && is_digit(peek())) advance();
      if (peek() == '.' && is_digit(peek(1))) {
        advance();
        while (!eof() && is_digit(peek())) advance();
      }
      return make(TokenKind::Literal, start);
    }

    if (c == '"') return string_literal(start);
    if (c == '\'') return char_literal(start);
    if (c == '`') return backtick(start);

    if (is_symbol_char(c)) {
      while (!eof() && is_symbol_char(peek())) advance();
      std::string_view text = src_.substr(start.offset, i_ - start.offset);
      // A run of two or more dashes not followed by other symbol characters
      // is a line comment.
      if (text.size() >= 2 && text.find_first_not_of('-') == std::string_view::npos) {
        while (!eof() && peek() != '\n') advance();
        return make(TokenKind::Space, start);
      }
      return Token{is_reserved_op(text) ? TokenKind::Keyword : TokenKind::Operator,
                   std::string(text), start};
    }

    switch (c) {
      case '(': case ')': case '[': case ']': case ',': case ';': case '{': case '}':
        advance();
        return make(TokenKind::Punct, start);
      default:
        throw SyntaxError("unexpected character '" + std::string(1, c) + "'", start);
    }
  }

  Token block_comment(SourcePos start) {
    advance();  // {
    advance();  // -
    int depth = 1;
    while (depth > 0) {
      if (eof()) throw SyntaxError("unterminated block comment", start);
      if (peek() == '{' && peek(1) == '-') {
        advance();
        advance();
        ++depth;
      } else if (peek() == '-' && peek(1) == '}') {
        advance();
        advance();
        --depth;
      } else {
        advance();
      }
    }
    return make(TokenKind::Space, start);
  }

  Token string_literal(SourcePos start) {
    advance();  // opening quote
    while (true) {
      if (eof() || peek() == '\n') throw SyntaxError("unterminated string literal", start);
      char c = advance();
      if (c == '\\') {
        if (eof()) throw SyntaxError("unterminated string literal", start);
        advance();
      } else if (c == '"') {
        break;
      }
    }
    return make(TokenKind::Literal, start);
  }

  Token char_literal(SourcePos start) {
    advance();  // opening quote
    if (eof()) throw SyntaxError("unterminated character literal", start);
    if (advance() == '\\') {
      if (eof()) throw SyntaxError("unterminated character literal", start);
      advance();
    }
    if (eof() || peek() != '\'')
      throw SyntaxError("unterminated character literal", start);
    advance();
    return make(TokenKind::Literal, start);
  }

  Token backtick(SourcePos start) {
    advance();  // opening backtick
    if (eof() || !is_ident_start(peek()))
      throw SyntaxError("expected a name after '`'", start);
    while (!eof() && is_ident_char(peek())) advance();
    if (eof() || peek() != '`') throw SyntaxError("unterminated backtick name", start);
    advance();
    return make(TokenKind::Backtick, start);
  }

  std::string_view src_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

TokenStream tokenize_binding_source(std::string_view src) { return Lexer(src).run(); }

}  // namespace tb
