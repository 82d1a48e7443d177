#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tb {

struct SourcePos {
  int line = 1;
  int column = 1;
  std::size_t offset = 0;
};

struct SyntaxError : std::runtime_error {
  SourcePos pos;
  SyntaxError(const std::string& msg, SourcePos p)
      : std::runtime_error(std::to_string(p.line) + ":" + std::to_string(p.column) +
                           ": " + msg),
        pos(p) {}
};

// Input is outside the supported language subset (but lexically fine).
struct UnsupportedSyntax : SyntaxError {
  using SyntaxError::SyntaxError;
};

enum class TokenKind {
  Identifier,  // lowercase or uppercase initial, primes and underscores allowed
  Operator,    // symbolic, e.g. ++ . <=
  Backtick,    // `name`, backticks included in text
  Literal,     // string, char or numeric literal
  Punct,       // ( ) [ ] , ; { }
  Keyword,     // reserved word or reserved operator, also _ and wildcards
  Space,       // whitespace run or comment
};

struct Token {
  TokenKind kind;
  std::string text;  // verbatim slice of the source
  SourcePos pos;
};

struct TokenStream {
  std::vector<Token> tokens;

  // Concatenating all token texts reproduces the source exactly.
  std::string join() const;
};

// Lexes a binding definition (or any Haskell-subset source). Comments and
// whitespace become Space tokens so join() is the identity.
TokenStream tokenize_binding_source(std::string_view src);

bool is_reserved_op(std::string_view text);
bool is_keyword_word(std::string_view text);

// True for tokens that can name a binding occurrence: identifiers, symbolic
// operators and backtick-infix names.
bool names_binding(const Token& tok);

// Lookup key for a binding occurrence: identifiers map to themselves,
// operators to their parenthesized form `(+)`, backtick tokens to the bare
// name.
std::string binding_key(const Token& tok);

// Inverse direction: how a plan entry is keyed for an operator name.
bool is_operator_name(std::string_view binding_name);  // "(.)" style
std::string operator_symbol(std::string_view binding_name);  // "(.)" -> "."

}  // namespace tb
