#include "tb/parse.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace tb {

namespace {

constexpr std::size_t kMaxTupleArity = 7;

bool lowercase_initial(std::string_view s) {
  return !s.empty() && (std::islower(static_cast<unsigned char>(s[0])) || s[0] == '_');
}

// Recursive-descent parser over a whitespace-free token slice.
class TypeParser {
 public:
  TypeParser(std::vector<Token> tokens, SourcePos end)
      : tokens_(std::move(tokens)), end_(end) {}

  static TypeParser lex(std::string_view text) {
    TokenStream ts = tokenize_binding_source(text);
    std::vector<Token> toks;
    for (auto& t : ts.tokens)
      if (t.kind != TokenKind::Space) toks.push_back(std::move(t));
    SourcePos end;
    if (!ts.tokens.empty()) {
      const Token& last = ts.tokens.back();
      end = last.pos;
      end.column += static_cast<int>(last.text.size());
      end.offset += last.text.size();
    }
    return TypeParser(std::move(toks), end);
  }

  TypeSignature signature() {
    TypeSignature sig;
    sig.binding = binding_name();
    expect_keyword("::");
    auto ct = context_and_type();
    sig.context = std::move(ct.context);
    sig.body = std::move(ct.body);
    expect_end();
    return sig;
  }

  ContextAndType context_and_type() {
    ContextAndType out;
    out.context = try_context();
    out.body = type();
    return out;
  }

  TypeRef bare_type() {
    TypeRef t = type();
    expect_end();
    return t;
  }

  void expect_end() {
    if (!eof()) throw SyntaxError("unexpected '" + peek().text + "' after type", peek().pos);
  }

 private:
  bool eof() const { return i_ >= tokens_.size(); }

  const Token& peek(std::size_t ahead = 0) const {
    static const Token sentinel{TokenKind::Keyword, "", {}};
    return i_ + ahead < tokens_.size() ? tokens_[i_ + ahead] : sentinel;
  }

  SourcePos here() const { return eof() ? end_ : tokens_[i_].pos; }

  const Token& advance() {
    if (eof()) throw SyntaxError("unexpected end of input", end_);
    return tokens_[i_++];
  }

  bool at_keyword(std::string_view text) const {
    return !eof() && peek().kind == TokenKind::Keyword && peek().text == text;
  }

  bool at_punct(char c) const {
    return !eof() && peek().kind == TokenKind::Punct && peek().text[0] == c;
  }

  void expect_keyword(std::string_view text) {
    if (!at_keyword(text))
      throw SyntaxError("expected '" + std::string(text) + "'", here());
    ++i_;
  }

  void expect_punct(char c) {
    if (!at_punct(c))
      throw SyntaxError(std::string("expected '") + c + "'", here());
    ++i_;
  }

  std::string binding_name() {
    if (eof()) throw SyntaxError("expected a binding name", end_);
    const Token& t = peek();
    if (t.kind == TokenKind::Identifier) {
      if (!lowercase_initial(t.text))
        throw SyntaxError("binding name must start with a lowercase letter", t.pos);
      ++i_;
      return t.text;
    }
    if (t.kind == TokenKind::Punct && t.text == "(") {
      if (peek(1).kind == TokenKind::Operator && peek(2).kind == TokenKind::Punct &&
          peek(2).text == ")") {
        std::string name = "(" + peek(1).text + ")";
        i_ += 3;
        return name;
      }
    }
    throw SyntaxError("expected a binding name", t.pos);
  }

  // Tries `C a =>` / `(C a, D b) =>`; rewinds if the tokens are not a context.
  std::vector<Constraint> try_context() {
    std::size_t mark = i_;
    try {
      std::vector<Constraint> ctx;
      if (at_punct('(')) {
        ++i_;
        ctx.push_back(constraint());
        while (at_punct(',')) {
          ++i_;
          ctx.push_back(constraint());
        }
        expect_punct(')');
      } else {
        ctx.push_back(constraint());
      }
      expect_keyword("=>");
      return ctx;
    } catch (const SyntaxError&) {
      i_ = mark;
      return {};
    }
  }

  Constraint constraint() {
    if (eof() || peek().kind != TokenKind::Identifier || lowercase_initial(peek().text))
      throw SyntaxError("expected a class name", here());
    Constraint c;
    c.cls = advance().text;
    while (starts_atype()) c.args.push_back(atype());
    if (c.args.empty())
      throw SyntaxError("constraint '" + c.cls + "' needs an argument", here());
    return c;
  }

  TypeRef type() {
    TypeRef lhs = btype();
    if (at_keyword("->")) {
      ++i_;
      return arrow(std::move(lhs), type());
    }
    return lhs;
  }

  TypeRef btype() {
    SourcePos start = here();
    TypeRef t = atype();
    while (starts_atype()) {
      if (!t->as<Con>() && !t->as<Var>() && !t->as<App>())
        throw UnsupportedSyntax("application head must be a constructor or variable",
                                start);
      t = app(std::move(t), atype());
    }
    return t;
  }

  bool starts_atype() const {
    if (eof()) return false;
    const Token& t = peek();
    if (t.kind == TokenKind::Identifier) return true;
    if (t.kind == TokenKind::Punct && (t.text == "(" || t.text == "[")) return true;
    return false;
  }

  TypeRef atype() {
    if (eof()) throw SyntaxError("expected a type", end_);
    const Token& t = peek();
    if (t.kind == TokenKind::Literal)
      throw UnsupportedSyntax("literal in type position", t.pos);
    if (t.kind == TokenKind::Identifier) {
      if (t.text == "forall") return forall_type();
      ++i_;
      return lowercase_initial(t.text) ? var(t.text) : con(t.text);
    }
    if (t.kind == TokenKind::Punct && t.text == "[") {
      ++i_;
      if (at_punct(']'))  // bare [] does not occur in the subset
        throw UnsupportedSyntax("empty list type", t.pos);
      TypeRef elem = type();
      expect_punct(']');
      return list_of(std::move(elem));
    }
    if (t.kind == TokenKind::Punct && t.text == "(") {
      ++i_;
      if (at_punct(')')) {
        ++i_;
        return unit();
      }
      std::vector<TypeRef> elems;
      elems.push_back(type());
      while (at_punct(',')) {
        ++i_;
        elems.push_back(type());
      }
      expect_punct(')');
      if (elems.size() == 1) return elems[0];
      if (elems.size() > kMaxTupleArity)
        throw UnsupportedSyntax("tuple arity above 7", t.pos);
      return tuple(std::move(elems));
    }
    throw SyntaxError("expected a type, found '" + t.text + "'", t.pos);
  }

  TypeRef forall_type() {
    SourcePos start = here();
    ++i_;  // forall
    std::vector<std::string> binders;
    while (!eof() && peek().kind == TokenKind::Identifier &&
           lowercase_initial(peek().text)) {
      const std::string& name = peek().text;
      if (std::find(binders.begin(), binders.end(), name) != binders.end())
        throw SyntaxError("duplicate forall binder '" + name + "'", peek().pos);
      binders.push_back(name);
      ++i_;
    }
    if (binders.empty()) throw SyntaxError("forall needs at least one binder", start);
    if (eof() || peek().kind != TokenKind::Operator || peek().text != ".")
      throw SyntaxError("expected '.' after forall binders", here());
    ++i_;
    auto ct = context_and_type();
    return forall(std::move(binders), std::move(ct.context), std::move(ct.body));
  }

  std::vector<Token> tokens_;
  SourcePos end_;
  std::size_t i_ = 0;
};

}  // namespace

TypeSignature parse_signature(std::string_view text) {
  return TypeParser::lex(text).signature();
}

TypeRef parse_type(std::string_view text) { return TypeParser::lex(text).bare_type(); }

ContextAndType parse_context_and_type(std::string_view text) {
  TypeParser p = TypeParser::lex(text);
  ContextAndType out = p.context_and_type();
  p.expect_end();
  return out;
}

ClassDef parse_class_def(std::string_view block) {
  std::vector<std::string> lines;
  {
    std::string cur;
    for (char c : block) {
      if (c == '\n') {
        lines.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!cur.empty()) lines.push_back(cur);
  }
  while (!lines.empty() && lines.back().find_first_not_of(" \t") == std::string::npos)
    lines.pop_back();
  if (lines.empty()) throw SyntaxError("empty class definition", {});

  // Header: class [supers =>] Name var+ where
  TokenStream header = tokenize_binding_source(lines[0]);
  std::vector<Token> toks;
  for (auto& t : header.tokens)
    if (t.kind != TokenKind::Space) toks.push_back(std::move(t));
  if (toks.empty() || toks[0].kind != TokenKind::Keyword || toks[0].text != "class")
    throw SyntaxError("expected 'class'", toks.empty() ? SourcePos{} : toks[0].pos);

  ClassDef def;
  std::size_t end = toks.size();
  bool has_where = end > 0 && toks[end - 1].kind == TokenKind::Keyword &&
                   toks[end - 1].text == "where";
  if (has_where) --end;

  // Split on => if present: everything before it is the superclass context.
  std::size_t arrow = end;
  for (std::size_t i = 1; i < end; ++i) {
    if (toks[i].kind == TokenKind::Keyword && toks[i].text == "=>") {
      arrow = i;
      break;
    }
  }

  auto parse_head = [&](std::size_t from, std::size_t to) {
    if (from >= to || toks[from].kind != TokenKind::Identifier ||
        lowercase_initial(toks[from].text))
      throw SyntaxError("expected a class name", from < to ? toks[from].pos : SourcePos{});
    def.name = toks[from].text;
    for (std::size_t i = from + 1; i < to; ++i) {
      if (toks[i].kind != TokenKind::Identifier || !lowercase_initial(toks[i].text))
        throw SyntaxError("expected a class variable", toks[i].pos);
      def.vars.push_back(toks[i].text);
    }
    if (def.vars.empty()) throw SyntaxError("class needs a variable", toks[from].pos);
  };

  if (arrow != end) {
    // Re-parse the context slice as text to reuse the constraint grammar.
    std::string ctx_text;
    for (std::size_t i = 1; i < arrow; ++i) ctx_text += toks[i].text + " ";
    ctx_text += "=> ()";
    auto ct = parse_context_and_type(ctx_text);
    def.supers = std::move(ct.context);
    parse_head(arrow + 1, end);
  } else {
    parse_head(1, end);
  }

  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].find_first_not_of(" \t") == std::string::npos) continue;
    def.methods.push_back(parse_signature(lines[li]));
  }
  return def;
}

std::string print_class_def(const ClassDef& def) {
  std::ostringstream os;
  os << "class " << print_context(def.supers) << def.name;
  for (const auto& v : def.vars) os << ' ' << v;
  if (!def.methods.empty()) {
    os << " where";
    for (const auto& m : def.methods) os << "\n  " << print_signature(m);
  }
  return os.str();
}

}  // namespace tb
