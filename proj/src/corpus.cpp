#include "tb/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>

#include "tb/token.hpp"

namespace tb {

namespace {

struct PlacedToken {
  const Token* tok;
  int depth;  // ( [ nesting at the token, counted across the whole source
};

// Non-space tokens grouped by source line, with running bracket depth.
std::vector<std::vector<PlacedToken>> token_lines(const TokenStream& ts) {
  std::vector<std::vector<PlacedToken>> lines;
  int depth = 0;
  for (const auto& tok : ts.tokens) {
    if (tok.kind == TokenKind::Space) continue;
    while ((int)lines.size() < tok.pos.line) lines.emplace_back();
    int at = depth;
    if (tok.kind == TokenKind::Punct) {
      if (tok.text == "(" || tok.text == "[") ++depth;
      if (tok.text == ")" || tok.text == "]") {
        --depth;
        at = depth;
      }
    }
    lines[tok.pos.line - 1].push_back({&tok, at});
  }
  return lines;
}

void bind_name(const Token& tok, std::set<std::string>& bound) {
  if (tok.kind == TokenKind::Identifier) {
    if (!tok.text.empty() && (std::islower((unsigned char)tok.text[0]) != 0))
      bound.insert(tok.text);
  } else if (tok.kind == TokenKind::Operator) {
    bound.insert("(" + tok.text + ")");
  } else if (tok.kind == TokenKind::Backtick) {
    bound.insert(tok.text.substr(1, tok.text.size() - 2));
  }
}

}  // namespace

std::set<std::string> bound_term_names(const std::string& implementation) {
  TokenStream ts = tokenize_binding_source(implementation);
  std::set<std::string> bound;

  for (const auto& line : token_lines(ts)) {
    // A clause line binds everything left of its depth-0 `=`; a case
    // alternative (no `=`) binds everything left of its depth-0 `->`.
    // Either stops at a depth-0 guard bar.
    std::size_t stop = line.size();
    bool found = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const auto& pt = line[i];
      if (pt.depth != 0 || pt.tok->kind != TokenKind::Keyword) continue;
      if (pt.tok->text == "|") {
        stop = std::min(stop, i);
      } else if (pt.tok->text == "=") {
        stop = std::min(stop, i);
        found = true;
        break;
      }
    }
    if (!found) {
      bool arrow = false;
      std::size_t bar = stop;
      stop = line.size();
      for (std::size_t i = 0; i < line.size(); ++i) {
        const auto& pt = line[i];
        if (pt.depth == 0 && pt.tok->kind == TokenKind::Keyword &&
            pt.tok->text == "->") {
          stop = i;
          arrow = true;
          break;
        }
      }
      if (!arrow) continue;
      stop = std::min(stop, bar);
    }
    for (std::size_t i = 0; i < stop; ++i) bind_name(*line[i].tok, bound);
  }

  // Lambda parameters and single-line let/where/of heads.
  const auto& toks = ts.tokens;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (toks[i].kind != TokenKind::Keyword) continue;
    const std::string& kw = toks[i].text;
    if (kw == "\\") {
      for (std::size_t j = i + 1; j < toks.size(); ++j) {
        if (toks[j].kind == TokenKind::Keyword && toks[j].text == "->") break;
        bind_name(toks[j], bound);
      }
    } else if (kw == "let" || kw == "where") {
      for (std::size_t j = i + 1; j < toks.size(); ++j) {
        if (toks[j].kind == TokenKind::Keyword &&
            (toks[j].text == "=" || toks[j].text == "|"))
          break;
        if (toks[j].pos.line != toks[i].pos.line) break;  // block form: line rule
        bind_name(toks[j], bound);
      }
    } else if (kw == "of") {
      for (std::size_t j = i + 1; j < toks.size(); ++j) {
        if (toks[j].pos.line != toks[i].pos.line) break;  // block form: line rule
        if (toks[j].kind == TokenKind::Keyword && toks[j].text == "->") break;
        bind_name(toks[j], bound);
      }
    }
  }
  return bound;
}

std::vector<std::string> extract_called_bindings(const std::string& implementation) {
  std::set<std::string> bound = bound_term_names(implementation);
  TokenStream ts = tokenize_binding_source(implementation);

  std::vector<std::string> out;
  std::set<std::string> seen;
  auto emit = [&](const std::string& key) {
    if (!bound.count(key) && seen.insert(key).second) out.push_back(key);
  };
  for (const auto& tok : ts.tokens) {
    switch (tok.kind) {
      case TokenKind::Identifier:
        if (!tok.text.empty() && std::islower((unsigned char)tok.text[0]))
          emit(tok.text);
        break;
      case TokenKind::Operator:
        emit("(" + tok.text + ")");
        break;
      case TokenKind::Backtick:
        emit(tok.text.substr(1, tok.text.size() - 2));
        break;
      default:
        break;
    }
  }
  return out;
}

MissingDeps::MissingDeps(std::vector<std::string> missing, const std::string& context)
    : std::runtime_error((context.empty() ? "" : context + ": ") +
                         "unresolvable dependencies: " +
                         [&] {
                           std::string s;
                           for (const auto& n : missing) {
                             if (!s.empty()) s += ", ";
                             s += n;
                           }
                           return s;
                         }()),
      names(std::move(missing)) {}

std::vector<DependencyDecl> resolve_dependencies(const std::vector<std::string>& names,
                                                 const SignatureDB& db) {
  std::vector<std::string> missing;
  for (const auto& n : names)
    if (!db.entries.count(n)) missing.push_back(n);

  std::vector<DependencyDecl> out;
  std::vector<std::string> class_order;
  std::set<std::string> class_seen;
  // Superclasses precede their subclasses so each header's context is
  // already introduced.
  std::function<void(const std::string&)> add_class = [&](const std::string& cls) {
    if (class_seen.count(cls)) return;
    class_seen.insert(cls);
    auto it = db.parsed_class_defs.find(cls);
    if (it == db.parsed_class_defs.end()) {
      missing.push_back("class " + cls);
      return;
    }
    for (const auto& super : it->second.supers) add_class(super.cls);
    class_order.push_back(cls);
  };

  for (const auto& n : names) {
    auto it = db.parsed_entries.find(n);
    if (it == db.parsed_entries.end()) continue;
    for (const auto& c : it->second.context) add_class(c.cls);
  }
  if (!missing.empty()) throw MissingDeps(std::move(missing));

  // Decl texts are canonical prints, so a later rewrite/invert round-trip
  // reproduces them byte-for-byte whatever the database file's formatting.
  for (const auto& n : names)
    out.push_back(DependencyDecl::signature(print_signature(db.parsed_entries.at(n))));
  for (const auto& cls : class_order)
    out.push_back(DependencyDecl::class_definition(
        print_class_def(db.parsed_class_defs.at(cls))));
  return out;
}

Category categorize_task(const TypeSignature& truth) {
  if (!truth.context.empty()) return Category::AdHoc;
  if (!free_type_variables(truth.body).empty()) return Category::Parametric;
  return Category::Monomorphic;
}

std::string to_string(const Violation& v) {
  switch (v.kind) {
    case Violation::Kind::ParseFailure: return "ParseFailure(" + v.detail + ")";
    case Violation::Kind::MissingDependency:
      return "MissingDependency(" + v.detail + ")";
    case Violation::Kind::TargetMismatch: return "TargetMismatch(" + v.detail + ")";
    case Violation::Kind::CategoryMismatch:
      return "CategoryMismatch(" + v.detail + ")";
  }
  return {};
}

std::vector<Violation> validate_task(const Task& task) {
  std::vector<Violation> out;

  if (task.truth.binding != task.target)
    out.push_back({Violation::Kind::TargetMismatch,
                   "truth names '" + task.truth.binding + "', target is '" +
                       task.target + "'"});

  std::set<std::string> available;
  for (const auto& d : task.dependencies) {
    try {
      if (d.kind == DependencyDecl::Kind::Signature) {
        available.insert(parse_signature(d.text).binding);
      } else {
        ClassDef def = parse_class_def(d.text);
        for (const auto& m : def.methods) available.insert(m.binding);
      }
    } catch (const SyntaxError& e) {
      out.push_back({Violation::Kind::ParseFailure, "dependency: " + std::string(e.what())});
    }
  }

  try {
    for (const auto& name : extract_called_bindings(task.implementation))
      if (!available.count(name))
        out.push_back({Violation::Kind::MissingDependency, name});
  } catch (const SyntaxError& e) {
    out.push_back({Violation::Kind::ParseFailure, "implementation: " + std::string(e.what())});
  }

  if (categorize_task(task.truth) != task.category)
    out.push_back({Violation::Kind::CategoryMismatch,
                   "truth implies " + to_string(categorize_task(task.truth)) +
                       ", task says " + to_string(task.category)});
  return out;
}

std::vector<CorpusEntry> parse_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus: " + path);

  std::vector<CorpusEntry> entries;
  std::vector<std::string> block;
  int block_start = 0;
  int lineno = 0;

  auto flush = [&] {
    if (block.empty()) return;
    if (block.size() < 2)
      throw std::runtime_error(path + ":" + std::to_string(block_start) +
                               ": corpus entry lacks an implementation");
    CorpusEntry e;
    e.truth = parse_signature(block.front());
    e.line = block_start;
    std::string impl;
    for (std::size_t i = 1; i < block.size(); ++i) {
      if (i > 1) impl += "\n";
      impl += block[i];
    }
    e.implementation = std::move(impl);
    entries.push_back(std::move(e));
    block.clear();
  };

  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line[0] == '#') continue;
    if (line.find_first_not_of(" \t") == std::string::npos) {
      flush();
      continue;
    }
    if (block.empty()) block_start = lineno;
    block.push_back(line);
  }
  flush();
  return entries;
}

namespace {

std::string basename_of(const std::string& path) {
  std::size_t slash = path.find_last_of('/');
  return slash == std::string::npos ? path : path.substr(slash + 1);
}

// The target's own method line inside an appended class definition would
// hand the model the answer; drop it.
DependencyDecl strip_target_method(const DependencyDecl& decl,
                                   const std::string& target) {
  if (decl.kind != DependencyDecl::Kind::ClassDefinition) return decl;
  ClassDef def = parse_class_def(decl.text);
  auto it = std::remove_if(def.methods.begin(), def.methods.end(),
                           [&](const TypeSignature& m) { return m.binding == target; });
  if (it == def.methods.end()) return decl;
  def.methods.erase(it, def.methods.end());
  return DependencyDecl::class_definition(print_class_def(def));
}

}  // namespace

std::vector<Task> build_tasks(const std::string& corpus_path, const SignatureDB& db) {
  std::string base = basename_of(corpus_path);
  std::vector<Task> tasks;
  for (const auto& entry : parse_corpus(corpus_path)) {
    Task t;
    t.target = entry.truth.binding;
    t.truth = entry.truth;
    t.implementation = entry.implementation;
    t.category = categorize_task(entry.truth);
    t.variant = Variant::Regular;
    t.id = t.target + "@" + base + ":" + std::to_string(entry.line);

    std::vector<std::string> calls = extract_called_bindings(t.implementation);
    try {
      for (auto& d : resolve_dependencies(calls, db))
        t.dependencies.push_back(strip_target_method(d, t.target));
    } catch (const MissingDeps& e) {
      throw MissingDeps(e.names, t.id);
    }

    std::vector<Violation> violations = validate_task(t);
    if (!violations.empty()) {
      std::string msg = t.id + ": invalid task:";
      for (const auto& v : violations) msg += " " + to_string(v);
      throw std::runtime_error(msg);
    }
    tasks.push_back(std::move(t));
  }
  return tasks;
}

}  // namespace tb
