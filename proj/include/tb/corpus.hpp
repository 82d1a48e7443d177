#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "tb/parse.hpp"
#include "tb/task.hpp"

namespace tb {

// Called bindings in first-occurrence order: free lowercase identifiers,
// symbolic operators (keyed `(+)` style) and backtick-infix names, minus the
// names bound by the implementation itself (clause heads, parameters,
// where/let bindings, lambda and case-pattern variables).
std::vector<std::string> extract_called_bindings(const std::string& implementation);

// Every term name the implementation binds locally, clause heads included.
std::set<std::string> bound_term_names(const std::string& implementation);

// Flat-file lookup: `name :: signature` lines, `class ... where` blocks with
// indented method lines, `#` comments. Duplicates rejected at load.
struct SignatureDB {
  std::map<std::string, std::string> entries;      // binding -> signature line
  std::map<std::string, std::string> class_defs;   // class -> block text
  std::map<std::string, TypeSignature> parsed_entries;
  std::map<std::string, ClassDef> parsed_class_defs;

  static SignatureDB load(const std::string& path);
  static SignatureDB parse(const std::string& text, const std::string& origin);
};

struct MissingDeps : std::runtime_error {
  std::vector<std::string> names;
  explicit MissingDeps(std::vector<std::string> missing,
                       const std::string& context = "");
};

// One signature decl per name, input order; class definitions for every
// constraint on an ad-hoc dependency appended after all signature decls
// (superclasses first, deduplicated). All-or-nothing on lookup failures.
std::vector<DependencyDecl> resolve_dependencies(const std::vector<std::string>& names,
                                                 const SignatureDB& db);

// AdHoc if the context is non-empty; else Parametric if the body has a free
// type variable; else Monomorphic.
Category categorize_task(const TypeSignature& truth);

struct Violation {
  enum class Kind {
    ParseFailure,
    MissingDependency,
    TargetMismatch,
    CategoryMismatch,
  };
  Kind kind;
  std::string detail;
};

std::string to_string(const Violation& v);

// Empty iff all fields parse, the call graph is closed over the declared
// dependencies, truth names the target, and the category matches the truth.
std::vector<Violation> validate_task(const Task& task);

// One corpus entry: the ground-truth signature line followed by the
// implementation lines, terminated by a blank line.
struct CorpusEntry {
  TypeSignature truth;
  std::string implementation;
  int line = 0;  // 1-based line of the signature in the corpus file
};

std::vector<CorpusEntry> parse_corpus(const std::string& path);

// Builds regular-variant tasks: extracts calls, resolves dependencies,
// categorizes, and validates. Task ids are `<binding>@<file-basename>:<line>`.
std::vector<Task> build_tasks(const std::string& corpus_path, const SignatureDB& db);

}  // namespace tb
