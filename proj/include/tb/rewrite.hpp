#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tb/task.hpp"
#include "tb/token.hpp"

namespace tb {

// Replacement-name source for the three operators. Empty dictionary means
// `prefix + index`; a non-empty dictionary is consumed in order and exhausting
// it is a rewrite failure (supports adversarial naming experiments).
struct NamingScheme {
  std::string nl_prefix = "T";
  std::string var_prefix = "t";
  std::string binding_prefix = "f";
  std::vector<std::string> nl_dict;
  std::vector<std::string> var_dict;
  std::vector<std::string> binding_dict;

  // 1-based; empty optional when a dictionary is exhausted.
  std::optional<std::string> nl_name(std::size_t index) const;
  std::optional<std::string> var_name(std::size_t index) const;
  std::optional<std::string> binding_name(std::size_t index) const;
};

// Bijective renaming record. Type-variable maps are keyed by the scope the
// signature occupied when the operator ran: the dependency position ("0",
// "1", ...) or "truth"; alpha_rewrite runs the variable pass before the
// binding pass, so its keys refer to the task's original dependency order.
struct RenamingPlan {
  std::map<std::string, std::string> nl_types;
  std::map<std::string, std::map<std::string, std::string>> type_vars;
  std::map<std::string, std::string> bindings;
  // dependency_order[i] = original position of the decl now at position i.
  std::vector<std::size_t> dependency_order;

  Json to_json() const;
  static RenamingPlan from_json(const Json& j);
};

struct RewriteError {
  std::string op;      // operator that failed
  std::string reason;  // non-empty
  SourcePos pos;

  std::string to_string() const { return op + ": " + reason; }
};

// Either-style outcome: exactly one of task/error is engaged. `plan` carries
// the sections filled by the operators that ran.
struct RewriteResult {
  std::optional<Task> task;
  std::optional<RewriteError> error;
  RenamingPlan plan;

  bool ok() const { return task.has_value(); }

  static RewriteResult success(Task t, RenamingPlan p);
  static RewriteResult failure(RewriteError e);
};

// Renames every uppercase-initial type/class name to a fresh NL name,
// numbering globally across the task by first appearance (dependency
// signatures in canonical binding order, class definitions, implementation,
// ground truth). Signatures are reprinted canonically.
RewriteResult rewrite_nl_types(const Task& task, const NamingScheme& scheme = {});

// Renames type variables per signature scope by first textual occurrence
// (context before body). The implementation is untouched.
RewriteResult rewrite_type_variables(const Task& task, const NamingScheme& scheme = {});

// Renames bindings: target first, the rest by first occurrence in the
// implementation body, uncalled dependencies next in declaration order, then
// class-definition-only methods. Dependency signature lines are re-emitted in
// index order (class definitions keep their relative order at the end).
// Symbolic operators keep their position: infix occurrences become
// `f{n}`-backtick form, `(+)`-style prefix occurrences become the bare name.
RewriteResult rewrite_bindings(const Task& task, const NamingScheme& scheme = {});

// Kleisli composition of the three operators (NL types, then type variables,
// then bindings); the first failure short-circuits. Marks the result pure.
RewriteResult alpha_rewrite(const Task& task, const NamingScheme& scheme = {});

// Applies the inverse of a recorded plan to a pure task, recovering the
// regular task (dependency order restored from dependency_order).
RewriteResult invert_rewrite(const Task& task, const RenamingPlan& plan);

}  // namespace tb
