#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tb/types.hpp"

namespace tb {

using Json = nlohmann::ordered_json;

enum class Category { Monomorphic, Parametric, AdHoc };
enum class Variant { Regular, Pure };

std::string to_string(Category c);
std::string to_string(Variant v);
Category category_from_string(const std::string& s);
Variant variant_from_string(const std::string& s);

struct DependencyDecl {
  enum class Kind { Signature, ClassDefinition };
  Kind kind = Kind::Signature;
  std::string text;                    // source line(s), verbatim
  std::optional<TypeSignature> parsed; // engaged iff kind == Signature

  static DependencyDecl signature(std::string text);
  static DependencyDecl class_definition(std::string text);
};

// Self-contained benchmark item. `implementation` keeps the corpus layout
// byte-for-byte; `truth` is held parsed and printed canonically.
struct Task {
  std::string id;
  Category category = Category::Monomorphic;
  std::vector<DependencyDecl> dependencies;
  std::string implementation;
  std::string target;
  TypeSignature truth;
  Variant variant = Variant::Regular;
};

Json to_json(const Task& task);
Task task_from_json(const Json& j);

// JSON Lines: one task per line, UTF-8.
std::vector<Task> load_tasks(const std::string& path);
void save_tasks(const std::vector<Task>& tasks, const std::string& path);

}  // namespace tb
