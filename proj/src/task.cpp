#include "tb/task.hpp"

#include <fstream>
#include <stdexcept>

#include "tb/parse.hpp"

namespace tb {

std::string to_string(Category c) {
  switch (c) {
    case Category::Monomorphic: return "Monomorphic";
    case Category::Parametric: return "Parametric";
    case Category::AdHoc: return "AdHoc";
  }
  return {};
}

std::string to_string(Variant v) {
  return v == Variant::Regular ? "regular" : "pure";
}

Category category_from_string(const std::string& s) {
  if (s == "Monomorphic") return Category::Monomorphic;
  if (s == "Parametric") return Category::Parametric;
  if (s == "AdHoc") return Category::AdHoc;
  throw std::runtime_error("unknown category: " + s);
}

Variant variant_from_string(const std::string& s) {
  if (s == "regular") return Variant::Regular;
  if (s == "pure") return Variant::Pure;
  throw std::runtime_error("unknown variant: " + s);
}

DependencyDecl DependencyDecl::signature(std::string text) {
  DependencyDecl d;
  d.kind = Kind::Signature;
  d.parsed = parse_signature(text);
  d.text = std::move(text);
  return d;
}

DependencyDecl DependencyDecl::class_definition(std::string text) {
  DependencyDecl d;
  d.kind = Kind::ClassDefinition;
  d.text = std::move(text);
  return d;
}

Json to_json(const Task& task) {
  Json deps = Json::array();
  for (const auto& d : task.dependencies) {
    deps.push_back(Json{
        {"kind", d.kind == DependencyDecl::Kind::Signature ? "signature"
                                                           : "class-definition"},
        {"text", d.text},
    });
  }
  return Json{
      {"id", task.id},
      {"category", to_string(task.category)},
      {"dependencies", std::move(deps)},
      {"implementation", task.implementation},
      {"target", task.target},
      {"truth", print_signature(task.truth)},
      {"variant", to_string(task.variant)},
  };
}

Task task_from_json(const Json& j) {
  Task t;
  t.id = j.at("id").get<std::string>();
  t.category = category_from_string(j.at("category").get<std::string>());
  for (const auto& d : j.at("dependencies")) {
    std::string kind = d.at("kind").get<std::string>();
    std::string text = d.at("text").get<std::string>();
    if (kind == "signature")
      t.dependencies.push_back(DependencyDecl::signature(std::move(text)));
    else if (kind == "class-definition")
      t.dependencies.push_back(DependencyDecl::class_definition(std::move(text)));
    else
      throw std::runtime_error("unknown dependency kind: " + kind);
  }
  t.implementation = j.at("implementation").get<std::string>();
  t.target = j.at("target").get<std::string>();
  t.truth = parse_signature(j.at("truth").get<std::string>());
  t.variant = variant_from_string(j.at("variant").get<std::string>());
  return t;
}

std::vector<Task> load_tasks(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open task file: " + path);
  std::vector<Task> tasks;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    tasks.push_back(task_from_json(Json::parse(line)));
  }
  return tasks;
}

void save_tasks(const std::vector<Task>& tasks, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write task file: " + path);
  for (const auto& t : tasks) out << to_json(t).dump() << "\n";
}

}  // namespace tb
