#include "tb/rewrite.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "tb/corpus.hpp"
#include "tb/parse.hpp"

namespace tb {

std::optional<std::string> NamingScheme::nl_name(std::size_t index) const {
  if (!nl_dict.empty())
    return index <= nl_dict.size() ? std::optional(nl_dict[index - 1]) : std::nullopt;
  return nl_prefix + std::to_string(index);
}

std::optional<std::string> NamingScheme::var_name(std::size_t index) const {
  if (!var_dict.empty())
    return index <= var_dict.size() ? std::optional(var_dict[index - 1]) : std::nullopt;
  return var_prefix + std::to_string(index);
}

std::optional<std::string> NamingScheme::binding_name(std::size_t index) const {
  if (!binding_dict.empty())
    return index <= binding_dict.size() ? std::optional(binding_dict[index - 1])
                                        : std::nullopt;
  return binding_prefix + std::to_string(index);
}

Json RenamingPlan::to_json() const {
  Json tv = Json::object();
  for (const auto& [scope, m] : type_vars) {
    Json mm = Json::object();
    for (const auto& [k, v] : m) mm[k] = v;
    tv[scope] = std::move(mm);
  }
  Json nl = Json::object();
  for (const auto& [k, v] : nl_types) nl[k] = v;
  Json bs = Json::object();
  for (const auto& [k, v] : bindings) bs[k] = v;
  return Json{{"nl_types", std::move(nl)},
              {"type_vars", std::move(tv)},
              {"bindings", std::move(bs)},
              {"dependency_order", dependency_order}};
}

RenamingPlan RenamingPlan::from_json(const Json& j) {
  RenamingPlan p;
  for (const auto& [k, v] : j.at("nl_types").items())
    p.nl_types[k] = v.get<std::string>();
  for (const auto& [scope, m] : j.at("type_vars").items())
    for (const auto& [k, v] : m.items())
      p.type_vars[scope][k] = v.get<std::string>();
  for (const auto& [k, v] : j.at("bindings").items())
    p.bindings[k] = v.get<std::string>();
  p.dependency_order = j.at("dependency_order").get<std::vector<std::size_t>>();
  return p;
}

RewriteResult RewriteResult::success(Task t, RenamingPlan p) {
  RewriteResult r;
  r.task = std::move(t);
  r.plan = std::move(p);
  return r;
}

RewriteResult RewriteResult::failure(RewriteError e) {
  RewriteResult r;
  r.error = std::move(e);
  return r;
}

namespace {

using StrMap = std::map<std::string, std::string>;

std::string mapped(const StrMap& m, const std::string& name) {
  auto it = m.find(name);
  return it == m.end() ? name : it->second;
}

TypeRef rename_tree(const TypeRef& t, const StrMap& vars, const StrMap& cons);

Constraint rename_constraint(const Constraint& c, const StrMap& vars,
                             const StrMap& cons) {
  Constraint out{mapped(cons, c.cls), {}};
  for (const auto& a : c.args) out.args.push_back(rename_tree(a, vars, cons));
  return out;
}

TypeRef rename_tree(const TypeRef& t, const StrMap& vars, const StrMap& cons) {
  return std::visit(
      [&](const auto& x) -> TypeRef {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Var>) {
          return var(mapped(vars, x.name));
        } else if constexpr (std::is_same_v<T, Con>) {
          return con(mapped(cons, x.name));
        } else if constexpr (std::is_same_v<T, App>) {
          return app(rename_tree(x.head, vars, cons), rename_tree(x.arg, vars, cons));
        } else if constexpr (std::is_same_v<T, Arrow>) {
          return arrow(rename_tree(x.from, vars, cons), rename_tree(x.to, vars, cons));
        } else if constexpr (std::is_same_v<T, ListOf>) {
          return list_of(rename_tree(x.elem, vars, cons));
        } else if constexpr (std::is_same_v<T, Tuple>) {
          std::vector<TypeRef> elems;
          for (const auto& e : x.elems) elems.push_back(rename_tree(e, vars, cons));
          return tuple(std::move(elems));
        } else if constexpr (std::is_same_v<T, Unit>) {
          return t;
        } else {
          const Forall& f = x;
          std::vector<std::string> binders;
          for (const auto& b : f.binders) binders.push_back(mapped(vars, b));
          std::vector<Constraint> ctx;
          for (const auto& c : f.context)
            ctx.push_back(rename_constraint(c, vars, cons));
          return forall(std::move(binders), std::move(ctx),
                        rename_tree(f.body, vars, cons));
        }
      },
      t->node());
}

TypeSignature rename_signature(const TypeSignature& sig, const StrMap& vars,
                               const StrMap& cons, const StrMap& bindings) {
  TypeSignature out;
  out.binding = mapped(bindings, sig.binding);
  for (const auto& c : sig.context)
    out.context.push_back(rename_constraint(c, vars, cons));
  out.body = rename_tree(sig.body, vars, cons);
  return out;
}

ClassDef rename_class(const ClassDef& def, const StrMap& vars, const StrMap& cons,
                      const StrMap& bindings) {
  ClassDef out;
  for (const auto& s : def.supers)
    out.supers.push_back(rename_constraint(s, vars, cons));
  out.name = mapped(cons, def.name);
  for (const auto& v : def.vars) out.vars.push_back(mapped(vars, v));
  for (const auto& m : def.methods)
    out.methods.push_back(rename_signature(m, vars, cons, bindings));
  return out;
}

// First-occurrence collectors in textual (print) order.

void note(const std::string& name, std::vector<std::string>& order,
          std::set<std::string>& seen) {
  if (seen.insert(name).second) order.push_back(name);
}

void scan_cons(const TypeRef& t, std::vector<std::string>& order,
               std::set<std::string>& seen);

void scan_cons(const Constraint& c, std::vector<std::string>& order,
               std::set<std::string>& seen) {
  note(c.cls, order, seen);
  for (const auto& a : c.args) scan_cons(a, order, seen);
}

void scan_cons(const TypeRef& t, std::vector<std::string>& order,
               std::set<std::string>& seen) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Con>) {
          note(x.name, order, seen);
        } else if constexpr (std::is_same_v<T, App>) {
          scan_cons(x.head, order, seen);
          scan_cons(x.arg, order, seen);
        } else if constexpr (std::is_same_v<T, Arrow>) {
          scan_cons(x.from, order, seen);
          scan_cons(x.to, order, seen);
        } else if constexpr (std::is_same_v<T, ListOf>) {
          scan_cons(x.elem, order, seen);
        } else if constexpr (std::is_same_v<T, Tuple>) {
          for (const auto& e : x.elems) scan_cons(e, order, seen);
        } else if constexpr (std::is_same_v<T, Forall>) {
          for (const auto& c : x.context) scan_cons(c, order, seen);
          scan_cons(x.body, order, seen);
        }
      },
      t->node());
}

void scan_cons(const TypeSignature& sig, std::vector<std::string>& order,
               std::set<std::string>& seen) {
  for (const auto& c : sig.context) scan_cons(c, order, seen);
  scan_cons(sig.body, order, seen);
}

void scan_vars(const TypeRef& t, std::vector<std::string>& order,
               std::set<std::string>& seen);

void scan_vars(const Constraint& c, std::vector<std::string>& order,
               std::set<std::string>& seen) {
  for (const auto& a : c.args) scan_vars(a, order, seen);
}

void scan_vars(const TypeRef& t, std::vector<std::string>& order,
               std::set<std::string>& seen) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Var>) {
          note(x.name, order, seen);
        } else if constexpr (std::is_same_v<T, App>) {
          scan_vars(x.head, order, seen);
          scan_vars(x.arg, order, seen);
        } else if constexpr (std::is_same_v<T, Arrow>) {
          scan_vars(x.from, order, seen);
          scan_vars(x.to, order, seen);
        } else if constexpr (std::is_same_v<T, ListOf>) {
          scan_vars(x.elem, order, seen);
        } else if constexpr (std::is_same_v<T, Tuple>) {
          for (const auto& e : x.elems) scan_vars(e, order, seen);
        } else if constexpr (std::is_same_v<T, Forall>) {
          for (const auto& b : x.binders) note(b, order, seen);
          for (const auto& c : x.context) scan_vars(c, order, seen);
          scan_vars(x.body, order, seen);
        }
      },
      t->node());
}

void scan_vars(const TypeSignature& sig, std::vector<std::string>& order,
               std::set<std::string>& seen) {
  for (const auto& c : sig.context) scan_vars(c, order, seen);
  scan_vars(sig.body, order, seen);
}

// Parsed view of a task's dependency list.
struct ParsedDeps {
  std::vector<std::optional<TypeSignature>> sigs;   // per position
  std::vector<std::optional<ClassDef>> classes;     // per position
};

ParsedDeps parse_deps(const Task& task) {
  ParsedDeps out;
  out.sigs.resize(task.dependencies.size());
  out.classes.resize(task.dependencies.size());
  for (std::size_t i = 0; i < task.dependencies.size(); ++i) {
    const auto& d = task.dependencies[i];
    if (d.kind == DependencyDecl::Kind::Signature)
      out.sigs[i] = d.parsed ? *d.parsed : parse_signature(d.text);
    else
      out.classes[i] = parse_class_def(d.text);
  }
  return out;
}

// Canonical binding order: target, then first call occurrence in the
// implementation, then uncalled signature decls in declaration order, then
// class-definition-only methods. This is what makes the NL scan order
// independent of whether the binding pass already reordered the lines.
std::vector<std::string> binding_order(const Task& task, const ParsedDeps& deps) {
  std::vector<std::string> order;
  std::set<std::string> seen;
  note(task.target, order, seen);
  for (const auto& name : extract_called_bindings(task.implementation))
    note(name, order, seen);
  for (const auto& sig : deps.sigs)
    if (sig) note(sig->binding, order, seen);
  for (const auto& cls : deps.classes)
    if (cls)
      for (const auto& m : cls->methods) note(m.binding, order, seen);
  return order;
}

std::optional<RewriteError> check_renaming(const std::string& op, const StrMap& map,
                                           const std::set<std::string>& universe,
                                           const std::set<std::string>& blocked) {
  std::set<std::string> values;
  for (const auto& [from, to] : map) {
    if (!values.insert(to).second)
      return RewriteError{op, "replacement name '" + to + "' assigned twice", {}};
    if (to == from) continue;
    if (blocked.count(to))
      return RewriteError{op, "replacement name '" + to + "' collides with local '" +
                                  to + "'", {}};
    auto it = map.find(to);
    if (universe.count(to) && (it == map.end() || it->second == to))
      return RewriteError{op, "replacement name '" + to + "' collides with existing '" +
                                  to + "'", {}};
  }
  return std::nullopt;
}

// Token-level identifier replacement for uppercase (NL) names.
std::string rewrite_impl_cons(const std::string& impl, const StrMap& cons) {
  TokenStream ts = tokenize_binding_source(impl);
  std::string out;
  for (const auto& tok : ts.tokens) {
    if (tok.kind == TokenKind::Identifier && !tok.text.empty() &&
        std::isupper((unsigned char)tok.text[0])) {
      out += mapped(cons, tok.text);
    } else {
      out += tok.text;
    }
  }
  return out;
}

// Token-level binding replacement: identifiers by name, symbolic operators to
// backtick-infix, `(+)`-prefix groups to the bare name.
std::string rewrite_impl_bindings(const std::string& impl, const StrMap& map) {
  TokenStream ts = tokenize_binding_source(impl);
  const auto& toks = ts.tokens;
  std::string out;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    const Token& tok = toks[i];
    if (tok.kind == TokenKind::Punct && tok.text == "(") {
      // (+) with nothing but whitespace inside becomes a bare identifier.
      std::size_t j = i + 1;
      while (j < toks.size() && toks[j].kind == TokenKind::Space) ++j;
      if (j < toks.size() && toks[j].kind == TokenKind::Operator) {
        std::size_t k = j + 1;
        while (k < toks.size() && toks[k].kind == TokenKind::Space) ++k;
        if (k < toks.size() && toks[k].kind == TokenKind::Punct &&
            toks[k].text == ")") {
          auto it = map.find("(" + toks[j].text + ")");
          if (it != map.end()) {
            out += it->second;
            i = k;
            continue;
          }
        }
      }
      out += tok.text;
    } else if (tok.kind == TokenKind::Identifier) {
      out += mapped(map, tok.text);
    } else if (tok.kind == TokenKind::Operator) {
      auto it = map.find("(" + tok.text + ")");
      out += it == map.end() ? tok.text : "`" + it->second + "`";
    } else if (tok.kind == TokenKind::Backtick) {
      std::string bare = tok.text.substr(1, tok.text.size() - 2);
      auto it = map.find(bare);
      out += it == map.end() ? tok.text : "`" + it->second + "`";
    } else {
      out += tok.text;
    }
  }
  return out;
}

DependencyDecl emit_signature(const TypeSignature& sig) {
  return DependencyDecl::signature(print_signature(sig));
}

DependencyDecl emit_class(const ClassDef& def) {
  return DependencyDecl::class_definition(print_class_def(def));
}

}  // namespace

RewriteResult rewrite_nl_types(const Task& task, const NamingScheme& scheme) {
  const char* op = "rewrite_nl_types";
  ParsedDeps deps;
  try {
    deps = parse_deps(task);
  } catch (const SyntaxError& e) {
    return RewriteResult::failure({op, e.what(), e.pos});
  }

  // First-appearance scan: signature decls in canonical binding order, class
  // definitions, implementation, ground truth.
  std::vector<std::string> order = binding_order(task, deps);
  std::map<std::string, std::size_t> rank;
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;

  std::vector<std::size_t> sig_positions;
  for (std::size_t i = 0; i < deps.sigs.size(); ++i)
    if (deps.sigs[i]) sig_positions.push_back(i);
  std::stable_sort(sig_positions.begin(), sig_positions.end(),
                   [&](std::size_t a, std::size_t b) {
                     return rank[deps.sigs[a]->binding] < rank[deps.sigs[b]->binding];
                   });

  std::vector<std::string> names;
  std::set<std::string> seen;
  for (std::size_t i : sig_positions) scan_cons(*deps.sigs[i], names, seen);
  for (const auto& cls : deps.classes) {
    if (!cls) continue;
    for (const auto& s : cls->supers) scan_cons(s, names, seen);
    note(cls->name, names, seen);
    for (const auto& m : cls->methods) scan_cons(m, names, seen);
  }
  {
    TokenStream ts;
    try {
      ts = tokenize_binding_source(task.implementation);
    } catch (const SyntaxError& e) {
      return RewriteResult::failure({op, e.what(), e.pos});
    }
    for (const auto& tok : ts.tokens)
      if (tok.kind == TokenKind::Identifier && !tok.text.empty() &&
          std::isupper((unsigned char)tok.text[0]))
        note(tok.text, names, seen);
  }
  scan_cons(task.truth, names, seen);

  StrMap map;
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto fresh = scheme.nl_name(i + 1);
    if (!fresh)
      return RewriteResult::failure(
          {op, "naming scheme exhausted at index " + std::to_string(i + 1), {}});
    map[names[i]] = *fresh;
  }
  if (auto err = check_renaming(op, map, seen, {})) return RewriteResult::failure(*err);

  Task out = task;
  out.dependencies.clear();
  const StrMap no_vars;
  for (std::size_t i = 0; i < task.dependencies.size(); ++i) {
    if (deps.sigs[i])
      out.dependencies.push_back(
          emit_signature(rename_signature(*deps.sigs[i], no_vars, map, {})));
    else
      out.dependencies.push_back(emit_class(rename_class(*deps.classes[i], no_vars, map, {})));
  }
  out.implementation = rewrite_impl_cons(task.implementation, map);
  out.truth = rename_signature(task.truth, no_vars, map, {});

  RenamingPlan plan;
  plan.nl_types = std::move(map);
  return RewriteResult::success(std::move(out), std::move(plan));
}

namespace {

// One variable scope: collects, numbers, and renames; records the plan slice.
std::optional<RewriteError> rename_scope_vars(
    const std::string& scope_key, const NamingScheme& scheme,
    const std::vector<std::string>& occurrence_order,
    const std::set<std::string>& universe, StrMap& map_out,
    std::map<std::string, std::map<std::string, std::string>>& plan_slot) {
  StrMap map;
  for (std::size_t i = 0; i < occurrence_order.size(); ++i) {
    auto fresh = scheme.var_name(i + 1);
    if (!fresh)
      return RewriteError{"rewrite_type_variables",
                          "naming scheme exhausted at index " + std::to_string(i + 1),
                          {}};
    map[occurrence_order[i]] = *fresh;
  }
  if (auto err = check_renaming("rewrite_type_variables", map, universe, {}))
    return err;
  if (!map.empty()) plan_slot[scope_key] = map;
  map_out = std::move(map);
  return std::nullopt;
}

}  // namespace

RewriteResult rewrite_type_variables(const Task& task, const NamingScheme& scheme) {
  const char* op = "rewrite_type_variables";
  ParsedDeps deps;
  try {
    deps = parse_deps(task);
  } catch (const SyntaxError& e) {
    return RewriteResult::failure({op, e.what(), e.pos});
  }

  Task out = task;
  out.dependencies.clear();
  RenamingPlan plan;
  const StrMap no_cons;

  for (std::size_t i = 0; i < task.dependencies.size(); ++i) {
    std::string key = std::to_string(i);
    std::vector<std::string> order;
    std::set<std::string> seen;
    if (deps.sigs[i]) {
      scan_vars(*deps.sigs[i], order, seen);
      StrMap map;
      if (auto err = rename_scope_vars(key, scheme, order, seen, map, plan.type_vars))
        return RewriteResult::failure(*err);
      out.dependencies.push_back(
          emit_signature(rename_signature(*deps.sigs[i], map, no_cons, {})));
    } else {
      // One scope per class block: header variables bind across all methods.
      const ClassDef& def = *deps.classes[i];
      for (const auto& s : def.supers) scan_vars(s, order, seen);
      for (const auto& v : def.vars) note(v, order, seen);
      for (const auto& m : def.methods) scan_vars(m, order, seen);
      StrMap map;
      if (auto err = rename_scope_vars(key, scheme, order, seen, map, plan.type_vars))
        return RewriteResult::failure(*err);
      out.dependencies.push_back(emit_class(rename_class(def, map, no_cons, {})));
    }
  }

  {
    std::vector<std::string> order;
    std::set<std::string> seen;
    scan_vars(task.truth, order, seen);
    StrMap map;
    if (auto err = rename_scope_vars("truth", scheme, order, seen, map, plan.type_vars))
      return RewriteResult::failure(*err);
    out.truth = rename_signature(task.truth, map, no_cons, {});
  }
  return RewriteResult::success(std::move(out), std::move(plan));
}

RewriteResult rewrite_bindings(const Task& task, const NamingScheme& scheme) {
  const char* op = "rewrite_bindings";
  ParsedDeps deps;
  std::set<std::string> locals;
  std::vector<std::string> called;
  try {
    deps = parse_deps(task);
    locals = bound_term_names(task.implementation);
    called = extract_called_bindings(task.implementation);
  } catch (const SyntaxError& e) {
    return RewriteResult::failure({op, e.what(), e.pos});
  }

  std::set<std::string> declared;
  for (const auto& sig : deps.sigs)
    if (sig) declared.insert(sig->binding);
  for (const auto& cls : deps.classes)
    if (cls)
      for (const auto& m : cls->methods) declared.insert(m.binding);
  for (const auto& name : called)
    if (!declared.count(name))
      return RewriteResult::failure(
          {op, "called binding '" + name + "' has no dependency entry", {}});

  std::vector<std::string> order = binding_order(task, deps);
  StrMap map;
  for (std::size_t i = 0; i < order.size(); ++i) {
    auto fresh = scheme.binding_name(i + 1);
    if (!fresh)
      return RewriteResult::failure(
          {op, "naming scheme exhausted at index " + std::to_string(i + 1), {}});
    map[order[i]] = *fresh;
  }
  std::set<std::string> universe(order.begin(), order.end());
  std::set<std::string> blocked;
  for (const auto& l : locals)
    if (!map.count(l)) blocked.insert(l);
  if (auto err = check_renaming(op, map, universe, blocked))
    return RewriteResult::failure(*err);

  std::map<std::string, std::size_t> rank;
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;

  // Signature decls sorted by assigned index; class definitions keep their
  // relative order after them.
  std::vector<std::size_t> positions;
  for (std::size_t i = 0; i < task.dependencies.size(); ++i) positions.push_back(i);
  std::stable_sort(positions.begin(), positions.end(), [&](std::size_t a, std::size_t b) {
    bool sa = deps.sigs[a].has_value(), sb = deps.sigs[b].has_value();
    if (sa != sb) return sa;  // signatures first
    if (!sa) return false;    // class defs keep relative order
    return rank[deps.sigs[a]->binding] < rank[deps.sigs[b]->binding];
  });

  Task out = task;
  out.dependencies.clear();
  RenamingPlan plan;
  const StrMap none;
  for (std::size_t i : positions) {
    if (deps.sigs[i])
      out.dependencies.push_back(
          emit_signature(rename_signature(*deps.sigs[i], none, none, map)));
    else
      out.dependencies.push_back(emit_class(rename_class(*deps.classes[i], none, none, map)));
    plan.dependency_order.push_back(i);
  }
  out.implementation = rewrite_impl_bindings(task.implementation, map);
  out.target = mapped(map, task.target);
  out.truth = rename_signature(task.truth, none, none, map);
  plan.bindings = std::move(map);
  return RewriteResult::success(std::move(out), std::move(plan));
}

RewriteResult alpha_rewrite(const Task& task, const NamingScheme& scheme) {
  RewriteResult nl = rewrite_nl_types(task, scheme);
  if (!nl.ok()) return nl;
  RewriteResult vars = rewrite_type_variables(*nl.task, scheme);
  if (!vars.ok()) return vars;
  RewriteResult bindings = rewrite_bindings(*vars.task, scheme);
  if (!bindings.ok()) return bindings;

  Task out = std::move(*bindings.task);
  out.variant = Variant::Pure;

  std::vector<Violation> violations = validate_task(out);
  if (!violations.empty()) {
    std::string reason = "rewritten task fails validation:";
    for (const auto& v : violations) reason += " " + to_string(v);
    return RewriteResult::failure({"alpha_rewrite", reason, {}});
  }

  RenamingPlan plan;
  plan.nl_types = std::move(nl.plan.nl_types);
  plan.type_vars = std::move(vars.plan.type_vars);
  plan.bindings = std::move(bindings.plan.bindings);
  plan.dependency_order = std::move(bindings.plan.dependency_order);
  return RewriteResult::success(std::move(out), std::move(plan));
}

namespace {

StrMap invert(const StrMap& map) {
  StrMap inv;
  for (const auto& [from, to] : map) inv[to] = from;
  return inv;
}

// Bare f{n} tokens that originally were `(+)`-style operators must re-emit in
// prefix form; backtick occurrences of them re-emit as the bare symbol.
std::string invert_impl(const std::string& impl, const StrMap& binding_inv,
                        const StrMap& cons_inv) {
  TokenStream ts = tokenize_binding_source(impl);
  std::string out;
  for (const auto& tok : ts.tokens) {
    if (tok.kind == TokenKind::Identifier) {
      if (!tok.text.empty() && std::isupper((unsigned char)tok.text[0])) {
        out += mapped(cons_inv, tok.text);
        continue;
      }
      // An operator-named original re-emits in its parenthesized prefix form.
      auto it = binding_inv.find(tok.text);
      out += it == binding_inv.end() ? tok.text : it->second;
    } else if (tok.kind == TokenKind::Backtick) {
      std::string bare = tok.text.substr(1, tok.text.size() - 2);
      auto it = binding_inv.find(bare);
      if (it == binding_inv.end())
        out += tok.text;
      else if (is_operator_name(it->second))
        out += operator_symbol(it->second);
      else
        out += "`" + it->second + "`";
    } else {
      out += tok.text;
    }
  }
  return out;
}

}  // namespace

RewriteResult invert_rewrite(const Task& task, const RenamingPlan& plan) {
  const char* op = "invert_rewrite";
  if (plan.dependency_order.size() != task.dependencies.size())
    return RewriteResult::failure(
        {op, "dependency_order length does not match the task", {}});

  ParsedDeps deps;
  try {
    deps = parse_deps(task);
  } catch (const SyntaxError& e) {
    return RewriteResult::failure({op, e.what(), e.pos});
  }

  StrMap cons_inv = invert(plan.nl_types);
  StrMap binding_inv = invert(plan.bindings);

  Task out = task;
  out.variant = Variant::Regular;
  out.dependencies.assign(task.dependencies.size(), DependencyDecl{});
  for (std::size_t i = 0; i < task.dependencies.size(); ++i) {
    std::size_t original = plan.dependency_order[i];
    std::string scope = std::to_string(original);
    StrMap var_inv;
    auto slot = plan.type_vars.find(scope);
    if (slot != plan.type_vars.end()) var_inv = invert(slot->second);
    if (deps.sigs[i])
      out.dependencies[original] =
          emit_signature(rename_signature(*deps.sigs[i], var_inv, cons_inv, binding_inv));
    else
      out.dependencies[original] =
          emit_class(rename_class(*deps.classes[i], var_inv, cons_inv, binding_inv));
  }

  out.implementation = invert_impl(task.implementation, binding_inv, cons_inv);
  out.target = mapped(binding_inv, task.target);
  StrMap truth_inv;
  auto slot = plan.type_vars.find("truth");
  if (slot != plan.type_vars.end()) truth_inv = invert(slot->second);
  out.truth = rename_signature(task.truth, truth_inv, cons_inv, binding_inv);
  return RewriteResult::success(std::move(out), {});
}

}  // namespace tb
