#include "tb/equivalence.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace tb {

namespace {

// Single canonical spelling: String becomes [Char] everywhere before any
// comparison, so the harness-level textual rule can never double-rewrite.
TypeRef normalize_string(const TypeRef& t) {
  return std::visit(
      [&](const auto& x) -> TypeRef {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Var>) {
          return t;
        } else if constexpr (std::is_same_v<T, Con>) {
          if (x.name == "String") return list_of(con("Char"));
          return t;
        } else if constexpr (std::is_same_v<T, App>) {
          return app(normalize_string(x.head), normalize_string(x.arg));
        } else if constexpr (std::is_same_v<T, Arrow>) {
          return arrow(normalize_string(x.from), normalize_string(x.to));
        } else if constexpr (std::is_same_v<T, ListOf>) {
          return list_of(normalize_string(x.elem));
        } else if constexpr (std::is_same_v<T, Tuple>) {
          std::vector<TypeRef> elems;
          elems.reserve(x.elems.size());
          for (const auto& e : x.elems) elems.push_back(normalize_string(e));
          return tuple(std::move(elems));
        } else if constexpr (std::is_same_v<T, Unit>) {
          return t;
        } else {
          const Forall& f = x;
          std::vector<Constraint> ctx;
          for (const auto& c : f.context) {
            Constraint nc{c.cls, {}};
            for (const auto& a : c.args) nc.args.push_back(normalize_string(a));
            ctx.push_back(std::move(nc));
          }
          return forall(f.binders, std::move(ctx), normalize_string(f.body));
        }
      },
      t->node());
}

std::vector<Constraint> normalize_string(const std::vector<Constraint>& ctx) {
  std::vector<Constraint> out;
  for (const auto& c : ctx) {
    Constraint nc{c.cls, {}};
    for (const auto& a : c.args) nc.args.push_back(normalize_string(a));
    out.push_back(std::move(nc));
  }
  return out;
}

using Env = std::vector<std::pair<std::string, std::string>>;

const std::string* lookup(const Env& env, const std::string& name) {
  for (auto it = env.rbegin(); it != env.rend(); ++it)
    if (it->first == name) return &it->second;
  return nullptr;
}

// Occurrences of `binders` inside t, first-occurrence order, ignoring
// occurrences shadowed by a nested Forall that rebinds the name.
void binder_occurrences(const TypeRef& t, const std::set<std::string>& binders,
                        std::vector<std::string>& shadow,
                        std::vector<std::string>& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Var>) {
          if (binders.count(x.name) &&
              std::find(shadow.begin(), shadow.end(), x.name) == shadow.end() &&
              std::find(out.begin(), out.end(), x.name) == out.end())
            out.push_back(x.name);
        } else if constexpr (std::is_same_v<T, App>) {
          binder_occurrences(x.head, binders, shadow, out);
          binder_occurrences(x.arg, binders, shadow, out);
        } else if constexpr (std::is_same_v<T, Arrow>) {
          binder_occurrences(x.from, binders, shadow, out);
          binder_occurrences(x.to, binders, shadow, out);
        } else if constexpr (std::is_same_v<T, ListOf>) {
          binder_occurrences(x.elem, binders, shadow, out);
        } else if constexpr (std::is_same_v<T, Tuple>) {
          for (const auto& e : x.elems) binder_occurrences(e, binders, shadow, out);
        } else if constexpr (std::is_same_v<T, Forall>) {
          std::size_t mark = shadow.size();
          for (const auto& b : x.binders) shadow.push_back(b);
          binder_occurrences(x.body, binders, shadow, out);
          for (const auto& c : x.context)
            for (const auto& a : c.args) binder_occurrences(a, binders, shadow, out);
          shadow.resize(mark);
        }
      },
      t->node());
}

struct ConstraintKey {
  std::string key;
  Constraint c;
};

std::vector<Constraint> sort_context(std::vector<Constraint> ctx) {
  std::vector<ConstraintKey> keyed;
  keyed.reserve(ctx.size());
  for (auto& c : ctx) {
    std::string k = c.cls;
    for (const auto& a : c.args) k += "\x1f" + print_type(a);
    keyed.push_back({std::move(k), std::move(c)});
  }
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const ConstraintKey& a, const ConstraintKey& b) {
                     return a.key < b.key;
                   });
  std::vector<Constraint> out;
  out.reserve(keyed.size());
  for (auto& k : keyed) out.push_back(std::move(k.c));
  return out;
}

class Canonicalizer {
 public:
  TypeRef rename(const TypeRef& t, Env& env) {
    return std::visit(
        [&](const auto& x) -> TypeRef {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Var>) {
            const std::string* r = lookup(env, x.name);
            return r ? var(*r) : t;
          } else if constexpr (std::is_same_v<T, Con>) {
            return t;
          } else if constexpr (std::is_same_v<T, App>) {
            return app(rename(x.head, env), rename(x.arg, env));
          } else if constexpr (std::is_same_v<T, Arrow>) {
            return arrow(rename(x.from, env), rename(x.to, env));
          } else if constexpr (std::is_same_v<T, ListOf>) {
            return list_of(rename(x.elem, env));
          } else if constexpr (std::is_same_v<T, Tuple>) {
            std::vector<TypeRef> elems;
            for (const auto& e : x.elems) elems.push_back(rename(e, env));
            return tuple(std::move(elems));
          } else if constexpr (std::is_same_v<T, Unit>) {
            return t;
          } else {
            const Forall& f = x;
            // Binders take positional names in first-occurrence order (body,
            // then context); binders that never occur keep declaration order.
            std::set<std::string> bset(f.binders.begin(), f.binders.end());
            std::vector<std::string> shadow;
            std::vector<std::string> order;
            binder_occurrences(f.body, bset, shadow, order);
            for (const auto& c : f.context)
              for (const auto& a : c.args) binder_occurrences(a, bset, shadow, order);
            for (const auto& b : f.binders)
              if (std::find(order.begin(), order.end(), b) == order.end())
                order.push_back(b);
            std::size_t mark = env.size();
            std::vector<std::string> fresh;
            for (const auto& b : order) {
              std::string name = "v" + std::to_string(next_++);
              env.emplace_back(b, name);
              fresh.push_back(std::move(name));
            }
            std::vector<Constraint> ctx;
            for (const auto& c : f.context) {
              Constraint nc{c.cls, {}};
              for (const auto& a : c.args) nc.args.push_back(rename(a, env));
              ctx.push_back(std::move(nc));
            }
            TypeRef body = rename(f.body, env);
            env.resize(mark);
            return forall(std::move(fresh), sort_context(std::move(ctx)),
                          std::move(body));
          }
        },
        t->node());
  }

  std::string fresh() { return "v" + std::to_string(next_++); }

 private:
  int next_ = 1;
};

}  // namespace

bool equal(const CanonicalForm& a, const CanonicalForm& b) {
  if (a.context.size() != b.context.size()) return false;
  for (std::size_t i = 0; i < a.context.size(); ++i)
    if (!equal(a.context[i], b.context[i])) return false;
  return equal(a.body, b.body);
}

CanonicalForm canonicalize(const TypeSignature& sig) {
  TypeRef body = normalize_string(sig.body);
  std::vector<Constraint> ctx = normalize_string(sig.context);

  std::vector<std::string> free = free_type_variables(body);
  std::set<std::string> free_set(free.begin(), free.end());
  for (const auto& c : ctx) {
    for (const auto& a : c.args) {
      for (const auto& v : free_type_variables(a)) {
        if (!free_set.count(v))
          throw DanglingConstraintVariable("constraint " + print_constraint(c) +
                                           " mentions '" + v +
                                           "' which does not occur in the body");
      }
    }
  }

  Canonicalizer canon;
  Env env;
  for (const auto& v : free) env.emplace_back(v, canon.fresh());

  std::vector<Constraint> renamed_ctx;
  for (const auto& c : ctx) {
    Constraint nc{c.cls, {}};
    for (const auto& a : c.args) nc.args.push_back(canon.rename(a, env));
    renamed_ctx.push_back(std::move(nc));
  }
  return CanonicalForm{canon.rename(body, env), sort_context(std::move(renamed_ctx))};
}

bool alpha_equivalent(const TypeSignature& truth, const TypeSignature& answer) {
  try {
    return equal(canonicalize(truth), canonicalize(answer));
  } catch (const DanglingConstraintVariable&) {
    return false;
  }
}

namespace {

// One-way matcher for subsumes: variables of the general side are flexible,
// the specific side is held rigid (it has been canonicalized already).
class Matcher {
 public:
  explicit Matcher(std::set<std::string> flexible) : flexible_(std::move(flexible)) {}

  bool match(const TypeRef& g, const TypeRef& s) {
    const auto& gn = g->node();
    if (const Var* gv = std::get_if<Var>(&gn)) {
      const std::string* paired = lookup(pairs_, gv->name);
      if (paired) {
        const Var* sv = s->as<Var>();
        return sv && sv->name == *paired;
      }
      if (!flexible_.count(gv->name)) return false;
      auto it = sigma_.find(gv->name);
      if (it != sigma_.end()) return equal(it->second, s);
      for (const auto& v : free_type_variables(s))
        if (local_.count(v)) return false;  // would escape its binder
      sigma_[gv->name] = s;
      return true;
    }
    const auto& sn = s->node();
    if (gn.index() != sn.index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Con>) {
            return x.name == std::get<Con>(sn).name;
          } else if constexpr (std::is_same_v<T, App>) {
            const App& y = std::get<App>(sn);
            return match(x.head, y.head) && match(x.arg, y.arg);
          } else if constexpr (std::is_same_v<T, Arrow>) {
            const Arrow& y = std::get<Arrow>(sn);
            return match(x.from, y.from) && match(x.to, y.to);
          } else if constexpr (std::is_same_v<T, ListOf>) {
            return match(x.elem, std::get<ListOf>(sn).elem);
          } else if constexpr (std::is_same_v<T, Tuple>) {
            const Tuple& y = std::get<Tuple>(sn);
            if (x.elems.size() != y.elems.size()) return false;
            for (std::size_t i = 0; i < x.elems.size(); ++i)
              if (!match(x.elems[i], y.elems[i])) return false;
            return true;
          } else if constexpr (std::is_same_v<T, Unit>) {
            return true;
          } else if constexpr (std::is_same_v<T, Forall>) {
            return match_forall(x, std::get<Forall>(sn));
          } else {
            return false;  // Var handled above
          }
        },
        gn);
  }

  bool match_context(const std::vector<Constraint>& gctx,
                     const std::vector<Constraint>& sctx) {
    for (const auto& c : gctx) {
      Constraint want{c.cls, {}};
      for (const auto& a : c.args) {
        TypeRef sub = substitute(a);
        if (!sub) return false;  // an unbound flexible variable
        want.args.push_back(std::move(sub));
      }
      bool found = false;
      for (const auto& sc : sctx)
        if (equal(want, sc)) {
          found = true;
          break;
        }
      if (!found) return false;
    }
    return true;
  }

 private:
  bool match_forall(const Forall& g, const Forall& s) {
    if (g.binders.size() != s.binders.size()) return false;
    // Pair binders positionally after putting the general side's binders in
    // first-occurrence order, mirroring canonicalization of the rigid side.
    std::set<std::string> bset(g.binders.begin(), g.binders.end());
    std::vector<std::string> shadow;
    std::vector<std::string> order;
    binder_occurrences(g.body, bset, shadow, order);
    for (const auto& c : g.context)
      for (const auto& a : c.args) binder_occurrences(a, bset, shadow, order);
    for (const auto& b : g.binders)
      if (std::find(order.begin(), order.end(), b) == order.end()) order.push_back(b);

    std::size_t mark = pairs_.size();
    std::vector<std::string> added;
    for (std::size_t i = 0; i < order.size(); ++i) {
      pairs_.emplace_back(order[i], s.binders[i]);
      local_.insert(s.binders[i]);
      added.push_back(s.binders[i]);
    }
    bool ok = match(g.body, s.body) && match_context(g.context, s.context);
    pairs_.resize(mark);
    for (const auto& a : added) local_.erase(a);
    return ok;
  }

  // Applies the accumulated substitution and binder pairing to a general-side
  // term; null when it contains an unbound flexible variable.
  TypeRef substitute(const TypeRef& t) {
    return std::visit(
        [&](const auto& x) -> TypeRef {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Var>) {
            const std::string* paired = lookup(pairs_, x.name);
            if (paired) return var(*paired);
            auto it = sigma_.find(x.name);
            return it != sigma_.end() ? it->second : nullptr;
          } else if constexpr (std::is_same_v<T, Con>) {
            return t;
          } else if constexpr (std::is_same_v<T, App>) {
            TypeRef h = substitute(x.head), a = substitute(x.arg);
            return h && a ? app(std::move(h), std::move(a)) : nullptr;
          } else if constexpr (std::is_same_v<T, Arrow>) {
            TypeRef f = substitute(x.from), to = substitute(x.to);
            return f && to ? arrow(std::move(f), std::move(to)) : nullptr;
          } else if constexpr (std::is_same_v<T, ListOf>) {
            TypeRef e = substitute(x.elem);
            return e ? list_of(std::move(e)) : nullptr;
          } else if constexpr (std::is_same_v<T, Tuple>) {
            std::vector<TypeRef> elems;
            for (const auto& e : x.elems) {
              TypeRef s = substitute(e);
              if (!s) return nullptr;
              elems.push_back(std::move(s));
            }
            return tuple(std::move(elems));
          } else if constexpr (std::is_same_v<T, Unit>) {
            return t;
          } else {
            const Forall& f = x;
            std::vector<Constraint> ctx;
            for (const auto& c : f.context) {
              Constraint nc{c.cls, {}};
              for (const auto& a : c.args) {
                TypeRef sa = substitute(a);
                if (!sa) return nullptr;
                nc.args.push_back(std::move(sa));
              }
              ctx.push_back(std::move(nc));
            }
            TypeRef body = substitute(f.body);
            return body ? forall(f.binders, std::move(ctx), std::move(body)) : nullptr;
          }
        },
        t->node());
  }

  std::set<std::string> flexible_;
  std::map<std::string, TypeRef> sigma_;
  Env pairs_;                    // general binder -> specific binder
  std::set<std::string> local_;  // specific-side binders currently in scope
};

}  // namespace

bool subsumes(const TypeSignature& general, const TypeSignature& specific) {
  CanonicalForm s;
  try {
    s = canonicalize(specific);
  } catch (const DanglingConstraintVariable&) {
    return false;
  }
  TypeSignature g{general.binding, normalize_string(general.context),
                  normalize_string(general.body)};
  std::vector<std::string> free = free_type_variables(g);
  Matcher m(std::set<std::string>(free.begin(), free.end()));
  return m.match(g.body, s.body) && m.match_context(g.context, s.context);
}

std::string TypeDefn::render() const {
  switch (kind) {
    case DefnKind::EmptyClass:
      return "class " + name + " a";
    case DefnKind::EmptyData:
      return "data " + name + " = " + name;
    case DefnKind::ConstructorData: {
      std::string out = "data " + name;
      for (int i = 1; i <= arity; ++i) out += " t" + std::to_string(i);
      return out;
    }
  }
  return {};
}

namespace {

const std::set<std::string>& predefined_names() {
  // Covered by the proof template's synonym block.
  static const std::set<std::string> names = {"Int",   "Bool",   "Char",
                                              "Float", "Double", "Natural"};
  return names;
}

struct DefnCollector {
  std::vector<std::string> class_order;
  std::set<std::string> class_seen;
  std::vector<std::string> ctor_order;
  std::map<std::string, std::set<int>> arities;

  void add_class(const std::string& name) {
    if (class_seen.insert(name).second) class_order.push_back(name);
  }

  void add_ctor(const std::string& name, int arity) {
    if (!arities.count(name)) ctor_order.push_back(name);
    arities[name].insert(arity);
  }

  void constraint(const Constraint& c) {
    add_class(c.cls);
    for (const auto& a : c.args) walk(a);
  }

  void walk(const TypeRef& t) {
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Con>) {
            add_ctor(x.name, 0);
          } else if constexpr (std::is_same_v<T, App>) {
            // Peel the application spine to find the constructor and its
            // applied arity.
            TypeRef head = t;
            int arity = 0;
            while (const App* a = head->as<App>()) {
              ++arity;
              head = a->head;
            }
            if (const Con* c = head->as<Con>())
              add_ctor(c->name, arity);
            else
              walk(head);
            head = t;
            while (const App* a = head->as<App>()) {
              walk(a->arg);
              head = a->head;
            }
          } else if constexpr (std::is_same_v<T, Arrow>) {
            walk(x.from);
            walk(x.to);
          } else if constexpr (std::is_same_v<T, ListOf>) {
            walk(x.elem);
          } else if constexpr (std::is_same_v<T, Tuple>) {
            for (const auto& e : x.elems) walk(e);
          } else if constexpr (std::is_same_v<T, Forall>) {
            for (const auto& c : x.context) constraint(c);
            walk(x.body);
          }
        },
        t->node());
  }
};

}  // namespace

SynthesisResult synthesize_definitions(const TypeSignature& sig) {
  DefnCollector col;
  for (const auto& c : normalize_string(sig.context)) col.constraint(c);
  col.walk(normalize_string(sig.body));

  SynthesisResult out;
  for (const auto& name : col.class_order)
    out.defns.push_back(TypeDefn{DefnKind::EmptyClass, name, 1});
  for (const auto& name : col.ctor_order) {
    if (predefined_names().count(name)) continue;
    const auto& seen = col.arities[name];
    int max = *seen.rbegin();
    if (seen.size() > 1) out.arity_conflicts.push_back(name);
    out.defns.push_back(TypeDefn{
        max > 0 ? DefnKind::ConstructorData : DefnKind::EmptyData, name, max});
  }
  return out;
}

std::vector<TypeDefn> merge_definitions(const SynthesisResult& a,
                                        const SynthesisResult& b) {
  std::vector<TypeDefn> out;
  auto find = [&](DefnKind kind, const std::string& name) -> TypeDefn* {
    for (auto& d : out) {
      bool d_class = d.kind == DefnKind::EmptyClass;
      bool want_class = kind == DefnKind::EmptyClass;
      if (d_class == want_class && d.name == name) return &d;
    }
    return nullptr;
  };
  for (const auto* side : {&a, &b}) {
    for (const auto& d : side->defns) {
      if (TypeDefn* prev = find(d.kind, d.name)) {
        if (d.arity > prev->arity) {
          prev->arity = d.arity;
          prev->kind = d.kind;
        }
      } else {
        out.push_back(d);
      }
    }
  }
  return out;
}

namespace {

void check_distinct(const std::vector<std::string>& vars, const char* side) {
  std::set<std::string> seen;
  for (const auto& v : vars)
    if (!seen.insert(v).second)
      throw PlaceholderUnfillable(std::string(side) +
                                  " variable list repeats '" + v + "'");
}

std::string spaced(const std::vector<std::string>& vars) {
  std::string out;
  for (const auto& v : vars) out += " " + v;
  return out;
}

std::string qualified(const TypeSignature& sig) {
  return print_context(sig.context) + print_type(sig.body);
}

}  // namespace

std::string emit_proof_module(const TypeSignature& truth, const TypeSignature& answer,
                              const std::vector<TypeDefn>& defns) {
  std::vector<std::string> tvars = free_type_variables(truth);
  std::vector<std::string> avars = free_type_variables(answer);
  check_distinct(tvars, "truth");
  check_distinct(avars, "answer");

  std::ostringstream os;
  os << "{-# LANGUAGE TypeOperators #-}\n"
        "{-# LANGUAGE ImpredicativeTypes #-}\n"
        "module Check where\n"
        "\n"
        "import Data.Type.Equality\n"
        "\n"
        "-- Some predefined types synonyms to avoid name clashes\n"
        "type Int_ = Int\n"
        "type Bool_ = Bool\n"
        "type Char_ = Char\n"
        "type Float_ = Float\n"
        "type Double_ = Double\n"
        "data Natural = Natural\n"
        "\n";
  for (std::size_t i = 0; i < defns.size(); ++i) os << defns[i].render() << "\n";
  os << "\n"
     << "type TRUTH" << spaced(tvars) << " = " << qualified(truth) << "\n"
     << "type ANSWER" << spaced(avars) << " = " << qualified(answer) << "\n"
     << "\n"
     << "proof :: TRUTH" << spaced(tvars) << " :~: ANSWER" << spaced(tvars) << "\n"
     << "proof = Refl\n";
  return os.str();
}

}  // namespace tb
