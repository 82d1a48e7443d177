#include "tb/types.hpp"

#include <algorithm>
#include <sstream>

namespace tb {

TypeRef var(std::string name) { return std::make_shared<Type>(Var{std::move(name)}); }
TypeRef con(std::string name) { return std::make_shared<Type>(Con{std::move(name)}); }
TypeRef app(TypeRef head, TypeRef arg) {
  return std::make_shared<Type>(App{std::move(head), std::move(arg)});
}
TypeRef arrow(TypeRef from, TypeRef to) {
  return std::make_shared<Type>(Arrow{std::move(from), std::move(to)});
}
TypeRef list_of(TypeRef elem) { return std::make_shared<Type>(ListOf{std::move(elem)}); }
TypeRef tuple(std::vector<TypeRef> elems) {
  return std::make_shared<Type>(Tuple{std::move(elems)});
}
TypeRef unit() { return std::make_shared<Type>(Unit{}); }
TypeRef forall(std::vector<std::string> binders, std::vector<Constraint> context,
               TypeRef body) {
  return std::make_shared<Type>(
      Forall{std::move(binders), std::move(context), std::move(body)});
}

bool equal(const TypeRef& a, const TypeRef& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  const auto& na = a->node();
  const auto& nb = b->node();
  if (na.index() != nb.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const T& y = std::get<T>(nb);
        if constexpr (std::is_same_v<T, Var>) {
          return x.name == y.name;
        } else if constexpr (std::is_same_v<T, Con>) {
          return x.name == y.name;
        } else if constexpr (std::is_same_v<T, App>) {
          return equal(x.head, y.head) && equal(x.arg, y.arg);
        } else if constexpr (std::is_same_v<T, Arrow>) {
          return equal(x.from, y.from) && equal(x.to, y.to);
        } else if constexpr (std::is_same_v<T, ListOf>) {
          return equal(x.elem, y.elem);
        } else if constexpr (std::is_same_v<T, Tuple>) {
          if (x.elems.size() != y.elems.size()) return false;
          for (std::size_t i = 0; i < x.elems.size(); ++i)
            if (!equal(x.elems[i], y.elems[i])) return false;
          return true;
        } else if constexpr (std::is_same_v<T, Unit>) {
          return true;
        } else {
          const Forall& fx = x;
          const Forall& fy = std::get<Forall>(nb);
          if (fx.binders != fy.binders) return false;
          if (fx.context.size() != fy.context.size()) return false;
          for (std::size_t i = 0; i < fx.context.size(); ++i)
            if (!equal(fx.context[i], fy.context[i])) return false;
          return equal(fx.body, fy.body);
        }
      },
      na);
}

bool equal(const Constraint& a, const Constraint& b) {
  if (a.cls != b.cls || a.args.size() != b.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!equal(a.args[i], b.args[i])) return false;
  return true;
}

bool equal(const TypeSignature& a, const TypeSignature& b) {
  if (a.binding != b.binding || a.context.size() != b.context.size()) return false;
  for (std::size_t i = 0; i < a.context.size(); ++i)
    if (!equal(a.context[i], b.context[i])) return false;
  return equal(a.body, b.body);
}

namespace {

// Precedence contexts for minimal parenthesization.
enum class Pos { Top, ArrowDomain, AppArg };

void print(std::ostream& os, const TypeRef& t, Pos pos);

void print_applied(std::ostream& os, const TypeRef& t) {
  // Flatten the application spine so `App(App(Either, a), b)` prints as
  // `Either a b`.
  if (const App* a = t->as<App>()) {
    print_applied(os, a->head);
    os << ' ';
    print(os, a->arg, Pos::AppArg);
  } else {
    print(os, t, Pos::AppArg);
  }
}

void print(std::ostream& os, const TypeRef& t, Pos pos) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Var>) {
          os << x.name;
        } else if constexpr (std::is_same_v<T, Con>) {
          os << x.name;
        } else if constexpr (std::is_same_v<T, App>) {
          bool parens = pos == Pos::AppArg;
          if (parens) os << '(';
          print_applied(os, t);
          if (parens) os << ')';
        } else if constexpr (std::is_same_v<T, Arrow>) {
          bool parens = pos != Pos::Top;
          if (parens) os << '(';
          print(os, x.from, Pos::ArrowDomain);
          os << " -> ";
          print(os, x.to, Pos::Top);
          if (parens) os << ')';
        } else if constexpr (std::is_same_v<T, ListOf>) {
          os << '[';
          print(os, x.elem, Pos::Top);
          os << ']';
        } else if constexpr (std::is_same_v<T, Tuple>) {
          os << '(';
          for (std::size_t i = 0; i < x.elems.size(); ++i) {
            if (i) os << ", ";
            print(os, x.elems[i], Pos::Top);
          }
          os << ')';
        } else if constexpr (std::is_same_v<T, Unit>) {
          os << "()";
        } else {
          const Forall& f = x;
          bool parens = pos != Pos::Top;
          if (parens) os << '(';
          os << "forall";
          for (const auto& b : f.binders) os << ' ' << b;
          os << ". ";
          os << print_context(f.context);
          print(os, f.body, Pos::Top);
          if (parens) os << ')';
        }
      },
      t->node());
}

}  // namespace

std::string print_type(const TypeRef& t) {
  std::ostringstream os;
  print(os, t, Pos::Top);
  return os.str();
}

std::string print_constraint(const Constraint& c) {
  std::ostringstream os;
  os << c.cls;
  for (const auto& a : c.args) {
    os << ' ';
    print(os, a, Pos::AppArg);
  }
  return os.str();
}

std::string print_context(const std::vector<Constraint>& context) {
  if (context.empty()) return "";
  std::ostringstream os;
  if (context.size() == 1) {
    os << print_constraint(context[0]);
  } else {
    os << '(';
    for (std::size_t i = 0; i < context.size(); ++i) {
      if (i) os << ", ";
      os << print_constraint(context[i]);
    }
    os << ')';
  }
  os << " => ";
  return os.str();
}

std::string print_signature(const TypeSignature& sig) {
  return sig.binding + " :: " + print_context(sig.context) + print_type(sig.body);
}

namespace {

void collect_free(const TypeRef& t, std::vector<std::string>& bound,
                  std::vector<std::string>& out) {
  auto seen = [&](const std::string& n) {
    return std::find(out.begin(), out.end(), n) != out.end();
  };
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Var>) {
          bool is_bound =
              std::find(bound.begin(), bound.end(), x.name) != bound.end();
          if (!is_bound && !seen(x.name)) out.push_back(x.name);
        } else if constexpr (std::is_same_v<T, App>) {
          collect_free(x.head, bound, out);
          collect_free(x.arg, bound, out);
        } else if constexpr (std::is_same_v<T, Arrow>) {
          collect_free(x.from, bound, out);
          collect_free(x.to, bound, out);
        } else if constexpr (std::is_same_v<T, ListOf>) {
          collect_free(x.elem, bound, out);
        } else if constexpr (std::is_same_v<T, Tuple>) {
          for (const auto& e : x.elems) collect_free(e, bound, out);
        } else if constexpr (std::is_same_v<T, Forall>) {
          std::size_t mark = bound.size();
          for (const auto& b : x.binders) bound.push_back(b);
          for (const auto& c : x.context)
            for (const auto& a : c.args) collect_free(a, bound, out);
          collect_free(x.body, bound, out);
          bound.resize(mark);
        }
      },
      t->node());
}

}  // namespace

std::vector<std::string> free_type_variables(const TypeRef& t) {
  std::vector<std::string> bound;
  std::vector<std::string> out;
  collect_free(t, bound, out);
  return out;
}

std::vector<std::string> free_type_variables(const TypeSignature& sig) {
  std::vector<std::string> bound;
  std::vector<std::string> out;
  for (const auto& c : sig.context)
    for (const auto& a : c.args) collect_free(a, bound, out);
  collect_free(sig.body, bound, out);
  return out;
}

}  // namespace tb
