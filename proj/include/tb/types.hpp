#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace tb {

// Immutable type-expression tree. Nodes are shared so rewrites can reuse
// unchanged subtrees.
class Type;
using TypeRef = std::shared_ptr<const Type>;

struct Var {
  std::string name;  // lowercase-initial
};

struct Con {
  std::string name;  // uppercase-initial
};

// One step of left-nested application: App(App(Either, a), b).
struct App {
  TypeRef head;
  TypeRef arg;
};

struct Arrow {
  TypeRef from;
  TypeRef to;
};

struct ListOf {
  TypeRef elem;
};

// arity >= 2; arity 1 is just grouping and never constructed.
struct Tuple {
  std::vector<TypeRef> elems;
};

struct Unit {};

struct Constraint {
  std::string cls;
  std::vector<TypeRef> args;  // at least one
};

// Explicit quantifier. Implicit quantification is represented by free
// variables; canonicalization inserts the top-level binder.
struct Forall {
  std::vector<std::string> binders;
  std::vector<Constraint> context;
  TypeRef body;
};

class Type {
 public:
  using Node = std::variant<Var, Con, App, Arrow, ListOf, Tuple, Unit, Forall>;

  explicit Type(Node node) : node_(std::move(node)) {}

  const Node& node() const { return node_; }

  template <class T>
  const T* as() const {
    return std::get_if<T>(&node_);
  }

 private:
  Node node_;
};

TypeRef var(std::string name);
TypeRef con(std::string name);
TypeRef app(TypeRef head, TypeRef arg);
TypeRef arrow(TypeRef from, TypeRef to);
TypeRef list_of(TypeRef elem);
TypeRef tuple(std::vector<TypeRef> elems);
TypeRef unit();
TypeRef forall(std::vector<std::string> binders, std::vector<Constraint> context,
               TypeRef body);

// A named signature: binding, optional constraint context, body type.
struct TypeSignature {
  std::string binding;
  std::vector<Constraint> context;
  TypeRef body;
};

bool equal(const TypeRef& a, const TypeRef& b);
bool equal(const Constraint& a, const Constraint& b);
bool equal(const TypeSignature& a, const TypeSignature& b);

// Canonical textual form: single spaces around -> and =>, minimal parentheses,
// tuples as (a, b), single-constraint contexts unparenthesized.
std::string print_type(const TypeRef& t);
std::string print_constraint(const Constraint& c);
std::string print_context(const std::vector<Constraint>& context);
std::string print_signature(const TypeSignature& sig);

// Free variables in first-occurrence order, left-to-right depth-first.
// Variables bound by an enclosing Forall are excluded.
std::vector<std::string> free_type_variables(const TypeRef& t);

// Textual order for a whole signature: context first, then body.
std::vector<std::string> free_type_variables(const TypeSignature& sig);

}  // namespace tb
