#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tb/token.hpp"
#include "tb/types.hpp"

namespace tb {

// Parses `name :: type` (name may be `(op)` style). Throws SyntaxError with a
// position, or UnsupportedSyntax for constructs outside the supported subset.
TypeSignature parse_signature(std::string_view text);

// Parses a bare type, e.g. a model answer with the hook already removed.
TypeRef parse_type(std::string_view text);

// Optional context before a bare type: `Eq a => a -> Bool`.
struct ContextAndType {
  std::vector<Constraint> context;
  TypeRef body;
};
ContextAndType parse_context_and_type(std::string_view text);

// A class declaration block:
//
//   class Eq a => Ord a where
//     compare :: a -> a -> Ordering
//
// Method signatures may carry their own contexts.
struct ClassDef {
  std::vector<Constraint> supers;
  std::string name;
  std::vector<std::string> vars;
  std::vector<TypeSignature> methods;
};

ClassDef parse_class_def(std::string_view block);
std::string print_class_def(const ClassDef& def);

}  // namespace tb
