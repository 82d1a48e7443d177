#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "tb/types.hpp"

namespace tb {

// A constraint names a variable that never occurs in the body.
struct DanglingConstraintVariable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Alpha-normal form: variables renamed positionally (v1, v2, ...) in
// first-occurrence order, scope by scope; context sorted as a multiset.
// Two signatures are alpha-equivalent iff their canonical forms are
// structurally identical.
struct CanonicalForm {
  TypeRef body;
  std::vector<Constraint> context;
};

bool equal(const CanonicalForm& a, const CanonicalForm& b);

// Throws DanglingConstraintVariable. `String` is normalized to [Char] before
// anything else; implicit top-level quantification is inserted.
CanonicalForm canonicalize(const TypeSignature& sig);

bool alpha_equivalent(const TypeSignature& truth, const TypeSignature& answer);

// One-way matching: can `general`'s variables be substituted (constraints
// included, by constraint-set inclusion) to yield `specific`?
bool subsumes(const TypeSignature& general, const TypeSignature& specific);

enum class DefnKind { EmptyClass, EmptyData, ConstructorData };

struct TypeDefn {
  DefnKind kind;
  std::string name;
  int arity = 0;  // type parameters; ConstructorData has arity >= 1

  // Haskell source line: class T1 a / data T2 = T2 / data T3 t1 t2
  std::string render() const;
};

struct SynthesisResult {
  std::vector<TypeDefn> defns;
  // Constructors observed at more than one arity (kept at the maximum).
  std::vector<std::string> arity_conflicts;
};

// Collects definitions for every non-builtin type name in the signature:
// context classes as empty classes, applied constructors at their maximum
// observed arity, unapplied constructors as empty data.
SynthesisResult synthesize_definitions(const TypeSignature& sig);

// Union of both sides' definitions, first-seen order, conflicts re-maxed.
std::vector<TypeDefn> merge_definitions(const SynthesisResult& a,
                                        const SynthesisResult& b);

struct PlaceholderUnfillable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Renders the equivalence-proof module for an external compiler. Emission is
// total for any two parsed signatures; whether the proof would compile is
// exactly alpha_equivalent's verdict.
std::string emit_proof_module(const TypeSignature& truth, const TypeSignature& answer,
                              const std::vector<TypeDefn>& defns);

}  // namespace tb
