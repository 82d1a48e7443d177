#include <doctest.h>

#include <array>
#include <string>
#include <vector>

#include "tb/corpus.hpp"
#include "tb/equivalence.hpp"
#include "tb/parse.hpp"
#include "tb/rewrite.hpp"

namespace {

// The running example: break in terms of span, not and (.).
tb::Task break_task() {
  tb::Task t;
  t.id = "break@corpus:1";
  t.category = tb::Category::Parametric;
  t.dependencies = {
      tb::DependencyDecl::signature("not :: Bool -> Bool"),
      tb::DependencyDecl::signature("(.) :: (b -> c) -> (a -> b) -> a -> c"),
      tb::DependencyDecl::signature("span :: (a -> Bool) -> [a] -> ([a], [a])"),
  };
  t.implementation = "break p =  span (not . p)";
  t.target = "break";
  t.truth = tb::parse_signature("break :: (a -> Bool) -> [a] -> ([a],[a])");
  t.variant = tb::Variant::Regular;
  return t;
}

std::string dump(const tb::Task& t) { return tb::to_json(t).dump(); }

using Op = tb::RewriteResult (*)(const tb::Task&, const tb::NamingScheme&);

tb::Task apply_chain(const tb::Task& task, const std::array<Op, 3>& ops) {
  tb::Task cur = task;
  for (Op op : ops) {
    auto r = op(cur, {});
    REQUIRE(r.ok());
    cur = *r.task;
  }
  return cur;
}

}  // namespace

TEST_CASE("alpha_rewrite reproduces the worked example") {
  auto r = tb::alpha_rewrite(break_task());
  REQUIRE(r.ok());
  const tb::Task& t = *r.task;

  CHECK(t.target == "f1");
  CHECK(t.variant == tb::Variant::Pure);
  REQUIRE(t.dependencies.size() == 3);
  CHECK(t.dependencies[0].text == "f2 :: (t1 -> T1) -> [t1] -> ([t1], [t1])");
  CHECK(t.dependencies[1].text == "f3 :: T1 -> T1");
  CHECK(t.dependencies[2].text == "f4 :: (t1 -> t2) -> (t3 -> t1) -> t3 -> t2");
  CHECK(t.implementation == "f1 p =  f2 (f3 `f4` p)");
  CHECK(tb::print_signature(t.truth) == "f1 :: (t1 -> T1) -> [t1] -> ([t1], [t1])");

  CHECK(r.plan.bindings.at("break") == "f1");
  CHECK(r.plan.bindings.at("span") == "f2");
  CHECK(r.plan.bindings.at("not") == "f3");
  CHECK(r.plan.bindings.at("(.)") == "f4");
  CHECK(r.plan.nl_types.at("Bool") == "T1");
  CHECK(r.plan.dependency_order == std::vector<std::size_t>{2, 0, 1});
}

TEST_CASE("all six operator orderings agree byte for byte") {
  std::array<Op, 3> ops = {tb::rewrite_nl_types, tb::rewrite_type_variables,
                           tb::rewrite_bindings};
  std::sort(ops.begin(), ops.end());
  tb::Task task = break_task();
  std::string reference;
  do {
    std::string got = dump(apply_chain(task, ops));
    if (reference.empty())
      reference = got;
    else
      CHECK(got == reference);
  } while (std::next_permutation(ops.begin(), ops.end()));

  auto direct = tb::alpha_rewrite(task);
  REQUIRE(direct.ok());
  tb::Task composed = *direct.task;
  composed.variant = tb::Variant::Regular;  // single ops do not flip the variant
  CHECK(dump(composed) == reference);
}

TEST_CASE("alpha_rewrite is idempotent") {
  auto once = tb::alpha_rewrite(break_task());
  REQUIRE(once.ok());
  auto twice = tb::alpha_rewrite(*once.task);
  REQUIRE(twice.ok());
  CHECK(dump(*twice.task) == dump(*once.task));
}

TEST_CASE("inverting the plan recovers the original task") {
  tb::Task task = break_task();
  auto r = tb::alpha_rewrite(task);
  REQUIRE(r.ok());
  auto back = tb::invert_rewrite(*r.task, r.plan);
  REQUIRE(back.ok());
  CHECK(dump(*back.task) == dump(task));
}

TEST_CASE("rewritten truth stays alpha-equivalent to the NL-mapped original") {
  tb::Task task = break_task();
  auto r = tb::alpha_rewrite(task);
  REQUIRE(r.ok());
  // Rename the original truth's NL types by the recorded map; variable names
  // may differ, which is exactly what alpha-equivalence ignores.
  tb::TypeSignature mapped = task.truth;
  auto renamed = tb::parse_signature(tb::print_signature(r.task->truth));
  tb::TypeSignature original_mapped{"f1", {}, nullptr};
  {
    std::string text = tb::print_signature(task.truth);
    for (const auto& [from, to] : r.plan.nl_types) {
      std::size_t at = 0;
      while ((at = text.find(from, at)) != std::string::npos) {
        text.replace(at, from.size(), to);
        at += to.size();
      }
    }
    original_mapped = tb::parse_signature(text);
  }
  CHECK(tb::alpha_equivalent(original_mapped, renamed));
}

TEST_CASE("operators leave a task with nothing to rename unchanged") {
  tb::Task t;
  t.id = "id@corpus:1";
  t.category = tb::Category::Parametric;
  t.implementation = "id x = x";
  t.target = "id";
  t.truth = tb::parse_signature("id :: a -> a");

  auto nl = tb::rewrite_nl_types(t);
  REQUIRE(nl.ok());
  CHECK(nl.task->implementation == t.implementation);
  CHECK(nl.plan.nl_types.empty());

  auto bound = tb::rewrite_bindings(t);
  REQUIRE(bound.ok());
  CHECK(bound.task->target == "f1");
  CHECK(bound.task->implementation == "f1 x = x");
}

TEST_CASE("symbolic operators keep their positions") {
  tb::Task t;
  t.id = "plus@corpus:1";
  t.category = tb::Category::Monomorphic;
  t.dependencies = {tb::DependencyDecl::signature("plusInt :: Int -> Int -> Int")};
  t.implementation = "x +. y = plusInt x y";
  t.target = "(+.)";
  t.truth = tb::parse_signature("(+.) :: Int -> Int -> Int");

  auto r = tb::rewrite_bindings(t);
  REQUIRE(r.ok());
  CHECK(r.task->implementation == "x `f1` y = f2 x y");
  CHECK(r.task->target == "f1");
  CHECK(tb::print_signature(r.task->truth) == "f1 :: Int -> Int -> Int");
}

TEST_CASE("parenthesized prefix operators become bare names") {
  tb::Task t;
  t.id = "sum@corpus:1";
  t.category = tb::Category::AdHoc;
  t.dependencies = {
      tb::DependencyDecl::signature("foldr :: (a -> b -> b) -> b -> [a] -> b"),
      tb::DependencyDecl::signature("(+) :: Num a => a -> a -> a"),
      tb::DependencyDecl::class_definition(
          "class Num a where\n  (+) :: a -> a -> a\n  negate :: a -> a"),
  };
  t.implementation = "sum xs = foldr (+) 0 xs";
  t.target = "sum";
  t.truth = tb::parse_signature("sum :: Num a => [a] -> a");

  auto r = tb::rewrite_bindings(t);
  REQUIRE(r.ok());
  CHECK(r.task->implementation == "f1 xs = f2 f3 0 xs");
  // foldr is called first (f2), then (+) (f3); negate only appears in the
  // class definition (f4). Class defs stay behind the signature lines.
  REQUIRE(r.task->dependencies.size() == 3);
  CHECK(r.task->dependencies[0].text == "f2 :: (a -> b -> b) -> b -> [a] -> b");
  CHECK(r.task->dependencies[1].text == "f3 :: Num a => a -> a -> a");
  CHECK(r.task->dependencies[2].text ==
        "class Num a where\n  f3 :: a -> a -> a\n  f4 :: a -> a");
}

TEST_CASE("a called binding without a dependency entry is a rewrite error") {
  tb::Task t;
  t.id = "broken@corpus:1";
  t.category = tb::Category::Parametric;
  t.implementation = "f x = mystery x";
  t.target = "f";
  t.truth = tb::parse_signature("f :: a -> a");

  auto r = tb::rewrite_bindings(t);
  REQUIRE_FALSE(r.ok());
  CHECK(r.error->op == "rewrite_bindings");
  CHECK(r.error->reason.find("mystery") != std::string::npos);
}

TEST_CASE("an exhausted naming dictionary is a rewrite error") {
  tb::NamingScheme scheme;
  scheme.binding_dict = {"g1"};  // two bindings needed
  tb::Task t;
  t.id = "two@corpus:1";
  t.category = tb::Category::Parametric;
  t.dependencies = {tb::DependencyDecl::signature("id :: a -> a")};
  t.implementation = "f x = id x";
  t.target = "f";
  t.truth = tb::parse_signature("f :: a -> a");

  auto r = tb::rewrite_bindings(t, scheme);
  REQUIRE_FALSE(r.ok());
  CHECK(r.error->reason.find("exhausted") != std::string::npos);
}

TEST_CASE("a replacement name colliding with a local is a rewrite error") {
  tb::NamingScheme scheme;
  scheme.binding_dict = {"go"};
  tb::Task t;
  t.id = "loop@corpus:1";
  t.category = tb::Category::Parametric;
  t.implementation = "f x = go x\n  where go y = y";
  t.target = "f";
  t.truth = tb::parse_signature("f :: a -> a");

  auto r = tb::rewrite_bindings(t, scheme);
  REQUIRE_FALSE(r.ok());
  CHECK(r.error->reason.find("collides") != std::string::npos);
}

TEST_CASE("custom naming dictionaries drive all three operators") {
  tb::NamingScheme scheme;
  scheme.nl_dict = {"Widget"};
  scheme.var_dict = {"alpha", "beta"};
  scheme.binding_dict = {"primary", "helper"};
  tb::Task t;
  t.id = "wrap@corpus:1";
  t.category = tb::Category::Parametric;
  t.dependencies = {tb::DependencyDecl::signature("id :: a -> a")};
  t.implementation = "wrap x = id x";
  t.target = "wrap";
  t.truth = tb::parse_signature("wrap :: a -> Bool");

  auto r = tb::alpha_rewrite(t, scheme);
  REQUIRE(r.ok());
  CHECK(r.task->target == "primary");
  CHECK(r.task->implementation == "primary x = helper x");
  CHECK(tb::print_signature(r.task->truth) == "primary :: alpha -> Widget");
}

TEST_CASE("renaming plans survive a JSON round-trip") {
  auto r = tb::alpha_rewrite(break_task());
  REQUIRE(r.ok());
  auto back = tb::RenamingPlan::from_json(r.plan.to_json());
  CHECK(back.to_json().dump() == r.plan.to_json().dump());
}
