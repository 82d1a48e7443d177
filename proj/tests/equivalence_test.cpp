#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "tb/equivalence.hpp"
#include "tb/parse.hpp"

namespace {

tb::TypeSignature sig(const std::string& text) { return tb::parse_signature(text); }

bool eq(const std::string& a, const std::string& b) {
  return tb::alpha_equivalent(sig(a), sig(b));
}

bool sub(const std::string& g, const std::string& s) {
  return tb::subsumes(sig(g), sig(s));
}

}  // namespace

TEST_CASE("canonicalize renames variables positionally") {
  auto a = tb::canonicalize(sig("f :: a -> b"));
  auto b = tb::canonicalize(sig("f :: x -> y"));
  CHECK(tb::equal(a, b));
  CHECK(tb::print_type(a.body) == "v1 -> v2");
}

TEST_CASE("canonicalize normalizes String to [Char]") {
  auto a = tb::canonicalize(sig("f :: String -> Int"));
  CHECK(tb::print_type(a.body) == "[Char] -> Int");
}

TEST_CASE("canonicalize sorts the context as a multiset") {
  auto a = tb::canonicalize(sig("f :: (Ord a, Eq a) => a -> a"));
  auto b = tb::canonicalize(sig("f :: (Eq b, Ord b) => b -> b"));
  CHECK(tb::equal(a, b));
}

TEST_CASE("canonicalize rejects a dangling constraint variable") {
  CHECK_THROWS_AS(tb::canonicalize(sig("f :: Eq b => a -> a")),
                  tb::DanglingConstraintVariable);
}

TEST_CASE("canonicalize is idempotent") {
  const char* samples[] = {
      "f :: (a -> Bool) -> [a] -> ([a], [a])",
      "f :: (Eq b, Ord a) => a -> b -> (a, b)",
      "f :: (forall a. a -> a) -> b -> b",
      "f :: Either a (b -> c) -> String",
  };
  for (const char* s : samples) {
    auto once = tb::canonicalize(sig(s));
    auto twice = tb::canonicalize(tb::TypeSignature{"f", once.context, once.body});
    CHECK(tb::equal(once, twice));
  }
}

TEST_CASE("alpha equivalence accepts pure renamings") {
  CHECK(eq("f :: a -> b", "g :: b -> a"));
  CHECK(eq("f :: (a -> Bool) -> [a] -> ([a], [a])",
           "g :: (x -> Bool) -> [x] -> ([x], [x])"));
  CHECK(eq("f :: (t1 -> T1) -> [t1] -> ([t1], [t1])",
           "g :: (a -> T1) -> [a] -> ([a], [a])"));
  CHECK(eq("f :: String -> Int", "g :: [Char] -> Int"));
}

TEST_CASE("alpha equivalence rejects structural differences") {
  CHECK_FALSE(eq("f :: [Int]", "g :: [Char]"));
  CHECK_FALSE(eq("f :: a -> a", "g :: a -> b"));
  CHECK_FALSE(eq("f :: a -> b -> a", "g :: a -> b -> b"));
  CHECK_FALSE(eq("f :: Eq a => a -> a", "g :: a -> a"));
  CHECK_FALSE(eq("f :: (Int, Char)", "g :: (Char, Int)"));
}

TEST_CASE("alpha equivalence with dangling constraints is false, not an error") {
  CHECK_FALSE(eq("f :: Eq b => a -> a", "g :: a -> a"));
  CHECK_FALSE(eq("f :: a -> a", "g :: Eq b => a -> a"));
}

TEST_CASE("alpha equivalence handles nested quantifiers") {
  CHECK(eq("f :: (forall a. a -> a) -> b -> b",
           "g :: (forall x. x -> x) -> c -> c"));
  CHECK_FALSE(eq("f :: (forall a. a -> a) -> b -> b", "g :: (a -> a) -> b -> b"));
  // Shadowing: the inner binder hides the outer variable of the same name.
  CHECK(eq("f :: a -> (forall a. a -> a) -> a",
           "g :: b -> (forall c. c -> c) -> b"));
}

TEST_CASE("subsumes instantiates only the general side") {
  CHECK(sub("f :: a -> b", "g :: Int -> Bool"));
  CHECK_FALSE(sub("f :: Int -> Bool", "g :: a -> b"));
  CHECK(sub("f :: (a -> b) -> [a] -> [b]", "g :: (a -> a) -> [a] -> [a]"));
  CHECK_FALSE(sub("f :: (a -> a) -> [a] -> [a]", "g :: (a -> b) -> [a] -> [b]"));
  CHECK(sub("f :: a -> a", "g :: [Int] -> [Int]"));
  CHECK_FALSE(sub("f :: a -> a", "g :: [Int] -> [Char]"));
}

TEST_CASE("subsumes requires substituted constraints to be present") {
  CHECK(sub("f :: Eq a => a -> a", "g :: Eq b => b -> b"));
  CHECK_FALSE(sub("f :: Eq a => a -> a", "g :: b -> b"));
  CHECK(sub("f :: a -> a", "g :: Eq b => b -> b"));
  CHECK(sub("f :: Eq a => a -> a", "g :: (Eq b, Ord b) => b -> b"));
  CHECK_FALSE(sub("f :: (Eq a, Ord a) => a -> a", "g :: Eq b => b -> b"));
}

TEST_CASE("alpha equivalence implies two-way subsumption") {
  const char* pairs[][2] = {
      {"f :: a -> b", "g :: b -> a"},
      {"f :: Eq a => [a] -> Bool", "g :: Eq x => [x] -> Bool"},
      {"f :: String -> Int", "g :: [Char] -> Int"},
  };
  for (const auto& p : pairs) {
    REQUIRE(eq(p[0], p[1]));
    CHECK(sub(p[0], p[1]));
    CHECK(sub(p[1], p[0]));
  }
}

TEST_CASE("oracle agreement on a sampled slice of the small-type universe") {
  auto universe = oracle::small_signature_universe(3);
  REQUIRE(universe.size() > 100);
  std::mt19937 rng(20250817);
  std::uniform_int_distribution<std::size_t> pick(0, universe.size() - 1);
  for (int i = 0; i < 4000; ++i) {
    const auto& a = universe[pick(rng)];
    const auto& b = universe[pick(rng)];
    bool expect = oracle::alpha_equivalent(a, b);
    bool got = tb::alpha_equivalent(a, b);
    if (expect != got) {
      CAPTURE(tb::print_signature(a));
      CAPTURE(tb::print_signature(b));
      REQUIRE(expect == got);
    }
  }
}

TEST_CASE("oracle agreement for subsumes on sampled pairs") {
  auto universe = oracle::small_signature_universe(3);
  std::mt19937 rng(424242);
  std::uniform_int_distribution<std::size_t> pick(0, universe.size() - 1);
  for (int i = 0; i < 800; ++i) {
    const auto& g = universe[pick(rng)];
    const auto& s = universe[pick(rng)];
    bool expect = oracle::subsumes(g, s);
    bool got = tb::subsumes(g, s);
    if (expect != got) {
      CAPTURE(tb::print_signature(g));
      CAPTURE(tb::print_signature(s));
      REQUIRE(expect == got);
    }
  }
}

TEST_CASE("equivalence relation laws on random triples") {
  auto universe = oracle::small_signature_universe(3);
  std::mt19937 rng(7);
  std::uniform_int_distribution<std::size_t> pick(0, universe.size() - 1);
  for (int i = 0; i < 10000; ++i) {
    const auto& a = universe[pick(rng)];
    const auto& b = universe[pick(rng)];
    const auto& c = universe[pick(rng)];
    CHECK(tb::alpha_equivalent(a, a));
    bool ab = tb::alpha_equivalent(a, b);
    CHECK(ab == tb::alpha_equivalent(b, a));
    if (ab && tb::alpha_equivalent(b, c)) CHECK(tb::alpha_equivalent(a, c));
  }
}

TEST_CASE("subsumes is a preorder on sampled signatures") {
  auto universe = oracle::small_signature_universe(3);
  std::mt19937 rng(99);
  std::uniform_int_distribution<std::size_t> pick(0, universe.size() - 1);
  for (int i = 0; i < 2000; ++i) {
    const auto& a = universe[pick(rng)];
    const auto& b = universe[pick(rng)];
    const auto& c = universe[pick(rng)];
    CHECK(tb::subsumes(a, a));
    if (tb::subsumes(a, b) && tb::subsumes(b, c)) CHECK(tb::subsumes(a, c));
  }
}

TEST_CASE("synthesize_definitions collects classes and constructors") {
  SUBCASE("applied constructor at max arity") {
    auto r = tb::synthesize_definitions(sig("f :: Int -> T1 t1 t2 -> (Int, Char) -> Float"));
    REQUIRE(r.defns.size() == 1);
    CHECK(r.defns[0].render() == "data T1 t1 t2");
    CHECK(r.arity_conflicts.empty());
  }
  SUBCASE("context class and unapplied constructor") {
    auto r = tb::synthesize_definitions(sig("f :: Eq t1 => t1 -> T1"));
    REQUIRE(r.defns.size() == 2);
    CHECK(r.defns[0].render() == "class Eq a");
    CHECK(r.defns[1].render() == "data T1 = T1");
  }
  SUBCASE("variables only") {
    auto r = tb::synthesize_definitions(sig("f :: t1 -> t2"));
    CHECK(r.defns.empty());
  }
  SUBCASE("builtins excluded") {
    auto r = tb::synthesize_definitions(sig("f :: Int -> Bool -> Char -> Float -> Double -> String"));
    CHECK(r.defns.empty());
  }
  SUBCASE("mixed arities reported, max kept") {
    auto r = tb::synthesize_definitions(sig("f :: T1 t1 -> T1 t1 t2 -> T1"));
    REQUIRE(r.defns.size() == 1);
    CHECK(r.defns[0].render() == "data T1 t1 t2");
    REQUIRE(r.arity_conflicts.size() == 1);
    CHECK(r.arity_conflicts[0] == "T1");
  }
}

TEST_CASE("merge_definitions unions at the maximum arity") {
  auto a = tb::synthesize_definitions(sig("f :: T1 t1 -> T2"));
  auto b = tb::synthesize_definitions(sig("f :: T1 t1 t2 -> T3"));
  auto merged = tb::merge_definitions(a, b);
  REQUIRE(merged.size() == 3);
  CHECK(merged[0].render() == "data T1 t1 t2");
  CHECK(merged[1].render() == "data T2 = T2");
  CHECK(merged[2].render() == "data T3 = T3");
}

TEST_CASE("emit_proof_module fills the template") {
  auto truth = sig("f1 :: t1 -> t1");
  auto defns = tb::merge_definitions(tb::synthesize_definitions(truth),
                                     tb::synthesize_definitions(truth));
  std::string text = tb::emit_proof_module(truth, truth, defns);
  CHECK(text.find("proof :: TRUTH t1 :~: ANSWER t1") != std::string::npos);
  CHECK(text.find("proof = Refl") != std::string::npos);
  CHECK(text.find("module Check where") != std::string::npos);
  CHECK(text.find("type Int_ = Int") != std::string::npos);
  CHECK(text.find("data Natural = Natural") != std::string::npos);
  CHECK(text.find("type TRUTH t1 = t1 -> t1") != std::string::npos);
  CHECK(text.find("type ANSWER t1 = t1 -> t1") != std::string::npos);
}

TEST_CASE("emit_proof_module is total even when the signatures disagree") {
  auto truth = sig("f1 :: t1 -> t1");
  auto answer = sig("f1 :: t1 -> t2");
  auto defns = tb::merge_definitions(tb::synthesize_definitions(truth),
                                     tb::synthesize_definitions(answer));
  std::string text = tb::emit_proof_module(truth, answer, defns);
  CHECK(text.find("type ANSWER t1 t2 = t1 -> t2") != std::string::npos);
  CHECK(text.find("proof :: TRUTH t1 :~: ANSWER t1") != std::string::npos);
}

TEST_CASE("emit_proof_module carries the context into the aliases") {
  auto truth = sig("f1 :: T1 t1 => t1 -> t1");
  auto defns = tb::merge_definitions(tb::synthesize_definitions(truth),
                                     tb::synthesize_definitions(truth));
  std::string text = tb::emit_proof_module(truth, truth, defns);
  CHECK(text.find("class T1 a") != std::string::npos);
  CHECK(text.find("type TRUTH t1 = T1 t1 => t1 -> t1") != std::string::npos);
}
