#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "tb/corpus.hpp"

namespace {

const char* kMiniDb =
    "# minimal database\n"
    "span :: (a -> Bool) -> [a] -> ([a], [a])\n"
    "not :: Bool -> Bool\n"
    "(.) :: (b -> c) -> (a -> b) -> a -> c\n"
    "(/=) :: Eq a => a -> a -> Bool\n"
    "compare :: Ord a => a -> a -> Ordering\n"
    "\n"
    "class Eq a where\n"
    "  (==) :: a -> a -> Bool\n"
    "  (/=) :: a -> a -> Bool\n"
    "\n"
    "class Eq a => Ord a where\n"
    "  compare :: a -> a -> Ordering\n"
    "  (<=) :: a -> a -> Bool\n";

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name, const std::string& content) {
    path = std::string("/tmp/") + name;
    std::ofstream out(path);
    out << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("extraction lists calls in first-occurrence order") {
  CHECK(tb::extract_called_bindings("break p = span (not . p)") ==
        std::vector<std::string>{"span", "not", "(.)"});
  CHECK(tb::extract_called_bindings("x == y = not (x /= y)") ==
        std::vector<std::string>{"not", "(/=)"});
  CHECK(tb::extract_called_bindings("f a = a").empty());
}

TEST_CASE("extraction skips where-bound names and their parameters") {
  std::string impl =
      "words s = case dropWhile isSpace s of\n"
      "            \"\" -> []\n"
      "            s' -> w : words s''\n"
      "                  where (w, s'') = break isSpace s'";
  CHECK(tb::extract_called_bindings(impl) ==
        std::vector<std::string>{"dropWhile", "isSpace", "break"});
}

TEST_CASE("extraction skips lambda parameters and guard-bound clauses") {
  CHECK(tb::extract_called_bindings("f xs = map (\\x -> g x) xs") ==
        std::vector<std::string>{"map", "g"});
  CHECK(tb::extract_called_bindings(
            "gcd x y | y == 0 = x\n        | otherwise = gcd y (rem x y)") ==
        std::vector<std::string>{"(==)", "otherwise", "rem"});
}

TEST_CASE("extraction sees through operator sections and as-patterns") {
  CHECK(tb::extract_called_bindings("inc xs = map (+ 1) xs") ==
        std::vector<std::string>{"map", "(+)"});
  // Everything here is bound: the clause head, its parameters, and the
  // as-pattern components; if/then/else are keywords.
  CHECK(tb::extract_called_bindings(
            "dropWhile p xs@(x:rest) = if p x then dropWhile p rest else xs")
            .empty());
}

TEST_CASE("signature database loads entries and class blocks") {
  auto db = tb::SignatureDB::parse(kMiniDb, "mini");
  CHECK(db.entries.size() == 5);
  CHECK(db.entries.count("(.)"));
  CHECK(db.class_defs.size() == 2);
  REQUIRE(db.parsed_class_defs.count("Ord"));
  CHECK(db.parsed_class_defs.at("Ord").supers.size() == 1);
}

TEST_CASE("signature database rejects duplicates") {
  CHECK_THROWS_WITH_AS(tb::SignatureDB::parse("id :: a -> a\nid :: a -> a\n", "dup"),
                       doctest::Contains("duplicate entry"), std::runtime_error);
}

TEST_CASE("resolution returns decls in input order") {
  auto db = tb::SignatureDB::parse(kMiniDb, "mini");
  auto decls = tb::resolve_dependencies({"span", "not", "(.)"}, db);
  REQUIRE(decls.size() == 3);
  CHECK(decls[0].text == "span :: (a -> Bool) -> [a] -> ([a], [a])");
  CHECK(decls[1].text == "not :: Bool -> Bool");
  CHECK(decls[2].text == "(.) :: (b -> c) -> (a -> b) -> a -> c");
}

TEST_CASE("resolution appends class definitions with superclasses first") {
  auto db = tb::SignatureDB::parse(kMiniDb, "mini");
  auto decls = tb::resolve_dependencies({"compare"}, db);
  REQUIRE(decls.size() == 3);
  CHECK(decls[0].kind == tb::DependencyDecl::Kind::Signature);
  CHECK(decls[1].kind == tb::DependencyDecl::Kind::ClassDefinition);
  CHECK(decls[1].text.rfind("class Eq a where", 0) == 0);
  CHECK(decls[2].text.rfind("class Eq a => Ord a where", 0) == 0);
}

TEST_CASE("resolution fails all-or-nothing with every missing name") {
  auto db = tb::SignatureDB::parse(kMiniDb, "mini");
  try {
    tb::resolve_dependencies({"span", "frobnicate", "zork"}, db);
    FAIL("expected MissingDeps");
  } catch (const tb::MissingDeps& e) {
    CHECK(e.names == std::vector<std::string>{"frobnicate", "zork"});
  }
}

TEST_CASE("categorization follows context and free variables") {
  CHECK(tb::categorize_task(tb::parse_signature("words :: String -> [String]")) ==
        tb::Category::Monomorphic);
  CHECK(tb::categorize_task(tb::parse_signature("map :: (a -> b) -> [a] -> [b]")) ==
        tb::Category::Parametric);
  CHECK(tb::categorize_task(tb::parse_signature("(==) :: Eq a => a -> a -> Bool")) ==
        tb::Category::AdHoc);
}

TEST_CASE("validation reports missing dependencies and category drift") {
  tb::Task t;
  t.id = "break@x:1";
  t.category = tb::Category::Parametric;
  t.dependencies = {
      tb::DependencyDecl::signature("not :: Bool -> Bool"),
      tb::DependencyDecl::signature("(.) :: (b -> c) -> (a -> b) -> a -> c"),
      tb::DependencyDecl::signature("span :: (a -> Bool) -> [a] -> ([a], [a])"),
  };
  t.implementation = "break p = span (not . p)";
  t.target = "break";
  t.truth = tb::parse_signature("break :: (a -> Bool) -> [a] -> ([a], [a])");
  CHECK(tb::validate_task(t).empty());

  tb::Task missing = t;
  missing.dependencies.erase(missing.dependencies.begin() + 2);
  auto violations = tb::validate_task(missing);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].kind == tb::Violation::Kind::MissingDependency);
  CHECK(violations[0].detail == "span");

  tb::Task drifted = t;
  drifted.category = tb::Category::Monomorphic;
  violations = tb::validate_task(drifted);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].kind == tb::Violation::Kind::CategoryMismatch);
}

TEST_CASE("building tasks wires extraction, resolution and validation together") {
  TempFile corpus("tb_test_corpus.txt",
                  "# comment\n"
                  "break :: (a -> Bool) -> [a] -> ([a],[a])\n"
                  "break p =  span (not . p)\n"
                  "\n"
                  "(/=) :: Eq a => a -> a -> Bool\n"
                  "x /= y = not (x == y)\n");
  auto db = tb::SignatureDB::parse(
      std::string(kMiniDb) + "(==) :: Eq a => a -> a -> Bool\n", "mini");
  auto tasks = tb::build_tasks(corpus.path, db);
  REQUIRE(tasks.size() == 2);

  CHECK(tasks[0].id == "break@tb_test_corpus.txt:2");
  CHECK(tasks[0].category == tb::Category::Parametric);
  CHECK(tasks[0].implementation == "break p =  span (not . p)");
  REQUIRE(tasks[0].dependencies.size() == 3);

  // The (/=) task depends on (==), whose class definition would leak the
  // target's own signature; the method line must be stripped.
  CHECK(tasks[1].category == tb::Category::AdHoc);
  bool saw_class = false;
  for (const auto& d : tasks[1].dependencies)
    if (d.kind == tb::DependencyDecl::Kind::ClassDefinition) {
      saw_class = true;
      CHECK(d.text.find("(/=)") == std::string::npos);
      CHECK(d.text.find("(==)") != std::string::npos);
    }
  CHECK(saw_class);

  // Determinism: building twice yields byte-identical JSON.
  auto again = tb::build_tasks(corpus.path, db);
  REQUIRE(again.size() == tasks.size());
  for (std::size_t i = 0; i < tasks.size(); ++i)
    CHECK(tb::to_json(tasks[i]).dump() == tb::to_json(again[i]).dump());
}

TEST_CASE("tasks survive a JSONL round-trip") {
  TempFile corpus("tb_test_corpus2.txt",
                  "break :: (a -> Bool) -> [a] -> ([a],[a])\n"
                  "break p =  span (not . p)\n");
  auto db = tb::SignatureDB::parse(kMiniDb, "mini");
  auto tasks = tb::build_tasks(corpus.path, db);
  TempFile file("tb_test_tasks.jsonl", "");
  tb::save_tasks(tasks, file.path);
  auto loaded = tb::load_tasks(file.path);
  REQUIRE(loaded.size() == tasks.size());
  for (std::size_t i = 0; i < tasks.size(); ++i)
    CHECK(tb::to_json(loaded[i]).dump() == tb::to_json(tasks[i]).dump());
}
