#include <cmath>
#include <random>

#include <doctest.h>

#include "tb/corpus.hpp"
#include "tb/metrics.hpp"
#include "tb/parse.hpp"

namespace {

// Synthetic report: per repeat r (1-based), the first `correct[r-1]` of
// `total` tasks are Correct, the rest Incorrect.
tb::RunReport synthetic_report(std::size_t total, std::vector<std::size_t> correct,
                               tb::Variant variant = tb::Variant::Regular) {
  tb::RunReport report;
  report.run_id = "synthetic";
  report.model_id = "m";
  report.variant = variant;
  report.repeats = static_cast<int>(correct.size());
  for (std::size_t t = 0; t < total; ++t) {
    for (std::size_t r = 0; r < correct.size(); ++r) {
      tb::TaskOutcome o;
      o.task_id = "t" + std::to_string(t);
      o.repeat = static_cast<int>(r) + 1;
      o.verdict = t < correct[r] ? tb::Verdict::Correct : tb::Verdict::Incorrect;
      report.outcomes.push_back(std::move(o));
    }
  }
  auto [mean, se] = tb::accuracy_mean_stderr(report.outcomes, report.repeats);
  report.mean_accuracy = mean;
  report.std_error = se;
  return report;
}

tb::Task truth_task(const std::string& line) {
  tb::Task task;
  task.truth = tb::parse_signature(line);
  task.target = task.truth.binding;
  task.id = task.target + "@classify:1";
  task.implementation = task.target + " = x";
  task.category = tb::categorize_task(task.truth);
  return task;
}

tb::ErrorCategory classify(const std::string& truth_line,
                           const std::string& answer) {
  const tb::Task task = truth_task(truth_line);
  const tb::TaskOutcome outcome = tb::score_response(task, answer);
  REQUIRE(outcome.verdict != tb::Verdict::Correct);
  return tb::classify_error(task, outcome);
}

}  // namespace

TEST_CASE("accuracy summary averages the repeats") {
  // 170, 169, 171 correct of 188 -> mean is exactly 170/188 x 100.
  const auto report = synthetic_report(188, {170, 169, 171});
  const tb::MetricValue acc = tb::accuracy_summary(report);
  CHECK(acc.name == tb::MetricName::Acc);
  CHECK(acc.value == doctest::Approx(100.0 * 170.0 / 188.0).epsilon(1e-12));
  CHECK(std::abs(acc.value - 90.43) < 0.005);  // table-scale formatting
  // Accuracies differ from the mean by +-100/188 and 0.
  const double dev = 100.0 / 188.0;
  CHECK(acc.std_error == doctest::Approx(dev / std::sqrt(3.0)).epsilon(1e-12));
  CHECK(acc.inputs == std::vector<std::string>{"synthetic"});

  CHECK(tb::accuracy_summary(synthetic_report(10, {10, 10, 10})).value ==
        doctest::Approx(100.0));
  CHECK(tb::accuracy_summary(synthetic_report(10, {0, 0, 0})).value ==
        doctest::Approx(0.0));
  CHECK(tb::accuracy_summary(synthetic_report(7, {3, 3, 3})).std_error == 0.0);

  const auto pure = synthetic_report(10, {5, 5, 5}, tb::Variant::Pure);
  CHECK(tb::accuracy_summary(pure).name == tb::MetricName::AccPure);

  tb::RunReport empty;
  empty.run_id = "void";
  CHECK_THROWS_AS(tb::accuracy_summary(empty), tb::EmptyReport);
}

TEST_CASE("robustness score reproduces the pinned reference ratios") {
  auto acc = [](double v, const char* id) {
    tb::MetricValue m;
    m.name = tb::MetricName::Acc;
    m.value = v;
    m.inputs = {id};
    return m;
  };

  const tb::MetricValue rs1 =
      tb::robustness_score(acc(90.42, "r1"), acc(55.85, "p1"));
  CHECK(std::abs(rs1.value - 61.77) <= 0.01);
  const tb::MetricValue rs2 =
      tb::robustness_score(acc(81.91, "r2"), acc(52.66, "p2"));
  CHECK(std::abs(rs2.value - 64.29) <= 0.01);

  CHECK(tb::robustness_score(acc(50, "r"), acc(50, "p")).value ==
        doctest::Approx(100.0));
  CHECK(rs1.inputs == std::vector<std::string>{"r1", "p1"});
  CHECK(rs1.operands == std::vector<double>{90.42, 55.85});

  CHECK_THROWS_AS(tb::robustness_score(acc(0, "r"), acc(10, "p")),
                  tb::DivisionByZero);

  // Scale invariance: common rescaling of both accuracies cancels.
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> pick(1.0, 99.0);
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  for (int i = 0; i < 200; ++i) {
    const double a = pick(rng), p = pick(rng), k = scale(rng);
    const double plain = tb::robustness_score(acc(a, "r"), acc(p, "p")).value;
    const double scaled =
        tb::robustness_score(acc(k * a, "r"), acc(k * p, "p")).value;
    CHECK(scaled == doctest::Approx(plain).epsilon(1e-9));
  }
}

TEST_CASE("reasoning effectiveness reproduces the pinned reference ratios") {
  const tb::MetricValue re1 =
      tb::reasoning_effectiveness({87.77, 46.81}, {90.42, 55.85});
  CHECK(std::abs(re1.value - 3.41) <= 0.01);
  CHECK(re1.operands == std::vector<double>{87.77, 46.81, 90.42, 55.85});

  const tb::MetricValue re2 =
      tb::reasoning_effectiveness({78.19, 30.32}, {83.51, 51.06});
  CHECK(std::abs(re2.value - 3.90) <= 0.01);

  const tb::MetricValue re3 =
      tb::reasoning_effectiveness({80.49, 35.64}, {86.70, 44.15});
  CHECK(std::abs(re3.value - 1.37) <= 0.01);

  CHECK_THROWS_AS(tb::reasoning_effectiveness({50, 40}, {50, 60}),
                  tb::UndefinedDelta);

  // Sign property: RE > 0 iff the two deltas share a sign; below-one and
  // negative ratios are representable, not clamped.
  std::mt19937 rng(777);
  std::uniform_real_distribution<double> pick(1.0, 99.0);
  for (int i = 0; i < 500; ++i) {
    tb::AccuracyPair base{pick(rng), pick(rng)};
    tb::AccuracyPair ttc{pick(rng), pick(rng)};
    if (ttc.acc == base.acc) continue;
    const double re = tb::reasoning_effectiveness(base, ttc).value;
    const double d = ttc.acc - base.acc;
    const double dp = ttc.acc_pure - base.acc_pure;
    if (dp == 0.0) {
      CHECK(re == 0.0);
    } else {
      CHECK((re > 0.0) == ((d > 0.0) == (dp > 0.0)));
    }
  }
  CHECK(tb::reasoning_effectiveness({50, 50}, {60, 55}).value ==
        doctest::Approx(0.5));  // < 1: TTC helped the regular variant more
  CHECK(tb::reasoning_effectiveness({50, 50}, {60, 45}).value ==
        doctest::Approx(-0.5));
}

TEST_CASE("error classification walks the ladder in order") {
  SUBCASE("no response") {
    CHECK(classify("f :: a -> a", "") == tb::ErrorCategory::ResponseError);
    tb::TaskOutcome timeout;
    timeout.task_id = "f@classify:1";
    timeout.verdict = tb::Verdict::Timeout;
    CHECK(tb::classify_error(truth_task("f :: a -> a"), timeout) ==
          tb::ErrorCategory::ResponseError);
  }
  SUBCASE("signature wrapped in prose") {
    CHECK(classify("f :: a -> b", "The type is `a -> b` because it maps.") ==
          tb::ErrorCategory::InstructionFollowing);
    CHECK(classify("f :: a -> b",
                   "Here is my reasoning.\ng :: Int -> Bool\nDone.") ==
          tb::ErrorCategory::InstructionFollowing);
  }
  SUBCASE("unparseable output") {
    CHECK(classify("f :: a -> b", "%%% no idea") ==
          tb::ErrorCategory::SyntaxError);
    CHECK(classify("f :: a -> b", "Sure.") == tb::ErrorCategory::SyntaxError);
  }
  SUBCASE("arity mismatch") {
    CHECK(classify("f :: a -> b", "a -> b -> c") ==
          tb::ErrorCategory::ArityMismatch);
    CHECK(classify("f :: Int -> Int -> Int", "Int -> Int") ==
          tb::ErrorCategory::ArityMismatch);
  }
  SUBCASE("too general") {
    CHECK(classify("f :: Eq a => a -> a", "a -> a") ==
          tb::ErrorCategory::OverGeneralization);
    CHECK(classify("f :: Int -> Int", "a -> Int") ==
          tb::ErrorCategory::OverGeneralization);
  }
  SUBCASE("too specific") {
    CHECK(classify("f :: (a -> b) -> [a] -> [b]", "(a -> a) -> [a] -> [a]") ==
          tb::ErrorCategory::UnderGeneralization);
    CHECK(classify("f :: a -> Int", "Int -> Int") ==
          tb::ErrorCategory::UnderGeneralization);
  }
  SUBCASE("right shape, wrong constraints") {
    CHECK(classify("f :: Eq a => a -> Bool", "Ord a => a -> Bool") ==
          tb::ErrorCategory::ConstraintError);
  }
  SUBCASE("arguments permuted") {
    CHECK(classify("f :: Int -> Bool -> Char", "Bool -> Int -> Char") ==
          tb::ErrorCategory::ArgOrderMismatch);
    CHECK(classify("f :: (a -> b) -> [a] -> Int", "[a] -> (a -> b) -> Int") ==
          tb::ErrorCategory::ArgOrderMismatch);
  }
  SUBCASE("nothing fits") {
    CHECK(classify("f :: Int -> Bool", "Char -> Float") ==
          tb::ErrorCategory::Unclassified);
  }
  SUBCASE("correct outcomes are never categorized") {
    const tb::Task task = truth_task("f :: a -> a");
    const tb::TaskOutcome o = tb::score_response(task, "b -> b");
    REQUIRE(o.verdict == tb::Verdict::Correct);
    CHECK_THROWS_AS(tb::classify_error(task, o), std::invalid_argument);
  }
  SUBCASE("every wrong answer lands on exactly one rung") {
    const std::vector<std::string> truths = {
        "f :: a -> b", "f :: Eq a => a -> a -> Bool", "f :: Int -> Bool",
        "f :: (a -> b) -> [a] -> [b]", "f :: String -> String"};
    const std::vector<std::string> answers = {
        "",           "garbage %%",   "a",
        "a -> b",     "b -> a",       "Int -> Bool",
        "[a] -> [b]", "Eq a => a -> a -> Bool", "Ord b => b -> b -> Bool",
        "The answer is `Int -> Bool`.", "f :: Int -> Bool", "(a, b) -> c"};
    for (const auto& t : truths) {
      for (const auto& a : answers) {
        CAPTURE(t);
        CAPTURE(a);
        const tb::Task task = truth_task(t);
        const tb::TaskOutcome o = tb::score_response(task, a);
        if (o.verdict == tb::Verdict::Correct) continue;
        CHECK_NOTHROW(tb::classify_error(task, o));
      }
    }
  }
}

TEST_CASE("report rendering is stable across formats") {
  const auto report = synthetic_report(4, {2, 2, 2});
  std::map<std::string, tb::Category> categories = {
      {"t0", tb::Category::Monomorphic},
      {"t1", tb::Category::Parametric},
      {"t2", tb::Category::AdHoc},
      {"t3", tb::Category::AdHoc},
  };
  const tb::MetricValue acc = tb::accuracy_summary(report);
  tb::MetricValue pure = acc;
  pure.name = tb::MetricName::AccPure;
  pure.value = 30.0;
  const tb::MetricValue rs = tb::robustness_score(acc, pure);

  SUBCASE("json") {
    const std::string text = tb::render_report({acc, rs}, report.outcomes,
                                               categories, tb::ReportFormat::Json);
    const tb::Json j = tb::Json::parse(text);
    REQUIRE(j.contains("metrics"));
    REQUIRE(j.contains("outcomes"));
    CHECK(j.at("metrics").size() == 2);
    CHECK(j.at("outcomes").size() == 12);
    CHECK(j.at("category_breakdown").at("Monomorphic").at("total") == 3);
    CHECK(j.at("category_breakdown").at("AdHoc").at("accuracy") == 0.0);
    CHECK(j.at("category_breakdown").at("Monomorphic").at("accuracy") == 100.0);
    // Idempotent rendering.
    CHECK(text == tb::render_report({acc, rs}, report.outcomes, categories,
                                    tb::ReportFormat::Json));
  }
  SUBCASE("csv is one row per task") {
    const std::string text = tb::render_report({}, report.outcomes, categories,
                                               tb::ReportFormat::Csv);
    std::size_t rows = std::count(text.begin(), text.end(), '\n');
    CHECK(rows == 1 + 4);  // header + one row per task
    CHECK(text.starts_with("task_id,category,repeats,correct,accuracy\n"));
    CHECK(text.find("t0,Monomorphic,3,3,100.00") != std::string::npos);
    CHECK(text.find("t3,AdHoc,3,0,0.00") != std::string::npos);
  }
  SUBCASE("markdown carries the category breakdown and RS table") {
    const std::string text = tb::render_report({acc, pure, rs}, report.outcomes,
                                               categories,
                                               tb::ReportFormat::Markdown);
    CHECK(text.find("## Accuracy by category") != std::string::npos);
    CHECK(text.find("| Monomorphic | 3 | 3 | 100.00 |") != std::string::npos);
    CHECK(text.find("| Model | Acc | Acc_pure | RS |") != std::string::npos);
    CHECK(text.find("| RS | 60.00 |") != std::string::npos);
  }
  SUBCASE("empty outcomes still render") {
    const std::string text =
        tb::render_report({}, {}, {}, tb::ReportFormat::Json);
    const tb::Json j = tb::Json::parse(text);
    CHECK(j.at("outcomes").empty());
    CHECK(j.at("metrics").empty());
  }
}
