// Command-line front end: build task corpora, rewrite them, check single
// answers, run endpoint evaluations, and render metric reports.
//
// Exit codes are contracts: build returns 1 on unresolvable dependencies or
// an empty corpus and 2 on I/O failure; check returns 0/3/4 for
// equivalent/not-equivalent/parse-error; eval returns 5 when the endpoint is
// unreachable; verify returns 1 when a self-check fails.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "oracle.hpp"
#include "tb/config.hpp"
#include "tb/corpus.hpp"
#include "tb/equivalence.hpp"
#include "tb/harness.hpp"
#include "tb/metrics.hpp"
#include "tb/parse.hpp"
#include "tb/rewrite.hpp"
#include "tb/task.hpp"

namespace fs = std::filesystem;

namespace {

bool readable(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return in.good();
}

int write_file(const fs::path& path, const std::string& text) {
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "cannot write " << path.string() << "\n";
    return 2;
  }
  out << text;
  return 0;
}

std::string format_extension(tb::ReportFormat format) {
  switch (format) {
    case tb::ReportFormat::Json: return "json";
    case tb::ReportFormat::Csv: return "csv";
    case tb::ReportFormat::Markdown: return "md";
  }
  return "txt";
}

std::map<std::string, tb::Category> category_index(const std::vector<tb::Task>& tasks) {
  std::map<std::string, tb::Category> index;
  for (const auto& task : tasks) index.emplace(task.id, task.category);
  return index;
}

std::string split_summary(const std::vector<tb::Task>& tasks) {
  std::size_t mono = 0, para = 0, adhoc = 0;
  for (const auto& task : tasks) {
    switch (task.category) {
      case tb::Category::Monomorphic: ++mono; break;
      case tb::Category::Parametric: ++para; break;
      case tb::Category::AdHoc: ++adhoc; break;
    }
  }
  const double total = static_cast<double>(tasks.size());
  char buf[128];
  std::snprintf(buf, sizeof buf, "%zu tasks (%.1f%% mono / %.1f%% parametric / %.1f%% ad-hoc)",
                tasks.size(), 100.0 * static_cast<double>(mono) / total,
                100.0 * static_cast<double>(para) / total,
                100.0 * static_cast<double>(adhoc) / total);
  return buf;
}

int cmd_build(const std::string& corpus, const std::string& db,
              const std::string& out_dir, bool pure, const std::string& plans_path,
              const tb::NamingScheme& naming) {
  if (!readable(db)) {
    std::cerr << "cannot open signature database: " << db << "\n";
    return 2;
  }
  if (!readable(corpus)) {
    std::cerr << "cannot open corpus: " << corpus << "\n";
    return 2;
  }

  std::vector<tb::Task> tasks;
  try {
    const tb::SignatureDB sigdb = tb::SignatureDB::load(db);
    tasks = tb::build_tasks(corpus, sigdb);
  } catch (const tb::MissingDeps& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  if (tasks.empty()) {
    std::cerr << "no tasks\n";
    return 1;
  }

  try {
    fs::create_directories(out_dir);
    tb::save_tasks(tasks, (fs::path(out_dir) / "tasks.regular.jsonl").string());
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  if (pure) {
    std::vector<tb::Task> pure_tasks;
    std::ostringstream plans;
    for (const auto& task : tasks) {
      tb::RewriteResult result = tb::alpha_rewrite(task, naming);
      if (!result.ok()) {
        std::cerr << task.id << ": " << result.error->to_string() << "\n";
        return 1;
      }
      pure_tasks.push_back(*result.task);
      tb::Json row;
      row["task"] = task.id;
      row["plan"] = result.plan.to_json();
      plans << row.dump() << "\n";
    }
    try {
      tb::save_tasks(pure_tasks, (fs::path(out_dir) / "tasks.pure.jsonl").string());
    } catch (const std::exception& e) {
      std::cerr << e.what() << "\n";
      return 2;
    }
    if (!plans_path.empty()) {
      const int rc = write_file(plans_path, plans.str());
      if (rc != 0) return rc;
    }
  }

  std::cout << split_summary(tasks) << "\n";
  return 0;
}

int cmd_rewrite(const std::string& tasks_path, const std::string& out_path,
                const std::string& plans_path, const tb::NamingScheme& naming) {
  if (!readable(tasks_path)) {
    std::cerr << "cannot open tasks: " << tasks_path << "\n";
    return 2;
  }
  std::vector<tb::Task> pure_tasks;
  std::ostringstream plans;
  try {
    for (const auto& task : tb::load_tasks(tasks_path)) {
      tb::RewriteResult result = tb::alpha_rewrite(task, naming);
      if (!result.ok()) {
        std::cerr << task.id << ": " << result.error->to_string() << "\n";
        return 1;
      }
      pure_tasks.push_back(*result.task);
      tb::Json row;
      row["task"] = task.id;
      row["plan"] = result.plan.to_json();
      plans << row.dump() << "\n";
    }
    tb::save_tasks(pure_tasks, out_path);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  if (!plans_path.empty()) {
    const int rc = write_file(plans_path, plans.str());
    if (rc != 0) return rc;
  }
  std::cout << pure_tasks.size() << " tasks rewritten\n";
  return 0;
}

// Accepts `name :: signature` or a bare context-and-type (`::` never occurs
// inside a type, so its presence means the named form).
tb::TypeSignature parse_check_operand(const std::string& text,
                                      const std::string& role) {
  tb::TypeSignature sig;
  if (text.find("::") != std::string::npos) {
    sig = tb::parse_signature(text);
  } else {
    tb::ContextAndType ct = tb::parse_context_and_type(text);
    sig.context = ct.context;
    sig.body = ct.body;
  }
  sig.binding = role;
  return sig;
}

int cmd_check(const std::string& truth_text, const std::string& answer_text,
              const std::string& proof_path) {
  tb::TypeSignature truth, answer;
  try {
    truth = parse_check_operand(truth_text, "truth");
    answer = parse_check_operand(answer_text, "answer");
  } catch (const std::exception& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 4;
  }

  const bool equivalent = tb::alpha_equivalent(truth, answer);
  if (!proof_path.empty()) {
    const std::vector<tb::TypeDefn> defns = tb::merge_definitions(
        tb::synthesize_definitions(truth), tb::synthesize_definitions(answer));
    const int rc =
        write_file(proof_path, tb::emit_proof_module(truth, answer, defns));
    if (rc != 0) return rc;
  }
  std::cout << (equivalent ? "equivalent" : "not equivalent") << "\n";
  return equivalent ? 0 : 3;
}

int cmd_eval(const tb::CliConfig& config, const std::string& tasks_path,
             const std::string& endpoint_name, int repeats,
             const std::string& out_dir, std::string run_id,
             const std::string& report_format) {
  auto it = config.endpoints.find(endpoint_name);
  if (it == config.endpoints.end()) {
    std::cerr << "no endpoint named " << endpoint_name << " in config\n";
    return 1;
  }
  if (!readable(tasks_path)) {
    std::cerr << "cannot open tasks: " << tasks_path << "\n";
    return 2;
  }

  std::vector<tb::Task> tasks;
  try {
    tasks = tb::load_tasks(tasks_path);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  if (tasks.empty()) {
    std::cerr << "no tasks\n";
    return 1;
  }

  const tb::EndpointConfig& endpoint = it->second;
  if (run_id.empty()) {
    run_id = tb::sanitize_component(endpoint.model_id) + "-" +
             tb::to_string(tasks.front().variant) + (endpoint.ttc ? "-ttc" : "");
  }

  tb::RunReport report;
  try {
    report = tb::run_benchmark(tasks, endpoint, repeats, out_dir, run_id);
  } catch (const tb::EndpointUnreachable& e) {
    std::cerr << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  const tb::MetricValue acc = tb::accuracy_summary(report);
  const tb::ReportFormat format = tb::report_format_from_string(report_format);
  const std::string rendered =
      tb::render_report({acc}, report.outcomes, category_index(tasks), format);
  const fs::path report_path =
      fs::path(out_dir) / (run_id + ".report." + format_extension(format));
  const int rc = write_file(report_path, rendered);
  if (rc != 0) return rc;

  if (format == tb::ReportFormat::Json) {
    std::cout << rendered;  // machine-parseable stdout
  } else {
    char buf[160];
    std::snprintf(buf, sizeof buf, "run %s: Acc %.2f +- %.2f (%zu outcomes)",
                  run_id.c_str(), acc.value, acc.std_error,
                  report.outcomes.size());
    std::cout << buf << "\n" << "report: " << report_path.string() << "\n";
  }
  return 0;
}

// A metric operand is either a literal accuracy or a run directory whose
// report supplies it.
double resolve_accuracy(const std::string& text) {
  std::size_t used = 0;
  try {
    const double value = std::stod(text, &used);
    if (used == text.size()) return value;
  } catch (const std::exception&) {
  }
  return tb::accuracy_summary(tb::load_report(text)).value;
}

int cmd_report(const std::string& run_dir, const std::string& tasks_path,
               const std::string& format_text, bool format_given,
               const std::vector<std::string>& rs_args,
               const std::vector<std::string>& re_args,
               const std::string& out_path) {
  std::vector<tb::MetricValue> metrics;
  std::vector<tb::TaskOutcome> outcomes;
  std::map<std::string, tb::Category> categories;

  try {
    if (!run_dir.empty()) {
      const tb::RunReport report = tb::load_report(run_dir);
      outcomes = report.outcomes;
      metrics.push_back(tb::accuracy_summary(report));
    }
    if (!tasks_path.empty()) {
      categories = category_index(tb::load_tasks(tasks_path));
    }
    if (!rs_args.empty()) {
      tb::MetricValue acc, pure;
      acc.name = tb::MetricName::Acc;
      acc.value = resolve_accuracy(rs_args[0]);
      acc.inputs = {rs_args[0]};
      pure.name = tb::MetricName::AccPure;
      pure.value = resolve_accuracy(rs_args[1]);
      pure.inputs = {rs_args[1]};
      metrics.push_back(tb::robustness_score(acc, pure));
    }
    if (!re_args.empty()) {
      const tb::AccuracyPair base{resolve_accuracy(re_args[0]),
                                  resolve_accuracy(re_args[1])};
      const tb::AccuracyPair ttc{resolve_accuracy(re_args[2]),
                                 resolve_accuracy(re_args[3])};
      try {
        metrics.push_back(tb::reasoning_effectiveness(base, ttc));
      } catch (const tb::UndefinedDelta&) {
        std::cout << "RE undefined (regular-variant accuracy delta is zero)\n";
      }
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }

  if (run_dir.empty() && !format_given) {
    // Bare metric computation: one line per metric.
    for (const auto& m : metrics) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%s %.2f", tb::to_string(m.name).c_str(),
                    m.value);
      std::cout << buf << "\n";
    }
    return 0;
  }

  const tb::ReportFormat format = tb::report_format_from_string(format_text);
  const std::string rendered =
      tb::render_report(metrics, outcomes, categories, format);
  std::cout << rendered;
  if (!out_path.empty()) {
    const int rc = write_file(out_path, rendered);
    if (rc != 0) return rc;
  }
  return 0;
}

tb::Task reference_task() {
  tb::Task task;
  task.id = "break@builtin:1";
  task.dependencies = {
      tb::DependencyDecl::signature("not :: Bool -> Bool"),
      tb::DependencyDecl::signature("(.) :: (b -> c) -> (a -> b) -> a -> c"),
      tb::DependencyDecl::signature("span :: (a -> Bool) -> [a] -> ([a], [a])"),
  };
  task.implementation = "break p =  span (not . p)";
  task.target = "break";
  task.truth = tb::parse_signature("break :: (a -> Bool) -> [a] -> ([a], [a])");
  task.category = tb::Category::Parametric;
  task.variant = tb::Variant::Regular;
  return task;
}

int cmd_verify(unsigned seed) {
  int failures = 0;
  auto report = [&](const char* name, bool ok) {
    std::cout << (ok ? "PASS" : "FAIL") << "  " << name << "\n";
    if (!ok) ++failures;
  };

  const tb::Task task = reference_task();

  // All six operator orderings must agree byte-for-byte.
  {
    using Op = tb::RewriteResult (*)(const tb::Task&, const tb::NamingScheme&);
    Op ops[3] = {&tb::rewrite_nl_types, &tb::rewrite_type_variables,
                 &tb::rewrite_bindings};
    int order[3] = {0, 1, 2};
    std::string reference;
    bool ok = true;
    do {
      tb::Task current = task;
      for (int i : order) {
        tb::RewriteResult step = ops[i](current, {});
        if (!step.ok()) {
          ok = false;
          break;
        }
        current = *step.task;
      }
      if (!ok) break;
      const std::string dump = tb::to_json(current).dump();
      if (reference.empty()) {
        reference = dump;
      } else if (dump != reference) {
        ok = false;
      }
    } while (std::next_permutation(order, order + 3));
    report("operator orderings commute", ok);
  }

  // Applying the composed rewrite twice changes nothing.
  {
    bool ok = false;
    tb::RewriteResult once = tb::alpha_rewrite(task, {});
    if (once.ok()) {
      tb::RewriteResult twice = tb::alpha_rewrite(*once.task, {});
      ok = twice.ok() &&
           tb::to_json(*twice.task).dump() == tb::to_json(*once.task).dump();
    }
    report("composed rewrite is idempotent", ok);
  }

  // The recorded plan inverts the rewrite exactly.
  {
    bool ok = false;
    tb::RewriteResult rewritten = tb::alpha_rewrite(task, {});
    if (rewritten.ok()) {
      tb::RewriteResult back = tb::invert_rewrite(*rewritten.task, rewritten.plan);
      tb::Task expected = task;
      expected.variant = tb::Variant::Regular;
      ok = back.ok() &&
           tb::to_json(*back.task).dump() == tb::to_json(expected).dump();
    }
    report("renaming plan inverts the rewrite", ok);
  }

  // Decision procedures agree with the brute-force oracle on a sample.
  {
    const std::vector<tb::TypeSignature> universe =
        oracle::small_signature_universe(3);
    std::mt19937 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, universe.size() - 1);
    bool ok = universe.size() > 50;
    for (int i = 0; i < 1500 && ok; ++i) {
      const tb::TypeSignature& a = universe[pick(rng)];
      const tb::TypeSignature& b = universe[pick(rng)];
      if (tb::alpha_equivalent(a, b) != oracle::alpha_equivalent(a, b)) ok = false;
    }
    for (int i = 0; i < 500 && ok; ++i) {
      const tb::TypeSignature& a = universe[pick(rng)];
      const tb::TypeSignature& b = universe[pick(rng)];
      if (tb::subsumes(a, b) != oracle::subsumes(a, b)) ok = false;
    }
    report("equivalence and subsumption match the brute-force oracle", ok);
  }

  // Relation laws on sampled triples.
  {
    const std::vector<tb::TypeSignature> universe =
        oracle::small_signature_universe(3);
    std::mt19937 rng(seed + 1);
    std::uniform_int_distribution<std::size_t> pick(0, universe.size() - 1);
    bool ok = true;
    for (int i = 0; i < 1000 && ok; ++i) {
      const tb::TypeSignature& a = universe[pick(rng)];
      const tb::TypeSignature& b = universe[pick(rng)];
      const tb::TypeSignature& c = universe[pick(rng)];
      if (!tb::alpha_equivalent(a, a)) ok = false;
      if (tb::alpha_equivalent(a, b) != tb::alpha_equivalent(b, a)) ok = false;
      if (tb::alpha_equivalent(a, b) && tb::alpha_equivalent(b, c) &&
          !tb::alpha_equivalent(a, c)) {
        ok = false;
      }
      if (!tb::subsumes(a, a)) ok = false;
      if (tb::subsumes(a, b) && tb::subsumes(b, c) && !tb::subsumes(a, c)) {
        ok = false;
      }
    }
    report("equivalence and subsumption obey the relation laws", ok);
  }

  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Type-inference benchmark pipeline"};
  app.require_subcommand(1);
  app.fallthrough();  // --config/--seed are accepted after the subcommand too

  std::string config_path;
  unsigned seed = 20250817;
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--seed", seed, "Seed for the verify self-checks");

  std::string corpus, db, out_dir, plans_path;
  bool pure = false;
  CLI::App* build = app.add_subcommand("build", "Construct tasks from a corpus");
  build->add_option("--corpus", corpus, "Corpus file");
  build->add_option("--db", db, "Signature database file");
  build->add_option("--out", out_dir, "Output directory");
  build->add_flag("--pure", pure, "Also emit the rewritten pure variant");
  build->add_option("--plans", plans_path, "Write renaming plans (JSONL)");

  std::string rw_tasks, rw_out, rw_plans;
  CLI::App* rewrite = app.add_subcommand("rewrite", "Rewrite tasks to the pure variant");
  rewrite->add_option("--tasks", rw_tasks, "Input tasks (JSONL)")->required();
  rewrite->add_option("--out", rw_out, "Output tasks (JSONL)")->required();
  rewrite->add_option("--plans", rw_plans, "Write renaming plans (JSONL)");

  std::string truth_text, answer_text, proof_path;
  CLI::App* check = app.add_subcommand("check", "Compare two type signatures");
  check->add_option("truth", truth_text, "Ground-truth signature")->required();
  check->add_option("answer", answer_text, "Candidate signature")->required();
  check->add_option("--emit-proof", proof_path, "Write the equivalence-proof module");

  std::string eval_tasks, eval_endpoint, eval_out, eval_run_id;
  std::string eval_format = "md";
  int eval_repeats = 0;
  CLI::App* eval = app.add_subcommand("eval", "Query an endpoint over a task suite");
  eval->add_option("--tasks", eval_tasks, "Tasks file (JSONL)")->required();
  eval->add_option("--endpoint", eval_endpoint, "Endpoint name from config")->required();
  eval->add_option("--repeats", eval_repeats, "Runs per task (default from config)");
  eval->add_option("--out", eval_out, "Output directory");
  eval->add_option("--run-id", eval_run_id, "Run identifier (default derived)");
  eval->add_option("--report", eval_format, "Report format: json|csv|md");

  std::string rep_run, rep_tasks, rep_out;
  std::string rep_format = "md";
  std::vector<std::string> rs_args, re_args;
  CLI::App* report = app.add_subcommand("report", "Render metrics and reports");
  report->add_option("--run", rep_run, "Run directory to summarize");
  report->add_option("--tasks", rep_tasks, "Tasks file for category labels");
  CLI::Option* rep_format_opt =
      report->add_option("--format", rep_format, "json|csv|md");
  report->add_option("--rs", rs_args,
                     "Robustness score: REGULAR PURE (accuracy or run dir)")
      ->expected(2);
  report->add_option("--re", re_args,
                     "Reasoning effectiveness: BASE_REGULAR BASE_PURE "
                     "TTC_REGULAR TTC_PURE (accuracy or run dir)")
      ->expected(4);
  report->add_option("--out", rep_out, "Also write the rendering here");

  CLI::App* verify = app.add_subcommand("verify", "Run the built-in self-checks");

  CLI11_PARSE(app, argc, argv);

  tb::CliConfig config;
  if (!config_path.empty()) {
    try {
      config = tb::load_config(config_path);
    } catch (const std::exception& e) {
      std::cerr << e.what() << "\n";
      return 2;
    }
  }
  // Flags override config-provided defaults.
  if (corpus.empty()) corpus = config.corpus;
  if (db.empty()) db = config.sigdb;
  if (out_dir.empty()) out_dir = config.out_dir;
  if (eval_out.empty()) eval_out = config.out_dir;
  if (eval_repeats <= 0) eval_repeats = config.repeats;

  if (build->parsed()) {
    if (corpus.empty() || db.empty()) {
      std::cerr << "build requires --corpus and --db (or config entries)\n";
      return 1;
    }
    return cmd_build(corpus, db, out_dir, pure, plans_path, config.naming);
  }
  if (rewrite->parsed()) {
    return cmd_rewrite(rw_tasks, rw_out, rw_plans, config.naming);
  }
  if (check->parsed()) {
    return cmd_check(truth_text, answer_text, proof_path);
  }
  if (eval->parsed()) {
    return cmd_eval(config, eval_tasks, eval_endpoint, eval_repeats, eval_out,
                    eval_run_id, eval_format);
  }
  if (report->parsed()) {
    return cmd_report(rep_run, rep_tasks, rep_format, rep_format_opt->count() > 0,
                      rs_args, re_args, rep_out);
  }
  if (verify->parsed()) {
    return cmd_verify(seed);
  }
  return 0;
}
