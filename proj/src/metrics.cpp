#include "tb/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <iomanip>
#include <sstream>

#include "tb/equivalence.hpp"
#include "tb/parse.hpp"

namespace tb {

namespace {

std::string trim(const std::string& text) {
  std::size_t b = 0, e = text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  return text.substr(b, e - b);
}

bool parses_as_type(const std::string& text) {
  try {
    parse_context_and_type(text);
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

bool arrow_or_context(const std::string& text) {
  return text.find("->") != std::string::npos ||
         text.find("=>") != std::string::npos;
}

// A signature the model wrapped in prose: a `name :: type` line, a backtick
// span, or a bare line that reads as a function type. Plain words that happen
// to parse as atoms (e.g. "Sure") do not count.
bool embedded_signature(const std::string& text) {
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    std::size_t pos = line.find("::");
    if (pos != std::string::npos && parses_as_type(trim(line.substr(pos + 2)))) {
      return true;
    }
    std::string bare = trim(line);
    if (arrow_or_context(bare) && parses_as_type(bare)) return true;
  }
  std::size_t open = text.find('`');
  while (open != std::string::npos) {
    std::size_t close = text.find('`', open + 1);
    if (close == std::string::npos) break;
    std::string span = trim(text.substr(open + 1, close - open - 1));
    if (arrow_or_context(span) && parses_as_type(span)) return true;
    open = text.find('`', close + 1);
  }
  return false;
}

TypeRef peel_forall(TypeRef t) {
  while (const auto* fa = t->as<Forall>()) t = fa->body;
  return t;
}

int top_arrow_count(TypeRef t) {
  int n = 0;
  t = peel_forall(t);
  while (const auto* ar = t->as<Arrow>()) {
    ++n;
    t = peel_forall(ar->to);
  }
  return n;
}

// Top-level argument positions, left to right.
std::vector<TypeRef> argument_spine(TypeRef t) {
  std::vector<TypeRef> args;
  t = peel_forall(t);
  while (const auto* ar = t->as<Arrow>()) {
    args.push_back(ar->from);
    t = peel_forall(ar->to);
  }
  return args;
}

// Position-independent fingerprint of one argument type.
std::string canonical_argument(const TypeRef& arg) {
  TypeSignature one;
  one.binding = "x";
  one.body = arg;
  return print_type(canonicalize(one).body);
}

std::string format_value(double v) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2) << v;
  return out.str();
}

struct CategoryRow {
  Category category = Category::Monomorphic;
  std::size_t total = 0;    // outcome rows, repeats included
  std::size_t correct = 0;
};

std::vector<CategoryRow> category_breakdown(
    const std::vector<TaskOutcome>& outcomes,
    const std::map<std::string, Category>& categories) {
  std::vector<CategoryRow> rows(3);
  rows[0].category = Category::Monomorphic;
  rows[1].category = Category::Parametric;
  rows[2].category = Category::AdHoc;
  for (const auto& o : outcomes) {
    auto it = categories.find(o.task_id);
    if (it == categories.end()) continue;
    CategoryRow& row = rows[static_cast<std::size_t>(it->second)];
    ++row.total;
    if (o.verdict == Verdict::Correct) ++row.correct;
  }
  return rows;
}

struct TaskRow {
  std::string task_id;
  std::size_t repeats = 0;
  std::size_t correct = 0;
};

// Aggregates outcome rows per task, first-seen order.
std::vector<TaskRow> task_rows(const std::vector<TaskOutcome>& outcomes) {
  std::vector<TaskRow> rows;
  std::map<std::string, std::size_t> index;
  for (const auto& o : outcomes) {
    auto [it, fresh] = index.emplace(o.task_id, rows.size());
    if (fresh) rows.push_back({o.task_id, 0, 0});
    TaskRow& row = rows[it->second];
    ++row.repeats;
    if (o.verdict == Verdict::Correct) ++row.correct;
  }
  return rows;
}

Json metric_to_json(const MetricValue& m) {
  Json j;
  j["name"] = to_string(m.name);
  j["value"] = m.value;
  j["stderr"] = m.std_error;
  j["inputs"] = m.inputs;
  j["operands"] = m.operands;
  return j;
}

}  // namespace

std::string to_string(MetricName name) {
  switch (name) {
    case MetricName::Acc: return "Acc";
    case MetricName::AccPure: return "Acc_pure";
    case MetricName::RS: return "RS";
    case MetricName::RE: return "RE";
  }
  return "Acc";
}

MetricValue accuracy_summary(const RunReport& report) {
  if (report.outcomes.empty()) {
    throw EmptyReport("report " + report.run_id + " has no outcomes");
  }
  auto [mean, se] = accuracy_mean_stderr(report.outcomes, report.repeats);
  MetricValue m;
  m.name = report.variant == Variant::Pure ? MetricName::AccPure : MetricName::Acc;
  m.value = mean;
  m.std_error = se;
  m.inputs = {report.run_id};
  return m;
}

MetricValue robustness_score(const MetricValue& acc, const MetricValue& acc_pure) {
  if (acc.value == 0.0) {
    throw DivisionByZero("robustness score undefined at zero regular accuracy");
  }
  MetricValue m;
  m.name = MetricName::RS;
  m.value = acc_pure.value / acc.value * 100.0;
  m.inputs = acc.inputs;
  m.inputs.insert(m.inputs.end(), acc_pure.inputs.begin(), acc_pure.inputs.end());
  m.operands = {acc.value, acc_pure.value};
  return m;
}

MetricValue reasoning_effectiveness(const AccuracyPair& base, const AccuracyPair& ttc) {
  const double delta = ttc.acc - base.acc;
  if (delta == 0.0) {
    throw UndefinedDelta("reasoning effectiveness undefined at zero accuracy delta");
  }
  MetricValue m;
  m.name = MetricName::RE;
  m.value = (ttc.acc_pure - base.acc_pure) / delta;
  m.operands = {base.acc, base.acc_pure, ttc.acc, ttc.acc_pure};
  return m;
}

std::string to_string(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::OverGeneralization: return "OverGeneralization";
    case ErrorCategory::UnderGeneralization: return "UnderGeneralization";
    case ErrorCategory::ArgOrderMismatch: return "ArgOrderMismatch";
    case ErrorCategory::ArityMismatch: return "ArityMismatch";
    case ErrorCategory::ConstraintError: return "ConstraintError";
    case ErrorCategory::SyntaxError: return "SyntaxError";
    case ErrorCategory::InstructionFollowing: return "InstructionFollowing";
    case ErrorCategory::ResponseError: return "ResponseError";
    case ErrorCategory::Unclassified: return "Unclassified";
  }
  return "Unclassified";
}

ErrorCategory classify_error(const Task& task, const TaskOutcome& outcome) {
  switch (outcome.verdict) {
    case Verdict::Correct:
      throw std::invalid_argument("classify_error requires a non-Correct outcome");
    case Verdict::Empty:
    case Verdict::Timeout:
      return ErrorCategory::ResponseError;
    case Verdict::ParseFailure:
      return outcome.extracted && embedded_signature(*outcome.extracted)
                 ? ErrorCategory::InstructionFollowing
                 : ErrorCategory::SyntaxError;
    case Verdict::Incorrect:
      break;
  }

  if (!outcome.extracted) return ErrorCategory::SyntaxError;
  ContextAndType parsed;
  try {
    parsed = parse_context_and_type(*outcome.extracted);
  } catch (const std::exception&) {
    return ErrorCategory::SyntaxError;  // Incorrect rows always reparse; defensive
  }
  TypeSignature answer;
  answer.binding = task.target;
  answer.context = parsed.context;
  answer.body = parsed.body;

  if (top_arrow_count(answer.body) != top_arrow_count(task.truth.body)) {
    return ErrorCategory::ArityMismatch;
  }
  if (subsumes(answer, task.truth)) return ErrorCategory::OverGeneralization;
  if (subsumes(task.truth, answer)) return ErrorCategory::UnderGeneralization;

  TypeSignature truth_body = task.truth;
  truth_body.context.clear();
  TypeSignature answer_body = answer;
  answer_body.context.clear();
  if (alpha_equivalent(truth_body, answer_body)) {
    return ErrorCategory::ConstraintError;
  }

  std::vector<std::string> truth_args, answer_args;
  for (const auto& a : argument_spine(task.truth.body)) {
    truth_args.push_back(canonical_argument(a));
  }
  for (const auto& a : argument_spine(answer.body)) {
    answer_args.push_back(canonical_argument(a));
  }
  if (truth_args != answer_args) {
    std::vector<std::string> ts = truth_args, as = answer_args;
    std::sort(ts.begin(), ts.end());
    std::sort(as.begin(), as.end());
    if (ts == as) return ErrorCategory::ArgOrderMismatch;
  }
  return ErrorCategory::Unclassified;
}

ReportFormat report_format_from_string(const std::string& text) {
  if (text == "json") return ReportFormat::Json;
  if (text == "csv") return ReportFormat::Csv;
  if (text == "md" || text == "markdown") return ReportFormat::Markdown;
  throw std::invalid_argument("unknown report format: " + text);
}

std::string render_report(const std::vector<MetricValue>& metrics,
                          const std::vector<TaskOutcome>& outcomes,
                          const std::map<std::string, Category>& categories,
                          ReportFormat format) {
  const std::vector<CategoryRow> breakdown = category_breakdown(outcomes, categories);

  if (format == ReportFormat::Json) {
    Json j;
    Json ms = Json::array();
    for (const auto& m : metrics) ms.push_back(metric_to_json(m));
    j["metrics"] = std::move(ms);
    Json cats;
    for (const auto& row : breakdown) {
      Json c;
      c["total"] = row.total;
      c["correct"] = row.correct;
      c["accuracy"] = row.total == 0 ? 0.0
                                     : 100.0 * static_cast<double>(row.correct) /
                                           static_cast<double>(row.total);
      cats[to_string(row.category)] = std::move(c);
    }
    j["category_breakdown"] = std::move(cats);
    Json rows = Json::array();
    for (const auto& o : outcomes) {
      Json r;
      r["task_id"] = o.task_id;
      r["repeat"] = o.repeat;
      auto it = categories.find(o.task_id);
      if (it == categories.end()) {
        r["category"] = nullptr;
      } else {
        r["category"] = to_string(it->second);
      }
      r["verdict"] = to_string(o.verdict);
      r["latency_ms"] = o.latency_ms;
      rows.push_back(std::move(r));
    }
    j["outcomes"] = std::move(rows);
    return j.dump(2) + "\n";
  }

  if (format == ReportFormat::Csv) {
    std::ostringstream out;
    out << "task_id,category,repeats,correct,accuracy\n";
    for (const auto& row : task_rows(outcomes)) {
      auto it = categories.find(row.task_id);
      out << row.task_id << ','
          << (it == categories.end() ? "" : to_string(it->second)) << ','
          << row.repeats << ',' << row.correct << ','
          << format_value(row.repeats == 0
                              ? 0.0
                              : 100.0 * static_cast<double>(row.correct) /
                                    static_cast<double>(row.repeats))
          << '\n';
    }
    return out.str();
  }

  std::ostringstream out;
  out << "# Run report\n\n";
  if (!metrics.empty()) {
    out << "| Metric | Value | Stderr | Inputs |\n";
    out << "|---|---|---|---|\n";
    for (const auto& m : metrics) {
      out << "| " << to_string(m.name) << " | " << format_value(m.value) << " | "
          << format_value(m.std_error) << " | ";
      for (std::size_t i = 0; i < m.inputs.size(); ++i) {
        if (i) out << ", ";
        out << m.inputs[i];
      }
      out << " |\n";
    }
    out << "\n";
    for (const auto& m : metrics) {
      if (m.name != MetricName::RS || m.operands.size() != 2) continue;
      out << "| Model | Acc | Acc_pure | RS |\n|---|---|---|---|\n";
      out << "| " << (m.inputs.empty() ? std::string("-") : m.inputs.front())
          << " | " << format_value(m.operands[0]) << " | "
          << format_value(m.operands[1]) << " | " << format_value(m.value)
          << " |\n\n";
    }
  }
  out << "## Accuracy by category\n\n";
  out << "| Category | Outcomes | Correct | Accuracy |\n|---|---|---|---|\n";
  for (const auto& row : breakdown) {
    out << "| " << to_string(row.category) << " | " << row.total << " | "
        << row.correct << " | "
        << format_value(row.total == 0 ? 0.0
                                       : 100.0 * static_cast<double>(row.correct) /
                                             static_cast<double>(row.total))
        << " |\n";
  }
  return out.str();
}

}  // namespace tb
