#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "tb/harness.hpp"
#include "tb/task.hpp"

namespace tb {

enum class MetricName { Acc, AccPure, RS, RE };

std::string to_string(MetricName name);

struct MetricValue {
  MetricName name = MetricName::Acc;
  double value = 0.0;      // percent scale for Acc/AccPure/RS, ratio for RE
  double std_error = 0.0;  // accuracy flavors only
  std::vector<std::string> inputs;  // run-report ids this was computed from
  std::vector<double> operands;     // the accuracies the ratio was built from
};

struct EmptyReport : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DivisionByZero : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UndefinedDelta : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Mean over repeats of (correct/total) x 100 with its standard error,
// recomputed from the outcome rows. Named AccPure when the run was pure.
MetricValue accuracy_summary(const RunReport& report);

// RS = acc_pure / acc x 100. Computed from mean accuracies, not per-repeat.
MetricValue robustness_score(const MetricValue& acc, const MetricValue& acc_pure);

struct AccuracyPair {
  double acc = 0.0;       // regular-variant accuracy, percent
  double acc_pure = 0.0;  // pure-variant accuracy, percent
};

// RE = (ttc.acc_pure - base.acc_pure) / (ttc.acc - base.acc). A zero
// regular-variant delta leaves the ratio undefined and is reported as such.
MetricValue reasoning_effectiveness(const AccuracyPair& base, const AccuracyPair& ttc);

enum class ErrorCategory {
  OverGeneralization,
  UnderGeneralization,
  ArgOrderMismatch,
  ArityMismatch,
  ConstraintError,
  SyntaxError,
  InstructionFollowing,
  ResponseError,
  Unclassified,
};

std::string to_string(ErrorCategory category);

// Fixed decision ladder over a non-Correct outcome, first rung wins:
//   Empty/Timeout                 -> ResponseError
//   parseable signature in prose  -> InstructionFollowing
//   unparseable                   -> SyntaxError
//   top-level arrow count differs -> ArityMismatch
//   answer subsumes truth         -> OverGeneralization
//   truth subsumes answer         -> UnderGeneralization
//   bodies equal, contexts differ -> ConstraintError
//   argument multiset permuted    -> ArgOrderMismatch
//   otherwise                     -> Unclassified
// Total: every incorrect outcome lands on exactly one rung.
ErrorCategory classify_error(const Task& task, const TaskOutcome& outcome);

enum class ReportFormat { Json, Csv, Markdown };

ReportFormat report_format_from_string(const std::string& text);

// Renders metrics plus outcome rows with a per-category accuracy breakdown.
// `categories` maps task ids to their corpus category; rows with unknown ids
// are skipped by the breakdown but still listed. CSV is one row per task.
std::string render_report(const std::vector<MetricValue>& metrics,
                          const std::vector<TaskOutcome>& outcomes,
                          const std::map<std::string, Category>& categories,
                          ReportFormat format);

}  // namespace tb
