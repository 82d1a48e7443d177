#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tb/task.hpp"

namespace tb {

// How the prompt is packaged for the provider: a real system role, or one
// concatenated user message for APIs that lack a system role.
enum class MergeMode { SplitRoles, SingleMessage };

std::string to_string(MergeMode mode);
MergeMode merge_mode_from_string(const std::string& text);

struct PromptBundle {
  std::string system;  // role instructions + the variant-matching guidance block
  std::string user;    // dependency lines, implementation, comment, hook
  MergeMode merge_mode = MergeMode::SplitRoles;

  // Single-message packaging; same total text, different role envelope.
  std::string merged() const;
};

// `<target> ::` — appended to the prompt and stripped from responses.
std::string prompt_hook(const Task& task);

// The user text always ends with the hook, with nothing after it.
PromptBundle assemble_prompt(const Task& task, Variant variant,
                             MergeMode mode = MergeMode::SplitRoles);

// Formatting cleanup, in order: drop markdown fence lines, delete every hook
// occurrence, spell `[Char]` as `String`, trim. Empty optional when nothing
// survives. Total: never throws.
std::optional<std::string> postprocess_response(const std::string& raw,
                                                const std::string& hook);

enum class Verdict { Correct, Incorrect, ParseFailure, Empty, Timeout };

std::string to_string(Verdict verdict);
Verdict verdict_from_string(const std::string& text);

struct TaskOutcome {
  std::string task_id;
  int repeat = 1;  // 1-based
  std::string raw_response;
  std::optional<std::string> extracted;
  Verdict verdict = Verdict::Empty;
  double latency_ms = 0.0;

  // Report rows omit raw_response; it lives in the raw store at `raw_path`.
  Json to_json(const std::string& raw_path) const;
};

// postprocess -> parse -> alpha-equivalence against task.truth. Deterministic;
// fills task_id, raw_response, extracted, verdict. repeat/latency are the
// caller's.
TaskOutcome score_response(const Task& task, const std::string& raw);

struct EndpointConfig {
  std::string base_url;  // e.g. http://127.0.0.1:8080/v1
  std::string model_id;
  std::string auth_env;  // NAME of the env var holding the bearer token
  double timeout_seconds = 300.0;
  int max_in_flight = 4;
  int retries = 2;  // additional attempts after the first, exponential backoff
  MergeMode merge_mode = MergeMode::SplitRoles;
  bool ttc = false;   // reasoning mode; recorded in the report for RE pairing
  Json ttc_request;   // provider-specific request fields merged into the body
};

struct RunReport {
  std::string run_id;
  std::string model_id;
  Variant variant = Variant::Regular;
  bool ttc_flag = false;
  int repeats = 0;
  std::vector<TaskOutcome> outcomes;  // suite order, repeats adjacent
  double mean_accuracy = 0.0;         // percent scale
  double std_error = 0.0;             // over per-repeat accuracies

  Json to_json() const;
  static RunReport from_json(const Json& j);
};

// Mean and sample standard error of per-repeat accuracy (percent scale).
// Single repeat has no spread estimate: std_error = 0.
std::pair<double, double> accuracy_mean_stderr(
    const std::vector<TaskOutcome>& outcomes, int repeats);

// Connection-level failure (refused / unresolvable); the run aborts but
// everything already fetched is persisted first.
struct EndpointUnreachable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Collision-free file-name encoding for task ids ('/' in operator names, ':'
// in line suffixes): every byte outside [A-Za-z0-9._-] becomes %XX.
std::string sanitize_component(const std::string& name);

// Queries `<base_url>/chat/completions` repeats times per task with a bounded
// worker pool. Raw responses are persisted to `<out>/<run_id>/<task>/<n>.txt`
// BEFORE scoring; exhausted retries mark the outcome Timeout. The report is
// written to `<out>/<run_id>/report.json` (no timestamps, so reruns with a
// fixed run id are byte-identical).
RunReport run_benchmark(const std::vector<Task>& suite, const EndpointConfig& cfg,
                        int repeats, const std::filesystem::path& out_dir,
                        const std::string& run_id);

// Re-scores a persisted run from its raw store. Latencies and Timeout
// verdicts (which have no raw text to re-score) carry over from the stored
// report; everything else is recomputed. Output is byte-identical to the
// original report when the scorer is unchanged.
RunReport replay_run(const std::filesystem::path& run_dir,
                     const std::vector<Task>& tasks);

void save_report(const RunReport& report, const std::filesystem::path& run_dir);
RunReport load_report(const std::filesystem::path& run_dir);

}  // namespace tb
