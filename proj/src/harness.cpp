#include "tb/harness.hpp"

#include <httplib.h>

#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "tb/equivalence.hpp"
#include "tb/parse.hpp"

namespace tb {

namespace {

constexpr const char* kSystemPrompt =
    "Act as a static analysis tool for type inference.\n"
    "ONLY output the type signature.\n"
    "Do Not Provide any additional commentaries or explanations.";

constexpr const char* kInstructionCommon =
    "Remember that in Haskell:\n"
    "1. The list type `[a]` is a polymorphic type, defined as `data [] a = [] "
    "| (:) a [a]`,\nso `(:)` is a constructor for list type.\n"
    "2. The String type is a list of characters, defined as `type String = "
    "[Char]`";

constexpr const char* kInstructionRegular =
    "For polymorphic type variables, you can use type variables like `a`, "
    "`b`, `c`, etc.\nYou should start with `a` and increment the alphabet as "
    "needed.";

constexpr const char* kInstructionPure =
    "For polymorphic type variables, you can use type variables like `t1`, "
    "`t2`, `t3`, etc.\nYou should start with `t1` and increment the number as "
    "needed.";

void erase_all(std::string& text, const std::string& needle) {
  if (needle.empty()) return;
  std::size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    text.erase(pos, needle.size());
  }
}

void replace_all(std::string& text, const std::string& from, const std::string& to) {
  std::size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
}

std::string trim(const std::string& text) {
  std::size_t b = 0, e = text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  return text.substr(b, e - b);
}

bool is_fence_line(const std::string& line) {
  std::size_t i = 0;
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  return line.compare(i, 3, "```") == 0;
}

}  // namespace

std::string to_string(MergeMode mode) {
  return mode == MergeMode::SplitRoles ? "split-roles" : "single-message";
}

MergeMode merge_mode_from_string(const std::string& text) {
  if (text == "split-roles") return MergeMode::SplitRoles;
  if (text == "single-message") return MergeMode::SingleMessage;
  throw std::invalid_argument("unknown merge mode: " + text);
}

std::string PromptBundle::merged() const { return system + "\n\n" + user; }

std::string prompt_hook(const Task& task) { return task.target + " ::"; }

PromptBundle assemble_prompt(const Task& task, Variant variant, MergeMode mode) {
  PromptBundle bundle;
  bundle.merge_mode = mode;
  bundle.system = std::string(kSystemPrompt) + "\n\n" + kInstructionCommon +
                  "\n\n" +
                  (variant == Variant::Pure ? kInstructionPure : kInstructionRegular);

  std::ostringstream user;
  for (const auto& dep : task.dependencies) user << dep.text << "\n";
  user << "\n" << task.implementation << "\n";
  user << "-- complete the following type signature for `" << task.target
       << "`\n";
  user << prompt_hook(task);
  bundle.user = user.str();
  return bundle;
}

std::optional<std::string> postprocess_response(const std::string& raw,
                                                const std::string& hook) {
  std::string text;
  text.reserve(raw.size());
  std::istringstream lines(raw);
  std::string line;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_fence_line(line)) continue;
    text += line;
    text += '\n';
  }

  erase_all(text, hook);
  // Models that repeat the hook often drop the space before `::`.
  std::size_t sp = hook.rfind(" ::");
  if (sp != std::string::npos) {
    std::string tight = hook.substr(0, sp) + "::";
    erase_all(text, tight);
  }

  replace_all(text, "[Char]", "String");

  std::string trimmed = trim(text);
  if (trimmed.empty()) return std::nullopt;
  return trimmed;
}

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Correct: return "Correct";
    case Verdict::Incorrect: return "Incorrect";
    case Verdict::ParseFailure: return "ParseFailure";
    case Verdict::Empty: return "Empty";
    case Verdict::Timeout: return "Timeout";
  }
  return "Empty";
}

Verdict verdict_from_string(const std::string& text) {
  if (text == "Correct") return Verdict::Correct;
  if (text == "Incorrect") return Verdict::Incorrect;
  if (text == "ParseFailure") return Verdict::ParseFailure;
  if (text == "Empty") return Verdict::Empty;
  if (text == "Timeout") return Verdict::Timeout;
  throw std::invalid_argument("unknown verdict: " + text);
}

Json TaskOutcome::to_json(const std::string& raw_path) const {
  Json j;
  j["task_id"] = task_id;
  j["repeat"] = repeat;
  j["verdict"] = to_string(verdict);
  if (extracted) {
    j["extracted"] = *extracted;
  } else {
    j["extracted"] = nullptr;
  }
  j["latency_ms"] = latency_ms;
  j["raw"] = raw_path;
  return j;
}

TaskOutcome score_response(const Task& task, const std::string& raw) {
  TaskOutcome outcome;
  outcome.task_id = task.id;
  outcome.raw_response = raw;

  auto extracted = postprocess_response(raw, prompt_hook(task));
  if (!extracted) {
    outcome.verdict = Verdict::Empty;
    return outcome;
  }
  outcome.extracted = *extracted;

  ContextAndType answer;
  try {
    answer = parse_context_and_type(*extracted);
  } catch (const std::exception&) {
    outcome.verdict = Verdict::ParseFailure;
    return outcome;
  }

  TypeSignature candidate;
  candidate.binding = task.target;
  candidate.context = answer.context;
  candidate.body = answer.body;
  outcome.verdict = alpha_equivalent(task.truth, candidate) ? Verdict::Correct
                                                            : Verdict::Incorrect;
  return outcome;
}

std::pair<double, double> accuracy_mean_stderr(
    const std::vector<TaskOutcome>& outcomes, int repeats) {
  std::vector<double> per_repeat;
  for (int r = 1; r <= repeats; ++r) {
    std::size_t total = 0, correct = 0;
    for (const auto& o : outcomes) {
      if (o.repeat != r) continue;
      ++total;
      if (o.verdict == Verdict::Correct) ++correct;
    }
    if (total == 0) continue;  // aborted run may miss whole repeats
    per_repeat.push_back(100.0 * static_cast<double>(correct) /
                         static_cast<double>(total));
  }
  if (per_repeat.empty()) return {0.0, 0.0};

  double mean = 0.0;
  for (double a : per_repeat) mean += a;
  mean /= static_cast<double>(per_repeat.size());
  if (per_repeat.size() < 2) return {mean, 0.0};

  double ss = 0.0;
  for (double a : per_repeat) ss += (a - mean) * (a - mean);
  double sd = std::sqrt(ss / static_cast<double>(per_repeat.size() - 1));
  return {mean, sd / std::sqrt(static_cast<double>(per_repeat.size()))};
}

std::string sanitize_component(const std::string& name) {
  std::string out;
  out.reserve(name.size());
  for (unsigned char c : name) {
    if (std::isalnum(c) || c == '.' || c == '_' || c == '-') {
      out += static_cast<char>(c);
    } else {
      char buf[4];
      std::snprintf(buf, sizeof buf, "%%%02X", c);
      out += buf;
    }
  }
  return out;
}

Json RunReport::to_json() const {
  Json j;
  j["run_id"] = run_id;
  j["model_id"] = model_id;
  j["variant"] = tb::to_string(variant);
  j["ttc_flag"] = ttc_flag;
  j["repeats"] = repeats;
  Json rows = Json::array();
  for (const auto& o : outcomes) {
    rows.push_back(o.to_json(sanitize_component(o.task_id) + "/" +
                             std::to_string(o.repeat) + ".txt"));
  }
  j["outcomes"] = std::move(rows);
  j["mean_accuracy"] = mean_accuracy;
  j["stderr"] = std_error;
  return j;
}

RunReport RunReport::from_json(const Json& j) {
  RunReport report;
  report.run_id = j.at("run_id").get<std::string>();
  report.model_id = j.at("model_id").get<std::string>();
  report.variant = variant_from_string(j.at("variant").get<std::string>());
  report.ttc_flag = j.at("ttc_flag").get<bool>();
  report.repeats = j.at("repeats").get<int>();
  for (const auto& row : j.at("outcomes")) {
    TaskOutcome o;
    o.task_id = row.at("task_id").get<std::string>();
    o.repeat = row.at("repeat").get<int>();
    o.verdict = verdict_from_string(row.at("verdict").get<std::string>());
    if (!row.at("extracted").is_null()) {
      o.extracted = row.at("extracted").get<std::string>();
    }
    o.latency_ms = row.at("latency_ms").get<double>();
    report.outcomes.push_back(std::move(o));
  }
  report.mean_accuracy = j.at("mean_accuracy").get<double>();
  report.std_error = j.at("stderr").get<double>();
  return report;
}

void save_report(const RunReport& report, const std::filesystem::path& run_dir) {
  std::filesystem::create_directories(run_dir);
  std::ofstream out(run_dir / "report.json", std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + (run_dir / "report.json").string());
  }
  out << report.to_json().dump(2) << "\n";
}

RunReport load_report(const std::filesystem::path& run_dir) {
  std::ifstream in(run_dir / "report.json", std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot read " + (run_dir / "report.json").string());
  }
  Json j = Json::parse(in);
  return RunReport::from_json(j);
}

namespace {

struct SplitUrl {
  std::string host;  // scheme://host:port, what httplib::Client accepts
  std::string path_prefix;
};

SplitUrl split_base_url(const std::string& base_url) {
  SplitUrl out;
  std::size_t scheme = base_url.find("://");
  std::size_t path_start =
      base_url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  if (path_start == std::string::npos) {
    out.host = base_url;
  } else {
    out.host = base_url.substr(0, path_start);
    out.path_prefix = base_url.substr(path_start);
    while (!out.path_prefix.empty() && out.path_prefix.back() == '/') {
      out.path_prefix.pop_back();
    }
  }
  return out;
}

// Chat-completion content; non-conforming bodies are kept verbatim so scoring
// still runs over whatever the endpoint said.
std::string extract_content(const std::string& body) {
  try {
    Json j = Json::parse(body);
    const Json& content = j.at("choices").at(0).at("message").at("content");
    if (content.is_string()) return content.get<std::string>();
  } catch (const std::exception&) {
  }
  return body;
}

std::string raw_file_rel(const TaskOutcome& outcome) {
  return sanitize_component(outcome.task_id) + "/" +
         std::to_string(outcome.repeat) + ".txt";
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

RunReport run_benchmark(const std::vector<Task>& suite, const EndpointConfig& cfg,
                        int repeats, const std::filesystem::path& out_dir,
                        const std::string& run_id) {
  if (suite.empty()) throw std::invalid_argument("empty task suite");
  if (repeats < 1) throw std::invalid_argument("repeats must be >= 1");
  if (cfg.max_in_flight < 1) throw std::invalid_argument("max_in_flight must be >= 1");

  const std::filesystem::path run_dir = out_dir / run_id;
  std::filesystem::create_directories(run_dir);

  struct Job {
    std::size_t task_index;
    int repeat;
  };
  std::vector<Job> jobs;
  jobs.reserve(suite.size() * static_cast<std::size_t>(repeats));
  for (std::size_t t = 0; t < suite.size(); ++t) {
    for (int r = 1; r <= repeats; ++r) jobs.push_back({t, r});
  }

  const SplitUrl url = split_base_url(cfg.base_url);
  httplib::Headers headers;
  if (!cfg.auth_env.empty()) {
    if (const char* token = std::getenv(cfg.auth_env.c_str());
        token != nullptr && *token != '\0') {
      headers.emplace("Authorization", std::string("Bearer ") + token);
    }
  }

  std::vector<TaskOutcome> results(jobs.size());
  std::vector<char> completed(jobs.size(), 0);
  std::atomic<std::size_t> next_job{0};
  std::atomic<bool> unreachable{false};
  std::mutex detail_mutex;
  std::string unreachable_detail;

  auto worker = [&]() {
    httplib::Client client(url.host);
    const auto timeout = std::chrono::milliseconds(
        static_cast<long long>(cfg.timeout_seconds * 1000.0));
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    while (true) {
      if (unreachable.load()) return;
      const std::size_t i = next_job.fetch_add(1);
      if (i >= jobs.size()) return;
      const Job job = jobs[i];
      const Task& task = suite[job.task_index];

      PromptBundle bundle = assemble_prompt(task, task.variant, cfg.merge_mode);
      Json body;
      body["model"] = cfg.model_id;
      if (cfg.merge_mode == MergeMode::SplitRoles) {
        body["messages"] = Json::array({Json{{"role", "system"}, {"content", bundle.system}},
                                        Json{{"role", "user"}, {"content", bundle.user}}});
      } else {
        body["messages"] =
            Json::array({Json{{"role", "user"}, {"content", bundle.merged()}}});
      }
      if (cfg.ttc && cfg.ttc_request.is_object()) {
        for (const auto& item : cfg.ttc_request.items()) {
          body[item.key()] = item.value();
        }
      }
      const std::string body_str = body.dump();
      const std::string path = url.path_prefix + "/chat/completions";

      const auto start = std::chrono::steady_clock::now();
      std::string raw;
      bool fetched = false;
      for (int attempt = 0; attempt <= cfg.retries; ++attempt) {
        if (attempt > 0) {
          std::this_thread::sleep_for(std::chrono::milliseconds(250 << (attempt - 1)));
        }
        auto res = client.Post(path, headers, body_str, "application/json");
        if (!res) {
          const httplib::Error err = res.error();
          if (err == httplib::Error::Connection ||
              err == httplib::Error::ConnectionTimeout) {
            {
              std::lock_guard<std::mutex> lock(detail_mutex);
              unreachable_detail = httplib::to_string(err) + " for " + cfg.base_url;
            }
            unreachable.store(true);
            return;  // job abandoned; partial results are persisted below
          }
          continue;  // read/write failure: a late response is discarded, retry
        }
        if (res->status < 200 || res->status >= 300) continue;
        raw = extract_content(res->body);
        fetched = true;
        break;
      }
      const double latency_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                    start)
              .count();

      TaskOutcome outcome;
      if (fetched) {
        outcome = score_response(task, raw);
      } else {
        outcome.task_id = task.id;
        outcome.verdict = Verdict::Timeout;
      }
      outcome.repeat = job.repeat;
      outcome.latency_ms = latency_ms;
      // Raw text lands on disk before the outcome counts as complete.
      write_text_file(run_dir / raw_file_rel(outcome), outcome.raw_response);
      results[i] = std::move(outcome);
      completed[i] = 1;
    }
  };

  const std::size_t n_workers =
      std::min<std::size_t>(static_cast<std::size_t>(cfg.max_in_flight), jobs.size());
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  RunReport report;
  report.run_id = run_id;
  report.model_id = cfg.model_id;
  report.variant = suite.front().variant;  // suites are single-variant
  report.ttc_flag = cfg.ttc;
  report.repeats = repeats;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (completed[i]) report.outcomes.push_back(std::move(results[i]));
  }
  auto [mean, se] = accuracy_mean_stderr(report.outcomes, repeats);
  report.mean_accuracy = mean;
  report.std_error = se;
  save_report(report, run_dir);

  if (unreachable.load()) {
    throw EndpointUnreachable("endpoint unreachable: " + unreachable_detail +
                              " (partial results in " + run_dir.string() + ")");
  }
  return report;
}

RunReport replay_run(const std::filesystem::path& run_dir,
                     const std::vector<Task>& tasks) {
  RunReport old = load_report(run_dir);

  std::map<std::string, const Task*> by_id;
  for (const auto& task : tasks) by_id[task.id] = &task;

  RunReport fresh = old;
  fresh.outcomes.clear();
  for (const auto& prior : old.outcomes) {
    auto it = by_id.find(prior.task_id);
    if (it == by_id.end()) {
      throw std::runtime_error("replay: no task with id " + prior.task_id);
    }
    if (prior.verdict == Verdict::Timeout) {
      // Nothing was fetched, so there is nothing to re-score.
      fresh.outcomes.push_back(prior);
      continue;
    }
    const std::string raw = read_text_file(run_dir / raw_file_rel(prior));
    TaskOutcome outcome = score_response(*it->second, raw);
    outcome.repeat = prior.repeat;
    outcome.latency_ms = prior.latency_ms;
    fresh.outcomes.push_back(std::move(outcome));
  }
  auto [mean, se] = accuracy_mean_stderr(fresh.outcomes, fresh.repeats);
  fresh.mean_accuracy = mean;
  fresh.std_error = se;
  return fresh;
}

}  // namespace tb
