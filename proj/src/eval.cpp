// Copyright 2026 The ineqforge Authors
//
// Licensed under the Apache License, Version 2.0.
// SPDX-License-Identifier: Apache-2.0

#include "ineqforge/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "httplib.h"
#include "json.hpp"

#include "ineqforge/subprocess.hpp"

namespace ineqforge {

namespace {

using Json = nlohmann::ordered_json;

std::string first_lines(const std::string& text, std::size_t max_lines,
                        std::size_t max_chars) {
  std::string out;
  std::istringstream in(text);
  std::string line;
  std::size_t lines = 0;
  while (lines < max_lines && std::getline(in, line)) {
    if (!out.empty()) out += "\n";
    out += line;
    ++lines;
  }
  if (out.size() > max_chars) out.resize(max_chars);
  return out;
}

}  // namespace

EvalRecord make_record(std::string problem_id, std::string attempt_id,
                       bool compiled, double wall_time_s,
                       std::string error_excerpt, bool timeout,
                       std::string corpus_label) {
  EvalRecord r;
  r.problem_id = std::move(problem_id);
  r.attempt_id = std::move(attempt_id);
  r.compiled = compiled;
  r.wall_time_s = wall_time_s;
  if (compiled) {
    r.error_excerpt.clear();
    r.timeout = false;
  } else {
    r.error_excerpt = std::move(error_excerpt);
    r.timeout = timeout;
  }
  r.corpus_label = std::move(corpus_label);
  return r;
}

std::string record_to_json(const EvalRecord& r) {
  Json j;
  j["problem_id"] = r.problem_id;
  j["attempt_id"] = r.attempt_id;
  j["compiled"] = r.compiled;
  j["wall_time"] = r.wall_time_s;
  j["error"] = r.error_excerpt;
  j["timeout"] = r.timeout;
  j["corpus"] = r.corpus_label;
  return j.dump();
}

EvalRecord record_from_json(const std::string& line) {
  Json j = Json::parse(line);
  return make_record(j.at("problem_id").get<std::string>(),
                     j.at("attempt_id").get<std::string>(),
                     j.at("compiled").get<bool>(),
                     j.value("wall_time", 0.0), j.value("error", ""),
                     j.value("timeout", false), j.value("corpus", "all"));
}

std::optional<Toolchain> resolve_toolchain(const std::string& flag_value,
                                           const std::string& pin) {
  std::string command = flag_value;
  if (command.empty()) {
    if (const char* env = std::getenv("INEQFORGE_LEAN_CMD")) command = env;
  }
  if (command.empty()) return std::nullopt;
  Toolchain tc;
  tc.command = command;
  if (!pin.empty()) tc.mathlib_pin = pin;
  if (const char* env_pin = std::getenv("INEQFORGE_MATHLIB_PIN");
      env_pin && pin.empty()) {
    tc.mathlib_pin = env_pin;
  }
  return tc;
}

EvalRecord verify(const LeanArtifact& artifact, const Toolchain& toolchain,
                  double timeout_s, VerifyMode mode,
                  const std::string& problem_id,
                  const std::string& attempt_id) {
  if (toolchain.command.empty()) {
    throw ConfigError("prover toolchain is not configured");
  }
  if (!(timeout_s > 0.0)) throw ConfigError("verify timeout must be > 0");

  namespace fs = std::filesystem;
  char tmpl[] = "/tmp/ineqforge-verify-XXXXXX";
  const char* dir = mkdtemp(tmpl);
  if (!dir) throw std::runtime_error("mkdtemp failed");
  const fs::path file = fs::path(dir) / "candidate.lean";
  {
    std::ofstream out(file);
    out << artifact.file_text();
  }

  std::vector<std::string> argv = split_command(toolchain.command);
  argv.push_back(file.string());
  const ProcessResult res = run_process(argv, "", timeout_s);

  std::error_code ec;
  fs::remove_all(dir, ec);

  const bool sorry_warned =
      res.output.find("declaration uses 'sorry'") != std::string::npos ||
      res.output.find("declaration uses `sorry`") != std::string::npos;
  const bool compiled = !res.timed_out && res.exit_code == 0 &&
                        (mode == VerifyMode::StatementOnly || !sorry_warned);
  std::string excerpt;
  if (!compiled) {
    excerpt = res.timed_out ? "timeout"
              : sorry_warned && res.exit_code == 0
                  ? "declaration uses 'sorry'"
                  : first_lines(res.output, 5, 400);
    if (excerpt.empty()) excerpt = "exit " + std::to_string(res.exit_code);
  }
  return make_record(problem_id, attempt_id, compiled, res.wall_time_s,
                     excerpt, res.timed_out);
}

std::vector<Attempt> load_attempts(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open attempts file '" + path + "'");
  std::vector<Attempt> attempts;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw std::runtime_error(path + ": line " + std::to_string(lineno) +
                               ": invalid JSON");
    }
    Attempt a;
    a.problem_id = j.at("problem_id").get<std::string>();
    a.attempt_id = j.at("attempt_id").get<std::string>();
    a.model = j.value("model", "");
    a.proof_text = j.at("proof_text").get<std::string>();
    a.corpus_label = j.value("corpus", "all");
    attempts.push_back(std::move(a));
  }
  return attempts;
}

namespace {

std::string adapter_prompt(const Problem& p, const ProverAdapter& adapter) {
  PromptTask task;
  task.template_id = adapter.template_id;
  task.formal_statement = render_statement(p).statement_line();
  return render_prompt(task);
}

std::string http_completion(const ProverAdapter& adapter,
                            const std::string& prompt) {
  // endpoint: http://host:port/path
  const std::string& url = adapter.endpoint_or_command;
  const std::size_t scheme = url.find("://");
  if (scheme == std::string::npos) {
    throw ConfigError("http adapter endpoint must be a URL: " + url);
  }
  const std::size_t host_begin = scheme + 3;
  const std::size_t path_begin = url.find('/', host_begin);
  const std::string host_port =
      url.substr(host_begin, path_begin == std::string::npos
                                 ? std::string::npos
                                 : path_begin - host_begin);
  const std::string path =
      path_begin == std::string::npos ? "/v1/chat/completions"
                                      : url.substr(path_begin);

  Json body;
  body["model"] = adapter.model;
  body["messages"] = Json::array({Json{{"role", "user"}, {"content", prompt}}});
  body["temperature"] = adapter.temperature;
  body["max_tokens"] = adapter.max_tokens;

  httplib::Client client(("http://" + host_port).c_str());
  client.set_read_timeout(600, 0);
  auto res = client.Post(path.c_str(), body.dump(), "application/json");
  if (!res || res->status != 200) {
    throw std::runtime_error("http adapter request failed");
  }
  Json reply = Json::parse(res->body);
  const auto& choice = reply.at("choices").at(0);
  if (choice.contains("message")) {
    return choice.at("message").at("content").get<std::string>();
  }
  return choice.at("text").get<std::string>();
}

std::vector<Attempt> collect_adapter_attempts(
    const std::vector<Problem>& problems, const ProverAdapter& adapter,
    double timeout_s) {
  std::vector<Attempt> attempts;
  for (const auto& p : problems) {
    const std::string prompt = adapter_prompt(p, adapter);
    for (int i = 0; i < adapter.attempts_per_problem; ++i) {
      Attempt a;
      a.problem_id = p.id;
      a.attempt_id = "gen" + std::to_string(i);
      a.model = adapter.model;
      try {
        if (adapter.kind == ProverAdapter::Kind::Command) {
          const ProcessResult res = run_process(
              split_command(adapter.endpoint_or_command), prompt, timeout_s);
          if (res.exit_code != 0 || res.timed_out) {
            a.proof_text.clear();  // failed attempt, scored as such
          } else {
            a.proof_text = res.output;
          }
        } else {
          a.proof_text = http_completion(adapter, prompt);
        }
      } catch (const std::exception&) {
        a.proof_text.clear();
      }
      attempts.push_back(std::move(a));
    }
  }
  return attempts;
}

}  // namespace

std::vector<EvalRecord> run_batch(const std::vector<Problem>& problems,
                                  std::vector<Attempt> attempts,
                                  const std::optional<ProverAdapter>& adapter,
                                  const Toolchain& toolchain,
                                  const BatchOptions& options) {
  if (options.workers < 1) throw ConfigError("workers must be >= 1");
  if (adapter && adapter->attempts_per_problem < 1) {
    throw ConfigError("adapter attempts per problem must be >= 1");
  }

  std::unordered_map<std::string, const Problem*> by_id;
  for (const auto& p : problems) by_id[p.id] = &p;

  if (adapter) {
    auto generated =
        collect_adapter_attempts(problems, *adapter, options.timeout_s);
    attempts.insert(attempts.end(),
                    std::make_move_iterator(generated.begin()),
                    std::make_move_iterator(generated.end()));
  }

  // Resume: anything already journaled is final.
  std::vector<EvalRecord> results;
  std::unordered_set<std::string> done;
  if (!options.journal_path.empty()) {
    std::ifstream in(options.journal_path);
    std::string line;
    while (in && std::getline(in, line)) {
      if (line.empty()) continue;
      try {
        EvalRecord r = record_from_json(line);
        done.insert(r.problem_id + "\x1f" + r.attempt_id);
        results.push_back(std::move(r));
      } catch (const std::exception&) {
        // A line torn by a mid-write kill was never completed; redo it.
      }
    }
  }

  std::vector<Attempt> work;
  for (auto& a : attempts) {
    if (!done.count(a.problem_id + "\x1f" + a.attempt_id)) {
      work.push_back(std::move(a));
    }
  }

  std::mutex sink_mu;
  std::ofstream journal;
  if (!options.journal_path.empty()) {
    journal.open(options.journal_path, std::ios::app);
    if (!journal) {
      throw std::runtime_error("cannot open journal '" + options.journal_path +
                               "'");
    }
  }

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= work.size()) return;
      const Attempt& a = work[i];
      EvalRecord record;
      auto it = by_id.find(a.problem_id);
      if (it == by_id.end()) {
        record = make_record(a.problem_id, a.attempt_id, false, 0.0,
                             "unknown problem id", false, a.corpus_label);
      } else {
        try {
          const LeanArtifact artifact =
              assemble_candidate(*it->second, a.proof_text);
          record = verify(artifact, toolchain, options.timeout_s, options.mode,
                          a.problem_id, a.attempt_id);
          record.corpus_label = a.corpus_label;
        } catch (const ExtractionError& e) {
          record = make_record(a.problem_id, a.attempt_id, false, 0.0,
                               e.what(), false, a.corpus_label);
        }
      }
      std::lock_guard<std::mutex> lock(sink_mu);
      if (journal.is_open()) {
        journal << record_to_json(record) << "\n";
        journal.flush();
      }
      results.push_back(std::move(record));
    }
  };

  std::vector<std::thread> threads;
  const std::size_t nthreads = std::min(options.workers, std::max<std::size_t>(
                                                             work.size(), 1));
  threads.reserve(nthreads);
  for (std::size_t i = 0; i < nthreads; ++i) threads.emplace_back(worker);
  for (auto& t : threads) t.join();

  std::sort(results.begin(), results.end(),
            [](const EvalRecord& a, const EvalRecord& b) {
              if (a.problem_id != b.problem_id) {
                return a.problem_id < b.problem_id;
              }
              return a.attempt_id < b.attempt_id;
            });
  return results;
}

namespace {

struct ProblemCounts {
  std::size_t n = 0;
  std::size_t c = 0;
  std::string corpus = "all";
  std::vector<bool> outcomes;  // in (problem_id, attempt_id) sorted order
};

std::map<std::string, ProblemCounts> tally(
    const std::vector<EvalRecord>& records) {
  std::vector<const EvalRecord*> sorted;
  sorted.reserve(records.size());
  for (const auto& r : records) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(),
            [](const EvalRecord* a, const EvalRecord* b) {
              if (a->problem_id != b->problem_id) {
                return a->problem_id < b->problem_id;
              }
              return a->attempt_id < b->attempt_id;
            });
  std::map<std::string, ProblemCounts> by_problem;
  for (const EvalRecord* r : sorted) {
    ProblemCounts& pc = by_problem[r->problem_id];
    pc.n += 1;
    pc.c += r->compiled ? 1 : 0;
    pc.corpus = r->corpus_label;
    pc.outcomes.push_back(r->compiled);
  }
  return by_problem;
}

double unbiased_estimate(std::size_t n, std::size_t c, std::size_t k) {
  if (c == 0) return 0.0;
  double miss = 1.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (n - c < i + 1) return 1.0;  // fewer failures than draws
    miss *= static_cast<double>(n - c - i) / static_cast<double>(n - i);
  }
  return 1.0 - miss;
}

}  // namespace

PassAtN pass_at_k(const std::vector<EvalRecord>& records, std::size_t k) {
  if (k < 1) throw std::invalid_argument("pass@k needs k >= 1");
  PassAtN out;
  out.k = k;
  const auto by_problem = tally(records);
  double sum = 0.0;
  for (const auto& [id, pc] : by_problem) {
    if (pc.n < k) {
      throw std::invalid_argument("problem '" + id + "' has only " +
                                  std::to_string(pc.n) + " attempts for k=" +
                                  std::to_string(k));
    }
    const double est = unbiased_estimate(pc.n, pc.c, k);
    out.per_problem[id] = est;
    out.counts[id] = {pc.n, pc.c};
    sum += est;
  }
  out.mean = by_problem.empty() ? 0.0 : sum / static_cast<double>(by_problem.size());
  return out;
}

double dispersion(const std::vector<EvalRecord>& records, std::size_t k,
                  std::size_t resamples, Rng& rng) {
  if (resamples < 2) throw std::invalid_argument("resamples must be >= 2");
  const auto by_problem = tally(records);
  for (const auto& [id, pc] : by_problem) {
    if (pc.n < k) {
      throw std::invalid_argument("problem '" + id + "' has only " +
                                  std::to_string(pc.n) + " attempts for k=" +
                                  std::to_string(k));
    }
  }
  if (by_problem.empty()) return 0.0;

  double sum = 0.0, sumsq = 0.0;
  std::vector<std::size_t> idx;
  for (std::size_t r = 0; r < resamples; ++r) {
    double solved = 0.0;
    for (const auto& [id, pc] : by_problem) {
      (void)id;
      idx.resize(pc.n);
      for (std::size_t i = 0; i < pc.n; ++i) idx[i] = i;
      bool any = false;
      for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + rng.index(pc.n - i);
        std::swap(idx[i], idx[j]);
        if (pc.outcomes[idx[i]]) {
          any = true;
          break;
        }
      }
      if (any) solved += 1.0;
    }
    const double v = solved / static_cast<double>(by_problem.size());
    sum += v;
    sumsq += v * v;
  }
  const double r = static_cast<double>(resamples);
  const double variance = std::max(0.0, (sumsq - sum * sum / r) / (r - 1.0));
  return std::sqrt(variance);
}

namespace {

std::string subscript_number(const std::string& digits) {
  static const char* kSub[10] = {"₀", "₁", "₂", "₃",
                                 "₄", "₅", "₆", "₇",
                                 "₈", "₉"};
  std::string out;
  for (char c : digits) {
    if (c >= '0' && c <= '9') {
      out += kSub[c - '0'];
    } else {
      out += c;
    }
  }
  return out;
}

std::string fixed1(double v) {
  char buf[32];
  snprintf(buf, sizeof(buf), "%.1f", v);
  return buf;
}

std::size_t display_width(const std::string& utf8) {
  std::size_t w = 0;
  for (unsigned char c : utf8) {
    if ((c & 0xC0) != 0x80) ++w;  // count code points, not bytes
  }
  return w;
}

}  // namespace

std::string render_report_text(const std::vector<ReportCell>& cells) {
  std::vector<std::string> corpora;
  std::set<std::size_t> budgets;
  for (const auto& c : cells) {
    if (std::find(corpora.begin(), corpora.end(), c.corpus) == corpora.end()) {
      corpora.push_back(c.corpus);
    }
    budgets.insert(c.k);
  }
  if (cells.empty()) return "";

  const auto cell_text = [&](const std::string& corpus,
                             std::size_t k) -> std::string {
    for (const auto& c : cells) {
      if (c.corpus == corpus && c.k == k) {
        return fixed1(c.mean * 100.0) +
               subscript_number(fixed1(c.stddev * 100.0));
      }
    }
    return "-";
  };

  constexpr std::size_t kCol = 14;
  std::ostringstream out;
  out << "corpus";
  out << std::string(kCol > 6 ? kCol - 6 : 1, ' ');
  for (std::size_t k : budgets) {
    const std::string head = "pass@" + std::to_string(k);
    out << head << std::string(kCol > head.size() ? kCol - head.size() : 1, ' ');
  }
  out << "\n";
  for (const auto& corpus : corpora) {
    out << corpus
        << std::string(kCol > display_width(corpus) ? kCol - display_width(corpus) : 1,
                       ' ');
    for (std::size_t k : budgets) {
      const std::string text = cell_text(corpus, k);
      const std::size_t w = display_width(text);
      out << text << std::string(kCol > w ? kCol - w : 1, ' ');
    }
    out << "\n";
  }
  return out.str();
}

std::string render_report_json(const std::vector<ReportCell>& cells,
                               const std::string& mathlib_pin,
                               std::size_t resamples) {
  Json meta;
  meta["estimator"] = "unbiased-subset";
  meta["dispersion"] = "subset-bootstrap";
  meta["resamples"] = resamples;
  meta["mathlib_pin"] = mathlib_pin;
  Json arr = Json::array();
  for (const auto& c : cells) {
    Json jc;
    jc["corpus"] = c.corpus;
    jc["k"] = c.k;
    jc["mean"] = c.mean;
    jc["std"] = c.stddev;
    jc["problems"] = c.problems;
    arr.push_back(std::move(jc));
  }
  Json j;
  j["metadata"] = std::move(meta);
  j["cells"] = std::move(arr);
  return j.dump(2);
}

}  // namespace ineqforge
