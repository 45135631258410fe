#include <filesystem>
#include <numeric>
#include <set>
#include <thread>

#include "httplib.h"

#include "doctest.h"
#include "helpers.hpp"
#include "ineqforge/corpus.hpp"
#include "ineqforge/eval.hpp"

using namespace ineqforge;

namespace {

/// Stand-in prover toolchain: rejects files containing FAILME, emits the
/// placeholder diagnostic for files containing sorry, and logs every
/// invocation so resumability can be observed.
Toolchain write_fake_toolchain(const testutil::TempDir& tmp) {
  const std::string script = tmp.path("fakelean.sh");
  testutil::write_file(script,
                       "#!/bin/sh\n"
                       "f=\"$1\"\n"
                       "echo run >> \"" + tmp.path("invocations.log") + "\"\n"
                       "if grep -q FAILME \"$f\"; then\n"
                       "  echo \"error: FAILME marker\"\n"
                       "  exit 1\n"
                       "fi\n"
                       "if grep -q sorry \"$f\"; then\n"
                       "  echo \"warning: declaration uses 'sorry'\"\n"
                       "fi\n"
                       "exit 0\n");
  std::filesystem::permissions(script, std::filesystem::perms::owner_all);
  return Toolchain{script, "fake-toolchain"};
}

std::size_t invocations(const testutil::TempDir& tmp) {
  std::ifstream in(tmp.path("invocations.log"));
  return static_cast<std::size_t>(
      std::count(std::istreambuf_iterator<char>(in),
                 std::istreambuf_iterator<char>(), '\n'));
}

std::vector<EvalRecord> synthetic_records(
    const std::vector<std::pair<std::size_t, std::size_t>>& counts) {
  std::vector<EvalRecord> records;
  for (std::size_t p = 0; p < counts.size(); ++p) {
    const auto [n, c] = counts[p];
    for (std::size_t i = 0; i < n; ++i) {
      records.push_back(make_record("p" + std::to_string(p),
                                    "a" + std::to_string(i), i < c, 0.1, "x",
                                    false));
    }
  }
  return records;
}

/// Independent oracle: enumerate every k-subset of n attempts and count the
/// ones containing at least one success.
double brute_force_pass(std::size_t n, std::size_t c, std::size_t k) {
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  std::size_t total = 0, hit = 0;
  for (;;) {
    ++total;
    bool any = false;
    for (std::size_t i : idx) {
      if (i < c) any = true;  // attempts 0..c-1 are the successes
    }
    if (any) ++hit;
    std::size_t pos = k;
    while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
    if (pos == 0) break;
    ++idx[pos - 1];
    for (std::size_t j = pos; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return static_cast<double>(hit) / static_cast<double>(total);
}

}  // namespace

TEST_CASE("pass@k equals brute-force subset enumeration for all n <= 8") {
  for (std::size_t n = 1; n <= 8; ++n) {
    for (std::size_t c = 0; c <= n; ++c) {
      for (std::size_t k = 1; k <= n; ++k) {
        const auto records = synthetic_records({{n, c}});
        const PassAtN pass = pass_at_k(records, k);
        CHECK(pass.per_problem.at("p0") ==
              doctest::Approx(brute_force_pass(n, c, k)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("pass@k worked examples") {
  CHECK(pass_at_k(synthetic_records({{4, 0}}), 2).mean == 0.0);
  CHECK(pass_at_k(synthetic_records({{2, 1}}), 1).mean == doctest::Approx(0.5));
  // 5 of the C(4,2)=6 subsets contain a success (frozen from enumeration).
  CHECK(brute_force_pass(4, 2, 2) == doctest::Approx(5.0 / 6.0));
  CHECK(pass_at_k(synthetic_records({{4, 2}}), 2).mean ==
        doctest::Approx(5.0 / 6.0));
  // When n == k the estimate degenerates to the indicator c >= 1.
  CHECK(pass_at_k(synthetic_records({{4, 1}}), 4).mean == 1.0);
  CHECK(pass_at_k(synthetic_records({{4, 0}}), 4).mean == 0.0);
}

TEST_CASE("pass@k is monotone in k and in c") {
  for (std::size_t n : {4, 6, 8}) {
    for (std::size_t c = 0; c <= n; ++c) {
      double prev = 0.0;
      for (std::size_t k = 1; k <= n; ++k) {
        const double est = pass_at_k(synthetic_records({{n, c}}), k).mean;
        CHECK(est >= prev - 1e-12);
        prev = est;
      }
    }
    for (std::size_t k = 1; k <= n; ++k) {
      double prev = 0.0;
      for (std::size_t c = 0; c <= n; ++c) {
        const double est = pass_at_k(synthetic_records({{n, c}}), k).mean;
        CHECK(est >= prev - 1e-12);
        prev = est;
      }
    }
  }
}

TEST_CASE("pass@k names the underfilled problem") {
  const auto records = synthetic_records({{2, 1}});
  CHECK_THROWS_WITH_AS(pass_at_k(records, 3), doctest::Contains("p0"),
                       std::invalid_argument);
}

TEST_CASE("dispersion degenerate cases have zero spread") {
  Rng rng(1);
  CHECK(dispersion(synthetic_records({{4, 4}, {3, 3}}), 2, 50, rng) == 0.0);
  CHECK(dispersion(synthetic_records({{4, 0}, {3, 0}}), 2, 50, rng) == 0.0);
  CHECK_THROWS_AS(dispersion(synthetic_records({{4, 2}}), 2, 1, rng),
                  std::invalid_argument);
}

TEST_CASE("dispersion at 100 resamples sits within 20% of a 100k-resample "
          "reference") {
  const auto records = synthetic_records({{5, 0}, {5, 1}, {5, 2}, {5, 3},
                                          {5, 5}, {8, 4}, {8, 1}, {6, 2},
                                          {6, 6}, {7, 3}});
  Rng small_rng(42);
  const double small = dispersion(records, 2, 100, small_rng);
  Rng big_rng(43);
  const double reference = dispersion(records, 2, 100000, big_rng);
  REQUIRE(reference > 0.0);
  CHECK(std::fabs(small - reference) <= 0.2 * reference);
}

TEST_CASE("record invariant: compiled wipes timeout and excerpt") {
  const EvalRecord r = make_record("p", "a", true, 1.0, "leftover", true);
  CHECK(r.compiled);
  CHECK_FALSE(r.timeout);
  CHECK(r.error_excerpt.empty());
  const EvalRecord round = record_from_json(record_to_json(r));
  CHECK(round.problem_id == "p");
  CHECK(round.compiled);
}

TEST_CASE("verify against the stand-in toolchain") {
  testutil::TempDir tmp;
  const Toolchain tc = write_fake_toolchain(tmp);
  const Corpus fixtures =
      load_corpus(testutil::data_path("fixtures/appendix_f.jsonl"));
  const LeanArtifact statement = render_statement(fixtures.problems[0]);

  SUBCASE("statement with placeholder: mode decides") {
    const EvalRecord proof_mode = verify(statement, tc, 30.0, VerifyMode::Proof);
    CHECK_FALSE(proof_mode.compiled);
    CHECK(proof_mode.error_excerpt.find("sorry") != std::string::npos);
    const EvalRecord stmt_mode =
        verify(statement, tc, 30.0, VerifyMode::StatementOnly);
    CHECK(stmt_mode.compiled);
  }
  SUBCASE("broken body fails with a nonempty excerpt") {
    LeanArtifact broken = statement;
    broken.proof_body = "FAILME this is not a proof";
    const EvalRecord r = verify(broken, tc, 30.0, VerifyMode::Proof);
    CHECK_FALSE(r.compiled);
    CHECK_FALSE(r.error_excerpt.empty());
    CHECK_FALSE(r.timeout);
  }
  SUBCASE("verify is hermetic: same artifact, same outcome") {
    LeanArtifact good = statement;
    good.proof_body = "nlinarith";
    const EvalRecord a = verify(good, tc, 30.0, VerifyMode::Proof);
    const EvalRecord b = verify(good, tc, 30.0, VerifyMode::Proof);
    CHECK(a.compiled);
    CHECK(a.compiled == b.compiled);
  }
  SUBCASE("missing toolchain is a configuration error") {
    CHECK_THROWS_AS(verify(statement, Toolchain{}, 30.0), ConfigError);
  }
}

TEST_CASE("verify timeout produces a timeout record") {
  testutil::TempDir tmp;
  const std::string script = tmp.path("slow.sh");
  testutil::write_file(script, "#!/bin/sh\nsleep 5\nexit 0\n");
  std::filesystem::permissions(script, std::filesystem::perms::owner_all);
  const Corpus fixtures =
      load_corpus(testutil::data_path("fixtures/appendix_f.jsonl"));
  const LeanArtifact art = render_statement(fixtures.problems[0]);
  const EvalRecord r = verify(art, Toolchain{script, "slow"}, 0.4);
  CHECK(r.timeout);
  CHECK_FALSE(r.compiled);
  CHECK(r.wall_time_s < 3.0);
}

TEST_CASE("run_batch on the bundled 20-attempt fixture") {
  const Corpus problems =
      load_corpus(testutil::data_path("fixtures/appendix_f.jsonl"));
  const std::vector<Attempt> attempts =
      load_attempts(testutil::data_path("fixtures/attempts20.jsonl"));
  REQUIRE(attempts.size() == 20);

  const auto run = [&](std::size_t workers, const std::string& journal) {
    testutil::TempDir tmp;
    const Toolchain tc = write_fake_toolchain(tmp);
    BatchOptions options;
    options.workers = workers;
    options.journal_path = journal;
    options.timeout_s = 30.0;
    return run_batch(problems.problems, attempts, std::nullopt, tc, options);
  };

  SUBCASE("cardinality and ordering") {
    const auto records = run(2, "");
    REQUIRE(records.size() == 20);
    CHECK(std::is_sorted(records.begin(), records.end(),
                         [](const EvalRecord& a, const EvalRecord& b) {
                           return std::tie(a.problem_id, a.attempt_id) <
                                  std::tie(b.problem_id, b.attempt_id);
                         }));
    // Per problem: a1 (plain tactic) and a2 (fenced) compile; a0 hits the
    // FAILME marker, a3 has no code fence, a4 uses the placeholder.
    const PassAtN pass = pass_at_k(records, 1);
    for (const auto& [id, est] : pass.per_problem) {
      CHECK_MESSAGE(est == doctest::Approx(0.4), id);
    }
  }
  SUBCASE("worker count does not change the record multiset") {
    const auto normalize = [](EvalRecord r) {
      r.wall_time_s = 0.0;  // timing is the only run-dependent field
      return record_to_json(r);
    };
    const auto one = run(1, "");
    const auto eight = run(8, "");
    REQUIRE(one.size() == eight.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
      CHECK(normalize(one[i]) == normalize(eight[i]));
    }
  }
}

TEST_CASE("run_batch resumes from the journal without re-verifying") {
  const Corpus problems =
      load_corpus(testutil::data_path("fixtures/appendix_f.jsonl"));
  const std::vector<Attempt> attempts =
      load_attempts(testutil::data_path("fixtures/attempts20.jsonl"));
  testutil::TempDir tmp;
  const Toolchain tc = write_fake_toolchain(tmp);
  BatchOptions options;
  options.workers = 3;
  options.journal_path = tmp.path("journal.jsonl");
  options.timeout_s = 30.0;

  const auto first = run_batch(problems.problems, attempts, std::nullopt, tc,
                               options);
  REQUIRE(first.size() == 20);
  const std::size_t compile_calls = invocations(tmp);
  // 4 of the 20 attempts fail extraction before ever reaching the compiler.
  CHECK(compile_calls == 16);

  // Simulate a mid-batch kill by truncating the journal, then resume.
  std::vector<std::string> lines;
  {
    std::ifstream in(tmp.path("journal.jsonl"));
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
  }
  REQUIRE(lines.size() == 20);
  {
    std::ofstream out(tmp.path("journal.jsonl"));
    for (std::size_t i = 0; i < 12; ++i) out << lines[i] << "\n";
  }
  const auto resumed = run_batch(problems.problems, attempts, std::nullopt, tc,
                                 options);
  CHECK(resumed.size() == 20);
  CHECK(invocations(tmp) - compile_calls <= 8);

  // A fully journaled batch re-verifies nothing.
  const std::size_t before = invocations(tmp);
  const auto third = run_batch(problems.problems, attempts, std::nullopt, tc,
                               options);
  CHECK(third.size() == 20);
  CHECK(invocations(tmp) == before);

  // A line torn mid-write is redone rather than crashing the resume.
  {
    std::ofstream out(tmp.path("journal.jsonl"), std::ios::app);
    out << "{\"problem_id\":\"cauch";  // no newline, no closing brace
  }
  const auto healed = run_batch(problems.problems, attempts, std::nullopt, tc,
                                options);
  CHECK(healed.size() == 20);
}

TEST_CASE("command adapter feeds prompts and collects fenced proofs") {
  const Corpus problems =
      load_corpus(testutil::data_path("fixtures/appendix_f.jsonl"));
  testutil::TempDir tmp;
  const Toolchain tc = write_fake_toolchain(tmp);

  SUBCASE("well-behaved adapter") {
    const std::string prover = tmp.path("prover.sh");
    testutil::write_file(
        prover,
        "#!/bin/sh\n"
        "cat > /dev/null\n"
        "printf '```lean4\\ntheorem quick : True := trivial\\n```\\n'\n");
    std::filesystem::permissions(prover, std::filesystem::perms::owner_all);
    ProverAdapter adapter;
    adapter.kind = ProverAdapter::Kind::Command;
    adapter.endpoint_or_command = prover;
    adapter.attempts_per_problem = 2;
    BatchOptions options;
    options.workers = 2;
    options.timeout_s = 30.0;
    const auto records = run_batch(problems.problems, {}, adapter, tc, options);
    CHECK(records.size() == 2 * problems.problems.size());
    for (const auto& r : records) CHECK(r.compiled);
  }
  SUBCASE("adapter output without a code fence is a recorded failure") {
    const std::string prover = tmp.path("chatty.sh");
    testutil::write_file(prover,
                         "#!/bin/sh\n"
                         "cat > /dev/null\n"
                         "echo 'I would use AM-GM here.'\n");
    std::filesystem::permissions(prover, std::filesystem::perms::owner_all);
    ProverAdapter adapter;
    adapter.kind = ProverAdapter::Kind::Command;
    adapter.endpoint_or_command = prover;
    BatchOptions options;
    options.timeout_s = 30.0;
    const auto records = run_batch(problems.problems, {}, adapter, tc, options);
    REQUIRE(records.size() == problems.problems.size());
    for (const auto& r : records) {
      CHECK_FALSE(r.compiled);
      CHECK_FALSE(r.error_excerpt.empty());
    }
  }
}

TEST_CASE("http adapter speaks the chat completions protocol") {
  const Corpus problems =
      load_corpus(testutil::data_path("fixtures/appendix_f.jsonl"));
  std::vector<Problem> one = {problems.problems.front()};

  httplib::Server server;
  std::string seen_body;
  server.Post("/v1/chat/completions",
              [&](const httplib::Request& req, httplib::Response& res) {
                seen_body = req.body;
                res.set_content(
                    R"({"choices":[{"message":{"content":)"
                    R"("```lean4\ntheorem net : True := trivial\n```"}}]})",
                    "application/json");
              });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread server_thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  testutil::TempDir tmp;
  const Toolchain tc = write_fake_toolchain(tmp);
  ProverAdapter adapter;
  adapter.kind = ProverAdapter::Kind::Http;
  adapter.endpoint_or_command =
      "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
  adapter.model = "net-prover";
  BatchOptions options;
  options.timeout_s = 30.0;
  const auto records = run_batch(one, {}, adapter, tc, options);
  server.stop();
  server_thread.join();

  REQUIRE(records.size() == 1);
  CHECK(records[0].compiled);
  CHECK(seen_body.find("\"model\":\"net-prover\"") != std::string::npos);
  CHECK(seen_body.find("\"temperature\":1.0") != std::string::npos);
  CHECK(seen_body.find("\"max_tokens\":16384") != std::string::npos);
  CHECK(seen_body.find("Complete the following Lean 4 code") !=
        std::string::npos);
}

TEST_CASE("report rendering") {
  SUBCASE("subscripted deviation cell") {
    const std::vector<ReportCell> cells = {{"Seed", 32, 0.52, 0.02, 25}};
    const std::string text = render_report_text(cells);
    CHECK(text.find("52.0₂.₀") != std::string::npos);
    CHECK(text.find("pass@32") != std::string::npos);
  }
  SUBCASE("empty record set renders an empty table") {
    CHECK(render_report_text({}).empty());
  }
  SUBCASE("three corpora by two budgets, row-major and stable") {
    std::vector<ReportCell> cells;
    for (const char* corpus : {"Seed", "Type I", "Type II"}) {
      for (std::size_t k : {1, 32}) {
        cells.push_back({corpus, k, 0.5, 0.01, 25});
      }
    }
    const std::string text = render_report_text(cells);
    const std::size_t seed_pos = text.find("Seed");
    const std::size_t t1_pos = text.find("Type I");
    const std::size_t t2_pos = text.find("Type II");
    CHECK(seed_pos < t1_pos);
    CHECK(t1_pos < t2_pos);
    const std::string json =
        render_report_json(cells, "fake-pin", 100);
    CHECK(json.find("\"mathlib_pin\": \"fake-pin\"") != std::string::npos);
    CHECK(json.find("subset-bootstrap") != std::string::npos);
  }
}

TEST_CASE("toolchain resolution: flag beats environment, pin is recorded") {
  const char* saved = getenv("INEQFORGE_LEAN_CMD");
  const std::string saved_value = saved ? saved : "";
  setenv("INEQFORGE_LEAN_CMD", "/usr/bin/env-lean", 1);
  const auto from_env = resolve_toolchain("", "");
  REQUIRE(from_env.has_value());
  CHECK(from_env->command == "/usr/bin/env-lean");
  const auto from_flag = resolve_toolchain("/opt/flag-lean", "mathlib-abc123");
  REQUIRE(from_flag.has_value());
  CHECK(from_flag->command == "/opt/flag-lean");
  CHECK(from_flag->mathlib_pin == "mathlib-abc123");
  unsetenv("INEQFORGE_LEAN_CMD");
  CHECK_FALSE(resolve_toolchain("", "").has_value());
  if (saved) setenv("INEQFORGE_LEAN_CMD", saved_value.c_str(), 1);
}
