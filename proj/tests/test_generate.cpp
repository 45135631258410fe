#include <set>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "ineqforge/corpus.hpp"
#include "ineqforge/generate.hpp"
#include "ineqforge/oracle.hpp"

using namespace ineqforge;

namespace {

std::string corpus_bytes(const Corpus& c) {
  std::ostringstream out;
  if (c.meta_line) out << *c.meta_line << "\n";
  for (const auto& p : c.problems) out << serialize_problem(p) << "\n";
  return out.str();
}

GenConfig composition_only(std::uint64_t seed, std::size_t count) {
  GenConfig cfg;
  cfg.seed = seed;
  cfg.families = {RuleFamily::Composition};
  cfg.target_count = count;
  return cfg;
}

}  // namespace

TEST_CASE("expand_simp: two variants per seed, 75 -> 150") {
  const Corpus seeds = testutil::load_seeds();
  Rng rng(42);
  const std::vector<Problem> variants = expand_simp(seeds.problems, rng);
  REQUIRE(variants.size() == 150);
  for (std::size_t i = 0; i < seeds.problems.size(); ++i) {
    const Problem& t1 = variants[2 * i];
    const Problem& t2 = variants[2 * i + 1];
    REQUIRE(t1.provenance.size() == 1);
    REQUIRE(t2.provenance.size() == 1);
    CHECK(t1.provenance[0].rule == "typeI");
    CHECK(t2.provenance[0].rule == "typeII");
    CHECK(t1.provenance[0].parents[0] == seeds.problems[i].id);
    CHECK(t1.variables.size() == 2 * seeds.problems[i].variables.size());
  }
  // The variant numbering mirrors the seed numbering: n -> n+25 / n+50.
  CHECK(variants[0].id == "amgm_p26");
  CHECK(variants[1].id == "amgm_p51");
  CHECK(variants[2 * 25].id == "cauchy_p26");
}

TEST_CASE("expand_simp is deterministic") {
  const Corpus seeds = testutil::load_seeds();
  Rng rng1(7), rng2(7);
  const auto a = expand_simp(seeds.problems, rng1);
  const auto b = expand_simp(seeds.problems, rng2);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(serialize_problem(a[i]) == serialize_problem(b[i]));
  }
}

TEST_CASE("filter_eligible keeps 65 of the 75-record exclusion fixture") {
  const auto lines =
      load_lines(testutil::data_path("fixtures/eligibility75.jsonl"));
  REQUIRE(lines.size() == 75);
  const FilterResult result = filter_eligible(lines);
  CHECK(result.kept.size() == 65);
  REQUIRE(result.rejected.size() == 10);
  std::multiset<std::string> reasons;
  for (const auto& r : result.rejected) reasons.insert(r.reason);
  CHECK(reasons.count("integer-parameter") == 3);
  CHECK(reasons.count("n-variable") == 3);
  CHECK(reasons.count("basic-assumption") == 4);
}

TEST_CASE("filter_eligible on the bundled seeds keeps everything") {
  const auto lines = load_lines(testutil::data_path("seeds75.jsonl"));
  const FilterResult result = filter_eligible(lines);
  CHECK(result.kept.size() == 75);
  CHECK(result.rejected.empty());
}

TEST_CASE("filter_eligible on empty input") {
  const FilterResult result = filter_eligible({});
  CHECK(result.kept.empty());
  CHECK(result.rejected.empty());
}

TEST_CASE("generate_mix: composition-only preset yields distinct single-rule "
          "problems") {
  const Corpus seeds = testutil::load_seeds();
  const Corpus corpus = generate_mix(seeds.problems, composition_only(7, 100));
  REQUIRE(corpus.problems.size() == 100);
  std::set<std::string> statements;
  for (const auto& p : corpus.problems) {
    REQUIRE(p.provenance.size() == 1);
    const std::string& rule = p.provenance[0].rule;
    const bool combination =
        rule == "Direct Addition" || rule == "Weighted Sum" ||
        rule == "Maxima" || rule == "Minima" || rule == "Multiplication" ||
        rule == "Division" || rule == "Reciprocal";
    CHECK(combination);
    const Problem round = parse_problem(serialize_problem(p));
    statements.insert(serialize_problem(round));
  }
  CHECK(statements.size() == 100);
  CHECK(corpus.meta_line.has_value());
  CHECK(corpus.meta_line->find("\"seed\":7") != std::string::npos);
}

TEST_CASE("generate_mix is a pure function of (seeds, cfg)") {
  const Corpus seeds = testutil::load_seeds();
  const Corpus a = generate_mix(seeds.problems, composition_only(2024, 40));
  const Corpus b = generate_mix(seeds.problems, composition_only(2024, 40));
  CHECK(corpus_bytes(a) == corpus_bytes(b));
}

TEST_CASE("generate_mix: count=1 from one eligible condition-free pair") {
  const Corpus seeds = testutil::load_seeds();
  std::vector<Problem> pair = {seeds.problems[0], seeds.problems[1]};
  const Corpus corpus = generate_mix(pair, composition_only(5, 1));
  CHECK(corpus.problems.size() == 1);
  CHECK(corpus.problems[0].provenance.size() == 1);
}

TEST_CASE("generate_mix: depth 2 with all families produces a composition "
          "followed by a statement rule somewhere") {
  const Corpus seeds = testutil::load_seeds();
  GenConfig cfg;
  cfg.seed = 99;
  cfg.families = {RuleFamily::Composition, RuleFamily::VariableLevel,
                  RuleFamily::ProblemLevel, RuleFamily::TypeI,
                  RuleFamily::TypeII};
  cfg.target_count = 120;
  cfg.max_depth = 2;
  const Corpus corpus = generate_mix(seeds.problems, cfg);
  REQUIRE(corpus.problems.size() == 120);
  bool found = false;
  const std::set<std::string> stmt_rules = {"exp", "cube", "sqrt", "sq", "log"};
  const std::set<std::string> comp_rules = {
      "Direct Addition", "Weighted Sum", "Maxima", "Minima",
      "Multiplication", "Division", "Reciprocal"};
  for (const auto& p : corpus.problems) {
    if (p.provenance.size() == 2 && comp_rules.count(p.provenance[0].rule) &&
        stmt_rules.count(p.provenance[1].rule)) {
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("generate_mix: provenance closure within seeds plus corpus") {
  const Corpus seeds = testutil::load_seeds();
  GenConfig cfg;
  cfg.seed = 31;
  cfg.families = {RuleFamily::Composition, RuleFamily::ProblemLevel};
  cfg.target_count = 60;
  cfg.max_depth = 3;
  const Corpus corpus = generate_mix(seeds.problems, cfg);
  std::set<std::string> known;
  for (const auto& p : seeds.problems) known.insert(p.id);
  for (const auto& p : corpus.problems) known.insert(p.id);
  for (const auto& p : corpus.problems) {
    for (const auto& entry : p.provenance) {
      for (const auto& parent : entry.parents) {
        CHECK_MESSAGE(known.count(parent), parent);
      }
    }
  }
}

TEST_CASE("generate_mix: unreachable target exhausts with an error") {
  const Corpus seeds = testutil::load_seeds();
  std::vector<Problem> lonely = {seeds.problems[0]};
  CHECK_THROWS_AS(generate_mix(lonely, composition_only(1, 5)),
                  ExhaustionError);
}

TEST_CASE("generated problems stay numerically valid (sampled)") {
  const Corpus seeds = testutil::load_seeds();
  GenConfig cfg;
  cfg.seed = 12;
  cfg.families = {RuleFamily::Composition, RuleFamily::VariableLevel,
                  RuleFamily::ProblemLevel};
  cfg.target_count = 25;
  cfg.max_depth = 2;
  const Corpus corpus = generate_mix(seeds.problems, cfg);
  for (const auto& p : corpus.problems) {
    Rng rng(900 + std::hash<std::string>{}(p.id));
    const SampleReport r = check_problem(p, rng, 150);
    CHECK_MESSAGE(r.violation_count == 0, p.id);
    CHECK_MESSAGE(r.tag_violation_count == 0, p.id);
  }
}

TEST_CASE("split_by_category: 25 amgm train, 50 held out") {
  const Corpus seeds = testutil::load_seeds();
  const SeedSplit split = split_by_category(seeds.problems);
  CHECK(split.train_ids.size() == 25);
  CHECK(split.heldout_ids.size() == 50);
  std::set<std::string> train(split.train_ids.begin(), split.train_ids.end());
  for (const auto& id : split.heldout_ids) CHECK_FALSE(train.count(id));
}

TEST_CASE("make_ft_corpus: 25 train seeds expand to 100 stage-1 problems and "
          "the requested stage-2 count") {
  const Corpus seeds = testutil::load_seeds();
  const SeedSplit split = split_by_category(seeds.problems);
  GenConfig cfg;
  cfg.seed = 2025;
  cfg.target_count = 200;
  const FtCorpus ft = make_ft_corpus(seeds.problems, split, cfg);
  CHECK(ft.stage1.size() == 100);
  CHECK(ft.stage2.size() == 200);

  // Every composed problem's prompt task carries exactly two root proofs.
  std::size_t icl_gen = 0;
  for (const auto& task : ft.tasks) {
    if (task.template_id == TemplateId::IclGen) {
      CHECK(task.icl_proofs.size() == 2);
      ++icl_gen;
    } else {
      CHECK(task.template_id == TemplateId::Icl);
      CHECK(task.icl_proofs.size() == 1);
    }
  }
  CHECK(icl_gen == 200);
  CHECK(ft.tasks.size() == 300);
}

TEST_CASE("make_ft_corpus at full scale: 5000 composed problems") {
  const Corpus seeds = testutil::load_seeds();
  const SeedSplit split = split_by_category(seeds.problems);
  GenConfig cfg;
  cfg.seed = 81;
  cfg.target_count = 5000;
  const FtCorpus ft = make_ft_corpus(seeds.problems, split, cfg);
  CHECK(ft.stage1.size() == 100);
  CHECK(ft.stage2.size() == 5000);
  CHECK(ft.tasks.size() == 5100);
}

TEST_CASE("make_ft_corpus refuses an empty train split") {
  const Corpus seeds = testutil::load_seeds();
  SeedSplit empty;
  GenConfig cfg;
  cfg.seed = 1;
  CHECK_THROWS_AS(make_ft_corpus(seeds.problems, empty, cfg),
                  std::invalid_argument);
}
