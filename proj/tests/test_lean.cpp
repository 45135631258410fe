#include "doctest.h"
#include "helpers.hpp"
#include "ineqforge/corpus.hpp"
#include "ineqforge/lean.hpp"

using namespace ineqforge;
using testutil::C;
using testutil::V;

namespace {

Corpus appendix_fixtures() {
  return load_corpus(testutil::data_path("fixtures/appendix_f.jsonl"));
}

const Problem& fixture(const Corpus& c, const std::string& id) {
  for (const auto& p : c.problems) {
    if (p.id == id) return p;
  }
  REQUIRE_MESSAGE(false, ("missing fixture " + id).c_str());
  throw std::logic_error("unreachable");
}

}  // namespace

TEST_CASE("expression rendering layout") {
  CHECK(render_expr_lean(add({V("x"), V("y")})) == "x + y");
  CHECK(render_expr_lean(mul({add({V("x"), V("y")}),
                              add({div(C(1), V("x")), div(C(1), V("y"))})})) ==
        "(x + y) * (1 / x + 1 / y)");
  CHECK(render_expr_lean(C(3, 2)) == "(3:ℝ) / 2");
  CHECK(render_expr_lean(mul({C(4, 7), pow_nat(V("x"), 3), V("y")})) ==
        "(4:ℝ) / 7 * x ^ 3 * y");
  CHECK(render_expr_lean(mul({V("x"), C(4, 7)})) == "x * ((4:ℝ) / 7)");
  CHECK(render_expr_lean(pow_real(V("x"), Rational(2, 5))) ==
        "x ^ ((2:ℝ) / 5)");
  CHECK(render_expr_lean(sqrt_e(mul({V("x"), V("y")}))) ==
        "Real.sqrt (x * y)");
  CHECK(render_expr_lean(sub(exp_e(V("x")), C(1))) == "Real.exp x - 1");
  CHECK(render_expr_lean(log_e(add({C(1), V("x")}))) == "Real.log (1 + x)");
  CHECK(render_expr_lean(min_e(V("a"), exp_e(V("b")))) == "min a (Real.exp b)");
  CHECK(render_expr_lean(abs_e(sub(V("x"), V("y")))) == "|x - y|");
  CHECK(render_expr_lean(mul({C(2), div(V("x"), V("y"))})) == "2 * (x / y)");
  CHECK(render_expr_lean(div(V("x"), add({V("x"), V("y")}))) ==
        "x / (x + y)");
  CHECK(render_expr_lean(add({V("x"), sub(V("y"), V("z"))})) ==
        "x + (y - z)");
  CHECK(render_expr_lean(pow_nat(add({V("x"), V("y")}), 2)) == "(x + y) ^ 2");
  CHECK(render_expr_lean(neg_e(V("x"))) == "-x");
  CHECK(render_expr_lean(mul({C(3), neg_e(V("x"))})) == "3 * (-x)");
}

TEST_CASE("golden parity: appendix fixtures render byte-for-byte") {
  const Corpus fixtures = appendix_fixtures();
  REQUIRE(fixtures.problems.size() == 5);
  for (const auto& p : fixtures.problems) {
    const std::string golden =
        testutil::read_file(testutil::data_path("fixtures/golden/" + p.id + ".golden"));
    CHECK_MESSAGE(render_statement(p).statement_line() + "\n" == golden, p.id);
  }
}

TEST_CASE("constant-lhs statements render flipped onto <=") {
  const Corpus fixtures = appendix_fixtures();
  const LeanArtifact art = render_statement(fixture(fixtures, "amgm_p36"));
  CHECK(art.goal == "x * y * z * a * b * c ≤ 1");
}

TEST_CASE("style flags: conjunction positivity and ascii hypothesis names") {
  const Corpus fixtures = appendix_fixtures();
  const Problem& p36 = fixture(fixtures, "amgm_p36");
  RenderStyle style;
  style.conjunction_positivity = true;
  style.ascii_hypothesis_names = true;
  const LeanArtifact art = render_statement(p36, style);
  CHECK(art.binders ==
        "(x y z a b c : ℝ) (hpos : x > 0 ∧ y > 0 ∧ z > 0 ∧ a > 0 ∧ b > 0 ∧ "
        "c > 0) (h1 : x + y + z = 3) (h2 : a + b + c = 3)");
}

TEST_CASE("reflexive single-variable statement renders minimally") {
  const Problem p = testutil::make_problem("refl", {{"x", 0}}, {}, V("x"),
                                           V("x"), false);
  const LeanArtifact art = render_statement(p);
  CHECK(art.statement_line() ==
        "theorem refl (x : ℝ) (hx : x > 0) : x ≥ x := by");
  CHECK(art.file_text().find("\n  sorry\n") != std::string::npos);
}

TEST_CASE("render idempotence through serialization") {
  const Corpus seeds = testutil::load_seeds();
  for (const auto& p : seeds.problems) {
    const Problem round = parse_problem(serialize_problem(p));
    CHECK(render_statement(round).statement_line() ==
          render_statement(p).statement_line());
  }
}

TEST_CASE("prompt templates instantiate byte-exactly") {
  PromptTask task;
  task.formal_statement = "theorem t (x : ℝ) : x ≥ x := by";

  SUBCASE("plain completion prompt") {
    task.template_id = TemplateId::Plain;
    const std::string prompt = render_prompt(task);
    CHECK(prompt.rfind("Complete the following Lean 4 code with explanatory "
                       "comments preceding each line of code:\n\n```lean4\n",
                       0) == 0);
    CHECK(prompt.find("import Mathlib\nimport Aesop\n") != std::string::npos);
    CHECK(prompt.find("set_option maxHeartbeats 0") != std::string::npos);
    CHECK(prompt.find("open BigOperators Real Nat Topology Rat") !=
          std::string::npos);
    // The code block is left open for the model to complete.
    CHECK(prompt.substr(prompt.size() - task.formal_statement.size() - 1) ==
          task.formal_statement + "\n");
    CHECK_FALSE(template_uses_chat(TemplateId::Plain));
  }
  SUBCASE("chat-thinking wraps the answer block") {
    task.template_id = TemplateId::ChatThinking;
    const std::string prompt = render_prompt(task);
    CHECK(prompt.rfind("Give a proof for the following problem written in "
                       "lean 4:\n\n```lean4\n", 0) == 0);
    CHECK(prompt.find(task.formal_statement + "```.\n") != std::string::npos);
    CHECK(prompt.find("You should wrap your answer in the lean code block") !=
          std::string::npos);
    CHECK(prompt.find("```lean4\n<You answer>\n```\n") != std::string::npos);
    CHECK(template_uses_chat(TemplateId::ChatThinking));
  }
  SUBCASE("kimina-style sections") {
    task.template_id = TemplateId::KiminaStyle;
    task.informal_prefix = "/- prove it -/\n";
    const std::string prompt = render_prompt(task);
    CHECK(prompt.rfind("Think about and solve the following problem step by "
                       "step in Lean 4.\n# Informal statement:\n", 0) == 0);
    CHECK(prompt.find("# Formal statement:\n```lean4\n") != std::string::npos);
  }
  SUBCASE("icl requires a proof and cites trust") {
    task.template_id = TemplateId::Icl;
    CHECK_THROWS_AS(render_prompt(task), TemplateError);
    task.icl_proofs = {"theorem seed : 1 = 1 := by rfl"};
    const std::string prompt = render_prompt(task);
    CHECK(prompt.find("Following is the solution for a related problem "
                      "written in Lean 4. You can fully trust the provided "
                      "code and it has already passed the Lean 4 "
                      "compilation.\n") != std::string::npos);
    CHECK(prompt.find(task.icl_proofs[0]) != std::string::npos);
    CHECK(prompt.find("Please follow the provided code such that you don't "
                      "make more mistakes.") != std::string::npos);
  }
  SUBCASE("icl-gen requires exactly two proofs and includes both") {
    task.template_id = TemplateId::IclGen;
    task.icl_proofs = {"proof one"};
    CHECK_THROWS_AS(render_prompt(task), TemplateError);
    task.icl_proofs = {"proof one", "proof two"};
    const std::string prompt = render_prompt(task);
    CHECK(prompt.find("proof one\n\nproof two") != std::string::npos);
  }
}

TEST_CASE("assemble_candidate") {
  const Problem p = testutil::make_problem(
      "tiny", {{"x", 0}}, {}, add({V("x"), C(2)}), C(1), true);

  SUBCASE("bare tactic proof substitutes for the placeholder") {
    const LeanArtifact art = assemble_candidate(p, "by norm_num");
    CHECK(art.file_text().find(":= by\n  norm_num\n") != std::string::npos);
    CHECK(art.file_text().find("sorry") == std::string::npos);
  }
  SUBCASE("fenced model answer is extracted verbatim") {
    const std::string answer =
        "Here is my proof.\n```lean4\ntheorem tiny (x : ℝ) (hx : x > 0) : "
        "x + 2 ≥ 1 := by\n  nlinarith\n```\nHope that helps.";
    const LeanArtifact art = assemble_candidate(p, answer);
    CHECK(art.theorem_override.has_value());
    const std::string file = art.file_text();
    CHECK(file.rfind("import Mathlib\n", 0) == 0);
    CHECK(file.find("theorem tiny") != std::string::npos);
    CHECK(file.find("Hope that helps") == std::string::npos);
  }
  SUBCASE("fenced answer with its own imports is used as the whole file") {
    const std::string answer =
        "```lean4\nimport Mathlib\n\ntheorem tiny : True := trivial\n```";
    const LeanArtifact art = assemble_candidate(p, answer);
    const std::string file = art.file_text();
    CHECK(file.rfind("import Mathlib\n", 0) == 0);
    CHECK(file.find("import Mathlib\nimport Aesop") == std::string::npos);
  }
  SUBCASE("no code fence and no tactic proof is an extraction error") {
    CHECK_THROWS_AS(assemble_candidate(p, "The statement is obvious."),
                    ExtractionError);
    CHECK_THROWS_AS(assemble_candidate(p, ""), ExtractionError);
    CHECK_THROWS_AS(assemble_candidate(p, "```lean4\n```"), ExtractionError);
    CHECK_THROWS_AS(assemble_candidate(p, "```lean4\nunterminated"),
                    ExtractionError);
  }
}

TEST_CASE("unknown template name is a template error") {
  CHECK_THROWS_AS(template_from_name("mystery"), TemplateError);
  CHECK(template_from_name("icl-gen") == TemplateId::IclGen);
  CHECK(template_name(TemplateId::KiminaStyle) == "kimina-style");
}
