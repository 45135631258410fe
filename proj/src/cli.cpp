// Copyright 2026 The ineqforge Authors
//
// Licensed under the Apache License, Version 2.0.
// SPDX-License-Identifier: Apache-2.0

#include "ineqforge/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "ineqforge/corpus.hpp"
#include "ineqforge/eval.hpp"
#include "ineqforge/generate.hpp"
#include "ineqforge/lean.hpp"
#include "ineqforge/oracle.hpp"
#include "ineqforge/rules.hpp"

namespace ineqforge::cli {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

std::set<RuleFamily> parse_families(const std::string& csv) {
  std::set<RuleFamily> families;
  if (csv == "all") {
    return {RuleFamily::Composition, RuleFamily::VariableLevel,
            RuleFamily::ProblemLevel, RuleFamily::TypeI, RuleFamily::TypeII};
  }
  std::istringstream in(csv);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (!tok.empty()) families.insert(family_from_name(tok));
  }
  if (families.empty()) {
    throw CLI::ValidationError("--families", "no rule family given");
  }
  return families;
}

std::vector<std::size_t> parse_budgets(const std::string& csv) {
  std::vector<std::size_t> ks;
  std::istringstream in(csv);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (!tok.empty()) ks.push_back(std::stoull(tok));
  }
  if (ks.empty()) throw CLI::ValidationError("--k", "no budget given");
  return ks;
}

void write_prompt_file(const fs::path& dir, const std::string& stem,
                       const PromptTask& task) {
  const std::string prompt = render_prompt(task);
  if (template_uses_chat(task.template_id)) {
    Json j;
    j["template"] = template_name(task.template_id);
    j["apply_chat_template"] = true;
    j["generation_prompt"] = true;
    j["prompt"] = prompt;
    std::ofstream out(dir / (stem + ".json"));
    out << j.dump(2) << "\n";
  } else {
    std::ofstream out(dir / (stem + ".txt"));
    out << prompt;
  }
}

int cmd_expand_simp(const std::string& in_path, const std::string& out_path,
                    std::uint64_t seed) {
  const Corpus seeds = load_corpus(in_path);
  Rng rng(seed);
  Corpus out;
  out.problems = expand_simp(seeds.problems, rng);
  save_corpus(out_path, out);
  std::cout << "expand-simp: " << seeds.problems.size() << " seeds -> "
            << out.problems.size() << " variants\n";
  return kExitOk;
}

int cmd_generate_mix(const std::string& in_path, const std::string& out_path,
                     const GenConfig& cfg) {
  const std::vector<std::string> lines = load_lines(in_path);
  const FilterResult filtered = filter_eligible(lines);
  for (const auto& r : filtered.rejected) {
    std::cerr << "ineligible seed " << r.id << ": " << r.reason << " ("
              << r.detail << ")\n";
  }
  const Corpus corpus = generate_mix(filtered.kept, cfg);
  save_corpus(out_path, corpus);
  std::cout << "generate-mix: " << corpus.problems.size() << " problems from "
            << filtered.kept.size() << " eligible seeds\n";
  return kExitOk;
}

int cmd_make_ft_corpus(const std::string& in_path, const std::string& out_dir,
                       const GenConfig& cfg, const std::string& train_category) {
  const Corpus seeds = load_corpus(in_path);
  const SeedSplit split =
      split_by_category(seeds.problems, category_from_name(train_category));
  const FtCorpus ft = make_ft_corpus(seeds.problems, split, cfg);

  fs::create_directories(out_dir);
  Corpus stage1{std::nullopt, ft.stage1};
  Corpus stage2{cfg.meta_line(), ft.stage2};
  save_corpus((fs::path(out_dir) / "stage1.jsonl").string(), stage1);
  save_corpus((fs::path(out_dir) / "stage2.jsonl").string(), stage2);

  std::ofstream tasks(fs::path(out_dir) / "tasks.jsonl");
  for (const auto& task : ft.tasks) {
    Json j;
    j["template"] = template_name(task.template_id);
    j["formal_statement"] = task.formal_statement;
    j["icl_proofs"] = task.icl_proofs;
    j["apply_chat_template"] = template_uses_chat(task.template_id);
    j["prompt"] = render_prompt(task);
    tasks << j.dump() << "\n";
  }
  std::cout << "make-ft-corpus: stage1=" << ft.stage1.size()
            << " stage2=" << ft.stage2.size() << " tasks=" << ft.tasks.size()
            << "\n";
  return kExitOk;
}

int cmd_emit(const std::string& in_path, const std::string& out_dir,
             const std::string& template_id, const RenderStyle& style) {
  const Corpus corpus = load_corpus(in_path);
  fs::create_directories(out_dir);
  std::ofstream manifest(fs::path(out_dir) / "manifest.jsonl");

  std::optional<TemplateId> tid;
  if (!template_id.empty()) tid = template_from_name(template_id);
  if (tid && (*tid == TemplateId::Icl || *tid == TemplateId::IclGen)) {
    // In-context prompts need the parent proofs; make-ft-corpus emits them.
    throw TemplateError("template '" + template_id +
                        "' needs in-context proofs; use make-ft-corpus");
  }
  if (tid) fs::create_directories(fs::path(out_dir) / "prompts");

  for (const auto& p : corpus.problems) {
    const LeanArtifact art = render_statement(p, style);
    const fs::path file = fs::path(out_dir) / (art.theorem_name + ".lean");
    {
      std::ofstream out(file);
      out << art.file_text();
    }
    Json j;
    j["id"] = p.id;
    j["path"] = file.string();
    j["theorem"] = art.theorem_name;
    manifest << j.dump() << "\n";

    if (tid) {
      PromptTask task;
      task.template_id = *tid;
      task.formal_statement = art.statement_line();
      write_prompt_file(fs::path(out_dir) / "prompts", art.theorem_name, task);
    }
  }
  std::cout << "emit: " << corpus.problems.size() << " statements -> "
            << out_dir << "\n";
  return kExitOk;
}

int cmd_check(const std::string& in_path, const std::string& report_path,
              std::uint64_t seed, std::size_t n, double tol) {
  const Corpus corpus = load_corpus(in_path);
  std::ofstream report;
  if (!report_path.empty()) report.open(report_path);

  std::size_t bad = 0;
  for (const auto& p : corpus.problems) {
    Rng rng(Rng(seed ^ std::hash<std::string>{}(p.id)).next_u64());
    const SampleReport r = check_problem(p, rng, n, tol);
    if (!r.ok()) ++bad;
    Json j;
    j["problem_id"] = r.problem_id;
    j["attempted"] = r.attempted;
    j["accepted"] = r.accepted;
    j["violations"] = r.violation_count;
    j["tag_violations"] = r.tag_violation_count;
    j["domain_faults"] = r.domain_faults;
    j["feasibility_exhausted"] = r.feasibility_exhausted;
    const std::string line = j.dump();
    if (report.is_open()) report << line << "\n";
    if (!r.ok()) std::cerr << line << "\n";
  }
  std::cout << "check: " << corpus.problems.size() - bad << "/"
            << corpus.problems.size() << " problems clean\n";
  return bad == 0 ? kExitOk : kExitDomainFailure;
}

struct EvalArgs {
  std::string problems_path;
  std::string attempts_path;
  std::string records_out;
  std::string report_json;
  std::string journal;
  std::string toolchain_cmd;
  std::string mathlib_pin;
  std::string budgets = "1";
  std::string adapter_cmd;
  std::string adapter_url;
  std::string template_id = "plain";
  std::string model = "prover";
  std::size_t workers = 1;
  double timeout_s = 300.0;
  double temperature = 1.0;
  int max_tokens = 16384;
  bool statement_mode = false;
  int attempts_per_problem = 1;
  std::size_t resamples = 100;
  std::uint64_t rng_seed = 0;
};

int report_from_records(const std::vector<EvalRecord>& records,
                        const EvalArgs& args, const std::string& pin) {
  std::map<std::string, std::vector<EvalRecord>> by_corpus;
  for (const auto& r : records) by_corpus[r.corpus_label].push_back(r);

  std::vector<ReportCell> cells;
  for (const std::size_t k : parse_budgets(args.budgets)) {
    for (const auto& [corpus, recs] : by_corpus) {
      const PassAtN pass = pass_at_k(recs, k);
      Rng rng(args.rng_seed);
      ReportCell cell;
      cell.corpus = corpus;
      cell.k = k;
      cell.mean = pass.mean;
      cell.stddev = dispersion(recs, k, args.resamples, rng);
      cell.problems = pass.per_problem.size();
      cells.push_back(std::move(cell));
    }
  }
  std::cout << render_report_text(cells);
  if (!args.report_json.empty()) {
    std::ofstream out(args.report_json);
    out << render_report_json(cells, pin, args.resamples) << "\n";
  }
  return kExitOk;
}

int cmd_eval(const EvalArgs& args) {
  const auto toolchain =
      resolve_toolchain(args.toolchain_cmd, args.mathlib_pin);
  if (!toolchain) {
    throw ConfigError(
        "prover toolchain not configured (use --toolchain or "
        "INEQFORGE_LEAN_CMD)");
  }
  const Corpus corpus = load_corpus(args.problems_path);

  std::vector<Attempt> attempts;
  if (!args.attempts_path.empty()) {
    attempts = load_attempts(args.attempts_path);
  }
  std::optional<ProverAdapter> adapter;
  if (!args.adapter_cmd.empty() || !args.adapter_url.empty()) {
    ProverAdapter a;
    a.kind = args.adapter_cmd.empty() ? ProverAdapter::Kind::Http
                                      : ProverAdapter::Kind::Command;
    a.endpoint_or_command =
        args.adapter_cmd.empty() ? args.adapter_url : args.adapter_cmd;
    a.template_id = template_from_name(args.template_id);
    a.attempts_per_problem = args.attempts_per_problem;
    a.temperature = args.temperature;
    a.max_tokens = args.max_tokens;
    a.model = args.model;
    adapter = std::move(a);
  }

  BatchOptions options;
  options.workers = args.workers;
  options.journal_path = args.journal;
  options.timeout_s = args.timeout_s;
  options.mode =
      args.statement_mode ? VerifyMode::StatementOnly : VerifyMode::Proof;

  const std::vector<EvalRecord> records =
      run_batch(corpus.problems, std::move(attempts), adapter, *toolchain,
                options);
  if (!args.records_out.empty()) {
    std::ofstream out(args.records_out);
    for (const auto& r : records) out << record_to_json(r) << "\n";
  }
  return report_from_records(records, args, toolchain->mathlib_pin);
}

int cmd_stats(const std::string& records_path, const EvalArgs& args) {
  std::ifstream in(records_path);
  if (!in) throw std::runtime_error("cannot open records '" + records_path + "'");
  std::vector<EvalRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) records.push_back(record_from_json(line));
  }
  if (records.empty()) {
    std::cout << "";
    return kExitOk;
  }
  return report_from_records(records, args, "unpinned");
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"inequality problem transformation, emission and evaluation"};
  app.set_config("--config", "", "key=value config file merged under flags");
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  // expand-simp
  auto* simp = app.add_subcommand(
      "expand-simp", "duplicate + substitute variants for every seed");
  std::string simp_in, simp_out;
  std::uint64_t simp_seed = 0;
  simp->add_option("--in", simp_in, "seed corpus JSONL")->required();
  simp->add_option("--out", simp_out, "variant corpus JSONL")->required();
  simp->add_option("--seed", simp_seed, "rng seed")->required();

  // generate-mix
  auto* mix = app.add_subcommand("generate-mix",
                                 "seeded random rule-based generation");
  std::string mix_in, mix_out, mix_families = "composition";
  GenConfig mix_cfg;
  bool mix_no_dedup = false;
  mix->add_option("--in", mix_in, "seed corpus JSONL")->required();
  mix->add_option("--out", mix_out, "generated corpus JSONL")->required();
  mix->add_option("--seed", mix_cfg.seed, "rng seed")->required();
  mix->add_option("--count", mix_cfg.target_count, "problems to generate");
  mix->add_option("--families", mix_families,
                  "composition,variable-level,problem-level,typeI,typeII or all");
  mix->add_option("--depth", mix_cfg.max_depth, "max rules per problem");
  mix->add_option("--weight-min", mix_cfg.weight_min, "weighted-sum minimum");
  mix->add_option("--weight-max", mix_cfg.weight_max, "weighted-sum maximum");
  mix->add_flag("--no-dedup", mix_no_dedup, "keep duplicate statements");

  // make-ft-corpus
  auto* ft = app.add_subcommand("make-ft-corpus",
                                "two-stage fine-tuning corpus + ICL prompts");
  std::string ft_in, ft_out, ft_train = "amgm";
  GenConfig ft_cfg;
  ft_cfg.target_count = 5000;
  ft->add_option("--in", ft_in, "seed corpus JSONL")->required();
  ft->add_option("--out-dir", ft_out, "output directory")->required();
  ft->add_option("--seed", ft_cfg.seed, "rng seed")->required();
  ft->add_option("--count", ft_cfg.target_count, "stage-2 composition count");
  ft->add_option("--train-category", ft_train, "seed category used as train split");

  // emit
  auto* emit = app.add_subcommand("emit", "render .lean files and prompts");
  std::string emit_in, emit_out, emit_template;
  RenderStyle emit_style;
  emit->add_option("--in", emit_in, "corpus JSONL")->required();
  emit->add_option("--out-dir", emit_out, "output directory")->required();
  emit->add_option("--template", emit_template,
                   "also write prompt files (plain|chat-thinking|kimina-style"
                   "|icl|icl-gen)");
  emit->add_flag("--conj-pos", emit_style.conjunction_positivity,
                 "positivity as one conjunction hypothesis");
  emit->add_flag("--ascii-hyp", emit_style.ascii_hypothesis_names,
                 "ascii hypothesis names (h1 instead of h₁)");

  // check
  auto* check = app.add_subcommand("check", "numeric oracle over a corpus");
  std::string check_in, check_report;
  std::uint64_t check_seed = 0;
  std::size_t check_n = 1000;
  double check_tol = 1e-9;
  check->add_option("--in", check_in, "corpus JSONL")->required();
  check->add_option("--report", check_report, "report JSONL path");
  check->add_option("--seed", check_seed, "rng seed");
  check->add_option("--n", check_n, "samples per problem")
      ->check(CLI::PositiveNumber);
  check->add_option("--tol", check_tol, "relative tolerance")
      ->check(CLI::PositiveNumber);

  // eval
  auto* eval = app.add_subcommand(
      "eval", "verify attempts through the pinned toolchain and score");
  EvalArgs eval_args;
  eval->add_option("--problems", eval_args.problems_path, "corpus JSONL")
      ->required();
  eval->add_option("--attempts", eval_args.attempts_path,
                   "precomputed attempts JSONL");
  eval->add_option("--records-out", eval_args.records_out,
                   "write EvalRecords JSONL here");
  eval->add_option("--report-json", eval_args.report_json,
                   "write the JSON report here");
  eval->add_option("--journal", eval_args.journal,
                   "resumable journal of completed pairs");
  eval->add_option("--toolchain", eval_args.toolchain_cmd,
                   "compile command, e.g. a lake env lean wrapper");
  eval->add_option("--mathlib-pin", eval_args.mathlib_pin,
                   "mathlib pin recorded in reports");
  eval->add_option("--workers", eval_args.workers, "concurrent compilations")
      ->check(CLI::PositiveNumber);
  eval->add_option("--timeout", eval_args.timeout_s, "seconds per compile")
      ->check(CLI::PositiveNumber);
  eval->add_flag("--statement-mode", eval_args.statement_mode,
                 "elaborate statements (sorry allowed)");
  eval->add_option("--adapter-cmd", eval_args.adapter_cmd,
                   "prover command adapter (prompt on stdin)");
  eval->add_option("--adapter-url", eval_args.adapter_url,
                   "OpenAI-compatible completions endpoint");
  eval->add_option("--template", eval_args.template_id, "prompt template id");
  eval->add_option("--model", eval_args.model, "model name sent to http adapters");
  eval->add_option("--temperature", eval_args.temperature,
                   "adapter sampling temperature");
  eval->add_option("--max-tokens", eval_args.max_tokens,
                   "adapter generation budget");
  eval->add_option("--attempts-per-problem", eval_args.attempts_per_problem,
                   "adapter attempts per problem");
  eval->add_option("--k", eval_args.budgets, "comma-separated pass budgets");
  eval->add_option("--resamples", eval_args.resamples, "bootstrap resamples");
  eval->add_option("--rng-seed", eval_args.rng_seed, "bootstrap rng seed");

  // stats
  auto* stats = app.add_subcommand("stats", "pass@k report from records");
  std::string stats_records;
  EvalArgs stats_args;
  stats->add_option("--records", stats_records, "EvalRecords JSONL")
      ->required();
  stats->add_option("--k", stats_args.budgets, "comma-separated pass budgets");
  stats->add_option("--resamples", stats_args.resamples, "bootstrap resamples");
  stats->add_option("--rng-seed", stats_args.rng_seed, "bootstrap rng seed");
  stats->add_option("--report-json", stats_args.report_json,
                    "write the JSON report here");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    std::cout << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (simp->parsed()) return cmd_expand_simp(simp_in, simp_out, simp_seed);
    if (mix->parsed()) {
      mix_cfg.families = parse_families(mix_families);
      mix_cfg.dedup = !mix_no_dedup;
      return cmd_generate_mix(mix_in, mix_out, mix_cfg);
    }
    if (ft->parsed()) {
      ft_cfg.families = {RuleFamily::Composition};
      return cmd_make_ft_corpus(ft_in, ft_out, ft_cfg, ft_train);
    }
    if (emit->parsed()) {
      return cmd_emit(emit_in, emit_out, emit_template, emit_style);
    }
    if (check->parsed()) {
      return cmd_check(check_in, check_report, check_seed, check_n, check_tol);
    }
    if (eval->parsed()) return cmd_eval(eval_args);
    if (stats->parsed()) return cmd_stats(stats_records, stats_args);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const TemplateError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ExhaustionError& e) {
    std::cerr << "exhaustion: " << e.what() << "\n";
    return kExitDomainFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomainFailure;
  }
  return kExitUsage;
}

}  // namespace ineqforge::cli
