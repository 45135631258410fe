// Copyright 2026 The ineqforge Authors
//
// Licensed under the Apache License, Version 2.0.
// SPDX-License-Identifier: Apache-2.0

#include "ineqforge/generate.hpp"

#include <algorithm>
#include <optional>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace ineqforge {

namespace {

constexpr const char* kChainPlaceholder = "@chain";
constexpr std::size_t kStage1Factor = 4;

/// Seed ids follow <category>_p<n> with n in 1..25; their two simple
/// variants take n+25 and n+50, matching the corpus numbering.
std::string derive_variant_id(const std::string& seed_id, int offset,
                              const char* fallback_suffix) {
  const std::size_t pos = seed_id.rfind("_p");
  if (pos != std::string::npos) {
    const std::string digits = seed_id.substr(pos + 2);
    if (!digits.empty() &&
        std::all_of(digits.begin(), digits.end(),
                    [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      const long n = std::stol(digits);
      if (n >= 1 && n <= 25) {
        return seed_id.substr(0, pos + 2) + std::to_string(n + offset);
      }
    }
  }
  return seed_id + fallback_suffix;
}

std::string statement_key(const Problem& p) {
  std::ostringstream key;
  key << p.lhs.get() << "|" << p.rhs.get() << "|" << p.rhs_positive;
  for (const auto& v : p.variables) key << "|" << v.render();
  for (const auto& c : p.conditions) {
    key << "|" << static_cast<int>(c.kind) << ":" << c.lhs.get() << ":"
        << c.rhs.get();
  }
  return key.str();
}

}  // namespace

void GenConfig::validate() const {
  if (target_count < 1) throw std::invalid_argument("target count must be >= 1");
  if (max_depth < 1) throw std::invalid_argument("max depth must be >= 1");
  if (weight_min < 1 || weight_max < weight_min) {
    throw std::invalid_argument("invalid weight range");
  }
  if (families.empty()) throw std::invalid_argument("no rule families enabled");
}

std::string GenConfig::meta_line() const {
  nlohmann::ordered_json meta;
  meta["seed"] = seed;
  auto fams = nlohmann::ordered_json::array();
  for (const auto& f : families) fams.push_back(family_name(f));
  meta["families"] = std::move(fams);
  meta["count"] = target_count;
  meta["depth"] = max_depth;
  meta["weights"] = {weight_min, weight_max};
  meta["dedup"] = dedup;
  meta["version"] = kVersion;
  nlohmann::ordered_json j;
  j["meta"] = std::move(meta);
  return j.dump();
}

std::vector<Problem> expand_simp(const std::vector<Problem>& seeds, Rng& rng) {
  std::vector<Problem> out;
  out.reserve(seeds.size() * 2);
  for (const auto& seed : seeds) {
    Problem t1 = type1_variant(seed);
    t1.id = derive_variant_id(seed.id, 25, "_t1");
    out.push_back(std::move(t1));

    const auto& pool = variable_rules_any_condition();
    const std::string kind = pool[rng.index(pool.size())].name;
    Problem t2 = type2_variant(seed, kind, rng);
    t2.id = derive_variant_id(seed.id, 50, "_t2");
    out.push_back(std::move(t2));
  }
  return out;
}

FilterResult filter_eligible(const std::vector<std::string>& records) {
  FilterResult result;
  for (const auto& line : records) {
    auto parsed = try_parse_seed(line);
    if (std::holds_alternative<Problem>(parsed)) {
      result.kept.push_back(std::get<Problem>(std::move(parsed)));
    } else {
      result.rejected.push_back(std::get<SeedRejection>(std::move(parsed)));
    }
  }
  return result;
}

namespace {

struct ChainState {
  std::optional<Problem> current;
  ProvEntry last_entry;
};

const Problem& pick_seed(const std::vector<Problem>& seeds, Rng& rng) {
  return seeds[rng.index(seeds.size())];
}

/// Combination rules offered to the generator: when both inputs carry the
/// tag, the positive variant of the dual rows stands in for the plain one.
std::vector<TransformRule> generator_composition_rules(const Problem& p1,
                                                       const Problem& p2,
                                                       const GenConfig& cfg) {
  const bool both_positive = p1.rhs_positive && p2.rhs_positive;
  std::vector<TransformRule> out;
  for (const auto& r : composition_rules()) {
    if (r.requires_positive_rhs != both_positive) continue;
    TransformRule rule = r;
    if (rule.name == "Weighted Sum") {
      rule.parameters["weight_min"] = std::to_string(cfg.weight_min);
      rule.parameters["weight_max"] = std::to_string(cfg.weight_max);
    }
    out.push_back(std::move(rule));
  }
  return out;
}

Problem chain_step(const std::vector<Problem>& seeds, const GenConfig& cfg,
                   std::optional<Problem> current, RuleFamily family,
                   Rng& rng) {
  switch (family) {
    case RuleFamily::Composition: {
      Problem p1 = current ? std::move(*current) : pick_seed(seeds, rng);
      Problem p2 = pick_seed(seeds, rng);
      if (p1.id == p2.id) {
        throw RuleInapplicable("composition", "feasibility",
                               "sampled the same seed twice");
      }
      if (!combination_feasible(p1, p2)) {
        std::tie(p1, p2) = lift(p1, p2);
      }
      auto rules = generator_composition_rules(p1, p2, cfg);
      const TransformRule rule = rules[rng.index(rules.size())];
      Problem out = compose(p1, p2, rule, rng).problem;
      out.id = kChainPlaceholder;
      return out;
    }
    case RuleFamily::VariableLevel: {
      Problem p = current ? std::move(*current) : pick_seed(seeds, rng);
      std::vector<TransformRule> rules;
      for (const auto& r : applicable_rules(p)) {
        if (r.family == RuleFamily::VariableLevel) rules.push_back(r);
      }
      if (rules.empty()) {
        throw RuleInapplicable("variable-level", "guards", "no applicable rule");
      }
      Problem out = apply_var_rule(p, rules[rng.index(rules.size())], rng).problem;
      out.id = kChainPlaceholder;
      return out;
    }
    case RuleFamily::ProblemLevel: {
      Problem p = current ? std::move(*current) : pick_seed(seeds, rng);
      std::vector<TransformRule> rules;
      for (const auto& r : applicable_rules(p)) {
        if (r.family == RuleFamily::ProblemLevel) rules.push_back(r);
      }
      if (rules.empty()) {
        throw RuleInapplicable("problem-level", "guards", "no applicable rule");
      }
      Problem out = apply_stmt_rule(p, rules[rng.index(rules.size())]).problem;
      out.id = kChainPlaceholder;
      return out;
    }
    case RuleFamily::TypeI: {
      Problem p = current ? std::move(*current) : pick_seed(seeds, rng);
      Problem out = type1_variant(p);
      out.id = kChainPlaceholder;
      return out;
    }
    case RuleFamily::TypeII: {
      Problem p = current ? std::move(*current) : pick_seed(seeds, rng);
      const auto& pool = variable_rules_any_condition();
      Problem out =
          type2_variant(p, pool[rng.index(pool.size())].name, rng);
      out.id = kChainPlaceholder;
      return out;
    }
  }
  throw std::logic_error("unreachable");
}

std::string final_mix_id(const Problem& p, std::size_t ordinal) {
  const std::string seed_id = p.provenance.empty() || p.provenance.front().parents.empty()
                                  ? "seed"
                                  : p.provenance.front().parents.front();
  const std::string slug =
      p.provenance.empty() ? "none" : rule_slug(p.provenance.back().rule);
  return category_name(p.category) + "_" + seed_id + "_" + slug + "_" +
         std::to_string(ordinal);
}

void finalize_chain_ids(Problem& p, std::size_t ordinal) {
  const std::string id = final_mix_id(p, ordinal);
  for (auto& entry : p.provenance) {
    for (auto& parent : entry.parents) {
      if (parent == kChainPlaceholder) parent = id;
    }
  }
  p.id = id;
}

}  // namespace

Corpus generate_mix(const std::vector<Problem>& seeds, const GenConfig& cfg) {
  cfg.validate();
  if (seeds.empty()) {
    throw std::invalid_argument("generate_mix with no eligible seeds");
  }
  Rng rng(cfg.seed);
  const std::vector<RuleFamily> families(cfg.families.begin(),
                                         cfg.families.end());

  Corpus corpus;
  corpus.meta_line = cfg.meta_line();
  std::unordered_set<std::string> seen;
  const std::size_t budget = 10 * cfg.target_count;
  std::size_t attempts = 0;

  while (corpus.problems.size() < cfg.target_count) {
    if (++attempts > budget) {
      throw ExhaustionError(
          "generated " + std::to_string(corpus.problems.size()) + " of " +
          std::to_string(cfg.target_count) + " problems within the retry budget");
    }
    const std::size_t depth =
        cfg.max_depth == 1
            ? 1
            : static_cast<std::size_t>(rng.int_in(1, static_cast<std::int64_t>(cfg.max_depth)));
    std::optional<Problem> current;
    bool ok = true;
    for (std::size_t step = 0; step < depth; ++step) {
      const RuleFamily family = families[rng.index(families.size())];
      try {
        current = chain_step(seeds, cfg, std::move(current), family, rng);
      } catch (const RuleInapplicable&) {
        ok = false;
        break;
      }
    }
    if (!ok || !current) continue;
    if (cfg.dedup && !seen.insert(statement_key(*current)).second) continue;
    finalize_chain_ids(*current, corpus.problems.size() + 1);
    corpus.problems.push_back(std::move(*current));
  }
  return corpus;
}

SeedSplit split_by_category(const std::vector<Problem>& seeds,
                            Category train_category) {
  SeedSplit split;
  for (const auto& p : seeds) {
    if (p.category == train_category) {
      split.train_ids.push_back(p.id);
    } else {
      split.heldout_ids.push_back(p.id);
    }
  }
  return split;
}

std::vector<std::string> root_seed_ids(const Problem& p,
                                       const std::vector<Problem>& universe) {
  std::unordered_map<std::string, const Problem*> by_id;
  for (const auto& q : universe) by_id[q.id] = &q;

  std::vector<std::string> roots;
  const std::function<void(const Problem&)> walk = [&](const Problem& q) {
    if (q.provenance.empty()) {
      roots.push_back(q.id);
      return;
    }
    for (const auto& parent : q.provenance.back().parents) {
      auto it = by_id.find(parent);
      if (it != by_id.end() && it->second->id != q.id) {
        walk(*it->second);
      } else {
        roots.push_back(parent);
      }
    }
  };
  walk(p);
  return roots;
}

FtCorpus make_ft_corpus(const std::vector<Problem>& seeds,
                        const SeedSplit& split, const GenConfig& cfg) {
  cfg.validate();
  if (split.train_ids.empty()) {
    throw std::invalid_argument("make_ft_corpus with empty train split");
  }
  std::unordered_set<std::string> train(split.train_ids.begin(),
                                        split.train_ids.end());
  std::vector<Problem> train_seeds;
  for (const auto& p : seeds) {
    if (train.count(p.id)) train_seeds.push_back(p);
  }
  if (train_seeds.empty()) {
    throw std::invalid_argument("train split matches no seed problem");
  }

  Rng rng(cfg.seed);
  FtCorpus out;

  // Stage 1: four distinct variable-rule variants per train seed.
  std::size_t ordinal = 0;
  for (const auto& seed : train_seeds) {
    std::vector<TransformRule> pool = variable_rules_any_condition();
    for (std::size_t k = 0; k < kStage1Factor; ++k) {
      const std::size_t pick = rng.index(pool.size());
      const TransformRule rule = pool[pick];
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
      Problem variant = apply_var_rule(seed, rule, rng).problem;
      variant.id = "generated_" + seed.id + "_" + rule_slug(rule.name) + "_" +
                   std::to_string(++ordinal);
      out.stage1.push_back(std::move(variant));
    }
  }

  // Stage 2: compositions of stage-1 problems.
  GenConfig stage2_cfg = cfg;
  stage2_cfg.seed = rng.next_u64();
  stage2_cfg.families = {RuleFamily::Composition};
  stage2_cfg.max_depth = 1;
  out.stage2 = generate_mix(out.stage1, stage2_cfg).problems;

  // Prompt tasks: every generated problem paired with its root seed proofs.
  std::unordered_map<std::string, const Problem*> seed_by_id;
  for (const auto& p : seeds) seed_by_id[p.id] = &p;
  std::vector<Problem> universe = out.stage1;

  const auto proof_of = [&](const std::string& id) -> std::optional<std::string> {
    auto it = seed_by_id.find(id);
    if (it == seed_by_id.end()) return std::nullopt;
    return it->second->lean_proof;
  };

  const auto add_task = [&](const Problem& p, TemplateId tid) {
    std::vector<std::string> roots = root_seed_ids(p, universe);
    std::vector<std::string> proofs;
    for (const auto& r : roots) {
      auto proof = proof_of(r);
      if (!proof) return;  // seed without a bundled proof: no task
      proofs.push_back(*proof);
    }
    PromptTask task;
    task.template_id = tid;
    task.formal_statement = render_statement(p).statement_line();
    task.icl_proofs = std::move(proofs);
    if (tid == TemplateId::Icl && task.icl_proofs.empty()) return;
    if (tid == TemplateId::IclGen && task.icl_proofs.size() != 2) return;
    out.tasks.push_back(std::move(task));
  };

  for (const auto& p : out.stage1) add_task(p, TemplateId::Icl);
  for (const auto& p : out.stage2) add_task(p, TemplateId::IclGen);
  return out;
}

}  // namespace ineqforge
