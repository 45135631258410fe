// Copyright 2026 The ineqforge Authors
//
// Licensed under the Apache License, Version 2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ineqforge/corpus.hpp"
#include "ineqforge/lean.hpp"
#include "ineqforge/rules.hpp"

namespace ineqforge {

/// Target count unreachable within the retry budget (10x the target).
class ExhaustionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GenConfig {
  std::uint64_t seed = 0;
  std::set<RuleFamily> families = {RuleFamily::Composition};
  std::size_t target_count = 100;
  std::size_t max_depth = 1;
  std::int64_t weight_min = 1;
  std::int64_t weight_max = 5;
  bool dedup = true;

  void validate() const;
  /// The config echo written as the corpus metadata header line.
  std::string meta_line() const;
};

/// Two variants per seed (the duplicated combination, then a random
/// always-applicable variable substitution), in seed order. Variant ids
/// follow the <category>_p<n> numbering: seed n maps to n+25 and n+50.
std::vector<Problem> expand_simp(const std::vector<Problem>& seeds, Rng& rng);

struct FilterResult {
  std::vector<Problem> kept;
  std::vector<SeedRejection> rejected;
};

/// Keeps exactly the records that qualify as seed problems: fixed variable
/// count over the reals with every variable positive. Integer-parameterized
/// and n-ary-family records cannot be represented and are rejected at parse
/// time; records disclaiming positivity are flagged "basic-assumption".
FilterResult filter_eligible(const std::vector<std::string>& records);

/// Seeded random generation: sample parents uniformly from the seeds,
/// sample an applicable rule uniformly from the enabled families, retry on
/// guard failure, dedup by structural equality of statements. Pure function
/// of (seeds, cfg): reruns produce byte-identical corpora.
Corpus generate_mix(const std::vector<Problem>& seeds, const GenConfig& cfg);

struct SeedSplit {
  std::vector<std::string> train_ids;
  std::vector<std::string> heldout_ids;
};

/// Train/held-out split by seed category; `train_category` defaults to the
/// 25 AM-GM seeds with everything else held out.
SeedSplit split_by_category(const std::vector<Problem>& seeds,
                            Category train_category = Category::Amgm);

struct FtCorpus {
  std::vector<Problem> stage1;  ///< variable-rule variants of the train seeds
  std::vector<Problem> stage2;  ///< combinations of stage-1 problems
  std::vector<PromptTask> tasks;
};

/// Fine-tuning data pipeline: stage 1 applies variable rules to each train
/// seed (4 variants per seed), stage 2 composes stage-1 problems up to
/// cfg.target_count, and every generated problem is paired with the Lean
/// proofs of its root seeds as an in-context prompt task.
FtCorpus make_ft_corpus(const std::vector<Problem>& seeds,
                        const SeedSplit& split, const GenConfig& cfg);

/// Root seed ids of a generated problem (first-entry parents transitively),
/// resolved against the given universe.
std::vector<std::string> root_seed_ids(const Problem& p,
                                       const std::vector<Problem>& universe);

}  // namespace ineqforge
