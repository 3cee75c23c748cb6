#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "corpusforge/doc_id.hpp"
#include "corpusforge/markdown.hpp"

namespace corpusforge {

struct BucketStats {
  std::string name;
  std::uint64_t available_tokens = 0;
  std::uint64_t doc_count = 0;
};

struct MixTarget {
  std::string bucket;
  double ratio = 0.0;
};

struct MixSpec {
  std::vector<MixTarget> targets;  // ratios >= 0, summing to 1 within 1e-9
  std::uint64_t budget_tokens = 0;
  double max_epochs = 1.0;  // 1.0 = no upsampling
};

struct MixDraw {
  std::string bucket;
  std::uint64_t tokens_drawn = 0;
  double epochs_used = 0.0;
  std::uint64_t shortfall = 0;  // tokens missing when over the epoch cap
};

struct MixPlan {
  std::vector<MixDraw> draws;
  std::uint64_t budget_tokens = 0;
  bool feasible = false;
};

/// Deterministic token counter; the default counts Unicode scalar values of
/// the markdown, a tokenizer-agnostic proxy.
using TokenCounter = std::function<std::uint64_t(const Document&)>;

std::uint64_t count_tokens(const Document& doc, const TokenCounter& counter = nullptr);

/// Apportions the budget across buckets by largest-remainder rounding, so
/// the draws sum to the budget exactly. Infeasible when any bucket would
/// need more than max_epochs passes. Throws UnknownBucket when a target has
/// no stats.
MixPlan plan_mixture(std::span<const BucketStats> stats, const MixSpec& spec);

struct BucketDocs {
  std::string name;
  std::vector<std::pair<DocId, std::uint64_t>> docs;  // (doc, token count)
};

struct MixedDraw {
  std::string bucket;
  DocId doc;
};

/// Materializes a feasible plan: per bucket, docs are drawn in a seeded
/// shuffle order until the quota is met (the final doc may overshoot by
/// less than its own length); extra epochs repeat the pass reshuffled. The
/// combined sequence is interleaved with one more seeded shuffle. Throws
/// ExhaustedBucket when bucket contents cannot meet the planned draw.
std::vector<MixedDraw> realize_mixture(const MixPlan& plan, std::span<const BucketDocs> buckets,
                                       std::uint64_t seed);

}  // namespace corpusforge
