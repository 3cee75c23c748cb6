#include "corpusforge/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "corpusforge/errors.hpp"
#include "corpusforge/hashing.hpp"

namespace corpusforge {

std::uint64_t count_tokens(const Document& doc, const TokenCounter& counter) {
  if (counter) return counter(doc);
  return doc.char_count;
}

MixPlan plan_mixture(std::span<const BucketStats> stats, const MixSpec& spec) {
  double ratio_sum = 0.0;
  for (const auto& t : spec.targets) {
    if (t.ratio < 0.0) throw Error("mix ratio must be non-negative: " + t.bucket);
    ratio_sum += t.ratio;
  }
  if (std::abs(ratio_sum - 1.0) > 1e-9) {
    throw Error("mix ratios must sum to 1 (got " + std::to_string(ratio_sum) + ")");
  }
  if (spec.max_epochs < 1.0) throw Error("max_epochs must be >= 1");

  std::unordered_map<std::string, const BucketStats*> by_name;
  for (const auto& s : stats) by_name[s.name] = &s;

  MixPlan plan;
  plan.budget_tokens = spec.budget_tokens;

  // Largest-remainder apportionment: floors first, then the leftover tokens
  // go to the largest fractional remainders (ties broken by target order).
  std::vector<std::uint64_t> floors(spec.targets.size());
  std::vector<double> remainders(spec.targets.size());
  std::uint64_t assigned = 0;
  for (std::size_t i = 0; i < spec.targets.size(); ++i) {
    double exact = spec.targets[i].ratio * double(spec.budget_tokens);
    floors[i] = static_cast<std::uint64_t>(exact);
    remainders[i] = exact - double(floors[i]);
    assigned += floors[i];
  }
  std::uint64_t leftover = spec.budget_tokens - assigned;
  std::vector<std::size_t> order(spec.targets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainders[a] > remainders[b]; });
  for (std::uint64_t i = 0; i < leftover; ++i) ++floors[order[i % order.size()]];

  plan.feasible = true;
  for (std::size_t i = 0; i < spec.targets.size(); ++i) {
    const auto& target = spec.targets[i];
    auto it = by_name.find(target.bucket);
    if (it == by_name.end()) throw UnknownBucket("no stats for bucket: " + target.bucket);
    const BucketStats& bucket = *it->second;

    MixDraw draw;
    draw.bucket = target.bucket;
    draw.tokens_drawn = floors[i];
    if (bucket.available_tokens == 0) {
      draw.epochs_used = draw.tokens_drawn == 0 ? 0.0 : std::numeric_limits<double>::infinity();
    } else {
      draw.epochs_used = double(draw.tokens_drawn) / double(bucket.available_tokens);
    }
    double cap = spec.max_epochs * double(bucket.available_tokens);
    if (double(draw.tokens_drawn) > cap + 1e-9) {
      draw.shortfall = draw.tokens_drawn - static_cast<std::uint64_t>(cap);
      plan.feasible = false;
    }
    plan.draws.push_back(std::move(draw));
  }
  return plan;
}

namespace {

template <typename T>
void seeded_shuffle(std::vector<T>& items, SplitMix64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace

std::vector<MixedDraw> realize_mixture(const MixPlan& plan, std::span<const BucketDocs> buckets,
                                       std::uint64_t seed) {
  if (!plan.feasible) throw Error("cannot realize an infeasible mix plan");
  std::unordered_map<std::string, const BucketDocs*> by_name;
  for (const auto& b : buckets) by_name[b.name] = &b;

  std::vector<MixedDraw> out;
  for (const auto& draw : plan.draws) {
    auto it = by_name.find(draw.bucket);
    if (it == by_name.end()) throw UnknownBucket("no documents for bucket: " + draw.bucket);
    const BucketDocs& bucket = *it->second;

    std::uint64_t bucket_total = 0;
    for (const auto& [id, tokens] : bucket.docs) bucket_total += tokens;
    if (draw.tokens_drawn > 0 && bucket_total == 0) {
      throw ExhaustedBucket("bucket is empty: " + draw.bucket);
    }

    // Passes are capped by what the plan promised; a bucket whose actual
    // contents fall short of its stats is an inconsistency, not a license
    // to upsample further.
    std::uint64_t allowed_passes =
        std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(draw.epochs_used - 1e-9)));
    std::uint64_t drawn = 0;
    std::uint64_t pass = 0;
    SplitMix64 rng(hash_combine64(seed, hash_bytes64(draw.bucket)));
    while (drawn < draw.tokens_drawn && pass < allowed_passes) {
      // One full pass in a fresh shuffle order; epochs beyond the first are
      // re-shuffled so upsampling is not a byte-for-byte repeat.
      std::vector<std::uint32_t> order(bucket.docs.size());
      for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
      seeded_shuffle(order, rng);
      for (std::uint32_t idx : order) {
        if (drawn >= draw.tokens_drawn) break;
        const auto& [id, tokens] = bucket.docs[idx];
        if (tokens == 0) continue;
        out.push_back({draw.bucket, id});
        drawn += tokens;
      }
      ++pass;
    }
    if (drawn < draw.tokens_drawn) {
      throw ExhaustedBucket("bucket '" + draw.bucket + "' holds fewer tokens than its stats claim");
    }
  }

  SplitMix64 rng(hash_combine64(seed, hash_bytes64("interleave")));
  seeded_shuffle(out, rng);
  return out;
}

}  // namespace corpusforge
