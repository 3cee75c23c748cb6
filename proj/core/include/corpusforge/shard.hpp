#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "corpusforge/doc_id.hpp"
#include "corpusforge/markdown.hpp"

namespace corpusforge {

struct ShardPlanEntry {
  std::uint32_t shard_id = 0;
  std::vector<DocId> docs;       // plan order
  std::uint64_t byte_size = 0;   // uncompressed markdown bytes
};

struct ShardPlan {
  std::vector<ShardPlanEntry> shards;
  std::uint64_t target_bytes = 0;
};

struct DocSize {
  DocId id;
  std::uint64_t bytes = 0;  // UTF-8 markdown bytes
};

/// Greedy order-preserving packing: a new shard starts when the next doc
/// would push the current one past target_bytes; a doc larger than the
/// target gets a shard of its own. Every non-final shard lands within
/// target ± max_doc_bytes.
ShardPlan plan_shards(std::span<const DocSize> docs, std::uint64_t target_bytes);

struct ShardManifest {
  std::uint32_t shard_id = 0;
  std::string file_name;
  std::uint64_t doc_count = 0;
  std::uint64_t byte_size = 0;  // uncompressed markdown bytes, as planned
  std::string sha256;           // digest of the file bytes on disk
};

std::string shard_file_name(std::uint32_t shard_id);

/// Looks up documents for shard writing; returns nullopt for unknown ids.
using DocLookup = std::function<std::optional<Document>(const DocId&)>;

/// Writes one shard as gzip-compressed JSON Lines, one Document per line in
/// plan order. Rewriting the same plan entry produces identical bytes.
/// Throws MissingDocument when the store lacks a planned doc.
ShardManifest write_shard(const ShardPlanEntry& entry, const std::filesystem::path& dir,
                          const DocLookup& lookup);

struct ShardVerifyResult {
  bool ok = false;
  std::vector<std::string> mismatches;  // "checksum", "doc_count", "byte_size"
};

ShardVerifyResult verify_shard(const ShardManifest& manifest, const std::filesystem::path& file);

}  // namespace corpusforge
