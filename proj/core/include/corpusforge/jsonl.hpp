#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "corpusforge/markdown.hpp"
#include "corpusforge/quality.hpp"
#include "corpusforge/shard.hpp"
#include "corpusforge/warc.hpp"

namespace corpusforge {

// JSON Lines codecs for the on-disk stage formats. Field order is fixed so
// identical inputs serialize to identical bytes.

struct RawDocRecord {
  RawDocument doc;
  double lang_score = 0.0;
};

std::string to_jsonl(const RawDocRecord& rec);
RawDocRecord raw_doc_from_jsonl(std::string_view line);

std::string to_jsonl(const Document& doc);
Document document_from_jsonl(std::string_view line);

/// {"survivor": ..., "members": [...]} for one duplicate cluster.
std::string cluster_to_jsonl(const std::vector<DocId>& sorted_cluster);
std::vector<DocId> cluster_from_jsonl(std::string_view line);

std::string quarantine_to_jsonl(const Document& doc, const FilterVerdict& verdict);

std::string shard_manifests_to_json(std::span<const ShardManifest> manifests);
std::vector<ShardManifest> shard_manifests_from_json(std::string_view text);

}  // namespace corpusforge
