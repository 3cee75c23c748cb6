#include "corpusforge/shard.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "corpusforge/errors.hpp"
#include "corpusforge/gzip.hpp"
#include "corpusforge/hashing.hpp"
#include "corpusforge/jsonl.hpp"

namespace corpusforge {

ShardPlan plan_shards(std::span<const DocSize> docs, std::uint64_t target_bytes) {
  if (target_bytes == 0) throw Error("shard target_bytes must be positive");
  ShardPlan plan;
  plan.target_bytes = target_bytes;

  ShardPlanEntry current;
  current.shard_id = 0;
  for (const auto& doc : docs) {
    if (doc.bytes == 0) throw Error("document with zero byte size: " + doc.id.str());
    if (!current.docs.empty() && current.byte_size + doc.bytes > target_bytes) {
      plan.shards.push_back(std::move(current));
      current = ShardPlanEntry{};
      current.shard_id = static_cast<std::uint32_t>(plan.shards.size());
    }
    current.docs.push_back(doc.id);
    current.byte_size += doc.bytes;
  }
  if (!current.docs.empty()) plan.shards.push_back(std::move(current));
  return plan;
}

std::string shard_file_name(std::uint32_t shard_id) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "shard-%06u.jsonl.gz", shard_id);
  return buf;
}

ShardManifest write_shard(const ShardPlanEntry& entry, const std::filesystem::path& dir,
                          const DocLookup& lookup) {
  std::string payload;
  payload.reserve(entry.byte_size + entry.docs.size() * 128);
  std::uint64_t markdown_bytes = 0;
  for (const auto& id : entry.docs) {
    auto doc = lookup(id);
    if (!doc) throw MissingDocument("shard plan references unknown doc: " + id.str());
    markdown_bytes += doc->markdown.size();
    payload += to_jsonl(*doc);
    payload += '\n';
  }

  std::string compressed = gzip_compress(payload);
  std::filesystem::path file = dir / shard_file_name(entry.shard_id);
  std::filesystem::path tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open shard for write: " + tmp.string());
    out.write(compressed.data(), static_cast<std::streamsize>(compressed.size()));
    if (!out) throw IoError("shard write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, file);

  ShardManifest m;
  m.shard_id = entry.shard_id;
  m.file_name = file.filename().string();
  m.doc_count = entry.docs.size();
  m.byte_size = markdown_bytes;
  m.sha256 = sha256_hex(compressed);
  return m;
}

ShardVerifyResult verify_shard(const ShardManifest& manifest, const std::filesystem::path& file) {
  ShardVerifyResult result;

  std::string bytes;
  {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
      result.mismatches = {"checksum", "doc_count", "byte_size"};
      return result;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    bytes = ss.str();
  }

  if (sha256_hex(bytes) != manifest.sha256) result.mismatches.push_back("checksum");

  std::uint64_t doc_count = 0;
  std::uint64_t markdown_bytes = 0;
  bool readable = true;
  try {
    std::string payload = gzip_decompress(bytes);
    std::size_t pos = 0;
    while (pos < payload.size()) {
      auto nl = payload.find('\n', pos);
      std::string_view line = std::string_view(payload).substr(
          pos, nl == std::string::npos ? payload.size() - pos : nl - pos);
      if (!line.empty()) {
        Document doc = document_from_jsonl(line);
        ++doc_count;
        markdown_bytes += doc.markdown.size();
      }
      if (nl == std::string::npos) break;
      pos = nl + 1;
    }
  } catch (const Error&) {
    readable = false;
  }

  if (!readable || doc_count != manifest.doc_count) result.mismatches.push_back("doc_count");
  if (!readable || markdown_bytes != manifest.byte_size) result.mismatches.push_back("byte_size");
  result.ok = result.mismatches.empty();
  return result;
}

}  // namespace corpusforge
