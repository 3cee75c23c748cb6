#include "corpusforge/jsonl.hpp"

#include <json.hpp>

#include "corpusforge/errors.hpp"

namespace corpusforge {

using ordered_json = nlohmann::ordered_json;

namespace {

DocId parse_doc_id(const std::string& s) {
  auto id = DocId::parse(s);
  if (!id) throw IoError("bad doc_id: " + s);
  return *id;
}

ordered_json parse_line(std::string_view line) {
  ordered_json j = ordered_json::parse(line, nullptr, false);
  if (j.is_discarded()) throw IoError("bad JSON line");
  return j;
}

}  // namespace

std::string to_jsonl(const RawDocRecord& rec) {
  ordered_json j;
  j["doc_id"] = rec.doc.id.str();
  j["url"] = rec.doc.url;
  j["fetch_time"] = format_rfc3339(rec.doc.fetch_time);
  j["content_kind"] = std::string(to_string(rec.doc.kind));
  j["charset"] = rec.doc.charset;
  j["lang_score"] = rec.lang_score;
  j["text"] = rec.doc.text;
  return j.dump();
}

RawDocRecord raw_doc_from_jsonl(std::string_view line) {
  ordered_json j = parse_line(line);
  RawDocRecord rec;
  rec.doc.id = parse_doc_id(j.at("doc_id").get<std::string>());
  rec.doc.url = j.at("url").get<std::string>();
  if (auto t = parse_rfc3339(j.at("fetch_time").get<std::string>())) rec.doc.fetch_time = *t;
  auto kind = content_kind_from_string(j.at("content_kind").get<std::string>());
  if (!kind) throw IoError("bad content_kind");
  rec.doc.kind = *kind;
  rec.doc.charset = j.at("charset").get<std::string>();
  rec.lang_score = j.at("lang_score").get<double>();
  rec.doc.text = j.at("text").get<std::string>();
  return rec;
}

std::string to_jsonl(const Document& doc) {
  ordered_json j;
  j["doc_id"] = doc.id.str();
  j["url"] = doc.url;
  j["markdown"] = doc.markdown;
  j["lang_score"] = doc.lang_score;
  j["char_count"] = doc.char_count;
  j["line_count"] = doc.line_count;
  return j.dump();
}

Document document_from_jsonl(std::string_view line) {
  ordered_json j = parse_line(line);
  Document doc;
  doc.id = parse_doc_id(j.at("doc_id").get<std::string>());
  doc.url = j.at("url").get<std::string>();
  doc.markdown = j.at("markdown").get<std::string>();
  doc.lang_score = j.at("lang_score").get<double>();
  doc.char_count = j.at("char_count").get<std::uint64_t>();
  doc.line_count = j.at("line_count").get<std::uint64_t>();
  return doc;
}

std::string cluster_to_jsonl(const std::vector<DocId>& sorted_cluster) {
  ordered_json j;
  j["survivor"] = sorted_cluster.front().str();
  ordered_json members = ordered_json::array();
  for (const auto& id : sorted_cluster) members.push_back(id.str());
  j["members"] = std::move(members);
  return j.dump();
}

std::vector<DocId> cluster_from_jsonl(std::string_view line) {
  ordered_json j = parse_line(line);
  std::vector<DocId> out;
  for (const auto& m : j.at("members")) out.push_back(parse_doc_id(m.get<std::string>()));
  return out;
}

std::string quarantine_to_jsonl(const Document& doc, const FilterVerdict& verdict) {
  ordered_json j;
  j["doc_id"] = doc.id.str();
  j["url"] = doc.url;
  ordered_json rules = ordered_json::array();
  for (const auto& r : verdict.failed_rules) rules.push_back(r);
  j["failed_rules"] = std::move(rules);
  ordered_json m;
  m["char_count"] = verdict.metrics.char_count;
  m["ja_char_ratio"] = verdict.metrics.ja_char_ratio;
  m["mean_line_length"] = verdict.metrics.mean_line_length;
  m["duplicate_line_ratio"] = verdict.metrics.duplicate_line_ratio;
  m["max_char_run"] = verdict.metrics.max_char_run;
  m["ngword_hits"] = verdict.metrics.ngword_hits;
  j["metrics"] = std::move(m);
  return j.dump();
}

std::string shard_manifests_to_json(std::span<const ShardManifest> manifests) {
  ordered_json arr = ordered_json::array();
  for (const auto& m : manifests) {
    ordered_json j;
    j["shard_id"] = m.shard_id;
    j["file_name"] = m.file_name;
    j["doc_count"] = m.doc_count;
    j["byte_size"] = m.byte_size;
    j["sha256"] = m.sha256;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::vector<ShardManifest> shard_manifests_from_json(std::string_view text) {
  ordered_json arr = parse_line(text);
  std::vector<ShardManifest> out;
  for (const auto& j : arr) {
    ShardManifest m;
    m.shard_id = j.at("shard_id").get<std::uint32_t>();
    m.file_name = j.at("file_name").get<std::string>();
    m.doc_count = j.at("doc_count").get<std::uint64_t>();
    m.byte_size = j.at("byte_size").get<std::uint64_t>();
    m.sha256 = j.at("sha256").get<std::string>();
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace corpusforge
