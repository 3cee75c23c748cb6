#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "corpusforge/errors.hpp"
#include "corpusforge/gzip.hpp"
#include "corpusforge/hashing.hpp"
#include "corpusforge/jsonl.hpp"
#include "corpusforge/unicode.hpp"
#include "stage_impl.hpp"

namespace corpusforge::detail {

using ordered_json = nlohmann::ordered_json;

std::filesystem::path RunPaths::stage_file(const std::filesystem::path& dir, const std::string& dump,
                                           std::uint32_t file_index) const {
  char name[32];
  std::snprintf(name, sizeof(name), "%05u.jsonl", file_index);
  return dir / dump / name;
}

std::filesystem::path RunPaths::signature_file(const std::string& dump,
                                               std::uint32_t file_index) const {
  std::string flat = dump;
  std::replace(flat.begin(), flat.end(), '/', '_');
  char name[64];
  std::snprintf(name, sizeof(name), "-%05u.mhsg", file_index);
  return signatures_dir() / (flat + name);
}

std::string unit_name(const std::string& dump, std::uint32_t file_index) {
  char idx[16];
  std::snprintf(idx, sizeof(idx), "%05u", file_index);
  return dump + "/" + idx;
}

bool parse_unit_name(const std::string& unit, std::string& dump, std::uint32_t& file_index) {
  auto slash = unit.rfind('/');
  if (slash == std::string::npos || slash + 1 >= unit.size()) return false;
  dump = unit.substr(0, slash);
  try {
    file_index = static_cast<std::uint32_t>(std::stoul(unit.substr(slash + 1)));
  } catch (const std::exception&) {
    return false;
  }
  return true;
}

namespace {

bool is_warc_file(const std::filesystem::path& p) {
  std::string name = p.filename().string();
  return name.ends_with(".warc") || name.ends_with(".warc.gz");
}

}  // namespace

std::vector<ArchiveRef> discover_archives(const PipelineConfig& config) {
  if (config.input.empty() || !std::filesystem::exists(config.input)) {
    throw MissingInput("input directory not found: " + config.input.string());
  }
  // Subdirectories are dumps; loose files belong to the configured dump label.
  std::vector<std::pair<std::string, std::filesystem::path>> found;
  for (const auto& entry : std::filesystem::directory_iterator(config.input)) {
    if (entry.is_directory()) {
      std::string dump = entry.path().filename().string();
      for (const auto& sub : std::filesystem::recursive_directory_iterator(entry.path())) {
        if (sub.is_regular_file() && is_warc_file(sub.path())) found.emplace_back(dump, sub.path());
      }
    } else if (entry.is_regular_file() && is_warc_file(entry.path())) {
      if (config.dump_label.empty()) {
        throw ConfigError("ingest.dump_label",
                          "required when WARC files sit directly in the input directory");
      }
      found.emplace_back(config.dump_label, entry.path());
    }
  }
  if (found.empty()) {
    throw MissingInput("no .warc or .warc.gz files under " + config.input.string());
  }
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second.string() < b.second.string();
  });

  std::vector<ArchiveRef> archives;
  std::string current_dump;
  std::uint32_t index = 0;
  for (auto& [dump, path] : found) {
    if (dump != current_dump) {
      current_dump = dump;
      index = 0;
    }
    archives.push_back({dump, index++, path});
  }
  return archives;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for write: " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInput("cannot open: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Counts run_ingest_unit(const PipelineConfig& config, const RunPaths& paths,
                       const ArchiveRef& archive) {
  Counts c;
  std::string out;
  std::ifstream in(archive.path, std::ios::binary);
  if (!in) throw MissingInput("cannot open archive: " + archive.path.string());

  try {
    WarcReader reader(in);
    while (auto rec = reader.next()) {
      DocId id{archive.dump, archive.file_index,
               static_cast<std::uint32_t>(reader.stats().members - 1)};
      ExtractDrop reason = ExtractDrop::kept;
      auto raw = extract_response_document(*rec, id, config.charset_fallbacks, reason);
      if (!raw) {
        ++c["drop." + std::string(to_string(reason))];
        continue;
      }
      LangScore lang = score_japanese(raw->text);
      if (lang.score < config.tau_japanese) {
        ++c["drop.non-japanese"];
        continue;
      }
      std::string line = to_jsonl(RawDocRecord{std::move(*raw), lang.score});
      out += line;
      out += '\n';
      ++c["docs_out"];
      c["bytes_out"] += line.size() + 1;
    }
    const auto& stats = reader.stats();
    c["members"] = stats.members;
    c["yielded"] = stats.yielded;
    c["truncated"] = stats.truncated;
    c["malformed"] = stats.malformed;
    if (stats.stream_errors > 0) c["stream_errors"] = stats.stream_errors;
  } catch (const UnreadableArchive&) {
    // The file is skipped, not fatal; it still yields an (empty) stage output.
    ++c["unreadable_archives"];
  }

  write_file_atomic(paths.stage_file(paths.raw_dir(), archive.dump, archive.file_index), out);
  return c;
}

Counts run_convert_unit(const PipelineConfig& config, const RunPaths& paths,
                        const std::string& unit) {
  (void)config;
  std::string dump;
  std::uint32_t index = 0;
  if (!parse_unit_name(unit, dump, index)) throw Error("bad work unit: " + unit);

  Counts c;
  std::string out;
  for_each_line(paths.stage_file(paths.raw_dir(), dump, index), [&](std::string_view line) {
    ++c["docs_in"];
    RawDocRecord rec = raw_doc_from_jsonl(line);
    LangScore lang{rec.lang_score, 0};
    auto doc = to_document(rec.doc, lang);
    if (!doc) {
      ++c["drop.empty-after-conversion"];
      return;
    }
    std::string doc_line = to_jsonl(*doc);
    out += doc_line;
    out += '\n';
    ++c["docs_out"];
    c["bytes_out"] += doc_line.size() + 1;
    c["tokens_out"] += doc->char_count;
  });
  write_file_atomic(paths.stage_file(paths.docs_dir(), dump, index), out);
  return c;
}

Counts run_filter_unit(const PipelineConfig& config, const RunPaths& paths,
                       const std::string& unit) {
  std::string dump;
  std::uint32_t index = 0;
  if (!parse_unit_name(unit, dump, index)) throw Error("bad work unit: " + unit);

  Counts c;
  std::string out;
  std::string rejected;
  for_each_line(paths.stage_file(paths.docs_dir(), dump, index), [&](std::string_view line) {
    ++c["docs_in"];
    Document doc = document_from_jsonl(line);
    FilterMetrics metrics = compute_metrics(doc, config.filter.ngwords);
    FilterVerdict verdict = evaluate_document(metrics, config.filter);
    if (verdict.passed) {
      std::string doc_line = to_jsonl(doc);
      out += doc_line;
      out += '\n';
      ++c["docs_out"];
      c["bytes_out"] += doc_line.size() + 1;
      c["tokens_out"] += doc.char_count;
    } else {
      ++c["drop." + verdict.failed_rules.front()];
      if (config.quarantine) {
        rejected += quarantine_to_jsonl(doc, verdict);
        rejected += '\n';
      }
    }
  });
  write_file_atomic(paths.stage_file(paths.filtered_dir(), dump, index), out);
  if (config.quarantine) {
    write_file_atomic(paths.stage_file(paths.quarantine_dir(), dump, index), rejected);
  }
  return c;
}

Counts run_signature_unit(const PipelineConfig& config, const RunPaths& paths,
                          const std::string& unit) {
  std::string dump;
  std::uint32_t index = 0;
  if (!parse_unit_name(unit, dump, index)) throw Error("bad work unit: " + unit);

  MinHashParams params = config.minhash_params();
  Counts c;
  std::vector<SignatureRecord> records;
  for_each_line(paths.stage_file(paths.filtered_dir(), dump, index), [&](std::string_view line) {
    Document doc = document_from_jsonl(line);
    std::string canonical = fold_for_shingles(doc.markdown);
    try {
      ShingleSet shingles = shingle_text(canonical, params.ngram);
      records.push_back({doc.id, minhash_signature(shingles, params)});
      ++c["signatures"];
    } catch (const TooShort&) {
      ++c["unshingled"];
    }
  });
  std::filesystem::create_directories(paths.signatures_dir());
  write_signature_file(paths.signature_file(dump, index), params, records);
  return c;
}

namespace {

struct CorpusDoc {
  DocId id;
  std::uint64_t tokens = 0;
  std::uint64_t bytes = 0;
};

}  // namespace

Counts run_cluster_unit(const PipelineConfig& config, const RunPaths& paths,
                        const std::vector<std::string>& filter_units) {
  MinHashParams params = config.minhash_params();
  const bool verify = config.dedup_mode == DedupMode::verify;

  std::vector<DocId> docs;
  std::vector<CorpusDoc> meta;
  std::vector<ShingleSet> shingles;
  std::vector<SignatureRecord> sigs;

  for (const auto& unit : filter_units) {
    std::string dump;
    std::uint32_t index = 0;
    if (!parse_unit_name(unit, dump, index)) throw Error("bad work unit: " + unit);
    for_each_line(paths.stage_file(paths.filtered_dir(), dump, index), [&](std::string_view line) {
      Document doc = document_from_jsonl(line);
      docs.push_back(doc.id);
      meta.push_back({doc.id, doc.char_count, doc.markdown.size()});
      if (verify) {
        std::string canonical = fold_for_shingles(doc.markdown);
        try {
          shingles.push_back(shingle_text(canonical, params.ngram));
        } catch (const TooShort&) {
          shingles.push_back({});  // never a candidate; always survives
        }
      }
    });
    MinHashParams file_params;
    auto file_sigs = read_signature_file(paths.signature_file(dump, index), &file_params);
    if (file_params.params_id() != params.params_id()) {
      throw ParamsMismatch("signature file " + unit + " was built with different parameters");
    }
    for (auto& rec : file_sigs) sigs.push_back(std::move(rec));
  }

  std::unordered_map<DocId, std::uint32_t, DocIdHash> doc_index;
  doc_index.reserve(docs.size());
  for (std::uint32_t i = 0; i < docs.size(); ++i) doc_index[docs[i]] = i;

  CandidateStats cstats;
  auto sig_pairs = build_candidate_pairs(sigs, config.bands, config.rows, config.bucket_warn_cap,
                                         &cstats);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  pairs.reserve(sig_pairs.size());
  for (const auto& [a, b] : sig_pairs) {
    pairs.emplace_back(doc_index.at(sigs[a].id), doc_index.at(sigs[b].id));
  }

  DuplicateClusters clusters = cluster_duplicates(docs, pairs, config.dedup_mode,
                                                  config.dedup_threshold,
                                                  verify ? &shingles : nullptr);

  auto cluster_list = clusters.clusters();
  std::string clusters_out;
  std::string survivors_out;
  std::unordered_set<std::string> survivor_ids;
  for (const auto& cluster : cluster_list) {
    clusters_out += cluster_to_jsonl(cluster);
    clusters_out += '\n';
    survivors_out += cluster.front().str();
    survivors_out += '\n';
    survivor_ids.insert(cluster.front().str());
  }
  std::filesystem::create_directories(paths.dedup_dir());
  write_file_atomic(paths.clusters_file(), clusters_out);
  write_file_atomic(paths.survivors_file(), survivors_out);

  Counts c;
  c["docs_in"] = docs.size();
  c["docs_out"] = cluster_list.size();
  c["drop.duplicate"] = docs.size() - cluster_list.size();
  c["clusters"] = cluster_list.size();
  c["candidate_pairs"] = pairs.size();
  c["oversized_buckets"] = cstats.oversized_buckets;
  for (const auto& m : meta) {
    if (survivor_ids.count(m.id.str())) {
      c["tokens_out"] += m.tokens;
      c["bytes_out"] += m.bytes;
    }
  }
  return c;
}

namespace {

std::vector<DocId> load_survivors(const RunPaths& paths) {
  std::vector<DocId> out;
  for_each_line(paths.survivors_file(), [&](std::string_view line) {
    auto id = DocId::parse(line);
    if (!id) throw IoError("bad survivor id: " + std::string(line));
    out.push_back(*id);
  });
  return out;
}

}  // namespace

ShardPlan build_shard_plan(const PipelineConfig& config, const RunPaths& paths,
                           const std::vector<std::string>& filter_units) {
  auto survivors = load_survivors(paths);
  std::unordered_set<std::string> keep;
  for (const auto& id : survivors) keep.insert(id.str());

  std::vector<DocSize> sizes;
  sizes.reserve(survivors.size());
  for (const auto& unit : filter_units) {
    std::string dump;
    std::uint32_t index = 0;
    if (!parse_unit_name(unit, dump, index)) throw Error("bad work unit: " + unit);
    for_each_line(paths.stage_file(paths.filtered_dir(), dump, index), [&](std::string_view line) {
      Document doc = document_from_jsonl(line);
      if (keep.count(doc.id.str())) {
        sizes.push_back({doc.id, doc.markdown.size()});
      }
    });
  }
  return plan_shards(sizes, config.shard_target_bytes);
}

std::map<DocId, Document> load_survivor_store(const RunPaths& paths,
                                              const std::vector<std::string>& filter_units) {
  std::unordered_set<std::string> keep;
  for_each_line(paths.survivors_file(), [&](std::string_view line) {
    keep.insert(std::string(line));
  });

  std::map<DocId, Document> store;
  for (const auto& unit : filter_units) {
    std::string dump;
    std::uint32_t index = 0;
    if (!parse_unit_name(unit, dump, index)) throw Error("bad work unit: " + unit);
    for_each_line(paths.stage_file(paths.filtered_dir(), dump, index), [&](std::string_view line) {
      Document doc = document_from_jsonl(line);
      if (keep.count(doc.id.str())) store[doc.id] = std::move(doc);
    });
  }
  return store;
}

Counts run_shard_unit(const PipelineConfig& config, const RunPaths& paths, const ShardPlan& plan,
                      std::uint32_t shard_id, const std::map<DocId, Document>& store) {
  (void)config;
  const ShardPlanEntry& entry = plan.shards.at(shard_id);
  std::filesystem::create_directories(paths.shards_dir());
  ShardManifest manifest = write_shard(entry, paths.shards_dir(), [&](const DocId& id) {
    auto it = store.find(id);
    return it == store.end() ? std::optional<Document>() : std::optional<Document>(it->second);
  });

  Counts c;
  c["docs_in"] = entry.docs.size();
  c["docs_out"] = entry.docs.size();
  c["shards"] = 1;
  c["bytes_out"] = manifest.byte_size;
  c["tokens_out"] = 0;
  for (const auto& id : entry.docs) c["tokens_out"] += store.at(id).char_count;
  std::error_code ec;
  c["file_bytes"] = std::filesystem::file_size(paths.shards_dir() / manifest.file_name, ec);
  return c;
}

void finalize_shard_stage(const RunPaths& paths, const ShardPlan& plan) {
  std::vector<ShardManifest> manifests;
  for (const auto& entry : plan.shards) {
    ShardManifest m;
    m.shard_id = entry.shard_id;
    m.file_name = shard_file_name(entry.shard_id);
    m.doc_count = entry.docs.size();
    m.byte_size = entry.byte_size;
    m.sha256 = sha256_file_hex(paths.shards_dir() / m.file_name);
    manifests.push_back(std::move(m));
  }
  std::filesystem::create_directories(paths.shards_dir());
  write_file_atomic(paths.shard_manifest_file(), shard_manifests_to_json(manifests));
}

namespace {

struct LoadedBucket {
  BucketStats stats;
  BucketDocs docs;
  bool has_docs = false;
};

LoadedBucket load_bucket(const MixBucketSource& src, const PipelineConfig& config) {
  LoadedBucket out;
  out.stats.name = src.name;
  out.docs.name = src.name;
  if (src.tokens) {
    out.stats.available_tokens = *src.tokens;
    return out;
  }
  std::filesystem::path run_dir = src.self ? config.output : *src.run_dir;
  RunPaths bucket_paths{run_dir};
  if (!std::filesystem::exists(bucket_paths.shard_manifest_file())) {
    throw MissingInput("bucket '" + src.name + "' has no shard manifest under " + run_dir.string());
  }
  auto manifests = shard_manifests_from_json(read_file(bucket_paths.shard_manifest_file()));
  for (const auto& m : manifests) {
    std::string payload = gzip_decompress(read_file(bucket_paths.shards_dir() / m.file_name));
    std::size_t pos = 0;
    while (pos < payload.size()) {
      auto nl = payload.find('\n', pos);
      std::string_view line = std::string_view(payload).substr(
          pos, nl == std::string::npos ? payload.size() - pos : nl - pos);
      if (!line.empty()) {
        Document doc = document_from_jsonl(line);
        out.stats.available_tokens += doc.char_count;
        ++out.stats.doc_count;
        out.docs.docs.emplace_back(doc.id, doc.char_count);
      }
      if (nl == std::string::npos) break;
      pos = nl + 1;
    }
  }
  out.has_docs = true;
  return out;
}

}  // namespace

Counts run_mix_unit(const PipelineConfig& config, const RunPaths& paths) {
  if (!config.mix) throw ConfigError("mix.budget_tokens", "mix stage requires a mix spec");

  std::vector<BucketStats> stats;
  std::vector<BucketDocs> docs;
  for (const auto& src : config.mix_buckets) {
    LoadedBucket bucket = load_bucket(src, config);
    stats.push_back(std::move(bucket.stats));
    if (bucket.has_docs) docs.push_back(std::move(bucket.docs));
  }

  MixPlan plan = plan_mixture(stats, *config.mix);

  ordered_json j;
  j["budget_tokens"] = plan.budget_tokens;
  j["feasible"] = plan.feasible;
  ordered_json draws = ordered_json::array();
  for (const auto& d : plan.draws) {
    ordered_json dj;
    dj["bucket"] = d.bucket;
    dj["tokens_drawn"] = d.tokens_drawn;
    dj["epochs_used"] = d.epochs_used;
    dj["shortfall"] = d.shortfall;
    draws.push_back(std::move(dj));
  }
  j["draws"] = std::move(draws);
  std::filesystem::create_directories(paths.mix_dir());
  write_file_atomic(paths.mix_plan_file(), j.dump(2) + "\n");

  Counts c;
  c["buckets"] = stats.size();
  c["feasible"] = plan.feasible ? 1 : 0;
  for (const auto& d : plan.draws) c["draw." + d.bucket] = d.tokens_drawn;

  if (config.mix_realize) {
    if (!plan.feasible) {
      throw Error("mix plan is infeasible; cannot realize a sample");
    }
    auto sample = realize_mixture(plan, docs, config.stage_seed("mix"));
    std::string out;
    for (const auto& draw : sample) {
      ordered_json line;
      line["bucket"] = draw.bucket;
      line["doc_id"] = draw.doc.str();
      out += line.dump();
      out += '\n';
    }
    write_file_atomic(paths.mix_sample_file(), out);
    c["realized_docs"] = sample.size();
  }
  return c;
}

}  // namespace corpusforge::detail
