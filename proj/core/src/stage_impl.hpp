#pragma once

// Internal stage machinery shared by pipeline.cpp / stages.cpp / report.cpp.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "corpusforge/pipeline.hpp"
#include "corpusforge/shard.hpp"

namespace corpusforge::detail {

using Counts = std::map<std::string, std::uint64_t>;

struct ArchiveRef {
  std::string dump;
  std::uint32_t file_index = 0;
  std::filesystem::path path;
};

struct RunPaths {
  std::filesystem::path root;

  std::filesystem::path manifest() const { return root / "manifest.json"; }
  std::filesystem::path raw_dir() const { return root / "raw"; }
  std::filesystem::path docs_dir() const { return root / "docs"; }
  std::filesystem::path filtered_dir() const { return root / "filtered"; }
  std::filesystem::path quarantine_dir() const { return root / "quarantine"; }
  std::filesystem::path dedup_dir() const { return root / "dedup"; }
  std::filesystem::path signatures_dir() const { return root / "dedup" / "signatures"; }
  std::filesystem::path clusters_file() const { return root / "dedup" / "clusters.jsonl"; }
  std::filesystem::path survivors_file() const { return root / "dedup" / "survivors.txt"; }
  std::filesystem::path shards_dir() const { return root / "shards"; }
  std::filesystem::path shard_manifest_file() const { return root / "shards" / "manifest.json"; }
  std::filesystem::path mix_dir() const { return root / "mix"; }
  std::filesystem::path mix_plan_file() const { return root / "mix" / "plan.json"; }
  std::filesystem::path mix_sample_file() const { return root / "mix" / "sample.jsonl"; }
  std::filesystem::path report_text_file() const { return root / "report.txt"; }
  std::filesystem::path report_csv_file() const { return root / "report.csv"; }

  std::filesystem::path stage_file(const std::filesystem::path& dir, const std::string& dump,
                                   std::uint32_t file_index) const;
  std::filesystem::path signature_file(const std::string& dump, std::uint32_t file_index) const;
};

/// "dump/00003" — archive work-unit name; sorts in (dump, index) order.
std::string unit_name(const std::string& dump, std::uint32_t file_index);
bool parse_unit_name(const std::string& unit, std::string& dump, std::uint32_t& file_index);

std::vector<ArchiveRef> discover_archives(const PipelineConfig& config);

/// Atomic file write: temp in the same directory, then rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

Counts run_ingest_unit(const PipelineConfig& config, const RunPaths& paths, const ArchiveRef& archive);
Counts run_convert_unit(const PipelineConfig& config, const RunPaths& paths, const std::string& unit);
Counts run_filter_unit(const PipelineConfig& config, const RunPaths& paths, const std::string& unit);
Counts run_signature_unit(const PipelineConfig& config, const RunPaths& paths, const std::string& unit);
Counts run_cluster_unit(const PipelineConfig& config, const RunPaths& paths,
                        const std::vector<std::string>& filter_units);
Counts run_mix_unit(const PipelineConfig& config, const RunPaths& paths);

/// Order-preserving plan over the surviving documents; deterministic given
/// the run directory contents.
ShardPlan build_shard_plan(const PipelineConfig& config, const RunPaths& paths,
                           const std::vector<std::string>& filter_units);
Counts run_shard_unit(const PipelineConfig& config, const RunPaths& paths, const ShardPlan& plan,
                      std::uint32_t shard_id,
                      const std::map<DocId, Document>& store);
std::map<DocId, Document> load_survivor_store(const RunPaths& paths,
                                              const std::vector<std::string>& filter_units);

void finalize_shard_stage(const RunPaths& paths, const ShardPlan& plan);

/// Reads every line of a JSONL file, invoking fn(line).
template <typename Fn>
void for_each_line(const std::filesystem::path& path, Fn&& fn) {
  std::string content = read_file(path);
  std::size_t pos = 0;
  while (pos < content.size()) {
    auto nl = content.find('\n', pos);
    std::string_view line = std::string_view(content).substr(
        pos, nl == std::string::npos ? content.size() - pos : nl - pos);
    if (!line.empty()) fn(line);
    if (nl == std::string::npos) break;
    pos = nl + 1;
  }
}

}  // namespace corpusforge::detail
