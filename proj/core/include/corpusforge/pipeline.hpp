#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "corpusforge/kv_config.hpp"
#include "corpusforge/minhash.hpp"
#include "corpusforge/mixture.hpp"
#include "corpusforge/quality.hpp"

namespace corpusforge {

enum class Stage { ingest, convert, filter, dedup, shard, mix, report };

std::optional<Stage> stage_from_string(std::string_view name);
std::string_view to_string(Stage s);

/// Where a mix bucket's contents come from: a finished run directory (shard
/// manifests) or inline token stats (planning only).
struct MixBucketSource {
  std::string name;
  std::optional<std::uint64_t> tokens;
  std::optional<std::filesystem::path> run_dir;
  bool self = false;  // this run's own shard output
};

struct PipelineConfig {
  std::uint64_t seed = 42;

  // ingest
  double tau_japanese = 0.30;
  std::vector<std::string> charset_fallbacks;
  std::string dump_label;  // used when archives sit directly in the input dir

  // filter
  FilterConfig filter;
  bool quarantine = true;

  // dedup
  std::uint16_t minhash_k = 128;
  std::uint16_t shingle_n = 5;
  unsigned bands = 16;
  unsigned rows = 8;
  DedupMode dedup_mode = DedupMode::verify;
  double dedup_threshold = 0.8;
  std::size_t bucket_warn_cap = 5000;

  // shard
  std::uint64_t shard_target_bytes = 256ull << 20;

  // mix
  std::optional<MixSpec> mix;
  std::vector<MixBucketSource> mix_buckets;
  bool mix_realize = false;

  std::filesystem::path input;
  std::filesystem::path output;

  std::string config_hash;  // sha256 of the canonicalized key=value text

  static PipelineConfig load(const std::filesystem::path& path);
  static PipelineConfig from_kv(const KvConfig& kv, const std::filesystem::path& base_dir);

  /// MinHash parameters with the stage seed derived from the root seed.
  MinHashParams minhash_params() const;
  std::uint64_t stage_seed(std::string_view stage_name) const;
};

struct StageRecord {
  std::vector<std::string> units;  // full unit list, discovery order
  std::set<std::string> done;
  std::map<std::string, std::uint64_t> counts;
  double wall_seconds = 0.0;
  bool finalized = false;
};

struct RunManifest {
  std::string run_id;
  std::string config_hash;
  std::map<std::string, StageRecord> stages;

  bool stage_complete(Stage s) const;

  static RunManifest load(const std::filesystem::path& path);
  /// Atomic write: temp file in the same directory, then rename.
  void save(const std::filesystem::path& path) const;
};

struct StageOptions {
  unsigned workers = 1;
  std::optional<std::string> resume_run_id;
  std::size_t max_units = SIZE_MAX;  // stop after this many units (incremental runs)
};

struct StageOutcome {
  Stage stage = Stage::ingest;
  std::uint64_t units_run = 0;
  std::uint64_t units_skipped = 0;
  bool complete = false;
  std::map<std::string, std::uint64_t> counts;  // stage totals after this invocation
};

/// Scratch directory: $CORPUSFORGE_TMPDIR when set, the system temp dir
/// otherwise.
std::filesystem::path scratch_dir();

/// Drives the five pipeline stages plus mixing over one run directory.
/// Work units (one archive, one shard) are independent; results do not
/// depend on the worker count.
class Pipeline {
 public:
  explicit Pipeline(PipelineConfig config);

  StageOutcome run_stage(Stage stage, const StageOptions& options = {});

  const PipelineConfig& config() const { return config_; }
  std::filesystem::path manifest_path() const;
  RunManifest load_manifest() const;

 private:
  PipelineConfig config_;
};

struct FunnelRow {
  std::string stage;
  std::uint64_t docs_in = 0;
  std::uint64_t docs_out = 0;
  std::uint64_t bytes_out = 0;
  std::uint64_t tokens_out = 0;
  std::map<std::string, std::uint64_t> drops;
};

struct RunReport {
  std::string run_id;
  std::vector<FunnelRow> funnel;
  std::map<std::uint64_t, std::uint64_t> cluster_size_histogram;
  std::map<std::string, std::uint64_t> bucket_tokens;
  double dedup_rate = 0.0;  // duplicates removed / docs in
};

/// Builds the report from a run directory's manifest and stage outputs.
RunReport report_stats(const std::filesystem::path& run_dir);

std::string render_report_text(const RunReport& report);
std::string render_report_csv(const RunReport& report);

}  // namespace corpusforge
