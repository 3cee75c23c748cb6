#include "corpusforge/pipeline.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "corpusforge/errors.hpp"
#include "corpusforge/hashing.hpp"
#include "stage_impl.hpp"

namespace corpusforge {

using ordered_json = nlohmann::ordered_json;
using detail::Counts;
using detail::RunPaths;

std::optional<Stage> stage_from_string(std::string_view name) {
  if (name == "ingest") return Stage::ingest;
  if (name == "convert") return Stage::convert;
  if (name == "filter") return Stage::filter;
  if (name == "dedup") return Stage::dedup;
  if (name == "shard") return Stage::shard;
  if (name == "mix") return Stage::mix;
  if (name == "report") return Stage::report;
  return std::nullopt;
}

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::ingest: return "ingest";
    case Stage::convert: return "convert";
    case Stage::filter: return "filter";
    case Stage::dedup: return "dedup";
    case Stage::shard: return "shard";
    case Stage::mix: return "mix";
    case Stage::report: return "report";
  }
  return "ingest";
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  KvConfig kv = KvConfig::load(path);
  return from_kv(kv, path.has_parent_path() ? path.parent_path() : std::filesystem::path("."));
}

PipelineConfig PipelineConfig::from_kv(const KvConfig& kv, const std::filesystem::path& base_dir) {
  PipelineConfig c;
  auto resolve = [&](const std::string& value) {
    std::filesystem::path p = value;
    return p.is_relative() ? base_dir / p : p;
  };

  c.seed = kv.get_uint("seed", c.seed);

  c.tau_japanese = kv.get_double("ingest.tau_japanese", c.tau_japanese);
  if (c.tau_japanese < 0.0 || c.tau_japanese > 1.0) {
    throw ConfigError("ingest.tau_japanese", "must be in [0,1]");
  }
  c.charset_fallbacks = kv.get_list("ingest.charset_fallbacks", default_charset_fallbacks());
  c.dump_label = kv.get_string("ingest.dump_label", "");

  c.filter = FilterConfig::from_kv(kv, "filter.", base_dir);
  c.quarantine = kv.get_bool("filter.quarantine", c.quarantine);

  c.minhash_k = static_cast<std::uint16_t>(kv.get_uint("dedup.k", c.minhash_k));
  c.shingle_n = static_cast<std::uint16_t>(kv.get_uint("dedup.ngram", c.shingle_n));
  c.bands = static_cast<unsigned>(kv.get_uint("dedup.bands", c.bands));
  c.rows = static_cast<unsigned>(kv.get_uint("dedup.rows", c.rows));
  if (c.minhash_k == 0) throw ConfigError("dedup.k", "must be >= 1");
  if (c.shingle_n < 2) throw ConfigError("dedup.ngram", "must be >= 2");
  if (c.bands == 0 || c.rows == 0 || c.bands * c.rows != c.minhash_k) {
    throw ConfigError("dedup.bands", "bands*rows must equal dedup.k");
  }
  std::string mode = kv.get_string("dedup.mode", "verify");
  if (mode == "verify") {
    c.dedup_mode = DedupMode::verify;
  } else if (mode == "approx") {
    c.dedup_mode = DedupMode::approx;
  } else {
    throw ConfigError("dedup.mode", "must be 'verify' or 'approx'");
  }
  c.dedup_threshold = kv.get_double("dedup.threshold", c.dedup_threshold);
  if (c.dedup_threshold <= 0.0 || c.dedup_threshold > 1.0) {
    throw ConfigError("dedup.threshold", "must be in (0,1]");
  }
  c.bucket_warn_cap = kv.get_uint("dedup.bucket_cap", c.bucket_warn_cap);

  c.shard_target_bytes = kv.get_uint("shard.target_bytes", c.shard_target_bytes);
  if (c.shard_target_bytes == 0) throw ConfigError("shard.target_bytes", "must be positive");

  // Mixing is configured when a budget is present.
  if (kv.has("mix.budget_tokens")) {
    MixSpec spec;
    spec.budget_tokens = kv.get_uint("mix.budget_tokens", 0);
    spec.max_epochs = kv.get_double("mix.max_epochs", 1.0);
    if (spec.max_epochs < 1.0) throw ConfigError("mix.max_epochs", "must be >= 1");
    for (const auto& bucket : kv.keys_with_prefix("mix.target.")) {
      MixTarget t;
      t.bucket = bucket;
      t.ratio = kv.get_double("mix.target." + bucket, 0.0);
      spec.targets.push_back(std::move(t));
    }
    if (spec.targets.empty()) throw ConfigError("mix.target", "no mix targets configured");
    c.mix = std::move(spec);
  }
  c.mix_realize = kv.get_bool("mix.realize", c.mix_realize);

  // Bucket sources; suffixes are "<name>.tokens", "<name>.run", "<name>.self".
  std::set<std::string> bucket_names;
  for (const auto& suffix : kv.keys_with_prefix("mix.bucket.")) {
    auto dot = suffix.rfind('.');
    if (dot == std::string::npos) throw ConfigError("mix.bucket." + suffix, "expected <name>.<field>");
    bucket_names.insert(suffix.substr(0, dot));
  }
  for (const auto& name : bucket_names) {
    MixBucketSource src;
    src.name = name;
    std::string prefix = "mix.bucket." + name + ".";
    if (kv.has(prefix + "tokens")) src.tokens = kv.get_uint(prefix + "tokens", 0);
    if (auto run = kv.get(prefix + "run")) src.run_dir = resolve(*run);
    src.self = kv.get_bool(prefix + "self", false);
    int sources = int(src.tokens.has_value()) + int(src.run_dir.has_value()) + int(src.self);
    if (sources != 1) {
      throw ConfigError("mix.bucket." + name, "exactly one of tokens/run/self required");
    }
    c.mix_buckets.push_back(std::move(src));
  }
  if (c.mix_realize) {
    if (!c.mix) throw ConfigError("mix.realize", "requires a mix spec");
    for (const auto& target : c.mix->targets) {
      for (const auto& src : c.mix_buckets) {
        if (src.name == target.bucket && src.tokens.has_value()) {
          throw ConfigError("mix.bucket." + src.name,
                            "realize needs document sources, not inline token counts");
        }
      }
    }
  }

  std::string input_raw = kv.get_string("pipeline.input", "");
  if (!input_raw.empty()) c.input = resolve(input_raw);
  std::string output_raw = kv.get_string("pipeline.output", "");
  if (output_raw.empty()) {
    throw ConfigError("pipeline.output", "output directory is required");
  }
  c.output = resolve(output_raw);

  kv.reject_unknown_keys();
  c.config_hash = sha256_hex(kv.canonical_text());
  return c;
}

MinHashParams PipelineConfig::minhash_params() const {
  MinHashParams p;
  p.k = minhash_k;
  p.ngram = shingle_n;
  p.seed = stage_seed("dedup");
  return p;
}

std::uint64_t PipelineConfig::stage_seed(std::string_view stage_name) const {
  return hash_combine64(seed, hash_bytes64(stage_name));
}

bool RunManifest::stage_complete(Stage s) const {
  auto it = stages.find(std::string(to_string(s)));
  return it != stages.end() && it->second.finalized;
}

RunManifest RunManifest::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInput("no manifest at " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  ordered_json j = ordered_json::parse(ss.str(), nullptr, false);
  if (j.is_discarded()) throw IoError("manifest is not valid JSON: " + path.string());

  RunManifest m;
  m.run_id = j.at("run_id").get<std::string>();
  m.config_hash = j.at("config_hash").get<std::string>();
  for (const auto& [name, sj] : j.at("stages").items()) {
    StageRecord rec;
    for (const auto& u : sj.at("units")) rec.units.push_back(u.get<std::string>());
    for (const auto& u : sj.at("done")) rec.done.insert(u.get<std::string>());
    for (const auto& [k, v] : sj.at("counts").items()) rec.counts[k] = v.get<std::uint64_t>();
    rec.wall_seconds = sj.at("wall_seconds").get<double>();
    rec.finalized = sj.at("finalized").get<bool>();
    m.stages[name] = std::move(rec);
  }
  return m;
}

void RunManifest::save(const std::filesystem::path& path) const {
  ordered_json j;
  j["run_id"] = run_id;
  j["config_hash"] = config_hash;
  ordered_json stages_json = ordered_json::object();
  for (const auto& [name, rec] : stages) {
    ordered_json sj;
    sj["units"] = rec.units;
    sj["done"] = std::vector<std::string>(rec.done.begin(), rec.done.end());
    ordered_json counts = ordered_json::object();
    for (const auto& [k, v] : rec.counts) counts[k] = v;
    sj["counts"] = std::move(counts);
    sj["wall_seconds"] = rec.wall_seconds;
    sj["finalized"] = rec.finalized;
    stages_json[name] = std::move(sj);
  }
  j["stages"] = std::move(stages_json);
  detail::write_file_atomic(path, j.dump(2) + "\n");
}

std::filesystem::path scratch_dir() {
  if (const char* env = std::getenv("CORPUSFORGE_TMPDIR"); env && *env) {
    return std::filesystem::path(env);
  }
  return std::filesystem::temp_directory_path();
}

Pipeline::Pipeline(PipelineConfig config) : config_(std::move(config)) {}

std::filesystem::path Pipeline::manifest_path() const {
  return RunPaths{config_.output}.manifest();
}

RunManifest Pipeline::load_manifest() const {
  return RunManifest::load(manifest_path());
}

namespace {

std::string generate_run_id() {
  auto now = std::chrono::system_clock::now().time_since_epoch();
  auto nanos = std::chrono::duration_cast<std::chrono::nanoseconds>(now).count();
  SplitMix64 rng(static_cast<std::uint64_t>(nanos));
  char buf[32];
  std::snprintf(buf, sizeof(buf), "run-%016llx", static_cast<unsigned long long>(rng.next()));
  return buf;
}

std::optional<Stage> upstream_of(Stage s) {
  switch (s) {
    case Stage::ingest: return std::nullopt;
    case Stage::convert: return Stage::ingest;
    case Stage::filter: return Stage::convert;
    case Stage::dedup: return Stage::filter;
    case Stage::shard: return Stage::dedup;
    case Stage::mix: return std::nullopt;  // checked against bucket sources
    case Stage::report: return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace

StageOutcome Pipeline::run_stage(Stage stage, const StageOptions& options) {
  RunPaths paths{config_.output};
  std::filesystem::create_directories(paths.root);

  // Load or start the run manifest; config drift is a hard error.
  RunManifest manifest;
  bool have_manifest = std::filesystem::exists(paths.manifest());
  if (have_manifest) {
    manifest = RunManifest::load(paths.manifest());
    if (manifest.config_hash != config_.config_hash) {
      throw ConfigMismatch("run was created with a different config (hash " +
                           manifest.config_hash + " != " + config_.config_hash + ")");
    }
    if (options.resume_run_id && *options.resume_run_id != manifest.run_id) {
      throw ConfigMismatch("manifest belongs to run " + manifest.run_id + ", not " +
                           *options.resume_run_id);
    }
  } else {
    if (options.resume_run_id) {
      throw MissingInput("no manifest to resume at " + paths.manifest().string());
    }
    manifest.run_id = generate_run_id();
    manifest.config_hash = config_.config_hash;
  }

  if (stage == Stage::report) {
    RunReport report = report_stats(paths.root);
    detail::write_file_atomic(paths.report_text_file(), render_report_text(report));
    detail::write_file_atomic(paths.report_csv_file(), render_report_csv(report));
    StageOutcome outcome;
    outcome.stage = stage;
    outcome.units_run = 1;
    outcome.complete = true;
    return outcome;
  }

  if (auto upstream = upstream_of(stage)) {
    if (!manifest.stage_complete(*upstream)) {
      throw MissingInput(std::string(to_string(*upstream)) + " stage has not completed");
    }
  }
  if (stage == Stage::mix) {
    bool needs_self = false;
    for (const auto& src : config_.mix_buckets) needs_self |= src.self;
    if (needs_self && !manifest.stage_complete(Stage::shard)) {
      throw MissingInput("shard stage has not completed (self bucket)");
    }
    if (!config_.mix) throw ConfigError("mix.budget_tokens", "mix stage requires a mix spec");
  }

  // Work-unit discovery. Unit lists are pinned in the manifest on first
  // contact so a changed input set cannot silently skew a resumed run.
  std::vector<std::string> units;
  std::vector<detail::ArchiveRef> archives;
  ShardPlan shard_plan;
  std::vector<std::string> filter_units;
  switch (stage) {
    case Stage::ingest: {
      archives = detail::discover_archives(config_);
      for (const auto& a : archives) units.push_back(detail::unit_name(a.dump, a.file_index));
      break;
    }
    case Stage::convert:
      units = manifest.stages.at("ingest").units;
      break;
    case Stage::filter:
      units = manifest.stages.at("convert").units;
      break;
    case Stage::dedup: {
      filter_units = manifest.stages.at("filter").units;
      for (const auto& u : filter_units) units.push_back("sig:" + u);
      units.push_back("cluster");
      break;
    }
    case Stage::shard: {
      filter_units = manifest.stages.at("filter").units;
      shard_plan = detail::build_shard_plan(config_, paths, filter_units);
      for (const auto& entry : shard_plan.shards) {
        units.push_back(shard_file_name(entry.shard_id));
      }
      break;
    }
    case Stage::mix:
      units.push_back("mix");
      break;
    case Stage::report:
      break;  // handled above
  }

  const std::string stage_name(to_string(stage));
  auto& record = manifest.stages[stage_name];
  if (record.units.empty() && record.done.empty()) {
    record.units = units;
  } else if (record.units != units) {
    throw ConfigMismatch("work-unit set changed for stage " + stage_name +
                         " (inputs modified since the run started?)");
  }

  StageOutcome outcome;
  outcome.stage = stage;
  if (record.finalized) {
    outcome.units_skipped = record.units.size();
    outcome.complete = true;
    outcome.counts = record.counts;
    return outcome;
  }

  std::vector<std::string> pending;
  for (const auto& u : record.units) {
    if (!record.done.count(u)) pending.push_back(u);
  }
  outcome.units_skipped = record.units.size() - pending.size();
  if (pending.size() > options.max_units) pending.resize(options.max_units);

  // The dedup cluster unit is a global reduce: it only runs once every
  // signature unit is done, and never concurrently with them.
  bool defer_cluster = false;
  if (stage == Stage::dedup) {
    auto it = std::find(pending.begin(), pending.end(), "cluster");
    if (it != pending.end()) {
      if (pending.size() > 1) {
        pending.erase(it);
        defer_cluster = true;
      }
    }
  }

  auto t0 = std::chrono::steady_clock::now();

  // Preloaded shared state for shard units.
  std::map<DocId, Document> shard_store;
  if (stage == Stage::shard && !pending.empty()) {
    shard_store = detail::load_survivor_store(paths, filter_units);
  }
  std::map<std::string, detail::ArchiveRef> archive_by_unit;
  for (const auto& a : archives) archive_by_unit[detail::unit_name(a.dump, a.file_index)] = a;

  auto run_unit = [&](const std::string& unit) -> Counts {
    switch (stage) {
      case Stage::ingest:
        return detail::run_ingest_unit(config_, paths, archive_by_unit.at(unit));
      case Stage::convert:
        return detail::run_convert_unit(config_, paths, unit);
      case Stage::filter:
        return detail::run_filter_unit(config_, paths, unit);
      case Stage::dedup:
        if (unit == "cluster") return detail::run_cluster_unit(config_, paths, filter_units);
        return detail::run_signature_unit(config_, paths, unit.substr(4));
      case Stage::shard: {
        std::uint32_t shard_id = 0;
        for (const auto& entry : shard_plan.shards) {
          if (shard_file_name(entry.shard_id) == unit) {
            shard_id = entry.shard_id;
            break;
          }
        }
        return detail::run_shard_unit(config_, paths, shard_plan, shard_id, shard_store);
      }
      case Stage::mix:
        return detail::run_mix_unit(config_, paths);
      case Stage::report:
        return {};
    }
    return {};
  };

  std::mutex mu;
  std::atomic<std::size_t> next_unit{0};
  std::exception_ptr first_error;
  unsigned workers = std::max(1u, options.workers);
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(pending.size(), 1)));

  auto worker_loop = [&]() {
    while (true) {
      std::size_t i = next_unit.fetch_add(1);
      if (i >= pending.size()) return;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (first_error) return;
      }
      try {
        Counts counts = run_unit(pending[i]);
        std::lock_guard<std::mutex> lock(mu);
        for (const auto& [k, v] : counts) record.counts[k] += v;
        record.done.insert(pending[i]);
        ++outcome.units_run;
        manifest.save(paths.manifest());
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };

  if (workers == 1 || pending.size() <= 1) {
    worker_loop();
  } else {
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(worker_loop);
    for (auto& t : threads) t.join();
  }

  record.wall_seconds +=
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  manifest.save(paths.manifest());
  if (first_error) std::rethrow_exception(first_error);

  // Run a deferred cluster unit once signatures are all in.
  if (defer_cluster && outcome.units_run + outcome.units_skipped + 1 == record.units.size() &&
      record.done.size() + 1 == record.units.size()) {
    auto t1 = std::chrono::steady_clock::now();
    Counts counts = detail::run_cluster_unit(config_, paths, filter_units);
    for (const auto& [k, v] : counts) record.counts[k] += v;
    record.done.insert("cluster");
    ++outcome.units_run;
    record.wall_seconds +=
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count();
    manifest.save(paths.manifest());
  }

  if (record.done.size() == record.units.size()) {
    if (stage == Stage::shard) detail::finalize_shard_stage(paths, shard_plan);
    record.finalized = true;
    manifest.save(paths.manifest());
  }

  outcome.complete = record.finalized;
  outcome.counts = record.counts;
  return outcome;
}

}  // namespace corpusforge
