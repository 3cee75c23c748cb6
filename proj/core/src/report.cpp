#include <json.hpp>

#include <cstdio>
#include <sstream>

#include "corpusforge/errors.hpp"
#include "corpusforge/jsonl.hpp"
#include "corpusforge/pipeline.hpp"
#include "stage_impl.hpp"

namespace corpusforge {

using detail::RunPaths;
using ordered_json = nlohmann::ordered_json;

namespace {

std::uint64_t count_of(const StageRecord& rec, const std::string& key) {
  auto it = rec.counts.find(key);
  return it == rec.counts.end() ? 0 : it->second;
}

FunnelRow funnel_row(const std::string& stage, const StageRecord& rec) {
  FunnelRow row;
  row.stage = stage;
  row.docs_in = count_of(rec, stage == "ingest" ? "yielded" : "docs_in");
  row.docs_out = count_of(rec, "docs_out");
  row.bytes_out = count_of(rec, "bytes_out");
  row.tokens_out = count_of(rec, "tokens_out");
  for (const auto& [k, v] : rec.counts) {
    if (k.starts_with("drop.")) row.drops[k.substr(5)] = v;
  }
  return row;
}

}  // namespace

RunReport report_stats(const std::filesystem::path& run_dir) {
  RunPaths paths{run_dir};
  RunManifest manifest = RunManifest::load(paths.manifest());

  RunReport report;
  report.run_id = manifest.run_id;

  static const char* kFunnelStages[] = {"ingest", "convert", "filter", "dedup", "shard"};
  for (const char* stage : kFunnelStages) {
    auto it = manifest.stages.find(stage);
    if (it != manifest.stages.end()) report.funnel.push_back(funnel_row(stage, it->second));
  }

  if (auto it = manifest.stages.find("dedup"); it != manifest.stages.end()) {
    std::uint64_t docs_in = count_of(it->second, "docs_in");
    std::uint64_t dupes = count_of(it->second, "drop.duplicate");
    report.dedup_rate = docs_in == 0 ? 0.0 : double(dupes) / double(docs_in);
    if (std::filesystem::exists(paths.clusters_file())) {
      detail::for_each_line(paths.clusters_file(), [&](std::string_view line) {
        auto members = cluster_from_jsonl(line);
        ++report.cluster_size_histogram[members.size()];
      });
    }
  }

  if (std::filesystem::exists(paths.mix_plan_file())) {
    ordered_json j = ordered_json::parse(detail::read_file(paths.mix_plan_file()), nullptr, false);
    if (!j.is_discarded()) {
      for (const auto& d : j.at("draws")) {
        report.bucket_tokens[d.at("bucket").get<std::string>()] =
            d.at("tokens_drawn").get<std::uint64_t>();
      }
    }
  }
  return report;
}

std::string render_report_text(const RunReport& report) {
  std::ostringstream out;
  out << "run " << report.run_id << "\n\n";
  out << "stage      docs_in    docs_out   tokens_out    bytes_out  drops\n";
  for (const auto& row : report.funnel) {
    char line[160];
    std::snprintf(line, sizeof(line), "%-9s %9llu %11llu %12llu %12llu  ",
                  row.stage.c_str(), static_cast<unsigned long long>(row.docs_in),
                  static_cast<unsigned long long>(row.docs_out),
                  static_cast<unsigned long long>(row.tokens_out),
                  static_cast<unsigned long long>(row.bytes_out));
    out << line;
    bool first = true;
    for (const auto& [reason, n] : row.drops) {
      if (!first) out << ", ";
      out << reason << "=" << n;
      first = false;
    }
    out << "\n";
  }
  out << "\ndedup rate: " << report.dedup_rate << "\n";
  if (!report.cluster_size_histogram.empty()) {
    out << "cluster sizes:\n";
    for (const auto& [size, n] : report.cluster_size_histogram) {
      out << "  " << size << " -> " << n << "\n";
    }
  }
  if (!report.bucket_tokens.empty()) {
    out << "mix draws:\n";
    for (const auto& [bucket, tokens] : report.bucket_tokens) {
      out << "  " << bucket << " -> " << tokens << "\n";
    }
  }
  return out.str();
}

std::string render_report_csv(const RunReport& report) {
  std::ostringstream out;
  out << "section,key,metric,value\n";
  for (const auto& row : report.funnel) {
    out << "funnel," << row.stage << ",docs_in," << row.docs_in << "\n";
    out << "funnel," << row.stage << ",docs_out," << row.docs_out << "\n";
    out << "funnel," << row.stage << ",tokens_out," << row.tokens_out << "\n";
    out << "funnel," << row.stage << ",bytes_out," << row.bytes_out << "\n";
    for (const auto& [reason, n] : row.drops) {
      out << "funnel," << row.stage << ",drop." << reason << "," << n << "\n";
    }
  }
  out << "dedup,all,rate," << report.dedup_rate << "\n";
  for (const auto& [size, n] : report.cluster_size_histogram) {
    out << "clusters," << size << ",count," << n << "\n";
  }
  for (const auto& [bucket, tokens] : report.bucket_tokens) {
    out << "mix," << bucket << ",tokens_drawn," << tokens << "\n";
  }
  return out.str();
}

}  // namespace corpusforge
