#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "corpusforge/errors.hpp"
#include "corpusforge/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitMissingInput = 3;
constexpr int kExitData = 4;

struct CommonArgs {
  std::string config_path;
  unsigned workers = 1;
  std::string resume;
  std::string dump_label;
  std::string input;
  std::string output;
  std::size_t max_units = 0;  // 0 = unlimited
};

corpusforge::PipelineConfig load_config(const CommonArgs& args) {
  namespace fs = std::filesystem;
  corpusforge::KvConfig kv;
  fs::path base = ".";
  if (!args.config_path.empty()) {
    kv = corpusforge::KvConfig::load(args.config_path);
    base = fs::path(args.config_path).parent_path();
    if (base.empty()) base = ".";
  }
  if (!args.input.empty()) kv.set("pipeline.input", args.input);
  if (!args.output.empty()) kv.set("pipeline.output", args.output);
  if (!args.dump_label.empty()) kv.set("ingest.dump_label", args.dump_label);
  return corpusforge::PipelineConfig::from_kv(kv, base);
}

void print_outcome(const corpusforge::StageOutcome& outcome) {
  std::cout << "stage " << corpusforge::to_string(outcome.stage) << ": " << outcome.units_run
            << " unit(s) run, " << outcome.units_skipped << " skipped, "
            << (outcome.complete ? "complete" : "incomplete") << "\n";
  for (const auto& [key, value] : outcome.counts) {
    std::cout << "  " << key << " = " << value << "\n";
  }
}

int run_pipeline_stage(corpusforge::Stage stage, const CommonArgs& args) {
  corpusforge::PipelineConfig config = load_config(args);
  corpusforge::Pipeline pipeline(config);
  corpusforge::StageOptions options;
  options.workers = args.workers;
  if (!args.resume.empty()) options.resume_run_id = args.resume;
  if (args.max_units > 0) options.max_units = args.max_units;
  print_outcome(pipeline.run_stage(stage, options));
  return kExitOk;
}

int run_report(const CommonArgs& args, const std::string& run_id, const std::string& csv_path) {
  std::filesystem::path run_dir;
  if (!args.output.empty() && args.config_path.empty()) {
    run_dir = args.output;
  } else {
    run_dir = load_config(args).output;
  }
  corpusforge::RunReport report = corpusforge::report_stats(run_dir);
  if (!run_id.empty() && run_id != report.run_id) {
    throw corpusforge::ConfigMismatch("run dir holds " + report.run_id + ", not " + run_id);
  }
  std::cout << corpusforge::render_report_text(report);
  if (!csv_path.empty()) {
    std::string csv = corpusforge::render_report_csv(report);
    std::FILE* f = std::fopen(csv_path.c_str(), "wb");
    if (!f) throw corpusforge::IoError("cannot write CSV to " + csv_path);
    std::fwrite(csv.data(), 1, csv.size(), f);
    std::fclose(f);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"corpusforge — WARC-to-corpus batch pipeline"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string report_run_id;
  std::string csv_path;

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    auto* cfg = cmd->add_option("--config", args.config_path, "pipeline config file");
    if (needs_config) cfg->required();
    cmd->add_option("--workers", args.workers, "parallel workers")->default_val(1);
    cmd->add_option("--resume", args.resume, "resume this run id; error on config drift");
    cmd->add_option("--dump-label", args.dump_label, "dump label for flat input layouts");
    cmd->add_option("--input", args.input, "override pipeline.input");
    cmd->add_option("--output", args.output, "override pipeline.output");
    cmd->add_option("--max-units", args.max_units,
                    "process at most N work units this invocation (incremental runs)");
  };

  const std::pair<const char*, corpusforge::Stage> stages[] = {
      {"ingest", corpusforge::Stage::ingest},   {"convert", corpusforge::Stage::convert},
      {"filter", corpusforge::Stage::filter},   {"dedup", corpusforge::Stage::dedup},
      {"shard", corpusforge::Stage::shard},     {"mix", corpusforge::Stage::mix},
  };
  for (const auto& [name, stage] : stages) {
    add_common(app.add_subcommand(name, std::string("run the ") + name + " stage"), true);
    (void)stage;
  }

  auto* report_cmd = app.add_subcommand("report", "print the run report");
  report_cmd->add_option("run_id", report_run_id, "expected run id");
  report_cmd->add_option("--csv", csv_path, "also write a CSV report here");
  add_common(report_cmd, false);

  CLI11_PARSE(app, argc, argv);

  try {
    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "report") return run_report(args, report_run_id, csv_path);
    auto stage = corpusforge::stage_from_string(name);
    return run_pipeline_stage(*stage, args);
  } catch (const corpusforge::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const corpusforge::ConfigMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const corpusforge::MissingInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMissingInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}
