#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "stresspath/pipeline.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_override;
  int jobs_override = 0;
};

void attach(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "pipeline configuration file")->required();
  cmd->add_option("--out", flags.out_override, "output directory (overrides out_dir)");
  cmd->add_option("--jobs", flags.jobs_override, "worker threads for per-slice stages");
}

stresspath::Config load(const CommonFlags& flags) {
  stresspath::Config cfg = stresspath::parse_config(flags.config_path);
  if (!flags.out_override.empty()) cfg.out_dir = flags.out_override;
  if (flags.jobs_override > 0) cfg.jobs = flags.jobs_override;
  cfg.validate();
  return cfg;
}

void print_result(const stresspath::PipelineResult& result) {
  std::cout << "layers: " << result.program.layers.size() << "\n";
  for (const auto& [name, gamma] : result.alignment.gamma_by_variant)
    std::cout << "gamma[" << name << "]: " << gamma << "\n";
  std::cout << "beta_bar: " << result.alignment.beta_bar << " over "
            << result.alignment.critical_trajectory_points << " critical points\n";
  std::cout << "spacing mean: " << result.spacing.mean
            << ", variance: " << result.spacing.variance << " (" << result.spacing.samples
            << " samples)\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stress-aligned non-planar toolpath generation"};
  app.require_subcommand(1);

  CommonFlags flags;
  auto* cmd_fea = app.add_subcommand("fea", "solve the load case and write stress.csv");
  auto* cmd_slice = app.add_subcommand("slice", "geodesic distance and curved layers");
  auto* cmd_flow = app.add_subcommand("flow", "per-layer stress flow preprocessing");
  auto* cmd_paths = app.add_subcommand("paths", "per-layer print trajectories and toolpath");
  auto* cmd_metrics = app.add_subcommand("metrics", "alignment and spacing reports");
  auto* cmd_pipeline = app.add_subcommand("pipeline", "full fresh run of every stage");
  for (auto* cmd : {cmd_fea, cmd_slice, cmd_flow, cmd_paths, cmd_metrics, cmd_pipeline})
    attach(cmd, flags);

  CLI11_PARSE(app, argc, argv);

  try {
    stresspath::Config cfg = load(flags);
    stresspath::PipelineRunner runner(cfg);
    if (cmd_fea->parsed()) {
      runner.run_fea();
    } else if (cmd_slice->parsed()) {
      runner.run_slice();
    } else if (cmd_flow->parsed()) {
      runner.run_flow();
    } else if (cmd_paths->parsed()) {
      runner.run_paths();
    } else if (cmd_metrics->parsed()) {
      print_result(runner.run_metrics());
    } else if (cmd_pipeline->parsed()) {
      print_result(runner.run_all());
    }
  } catch (const stresspath::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
