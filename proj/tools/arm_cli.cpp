// Command-line front end: demo generation, inspection, training, ablations,
// behavioural cloning and learning-curve reports.

#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "arm/demo/teacher.hpp"
#include "arm/errors.hpp"
#include "arm/nn/checkpoint.hpp"
#include "arm/train/ablation.hpp"
#include "arm/train/bc.hpp"
#include "arm/train/report.hpp"

namespace fs = std::filesystem;
using namespace arm;

namespace {

struct RunFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> task;
  std::optional<int> demos;
  std::optional<int> crop;
  std::optional<int> env_steps;
  std::vector<std::string> toggles;
  std::string out = "runs/out";
};

void add_run_flags(CLI::App* app, RunFlags& f) {
  app->add_option("--config", f.config, "Run configuration file (key = value)")->check(CLI::ExistingFile);
  app->add_option("--seed", f.seed, "Run seed");
  app->add_option("--task", f.task, "Task id: lift_block, put_block_in_bin, stack_block");
  app->add_option("--demos", f.demos, "Number of demonstrations")->check(CLI::NonNegativeNumber);
  app->add_option("--crop", f.crop, "Crop size in pixels")->check(CLI::PositiveNumber);
  app->add_option("--env-steps", f.env_steps, "Environment step budget")->check(CLI::PositiveNumber);
  app->add_option("--toggle", f.toggles, "NAME=on|off for qattention, augmentation, confidence, qreg");
  app->add_option("--out", f.out, "Output directory");
}

train::RunConfig resolve(const RunFlags& f) {
  train::RunConfig cfg = f.config.empty() ? train::RunConfig{} : train::RunConfig::from_config(util::load_config(f.config));
  if (f.seed) cfg.seed = *f.seed;
  if (f.task) cfg.env.task = sim::parse_task(*f.task);
  if (f.demos) cfg.demo_count = *f.demos;
  if (f.crop) cfg.crop = *f.crop;
  if (f.env_steps) cfg.env_steps = *f.env_steps;
  for (const auto& t : f.toggles) train::apply_toggle(cfg.toggles, t);
  cfg.validate();
  return cfg;
}

void print_row(const train::MetricsRow& r) {
  std::printf("env_step %lld train_step %lld success %.2f qa %.4g critic %.4g actor %.4g\n", r.env_step, r.train_step,
              r.eval_success_rate, r.qa_loss, r.critic_loss, r.actor_loss);
  std::fflush(stdout);
}

std::vector<demo::Trajectory> load_demos(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".traj") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<demo::Trajectory> out;
  for (const auto& f : files) out.push_back(demo::load_trajectory(f));
  return out;
}

void write_grid(const fs::path& path, const nn::Tensor& q) {
  std::ofstream out(path);
  const int h = q.dim(2), w = q.dim(3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (x) out << ',';
      out << q[static_cast<std::size_t>(y) * w + x];
    }
    out << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attention-driven robot manipulation: desk-scale training and evaluation"};
  app.require_subcommand(1);

  RunFlags demo_flags;
  auto* demo_cmd = app.add_subcommand("demo", "Generate scripted demonstrations as .traj files");
  add_run_flags(demo_cmd, demo_flags);

  std::string kf_file;
  double kf_eps = demo::kDefaultVelocityThreshold;
  auto* kf_cmd = app.add_subcommand("inspect-keyframes", "Print the keyframe table of a trajectory file");
  kf_cmd->add_option("trajectory", kf_file, "Trajectory file")->required()->check(CLI::ExistingFile);
  kf_cmd->add_option("--velocity-threshold", kf_eps, "Near-zero velocity threshold");

  std::string qm_run, qm_traj, qm_ckpt, qm_out = "qmaps";
  auto* qm_cmd = app.add_subcommand("inspect-qmap", "Dump per-frame Q-attention heat maps as CSV grids");
  qm_cmd->add_option("--run", qm_run, "Run directory (config.ini, final.ckpt)")->required()->check(CLI::ExistingDirectory);
  qm_cmd->add_option("--trajectory", qm_traj, "Trajectory file to evaluate")->required()->check(CLI::ExistingFile);
  qm_cmd->add_option("--checkpoint", qm_ckpt, "Checkpoint (defaults to RUN/final.ckpt)");
  qm_cmd->add_option("--out", qm_out, "Output directory");

  RunFlags train_flags;
  auto* train_cmd = app.add_subcommand("train", "Run one training configuration");
  add_run_flags(train_cmd, train_flags);

  RunFlags ablate_flags;
  int ablate_seeds = 1;
  std::vector<std::string> ablate_presets;
  auto* ablate_cmd = app.add_subcommand("ablate", "Run the ablation presets, one directory per preset and seed");
  add_run_flags(ablate_cmd, ablate_flags);
  ablate_cmd->add_option("--seeds", ablate_seeds, "Seeds per preset, counting up from --seed")->check(CLI::PositiveNumber);
  ablate_cmd->add_option("--preset", ablate_presets, "Restrict to these presets");

  RunFlags bc_flags;
  int bc_epochs = 20;
  std::string bc_demo_dir;
  auto* bc_cmd = app.add_subcommand("bc", "Train and evaluate the behavioural-cloning baseline");
  add_run_flags(bc_cmd, bc_flags);
  bc_cmd->add_option("--epochs", bc_epochs, "Training epochs")->check(CLI::PositiveNumber);
  bc_cmd->add_option("--demo-dir", bc_demo_dir, "Directory of .traj files (generated when omitted)")
      ->check(CLI::ExistingDirectory);

  std::vector<std::string> report_inputs;
  std::string report_out = "report";
  auto* report_cmd = app.add_subcommand("report", "Aggregate run metrics into mean/min/max curves per task");
  report_cmd->add_option("inputs", report_inputs, "Run directories or metrics.csv files")->required();
  report_cmd->add_option("--out", report_out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*demo_cmd) {
      const train::RunConfig cfg = resolve(demo_flags);
      fs::create_directories(demo_flags.out);
      const auto demos = train::generate_demos(cfg);
      for (std::size_t i = 0; i < demos.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "demo_%03zu.traj", i);
        demo::save_trajectory(fs::path(demo_flags.out) / name, demos[i]);
      }
      std::printf("wrote %zu demos to %s\n", demos.size(), demo_flags.out.c_str());
    } else if (*kf_cmd) {
      const demo::Trajectory traj = demo::load_trajectory(kf_file);
      std::cout << demo::format_keyframes(demo::discover_keyframes(traj, kf_eps));
    } else if (*qm_cmd) {
      const train::RunConfig cfg = train::RunConfig::from_config(util::load_config(fs::path(qm_run) / "config.ini"));
      if (!cfg.toggles.qattention) throw ContractError("this run has no Q-attention network");
      train::ArmAgent agent(cfg, cfg.seed);
      agent.load_acting_params(nn::load_checkpoint(qm_ckpt.empty() ? fs::path(qm_run) / "final.ckpt" : fs::path(qm_ckpt)));
      const demo::Trajectory traj = demo::load_trajectory(qm_traj);
      fs::create_directories(qm_out);
      std::ofstream summary(fs::path(qm_out) / "argmax.csv");
      summary << "frame,x,y,q\n";
      for (int t = 0; t < traj.size(); ++t) {
        const nn::Tensor q = agent.qmap(traj.observation(t));
        char name[32];
        std::snprintf(name, sizeof(name), "qmap_%04d.csv", t);
        write_grid(fs::path(qm_out) / name, q);
        const demo::Pixel px = agents::argmax2d(q)[0];
        summary << t << ',' << px.x << ',' << px.y << ',' << q[static_cast<std::size_t>(px.y) * q.dim(3) + px.x] << '\n';
      }
      std::printf("wrote %d heat maps to %s\n", traj.size(), qm_out.c_str());
    } else if (*train_cmd) {
      const train::RunConfig cfg = resolve(train_flags);
      const auto result = train::run(cfg, train_flags.out, {[](const train::MetricsRow& r) {
                                       print_row(r);
                                       return false;
                                     }});
      std::printf("final success %.2f after %lld env steps\n", result.final_success, result.env_steps);
    } else if (*ablate_cmd) {
      const train::RunConfig base = resolve(ablate_flags);
      for (const auto& preset : train::ablation_suite(base)) {
        if (!ablate_presets.empty() &&
            std::find(ablate_presets.begin(), ablate_presets.end(), preset.name) == ablate_presets.end()) {
          continue;
        }
        for (int s = 0; s < ablate_seeds; ++s) {
          train::RunConfig cfg = preset.config;
          cfg.seed = base.seed + static_cast<std::uint64_t>(s);
          const fs::path dir = fs::path(ablate_flags.out) / preset.name / ("seed_" + std::to_string(cfg.seed));
          const auto result = train::run(cfg, dir);
          std::printf("%s seed %llu final success %.2f\n", preset.name.c_str(),
                      static_cast<unsigned long long>(cfg.seed), result.final_success);
          std::fflush(stdout);
        }
      }
    } else if (*bc_cmd) {
      const train::RunConfig cfg = resolve(bc_flags);
      const auto demos = bc_demo_dir.empty() ? train::generate_demos(cfg) : load_demos(bc_demo_dir);
      const auto result = train::bc_train(cfg, demos, bc_epochs, bc_flags.out);
      std::printf("bc final loss %.5f success %.2f\n", result.epoch_losses.back(), result.success_rate);
    } else if (*report_cmd) {
      std::vector<fs::path> inputs(report_inputs.begin(), report_inputs.end());
      for (const auto& p : train::write_report(inputs, report_out)) std::printf("%s\n", p.c_str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
