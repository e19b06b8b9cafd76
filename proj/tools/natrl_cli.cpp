// natrl command-line front end.
//
//   natrl train          [--config FILE] [--key=value ...]
//   natrl eval           [--config FILE] [--key=value ...]
//   natrl probe-openloop [--config FILE] [--key=value ...]
//   natrl convert-clips  --src DIR --out DIR [--height H] [--width W]
//   natrl dump-frames    [--config FILE] --out DIR [--count N] [--key=value ...]
//   natrl dataset-info   [--config FILE] [--key=value ...]

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "natrl/natrl.hpp"

namespace {

natrl::ExperimentConfig build_config(const std::string& file, const std::vector<std::string>& extras) {
  natrl::ExperimentConfig cfg = file.empty() ? natrl::ExperimentConfig{} : natrl::load_config_file(file);
  natrl::apply_overrides(cfg, extras);
  return cfg;
}

void print_eval(const natrl::EvalSummary& s) {
  std::printf("split=%s episodes=%zu mean_return=%.6f std=%.6f success_rate=%.4f\n", s.split.c_str(), s.episodes,
              s.mean, s.std, s.success_rate);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"natrl: reinforcement learning on natural-signal environments"};
  app.require_subcommand(1);

  std::string config_file;
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config_file, "key = value configuration file");
    sub->allow_extras();
  };

  auto* train = app.add_subcommand("train", "train agents, one metrics file and checkpoint per seed");
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint greedily on eval_split");
  auto* probe = app.add_subcommand("probe-openloop", "compare returns with real and pure-noise observations");
  auto* info = app.add_subcommand("dataset-info", "summarize the configured data");
  auto* dump = app.add_subcommand("dump-frames", "write raw and wrapped observations as netpbm files");
  auto* convert = app.add_subcommand("convert-clips", "resize netpbm frames into a clip library");
  for (auto* sub : {train, eval, probe, info, dump}) add_config(sub);

  std::string dump_out;
  std::size_t dump_count = 8;
  dump->add_option("--out", dump_out, "output directory")->required();
  dump->add_option("--count", dump_count, "number of observations");

  std::string src_dir, out_dir;
  int height = 84, width = 84;
  convert->add_option("--src", src_dir, "directory of clip subdirectories or frames")->required();
  convert->add_option("--out", out_dir, "output clip library directory")->required();
  convert->add_option("--height", height, "target height");
  convert->add_option("--width", width, "target width");

  CLI11_PARSE(app, argc, argv);

  try {
    auto* sub = app.get_subcommands().front();
    if (sub == convert) {
      const auto n = natrl::convert_clips(src_dir, height, width, out_dir);
      std::printf("wrote %zu clips to %s\n", n, out_dir.c_str());
      return 0;
    }
    const natrl::ExperimentConfig cfg = build_config(config_file, sub->remaining());
    if (sub == train) {
      for (const auto& r : natrl::run_train(cfg)) {
        std::printf("seed=%llu episodes=%llu steps=%llu final_return=%.6f metrics=%s\n",
                    static_cast<unsigned long long>(r.seed), static_cast<unsigned long long>(r.episodes),
                    static_cast<unsigned long long>(r.steps), r.final_return, r.metrics_path.string().c_str());
      }
    } else if (sub == eval) {
      print_eval(natrl::run_eval(cfg, natrl::resolve_checkpoint(cfg)));
    } else if (sub == probe) {
      const auto r = natrl::probe_openloop(cfg, natrl::resolve_checkpoint(cfg));
      std::printf("normal_mean=%.6f noise_mean=%.6f gap=%.6f threshold=%.4f verdict=%s\n", r.normal_mean,
                  r.noise_mean, r.gap, r.threshold, natrl::probe_verdict(r));
    } else if (sub == dump) {
      const auto files = natrl::dump_frames(cfg, dump_count, dump_out);
      std::printf("wrote %zu files to %s\n", files, dump_out.c_str());
    } else if (sub == info) {
      std::cout << natrl::dataset_info(cfg);
    }
  } catch (const natrl::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
