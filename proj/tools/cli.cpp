// SPDX-License-Identifier: Apache-2.0
#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <optional>

#include "uniform/inspect.hpp"
#include "uniform/synthetic.hpp"
#include "uniform/trainer.hpp"

namespace uniform::cli {
namespace {

struct GenArgs {
  std::string out;
  SyntheticSpec spec;
};

struct TrainArgs {
  std::string manifest;
  std::string config;
  std::string out;
  std::string method;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> epochs;
};

struct EvalArgs {
  std::string checkpoint;
  std::string manifest;
  std::string metrics_out;
};

struct InspectArgs {
  std::string checkpoint;
  std::string manifest;
  std::size_t sample = 0;
};

int cmd_gen(const GenArgs& a, std::ostream& out) {
  const SyntheticPaths paths = gen_synthetic(a.spec, a.out);
  out << paths.manifest.string() << '\n';
  if (!paths.test_manifest.empty()) out << paths.test_manifest.string() << '\n';
  return kExitOk;
}

int cmd_train(const TrainArgs& a, std::ostream& out) {
  TrainConfig config = a.config.empty() ? TrainConfig{} : TrainConfig::load(a.config);
  if (!a.method.empty()) config.method = method_from_string(a.method);
  if (a.seed) config.seed = *a.seed;
  if (a.epochs) config.epochs = *a.epochs;
  config.validate();
  const TrainResult result = train_to_checkpoint(a.manifest, config, a.out);
  const EpochLog& last = result.report.epochs.back();
  char buf[200];
  std::snprintf(buf, sizeof buf, "method=%s epochs=%zu logit=%.6f feature=%.6f rec=%.6f total=%.6f\n",
                to_string(config.method).c_str(), last.epoch, last.logit, last.feature, last.rec, last.total);
  out << buf;
  out << "checkpoint: " << a.out << '\n';
  return kExitOk;
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const LoadedBank loaded = load_bank(a.manifest);
  const Metrics m = evaluate(a.checkpoint, a.manifest);
  char buf[200];
  out << "dataset                 samples  accuracy\n";
  for (std::size_t d = 0; d < m.per_dataset_acc.size(); ++d) {
    const auto& acc = m.per_dataset_acc[d];
    if (acc) {
      std::snprintf(buf, sizeof buf, "%-22s %8zu  %8.4f\n", loaded.data.space.datasets()[d].name.c_str(),
                    m.per_dataset_count[d], *acc);
    } else {
      std::snprintf(buf, sizeof buf, "%-22s %8zu  %8s\n", loaded.data.space.datasets()[d].name.c_str(), std::size_t{0},
                    "n/a");
    }
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "%-22s %8s  %8.4f\n%-22s %8s  %8.4f\n", "Avg(D)", "", m.avg_d, "Avg(C)", "", m.avg_c);
  out << buf;
  if (m.classes_excluded > 0) out << "(" << m.classes_excluded << " classes without test samples excluded from Avg(C))\n";
  const std::filesystem::path metrics_path =
      a.metrics_out.empty() ? std::filesystem::path(a.checkpoint) / "metrics.json" : std::filesystem::path(a.metrics_out);
  write_json(metrics_path, metrics_to_json(m, loaded.data.space));
  return kExitOk;
}

int cmd_inspect(const InspectArgs& a, std::ostream& out) {
  const LoadedBank loaded = load_bank(a.manifest);
  const Checkpoint ckpt = load_checkpoint(a.checkpoint);
  const SampleInspection in = inspect_sample(loaded.data, ckpt.model, a.sample);
  out << format_inspection(in, loaded.data.space);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-teacher knowledge transfer with sign-vote and pseudo-class consensus", "uniform"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Write a synthetic teacher benchmark");
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();
  gen_cmd->add_option("--datasets", gen.spec.datasets, "Number of datasets")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--classes-per", gen.spec.classes_per_dataset, "Classes per dataset")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--samples-per-class", gen.spec.samples_per_class, "Training samples per class")
      ->check(CLI::PositiveNumber);
  gen_cmd->add_option("--test-samples-per-class", gen.spec.test_samples_per_class,
                      "Held-out samples per class (writes test_manifest.json)");
  gen_cmd->add_option("--input-dim", gen.spec.input_dim, "Raw input dimension")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--separation", gen.spec.separation, "Typical distance between class means")
      ->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--predictive-per", gen.spec.predictive_per_dataset, "Predictive teachers per dataset")
      ->check(CLI::PositiveNumber);
  gen_cmd->add_option("--descriptive", gen.spec.descriptive, "Descriptive teachers");
  gen_cmd->add_option("--noise", gen.spec.label_noise, "Teacher label-noise rate")->check(CLI::Range(0.0, 1.0));
  gen_cmd->add_option("--corrupt", gen.spec.feature_corruption, "Descriptive sign-flip rate")->check(CLI::Range(0.0, 1.0));
  gen_cmd->add_option("--seed", gen.spec.seed, "Seed");

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Train a student from a manifest");
  train_cmd->add_option("--manifest", tr.manifest, "Manifest JSON")->required();
  train_cmd->add_option("--config", tr.config, "TrainConfig JSON (defaults when omitted)");
  train_cmd->add_option("--out", tr.out, "Checkpoint directory")->required();
  train_cmd->add_option("--method", tr.method, "uniform, kd or cflplus (overrides config)")
      ->check(CLI::IsMember({"uniform", "kd", "cflplus"}));
  train_cmd->add_option("--seed", tr.seed, "Seed (overrides config)");
  train_cmd->add_option("--epochs", tr.epochs, "Epochs (overrides config)")->check(CLI::PositiveNumber);

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on a labelled manifest");
  eval_cmd->add_option("--checkpoint", ev.checkpoint, "Checkpoint directory")->required();
  eval_cmd->add_option("--manifest", ev.manifest, "Manifest JSON with labels_file")->required();
  eval_cmd->add_option("--metrics-out", ev.metrics_out, "Metrics JSON path (default: CHECKPOINT/metrics.json)");

  InspectArgs in;
  auto* inspect_cmd = app.add_subcommand("inspect", "Show feature and label conflicts for one sample");
  inspect_cmd->add_option("--checkpoint", in.checkpoint, "Checkpoint directory")->required();
  inspect_cmd->add_option("--manifest", in.manifest, "Manifest JSON")->required();
  inspect_cmd->add_option("--sample", in.sample, "Sample index")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (gen_cmd->parsed()) return cmd_gen(gen, out);
    if (train_cmd->parsed()) return cmd_train(tr, out);
    if (eval_cmd->parsed()) return cmd_eval(ev, out);
    if (inspect_cmd->parsed()) return cmd_inspect(in, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace uniform::cli
