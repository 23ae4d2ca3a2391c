// Copyright 2026 The hardneg-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>

#include "CLI11.hpp"
#include "hardneg/ablation.hpp"
#include "hardneg/checkpoint.hpp"
#include "hardneg/error.hpp"
#include "hardneg/probe.hpp"
#include "hardneg/trainer.hpp"
#include "json.hpp"

namespace hardneg::cli {

namespace {

using nlohmann::ordered_json;

ordered_json stats_json(const HardnessStats& s) {
  return {{"mean", s.mean}, {"std", s.std}, {"min", s.min},
          {"max", s.max},   {"p50", s.p50}, {"p90", s.p90}};
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = text.find(',', start);
    std::string item = text.substr(start, comma == std::string::npos ? comma : comma - start);
    if (!item.empty()) out.push_back(std::move(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  file << text;
  if (!file) throw Error(ErrorKind::IoError, "failed writing " + path.string());
}

void prepare_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create " + dir.string() + ": " + ec.message());
}

struct Options {
  std::string config;
  std::string out_dir;
  std::string checkpoint;
  std::string data = kClustersPreset;
  std::optional<int> epochs;
  std::optional<double> lr;
  std::optional<std::uint64_t> split_seed;
  std::optional<std::size_t> k;
  std::size_t queries = 256;
  std::string axis;
  std::string values;
};

ProbeConfig probe_settings(const Checkpoint& ckpt, const Options& o) {
  ProbeConfig p = ckpt.config.probe;
  if (o.epochs) p.epochs = *o.epochs;
  if (o.lr) p.lr = *o.lr;
  if (o.split_seed) p.split_seed = *o.split_seed;
  if (o.k) p.knn_k = *o.k;
  return p;
}

int cmd_pretrain(const Options& o, std::ostream& out, std::ostream& err) {
  const TrainConfig config = load_train_config(o.config);
  const Dataset data = load_dataset(config.data);
  prepare_dir(o.out_dir);
  const TrainResult result = pretrain(config, data, [&err, &config](const MetricsRow& row) {
    err << "epoch " << row.epoch + 1 << "/" << config.epochs << " loss " << row.mean_loss
        << " synthetic " << row.synthetic_count << '\n';
  });
  const std::filesystem::path dir(o.out_dir);
  write_metrics_csv(result.metrics, dir / "metrics.csv");
  save_checkpoint(result.checkpoint, dir / "checkpoint.json");
  out << (dir / "metrics.csv").string() << '\n' << (dir / "checkpoint.json").string() << '\n';
  return kExitOk;
}

int cmd_probe(const Options& o, std::ostream& out) {
  const Checkpoint ckpt = load_checkpoint(o.checkpoint);
  const Dataset data = load_dataset(o.data);
  const ProbeReport report = evaluate_checkpoint(ckpt, data, probe_settings(ckpt, o));
  const ordered_json j = {
      {"top1", report.top1}, {"knn_top1", report.knn_top1}, {"split_seed", report.split_seed}};
  out << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_knn(const Options& o, std::ostream& out) {
  const Checkpoint ckpt = load_checkpoint(o.checkpoint);
  const Dataset data = load_dataset(o.data);
  const ProbeConfig probe = probe_settings(ckpt, o);
  const auto [train_data, test_data] = split_dataset(data, probe.train_fraction, probe.split_seed);
  const double acc = knn_eval(extract_features(ckpt, train_data), extract_features(ckpt, test_data),
                              probe.knn_k);
  const ordered_json j = {{"knn_top1", acc}, {"k", probe.knn_k}, {"split_seed", probe.split_seed}};
  out << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_stats(const Options& o, std::ostream& out) {
  const Checkpoint ckpt = load_checkpoint(o.checkpoint);
  const Dataset data = load_dataset(o.data);
  const HardnessReport r = hardness_report(ckpt, data, o.queries);
  const ordered_json j = {{"queries", r.queries},
                          {"queue_size", r.queue_size},
                          {"synthetic_per_query", r.synthetic_per_query},
                          {"real", stats_json(r.real)},
                          {"synthetic", stats_json(r.synthetic)}};
  out << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_ablate(const Options& o, std::ostream& out, std::ostream& err) {
  const TrainConfig base = load_train_config(o.config);
  const AblationAxis axis = ablation_axis_from_string(o.axis);
  const std::vector<std::string> values = split_list(o.values);
  const Dataset data = load_dataset(base.data);
  prepare_dir(o.out_dir);
  const auto rows = run_ablation_grid(base, data, axis, values, [&err](const AblationRow& row) {
    err << row.setting << ": top1 " << row.top1 << " knn " << row.knn_top1 << '\n';
  });
  const std::string table = ablation_csv(axis, rows);
  const auto path = std::filesystem::path(o.out_dir) / ("ablation_" + std::string(to_string(axis)) + ".csv");
  write_text(path, table);
  out << table;
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Contrastive pretraining with synthetic hard negatives", "hardneg"};
  app.require_subcommand(1, 1);
  Options o;

  auto* pretrain_cmd = app.add_subcommand("pretrain", "Pretrain an encoder pair from a JSON config");
  pretrain_cmd->add_option("--config", o.config, "Training config (JSON)")->required()->check(CLI::ExistingFile);
  pretrain_cmd->add_option("--out", o.out_dir, "Output directory for metrics.csv and checkpoint.json")->required();

  auto* probe_cmd = app.add_subcommand("probe", "Linear probe on frozen features");
  probe_cmd->add_option("--checkpoint", o.checkpoint, "Checkpoint JSON")->required()->check(CLI::ExistingFile);
  probe_cmd->add_option("--data", o.data, "CSV path or preset name (clusters10)");
  probe_cmd->add_option("--epochs", o.epochs, "Probe training epochs")->check(CLI::PositiveNumber);
  probe_cmd->add_option("--lr", o.lr, "Probe learning rate")->check(CLI::PositiveNumber);
  probe_cmd->add_option("--split-seed", o.split_seed, "Seed of the 80/20 split");

  auto* knn_cmd = app.add_subcommand("knn", "Cosine kNN accuracy on frozen features");
  knn_cmd->add_option("--checkpoint", o.checkpoint, "Checkpoint JSON")->required()->check(CLI::ExistingFile);
  knn_cmd->add_option("--data", o.data, "CSV path or preset name (clusters10)");
  knn_cmd->add_option("--k", o.k, "Number of neighbors")->check(CLI::PositiveNumber);
  knn_cmd->add_option("--split-seed", o.split_seed, "Seed of the 80/20 split");

  auto* stats_cmd = app.add_subcommand("stats", "Hardness of real vs synthetic negatives");
  stats_cmd->add_option("--checkpoint", o.checkpoint, "Checkpoint JSON")->required()->check(CLI::ExistingFile);
  stats_cmd->add_option("--data", o.data, "CSV path or preset name (clusters10)");
  stats_cmd->add_option("--queries", o.queries, "Number of queries to summarize")->check(CLI::PositiveNumber);

  auto* ablate_cmd = app.add_subcommand("ablate", "Train and probe one model per value of an axis");
  ablate_cmd->add_option("--config", o.config, "Base training config (JSON)")->required()->check(CLI::ExistingFile);
  ablate_cmd->add_option("--axis", o.axis,
                         "queue | temperature | momentum | drop-path | hardness | head-norm")->required();
  ablate_cmd->add_option("--values", o.values, "Comma-separated values")->required();
  ablate_cmd->add_option("--out", o.out_dir, "Output directory for the ablation table")->required();

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const std::string& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("hardneg");

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*pretrain_cmd) return cmd_pretrain(o, out, err);
    if (*probe_cmd) return cmd_probe(o, out);
    if (*knn_cmd) return cmd_knn(o, out);
    if (*stats_cmd) return cmd_stats(o, out);
    if (*ablate_cmd) return cmd_ablate(o, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace hardneg::cli
