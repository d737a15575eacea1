// sanet: scenario runner and toolbox.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sanet/adjuster.h"
#include "sanet/collector.h"
#include "sanet/error.h"
#include "sanet/ml/classifier.h"
#include "sanet/ml/features.h"
#include "sanet/ml/metrics.h"
#include "sanet/ml/split.h"
#include "sanet/qoe.h"
#include "sanet/scenario.h"
#include "sanet/switch.h"
#include "sanet/traffic.h"

namespace fs = std::filesystem;
using namespace sanet;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIoFailure:
    case ErrorCode::kTimeOverflow:
    case ErrorCode::kCapacityExhausted:
    case ErrorCode::kSinkUnavailable:
      return kExitRuntime;
    default:
      return kExitValidation;
  }
}

void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write '" + path + "'");
  out << text;
  if (!out.flush()) throw Error(ErrorCode::kIoFailure, "write to '" + path + "' failed");
}

void MakeParentDirs(const std::string& path) {
  fs::path parent = fs::path(path).parent_path();
  if (parent.empty()) return;
  std::error_code ec;
  fs::create_directories(parent, ec);
  if (ec) throw Error(ErrorCode::kIoFailure, "cannot create '" + parent.string() + "'");
}

struct RunArgs {
  std::string config;
  std::string arm;
  std::optional<uint64_t> seed;
  std::string out;
};

int CmdRun(const RunArgs& args) {
  ScenarioConfig config = LoadScenarioConfig(args.config);
  if (!args.arm.empty()) config.arm = ParseArm(args.arm);
  if (args.seed) {
    config.seed = *args.seed;
    config.train.seed = *args.seed;
  }
  std::string out = args.out.empty() ? config.out_dir : args.out;
  ScenarioResult result = RunScenario(config);
  WriteArtifacts(config, result, out);
  std::cout << "arm=" << ArmName(result.arm) << " end_time_us=" << result.run.end_time_us
            << " register_writes=" << result.run.log.size() << "\n";
  for (const auto& v : result.run.video) {
    char fps[32];
    std::snprintf(fps, sizeof(fps), "%.2f", v.delivered_fps);
    std::cout << "video " << v.source << " frames=" << v.frames
              << " complete=" << v.complete << " delivered_fps=" << fps << "\n";
  }
  std::cout << "artifacts in " << out << "\n";
  return 0;
}

struct TrainArgs {
  std::string dataset;
  std::string model;
  std::string kind = "dt";
  uint32_t k = 5;
  uint32_t trees = 50;
  std::optional<uint32_t> max_depth;
  uint32_t features_per_split = 3;
  double train_fraction = 0.8;
  uint64_t seed = 42;
};

int CmdTrain(const TrainArgs& args) {
  ml::TrainOptions options;
  options.kind = ml::ParseModelKind(args.kind);
  options.k = args.k;
  options.n_trees = args.trees;
  options.tree.max_depth = args.max_depth;
  options.features_per_split = args.features_per_split;
  options.seed = args.seed;
  if (!(args.train_fraction > 0.0 && args.train_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "--train-fraction must be in (0, 1)");
  }
  Dataset dataset = ImportDataset(args.dataset);
  std::vector<ml::Sample> samples = ml::ToSamples(dataset.records());
  ml::SampleSplit split = ml::StratifiedSplit(samples, args.train_fraction, args.seed);
  ml::Classifier model = ml::Classifier::Train(split.train, options);

  std::vector<ClassLabel> predicted;
  std::vector<ClassLabel> truth;
  for (const auto& s : split.test) {
    predicted.push_back(model.Predict(s.x).label);
    truth.push_back(s.y);
  }
  ml::EvalReport report = ml::Evaluate(predicted, truth);
  MakeParentDirs(args.model);
  model.Save(args.model);
  std::cout << ml::FormatReportRow(std::string(ml::ModelKindName(options.kind)), report)
            << "\n";
  return 0;
}

int CmdPredict(const std::string& model_path, const std::string& dataset_path,
               const std::string& out) {
  ml::Classifier model = ml::Classifier::Load(model_path);
  TraceFile trace = ReadTraceFile(dataset_path, LabelColumn::kOptional);
  std::ostringstream csv;
  csv << "row,predicted,predicted_class";
  for (size_t c = 0; c < kNumClasses; ++c) csv << ",score_" << c;
  csv << "\n";
  std::vector<ClassLabel> predicted;
  std::vector<ClassLabel> truth;
  for (size_t i = 0; i < trace.rows.size(); ++i) {
    ml::Prediction p = model.Predict(ml::Featurize(trace.rows[i]));
    csv << i << ',' << static_cast<unsigned>(p.label.class_no()) << ',' << p.label.name();
    char buf[32];
    for (double s : p.scores) {
      std::snprintf(buf, sizeof(buf), ",%.6f", s);
      csv << buf;
    }
    csv << "\n";
    if (trace.rows[i].label) {
      predicted.push_back(p.label);
      truth.push_back(*trace.rows[i].label);
    }
  }
  if (out.empty()) {
    std::cout << csv.str();
  } else {
    MakeParentDirs(out);
    WriteFile(out, csv.str());
  }
  if (!truth.empty() && truth.size() == trace.rows.size()) {
    std::cerr << ml::FormatReportRow(std::string(ml::ModelKindName(model.kind())),
                                     ml::Evaluate(predicted, truth))
              << "\n";
  }
  return 0;
}

int CmdRoc(const std::string& model_path, const std::string& dataset_path,
           const std::string& out_dir) {
  ml::Classifier model = ml::Classifier::Load(model_path);
  Dataset dataset = ImportDataset(dataset_path);
  std::vector<ml::ClassScores> scores;
  std::vector<ClassLabel> truth;
  for (const auto& r : dataset.records()) {
    scores.push_back(model.Predict(ml::Featurize(r)).scores);
    truth.push_back(*r.label);
  }

  std::vector<std::pair<std::string, std::string>> files;
  std::ostringstream table;
  table << "class,class_name,auc\n";
  for (size_t c = 0; c < kNumClasses; ++c) {
    ClassLabel cls = ClassLabel::FromNumber(c);
    char auc[32];
    try {
      ml::RocCurve curve = ml::Roc(scores, truth, cls);
      std::ostringstream csv;
      csv << "class,threshold,fpr,tpr\n";
      for (const auto& p : curve.points) {
        char row[128];
        std::snprintf(row, sizeof(row), "%zu,%.17g,%.17g,%.17g\n", c, p.threshold, p.fpr,
                      p.tpr);
        csv << row;
      }
      files.emplace_back("roc_class" + std::to_string(c) + ".csv", csv.str());
      std::snprintf(auc, sizeof(auc), "%.2f", curve.auc);
      std::cout << "class " << c << " (" << cls.name() << ") AUC = " << auc << "\n";
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kSingleClassOnly) throw;
      std::snprintf(auc, sizeof(auc), "%s", "SingleClassOnly");
      std::cout << "class " << c << " (" << cls.name() << ") " << e.what() << "\n";
    }
    table << c << ',' << cls.name() << ',' << auc << "\n";
  }
  files.emplace_back("auc.csv", table.str());

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::kIoFailure, "cannot create '" + out_dir + "'");
  for (const auto& [name, text] : files) WriteFile((fs::path(out_dir) / name).string(), text);
  return 0;
}

int CmdPsnr(const std::string& reference, const std::string& test) {
  ImageMatrix f = LoadImageCsv(reference);
  ImageMatrix g = LoadImageCsv(test);
  double mse = Mse(f, g);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", mse);
  std::cout << "mse=" << buf << " psnr=" << FormatPsnr(Psnr(f, g)) << "\n";
  return 0;
}

int CmdGenTrace(const std::string& profiles_path, uint32_t per_class, uint64_t seed,
                const std::string& out) {
  std::vector<IotClassProfile> profiles = LoadIotProfiles(profiles_path);
  SyntheticTrace trace = GenerateSyntheticIotTrace(profiles, per_class, seed);
  Provenance provenance;
  provenance.run_id = "synthetic-iot";
  provenance.created_us = trace.rows.empty() ? 0 : trace.rows.back().timestamp_us;
  provenance.extra = {{"seed", std::to_string(seed)},
                      {"per_class", std::to_string(per_class)},
                      {"version", std::string(kVersion)}};
  Dataset dataset(provenance);
  for (auto& row : trace.rows) dataset.Append(std::move(row));
  MakeParentDirs(out);
  size_t rows = ExportDataset(dataset, out);
  std::cout << "wrote " << rows << " rows to " << out << "\n";
  return 0;
}

int CmdRegisters(const std::string& config_path, const std::vector<std::string>& commands) {
  ScenarioConfig config = LoadScenarioConfig(config_path);
  Switch sw(config.switch_config);
  // Flow ids follow source order, as on first arrival.
  for (const auto& src : config.sources) {
    if (src.type == SourceType::kTrace) continue;
    Packet p;
    p.key = src.type == SourceType::kCbr ? src.cbr.key : src.video.key;
    p.ingress_port = config.topology.senders[src.sender].switch_port;
    sw.Ingress(p, SimTime());
  }
  std::vector<std::string> lines = commands;
  if (lines.empty()) {
    for (std::string line; std::getline(std::cin, line);) {
      if (!line.empty()) lines.push_back(line);
    }
  }
  for (const auto& line : lines) std::cout << sw.Execute(line) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-adjusting network emulator: switch, telemetry, classifiers, QoE"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run a dumbbell scenario and write artifacts");
  run_cmd->add_option("--config", run.config, "Scenario config file")->required();
  run_cmd->add_option("--arm", run.arm, "baseline | congested | adjusted");
  run_cmd->add_option("--seed", run.seed, "Override the config seed");
  run_cmd->add_option("--out", run.out, "Output directory");

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train a classifier on a labeled dataset");
  train_cmd->add_option("--dataset", train.dataset, "Labeled dataset file")->required();
  train_cmd->add_option("--model", train.model, "Output model file")->required();
  train_cmd->add_option("--kind", train.kind, "dt | knn | rf")->capture_default_str();
  train_cmd->add_option("--k", train.k, "KNN neighbours")->capture_default_str();
  train_cmd->add_option("--trees", train.trees, "Forest size")->capture_default_str();
  train_cmd->add_option("--max-depth", train.max_depth, "Tree depth limit");
  train_cmd->add_option("--features-per-split", train.features_per_split,
                        "Forest features per split")
      ->capture_default_str();
  train_cmd->add_option("--train-fraction", train.train_fraction, "Stratified train share")
      ->capture_default_str();
  train_cmd->add_option("--seed", train.seed, "Split and forest seed")->capture_default_str();

  std::string model_path;
  std::string dataset_path;
  std::string out;
  auto* predict_cmd = app.add_subcommand("predict", "Classify every row of a trace");
  predict_cmd->add_option("--model", model_path, "Model file")->required();
  predict_cmd->add_option("--dataset", dataset_path, "Trace or dataset file")->required();
  predict_cmd->add_option("--out", out, "Predictions CSV (default stdout)");

  auto* roc_cmd = app.add_subcommand("roc", "One-vs-rest ROC curves and AUC table");
  roc_cmd->add_option("--model", model_path, "Model file")->required();
  roc_cmd->add_option("--dataset", dataset_path, "Labeled dataset file")->required();
  roc_cmd->add_option("--out", out, "Output directory")->required();

  std::string reference;
  std::string test;
  auto* psnr_cmd = app.add_subcommand("psnr", "MSE and PSNR between two image grids");
  psnr_cmd->add_option("reference", reference, "Reference image CSV")->required();
  psnr_cmd->add_option("test", test, "Test image CSV")->required();

  std::string profiles;
  uint32_t per_class = 2000;
  uint64_t seed = 42;
  auto* gen_cmd = app.add_subcommand("gen-trace", "Generate a labeled synthetic IoT trace");
  gen_cmd->add_option("--profiles", profiles, "Class profiles file")->required();
  gen_cmd->add_option("--per-class", per_class, "Packets per class")->capture_default_str();
  gen_cmd->add_option("--seed", seed, "Generator seed")->capture_default_str();
  gen_cmd->add_option("--out", out, "Output dataset file")->required();

  std::string config_path;
  std::vector<std::string> commands;
  auto* reg_cmd = app.add_subcommand(
      "registers", "Issue control commands to a switch built from a config");
  reg_cmd->add_option("--config", config_path, "Scenario config file")->required();
  reg_cmd->add_option("commands", commands,
                      "Commands, e.g. \"set-priority 0 6\" (default: read stdin)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  try {
    if (*run_cmd) return CmdRun(run);
    if (*train_cmd) return CmdTrain(train);
    if (*predict_cmd) return CmdPredict(model_path, dataset_path, out);
    if (*roc_cmd) return CmdRoc(model_path, dataset_path, out);
    if (*psnr_cmd) return CmdPsnr(reference, test);
    if (*gen_cmd) return CmdGenTrace(profiles, per_class, seed, out);
    if (*reg_cmd) return CmdRegisters(config_path, commands);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
