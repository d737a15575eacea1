// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.h"
#include "sanet/collector.h"
#include "sanet/ml/classifier.h"
#include "sanet/ml/metrics.h"
#include "sanet/ml/split.h"
#include "sanet/qoe.h"
#include "sanet/scenario.h"
#include "sanet/traffic.h"

using namespace sanet;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path WorkDir() {
  fs::path dir = fs::temp_directory_path() / "sanet_acceptance";
  fs::create_directories(dir);
  return dir;
}

const std::string kDumbbell = SANET_SOURCE_DIR "/configs/dumbbell.cfg";

// AC1 ---------------------------------------------------------------------

Outcome VideoPriority() {
  ScenarioConfig cfg = LoadScenarioConfig(kDumbbell);
  double fps[3] = {};
  const Arm arms[3] = {Arm::kBaseline, Arm::kCongested, Arm::kAdjusted};
  for (int i = 0; i < 3; ++i) {
    cfg.arm = arms[i];
    ScenarioResult r = RunScenario(cfg);
    if (r.run.video.size() != 1) return {false, "expected one video source"};
    fps[i] = r.run.video[0].delivered_fps;
  }
  bool pass = fps[0] == 30.0 && fps[1] < 28.0 && fps[2] >= fps[1] + 2.0 && fps[2] >= 28.0;
  return {pass, Fmt("delivered_fps baseline=%.2f congested=%.2f adjusted=%.2f "
                    "(need 30.00, <28.00, >=congested+2 and >=28.00)",
                    fps[0], fps[1], fps[2])};
}

// AC2 ---------------------------------------------------------------------

Outcome ClassifierParity() {
  auto profiles = LoadIotProfiles(SANET_SOURCE_DIR "/configs/iot_profiles.cfg");
  SyntheticTrace trace = GenerateSyntheticIotTrace(profiles, 2000, 42);
  std::vector<ml::Sample> samples = ml::ToSamples(trace.rows);
  ml::SampleSplit split = ml::StratifiedSplit(samples, 0.8, 42);
  std::vector<ClassLabel> truths;
  for (const auto& s : split.test) truths.push_back(s.y);

  bool pass = samples.size() == 12'000;
  std::string detail = Fmt("train=%zu test=%zu", split.train.size(), split.test.size());
  for (ml::ModelKind kind :
       {ml::ModelKind::kDecisionTree, ml::ModelKind::kKnn, ml::ModelKind::kRandomForest}) {
    ml::TrainOptions opt;
    opt.kind = kind;
    opt.seed = 42;
    ml::Classifier c = ml::Classifier::Train(split.train, opt);
    std::vector<ClassLabel> predicted;
    for (const auto& s : split.test) predicted.push_back(c.Predict(s.x).label);
    double acc = ml::Evaluate(predicted, truths).accuracy;
    pass = pass && acc >= 0.95;
    detail += Fmt(" %s=%.4f", std::string(ml::ModelKindName(kind)).c_str(), acc);
  }
  return {pass, detail + " (need >=0.95 each)"};
}

// AC3 ---------------------------------------------------------------------

std::vector<ml::Sample> RandomSamples(size_t n, uint64_t seed) {
  Rng rng(seed);
  std::vector<ml::Sample> out(n);
  for (auto& s : out) {
    for (auto& v : s.x) v = UniformUnit(rng) * 1000.0;
    s.y = ClassLabel::FromNumber(UniformIndex(rng, kNumClasses));
  }
  return out;
}

Outcome KnnOracle() {
  auto train = RandomSamples(5000, 1);
  auto queries = RandomSamples(1000, 2);
  ml::KnnModel model = ml::KnnModel::Fit(train, 5);
  size_t agree = 0;
  for (const auto& q : queries) {
    if (model.Predict(q.x).label == oracle::BruteForceKnn(train, 5, q.x)) ++agree;
  }
  return {agree == queries.size(), Fmt("k=5 agreement %zu/%zu", agree, queries.size())};
}

// AC4 ---------------------------------------------------------------------

Outcome AucOracle() {
  Rng rng(4);
  double worst = 0.0;
  const ClassLabel pos = ClassLabel::FromNumber(3);
  const ClassLabel neg = ClassLabel::FromNumber(0);
  auto build = [&](size_t n, auto score_of, auto positive_of, double* pairwise) {
    std::vector<ml::ClassScores> scores(n);
    std::vector<ClassLabel> truths(n);
    std::vector<double> raw(n);
    auto flags = std::make_unique<bool[]>(n);
    for (size_t i = 0; i < n; ++i) {
      flags[i] = positive_of(i);
      raw[i] = score_of(i, flags[i]);
      scores[i][3] = raw[i];
      truths[i] = flags[i] ? pos : neg;
    }
    if (pairwise) *pairwise = oracle::PairwiseAuc(raw, std::span<const bool>(flags.get(), n));
    return ml::Roc(scores, truths, pos).auc;
  };

  for (int set = 0; set < 200; ++set) {
    size_t n = 2 + UniformIndex(rng, 400);
    // Coarse grid on half the sets so ties are common.
    bool coarse = set % 2 == 0;
    double expected = 0.0;
    double auc = build(
        n,
        [&](size_t, bool) {
          return coarse ? static_cast<double>(UniformIndex(rng, 10)) / 10.0 : UniformUnit(rng);
        },
        [&](size_t i) { return i == 0 || (i != 1 && UniformIndex(rng, 2) == 1); }, &expected);
    worst = std::max(worst, std::abs(auc - expected));
  }

  double perfect_err = 0.0;
  bool constant_exact = true;
  for (int set = 0; set < 20; ++set) {
    size_t n = 2 + UniformIndex(rng, 200);
    double perfect = build(
        n, [&](size_t, bool p) { return p ? 0.6 + 0.4 * UniformUnit(rng) : 0.5 * UniformUnit(rng); },
        [&](size_t i) { return i % 2 == 0; }, nullptr);
    perfect_err = std::max(perfect_err, std::abs(perfect - 1.0));
    double constant =
        build(n, [](size_t, bool) { return 0.25; }, [&](size_t i) { return i % 3 == 0; }, nullptr);
    constant_exact = constant_exact && constant == 0.5;
  }
  bool pass = worst <= 1e-9 && perfect_err <= 1e-9 && constant_exact;
  return {pass, Fmt("max |trapezoid-pairwise|=%.3g over 200 sets, perfect err=%.3g, "
                    "constant==0.5 %s",
                    worst, perfect_err, constant_exact ? "yes" : "no")};
}

// AC5 ---------------------------------------------------------------------

Outcome PsnrGolden() {
  ImageMatrix f = ImageMatrix::Filled(8, 8, 120);
  bool identity = Mse(f, f) == 0.0 && std::holds_alternative<PerfectMatch>(Psnr(f, f));
  PsnrValue extreme = Psnr(ImageMatrix::Filled(1, 1, 0), ImageMatrix::Filled(1, 1, 255));
  double extreme_db = std::get<double>(extreme);
  ImageMatrix g = ImageMatrix::Filled(8, 8, 136);
  double mse16 = Mse(f, g);
  double psnr16 = std::get<double>(Psnr(f, g));
  bool pass = identity && std::abs(extreme_db) <= 1e-9 && mse16 == 256.0 &&
              std::abs(psnr16 - 24.0484) <= 1e-3;
  return {pass, Fmt("identity=%s max-diff=%.3g dB const16 mse=%.1f psnr=%.6f dB",
                    identity ? "PerfectMatch" : "wrong", extreme_db, mse16, psnr16)};
}

// AC6 ---------------------------------------------------------------------

Outcome QueueFuzz() {
  uint64_t violations = 0, packets = 0, dropped = 0;
  std::string first;
  for (uint64_t seed : {101, 202, 303}) {
    oracle::FuzzReport r = oracle::RunQueueFuzz(seed, 10'000);
    violations += r.violations;
    packets += r.packets;
    dropped += r.dropped;
    if (first.empty() && !r.messages.empty()) first = r.messages[0];
  }
  return {violations == 0 && dropped > 0,
          Fmt("%llu packets over 3 workloads, %llu drops, %llu violations%s%s",
              static_cast<unsigned long long>(packets),
              static_cast<unsigned long long>(dropped),
              static_cast<unsigned long long>(violations), first.empty() ? "" : ": ",
              first.c_str())};
}

// AC7 ---------------------------------------------------------------------

struct Recorder : TelemetrySink {
  std::vector<TelemetryRecord> records;
  void Deliver(const TelemetryRecord& r) override { records.push_back(r); }
};

Outcome MirrorInterval() {
  bool pass = true;
  std::string detail;
  for (uint64_t interval : {0ull, 1'000ull, 10'000ull}) {
    for (bool jitter : {false, true}) {
      SwitchConfig cfg;
      cfg.mirror_flag = true;
      cfg.mirror_interval_us = interval;
      Switch sw(cfg);
      Recorder sink;
      sw.AttachCollector(&sink);
      // 100 packets per second for 10 s; the jittered variant draws gaps in
      // [0, 20 ms] with the same mean.
      Rng rng(interval + 7);
      uint64_t t = 0;
      for (int i = 0; i < 1000; ++i) {
        Packet p;
        p.key = FlowKey{0x0A000001, 0x0A000003, 5000, 5004, 17};
        p.size_bytes = 200;
        p.ingress_port = 2;
        p.created_at = SimTime(t);
        sw.Receive(p, SimTime(t));
        while (auto next = sw.NextTransmitTime()) {
          if (*next > SimTime(t)) break;
          sw.Transmit(SimTime(t));
        }
        t += jitter ? UniformInRange(rng, 0, 20'000) : 10'000;
      }
      while (auto next = sw.NextTransmitTime()) sw.Transmit(std::max(*next, SimTime(t)));

      uint64_t min_gap = UINT64_MAX;
      for (size_t i = 1; i < sink.records.size(); ++i) {
        uint64_t a = sink.records[i - 1].timestamp_us - sink.records[i - 1].flow_interval_time;
        uint64_t b = sink.records[i].timestamp_us - sink.records[i].flow_interval_time;
        min_gap = std::min(min_gap, b - a);
      }
      FlowCounters totals = sw.totals();
      bool ok = min_gap >= interval;
      if (interval == 0) {
        // Drops happen before stamping, so every stamped packet is a
        // transmitted one.
        ok = ok && sink.records.size() == totals.transmitted &&
             sw.mirror_counters().cloned == totals.transmitted &&
             totals.injected == totals.transmitted + totals.dropped;
      }
      pass = pass && ok;
      detail += Fmt("%sI=%lluus%s mirrored=%zu/%llu min_gap=%lluus", detail.empty() ? "" : "; ",
                    static_cast<unsigned long long>(interval), jitter ? "(jitter)" : "",
                    sink.records.size(), static_cast<unsigned long long>(totals.transmitted),
                    static_cast<unsigned long long>(min_gap));
    }
  }
  return {pass, detail};
}

// AC8 ---------------------------------------------------------------------

int RunCli(const std::string& args) {
  std::string cmd = std::string(SANET_CLI) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome Determinism() {
  fs::path a = WorkDir() / "det_a";
  fs::path b = WorkDir() / "det_b";
  fs::remove_all(a);
  fs::remove_all(b);
  int rc_a = RunCli("run --config " + kDumbbell + " --arm adjusted --seed 7 --out " + a.string());
  int rc_b = RunCli("run --config " + kDumbbell + " --arm adjusted --seed 7 --out " + b.string());
  if (rc_a != 0 || rc_b != 0) return {false, Fmt("cli exit codes %d and %d", rc_a, rc_b)};
  size_t files = 0;
  bool same = true;
  std::string differs;
  for (const auto& entry : fs::directory_iterator(a)) {
    ++files;
    fs::path other = b / entry.path().filename();
    if (!fs::exists(other) || Slurp(entry.path()) != Slurp(other)) {
      same = false;
      differs += " " + entry.path().filename().string();
    }
  }
  size_t files_b = std::distance(fs::directory_iterator(b), fs::directory_iterator{});
  bool required = fs::exists(a / "dataset.csv") && fs::exists(a / "adjustments.csv") &&
                  fs::exists(a / "report.json");
  return {same && required && files == files_b && files > 0,
          Fmt("%zu artifacts compared byte-for-byte%s%s", files, same ? "" : ", differ:",
              differs.c_str())};
}

// AC9 ---------------------------------------------------------------------

Outcome DatasetRoundTrip() {
  Provenance p;
  p.run_id = "acceptance";
  p.created_us = 123456;
  p.extra = {{"seed", "9"}};
  Dataset d(p);
  Rng rng(9);
  for (size_t i = 0; i < 10'000; ++i) {
    RawTelemetry raw;
    raw.ingress_port = UniformIndex(rng, 1 << 9);
    raw.flow_interval_time = UniformIndex(rng, 1ull << 48);
    raw.enq_qdepth = UniformIndex(rng, 1 << 19);
    raw.deq_qdepth = UniformIndex(rng, 1 << 19);
    raw.deq_timedelta = UniformIndex(rng, 1ull << 32);
    raw.protocol = UniformIndex(rng, 256);
    raw.src_port = UniformIndex(rng, 65536);
    raw.dst_port = UniformIndex(rng, 65536);
    raw.src_ip = UniformIndex(rng, 1ull << 32);
    raw.dst_ip = UniformIndex(rng, 1ull << 32);
    TelemetryRecord r = MakeRecord(raw);
    r.timestamp_us = i * 13;
    r.size_bytes = static_cast<uint32_t>(UniformInRange(rng, 64, 1500));
    r.label = ClassLabel::FromNumber(UniformIndex(rng, kNumClasses));
    d.Append(r);
  }
  fs::path first = WorkDir() / "roundtrip_1.csv";
  fs::path second = WorkDir() / "roundtrip_2.csv";
  ExportDataset(d, first.string());
  Dataset back = ImportDataset(first.string());
  ExportDataset(back, second.string());
  std::string x = Slurp(first);
  std::string y = Slurp(second);
  return {x == y && back == d && back.size() == 10'000,
          Fmt("10000 records, %zu bytes, identical=%s", x.size(), x == y ? "yes" : "no")};
}

// AC10 --------------------------------------------------------------------

Outcome DegenerateForest() {
  auto profiles = LoadIotProfiles(SANET_SOURCE_DIR "/configs/iot_profiles.cfg");
  auto train = ml::ToSamples(GenerateSyntheticIotTrace(profiles, 300, 10).rows);
  auto test = ml::ToSamples(GenerateSyntheticIotTrace(profiles, 200, 11).rows);
  test.resize(1000);
  bool pass = true;
  size_t agree = 0, total = 0;
  for (std::optional<uint32_t> depth : {std::optional<uint32_t>{}, std::optional<uint32_t>{4}}) {
    ml::TreeParams tp;
    tp.max_depth = depth;
    ml::ForestParams fp;
    fp.n_trees = 1;
    fp.bootstrap = false;
    fp.features_per_split = ml::kNumFeatures;
    fp.tree = tp;
    fp.seed = 5;
    auto forest = ml::RandomForestModel::Train(train, fp);
    auto tree = ml::DecisionTreeModel::Train(train, tp);
    for (const auto& s : test) {
      ++total;
      if (forest.Predict(s.x).label == tree.Predict(s.x).label) ++agree;
    }
  }
  pass = agree == total;
  return {pass, Fmt("identical predictions %zu/%zu (unlimited and depth-4 trees)", agree, total)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    const char* name;
    std::function<Outcome()> run;
    double budget_s;  // 0 = no wall-clock bound
  };
  const std::vector<Criterion> criteria = {
      {"AC1", "video priority experiment", VideoPriority, 60.0},
      {"AC2", "classifier parity", ClassifierParity, 30.0},
      {"AC3", "knn oracle equivalence", KnnOracle, 10.0},
      {"AC4", "auc oracle equivalence", AucOracle, 0.0},
      {"AC5", "psnr/mse golden values", PsnrGolden, 0.0},
      {"AC6", "queue discipline fuzz", QueueFuzz, 0.0},
      {"AC7", "mirror interval", MirrorInterval, 0.0},
      {"AC8", "determinism", Determinism, 0.0},
      {"AC9", "dataset round-trip", DatasetRoundTrip, 0.0},
      {"AC10", "degenerate forest", DegenerateForest, 0.0},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0 && secs >= c.budget_s) {
      o.pass = false;
      o.detail += Fmt(" [over %.0f s budget]", c.budget_s);
    }
    if (!o.pass) ++failures;
    std::cout << c.id << ' ' << (o.pass ? "PASS" : "FAIL") << "  " << c.name << ": " << o.detail
              << Fmt(" [%.2f s]", secs) << std::endl;
  }
  std::cout << (failures == 0 ? "ALL PASS" : Fmt("%d FAILED", failures)) << std::endl;
  return failures == 0 ? 0 : 1;
}
