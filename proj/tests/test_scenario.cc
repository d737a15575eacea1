#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "sanet/error.h"
#include "sanet/scenario.h"

using namespace sanet;
namespace fs = std::filesystem;

namespace {

ErrorCode CodeOf(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kInvalidArgument;
}

fs::path ScratchDir() {
  fs::path dir = fs::temp_directory_path() / "sanet_test_scenario";
  fs::create_directories(dir);
  return dir;
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// The shipped dumbbell shortened to 6 s with the UDP burst at 2 s.
std::string ShortDumbbell(const std::string& arm = "adjusted") {
  return "[run]\nname = short\nduration_s = 6\nseed = 7\narm = " + arm +
         "\n"
         "[topology]\nsenders = H1=10.0.0.1, H2=10.0.0.2\n"
         "receivers = H3=10.0.0.3, H4=10.0.0.4\n"
         "bottleneck_bps = 2000000\n"
         "[source video]\ntype = video\nfrom = H1\nto = H3\nsrc_port = 5000\n"
         "dst_port = 5004\nfps = 30\npackets_per_frame = 4\npacket_size = 1000\n"
         "[source udp]\ntype = cbr\nfrom = H2\nto = H4\nsrc_port = 5201\n"
         "dst_port = 5201\nrate_bps = 2000000\npacket_size = 1250\nstart_s = 2\n"
         "background = true\n"
         "[labels]\nCameras = 5004\nOthers = 5201\n"
         "[policy]\nfile = short.policy\n"
         "[mirror]\nflag = on\n";
}

ScenarioConfig ShortConfig(Arm arm) {
  fs::path dir = ScratchDir();
  WriteText(dir / "short.policy", "Cameras = 6\nOthers = 0\n");
  ScenarioConfig cfg = ParseScenarioConfig(ShortDumbbell(), dir.string());
  cfg.arm = arm;
  return cfg;
}

struct Cli {
  int code = -1;
  std::string out;
};

Cli RunCli(const std::string& args) {
  std::string cmd = std::string(SANET_CLI) + " " + args + " 2>/dev/null";
  Cli r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf;
  while (size_t n = fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), n);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

}  // namespace

TEST_CASE("shipped dumbbell config") {
  ScenarioConfig cfg = LoadScenarioConfig(SANET_SOURCE_DIR "/configs/dumbbell.cfg");
  CHECK(cfg.name == "dumbbell");
  CHECK(cfg.seed == 7);
  CHECK(cfg.duration_s == 60.0);
  CHECK(cfg.arm == Arm::kAdjusted);
  REQUIRE(cfg.sources.size() == 2);
  CHECK(cfg.sources[0].type == SourceType::kVideo);
  CHECK(cfg.sources[0].video.fps == 30);
  CHECK(cfg.sources[0].video.packets_per_frame == 4);
  CHECK(cfg.sources[1].background);
  CHECK(cfg.sources[1].cbr.start == SimTime::FromSeconds(10.0));
  CHECK(cfg.topology.bottleneck.rate_bps == 2'000'000);
  CHECK(cfg.topology.senders[0].switch_port == 2);
  CHECK(cfg.topology.senders[1].switch_port == 3);
  CHECK(cfg.policy.class_priority.at(ClassLabel(IotClass::kCameras)).level == 6);
  CHECK(cfg.config_hash != 0);
  CHECK(LoadScenarioConfig(SANET_SOURCE_DIR "/configs/dumbbell.cfg").config_hash ==
        cfg.config_hash);
  CHECK(ReproducibilityHeader(cfg).rfind("# version=0.1.0 config_hash=", 0) == 0);
}

TEST_CASE("config errors") {
  fs::path dir = ScratchDir();
  WriteText(dir / "short.policy", "Cameras = 6\n");
  auto parse = [&](const std::string& text) { return ParseScenarioConfig(text, dir.string()); };
  auto replace = [](std::string text, const std::string& from, const std::string& to) {
    size_t at = text.find(from);
    REQUIRE(at != std::string::npos);
    return text.replace(at, from.size(), to);
  };
  const std::string good = ShortDumbbell();
  CHECK_NOTHROW(parse(good));
  CHECK(CodeOf([&] { parse(replace(good, "seed = 7\n", "")); }) == ErrorCode::kConfigInvalid);
  CHECK(CodeOf([&] { parse(replace(good, "arm = adjusted", "arm = sideways")); }) ==
        ErrorCode::kConfigInvalid);
  CHECK(CodeOf([&] { parse(good + "[bogus]\nx = 1\n"); }) == ErrorCode::kConfigInvalid);
  CHECK(CodeOf([&] { parse(replace(good, "H2=10.0.0.2", "H2=10.0.0.999")); }) ==
        ErrorCode::kConfigInvalid);
  CHECK(CodeOf([&] { parse(replace(good, "from = H2", "from = H9")); }) ==
        ErrorCode::kConfigInvalid);
  CHECK(CodeOf([&] { parse(replace(good, "fps = 30", "fps = 0")); }) ==
        ErrorCode::kConfigInvalid);
  CHECK(CodeOf([&] { parse(replace(good, "Others = 5201", "Others = 5004")); }) ==
        ErrorCode::kConfigInvalid);
  CHECK(CodeOf([&] { parse(replace(good, "type = cbr", "type = morse")); }) ==
        ErrorCode::kConfigInvalid);
  // Two sources with the same 5-tuple.
  CHECK(CodeOf([&] {
          parse(good + "[source dup]\ntype = cbr\nfrom = H2\nto = H4\nsrc_port = 5201\n"
                       "dst_port = 5201\nrate_bps = 1000\n");
        }) == ErrorCode::kConfigInvalid);
  CHECK(CodeOf([&] { parse(replace(good, "short.policy", "missing.policy")); }) ==
        ErrorCode::kIoFailure);
  CHECK(CodeOf([] { LoadScenarioConfig("/nonexistent/x.cfg"); }) == ErrorCode::kIoFailure);
}

TEST_CASE("adjusted arm needs mirroring") {
  ScenarioConfig cfg = ShortConfig(Arm::kAdjusted);
  cfg.mirror_flag = false;
  CHECK(CodeOf([&] { RunScenario(cfg); }) == ErrorCode::kConfigInvalid);
}

TEST_CASE("short dumbbell arms") {
  ScenarioResult base = RunScenario(ShortConfig(Arm::kBaseline));
  ScenarioResult congested = RunScenario(ShortConfig(Arm::kCongested));
  ScenarioResult adjusted = RunScenario(ShortConfig(Arm::kAdjusted));

  REQUIRE(base.run.video.size() == 1);
  CHECK(base.run.video[0].frames == 180);
  CHECK(base.run.video[0].complete == 180);
  CHECK(base.run.video[0].delivered_fps == doctest::Approx(30.0));
  CHECK(base.run.video[0].deadline_us == 66'666);
  CHECK(base.run.stats.size() == 1);

  CHECK(congested.run.video[0].delivered_fps < 30.0);
  CHECK(congested.run.log.size() == 0);

  CHECK(adjusted.run.video[0].delivered_fps > congested.run.video[0].delivered_fps);
  CHECK(adjusted.run.log.size() >= 1);
  REQUIRE(adjusted.training_set.has_value());
  CHECK(adjusted.model.has_value());
  CHECK(adjusted.run.errors.empty());
  for (const auto& e : adjusted.run.log.entries()) {
    CHECK(e.time.ticks() % 1'000'000 == 0);
    CHECK(e.old_priority != e.new_priority);
  }

  for (const ScenarioResult* r : {&base, &congested, &adjusted}) {
    uint64_t sent = 0, delivered = 0, dropped = 0;
    for (const auto& s : r->run.stats) {
      sent += s.sent;
      delivered += s.delivered;
      dropped += s.dropped;
      CHECK(s.delivered + s.dropped == s.sent);
    }
    CHECK(sent == r->run.totals.injected);
    CHECK(delivered == r->run.totals.transmitted);
    CHECK(dropped == r->run.totals.dropped);
    CHECK(r->run.video[0].delivered_fps <= 30.0);
  }
}

TEST_CASE("runs are deterministic") {
  ScenarioConfig cfg = ShortConfig(Arm::kAdjusted);
  ScenarioResult a = RunScenario(cfg);
  ScenarioResult b = RunScenario(cfg);
  CHECK(ReportJson(cfg, a) == ReportJson(cfg, b));
  CHECK(a.run.dataset == b.run.dataset);
}

TEST_CASE("artifacts") {
  ScenarioConfig cfg = ShortConfig(Arm::kAdjusted);
  ScenarioResult r = RunScenario(cfg);
  fs::path out = ScratchDir() / "artifacts";
  fs::remove_all(out);
  auto paths = WriteArtifacts(cfg, r, out.string());
  for (const char* name : {"dataset.csv", "adjustments.csv", "stats.csv", "report.json",
                           "training_dataset.csv", "model.json"}) {
    CAPTURE(name);
    CHECK(fs::exists(out / name));
  }
  CHECK(paths.size() == 6);
  std::string header = ReproducibilityHeader(cfg);
  CHECK(Slurp(out / "adjustments.csv").rfind(header, 0) == 0);
  CHECK(Slurp(out / "stats.csv").rfind(header, 0) == 0);
  Dataset back = ImportDataset((out / "dataset.csv").string());
  CHECK(back.size() == r.run.dataset.size());
  const auto& extra = back.provenance().extra;
  CHECK(std::count_if(extra.begin(), extra.end(),
                      [](const auto& kv) { return kv.first == "config_hash"; }) == 1);
  CHECK(Slurp(out / "report.json").find("\"delivered_fps\"") != std::string::npos);
}

TEST_CASE("cli exit codes and outputs") {
  fs::path dir = ScratchDir();
  CHECK(RunCli("").code == 2);
  CHECK(RunCli("run").code == 2);
  CHECK(RunCli("frobnicate").code == 2);
  CHECK(RunCli("run --config /nonexistent/x.cfg").code == 3);

  WriteText(dir / "a.csv", "100,100\n100,100\n");
  WriteText(dir / "b.csv", "116,116\n116,116\n");
  WriteText(dir / "c.csv", "1,2,3\n");
  Cli same = RunCli("psnr " + (dir / "a.csv").string() + " " + (dir / "a.csv").string());
  CHECK(same.code == 0);
  CHECK(same.out == "mse=0 psnr=inf\n");
  Cli sixteen = RunCli("psnr " + (dir / "a.csv").string() + " " + (dir / "b.csv").string());
  CHECK(sixteen.out == "mse=256 psnr=24.0484\n");
  CHECK(RunCli("psnr " + (dir / "a.csv").string() + " " + (dir / "c.csv").string()).code == 2);

  std::string cfg = SANET_SOURCE_DIR "/configs/dumbbell.cfg";
  Cli regs = RunCli("registers --config " + cfg + " \"set-priority 0 6\" dump-registers");
  CHECK(regs.code == 0);
  CHECK(regs.out.find("flow 0 10.0.0.1,10.0.0.3,5000,5004,17 prio=6") != std::string::npos);
  CHECK(RunCli("registers --config " + cfg + " \"set-priority 5 1\"").code == 2);
  CHECK(RunCli("registers --config " + cfg + " \"set-priority 0 8\"").code == 2);
  CHECK(RunCli("registers --config " + cfg + " frob").code == 2);
}

TEST_CASE("cli pipeline from synthetic trace to roc") {
  fs::path dir = ScratchDir() / "pipeline";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::string trace = (dir / "trace.csv").string();
  std::string model = (dir / "model.json").string();
  CHECK(RunCli("gen-trace --profiles " SANET_SOURCE_DIR "/configs/iot_profiles.cfg --per-class "
               "200 --out " + trace).code == 0);
  Dataset d = ImportDataset(trace);
  CHECK(d.size() == 1200);

  Cli train = RunCli("train --dataset " + trace + " --model " + model + " --kind rf --trees 5");
  CHECK(train.code == 0);
  CHECK(train.out.find("accuracy=") != std::string::npos);
  CHECK(RunCli("train --dataset " + trace + " --model " + model + " --kind svm").code == 2);

  Cli predict = RunCli("predict --model " + model + " --dataset " + trace);
  CHECK(predict.code == 0);
  CHECK(std::count(predict.out.begin(), predict.out.end(), '\n') == 1201);

  CHECK(RunCli("roc --model " + model + " --dataset " + trace + " --out " + dir.string()).code ==
        0);
  std::string auc = Slurp(dir / "auc.csv");
  CHECK(std::count(auc.begin(), auc.end(), '\n') == 7);
  CHECK(fs::exists(dir / "roc_class4.csv"));
}
