#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "anosov/harness/config.hpp"
#include "anosov/harness/experiments.hpp"
#include "anosov/harness/report.hpp"
#include "doctest.h"

using namespace anosov;
namespace fs = std::filesystem;

namespace {
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("anosov_harness_" + name);
  fs::remove_all(d);
  return d;
}
}  // namespace

TEST_CASE("config round-trips through its text form") {
  ExperimentConfig c;
  c.model.k = 7;
  c.model.t = 0.3;
  c.model.r = 0.1 / 3;  // not representable in short decimal
  c.model.profile = ProfileKind::Power;
  c.model.alpha = 1.7;
  c.model.m = {3, 1, 2, 1};
  c.conj_tol = 1e-11;
  c.fisher_eps = {0.1, 1.0 / 7};
  c.seed = 18446744073709551615ULL;
  c.out = "some/dir";
  const auto back = parse_config(to_text(c));
  CHECK(to_text(back) == to_text(c));
  CHECK(back.model.r == c.model.r);
  CHECK(back.fisher_eps == c.fisher_eps);
  CHECK(back.seed == c.seed);
  CHECK(back.model.m == c.model.m);
}

TEST_CASE("config parsing: comments, blanks, defaults") {
  const auto c = parse_config("# header\n\nmap.k = 5   # inline\nholder.pairs=10\n");
  CHECK(c.model.k == 5);
  CHECK(c.holder_pairs == 10);
  CHECK(c.beak_samples == ExperimentConfig{}.beak_samples);
}

TEST_CASE("config errors carry the location") {
  auto message = [](const std::string& text) {
    try {
      parse_config(text, "exp.conf");
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message("map.k=5\n\nmap.kk=3\n").find("exp.conf:3") != std::string::npos);
  CHECK(message("map.k=5\n\nmap.kk=3\n").find("map.kk") != std::string::npos);
  CHECK(message("map.t=2\n").find("exp.conf:1") != std::string::npos);
  CHECK(message("map.k=5\nmap.k=6\n").find("duplicate") != std::string::npos);
  CHECK(message("just words\n").find("exp.conf:1") != std::string::npos);
  CHECK(message("holder.pairs=12x\n").find("holder.pairs") != std::string::npos);
  CHECK(message("run.seed=-1\n") != "no error");
  CHECK(message("map.matrix=1,2,3\n") != "no error");
}

TEST_CASE("environment overrides") {
  ExperimentConfig c;
  const auto applied = apply_env(c, {{"ANOSOV_MAP_K", "7"}, {"ANOSOV_HOLDER_PAIRS", "33"}, {"PATH", "/bin"}});
  CHECK(c.model.k == 7);
  CHECK(c.holder_pairs == 33);
  CHECK(applied.size() == 2);
  CHECK(env_name("persistence.M") == "ANOSOV_PERSISTENCE_M");
  CHECK_THROWS_AS(apply_env(c, {{"ANOSOV_MAP_KK", "1"}}), ConfigError);
  CHECK_THROWS_AS(apply_env(c, {{"ANOSOV_MAP_T", "x"}}), ConfigError);
  // every key has a distinct variable
  std::set<std::string> names;
  for (const auto& k : config_keys()) names.insert(env_name(k));
  CHECK(names.size() == config_keys().size());
}

TEST_CASE("csv: empty table keeps its header, numbers round-trip") {
  CsvTable t{{"a", "b"}, {}};
  CHECK(csv_text(t) == "a,b\n");
  t.add({fmt_num(0.1), "x,y"});
  CHECK(csv_text(t) == "a,b\n0.10000000000000001,\"x,y\"\n");
  CHECK(std::stod(fmt_num(1.0 / 3)) == 1.0 / 3);
  CHECK(fmt_num(std::numeric_limits<double>::infinity()) == "inf");
  CHECK_THROWS(t.add({"only one"}));
}

TEST_CASE("svg output is well formed for log-log data") {
  Plot p{"t", "x", "y", true, true, {{"s", {1e-3, 1e-2, 0.0}, {1e-6, 1e-4, 1.0}, false}}, {1e-5}};
  const auto s = svg_text(p);
  CHECK(s.rfind("<svg", 0) == 0);
  CHECK(s.find("</svg>") != std::string::npos);
  CHECK(s.find("nan") == std::string::npos);
  // the x = 0 point is dropped on a log axis
  std::size_t circles = 0;
  for (auto pos = s.find("<circle"); pos != std::string::npos; pos = s.find("<circle", pos + 1)) ++circles;
  CHECK(circles == 2);
}

TEST_CASE("unwritable output directory raises IoError") {
  const auto blocker = fresh_dir("blocker");
  std::ofstream(blocker.string()) << "file, not a directory";
  CHECK_THROWS_AS(ensure_output_dir(blocker / "sub"), IoError);
  RunContext ctx;
  ctx.out = blocker / "sub";
  CHECK_THROWS_AS(run_subcommand("shadow", ctx), IoError);
  fs::remove(blocker);
}

TEST_CASE("bad model parameters and unknown subcommands are config errors") {
  RunContext ctx;
  ctx.out = fresh_dir("badmodel");
  ctx.cfg.model.m = {1, 1, 0, 1};
  CHECK_THROWS_AS(run_subcommand("shadow", ctx), ConfigError);
  CHECK_THROWS_AS(run_subcommand("nonsense", RunContext{}), ConfigError);
}

TEST_CASE("rerun with the same seed gives byte-identical CSV; JSON echoes the config") {
  RunContext ctx;
  ctx.cfg.shadow_xis = {1e-3, 1e-4};
  ctx.cfg.seed = 77;
  const auto a = fresh_dir("det_a"), b = fresh_dir("det_b");
  ctx.out = a;
  const auto oa = run_subcommand("shadow", ctx);
  ctx.out = b;
  ctx.exec = Exec::Serial;
  const auto ob = run_subcommand("shadow", ctx);
  CHECK(exit_code_for(oa) == 0);
  CHECK(oa.artifacts == ob.artifacts);
  for (const auto& f : oa.artifacts)
    if (f.size() > 4 && f.substr(f.size() - 4) == ".csv") CHECK(slurp(a / f) == slurp(b / f));

  const auto j = nlohmann::json::parse(slurp(a / "shadow.json"));
  for (const auto& [k, v] : config_entries(ctx.cfg)) {
    if (k == "run.out") continue;
    CHECK(j["config"][k] == v);
  }
  CHECK(j["status"] == "ok");
  CHECK(j["constants"].contains("C"));

  ctx.cfg.seed = 78;
  ctx.out = b;
  run_subcommand("shadow", ctx);
  CHECK(slurp(a / "shadow.csv") != slurp(b / "shadow.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("map-check at t = 0 passes every check") {
  RunContext ctx;
  ctx.cfg.model.t = 0.0;
  ctx.cfg.cone_samples = 2000;
  ctx.out = fresh_dir("mapcheck");
  const auto o = run_subcommand("map-check", ctx);
  CHECK(o.numeric_ok);
  CHECK(o.summary["checks"]["pass"] == true);
  CHECK(o.summary["checks"]["max_identity_error"] == 0.0);
  fs::remove_all(ctx.out);
}

TEST_CASE("subcommand list") {
  const auto& s = subcommands();
  for (const char* n : {"map-check", "cones", "tangency", "conjugacy", "holder", "spectrum", "shadow", "fisher", "all"})
    CHECK(std::find(s.begin(), s.end(), n) != s.end());
}
