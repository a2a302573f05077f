#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dyadlab/io.hpp"
#include "dyadlab/norms.hpp"

using namespace dyadlab;
namespace fs = std::filesystem;

namespace {

const fs::path kDataDir = fs::path(DYADLAB_SOURCE_DIR) / "data";

fs::path scratchDir(const std::string& name) {
  auto d = fs::temp_directory_path() / ("dyadlab-cli-" + std::to_string(::getpid())) / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + DYADLAB_CLI_PATH + " " + args + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path onlyFile(const fs::path& dir, const std::string& prefix, const std::string& ext) {
  fs::path found;
  int n = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (name.rfind(prefix, 0) == 0 && e.path().extension() == ext) {
      found = e.path();
      ++n;
    }
  }
  REQUIRE(n == 1);
  return found;
}

Json readJson(const fs::path& p) { return Json::parse(slurp(p)); }

}  // namespace

TEST_CASE("config text and validation") {
  auto kv = parseKeyValueText("# header\ndepth = 4\n\nseed=9  # trailing\n");
  CHECK(kv.size() == 2);
  CHECK(kv.at("depth") == "4");
  CHECK(kv.at("seed") == "9");
  CHECK_THROWS_AS(parseKeyValueText("depth 4\n"), Error);

  RunConfig c;
  c.set("depth", "5");
  c.set("eps-grid", "4:9");
  c.set("lambda", "1/8");
  CHECK(c.depth == 5);
  CHECK(c.epsMin == 4);
  CHECK(c.epsMax == 9);
  CHECK(c.lambdaNum == 1);
  CHECK(c.lambdaDen == 8);
  for (auto [k, v] : std::vector<std::pair<std::string, std::string>>{{"depth", "0"},
                                                                       {"depth", "11"},
                                                                       {"depth", "x"},
                                                                       {"backend", "quad"},
                                                                       {"eps-grid", "1:4"},
                                                                       {"eps-grid", "6:5"},
                                                                       {"h-ratio", "12"},
                                                                       {"h-ratio", "4"},
                                                                       {"strategy", "fast"},
                                                                       {"generator", "odd"},
                                                                       {"no-such-key", "1"}})
    CHECK_THROWS_AS(c.set(k, v), Error);
}

TEST_CASE("config serialization and hash") {
  RunConfig a, b;
  CHECK(a.serialize() == b.serialize());
  CHECK(a.hash() == b.hash());
  CHECK(a.hash().size() == 16);
  b.set("seed", "2");
  CHECK(a.hash() != b.hash());
  // serialize lists every key but the output directory once, sorted
  std::istringstream in(a.serialize());
  std::vector<std::string> keys;
  for (std::string line; std::getline(in, line);) keys.push_back(line.substr(0, line.find('=')));
  CHECK(std::is_sorted(keys.begin(), keys.end()));
  CHECK(keys.size() == RunConfig::keys().size() - 1);
  CHECK(std::find(keys.begin(), keys.end(), "out") == keys.end());
  // reading the serialization back reproduces the config
  RunConfig c;
  for (const auto& [k, v] : parseKeyValueText(b.serialize())) c.set(k, v);
  CHECK(c.hash() == b.hash());
  // FNV-1a 64 reference values
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("symbol and open set JSON round trips") {
  auto b = loadSymbol((kDataDir / "sample_symbol.json").string());
  CHECK(b.N == 2);
  CHECK(b.at(factorIndex("0:0"), factorIndex("0:0")) == Surd::fraction(1, 2));
  CHECK(b.at(0, 0).isZero());
  CHECK(b.at(factorIndex("1:0"), factorIndex("1:1")) == Surd::fraction(-3, 4));
  CHECK(b.at(factorIndex("c"), factorIndex("1:0")) == Surd::fraction(1, 1));
  auto back = symbolFromJson(symbolToJson(b));
  CHECK(back == b);
  CHECK_THROWS_AS(symbolFromJson(Json::parse(R"({"N":2,"coeffs":[{"rect":"2:0|0:0","num":1,"den":1}]})")), Error);
  CHECK_THROWS_AS(symbolFromJson(Json::parse(R"({"coeffs":[]})")), Error);
  HaarExpansion<Surd> irr(1);
  irr.at(0, 0) = Surd::sqrt2();
  CHECK_THROWS_AS(symbolToJson(irr), Error);

  auto U = DyadicOpenSet::fromRectangles(3, {parseRectangle("1:0|2:3"), parseRectangle("3:5|0:0")});
  auto j = openSetToJson(U);
  CHECK(j.at("cells").get<long>() == U.count());
  CHECK(openSetFromJson(j).cells() == U.cells());
  for (int k = 0; k <= 3; ++k) CHECK(factorIndex(factorName(k)) == k);
}

TEST_CASE("csv quoting") {
  auto d = scratchDir("csv");
  {
    CsvWriter w(d / "t.csv", {"a", "b"});
    w.row({"x,y", "say \"hi\""});
    CHECK_THROWS_AS(w.row({"only one"}), Error);
  }
  CHECK(slurp(d / "t.csv") == "a,b\n\"x,y\",\"say \"\"hi\"\"\"\n");
}

TEST_CASE("exit codes") {
  auto d = scratchDir("exit");
  const std::string out = " --out " + d.string();
  CHECK(run("verify-algebra --depth 2" + out) == 0);
  CHECK(run("no-such-command" + out) == 2);
  CHECK(run("verify-algebra --depth 0" + out) == 2);
  CHECK(run("counterexample --eps-grid 1:5" + out) == 2);
  CHECK(run("bmo --depth 3 --strategy exact" + out) == 2);
  CHECK(run("smallness --depth 5" + out) == 2);
  CHECK(run("verify-algebra --config /no/such/file" + out) == 2);
  // the enlargement guard fails once depth 3 is included
  CHECK(run("theorem-bmor --depth 2 --trials 50" + out) == 0);
  CHECK(run("theorem-bmor --depth 3 --trials 50" + out) == 1);
}

TEST_CASE("flags override env override config file") {
  auto d = scratchDir("precedence");
  const auto cfgFile = d / "run.cfg";
  std::ofstream(cfgFile) << "seed = 5\ntrials = 7\nout = " << (d / "from-file").string() << "\n";
  REQUIRE(run("verify-algebra --depth 1 --config " + cfgFile.string()) == 0);
  auto cfg = loadConfigFile(cfgFile.string());
  cfg.set("depth", "1");
  CHECK(fs::exists(d / "from-file" / ("config-" + cfg.hash() + ".txt")));

  REQUIRE(run("verify-algebra --depth 1 --config " + cfgFile.string(), "DYADLAB_SEED=6") == 0);
  cfg.set("seed", "6");
  CHECK(fs::exists(d / "from-file" / ("config-" + cfg.hash() + ".txt")));

  const auto flagOut = d / "from-flag";
  REQUIRE(run("verify-algebra --depth 1 --seed 8 --out " + flagOut.string() + " --config " + cfgFile.string(),
              "DYADLAB_SEED=6 DYADLAB_DEPTH=2") == 0);
  auto path = onlyFile(flagOut, "config-", ".txt");
  auto written = parseKeyValueText(slurp(path));
  CHECK(written.at("seed") == "8");
  CHECK(written.at("depth") == "1");
  CHECK(written.at("trials") == "7");
  CHECK(readJson(onlyFile(flagOut, "verify-algebra-", ".json")).at("config_hash") ==
        path.stem().string().substr(7));
}

TEST_CASE("reruns are byte-identical") {
  auto d1 = scratchDir("rerun1"), d2 = scratchDir("rerun2");
  for (const auto& cmd : {std::string("theorem-mainskip --depth 3 --trials 8"), std::string("counterexample"),
                          std::string("smallness --depth 2")}) {
    REQUIRE(run(cmd + " --out " + d1.string()) == 0);
    REQUIRE(run(cmd + " --out " + d2.string()) == 0);
  }
  int compared = 0;
  for (const auto& e : fs::directory_iterator(d1)) {
    if (e.path().extension() != ".csv") continue;
    CHECK(slurp(e.path()) == slurp(d2 / e.path().filename()));
    ++compared;
  }
  CHECK(compared >= 3);
}

TEST_CASE("bmo on the sample symbol") {
  const auto sym = (kDataDir / "sample_symbol.json").string();
  auto b = loadSymbol(sym);
  const double rect = std::sqrt(bmoRect(b).value.toDouble());
  for (const std::string strategy : {"exact", "heuristic"}) {
    auto d = scratchDir("bmo-" + strategy);
    REQUIRE(run("bmo --depth 2 --strategy " + strategy + " --symbol " + sym + " --out " + d.string()) == 0);
    auto j = readJson(onlyFile(d, "bmo-", ".json"));
    CHECK(j.at("pass").get<bool>());
    CHECK(j.at("bmo_rect").get<double>() == doctest::Approx(rect).epsilon(1e-12));
    CHECK(j.at("bmo_chf").get<double>() >= j.at("bmo_rect").get<double>() * (1 - 1e-12));
    CHECK(j.at("bmo_chf").get<double>() == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(symbolFromJson(j.at("symbol")) == b);
  }
}

TEST_CASE("counterexample artifacts") {
  auto d = scratchDir("cx");
  REQUIRE(run("counterexample --eps-grid 3:6 --out " + d.string()) == 0);
  std::istringstream csv(slurp(onlyFile(d, "counterexample-", ".csv")));
  std::string header;
  std::getline(csv, header);
  CHECK(header == "eps,h,area,n2,n4sq,n_pp,n_pm");
  int rows = 0;
  for (std::string line; std::getline(csv, line);) {
    std::istringstream ls(line);
    std::string eps, h, area;
    std::getline(ls, eps, ',');
    std::getline(ls, h, ',');
    std::getline(ls, area, ',');
    const double e = std::stod(eps), hv = std::stod(h);
    CHECK(hv == doctest::Approx(e / 16));
    CHECK(std::stod(area) == doctest::Approx(e * (2 - hv)).epsilon(1e-9));
    ++rows;
  }
  CHECK(rows == 4);
}
