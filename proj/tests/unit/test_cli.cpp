#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "tcsim/cli/app.hpp"
#include "tcsim/cli/config.hpp"
#include "tcsim/cli/experiments.hpp"
#include "tcsim/cli/output.hpp"
#include "tcsim/core/ensemble.hpp"
#include "tcsim/pca/automaton.hpp"

using namespace tcsim;
using namespace tcsim::cli;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "tcsim");
  std::ostringstream out, err;
  const int code = run_app(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("tcsim_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path write_config(const fs::path& dir, const Json& doc) {
  const auto path = dir / "config.json";
  std::ofstream(path) << doc.dump(2);
  return path;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(path));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::map<std::string, std::string> data_hashes(const fs::path& manifest) {
  std::map<std::string, std::string> out;
  const auto doc = Json::parse(slurp(manifest));
  for (const auto& f : doc["files"]) {
    const auto path = f["path"].get<std::string>();
    if (!path.ends_with(".svg")) out[path] = f["sha256"].get<std::string>();
  }
  return out;
}

Json quantum_config(const fs::path& out) {
  Json doc = default_config("quantum", "magnetization");
  doc["params"]["sites"] = 4;
  doc["params"]["epsilon"] = 0.0;
  doc["params"]["periods"] = 50;
  doc["out"] = out.string();
  return doc;
}

// Undamped Mathieu x'' = -a (1 + delta cos 2t) x over one period pi, classic RK4.
double mathieu_trace(double a, double delta) {
  const int steps = 4000;
  const double h = std::numbers::pi / steps;
  auto rhs = [&](double t, std::array<double, 2> y) {
    return std::array<double, 2>{y[1], -a * (1.0 + delta * std::cos(2 * t)) * y[0]};
  };
  double trace = 0.0;
  for (int column = 0; column < 2; ++column) {
    std::array<double, 2> y{column == 0 ? 1.0 : 0.0, column == 1 ? 1.0 : 0.0};
    for (int k = 0; k < steps; ++k) {
      const double t = k * h;
      const auto k1 = rhs(t, y);
      const auto k2 = rhs(t + h / 2, {y[0] + h / 2 * k1[0], y[1] + h / 2 * k1[1]});
      const auto k3 = rhs(t + h / 2, {y[0] + h / 2 * k2[0], y[1] + h / 2 * k2[1]});
      const auto k4 = rhs(t + h, {y[0] + h * k3[0], y[1] + h * k3[1]});
      for (int i = 0; i < 2; ++i) y[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    }
    trace += y[column];
  }
  return trace;
}

}  // namespace

TEST_CASE("sha256 test vectors") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
        "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST_CASE("number formatting round-trips and CSV layout") {
  for (double v : {0.1, -2.5, 1.0 / 3.0, 6.02214076e23, 1e-300, 123456789.0, -0.0})
    CHECK(std::strtod(format_number(v).c_str(), nullptr) == v);
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(3.0) == "3");
  CHECK(format_number(NAN) == "nan");

  CsvTable t({"x", "flag", "n", "label"});
  t.add_row({0.25, true, 7LL, std::string("a")});
  t.add_row({-1.5, false, -2LL, std::string("b")});
  CHECK(t.str() == "x,flag,n,label\n0.25,true,7,a\n-1.5,false,-2,b\n");
  CHECK_THROWS(t.add_row({1.0}));
  CHECK_THROWS(CsvTable({"a"}).add_row({std::string("x,y")}));
}

TEST_CASE("svg emitters produce polylines and heat-map cells") {
  const auto line = svg_line_plot({{"s", {0, 1, 2}, {1, -1, 1}}}, "t", "x", "y");
  CHECK(line.rfind("<svg", 0) == 0);
  CHECK(line.find("<polyline") != std::string::npos);
  CHECK(line.find("</svg>") != std::string::npos);
  const auto map = svg_heat_map({0, 1}, {0, 1, 2}, {1, 2, 3, 4, 5, NAN}, "t", "x", "y");
  std::size_t cells = 0;
  for (auto pos = map.find("<title>"); pos != std::string::npos; pos = map.find("<title>", pos + 1)) ++cells;
  CHECK(cells == 6);
  CHECK_THROWS(svg_heat_map({0, 1}, {0}, {1.0}, "t", "x", "y"));
}

TEST_CASE("schema validation") {
  Json doc = default_config("pca", "retention");
  CHECK_NOTHROW(validate_config(doc));

  auto rejects = [](Json d, const std::string& fragment) {
    try {
      validate_config(d);
      FAIL("accepted an invalid config");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find(fragment) != std::string::npos);
    }
  };
  Json unknown = doc;
  unknown["params"]["ampltude"] = 0.1;
  rejects(unknown, "params.ampltude");
  Json top = doc;
  top["sedes"] = {1};
  rejects(top, "sedes");
  Json type = doc;
  type["params"]["lx"] = "big";
  rejects(type, "params.lx");
  Json fractional = doc;
  fractional["params"]["lx"] = 8.5;
  rejects(fractional, "params.lx");
  Json choice = doc;
  choice["params"]["rule"] = "majority";
  rejects(choice, "params.rule");
  Json dup = doc;
  dup["seeds"] = {3, 4, 3};
  rejects(dup, "duplicate");
  Json empty_seeds = doc;
  empty_seeds["seeds"] = Json::array();
  rejects(empty_seeds, "seeds");
  Json axis = doc;
  axis["scan"] = {{"axes", {{{"param", "temperature"}, {"values", {1}}}}}};
  rejects(axis, "temperature");
  Json empty_grid = doc;
  empty_grid["scan"] = {{"axes", {{{"param", "bias"}, {"start", 0}, {"stop", 1}, {"count", 0}}}}};
  rejects(empty_grid, "empty grid");
  Json no_axes = doc;
  no_axes["scan"] = {{"axes", Json::array()}};
  rejects(no_axes, "empty grid");
  Json pair = doc;
  pair["name"] = "lifetime";
  rejects(pair, "pca/lifetime");

  Json integral = doc;
  integral["params"]["lx"] = 12.0;
  CHECK(validate_config(integral).params["lx"].is_number_integer());
  Json range = doc;
  range["seeds"] = {{"first", 5}, {"count", 3}};
  CHECK(validate_config(range).seeds == std::vector<std::uint64_t>{5, 6, 7});
}

TEST_CASE("overrides and effective-config round trip") {
  Json doc = default_config("oscillator", "mathieu");
  apply_override(doc, "params.delta=0.25");
  apply_override(doc, "seeds=[4,9]");
  apply_override(doc, "scan.axes=[{\"param\":\"a\",\"start\":0,\"stop\":1,\"count\":3}]");
  apply_override(doc, "out=somewhere");
  const auto config = validate_config(doc);
  CHECK(config.params["delta"] == 0.25);
  CHECK(config.seeds == std::vector<std::uint64_t>{4, 9});
  REQUIRE(config.scan.has_value());
  CHECK(config.scan->axes[0].values == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(config.out == "somewhere");

  const auto again = validate_config(config.effective());
  CHECK(again.effective() == config.effective());
  CHECK(again.hash() == config.hash());
  auto moved = again;
  moved.out = "elsewhere";
  CHECK(moved.hash() == config.hash());

  Json bad = doc;
  apply_override(bad, "params.deltaa=1");
  CHECK_THROWS_AS(validate_config(bad), ConfigError);
  CHECK_THROWS_AS(apply_override(bad, "novalue"), ConfigError);
  CHECK_THROWS_AS(apply_override(bad, "params.delta.x=1"), ConfigError);
}

TEST_CASE("json syntax errors report line and column") {
  try {
    parse_json_text("{\n  \"a\": 1,\n  \"b\": ,\n}", "cfg.json");
    FAIL("parsed invalid json");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).rfind("cfg.json:3:", 0) == 0);
  }
}

TEST_CASE("quantum solvable limit writes M(n) = (-1)^n") {
  const auto dir = scratch("quantum");
  const auto config = write_config(dir, quantum_config(dir / "a"));
  const auto r = invoke({"run", "--config", config.string()});
  REQUIRE(r.code == kExitOk);
  const auto rows = read_csv(dir / "a" / "magnetization.csv");
  REQUIRE(rows.size() == 52);
  CHECK(rows[0] == std::vector<std::string>{"period", "M", "M_stderr"});
  for (int n = 0; n <= 50; ++n) {
    CHECK(std::stoi(rows[n + 1][0]) == n);
    CHECK(std::abs(std::stod(rows[n + 1][1]) - (n % 2 ? -1.0 : 1.0)) < 1e-12);
  }
  const auto text = slurp(dir / "a" / "magnetization.csv");
  CHECK(text.find('\r') == std::string::npos);
  CHECK(text.back() == '\n');
}

TEST_CASE("reruns, worker counts and the dumped config reproduce data hashes") {
  const auto dir = scratch("determinism");
  Json doc = default_config("pca", "retention");
  doc["params"]["lx"] = 16;
  doc["params"]["ly"] = 16;
  doc["params"]["steps"] = 150;
  doc["params"]["amplitude"] = 0.2;
  doc["seeds"] = {{"first", 10}, {"count", 6}};
  const auto config = write_config(dir, doc);
  const auto base = std::vector<std::string>{"run", "--config", config.string()};
  auto with = [&](std::vector<std::string> extra) {
    auto args = base;
    args.insert(args.end(), extra.begin(), extra.end());
    return invoke(args);
  };
  REQUIRE(with({"--out", (dir / "a").string()}).code == 0);
  REQUIRE(with({"--out", (dir / "b").string()}).code == 0);
  REQUIRE(with({"--out", (dir / "c").string(), "--workers", "3"}).code == 0);
  const auto a = data_hashes(dir / "a" / "manifest.json");
  CHECK(a.contains("magnetization.csv"));
  CHECK(a.contains("replicas.csv"));
  CHECK(a.contains("final_state.pbm"));
  CHECK(a == data_hashes(dir / "b" / "manifest.json"));
  CHECK(a == data_hashes(dir / "c" / "manifest.json"));
  CHECK(slurp(dir / "a" / "magnetization.csv") == slurp(dir / "c" / "magnetization.csv"));

  REQUIRE(invoke({"run", "--config", (dir / "a" / "effective_config.json").string(), "--out", (dir / "d").string()}).code == 0);
  CHECK(a == data_hashes(dir / "d" / "manifest.json"));
  const auto ma = Json::parse(slurp(dir / "a" / "manifest.json"));
  const auto md = Json::parse(slurp(dir / "d" / "manifest.json"));
  CHECK(ma["config_hash"] == md["config_hash"]);
  CHECK(ma["tcsim_version"] == "0.3.0");
  CHECK(ma["seeds"] == Json({10, 11, 12, 13, 14, 15}));
  CHECK(ma["wall_clock_seconds"].is_number());

  // Retention agrees with the library routine on the same seeds.
  const auto seeds = core::seed_range(10, 6);
  const auto direct = pca::retention(pca::toom_model(pca::NoiseParams::from_bias(0.0, 0.2)), 16, 16, 150, seeds);
  const auto metrics = read_csv(dir / "a" / "metrics.csv");
  CHECK(metrics[1][0] == "retention");
  CHECK(std::stod(metrics[1][1]) == doctest::Approx(direct.probability).epsilon(1e-15));

  REQUIRE(with({"--out", (dir / "e").string(), "--seed", "100"}).code == 0);
  CHECK(Json::parse(slurp(dir / "e" / "manifest.json"))["seeds"] == Json({100, 101, 102, 103, 104, 105}));
}

TEST_CASE("every listed file carries its content hash") {
  const auto dir = scratch("hashes");
  const auto config = write_config(dir, quantum_config(dir / "a"));
  REQUIRE(invoke({"run", "--config", config.string()}).code == 0);
  const auto manifest = Json::parse(slurp(dir / "a" / "manifest.json"));
  std::set<std::string> listed;
  for (const auto& f : manifest["files"]) {
    const auto path = dir / "a" / f["path"].get<std::string>();
    const auto bytes = slurp(path);
    CHECK(f["sha256"] == sha256_hex(bytes));
    CHECK(f["bytes"] == bytes.size());
    listed.insert(f["path"].get<std::string>());
  }
  for (const auto& entry : fs::directory_iterator(dir / "a"))
    if (entry.path().filename() != "manifest.json") CHECK(listed.contains(entry.path().filename().string()));
}

TEST_CASE("validation failures exit with code 2 and name the field") {
  const auto dir = scratch("validation");
  Json doc = quantum_config(dir / "a");
  doc["params"]["epsilonn"] = 0.1;
  const auto r = invoke({"run", "--config", write_config(dir, doc).string()});
  CHECK(r.code == kExitValidation);
  CHECK(r.err.find("epsilonn") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "a"));

  const auto good = write_config(dir, quantum_config(dir / "b"));
  CHECK(invoke({"run", "--config", good.string(), "--set", "params.sitez=4"}).code == kExitValidation);
  CHECK(invoke({"run", "--config", (dir / "missing.json").string()}).code == kExitValidation);
  CHECK(invoke({"run"}).code == kExitValidation);
  CHECK(invoke({"scan", "--config", good.string()}).code == kExitValidation);
  const auto empty = invoke({"scan", "--config", good.string(), "--set", "scan.axes=[{\"param\":\"epsilon\",\"values\":[]}]"});
  CHECK(empty.code == kExitValidation);
  CHECK(empty.err.find("empty grid") != std::string::npos);
  // Passes the schema but not the module preconditions.
  CHECK(invoke({"run", "--config", good.string(), "--set", "params.sites=0"}).code == kExitValidation);
}

TEST_CASE("a blow-up exits 1 and keeps partial outputs") {
  const auto dir = scratch("blowup");
  Json doc = default_config("oscillator", "chain");
  doc["params"]["sites"] = 4;
  doc["params"]["kappa"] = 0.0;
  doc["params"]["blowup_bound"] = 10.0;
  doc["out"] = (dir / "a").string();
  const auto r = invoke({"run", "--config", write_config(dir, doc).string()});
  CHECK(r.code == kExitRuntime);
  const auto manifest = Json::parse(slurp(dir / "a" / "manifest.json"));
  CHECK(manifest["blew_up"] == true);
  CHECK(manifest["status"] == "blow_up");
  const auto replicas = read_csv(dir / "a" / "replicas.csv");
  CHECK(replicas[1][1] == "true");
  CHECK(std::stoi(replicas[1][2]) > 0);
  CHECK(read_csv(dir / "a" / "positions.csv").size() > 2);
}

TEST_CASE("Mathieu scan matches an independent monodromy trace") {
  const auto dir = scratch("mathieu");
  Json doc = default_config("oscillator", "mathieu");
  doc["scan"] = {{"axes", {{{"param", "a"}, {"start", 0.6}, {"stop", 1.4}, {"count", 9}},
                           {{"param", "delta"}, {"values", {0.0, 0.3, 0.6}}}}}};
  doc["out"] = (dir / "a").string();
  const auto r = invoke({"scan", "--config", write_config(dir, doc).string()});
  REQUIRE(r.code == 0);
  const auto rows = read_csv(dir / "a" / "scan.csv");
  REQUIRE(rows.size() == 28);
  CHECK(rows[0] == std::vector<std::string>{"a", "delta", "max_multiplier", "determinant", "stable"});
  int unstable = 0, compared = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double a = std::stod(rows[i][0]), delta = std::stod(rows[i][1]);
    const double trace = mathieu_trace(a, delta);
    REQUIRE((rows[i][4] == "true" || rows[i][4] == "false"));
    if (std::abs(std::abs(trace) - 2.0) < 1e-3) continue;
    ++compared;
    const bool stable = std::abs(trace) < 2.0;
    CHECK((rows[i][4] == "true") == stable);
    unstable += !stable;
  }
  CHECK(compared >= 20);
  CHECK(unstable >= 2);
  CHECK(slurp(dir / "a" / "scan.svg").find("<rect") != std::string::npos);
  const auto manifest = Json::parse(slurp(dir / "a" / "manifest.json"));
  CHECK(manifest["points"] == 27);
  CHECK(manifest["grid"][1]["values"] == Json({0.0, 0.3, 0.6}));
}

TEST_CASE("PCA scan writes the retention map of phase_scan") {
  const auto dir = scratch("pca_scan");
  Json doc = default_config("pca", "retention");
  doc["params"]["lx"] = 16;
  doc["params"]["ly"] = 16;
  doc["params"]["steps"] = 200;
  doc["seeds"] = {{"first", 0}, {"count", 10}};
  doc["scan"] = {{"axes", {{{"param", "bias"}, {"values", {-0.4, 0.0}}}, {{"param", "amplitude"}, {"values", {0.05, 0.3}}}}},
                 {"metric", "retention"}};
  doc["out"] = (dir / "a").string();
  REQUIRE(invoke({"scan", "--config", write_config(dir, doc).string(), "--workers", "2"}).code == 0);
  const auto rows = read_csv(dir / "a" / "scan.csv");
  REQUIRE(rows.size() == 5);
  const std::vector<double> biases{-0.4, 0.0}, amplitudes{0.05, 0.3};
  const auto map = pca::phase_scan(biases, amplitudes, pca::toom_model, 16, 16, 200, core::seed_range(0, 10));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      const auto& row = rows[1 + i * 2 + j];
      CHECK(std::stod(row[0]) == biases[i]);
      CHECK(std::stod(row[1]) == amplitudes[j]);
      CHECK(std::stod(row[2]) == map.at(i, j));
    }

  Json bad_metric = doc;
  bad_metric["scan"]["metric"] = "lifetime";
  bad_metric["out"] = (dir / "b").string();
  CHECK(invoke({"scan", "--config", write_config(dir, bad_metric).string()}).code == kExitValidation);
}

TEST_CASE("staircase and heating bundles") {
  const auto dir = scratch("bundles");
  Json doc = default_config("cdw", "staircase");
  doc["params"]["e_dc_points"] = 31;
  doc["params"]["periods"] = 200;
  doc["out"] = (dir / "cdw").string();
  REQUIRE(invoke({"run", "--config", write_config(dir, doc).string()}).code == 0);
  const auto stairs = read_csv(dir / "cdw" / "staircase.csv");
  CHECK(stairs.size() == 32);
  CHECK(stairs[0] == std::vector<std::string>{"seed", "e_dc", "winding_rate", "rate_over_omega_d", "differential"});
  CHECK(read_csv(dir / "cdw" / "plateaus.csv")[0] == std::vector<std::string>{"seed", "p", "q", "center", "width"});

  Json heat = default_config("oscillator", "heating");
  heat["params"]["sites"] = 8;
  heat["params"]["max_time"] = 2000.0;
  heat["out"] = (dir / "heat").string();
  REQUIRE(invoke({"run", "--config", write_config(dir, heat).string()}).code == 0);
  const auto energy = read_csv(dir / "heat" / "energy.csv");
  CHECK(energy[0] == std::vector<std::string>{"time", "energy"});
  CHECK(energy.size() > 100);
}

TEST_CASE("defaults and list subcommands") {
  const auto r = invoke({"defaults", "oscillator", "chain"});
  REQUIRE(r.code == 0);
  CHECK_NOTHROW(validate_config(Json::parse(r.out)));
  CHECK(invoke({"defaults", "oscillator", "nope"}).code == kExitValidation);
  CHECK(invoke({"list"}).out.find("quantum magnetization") != std::string::npos);
}

TEST_CASE("config hash is the hash of the dumped effective config") {
  const auto dir = scratch("config_hash");
  const auto config = write_config(dir, quantum_config(dir / "a"));
  REQUIRE(invoke({"run", "--config", config.string()}).code == 0);
  const auto manifest = Json::parse(slurp(dir / "a" / "manifest.json"));
  const auto dumped = slurp(dir / "a" / "effective_config.json");
  CHECK(manifest["config_hash"] == sha256_hex(dumped));
  CHECK_FALSE(Json::parse(dumped).contains("out"));
}
