#include "tcsim/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "tcsim/cli/output.hpp"

namespace tcsim::cli {
namespace {

struct Schema {
  Json defaults;
  std::map<std::string, std::vector<std::string>> choices;
};

Json quantum_chain_defaults() {
  constexpr double pi = std::numbers::pi;
  return {{"sites", 8},           {"epsilon", 0.0},       {"t1", 1.0},          {"t2", 1.0},
          {"coupling", "nearest_neighbor"},               {"j_min", pi / 8},    {"j_max", 3 * pi / 8},
          {"j0", 1.0},            {"alpha", 1.5},         {"interaction_scale", 1.0},
          {"hz_min", 0.0},        {"hz_max", pi},         {"hx", 0.0},          {"hy", 0.0}};
}

const std::map<std::pair<std::string, std::string>, Schema>& registry() {
  static const auto table = [] {
    std::map<std::pair<std::string, std::string>, Schema> t;
    const std::vector<std::string> couplings{"nearest_neighbor", "power_law"};

    Json magnetization = quantum_chain_defaults();
    magnetization["periods"] = 100;
    magnetization["initial"] = "all_up";
    magnetization["axis"] = "z";
    magnetization["echo"] = true;
    t[{"quantum", "magnetization"}] = {magnetization,
                                       {{"coupling", couplings},
                                        {"initial", {"all_up", "neel", "x_polarized", "random"}},
                                        {"axis", {"z", "x"}}}};
    t[{"quantum", "spectrum"}] = {quantum_chain_defaults(), {{"coupling", couplings}}};

    t[{"oscillator", "mathieu"}] = {{{"a", 1.0}, {"delta", 0.1}, {"damping", 0.0}, {"substeps", 2048}}, {}};
    t[{"oscillator", "chain"}] = {{{"sites", 32},
                                   {"coupling", -0.05},
                                   {"boundary", "periodic"},
                                   {"omega0", 1.0},
                                   {"delta", 0.5},
                                   {"omega_d", 2.0},
                                   {"kappa", 1.0},
                                   {"friction", 0.0},
                                   {"temperature", 0.0},
                                   {"periods", 400},
                                   {"substeps", 128},
                                   {"q0", 0.5},
                                   {"p0", 0.0},
                                   {"blowup_bound", 0.0}},
                                  {{"boundary", {"periodic", "open"}}}};
    t[{"oscillator", "heating"}] = {{{"sites", 256},
                                     {"omega0", 1.0},
                                     {"delta", 4.0},
                                     {"omega_d", 4.0},
                                     {"kappa", 1.0},
                                     {"q0", 1.0},
                                     {"p_spread", 0.05},
                                     {"max_time", 2e4},
                                     {"substeps", 128},
                                     {"plateau_fraction", 0.2},
                                     {"min_rise", 0.5}},
                                    {}};

    t[{"pca", "retention"}] = {{{"rule", "toom"},
                                {"lx", 64},
                                {"ly", 64},
                                {"steps", 1000},
                                {"bias", 0.0},
                                {"amplitude", 0.04}},
                               {{"rule", {"toom", "pi_toom", "glauber"}}}};

    t[{"cdw", "staircase"}] = {{{"omega0_tau", 2.0},
                                {"e_threshold", 1.0},
                                {"e_ac", 1.0},
                                {"omega_d", 0.7},
                                {"inertial", true},
                                {"e_dc_min", 0.0},
                                {"e_dc_max", 1.5},
                                {"e_dc_points", 76},
                                {"periods", 240},
                                {"substeps", 128},
                                {"temperature", 0.0},
                                {"chain_sites", 0},
                                {"stiffness", 0.3},
                                {"warm_start", true}},
                               {}};
    return t;
  }();
  return table;
}

const Schema& schema_for(const std::string& experiment, const std::string& name) {
  const auto it = registry().find({experiment, name});
  if (it == registry().end()) {
    std::string known;
    for (const auto& [key, schema] : registry()) known += (known.empty() ? "" : ", ") + key.first + "/" + key.second;
    throw ConfigError("experiment/name: unknown pair '" + experiment + "/" + name + "' (known: " + known + ")");
  }
  return it->second;
}

std::string key_list(const Json& object) {
  std::string out;
  for (const auto& item : object.items()) out += (out.empty() ? "" : ", ") + item.key();
  return out;
}

void reject_unknown(const Json& object, const std::set<std::string>& allowed, const std::string& prefix) {
  for (const auto& item : object.items())
    if (!allowed.contains(item.key())) {
      std::string known;
      for (const auto& k : allowed) known += (known.empty() ? "" : ", ") + k;
      throw ConfigError(prefix + item.key() + ": unknown key (allowed: " + known + ")");
    }
}

std::string type_name(const Json& value) {
  if (value.is_boolean()) return "boolean";
  if (value.is_number_integer()) return "integer";
  if (value.is_number()) return "number";
  if (value.is_string()) return "string";
  return value.type_name();
}

// Returns the value in the type of the default.
Json check_value(const std::string& path, const Json& fallback, const Json& value,
                 const std::vector<std::string>* choices) {
  auto mismatch = [&] {
    return ConfigError(path + ": expected " + type_name(fallback) + ", got " + value.dump());
  };
  if (fallback.is_boolean()) {
    if (!value.is_boolean()) throw mismatch();
    return value;
  }
  if (fallback.is_number_integer()) {
    if (value.is_number_integer()) return value;
    if (value.is_number_float()) {
      const double v = value.get<double>();
      if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 9e15) return static_cast<long long>(v);
    }
    throw mismatch();
  }
  if (fallback.is_number()) {
    if (!value.is_number()) throw mismatch();
    if (!std::isfinite(value.get<double>())) throw ConfigError(path + ": must be finite");
    return value.get<double>();
  }
  if (fallback.is_string()) {
    if (!value.is_string()) throw mismatch();
    if (choices && std::find(choices->begin(), choices->end(), value.get<std::string>()) == choices->end()) {
      std::string known;
      for (const auto& c : *choices) known += (known.empty() ? "" : ", ") + c;
      throw ConfigError(path + ": '" + value.get<std::string>() + "' is not one of " + known);
    }
    return value;
  }
  throw mismatch();
}

std::uint64_t as_seed(const Json& value, const std::string& path) {
  if (value.is_number_unsigned()) return value.get<std::uint64_t>();
  if (value.is_number_integer() && value.get<long long>() >= 0) return static_cast<std::uint64_t>(value.get<long long>());
  throw ConfigError(path + ": expected a non-negative integer, got " + value.dump());
}

std::vector<std::uint64_t> parse_seeds(const Json& value) {
  std::vector<std::uint64_t> seeds;
  if (value.is_array()) {
    for (std::size_t i = 0; i < value.size(); ++i) seeds.push_back(as_seed(value[i], "seeds[" + std::to_string(i) + "]"));
  } else if (value.is_object()) {
    reject_unknown(value, {"first", "count"}, "seeds.");
    const std::uint64_t first = value.contains("first") ? as_seed(value["first"], "seeds.first") : 0;
    if (!value.contains("count")) throw ConfigError("seeds.count: required");
    const std::uint64_t count = as_seed(value["count"], "seeds.count");
    if (count > 1000000) throw ConfigError("seeds.count: at most 1000000");
    for (std::uint64_t i = 0; i < count; ++i) seeds.push_back(first + i);
  } else {
    throw ConfigError("seeds: expected an array or {first, count}");
  }
  if (seeds.empty()) throw ConfigError("seeds: empty seed list");
  auto sorted = seeds;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw ConfigError("seeds: duplicate seed");
  return seeds;
}

ScanAxis parse_axis(const Json& value, const Json& params, const std::string& path) {
  if (!value.is_object()) throw ConfigError(path + ": expected an object");
  reject_unknown(value, {"param", "values", "start", "stop", "count"}, path + ".");
  if (!value.contains("param") || !value["param"].is_string()) throw ConfigError(path + ".param: required string");
  ScanAxis axis;
  axis.param = value["param"].get<std::string>();
  if (!params.contains(axis.param))
    throw ConfigError(path + ".param: '" + axis.param + "' is not a parameter (known: " + key_list(params) + ")");
  const Json& fallback = params[axis.param];
  if (!fallback.is_number()) throw ConfigError(path + ".param: '" + axis.param + "' is not numeric");

  if (value.contains("values")) {
    if (value.contains("start") || value.contains("stop") || value.contains("count"))
      throw ConfigError(path + ": give either values or start/stop/count");
    if (!value["values"].is_array()) throw ConfigError(path + ".values: expected an array");
    for (std::size_t i = 0; i < value["values"].size(); ++i) {
      const Json v = check_value(path + ".values[" + std::to_string(i) + "]", fallback, value["values"][i], nullptr);
      axis.values.push_back(v.get<double>());
    }
  } else {
    for (const char* key : {"start", "stop", "count"})
      if (!value.contains(key)) throw ConfigError(path + "." + key + ": required without values");
    const double start = check_value(path + ".start", 0.0, value["start"], nullptr).get<double>();
    const double stop = check_value(path + ".stop", 0.0, value["stop"], nullptr).get<double>();
    const long long count = check_value(path + ".count", 0, value["count"], nullptr).get<long long>();
    if (count < 0) throw ConfigError(path + ".count: must be non-negative");
    for (long long i = 0; i < count; ++i)
      axis.values.push_back(count == 1 ? start : start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1));
    if (fallback.is_number_integer())
      for (std::size_t i = 0; i < axis.values.size(); ++i)
        check_value(path + ".values[" + std::to_string(i) + "]", fallback, axis.values[i], nullptr);
  }
  if (axis.values.empty()) throw ConfigError(path + ": empty grid");
  return axis;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> known_experiments() {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [key, schema] : registry()) out.push_back(key);
  return out;
}

Json default_params(const std::string& experiment, const std::string& name) {
  return schema_for(experiment, name).defaults;
}

Json default_config(const std::string& experiment, const std::string& name) {
  return {{"experiment", experiment},
          {"name", name},
          {"params", default_params(experiment, name)},
          {"seeds", {0}},
          {"out", "tcsim_out"}};
}

Json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const std::size_t end = std::min(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + e.what());
  }
}

Json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_json_text(buffer.str(), path.string());
}

void apply_override(Json& document, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--set " + assignment + ": expected key=value");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(text);
  } catch (const Json::parse_error&) {
    value = text;
  }
  Json* node = &document;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError("--set " + path + ": empty path component");
    if (node->is_null()) *node = Json::object();
    if (!node->is_object()) throw ConfigError("--set " + path + ": '" + path.substr(0, start ? start - 1 : 0) + "' is not an object");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

ExperimentConfig validate_config(const Json& document) {
  if (!document.is_object()) throw ConfigError("config: expected a JSON object");
  reject_unknown(document, {"experiment", "name", "params", "seeds", "out", "scan"}, "");
  for (const char* key : {"experiment", "name"})
    if (!document.contains(key) || !document[key].is_string()) throw ConfigError(std::string(key) + ": required string");

  ExperimentConfig config;
  config.experiment = document["experiment"].get<std::string>();
  config.name = document["name"].get<std::string>();
  const Schema& schema = schema_for(config.experiment, config.name);

  config.params = schema.defaults;
  if (document.contains("params")) {
    const Json& user = document["params"];
    if (!user.is_object()) throw ConfigError("params: expected an object");
    for (const auto& item : user.items()) {
      if (!schema.defaults.contains(item.key()))
        throw ConfigError("params." + item.key() + ": unknown key (known: " + key_list(schema.defaults) + ")");
      const auto choice = schema.choices.find(item.key());
      config.params[item.key()] = check_value("params." + item.key(), schema.defaults[item.key()], item.value(),
                                              choice == schema.choices.end() ? nullptr : &choice->second);
    }
  }

  config.seeds = document.contains("seeds") ? parse_seeds(document["seeds"]) : std::vector<std::uint64_t>{0};

  if (document.contains("out")) {
    if (!document["out"].is_string() || document["out"].get<std::string>().empty())
      throw ConfigError("out: expected a non-empty string");
    config.out = document["out"].get<std::string>();
  }

  if (document.contains("scan")) {
    const Json& scan = document["scan"];
    if (!scan.is_object()) throw ConfigError("scan: expected an object");
    reject_unknown(scan, {"axes", "metric"}, "scan.");
    if (!scan.contains("axes") || !scan["axes"].is_array()) throw ConfigError("scan.axes: required array");
    const std::size_t n = scan["axes"].size();
    if (n == 0) throw ConfigError("scan.axes: empty grid");
    if (n > 2) throw ConfigError("scan.axes: at most two axes");
    ScanSpec spec;
    for (std::size_t i = 0; i < n; ++i)
      spec.axes.push_back(parse_axis(scan["axes"][i], config.params, "scan.axes[" + std::to_string(i) + "]"));
    if (n == 2 && spec.axes[0].param == spec.axes[1].param) throw ConfigError("scan.axes: both axes name the same parameter");
    if (scan.contains("metric")) {
      if (!scan["metric"].is_string()) throw ConfigError("scan.metric: expected a string");
      spec.metric = scan["metric"].get<std::string>();
    }
    config.scan = std::move(spec);
  }
  return config;
}

Json ExperimentConfig::effective(bool with_out) const {
  Json doc{{"experiment", experiment}, {"name", name}, {"params", params}, {"seeds", seeds}};
  if (with_out) doc["out"] = out.string();
  if (scan) {
    Json axes = Json::array();
    for (const auto& axis : scan->axes) {
      Json values = Json::array();
      for (double v : axis.values) {
        if (params[axis.param].is_number_integer())
          values.push_back(static_cast<long long>(v));
        else
          values.push_back(v);
      }
      axes.push_back({{"param", axis.param}, {"values", values}});
    }
    doc["scan"] = {{"axes", axes}};
    if (!scan->metric.empty()) doc["scan"]["metric"] = scan->metric;
  }
  return doc;
}

std::string ExperimentConfig::effective_text() const { return effective(false).dump(2) + "\n"; }

std::string ExperimentConfig::hash() const { return sha256_hex(effective_text()); }

}  // namespace tcsim::cli
