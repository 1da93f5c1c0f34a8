#include "m2m/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "m2m/errors.hpp"

namespace m2m::io {

namespace {

using sim::SimConfig;

void reject_unknown(const Json& obj, const std::string& prefix, const std::set<std::string>& known) {
  if (!obj.is_object()) throw ValidationError(prefix.empty() ? "config" : prefix, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!known.count(key)) throw ValidationError(prefix.empty() ? key : prefix + "." + key, "unknown key");
  }
}

double get_number(const Json& obj, const char* key, const std::string& field, double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ValidationError(field, "expected a number");
  return v.get<double>();
}

int get_int(const Json& obj, const char* key, const std::string& field, int fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) throw ValidationError(field, "expected an integer");
  return v.get<int>();
}

std::string get_string(const Json& obj, const char* key, const std::string& field, std::string fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_string()) throw ValidationError(field, "expected a string");
  return v.get<std::string>();
}

Json homogeneous() {
  Json slices = Json::array();
  const double weights[] = {12, 1, 1, 1, 1};
  for (double w : weights) slices.push_back({{"weight", w}, {"devices", 10}, {"bandwidth", 1.0}});
  return {
      {"scenario", "paper_homogeneous"},
      {"scheme", "pomdp_with_loop"},
      {"seed", 0u},
      {"slots_per_period", 100},
      {"periods", 10},
      {"dp_horizon", 1},
      {"beta", 0.8},
      {"epsilon", 0.1},
      {"phi", 0.1},
      {"collision", {{"mode", "fixed"}, {"value", 0.0}, {"same_choice", 1}}},
      {"rb_transition", {{0.9, 0.1}, {0.95, 0.05}}},
      {"attempt_prob", 1.0},
      {"sensing_window", 5},
      {"max_joint_rbs", 12},
      {"state_cap", 4096},
      {"cell",
       {{"radius_m", 1000.0},
        {"access_rbs", 25},
        {"data_rbs", 0},
        {"preambles", 64},
        {"tx_power_dbm", 20.0},
        {"noise_power_dbm", -104.0}}},
      {"slices", slices},
      {"controller", {{"omega", 0.8}, {"mu", 2.0}, {"min_rb_per_slice", 1}, {"data_rb_floor", 0}}},
      {"mean_ratio", nullptr},
  };
}

}  // namespace

std::vector<std::string> preset_names() { return {"paper_homogeneous", "paper_heterogeneous", "custom"}; }

Json preset_json(std::string_view name) {
  Json doc = homogeneous();
  if (name == "paper_homogeneous") return doc;
  if (name == "paper_heterogeneous") {
    doc["scenario"] = "paper_heterogeneous";
    const int counts[] = {30, 5, 5, 5, 5};
    for (std::size_t i = 0; i < 5; ++i) doc["slices"][i]["devices"] = counts[i];
    return doc;
  }
  if (name == "custom") {
    doc["scenario"] = "custom";
    doc["slices"] = Json::array();
    return doc;
  }
  throw ValidationError("scenario", "unknown preset '" + std::string(name) + "'");
}

sim::SimConfig config_from_json(const Json& user) {
  reject_unknown(user, "",
                 {"scenario", "scheme", "seed", "slots_per_period", "periods", "dp_horizon", "beta", "epsilon",
                  "phi", "collision", "rb_transition", "attempt_prob", "sensing_window", "max_joint_rbs",
                  "state_cap", "cell", "slices", "controller", "mean_ratio"});
  const std::string scenario = get_string(user, "scenario", "scenario", "custom");
  Json doc = preset_json(scenario);
  for (const auto& [key, value] : user.items()) {
    if ((key == "cell" || key == "controller" || key == "collision") && value.is_object()) {
      for (const auto& [k, v] : value.items()) doc[key][k] = v;
    } else {
      doc[key] = value;
    }
  }

  SimConfig c;
  c.scenario = scenario;
  const auto scheme = sim::parse_scheme(get_string(doc, "scheme", "scheme", ""));
  if (!scheme) throw ValidationError("scheme", "unknown scheme");
  c.scheme = *scheme;
  if (!doc["seed"].is_number_integer() || doc["seed"].get<std::int64_t>() < 0) throw ValidationError("seed", "expected a non-negative integer");
  c.seed = doc["seed"].get<std::uint64_t>();
  c.slots_per_period = get_int(doc, "slots_per_period", "slots_per_period", 0);
  c.periods = get_int(doc, "periods", "periods", 0);
  c.dp_horizon = get_int(doc, "dp_horizon", "dp_horizon", 0);
  c.beta = get_number(doc, "beta", "beta", -1);
  c.epsilon = get_number(doc, "epsilon", "epsilon", -1);
  c.phi = get_number(doc, "phi", "phi", -1);
  c.attempt_prob = get_number(doc, "attempt_prob", "attempt_prob", -1);
  c.sensing_window = get_int(doc, "sensing_window", "sensing_window", 0);
  c.max_joint_rbs = get_int(doc, "max_joint_rbs", "max_joint_rbs", 0);
  c.state_cap = get_int(doc, "state_cap", "state_cap", 0);

  const auto& col = doc["collision"];
  reject_unknown(col, "collision", {"mode", "value", "same_choice"});
  const std::string mode = get_string(col, "mode", "collision.mode", "");
  if (mode == "fixed") {
    c.collision.mode = sim::CollisionSpec::Mode::Fixed;
  } else if (mode == "binomial") {
    c.collision.mode = sim::CollisionSpec::Mode::Binomial;
  } else {
    throw ValidationError("collision.mode", "expected \"fixed\" or \"binomial\"");
  }
  c.collision.value = get_number(col, "value", "collision.value", 0.0);
  c.collision.same_choice = get_int(col, "same_choice", "collision.same_choice", 1);

  const auto& t = doc["rb_transition"];
  if (!t.is_array() || t.size() != 2 || !t[0].is_array() || !t[1].is_array() || t[0].size() != 2 ||
      t[1].size() != 2)
    throw ValidationError("rb_transition", "expected a 2x2 array");
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      if (!t[i][j].is_number()) throw ValidationError("rb_transition", "expected numbers");
      c.rb_transition(i, j) = t[i][j].get<double>();
    }

  const auto& cell = doc["cell"];
  reject_unknown(cell, "cell", {"radius_m", "access_rbs", "data_rbs", "preambles", "tx_power_dbm", "noise_power_dbm"});
  c.cell.cell_radius_m = get_number(cell, "radius_m", "cell.radius_m", 0);
  c.cell.access_rbs = get_int(cell, "access_rbs", "cell.access_rbs", 0);
  c.cell.data_rbs = get_int(cell, "data_rbs", "cell.data_rbs", 0);
  c.cell.preambles.preamble_count = get_int(cell, "preambles", "cell.preambles", 0);
  c.tx_power_dbm = get_number(cell, "tx_power_dbm", "cell.tx_power_dbm", 0);
  c.noise_power_dbm = get_number(cell, "noise_power_dbm", "cell.noise_power_dbm", 0);

  const auto& slices = doc["slices"];
  if (!slices.is_array()) throw ValidationError("slices", "expected an array");
  for (const auto& s : slices) {
    reject_unknown(s, "slices", {"weight", "devices", "bandwidth"});
    sim::SliceSpec spec;
    spec.weight = get_number(s, "weight", "slices.weight", 0);
    spec.devices = get_int(s, "devices", "slices.devices", 0);
    spec.bandwidth = get_number(s, "bandwidth", "slices.bandwidth", 1.0);
    c.slices.push_back(spec);
  }

  const auto& ctl = doc["controller"];
  reject_unknown(ctl, "controller", {"omega", "mu", "min_rb_per_slice", "data_rb_floor"});
  c.controller.omega = get_number(ctl, "omega", "controller.omega", 0);
  c.controller.mu = get_number(ctl, "mu", "controller.mu", 0);
  c.controller.min_rb_per_slice = get_int(ctl, "min_rb_per_slice", "controller.min_rb_per_slice", 0);
  c.controller.data_rb_floor = get_int(ctl, "data_rb_floor", "controller.data_rb_floor", 0);

  if (!doc["mean_ratio"].is_null()) c.mean_ratio = get_number(doc, "mean_ratio", "mean_ratio", 0);

  c.validate();
  return c;
}

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string what = e.what();
    if (const auto pos = what.find(": "); pos != std::string::npos) what = what.substr(pos + 2);
    throw ParseError(line, column, what);
  }
}

sim::SimConfig parse_config(std::string_view text) { return config_from_json(parse_json(text)); }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

sim::SimConfig load_config(const std::filesystem::path& path) { return parse_config(read_file(path)); }

Json to_json(const sim::SimConfig& c) {
  Json slices = Json::array();
  for (const auto& s : c.slices)
    slices.push_back({{"weight", s.weight}, {"devices", s.devices}, {"bandwidth", s.bandwidth}});
  const bool fixed = c.collision.mode == sim::CollisionSpec::Mode::Fixed;
  const auto& t = c.rb_transition;
  return {
      {"scenario", c.scenario},
      {"scheme", std::string(sim::scheme_name(c.scheme))},
      {"seed", c.seed},
      {"slots_per_period", c.slots_per_period},
      {"periods", c.periods},
      {"dp_horizon", c.dp_horizon},
      {"beta", c.beta},
      {"epsilon", c.epsilon},
      {"phi", c.phi},
      {"collision",
       {{"mode", fixed ? "fixed" : "binomial"}, {"value", c.collision.value}, {"same_choice", c.collision.same_choice}}},
      {"rb_transition", {{t(0, 0), t(0, 1)}, {t(1, 0), t(1, 1)}}},
      {"attempt_prob", c.attempt_prob},
      {"sensing_window", c.sensing_window},
      {"max_joint_rbs", c.max_joint_rbs},
      {"state_cap", c.state_cap},
      {"cell",
       {{"radius_m", c.cell.cell_radius_m},
        {"access_rbs", c.cell.access_rbs},
        {"data_rbs", c.cell.data_rbs},
        {"preambles", c.cell.preambles.preamble_count},
        {"tx_power_dbm", c.tx_power_dbm},
        {"noise_power_dbm", c.noise_power_dbm}}},
      {"slices", slices},
      {"controller",
       {{"omega", c.controller.omega},
        {"mu", c.controller.mu},
        {"min_rb_per_slice", c.controller.min_rb_per_slice},
        {"data_rb_floor", c.controller.data_rb_floor}}},
      {"mean_ratio", c.mean_ratio ? Json(*c.mean_ratio) : Json(nullptr)},
  };
}

}  // namespace m2m::io
