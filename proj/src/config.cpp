#include "gridsched/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace gridsched {
namespace {

using nlohmann::json;

// Reads the members of one JSON object and rejects any it was not asked for.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(where() + " must be an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return obj_.contains(key);
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return obj_.at(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_number()) throw ConfigError(child(key) + " must be a number");
    return v.get<double>();
  }

  long integer(const std::string& key, long fallback) {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_number_integer()) throw ConfigError(child(key) + " must be an integer");
    return v.get<long>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_string()) throw ConfigError(child(key) + " must be a string");
    return v.get<std::string>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_boolean()) throw ConfigError(child(key) + " must be true or false");
    return v.get<bool>();
  }

  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.count(key)) throw ConfigError("unknown key '" + child(key) + "'");
    }
  }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }

  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_grid(ObjectReader& parent, GridSpec& grid) {
  if (!parent.has("grid")) return;
  ObjectReader r(parent.raw("grid"), "grid");
  grid.n_time = static_cast<int>(r.integer("n_time", grid.n_time));
  grid.n_freq = static_cast<int>(r.integer("n_freq", grid.n_freq));
  grid.window_ms = r.number("window_ms", grid.window_ms);
  grid.bandwidth_mhz = r.number("bandwidth_mhz", grid.bandwidth_mhz);
  r.finish();
}

void read_services(ObjectReader& parent, Scenario& scn) {
  if (!parent.has("services")) return;
  ObjectReader r(parent.raw("services"), "services");
  if (r.has("urllc")) {
    const json& list = r.raw("urllc");
    if (!list.is_array()) throw ConfigError("services.urllc must be an array");
    scn.urllc.clear();
    for (std::size_t i = 0; i < list.size(); ++i) {
      ObjectReader u(list[i], "services.urllc[" + std::to_string(i) + "]");
      UrllcParams p{64.0, 1.0};
      p.q_kbps = u.number("q_kbps", p.q_kbps);
      p.tau_ms = u.number("tau_ms", p.tau_ms);
      u.finish();
      scn.urllc.push_back(p);
    }
  }
  if (r.has("embb")) {
    ObjectReader e(r.raw("embb"), "services.embb");
    scn.embb_count = static_cast<int>(e.integer("count", scn.embb_count));
    scn.embb_tau_ms = e.number("tau_ms", scn.embb_tau_ms);
    e.finish();
  }
  r.finish();
}

void read_channel(ObjectReader& parent, Scenario& scn) {
  if (!parent.has("channel")) return;
  ObjectReader r(parent.raw("channel"), "channel");
  scn.snr.lo_db = r.number("snr_db_min", scn.snr.lo_db);
  scn.snr.hi_db = r.number("snr_db_max", scn.snr.hi_db);
  if (r.has("efficiency")) {
    const json& eff = r.raw("efficiency");
    if (!eff.is_array() || eff.size() != kShapeCount) {
      throw ConfigError("channel.efficiency must be an array of " + std::to_string(kShapeCount) + " numbers");
    }
    for (std::size_t i = 0; i < kShapeCount; ++i) {
      if (!eff[i].is_number()) throw ConfigError("channel.efficiency entries must be numbers");
      scn.model.efficiency[i] = eff[i].get<double>();
    }
  }
  r.finish();
}

void read_solver(ObjectReader& parent, SolverParams& p) {
  if (!parent.has("solver")) return;
  ObjectReader r(parent.raw("solver"), "solver");
  p.r_tilde = r.number("r_tilde", p.r_tilde);
  p.time_limit_ms = r.number("time_limit_ms", p.time_limit_ms);
  p.gap_tol = r.number("gap_tol", p.gap_tol);
  const std::string mode = r.string("exact_mode", to_string(p.exact_mode));
  const auto parsed = parse_exact_mode(mode);
  if (!parsed) throw ConfigError("solver.exact_mode must be full, reduced or skip, got '" + mode + "'");
  p.exact_mode = *parsed;
  p.exact_trials = static_cast<int>(r.integer("exact_trials", p.exact_trials));
  p.bpb_h = static_cast<int>(r.integer("bpb_h", p.bpb_h));
  p.mbp_delta = r.number("mbp_delta", p.mbp_delta);
  const std::string loss = r.string("loss_metric", p.literal_loss ? "aggregated_literal" : "aggregated");
  if (loss != "aggregated" && loss != "aggregated_literal") {
    throw ConfigError("solver.loss_metric must be aggregated or aggregated_literal, got '" + loss + "'");
  }
  p.literal_loss = loss == "aggregated_literal";
  p.lp_max_iterations = r.integer("lp_max_iterations", p.lp_max_iterations);
  r.finish();
}

}  // namespace

Scenario parse_scenario(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }

  Scenario scn;
  ObjectReader r(doc, "");
  if (!r.has("schema_version")) throw ConfigError("schema_version is required");
  const long version = r.integer("schema_version", 0);
  if (version != kConfigSchemaVersion) {
    throw ConfigError("unsupported schema_version " + std::to_string(version) + " (expected " +
                      std::to_string(kConfigSchemaVersion) + ")");
  }
  scn.scenario_id = r.string("scenario_id", scn.scenario_id);
  read_grid(r, scn.grid);
  const std::string numerology = r.string("numerology", scn.numerology.name());
  const auto num = parse_numerology(numerology);
  if (!num) throw ConfigError("unknown numerology '" + numerology + "'");
  scn.numerology = *num;
  read_services(r, scn);
  read_channel(r, scn);
  scn.trials = static_cast<int>(r.integer("trials", scn.trials));
  const long seed = r.integer("base_seed", static_cast<long>(scn.base_seed));
  if (seed < 0) throw ConfigError("base_seed must be non-negative");
  scn.base_seed = static_cast<std::uint64_t>(seed);
  if (r.has("roster")) {
    const json& list = r.raw("roster");
    if (!list.is_array()) throw ConfigError("roster must be an array of solver names");
    scn.roster.clear();
    for (const json& item : list) {
      if (!item.is_string()) throw ConfigError("roster entries must be strings");
      const auto s = parse_solver(item.get<std::string>());
      if (!s) throw ConfigError("unknown solver '" + item.get<std::string>() + "' in roster");
      scn.roster.push_back(*s);
    }
  }
  read_solver(r, scn.params);
  if (r.has("output")) {
    ObjectReader o(r.raw("output"), "output");
    scn.record_timing = o.boolean("record_timing", scn.record_timing);
    o.finish();
  }
  r.finish();

  try {
    scn.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return scn;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str());
}

std::string scenario_to_json(const Scenario& scn) {
  json urllc = json::array();
  for (const UrllcParams& u : scn.urllc) urllc.push_back({{"q_kbps", u.q_kbps}, {"tau_ms", u.tau_ms}});
  json roster = json::array();
  for (SolverKind s : scn.roster) roster.push_back(solver_name(s));
  json doc = {
      {"schema_version", kConfigSchemaVersion},
      {"scenario_id", scn.scenario_id},
      {"grid",
       {{"n_time", scn.grid.n_time},
        {"n_freq", scn.grid.n_freq},
        {"window_ms", scn.grid.window_ms},
        {"bandwidth_mhz", scn.grid.bandwidth_mhz}}},
      {"numerology", scn.numerology.name()},
      {"services", {{"urllc", urllc}, {"embb", {{"count", scn.embb_count}, {"tau_ms", scn.embb_tau_ms}}}}},
      {"channel",
       {{"snr_db_min", scn.snr.lo_db}, {"snr_db_max", scn.snr.hi_db}, {"efficiency", scn.model.efficiency}}},
      {"trials", scn.trials},
      {"base_seed", scn.base_seed},
      {"roster", roster},
      {"solver",
       {{"r_tilde", scn.params.r_tilde},
        {"time_limit_ms", scn.params.time_limit_ms},
        {"gap_tol", scn.params.gap_tol},
        {"exact_mode", to_string(scn.params.exact_mode)},
        {"exact_trials", scn.params.exact_trials},
        {"bpb_h", scn.params.bpb_h},
        {"mbp_delta", scn.params.mbp_delta},
        {"loss_metric", scn.params.literal_loss ? "aggregated_literal" : "aggregated"},
        {"lp_max_iterations", scn.params.lp_max_iterations}}},
      {"output", {{"record_timing", scn.record_timing}}},
  };
  return doc.dump(2) + "\n";
}

}  // namespace gridsched
