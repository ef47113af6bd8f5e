#include "dadg/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace dadg {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ValidationError("config " + path + ": " + what);
}

const json& member(const json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(path + "/" + key, "missing required key");
  return *it;
}

void check_keys(const json& obj, const std::string& path, std::set<std::string> allowed) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) fail(path + "/" + it.key(), "unknown key");
  }
}

double number_of(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

int integer_of(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<int>();
}

bool boolean_of(const json& v, const std::string& path) {
  if (!v.is_boolean()) fail(path, "expected a boolean");
  return v.get<bool>();
}

std::string string_of(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

Vector vector_of(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) fail(path, "expected a non-empty array of numbers");
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = number_of(v[i], path + "/" + std::to_string(i));
  }
  return out;
}

Matrix matrix_of(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) fail(path, "expected a non-empty array of rows");
  const std::size_t rows = v.size();
  std::size_t cols = 0;
  Matrix out;
  for (std::size_t r = 0; r < rows; ++r) {
    const json& row = v[r];
    const std::string row_path = path + "/" + std::to_string(r);
    if (!row.is_array() || row.empty()) fail(row_path, "expected a non-empty row");
    if (r == 0) {
      cols = row.size();
      out.resize(rows, cols);
    } else if (row.size() != cols) {
      fail(row_path, "ragged matrix rows");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          number_of(row[c], row_path + "/" + std::to_string(c));
    }
  }
  return out;
}

std::vector<double> number_list_of(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(number_of(v[i], path + "/" + std::to_string(i)));
  }
  return out;
}

GameParameters parse_game(const json& obj, const std::string& path) {
  check_keys(obj, path,
             {"n", "A_a", "A_d", "B_tilde_a", "B_tilde_d", "C_a", "C_d", "omega_a_I", "omega_d_I",
              "omega_a", "omega_d", "obs_cost", "t_f", "x_a0", "x_d0"});
  GameParameters p;
  p.n = integer_of(member(obj, path, "n"), path + "/n");
  p.a_a = matrix_of(member(obj, path, "A_a"), path + "/A_a");
  p.a_d = matrix_of(member(obj, path, "A_d"), path + "/A_d");
  p.b_tilde_a = matrix_of(member(obj, path, "B_tilde_a"), path + "/B_tilde_a");
  p.b_tilde_d = matrix_of(member(obj, path, "B_tilde_d"), path + "/B_tilde_d");
  p.c_a = matrix_of(member(obj, path, "C_a"), path + "/C_a");
  p.c_d = matrix_of(member(obj, path, "C_d"), path + "/C_d");
  p.omega_a_i = number_of(member(obj, path, "omega_a_I"), path + "/omega_a_I");
  p.omega_d_i = number_of(member(obj, path, "omega_d_I"), path + "/omega_d_I");
  p.omega_a = number_of(member(obj, path, "omega_a"), path + "/omega_a");
  p.omega_d = number_of(member(obj, path, "omega_d"), path + "/omega_d");
  p.obs_cost = number_of(member(obj, path, "obs_cost"), path + "/obs_cost");
  p.t_f = number_of(member(obj, path, "t_f"), path + "/t_f");
  p.x_a0 = vector_of(member(obj, path, "x_a0"), path + "/x_a0");
  p.x_d0 = vector_of(member(obj, path, "x_d0"), path + "/x_d0");
  try {
    p.validate();
  } catch (const ValidationError& e) {
    fail(path, e.what());
  }
  return p;
}

AssetTrajectory parse_asset(const json& obj, const std::string& path, int n, double t_f) {
  const std::string kind = string_of(member(obj, path, "type"), path + "/type");
  AssetTrajectory asset;
  if (kind == "linear") {
    check_keys(obj, path, {"type", "A_s", "x_s0"});
    asset = AssetTrajectory::linear(matrix_of(member(obj, path, "A_s"), path + "/A_s"),
                                    vector_of(member(obj, path, "x_s0"), path + "/x_s0"));
  } else if (kind == "sampled") {
    check_keys(obj, path, {"type", "times", "values"});
    const std::vector<double> times =
        number_list_of(member(obj, path, "times"), path + "/times");
    const json& values = member(obj, path, "values");
    if (!values.is_array()) fail(path + "/values", "expected an array of vectors");
    std::vector<Vector> samples;
    for (std::size_t i = 0; i < values.size(); ++i) {
      samples.push_back(vector_of(values[i], path + "/values/" + std::to_string(i)));
    }
    asset = AssetTrajectory::sampled(times, samples);
  } else {
    fail(path + "/type", "expected \"linear\" or \"sampled\"");
  }
  try {
    asset.validate(n, t_f);
  } catch (const ValidationError& e) {
    fail(path, e.what());
  }
  return asset;
}

OptimizerSection parse_optimizer(const json& obj, const std::string& path) {
  check_keys(obj, path, {"eps", "N", "N_cap", "N_range", "O_sweep", "omega_a_sweep"});
  OptimizerSection s;
  if (obj.contains("eps")) {
    s.eps = number_of(obj["eps"], path + "/eps");
    if (!(s.eps > 0.0)) fail(path + "/eps", "must be positive");
  }
  if (obj.contains("N")) {
    const json& n = obj["N"];
    if (n.is_string()) {
      if (n.get<std::string>() != "auto") fail(path + "/N", "expected an integer or \"auto\"");
    } else {
      s.count = integer_of(n, path + "/N");
      if (*s.count < 0) fail(path + "/N", "must be nonnegative");
    }
  }
  if (obj.contains("N_cap")) {
    s.count_cap = integer_of(obj["N_cap"], path + "/N_cap");
    if (s.count_cap < 0) fail(path + "/N_cap", "must be nonnegative");
  }
  if (obj.contains("N_range")) {
    const json& r = obj["N_range"];
    if (!r.is_array() || r.size() != 2) fail(path + "/N_range", "expected [lo, hi]");
    s.count_range_lo = integer_of(r[0], path + "/N_range/0");
    s.count_range_hi = integer_of(r[1], path + "/N_range/1");
    if (s.count_range_lo < 1 || s.count_range_hi < s.count_range_lo) {
      fail(path + "/N_range", "need 1 <= lo <= hi");
    }
  }
  if (obj.contains("O_sweep")) {
    s.obs_cost_sweep = number_list_of(obj["O_sweep"], path + "/O_sweep");
    for (double o : s.obs_cost_sweep) {
      if (!(o > 0.0)) fail(path + "/O_sweep", "entries must be positive");
    }
  }
  if (obj.contains("omega_a_sweep")) {
    s.omega_a_sweep = number_list_of(obj["omega_a_sweep"], path + "/omega_a_sweep");
    for (double w : s.omega_a_sweep) {
      if (!(w > 0.0)) fail(path + "/omega_a_sweep", "entries must be positive");
    }
  }
  return s;
}

SimulationSection parse_simulation(const json& obj, const std::string& path) {
  check_keys(obj, path,
             {"seed", "trials", "dt", "record_traces", "trace_count", "threads", "estimator",
              "schedule_source", "schedule_file"});
  SimulationSection s;
  if (obj.contains("seed")) {
    const json& seed = obj["seed"];
    if (!seed.is_number_unsigned() && !seed.is_number_integer()) {
      fail(path + "/seed", "expected an integer seed");
    }
    s.seed = seed.get<std::uint64_t>();
  }
  if (obj.contains("trials")) s.trials = integer_of(obj["trials"], path + "/trials");
  if (obj.contains("dt")) s.dt = number_of(obj["dt"], path + "/dt");
  if (obj.contains("record_traces")) {
    s.record_traces = boolean_of(obj["record_traces"], path + "/record_traces");
  }
  if (obj.contains("trace_count")) {
    s.trace_count = integer_of(obj["trace_count"], path + "/trace_count");
    if (s.trace_count < 0) fail(path + "/trace_count", "must be nonnegative");
  }
  if (obj.contains("threads")) {
    s.threads = integer_of(obj["threads"], path + "/threads");
    if (s.threads < 0) fail(path + "/threads", "must be nonnegative");
  }
  if (obj.contains("estimator")) {
    const std::string model = string_of(obj["estimator"], path + "/estimator");
    if (model == "decoupled") {
      s.estimator = EstimatorModel::decoupled;
    } else if (model == "coupled") {
      s.estimator = EstimatorModel::coupled;
    } else {
      fail(path + "/estimator", "expected \"decoupled\" or \"coupled\"");
    }
  }
  if (obj.contains("schedule_source")) {
    s.schedule_source = string_of(obj["schedule_source"], path + "/schedule_source");
    if (s.schedule_source != "none" && s.schedule_source != "optimal" &&
        s.schedule_source != "periodic" && s.schedule_source != "file") {
      fail(path + "/schedule_source", "expected none|optimal|periodic|file");
    }
  }
  if (obj.contains("schedule_file")) {
    s.schedule_file = string_of(obj["schedule_file"], path + "/schedule_file");
  }
  if (s.schedule_source == "file" && s.schedule_file.empty()) {
    fail(path + "/schedule_file", "required when schedule_source is \"file\"");
  }
  return s;
}

OutputSection parse_output(const json& obj, const std::string& path) {
  check_keys(obj, path, {"directory"});
  OutputSection s;
  if (obj.contains("directory")) s.directory = string_of(obj["directory"], path + "/directory");
  return s;
}

}  // namespace

RunConfig parse_run_config(const json& doc) {
  check_keys(doc, "", {"game", "asset", "grid", "optimizer", "simulation", "output"});

  RunConfig cfg;
  cfg.raw = doc;
  cfg.game = parse_game(member(doc, "", "game"), "/game");
  cfg.asset = parse_asset(member(doc, "", "asset"), "/asset", cfg.game.n, cfg.game.t_f);

  const json& grid = member(doc, "", "grid");
  check_keys(grid, "/grid", {"M"});
  cfg.grid_intervals = integer_of(member(grid, "/grid", "M"), "/grid/M");
  if (cfg.grid_intervals < 2) fail("/grid/M", "need at least two intervals");

  if (doc.contains("optimizer")) cfg.optimizer = parse_optimizer(doc["optimizer"], "/optimizer");
  if (doc.contains("simulation")) {
    cfg.simulation = parse_simulation(doc["simulation"], "/simulation");
  }
  if (doc.contains("output")) cfg.output = parse_output(doc["output"], "/output");
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    std::ostringstream os;
    os << "config " << path.string() << ": malformed JSON (" << e.what()
       << "); see docs/config.schema.json";
    throw ValidationError(os.str());
  }
  return parse_run_config(doc);
}

}  // namespace dadg
