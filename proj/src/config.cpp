#include "flexroc/config.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace flexroc {

using nlohmann::json;

namespace {

struct Reader {
  std::vector<ConfigError>& errors;

  void fail(const std::string& path, const std::string& message) {
    errors.push_back({path, message});
  }

  bool require_object(const json& j, const std::string& path) {
    if (j.is_object()) return true;
    fail(path, "expected an object");
    return false;
  }

  double number(const json& j, const std::string& path, double fallback = 0.0) {
    if (j.is_number()) return j.get<double>();
    fail(path, "expected a number");
    return fallback;
  }

  double field_number(const json& j, const std::string& key, const std::string& path,
                      double fallback = 0.0, bool required = true) {
    if (!j.contains(key)) {
      if (required) fail(path + "." + key, "missing");
      return fallback;
    }
    return number(j.at(key), path + "." + key, fallback);
  }

  int field_int(const json& j, const std::string& key, const std::string& path, int fallback = 0,
                bool required = true) {
    if (!j.contains(key)) {
      if (required) fail(path + "." + key, "missing");
      return fallback;
    }
    if (!j.at(key).is_number_integer()) {
      fail(path + "." + key, "expected an integer");
      return fallback;
    }
    return j.at(key).get<int>();
  }

  Vec vector(const json& j, const std::string& path) {
    Vec out;
    if (!j.is_array()) {
      fail(path, "expected an array of numbers");
      return out;
    }
    out.reserve(j.size());
    for (std::size_t k = 0; k < j.size(); ++k) {
      if (!j[k].is_number()) {
        fail(path + "[" + std::to_string(k) + "]", "expected a number");
        out.push_back(0.0);
      } else {
        out.push_back(j[k].get<double>());
      }
    }
    return out;
  }

  Vec field_vector(const json& j, const std::string& key, const std::string& path,
                   bool required = true) {
    if (!j.contains(key)) {
      if (required) fail(path + "." + key, "missing");
      return {};
    }
    return vector(j.at(key), path + "." + key);
  }

  Matrix matrix(const json& j, const std::string& path) {
    if (!j.is_array()) {
      fail(path, "expected an array of rows");
      return {};
    }
    const std::size_t rows = j.size();
    std::size_t cols = 0;
    if (rows > 0 && j[0].is_array()) cols = j[0].size();
    Matrix out(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
      if (!j[i].is_array() || j[i].size() != cols) {
        fail(path + "[" + std::to_string(i) + "]", "ragged or non-array row");
        continue;
      }
      for (std::size_t k = 0; k < cols; ++k) {
        if (!j[i][k].is_number()) {
          fail(path + "[" + std::to_string(i) + "][" + std::to_string(k) + "]",
               "expected a number");
        } else {
          out(i, k) = j[i][k].get<double>();
        }
      }
    }
    return out;
  }

  Matrix field_matrix(const json& j, const std::string& key, const std::string& path,
                      bool required = true) {
    if (!j.contains(key)) {
      if (required) fail(path + "." + key, "missing");
      return {};
    }
    return matrix(j.at(key), path + "." + key);
  }
};

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

ConfigLoadResult parse_config_text(const std::string& text) {
  ConfigLoadResult out;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    out.errors.push_back({"<root>", std::string("parse error: ") + e.what()});
    return out;
  }
  Reader rd{out.errors};
  if (!rd.require_object(j, "<root>")) return out;

  ScenarioConfig cfg;
  cfg.schema_version = rd.field_int(j, "schema_version", "<root>", 1);

  if (j.contains("dynamics") && rd.require_object(j.at("dynamics"), "dynamics")) {
    const json& d = j.at("dynamics");
    cfg.dynamics.A = rd.field_matrix(d, "A", "dynamics");
    cfg.dynamics.B = rd.field_matrix(d, "B", "dynamics");
    cfg.dynamics.D = rd.field_matrix(d, "D", "dynamics");
    cfg.dynamics.E = rd.field_matrix(d, "E", "dynamics");
    cfg.dynamics.x0 = rd.field_vector(d, "x0", "dynamics");
    cfg.dynamics.horizon = rd.field_int(d, "horizon", "dynamics", 1);
    cfg.sampling_minutes = rd.field_number(d, "sampling_minutes", "dynamics", 30.0, false);
    if (cfg.dynamics.horizon < 1) rd.fail("dynamics.horizon", "must be >= 1");
  } else if (!j.contains("dynamics")) {
    rd.fail("dynamics", "missing");
  }

  if (j.contains("constraints") && rd.require_object(j.at("constraints"), "constraints")) {
    const json& c = j.at("constraints");
    cfg.constraints.Gx = rd.field_matrix(c, "Gx", "constraints");
    cfg.constraints.gx = rd.field_vector(c, "gx", "constraints");
    cfg.constraints.Gr = rd.field_matrix(c, "Gr", "constraints");
    cfg.constraints.Gu = rd.field_matrix(c, "Gu", "constraints");
    cfg.constraints.Gv = rd.field_matrix(c, "Gv", "constraints");
    cfg.constraints.gr = rd.field_vector(c, "gr", "constraints");
    if (c.contains("gx_steps")) cfg.constraints.gx_steps = rd.field_matrix(c, "gx_steps", "constraints", false);
    if (c.contains("gr_steps")) cfg.constraints.gr_steps = rd.field_matrix(c, "gr_steps", "constraints", false);
  } else if (!j.contains("constraints")) {
    rd.fail("constraints", "missing");
  }

  std::string mode_str = "gamma-only";
  if (j.contains("cost") && rd.require_object(j.at("cost"), "cost")) {
    const json& c = j.at("cost");
    if (c.contains("mode")) {
      if (c.at("mode").is_string()) mode_str = c.at("mode").get<std::string>();
      else rd.fail("cost.mode", "expected a string");
    }
    if (mode_str == "gamma-only") cfg.cost.mode = CostMode::gamma_only;
    else if (mode_str == "cost-and-gamma") cfg.cost.mode = CostMode::cost_and_gamma;
    else rd.fail("cost.mode", "expected 'gamma-only' or 'cost-and-gamma'");
    cfg.cost.c_x = rd.field_vector(c, "c_x", "cost", false);
    cfg.cost.c_u = rd.field_vector(c, "c_u", "cost", false);
    cfg.cost.c_v = rd.field_vector(c, "c_v", "cost", false);
    cfg.cost.c_r = rd.field_vector(c, "c_r", "cost", false);
    const bool lambda_required = cfg.cost.mode == CostMode::cost_and_gamma;
    cfg.cost.lambda = rd.field_number(c, "lambda", "cost", 1.0, lambda_required);
    if (!(cfg.cost.lambda > 0.0)) rd.fail("cost.lambda", "must be > 0");
  } else if (!j.contains("cost")) {
    rd.fail("cost", "missing");
  }

  if (j.contains("uncertainty") && rd.require_object(j.at("uncertainty"), "uncertainty")) {
    const json& u = j.at("uncertainty");
    if (u.contains("flexible") && u.at("flexible").is_array()) {
      for (std::size_t k = 0; k < u.at("flexible").size(); ++k) {
        const json& e = u.at("flexible")[k];
        if (e.is_number_integer()) cfg.uncertainty.flexible.push_back(e.get<int>());
        else rd.fail("uncertainty.flexible[" + std::to_string(k) + "]", "expected an integer");
      }
    } else {
      rd.fail("uncertainty.flexible", u.contains("flexible") ? "expected an array" : "missing");
    }
    Vec rb = rd.field_vector(u, "r_bar", "uncertainty");
    cfg.uncertainty.r_bar.resize(rb.size());
    for (std::size_t k = 0; k < rb.size(); ++k) {
      if (rb[k] != 0.0 && rb[k] != 1.0)
        rd.fail("uncertainty.r_bar[" + std::to_string(k) + "]", "must be 0 or 1");
      else
        cfg.uncertainty.r_bar[k] = static_cast<std::uint8_t>(rb[k]);
    }
  } else if (!j.contains("uncertainty")) {
    rd.fail("uncertainty", "missing");
  }

  if (j.contains("reform") && rd.require_object(j.at("reform"), "reform")) {
    const json& r = j.at("reform");
    cfg.reform.big_m = rd.field_number(r, "big_m", "reform", 1e4, false);
    cfg.reform.gain_bound = rd.field_number(r, "gain_bound", "reform", 1e3, false);
    cfg.reform.bin_gain_lo = rd.field_int(r, "bin_gain_lo", "reform", -1, false);
    cfg.reform.bin_gain_hi = rd.field_int(r, "bin_gain_hi", "reform", 1, false);
    cfg.reform.bin_offset_lo = rd.field_int(r, "bin_offset_lo", "reform", 0, false);
    cfg.reform.bin_offset_hi = rd.field_int(r, "bin_offset_hi", "reform", 1, false);
    if (r.contains("policy_mode")) {
      const std::string pm = r.at("policy_mode").is_string() ? r.at("policy_mode").get<std::string>() : "";
      if (pm == "affine") cfg.reform.policy_mode = PolicyMode::affine;
      else if (pm == "open-loop") cfg.reform.policy_mode = PolicyMode::open_loop;
      else rd.fail("reform.policy_mode", "expected 'affine' or 'open-loop'");
    }
    if (r.contains("dual_sign")) {
      const std::string ds = r.at("dual_sign").is_string() ? r.at("dual_sign").get<std::string>() : "";
      if (ds == "derivation") cfg.reform.dual_sign = DualSign::derivation;
      else if (ds == "statement") cfg.reform.dual_sign = DualSign::statement;
      else rd.fail("reform.dual_sign", "expected 'derivation' or 'statement'");
    }
    if (!(cfg.reform.big_m > 0.0)) rd.fail("reform.big_m", "must be > 0");
  }

  if (j.contains("solver") && rd.require_object(j.at("solver"), "solver")) {
    const json& s = j.at("solver");
    cfg.solver.lp_tol = rd.field_number(s, "lp_tol", "solver", 1e-7, false);
    cfg.solver.int_tol = rd.field_number(s, "int_tol", "solver", 1e-6, false);
    cfg.solver.abs_gap = rd.field_number(s, "abs_gap", "solver", 1e-6, false);
    cfg.solver.max_nodes = static_cast<long>(rd.field_number(s, "max_nodes", "solver", 1e6, false));
    cfg.solver.seed = static_cast<std::uint64_t>(rd.field_number(s, "seed", "solver", 0, false));
    if (!(cfg.solver.lp_tol > 0.0)) rd.fail("solver.lp_tol", "must be > 0");
    if (!(cfg.solver.int_tol > 0.0)) rd.fail("solver.int_tol", "must be > 0");
    if (!(cfg.solver.abs_gap > 0.0)) rd.fail("solver.abs_gap", "must be > 0");
  }

  if (j.contains("flip_model") && rd.require_object(j.at("flip_model"), "flip_model")) {
    FlipModel fm;
    fm.epsilon = rd.field_vector(j.at("flip_model"), "epsilon", "flip_model");
    for (std::size_t k = 0; k < fm.epsilon.size(); ++k)
      if (!(fm.epsilon[k] >= 0.0 && fm.epsilon[k] <= 1.0))
        rd.fail("flip_model.epsilon[" + std::to_string(k) + "]", "outside [0,1]");
    cfg.flip_model = std::move(fm);
  }

  if (j.contains("display") && rd.require_object(j.at("display"), "display")) {
    const json& d = j.at("display");
    cfg.state_offset = rd.field_number(d, "state_offset", "display", 0.0, false);
    if (d.contains("bounds")) {
      Vec b = rd.field_vector(d, "bounds", "display");
      if (b.size() == 2) cfg.display_bounds = {b[0], b[1]};
      else rd.fail("display.bounds", "expected [lower, upper]");
    }
  }

  // Cross-field semantic checks, only meaningful if structure parsed.
  if (out.errors.empty()) {
    try {
      cfg.dynamics.validate();
      cfg.constraints.validate(cfg.dynamics);
    } catch (const std::exception& e) {
      rd.fail("dynamics/constraints", e.what());
    }
    const int mN = cfg.dynamics.m() * cfg.dynamics.horizon;
    try {
      cfg.uncertainty.validate(mN);
    } catch (const std::exception& e) {
      rd.fail("uncertainty", e.what());
    }
    const auto N = static_cast<std::size_t>(cfg.dynamics.horizon);
    auto check_len = [&](const Vec& v, std::size_t want, const std::string& path) {
      if (v.size() != want)
        rd.fail(path, "expected length " + std::to_string(want) + ", got " +
                          std::to_string(v.size()));
    };
    check_len(cfg.cost.c_x, static_cast<std::size_t>(cfg.dynamics.n()) * N, "cost.c_x");
    check_len(cfg.cost.c_u, static_cast<std::size_t>(cfg.dynamics.p()) * N, "cost.c_u");
    check_len(cfg.cost.c_v, static_cast<std::size_t>(cfg.dynamics.q()) * N, "cost.c_v");
    check_len(cfg.cost.c_r, static_cast<std::size_t>(cfg.dynamics.m()) * N, "cost.c_r");
    if (cfg.cost.mode == CostMode::gamma_only) {
      auto nonzero = [](const Vec& v) {
        for (double x : v)
          if (x != 0.0) return true;
        return false;
      };
      if (nonzero(cfg.cost.c_x) || nonzero(cfg.cost.c_u) || nonzero(cfg.cost.c_v) ||
          nonzero(cfg.cost.c_r))
        rd.fail("cost", "cost vectors must be zero in gamma-only mode");
    }
    if (cfg.flip_model &&
        cfg.flip_model->epsilon.size() != cfg.uncertainty.flexible.size())
      rd.fail("flip_model.epsilon", "length must equal the flexible set size");
  }

  if (out.errors.empty()) out.config = std::move(cfg);
  return out;
}

ConfigLoadResult load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    ConfigLoadResult out;
    out.errors.push_back({"<file>", "cannot open " + path});
    return out;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string config_to_text(const ScenarioConfig& cfg) {
  json j;
  j["schema_version"] = cfg.schema_version;
  json d;
  d["A"] = matrix_to_json(cfg.dynamics.A);
  d["B"] = matrix_to_json(cfg.dynamics.B);
  d["D"] = matrix_to_json(cfg.dynamics.D);
  d["E"] = matrix_to_json(cfg.dynamics.E);
  d["x0"] = cfg.dynamics.x0;
  d["horizon"] = cfg.dynamics.horizon;
  d["sampling_minutes"] = cfg.sampling_minutes;
  j["dynamics"] = std::move(d);

  json c;
  c["Gx"] = matrix_to_json(cfg.constraints.Gx);
  c["gx"] = cfg.constraints.gx;
  c["Gr"] = matrix_to_json(cfg.constraints.Gr);
  c["Gu"] = matrix_to_json(cfg.constraints.Gu);
  c["Gv"] = matrix_to_json(cfg.constraints.Gv);
  c["gr"] = cfg.constraints.gr;
  if (!cfg.constraints.gx_steps.empty()) c["gx_steps"] = matrix_to_json(cfg.constraints.gx_steps);
  if (!cfg.constraints.gr_steps.empty()) c["gr_steps"] = matrix_to_json(cfg.constraints.gr_steps);
  j["constraints"] = std::move(c);

  json k;
  k["mode"] = cfg.cost.mode == CostMode::gamma_only ? "gamma-only" : "cost-and-gamma";
  k["c_x"] = cfg.cost.c_x;
  k["c_u"] = cfg.cost.c_u;
  k["c_v"] = cfg.cost.c_v;
  k["c_r"] = cfg.cost.c_r;
  k["lambda"] = cfg.cost.lambda;
  j["cost"] = std::move(k);

  json u;
  u["flexible"] = cfg.uncertainty.flexible;
  json rb = json::array();
  for (auto b : cfg.uncertainty.r_bar) rb.push_back(static_cast<int>(b));
  u["r_bar"] = std::move(rb);
  j["uncertainty"] = std::move(u);

  json r;
  r["big_m"] = cfg.reform.big_m;
  r["policy_mode"] = cfg.reform.policy_mode == PolicyMode::affine ? "affine" : "open-loop";
  r["dual_sign"] = cfg.reform.dual_sign == DualSign::derivation ? "derivation" : "statement";
  r["gain_bound"] = cfg.reform.gain_bound;
  r["bin_gain_lo"] = cfg.reform.bin_gain_lo;
  r["bin_gain_hi"] = cfg.reform.bin_gain_hi;
  r["bin_offset_lo"] = cfg.reform.bin_offset_lo;
  r["bin_offset_hi"] = cfg.reform.bin_offset_hi;
  j["reform"] = std::move(r);

  json s;
  s["lp_tol"] = cfg.solver.lp_tol;
  s["int_tol"] = cfg.solver.int_tol;
  s["abs_gap"] = cfg.solver.abs_gap;
  s["max_nodes"] = static_cast<double>(cfg.solver.max_nodes);
  s["seed"] = static_cast<double>(cfg.solver.seed);
  j["solver"] = std::move(s);

  if (cfg.flip_model) {
    json f;
    f["epsilon"] = cfg.flip_model->epsilon;
    j["flip_model"] = std::move(f);
  }
  json disp;
  disp["state_offset"] = cfg.state_offset;
  if (cfg.display_bounds)
    disp["bounds"] = Vec{cfg.display_bounds->first, cfg.display_bounds->second};
  j["display"] = std::move(disp);

  return j.dump(2) + "\n";
}

void save_config(const ScenarioConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << config_to_text(cfg);
}

std::string config_hash(const ScenarioConfig& cfg) {
  const std::string text = config_to_text(cfg);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace flexroc
