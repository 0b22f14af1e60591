#include "flexroc/runner.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "flexroc/version.hpp"
#include "json.hpp"

namespace flexroc {

using nlohmann::json;

namespace {

BoundsReport make_bounds(const CompactConstraints& cc, const AffinePolicy& policy,
                         const UncertaintyPartition& part, const FlipModel& fm, int gamma,
                         unsigned long long samples, std::uint64_t seed, ParallelMode par) {
  BoundsReport out;
  ConstraintCoefficients coef = compute_ab(cc, policy, part);
  out.per_row.reserve(static_cast<std::size_t>(cc.num_rows()));
  for (int i = 0; i < cc.num_rows(); ++i) out.per_row.push_back(prop1_bound(coef, fm, part, i));
  if (gamma >= 1) out.budget = prop2_bound(fm, gamma);
  McOptions mopts;
  mopts.parallel = par;
  out.mc = monte_carlo_violation_ab(coef, part, fm, std::max(gamma, 1), samples, seed, mopts);
  return out;
}

}  // namespace

RunReport run_scheme(const ScenarioConfig& cfg, int scheme, const RunOptions& opts) {
  if (scheme < 1 || scheme > 3) throw std::invalid_argument("scheme must be 1, 2 or 3");
  const auto t0 = std::chrono::steady_clock::now();

  RunReport rep;
  rep.scheme = scheme;
  rep.seed = cfg.solver.seed;
  rep.tool_version = kToolVersion;
  rep.config_hash_hex = config_hash(cfg);

  StackedSystem st = build_stacked(cfg.dynamics, cfg.constraints);
  CompactConstraints cc = build_compact(st, cfg.cost, cfg.uncertainty, cfg.dynamics.x0);
  for (const auto& w : cc.warnings) rep.warnings.push_back(w);
  const int U = cfg.uncertainty.u_size();

  if (scheme == 2) {
    GammaCertificate cert;
    try {
      cert = exhaustive_gamma(cc, cfg.uncertainty, ExhaustiveMode::adjustable, cfg.solver,
                              opts.parallel);
    } catch (const std::runtime_error&) {
      rep.status = SolveStatus::infeasible;
      rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      return rep;
    }
    rep.status = SolveStatus::optimal;
    rep.gamma_star = cert.gamma_star;
    rep.objective = -static_cast<double>(cert.gamma_star);
    rep.scenarios_checked = cert.scenarios_checked;
    rep.scenario_count_at_gamma = scenario_count(U, cert.gamma_star);
    rep.blocking = cert.blocking;
    rep.stats.nodes = cert.milp_nodes;
    rep.stats.lp_iterations = cert.lp_iterations;
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
  }

  ReformOptions ropts = cfg.reform;
  ropts.policy_mode = scheme == 3 ? PolicyMode::open_loop : PolicyMode::affine;
  ropts.force_gamma_min = opts.force_gamma_min;
  ReformModel model = build_theorem1_milp(cc, cfg.uncertainty, cfg.cost, ropts);
  // The diagnostic forcing row is not part of the standard model size.
  rep.model_rows = count_constraints(cc.num_rows() - (cc.epigraph_row >= 0 ? 1 : 0), U, 0,
                                     cfg.cost.mode)
                       .theorem1_rows;

  SolverOptions sopts = cfg.solver;
  sopts.parallel = opts.parallel;
  MilpSolution sol = solve_milp(model.milp, sopts);
  rep.stats = {sol.nodes, sol.lp_iterations, sol.wall_seconds};
  if (sol.status != SolveStatus::optimal) {
    rep.status = sol.status;
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
  }

  FlexibilityResult res = extract_solution(sol, model, cfg.uncertainty, cfg.cost, ropts);
  rep.status = SolveStatus::optimal;
  rep.gamma_star = res.gamma_star;
  rep.delta = res.delta;
  rep.policy = res.policy;
  rep.theta = res.theta;
  rep.objective = res.objective;
  for (const auto& w : res.warnings) rep.warnings.push_back(w);
  rep.scenario_count_at_gamma = scenario_count(U, res.gamma_star);

  PolicyVerification ver = verify_policy(
      res.policy, res.gamma_star, cfg.dynamics, cfg.constraints, cfg.uncertainty, 1e-6,
      cfg.cost.mode == CostMode::cost_and_gamma ? &cfg.cost : nullptr, opts.parallel);
  rep.scenarios_checked = ver.scenarios_checked;
  rep.verification = std::move(ver);

  if (cfg.flip_model)
    rep.bounds = make_bounds(cc, res.policy, cfg.uncertainty, *cfg.flip_model, res.gamma_star,
                             opts.mc_samples, cfg.solver.seed, opts.parallel);

  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

namespace {

json policy_to_json(const AffinePolicy& p) {
  json j;
  json gain = json::array();
  for (std::size_t k = 0; k < p.cont_gain.rows(); ++k) {
    json row = json::array();
    for (std::size_t c = 0; c < p.cont_gain.cols(); ++c) row.push_back(p.cont_gain(k, c));
    gain.push_back(std::move(row));
  }
  j["cont_gain"] = std::move(gain);
  j["cont_offset"] = p.cont_offset;
  j["bin_gain"] = p.bin_gain;
  j["bin_offset"] = p.bin_offset;
  j["flexible"] = p.flexible;
  return j;
}

AffinePolicy policy_from_json(const json& j) {
  AffinePolicy p;
  const auto& gain = j.at("cont_gain");
  const std::size_t rows = gain.size();
  const std::size_t cols = rows ? gain[0].size() : j.at("flexible").size();
  p.cont_gain = Matrix(rows, cols);
  for (std::size_t k = 0; k < rows; ++k)
    for (std::size_t c = 0; c < cols; ++c) p.cont_gain(k, c) = gain[k][c].get<double>();
  p.cont_offset = j.at("cont_offset").get<Vec>();
  p.bin_gain = j.at("bin_gain").get<std::vector<std::vector<int>>>();
  p.bin_offset = j.at("bin_offset").get<std::vector<int>>();
  p.flexible = j.at("flexible").get<std::vector<int>>();
  return p;
}

}  // namespace

std::string report_to_text(const RunReport& rep) {
  json j;
  j["schema_version"] = 1;
  j["tool_version"] = rep.tool_version;
  j["config_hash"] = rep.config_hash_hex;
  j["seed"] = rep.seed;
  j["scheme"] = rep.scheme;
  j["status"] = to_string(rep.status);
  j["gamma_star"] = rep.gamma_star;
  json delta = json::array();
  for (auto d : rep.delta) delta.push_back(static_cast<int>(d));
  j["delta"] = std::move(delta);
  if (rep.policy) j["policy"] = policy_to_json(*rep.policy);
  if (rep.theta) j["theta"] = *rep.theta;
  j["objective"] = rep.objective;
  j["solver"] = {{"nodes", rep.stats.nodes}, {"lp_iterations", rep.stats.lp_iterations}};
  j["model_rows"] = rep.model_rows;
  j["scenario_count"] = rep.scenario_count_at_gamma;
  j["scenarios_checked"] = rep.scenarios_checked;
  if (rep.verification) {
    json v;
    v["scenarios_checked"] = rep.verification->scenarios_checked;
    v["violation_count"] = rep.verification->violations.size();
    v["max_margin"] = rep.verification->max_margin;
    if (rep.verification->worst_cost) v["worst_cost"] = *rep.verification->worst_cost;
    j["verification"] = std::move(v);
  }
  if (rep.blocking) {
    json b;
    b["flipped"] = rep.blocking->flipped;
    j["blocking_scenario"] = std::move(b);
  }
  if (rep.bounds) {
    json b;
    json rows = json::array();
    for (const auto& pb : rep.bounds->per_row)
      rows.push_back({{"bound", pb.bound}, {"raw", pb.raw}, {"vacuous", pb.vacuous}});
    b["per_row"] = std::move(rows);
    if (rep.bounds->budget)
      b["budget"] = {{"bound", rep.bounds->budget->bound},
                     {"raw", rep.bounds->budget->raw},
                     {"vacuous", rep.bounds->budget->vacuous}};
    b["mc"] = {{"samples", rep.bounds->mc.samples},
               {"seed", rep.bounds->mc.seed},
               {"rng", rep.bounds->mc.rng_algorithm},
               {"per_row_freq", rep.bounds->mc.per_row_freq},
               {"any_row_freq", rep.bounds->mc.any_row_freq},
               {"budget_exceed_freq", rep.bounds->mc.budget_exceed_freq},
               {"budget_exceed_stderr", rep.bounds->mc.budget_exceed_stderr}};
    j["bounds"] = std::move(b);
  }
  j["warnings"] = rep.warnings;
  return j.dump(2) + "\n";
}

void write_report(const RunReport& rep, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << report_to_text(rep);
}

SavedRun parse_report_text(const std::string& text) {
  json j = json::parse(text);
  SavedRun run;
  run.scheme = j.at("scheme").get<int>();
  run.gamma_star = j.at("gamma_star").get<int>();
  if (!j.contains("policy")) throw std::runtime_error("report carries no policy section");
  run.policy = policy_from_json(j.at("policy"));
  return run;
}

SavedRun load_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_report_text(text);
}

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string scaling_csv_header() {
  return "u_size,scheme,wall_seconds,gamma_star,row_count,scenario_count\n";
}

std::string scaling_csv_row(int u_size, int scheme, double wall_seconds, int gamma_star,
                            long long row_count, unsigned long long scen_count) {
  return std::to_string(u_size) + "," + std::to_string(scheme) + "," + fmt17(wall_seconds) +
         "," + std::to_string(gamma_star) + "," + std::to_string(row_count) + "," +
         std::to_string(scen_count) + "\n";
}

void write_envelope_csv(const std::string& path, const StateEnvelope& env, double lower,
                        double upper, double offset) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "time_index,min_temp,max_temp,lower_bound,upper_bound\n";
  for (std::size_t t = 0; t < env.min_state.size(); ++t)
    out << (t + 1) << "," << fmt17(env.min_state[t] + offset) << ","
        << fmt17(env.max_state[t] + offset) << "," << fmt17(lower) << "," << fmt17(upper)
        << "\n";
}

}  // namespace flexroc
