#include "commands.hpp"

#include <neuroprior/map.hpp>
#include <neuroprior/metrics.hpp>
#include <neuroprior/rng.hpp>
#include <neuroprior/serialization.hpp>

#include <spdlog/spdlog.h>

#include <fstream>

namespace neuroprior::cli {

namespace {

/// Named activation or a JSON file holding an ActivationSpec (bare, or under
/// "activation" as written by `match`).
ActivationSpec parse_activation(const std::string& text) {
  if (text == "relu") return ActivationSpec::relu();
  if (text == "identity") return ActivationSpec::identity();
  if (text == "horseshoe-like") return make_horseshoe_like();
  require_file(text, "activation");
  const json j = read_json(text);
  try {
    return (j.contains("activation") ? j["activation"] : j).get<ActivationSpec>();
  } catch (const std::exception& e) {
    throw UsageError("--activation " + text + ": " + e.what());
  }
}

/// Shared by map and path: the prior apart from the varied hyperparameter.
struct PriorOptions {
  std::string activation = "relu";
  std::string alpha0 = "auto";
  std::string tau_sq = "auto";
  std::string sigma_sq = "auto";

  void bind(CLI::App* app, OptionTable& table) {
    table.add(app, "activation", activation, "relu | identity | horseshoe-like | activation JSON file");
    table.add(app, "alpha0", alpha0, "Fixed alpha0 (auto: -Phi^{-1}(1/p) for relu, else 0)");
    table.add(app, "tau-sq", tau_sq, "Fixed tau_w^2 (auto: 1 for relu, else p^{-2})");
    table.add(app, "sigma-sq", sigma_sq, "Noise variance (auto: plug-in from the top 0.1n predictors)");
  }

  NeuronizedPrior resolve(std::size_t p) const {
    const auto act = parse_activation(activation);
    const bool relu = act.kind() == ActivationKind::relu;
    const auto a = parse_auto(alpha0, "alpha0");
    const auto t = parse_auto(tau_sq, "tau-sq");
    NeuronizedPrior prior{act, a.value_or(relu ? alpha0_from_sparsity(1.0 / static_cast<double>(p)) : 0.0),
                          t.value_or(relu ? 1.0 : default_tau_sq(p)), true};
    as_usage("tau-sq", [&] { prior.validate(); });
    return prior;
  }
};

/// auto target: -Phi^{-1}(1/p) for an alpha0 schedule, p^{-2} for a tau schedule.
double schedule_target(ScheduleKind kind, const std::string& text, std::size_t p) {
  if (const auto v = parse_auto(text, "target")) return *v;
  return kind == ScheduleKind::alpha0_path ? alpha0_from_sparsity(1.0 / static_cast<double>(p)) : default_tau_sq(p);
}

struct MapOptions {
  DataOptions data;
  PriorOptions prior;
  std::string schedule = "alpha0";
  std::string target = "auto";
  std::size_t length = 20;
  std::string objective = "profile";
  double tolerance = 1e-8;
  std::size_t max_sweeps = 500;
  std::string init = "zeros";
  bool audit = false;
};

ScheduleKind parse_kind(const std::string& text, const std::string& flag) {
  if (text == "alpha0") return ScheduleKind::alpha0_path;
  if (text == "tau") return ScheduleKind::tau_path;
  throw UsageError("--" + flag + ": expected alpha0 or tau, got \"" + text + "\"");
}

void run_map_cmd(const MapOptions& o, const Globals& g, const std::filesystem::path& out) {
  const auto kind = parse_kind(o.schedule, "schedule");
  const auto objective = as_usage("objective", [&] { return alpha_objective_from_string(o.objective); });
  if (o.init != "zeros" && o.init != "random") throw UsageError("--init: expected zeros or random");
  if (o.length == 0) throw UsageError("--length must be positive");
  const auto loaded = load_data(o.data);
  const auto& data = loaded.fit;
  const auto p = static_cast<std::size_t>(data.p());
  const auto prior = o.prior.resolve(p);
  const double target = as_usage("target", [&] { return schedule_target(kind, o.target, p); });
  const auto schedule = as_usage("target", [&] { return build_schedule(kind, target, p, o.length); });

  MapConfig cfg;
  cfg.tolerance = o.tolerance;
  cfg.max_sweeps = o.max_sweeps;
  cfg.objective = objective;
  cfg.audit = o.audit;
  if (const auto s = parse_auto(o.prior.sigma_sq, "sigma-sq")) cfg.sigma_sq = *s;
  if (o.init == "random") {
    Rng rng(g.seed);
    Eigen::VectorXd a(data.p()), w(data.p());
    for (Eigen::Index j = 0; j < data.p(); ++j) {
      a(j) = rng.normal();
      w(j) = rng.normal();
    }
    cfg.initial_alpha = a;
    cfg.initial_w = w;
  }
  spdlog::info("map: {} schedule of length {} to target {}", o.schedule, schedule.values.size(), target);
  const auto res = run_map(data, prior, schedule, cfg);

  double intercept = 0.0;
  const Eigen::VectorXd theta = data.back_map(res.theta_hat, &intercept);
  json stages = json::array();
  for (const auto& s : res.stages) {
    stages.push_back({{"hyperparameter", s.hyperparameter},
                      {"sweeps", s.sweeps},
                      {"converged", s.converged},
                      {"objective", s.objective_trace.empty() ? 0.0 : s.objective_trace.back()}});
  }
  std::vector<std::size_t> nonzero;
  for (Eigen::Index j = 0; j < theta.size(); ++j)
    if (theta(j) != 0.0) nonzero.push_back(static_cast<std::size_t>(j));
  json result{{"prior", prior},
              {"schedule", schedule},
              {"sigma_sq", res.sigma_sq},
              {"objective", res.objective},
              {"theta", to_json_array(theta)},
              {"intercept", intercept},
              {"alpha", to_json_array(res.alpha)},
              {"w", to_json_array(res.w)},
              {"nonzero", nonzero},
              {"stages", stages},
              {"standardized", data.standardized()}};
  if (o.audit) result["max_update_decrease"] = res.max_update_decrease;
  write_json(out / "map.json", result);
  write_csv_matrix(out / "theta.csv", theta, "theta");
  spdlog::info("map: objective {:.6g}, {} nonzero coefficients", res.objective, nonzero.size());
}

struct PathOptions {
  DataOptions data;
  PriorOptions prior;
  std::string method = "map";
  std::string kind = "alpha0";
  std::string grid;
  std::string target = "auto";
  std::size_t length = 20;
  std::size_t samples = 2000;
  std::size_t burn_in = 500;
};

void run_path_cmd(const PathOptions& o, const Globals& g, const std::filesystem::path& out) {
  PathSpec spec;
  if (o.method == "map") {
    spec.method = PathMethod::map;
  } else if (o.method == "posterior-mean") {
    spec.method = PathMethod::posterior_mean;
  } else {
    throw UsageError("--method: expected map or posterior-mean");
  }
  spec.kind = parse_kind(o.kind, "kind");
  const auto loaded = load_data(o.data);
  const auto& data = loaded.fit;
  const auto p = static_cast<std::size_t>(data.p());
  spec.prior = o.prior.resolve(p);
  std::vector<double> grid;
  if (!o.grid.empty()) {
    grid = parse_double_list(o.grid, "grid");
  } else {
    if (o.length == 0) throw UsageError("--length must be positive");
    const double target = as_usage("target", [&] { return schedule_target(spec.kind, o.target, p); });
    grid = as_usage("target", [&] { return build_schedule(spec.kind, target, p, o.length).values; });
  }
  if (const auto s = parse_auto(o.prior.sigma_sq, "sigma-sq")) spec.map.sigma_sq = *s;
  spec.sampler.burn_in = o.burn_in;
  spec.sampler.iterations = o.burn_in + o.samples;
  spec.sampler.store_theta = false;
  spec.sampler.trace = TraceStatistic::none;
  spec.sampler.seed = g.seed;
  const Eigen::MatrixXd path = as_usage("grid", [&] { return solution_path(data, spec, grid); });

  Eigen::MatrixXd table(path.rows(), path.cols() + 1);
  std::string header = o.kind == "alpha0" ? "alpha0" : "tau_w_sq";
  for (Eigen::Index j = 0; j < path.cols(); ++j) header += ",theta_" + std::to_string(j + 1);
  for (Eigen::Index r = 0; r < path.rows(); ++r) {
    table(r, 0) = grid[static_cast<std::size_t>(r)];
    table.row(r).tail(path.cols()) = data.back_map(path.row(r).transpose()).transpose();
  }
  write_csv_matrix(out / "path.csv", table, header);
  spdlog::info("path: {} grid points", grid.size());
}

}  // namespace

void register_map(CLI::App& app, CommandList& commands) {
  auto& cmd = add_command(app, commands, "map", "Warm-started coordinate-ascent MAP estimate");
  auto o = std::make_shared<MapOptions>();
  auto* sub = cmd.app;
  o->data.bind(sub, cmd.options);
  o->prior.bind(sub, cmd.options);
  cmd.options.add(sub, "schedule", o->schedule, "Warm-start path: alpha0 | tau");
  cmd.options.add(sub, "target", o->target, "Final hyperparameter (auto: -Phi^{-1}(1/p) or p^{-2})");
  cmd.options.add(sub, "length", o->length, "Schedule length");
  cmd.options.add(sub, "objective", o->objective, "profile | marginal");
  cmd.options.add(sub, "tolerance", o->tolerance, "Relative objective change that ends a stage");
  cmd.options.add(sub, "max-sweeps", o->max_sweeps, "Sweep cap per stage");
  cmd.options.add(sub, "init", o->init, "zeros | random (N(0,1) alpha and w from --seed)");
  cmd.options.add_flag(sub, "audit", o->audit, "Record the largest single-update decrease");
  cmd.run = [o](const Globals& g, const std::filesystem::path& out) { run_map_cmd(*o, g, out); };
}

void register_path(CLI::App& app, CommandList& commands) {
  auto& cmd = add_command(app, commands, "path", "Solution path over an alpha0 or tau_w^2 grid");
  auto o = std::make_shared<PathOptions>();
  auto* sub = cmd.app;
  o->data.bind(sub, cmd.options);
  o->prior.bind(sub, cmd.options);
  cmd.options.add(sub, "method", o->method, "map | posterior-mean");
  cmd.options.add(sub, "kind", o->kind, "Varied hyperparameter: alpha0 | tau");
  cmd.options.add(sub, "grid", o->grid, "Comma-separated grid (default: schedule from 0 or 1 to --target)");
  cmd.options.add(sub, "target", o->target, "Last grid value when --grid is not given");
  cmd.options.add(sub, "length", o->length, "Grid length when --grid is not given");
  cmd.options.add(sub, "samples", o->samples, "Posterior-mean draws per grid point");
  cmd.options.add(sub, "burn-in", o->burn_in, "Posterior-mean burn-in per grid point");
  cmd.run = [o](const Globals& g, const std::filesystem::path& out) { run_path_cmd(*o, g, out); };
}

}  // namespace neuroprior::cli
