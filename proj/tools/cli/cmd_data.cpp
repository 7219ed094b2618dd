#include "commands.hpp"
#include "draws.hpp"

#include <neuroprior/matchfit.hpp>
#include <neuroprior/metrics.hpp>
#include <neuroprior/rng.hpp>
#include <neuroprior/serialization.hpp>

#include <spdlog/spdlog.h>

#include <cstdio>
#include <map>

namespace neuroprior::cli {

namespace {

// ---------------------------------------------------------------- match

struct MatchOptions {
  std::string target = "bayesian-lasso";
  double scale = 1.0;
  double target_alpha0 = 0.0;
  std::size_t basis = 10;
  double knot_lower = -5.0;
  double knot_upper = 5.0;
  std::size_t sample_size = 100000;
  std::size_t steps = 50000;
  std::string distance = "order_stat_l2";
  std::string optimizer = "anneal";
  double alpha0 = 0.0;
  double tau_sq = 1.0;
  double cooling = 0.995;
  double step_fraction = 0.1;
  std::size_t check_draws = 100000;
};

TargetSampler make_target(const MatchOptions& o) {
  if (!(o.scale > 0.0)) throw UsageError("--scale must be positive");
  if (o.target == "bayesian-lasso" || o.target == "laplace") return laplace_target(o.scale);
  if (o.target == "horseshoe") return horseshoe_target(o.scale);
  if (o.target == "relu") {
    const NeuronizedPrior relu{ActivationSpec::relu(), o.target_alpha0, o.scale * o.scale, false};
    return [relu](std::size_t count, Rng& rng) { return sample_prior(relu, count, rng.next_u64()); };
  }
  require_file(o.target, "target");
  const Eigen::MatrixXd m = read_csv_matrix(o.target);
  if (m.cols() != 1) throw UsageError("--target file must hold one value per line");
  return empirical_target(std::vector<double>(m.data(), m.data() + m.size()));
}

void run_match(const MatchOptions& o, const Globals& g, const std::filesystem::path& out) {
  const auto target = make_target(o);
  MatchConfig cfg;
  cfg.sample_size = o.sample_size;
  cfg.basis_count = o.basis;
  cfg.knot_lower = o.knot_lower;
  cfg.knot_upper = o.knot_upper;
  cfg.alpha0 = o.alpha0;
  cfg.tau_w_sq = o.tau_sq;
  cfg.distance = as_usage("distance", [&] { return match_distance_from_string(o.distance); });
  cfg.optimizer = as_usage("optimizer", [&] { return match_optimizer_from_string(o.optimizer); });
  cfg.cooling = o.cooling;
  cfg.step_fraction = o.step_fraction;
  cfg.steps = o.steps;
  cfg.seed = g.seed;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  spdlog::info("match: {} target, {} basis functions, {} draws", o.target, o.basis, o.sample_size);
  const auto res = fit_activation(target, cfg);

  // Fresh draws on both sides so the reported KS is not the optimized quantity.
  const NeuronizedPrior fitted{res.activation, cfg.alpha0, cfg.tau_w_sq, false};
  const auto draws = sample_prior(fitted, o.check_draws, mix_seed(g.seed, 1001));
  Rng rng(g.seed, 1002);
  const double ks = ks_distance(draws, target(o.check_draws, rng));
  write_json(out / "activation.json", {{"activation", res.activation},
                                       {"alpha0", cfg.alpha0},
                                       {"tau_w_sq", cfg.tau_w_sq},
                                       {"distance", res.distance},
                                       {"initial_distance", res.initial_distance},
                                       {"no_improvement", res.no_improvement},
                                       {"ks", ks},
                                       {"config", cfg}});
  if (res.no_improvement) spdlog::warn("match: the optimizer never improved on the starting spline");
  spdlog::info("match: distance {:.4g} (start {:.4g}), KS {:.4f}", res.distance, res.initial_distance, ks);
}

// ------------------------------------------------------------- simulate

/// (n, p) from the table headers; "large" is the second column of each table.
Scenario named_scenario(const std::string& name) {
  static const std::map<std::string, Scenario> table = [] {
    std::map<std::string, Scenario> m;
    auto add = [&](const std::string& tag, Eigen::Index n, Eigen::Index p, SignalKind signal, double weak,
                   double strong, double rho) {
      Scenario s;
      s.n = n;
      s.p = p;
      s.signal = signal;
      s.design = rho > 0.0 ? DesignKind::ar1 : DesignKind::independent;
      s.rho = rho;
      s.magnitude = weak;
      m[tag + "-weak"] = s;
      s.magnitude = strong;
      m[tag + "-strong"] = s;
    };
    add("low", 200, 50, SignalKind::low_dim, 0.2, 0.3, 0.0);
    add("low-large", 400, 100, SignalKind::low_dim, 0.2, 0.3, 0.0);
    add("low-ar1", 200, 50, SignalKind::low_dim, 0.2, 0.3, 0.7);
    add("low-ar1-large", 400, 100, SignalKind::low_dim, 0.2, 0.3, 0.7);
    add("high", 100, 300, SignalKind::high_dim, 1.0, 1.5, 0.0);
    add("high-large", 150, 1000, SignalKind::high_dim, 1.0, 1.5, 0.0);
    add("high-ar1", 100, 300, SignalKind::high_dim, 1.0, 1.5, 0.7);
    add("high-ar1-large", 150, 1000, SignalKind::high_dim, 1.0, 1.5, 0.7);
    return m;
  }();
  const auto it = table.find(name);
  if (it != table.end()) return it->second;
  if (std::filesystem::is_regular_file(name)) {
    const json j = read_json(name);
    try {
      return (j.contains("scenario") ? j["scenario"] : j).get<Scenario>();
    } catch (const std::exception& e) {
      throw UsageError("--scenario " + name + ": " + e.what());
    }
  }
  std::string known;
  for (const auto& [k, v] : table) known += (known.empty() ? "" : ", ") + k;
  throw UsageError("--scenario: unknown name or missing file \"" + name + "\" (built-in: " + known + ")");
}

struct SimulateOptions {
  std::string scenario = "low-weak";
  std::string n;
  std::string p;
  std::string design;
  std::string rho;
  std::string signal;
  std::string magnitude;
  std::string sigma_sq;
  std::size_t replicates = 1;
};

Scenario resolve_scenario(const SimulateOptions& o) {
  Scenario s = named_scenario(o.scenario);
  auto number = [](const std::string& text, const std::string& flag) {
    const auto v = parse_auto(text, flag);
    if (!v) throw UsageError("--" + flag + ": \"auto\" is not allowed");
    return *v;
  };
  auto count = [&](const std::string& text, const std::string& flag) {
    const double v = number(text, flag);
    if (v < 1.0 || v != std::floor(v)) throw UsageError("--" + flag + " must be a positive integer");
    return static_cast<Eigen::Index>(v);
  };
  if (!o.n.empty()) s.n = count(o.n, "n");
  if (!o.p.empty()) s.p = count(o.p, "p");
  if (!o.rho.empty()) s.rho = number(o.rho, "rho");
  if (!o.magnitude.empty()) s.magnitude = number(o.magnitude, "magnitude");
  if (!o.sigma_sq.empty()) s.sigma_sq = number(o.sigma_sq, "sigma-sq");
  if (!o.design.empty()) {
    if (o.design != "independent" && o.design != "ar1") throw UsageError("--design: independent | ar1");
    s.design = o.design == "ar1" ? DesignKind::ar1 : DesignKind::independent;
  }
  if (!o.signal.empty()) {
    if (o.signal != "low_dim" && o.signal != "high_dim") throw UsageError("--signal: low_dim | high_dim");
    s.signal = o.signal == "high_dim" ? SignalKind::high_dim : SignalKind::low_dim;
  }
  as_usage("scenario", [&] { s.validate(); });
  return s;
}

void run_simulate(const SimulateOptions& o, const Globals& g, const std::filesystem::path& out) {
  const Scenario base = resolve_scenario(o);
  if (o.replicates == 0) throw UsageError("--replicates must be positive");
  const int width = o.replicates >= 1000 ? 4 : 3;
  parallel_for(o.replicates, g.threads, [&](std::size_t r) {
    Scenario s = base;
    s.seed = mix_seed(g.seed, r);
    const auto d = simulate(s);
    char name[32];
    std::snprintf(name, sizeof(name), "rep-%0*zu", width, r + 1);
    const auto dir = prepare_output_dir((out / name).string());
    write_csv_matrix(dir / "X.csv", d.x);
    write_csv_matrix(dir / "y.csv", d.y);
    write_csv_matrix(dir / "theta0.csv", d.theta0);
    write_json(dir / "scenario.json", {{"scenario", s}, {"replicate", r + 1}});
  });
  spdlog::info("simulate: {} replicate(s) of n={} p={} in {}", o.replicates, base.n, base.p, out.string());
}

// ------------------------------------------------------------- diagnose

struct DiagnoseOptions {
  std::string run;
  std::string samples;
  std::string truth;
  double threshold = 0.1;
};

void run_diagnose(const DiagnoseOptions& o, const Globals&, const std::filesystem::path& out) {
  std::filesystem::path file;
  if (!o.samples.empty()) {
    if (!o.run.empty()) throw UsageError("give --run or --samples, not both");
    require_file(o.samples, "samples");
    file = o.samples;
  } else if (!o.run.empty()) {
    const std::filesystem::path dir(o.run);
    std::vector<std::filesystem::path> found;
    for (const char* name : {"samples.csv", "samples.jsonl"}) {
      if (std::filesystem::is_regular_file(dir / name)) found.push_back(dir / name);
    }
    if (found.empty()) throw UsageError("--run: no samples.csv or samples.jsonl in " + o.run);
    file = found.front();
    if (found.size() > 1) {
      // Both present: trust the format recorded by the run that wrote the directory.
      const json cfg = std::filesystem::is_regular_file(dir / "config.json") ? read_json(dir / "config.json") : json{};
      const auto format = cfg.value("options", json::object()).value("format", std::string{});
      if (format.empty()) throw UsageError("--run: both samples.csv and samples.jsonl in " + o.run + "; use --samples");
      file = dir / draw_file_name(draw_format_from_string(format));
    }
  } else {
    throw UsageError("diagnose needs --run DIR or --samples FILE");
  }
  std::optional<Eigen::VectorXd> theta0;
  if (!o.truth.empty()) {
    require_file(o.truth, "truth");
    const Eigen::MatrixXd m = read_csv_matrix(o.truth);
    if (m.cols() != 1) throw UsageError("--truth must hold one coefficient per line");
    theta0 = m.col(0);
  }
  const auto table = read_draws(file);
  json report = summarize_draws(table, o.threshold, theta0);
  report["source"] = file.string();
  write_json(out / "diagnostics.json", report);
  if (report.contains("recovery")) {
    const auto& r = report["recovery"];
    spdlog::info("diagnose: MSE {:.4g}, angle {:.4f}, MCC {:.3f}, FP {}", r["mse"].get<double>(),
                 r["angle"].get<double>(), r["mcc"].get<double>(), r["fp"].get<std::size_t>());
  }
}

}  // namespace

void register_match(CLI::App& app, CommandList& commands) {
  auto& cmd = add_command(app, commands, "match", "Fit a spline activation whose induced prior matches a target");
  auto o = std::make_shared<MatchOptions>();
  auto* sub = cmd.app;
  auto& t = cmd.options;
  t.add(sub, "target", o->target, "bayesian-lasso | horseshoe | relu | file with one draw per line");
  t.add(sub, "scale", o->scale, "Laplace scale, horseshoe tau, or ReLU weight sd of the target");
  t.add(sub, "target-alpha0", o->target_alpha0, "alpha0 of a relu target");
  t.add(sub, "basis", o->basis, "Number of cubic B-spline basis functions");
  t.add(sub, "knot-lower", o->knot_lower, "Lowest spline breakpoint");
  t.add(sub, "knot-upper", o->knot_upper, "Highest spline breakpoint");
  t.add(sub, "sample-size", o->sample_size, "Frozen draws used by the distance");
  t.add(sub, "steps", o->steps, "Annealing steps");
  t.add(sub, "distance", o->distance, "order_stat_l2 | ks | w1");
  t.add(sub, "optimizer", o->optimizer, "anneal | grid");
  t.add(sub, "alpha0", o->alpha0, "alpha0 of the fitted prior");
  t.add(sub, "tau-sq", o->tau_sq, "tau_w^2 of the fitted prior");
  t.add(sub, "cooling", o->cooling, "Annealing temperature decay per step");
  t.add(sub, "step-fraction", o->step_fraction, "Proposal sd relative to the coefficient range");
  t.add(sub, "check-draws", o->check_draws, "Fresh draws for the reported KS distance");
  cmd.run = [o](const Globals& g, const std::filesystem::path& out) { run_match(*o, g, out); };
}

void register_simulate(CLI::App& app, CommandList& commands) {
  auto& cmd = add_command(app, commands, "simulate", "Write simulated (X, y, theta0) datasets");
  auto o = std::make_shared<SimulateOptions>();
  auto* sub = cmd.app;
  auto& t = cmd.options;
  t.add(sub, "scenario", o->scenario, "Built-in name (low-weak, high-ar1-large-strong, ...) or scenario JSON");
  t.add(sub, "n", o->n, "Override: observations");
  t.add(sub, "p", o->p, "Override: predictors");
  t.add(sub, "design", o->design, "Override: independent | ar1");
  t.add(sub, "rho", o->rho, "Override: AR(1) correlation");
  t.add(sub, "signal", o->signal, "Override: low_dim | high_dim");
  t.add(sub, "magnitude", o->magnitude, "Override: signal magnitude s");
  t.add(sub, "sigma-sq", o->sigma_sq, "Override: noise variance");
  t.add(sub, "replicates", o->replicates, "Number of datasets (seed of replicate r: mix of --seed and r)");
  cmd.run = [o](const Globals& g, const std::filesystem::path& out) { run_simulate(*o, g, out); };
}

void register_diagnose(CLI::App& app, CommandList& commands) {
  auto& cmd = add_command(app, commands, "diagnose", "ESS, posterior summaries and recovery metrics for stored draws");
  auto o = std::make_shared<DiagnoseOptions>();
  auto* sub = cmd.app;
  auto& t = cmd.options;
  t.add(sub, "run", o->run, "Output directory of a sample run");
  t.add(sub, "samples", o->samples, "samples.csv or samples.jsonl");
  t.add(sub, "truth", o->truth, "True coefficients, one per line (e.g. theta0.csv)");
  t.add(sub, "threshold", o->threshold, "Selection cut c in |theta_mean| > c * sigma_hat");
  cmd.run = [o](const Globals& g, const std::filesystem::path& out) { run_diagnose(*o, g, out); };
}

}  // namespace neuroprior::cli
