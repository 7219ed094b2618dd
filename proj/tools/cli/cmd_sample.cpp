#include "commands.hpp"
#include "draws.hpp"
#include "methods.hpp"

#include <neuroprior/metrics.hpp>
#include <neuroprior/rng.hpp>
#include <neuroprior/serialization.hpp>

#include <spdlog/spdlog.h>

#include <fstream>
#include <limits>

namespace neuroprior::cli {

Command& add_command(CLI::App& app, CommandList& commands, const std::string& name, const std::string& description) {
  auto cmd = std::make_unique<Command>();
  cmd->name = name;
  cmd->app = app.add_subcommand(name, description);
  commands.push_back(std::move(cmd));
  return *commands.back();
}

namespace {

struct SampleOptions {
  DataOptions data;
  MethodOptions hyper;
  std::string method = "nspsl";
  std::size_t samples = 0;
  std::size_t burn_in = 2000;
  std::size_t thin = 1;
  std::size_t chains = 1;
  std::string format = "csv";
  std::string trace = "log_posterior";
  double threshold = 0.1;
};

void run_sample(const SampleOptions& o, const Globals& g, const std::filesystem::path& out) {
  const auto format = draw_format_from_string(o.format);
  const auto trace = as_usage("trace", [&] { return trace_statistic_from_string(o.trace); });
  if (o.chains == 0 || o.thin == 0) throw UsageError("--chains and --thin must be positive");
  const auto loaded = load_data(o.data);
  const auto method = resolve_method(o.method, o.hyper, loaded.fit, g.seed);
  const std::size_t samples = o.samples > 0 ? o.samples : default_samples(o.method);

  SamplerConfig cfg;
  cfg.burn_in = o.burn_in;
  cfg.thin = o.thin;
  cfg.iterations = o.burn_in + samples * o.thin;
  cfg.trace = trace;
  spdlog::info("{}: n={} p={} samples={} burn-in={} chains={}", o.method, loaded.fit.n(), loaded.fit.p(), samples,
               o.burn_in, o.chains);

  std::vector<PosteriorSamples> runs(o.chains);
  parallel_for(o.chains, g.threads, [&](std::size_t c) {
    auto chain_cfg = cfg;
    chain_cfg.seed = mix_seed(g.seed, c);
    runs[c] = run_method(method, loaded.fit, chain_cfg);
    spdlog::debug("chain {} finished: {:.2f}s sampling, acceptance {:.3f}", c, runs[c].sampling_seconds,
                  runs[c].acceptance_rate());
  });

  DrawTable table;
  std::size_t total = 0;
  for (const auto& r : runs) total += r.stored();
  table.theta.resize(static_cast<Eigen::Index>(total), loaded.fit.p());
  Eigen::Index row = 0;
  json chains = json::array();
  for (std::size_t c = 0; c < runs.size(); ++c) {
    const auto& r = runs[c];
    for (std::size_t s = 0; s < r.stored(); ++s, ++row) {
      table.chain.push_back(c);
      table.draw.push_back(s);
      table.sigma_sq.push_back(r.sigma_sq[s]);
      if (trace != TraceStatistic::none) table.trace.push_back(r.trace[s]);
      table.theta.row(row) = loaded.fit.back_map(r.theta.row(static_cast<Eigen::Index>(s)).transpose()).transpose();
    }
    chains.push_back({{"chain", c},
                      {"seed", mix_seed(g.seed, c)},
                      {"acceptance_rate", r.acceptance_rate()},
                      {"burn_in_seconds", r.burn_in_seconds},
                      {"sampling_seconds", r.sampling_seconds}});
  }
  write_draws(out / draw_file_name(format), table, format);

  json summary = summarize_draws(table, o.threshold);
  for (std::size_t c = 0; c < runs.size(); ++c) summary["chains"][c].update(chains[c]);
  // Intercept of the posterior-mean fit on the original scale.
  double intercept = 0.0;
  if (loaded.fit.standardized()) {
    const Eigen::VectorXd mean = vector_from_json(summary["theta_mean"]);
    intercept = loaded.raw.y().mean() - loaded.raw.x().colwise().mean().transpose().dot(mean);
  }
  summary["intercept"] = intercept;
  summary["method"] = o.method;
  summary["n"] = loaded.fit.n();
  summary["standardized"] = loaded.fit.standardized();
  summary["hyperparameters"] = method.hyperparameters;
  summary["sampler"] = cfg;
  write_json(out / "summary.json", summary);
  spdlog::info("wrote {} draws to {}", total, (out / draw_file_name(format)).string());
}

struct BenchOptions {
  DataOptions data;
  MethodOptions hyper;
  std::string methods = "nspsl-exact,spsl-gamma";
  std::string budget = "5,10,20";
  std::size_t chains = 50;
  std::size_t burn_in = 2000;
  std::string trace = "log_posterior";
};

void run_bench(const BenchOptions& o, const Globals& g, const std::filesystem::path& out) {
  const auto trace = as_usage("trace", [&] { return trace_statistic_from_string(o.trace); });
  if (trace == TraceStatistic::none) throw UsageError("--trace none leaves nothing to measure");
  const auto budgets = parse_double_list(o.budget, "budget");
  for (double b : budgets) {
    if (!(b > 0.0)) throw UsageError("--budget values must be positive");
  }
  const auto names = split_list(o.methods);
  if (names.empty() || o.chains == 0) throw UsageError("--methods and --chains must be non-empty");
  const auto loaded = load_data(o.data);
  std::vector<ResolvedMethod> methods;
  for (const auto& name : names) methods.push_back(resolve_method(name, o.hyper, loaded.fit, g.seed));

  struct Task {
    std::size_t method, budget, chain;
  };
  std::vector<Task> tasks;
  for (std::size_t m = 0; m < methods.size(); ++m)
    for (std::size_t b = 0; b < budgets.size(); ++b)
      for (std::size_t c = 0; c < o.chains; ++c) tasks.push_back({m, b, c});
  if (g.threads > 1) spdlog::warn("concurrent chains share cores; wall-clock ESS rates are only comparable at --threads 1");

  std::vector<std::string> rows(tasks.size());
  parallel_for(tasks.size(), g.threads, [&](std::size_t i) {
    const auto& t = tasks[i];
    SamplerConfig cfg;
    cfg.burn_in = o.burn_in;
    cfg.iterations = std::numeric_limits<std::size_t>::max() / 2;
    cfg.store_theta = false;
    cfg.trace = trace;
    cfg.time_budget_seconds = budgets[t.budget];
    cfg.seed = mix_seed(g.seed, t.chain);
    const auto r = run_method(methods[t.method], loaded.fit, cfg);
    const auto e = r.stored() >= 10 ? ess(r.trace) : FlaggedValue{0.0, true};
    std::string line = methods[t.method].name + ',';
    append_number(line, budgets[t.budget]);
    line += ',' + std::to_string(t.chain) + ',' + std::to_string(cfg.seed) + ',' + std::to_string(r.stored()) + ',';
    append_number(line, r.sampling_seconds);
    line += ',';
    append_number(line, e.value);
    line += ',';
    append_number(line, r.sampling_seconds > 0.0 ? e.value / r.sampling_seconds : 0.0);
    line += e.degenerate ? ",1" : ",0";
    rows[i] = line;
    spdlog::debug("{} budget {}s chain {}: ESS {:.1f}", methods[t.method].name, budgets[t.budget], t.chain, e.value);
  });

  std::ofstream csv(out / "bench.csv");
  if (!csv) throw std::runtime_error("cannot write " + (out / "bench.csv").string());
  csv << "method,budget_seconds,chain,seed,draws,sampling_seconds,ess,ess_per_second,degenerate\n";
  for (const auto& line : rows) csv << line << '\n';
  json hyper = json::object();
  for (const auto& m : methods) hyper[m.name] = m.hyperparameters;
  write_json(out / "bench_methods.json", hyper);
}

}  // namespace

void register_sample(CLI::App& app, CommandList& commands) {
  auto& cmd = add_command(app, commands, "sample", "Run MCMC for a neuronized prior or a baseline");
  auto o = std::make_shared<SampleOptions>();
  auto* sub = cmd.app;
  cmd.options.add(sub, "method", o->method, "nspsl | nspsl-exact | n-horseshoe | n-blasso | spsl-gamma | blasso | horseshoe");
  o->data.bind(sub, cmd.options);
  o->hyper.bind(sub, cmd.options);
  cmd.options.add(sub, "samples", o->samples, "Stored draws per chain (0 = 200000 for spsl-gamma, else 20000)");
  cmd.options.add(sub, "burn-in", o->burn_in, "Burn-in sweeps");
  cmd.options.add(sub, "thin", o->thin, "Keep every k-th sweep");
  cmd.options.add(sub, "chains", o->chains, "Independent chains");
  cmd.options.add(sub, "format", o->format, "csv | jsonl");
  cmd.options.add(sub, "trace", o->trace, "log_posterior | rss | none");
  cmd.options.add(sub, "threshold", o->threshold, "Selection cut c in |theta_mean| > c * sigma_hat");
  cmd.run = [o](const Globals& g, const std::filesystem::path& out) { run_sample(*o, g, out); };
}

void register_bench(CLI::App& app, CommandList& commands) {
  auto& cmd = add_command(app, commands, "bench", "ESS of fixed wall-clock chains per method and budget");
  auto o = std::make_shared<BenchOptions>();
  auto* sub = cmd.app;
  o->data.bind(sub, cmd.options);
  o->hyper.bind(sub, cmd.options);
  cmd.options.add(sub, "methods", o->methods, "Comma-separated method names");
  cmd.options.add(sub, "budget", o->budget, "Comma-separated post-burn-in budgets in seconds");
  cmd.options.add(sub, "chains", o->chains, "Chains per (method, budget)");
  cmd.options.add(sub, "burn-in", o->burn_in, "Burn-in sweeps (not timed)");
  cmd.options.add(sub, "trace", o->trace, "log_posterior | rss");
  cmd.run = [o](const Globals& g, const std::filesystem::path& out) { run_bench(*o, g, out); };
}

}  // namespace neuroprior::cli
