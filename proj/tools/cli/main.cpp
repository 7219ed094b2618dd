#include "commands.hpp"
#include "common.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstring>
#include <iostream>
#include <string_view>

using namespace neuroprior::cli;

namespace {

constexpr int kRuntimeFailure = 1;
constexpr int kUsageError = 2;

json global_json(const Globals& g) {
  return {{"seed", g.seed}, {"threads", g.threads}, {"out", g.out}, {"verbosity", g.verbosity}};
}

void apply_global_json(const json& j, Globals& g) {
  for (const auto& [key, value] : j.items()) {
    if (key == "seed") {
      g.seed = value.get<std::uint64_t>();
    } else if (key == "threads") {
      g.threads = value.get<std::size_t>();
    } else if (key == "out") {
      g.out = value.get<std::string>();
    } else if (key == "verbosity") {
      g.verbosity = value.get<int>();
    } else {
      throw UsageError("config: unknown global \"" + key + "\"");
    }
  }
}

/// Finds --config before CLI11 parsing so that file values become the
/// defaults and explicit flags still override them.
std::string find_config_path(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string_view arg = argv[i];
    if (arg == "--config") {
      if (i + 1 >= argc) throw UsageError("--config needs a file");
      return argv[i + 1];
    }
    if (arg.starts_with("--config=")) return std::string(arg.substr(std::strlen("--config=")));
  }
  return {};
}

/// Returns the command named in the file.
std::string load_config(const std::string& path, Globals& globals, CommandList& commands) {
  require_file(path, "config");
  const json j = read_json(path);
  if (!j.is_object() || !j.contains("command")) throw UsageError("config " + path + ": missing \"command\"");
  const auto name = j["command"].get<std::string>();
  Command* target = nullptr;
  for (auto& c : commands) {
    if (c->name == name) target = c.get();
  }
  if (target == nullptr) throw UsageError("config " + path + ": unknown command \"" + name + "\"");
  try {
    if (j.contains("global")) apply_global_json(j["global"], globals);
    if (j.contains("options")) target->options.from_json(j["options"]);
  } catch (const json::exception& e) {
    throw UsageError("config " + path + ": " + e.what());
  }
  return name;
}

void setup_logging(int verbosity) {
  auto logger = spdlog::stderr_color_mt("neuroprior");
  logger->set_pattern("[%H:%M:%S] %^%l%$ %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(verbosity < 0 ? spdlog::level::warn
                                  : verbosity == 0 ? spdlog::level::info
                                                   : spdlog::level::debug);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neuronized priors for Bayesian sparse linear regression", "neuroprior"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals globals;
  app.add_option("--config", globals.config, "Resolved-config JSON from an earlier run (flags override it)");
  app.add_option("--seed", globals.seed, "Random seed")->capture_default_str();
  app.add_option("--threads", globals.threads, "Worker threads for chains and replicates")->capture_default_str();
  app.add_option("--out", globals.out, "Output directory")->capture_default_str();
  app.add_flag("-v,--verbose", globals.verbosity, "More logging (repeatable)");
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Warnings and errors only");

  CommandList commands;
  register_sample(app, commands);
  register_map(app, commands);
  register_match(app, commands);
  register_simulate(app, commands);
  register_diagnose(app, commands);
  register_path(app, commands);
  register_bench(app, commands);

  Command* selected = nullptr;
  try {
    std::string config_command;
    if (const auto path = find_config_path(argc, argv); !path.empty()) {
      config_command = load_config(path, globals, commands);
    }
    // A config file alone names its subcommand. It goes first so that any
    // subcommand flags after it bind to it; globals fall through to the parent.
    std::vector<std::string> args(argv + 1, argv + argc);
    if (!config_command.empty()) {
      const bool named = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
        return std::any_of(commands.begin(), commands.end(), [&](const auto& c) { return c->name == a; });
      });
      if (!named) args.insert(args.begin(), config_command);
    }
    std::reverse(args.begin(), args.end());
    try {
      app.parse(args);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e);
      return code == 0 ? 0 : kUsageError;
    }
    for (auto& c : commands) {
      if (c->app->parsed()) selected = c.get();
    }
    if (!config_command.empty() && config_command != selected->name) {
      throw UsageError("--config holds a \"" + config_command + "\" run, not \"" + selected->name + "\"");
    }
    if (globals.threads == 0) throw UsageError("--threads must be positive");
    if (quiet) globals.verbosity = -1;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  }

  setup_logging(globals.verbosity);
  try {
    const auto out = prepare_output_dir(globals.out);
    write_json(out / "config.json",
               {{"command", selected->name}, {"global", global_json(globals)}, {"options", selected->options.to_json()}});
    selected->run(globals, out);
  } catch (const UsageError& e) {
    spdlog::error("{}", e.what());
    std::cerr << selected->app->help() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kRuntimeFailure;
  }
  return 0;
}
