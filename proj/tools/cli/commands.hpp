#pragma once

#include "common.hpp"

#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace neuroprior::cli {

struct Command {
  std::string name;
  CLI::App* app = nullptr;
  OptionTable options;
  /// Writes the command's outputs into `out`.
  std::function<void(const Globals&, const std::filesystem::path& out)> run;
};

using CommandList = std::vector<std::unique_ptr<Command>>;

Command& add_command(CLI::App& app, CommandList& commands, const std::string& name, const std::string& description);

void register_sample(CLI::App& app, CommandList& commands);
void register_bench(CLI::App& app, CommandList& commands);
void register_map(CLI::App& app, CommandList& commands);
void register_path(CLI::App& app, CommandList& commands);
void register_match(CLI::App& app, CommandList& commands);
void register_simulate(CLI::App& app, CommandList& commands);
void register_diagnose(CLI::App& app, CommandList& commands);

}  // namespace neuroprior::cli
