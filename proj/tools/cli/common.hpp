#pragma once

#include <neuroprior/data.hpp>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace neuroprior::cli {

using nlohmann::json;

/// Bad flags, missing inputs or invalid option values (exit code 2).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string config;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::string out = ".";
  int verbosity = 0;
};

/// Options bound both to CLI11 flags and to JSON keys (the flag name), so a
/// resolved config written by one run can be fed back through --config.
class OptionTable {
 public:
  template <class T>
  CLI::Option* add(CLI::App* app, const std::string& name, T& field, const std::string& help) {
    entries_.push_back({name, [&field](json& j, const std::string& key) { j[key] = field; },
                        [&field](const json& j, const std::string& key) { field = j.at(key).get<T>(); }});
    return app->add_option("--" + name, field, help)->capture_default_str();
  }
  CLI::Option* add_flag(CLI::App* app, const std::string& name, bool& field, const std::string& help);

  [[nodiscard]] json to_json() const;
  /// Unknown keys are a usage error so that typos in config files surface.
  void from_json(const json& j);

 private:
  struct Entry {
    std::string key;
    std::function<void(json&, const std::string&)> write;
    std::function<void(const json&, const std::string&)> read;
  };
  std::vector<Entry> entries_;
};

/// Input data: either --x and --y, or --data with --response-column.
struct DataOptions {
  std::string x;
  std::string y;
  std::string data;
  long response_column = -1;
  bool header = false;
  bool standardize = true;

  void bind(CLI::App* app, OptionTable& table);
};

struct LoadedData {
  RegressionData raw;
  RegressionData fit;  ///< standardized unless disabled
};

LoadedData load_data(const DataOptions& options);

/// Throws UsageError naming the path when it does not exist.
void require_file(const std::string& path, const std::string& flag);

/// "auto" -> nullopt, otherwise a finite number.
std::optional<double> parse_auto(const std::string& value, const std::string& flag);

std::vector<std::string> split_list(const std::string& text);
std::vector<double> parse_double_list(const std::string& text, const std::string& flag);

/// Runs body(i) for i in [0, count) on `threads` workers. The first exception
/// thrown by any task is rethrown after all workers stop.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body);

std::filesystem::path prepare_output_dir(const std::string& dir);
void write_json(const std::filesystem::path& path, const json& value);
json read_json(const std::filesystem::path& path);

/// Shortest round-trip decimal form.
void append_number(std::string& out, double value);

json to_json_array(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const json& j);

/// Converts std::invalid_argument from option parsing helpers into UsageError.
template <class F>
auto as_usage(const std::string& flag, F&& parse) -> decltype(parse()) {
  try {
    return parse();
  } catch (const std::invalid_argument& e) {
    throw UsageError("--" + flag + ": " + e.what());
  } catch (const std::domain_error& e) {
    throw UsageError("--" + flag + ": " + e.what());
  }
}

}  // namespace neuroprior::cli
