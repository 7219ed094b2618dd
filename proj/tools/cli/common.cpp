#include "common.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace neuroprior::cli {

CLI::Option* OptionTable::add_flag(CLI::App* app, const std::string& name, bool& field, const std::string& help) {
  entries_.push_back({name, [&field](json& j, const std::string& key) { j[key] = field; },
                      [&field](const json& j, const std::string& key) { field = j.at(key).get<bool>(); }});
  return app->add_flag("--" + name + ",!--no-" + name, field, help + (field ? " (default on)" : " (default off)"));
}

json OptionTable::to_json() const {
  json j = json::object();
  for (const auto& e : entries_) e.write(j, e.key);
  return j;
}

void OptionTable::from_json(const json& j) {
  if (!j.is_object()) throw UsageError("config: \"options\" must be an object");
  for (const auto& [key, value] : j.items()) {
    const auto it = std::find_if(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.key == key; });
    if (it == entries_.end()) throw UsageError("config: unknown option \"" + key + "\"");
    try {
      it->read(j, key);
    } catch (const json::exception& ex) {
      throw UsageError("config: option \"" + key + "\": " + ex.what());
    }
  }
}

void DataOptions::bind(CLI::App* app, OptionTable& table) {
  table.add(app, "x", x, "Design matrix CSV");
  table.add(app, "y", y, "Response CSV (one column)");
  table.add(app, "data", data, "Single CSV holding predictors and response");
  table.add(app, "response-column", response_column, "0-based response column of --data (-1 = last)");
  table.add_flag(app, "header", header, "CSV files have a header row");
  table.add_flag(app, "standardize", standardize, "Standardize before fitting; estimates are mapped back");
}

void require_file(const std::string& path, const std::string& flag) {
  if (!std::filesystem::is_regular_file(path)) {
    throw UsageError("--" + flag + ": file not found: " + path);
  }
}

LoadedData load_data(const DataOptions& options) {
  const CsvOptions csv{options.header, ','};
  RegressionData raw;
  if (!options.data.empty()) {
    if (!options.x.empty() || !options.y.empty()) throw UsageError("--data cannot be combined with --x/--y");
    require_file(options.data, "data");
    Eigen::Index column = options.response_column;
    if (column < 0) {
      column = read_csv_matrix(options.data, csv).cols() - 1;
    }
    raw = load_csv(options.data, column, csv);
  } else {
    if (options.x.empty() || options.y.empty()) throw UsageError("input data needs --x and --y, or --data");
    require_file(options.x, "x");
    require_file(options.y, "y");
    raw = load_csv(options.x, options.y, csv);
  }
  RegressionData fit = options.standardize ? raw.standardize() : raw;
  return {std::move(raw), std::move(fit)};
}

std::optional<double> parse_auto(const std::string& value, const std::string& flag) {
  if (value == "auto") return std::nullopt;
  double out = 0.0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out)) {
    throw UsageError("--" + flag + ": expected \"auto\" or a number, got \"" + value + "\"");
  }
  return out;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) {
    const auto v = parse_auto(item, flag);
    if (!v) throw UsageError("--" + flag + ": \"auto\" is not allowed in a list");
    out.push_back(*v);
  }
  if (out.empty()) throw UsageError("--" + flag + ": empty list");
  return out;
}

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::max<std::size_t>(1, std::min(threads, count));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
}

std::filesystem::path prepare_output_dir(const std::string& dir) {
  const std::filesystem::path path(dir.empty() ? "." : dir);
  std::filesystem::create_directories(path);
  return path;
}

void write_json(const std::filesystem::path& path, const json& value) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << value.dump(2) << '\n';
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("file not found: " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError(path.string() + ": " + e.what());
  }
}

void append_number(std::string& out, double value) {
  if (value == 0.0) value = 0.0;  // drop the sign of -0
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  out.append(buf, ptr);
}

json to_json_array(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd vector_from_json(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace neuroprior::cli
