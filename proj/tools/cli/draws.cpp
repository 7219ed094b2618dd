#include "draws.hpp"

#include <neuroprior/baselines.hpp>
#include <neuroprior/metrics.hpp>

#include <cmath>
#include <fstream>
#include <map>

namespace neuroprior::cli {

DrawFormat draw_format_from_string(const std::string& name) {
  if (name == "csv") return DrawFormat::csv;
  if (name == "jsonl") return DrawFormat::jsonl;
  throw UsageError("--format: expected csv or jsonl, got \"" + name + "\"");
}

std::string draw_file_name(DrawFormat format) { return format == DrawFormat::csv ? "samples.csv" : "samples.jsonl"; }

void write_draws(const std::filesystem::path& path, const DrawTable& table, DrawFormat format) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  const bool has_trace = !table.trace.empty();
  const Eigen::Index p = table.theta.cols();
  std::string line;
  if (format == DrawFormat::csv) {
    line = "chain,draw,sigma_sq";
    if (has_trace) line += ",trace";
    for (Eigen::Index j = 0; j < p; ++j) line += ",theta_" + std::to_string(j + 1);
    out << line << '\n';
  }
  for (std::size_t r = 0; r < table.chain.size(); ++r) {
    const auto row = static_cast<Eigen::Index>(r);
    line.clear();
    if (format == DrawFormat::csv) {
      line += std::to_string(table.chain[r]) + ',' + std::to_string(table.draw[r]) + ',';
      append_number(line, table.sigma_sq[r]);
      if (has_trace) {
        line += ',';
        append_number(line, table.trace[r]);
      }
      for (Eigen::Index j = 0; j < p; ++j) {
        line += ',';
        append_number(line, table.theta(row, j));
      }
    } else {
      line += "{\"chain\":" + std::to_string(table.chain[r]) + ",\"draw\":" + std::to_string(table.draw[r]) +
              ",\"sigma_sq\":";
      append_number(line, table.sigma_sq[r]);
      if (has_trace) {
        line += ",\"trace\":";
        append_number(line, table.trace[r]);
      }
      line += ",\"theta\":[";
      for (Eigen::Index j = 0; j < p; ++j) {
        if (j > 0) line += ',';
        append_number(line, table.theta(row, j));
      }
      line += "]}";
    }
    out << line << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

namespace {

DrawTable read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  DrawTable t;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    try {
      const auto j = json::parse(line);
      t.chain.push_back(j.at("chain").get<std::size_t>());
      t.draw.push_back(j.at("draw").get<std::size_t>());
      t.sigma_sq.push_back(j.at("sigma_sq").get<double>());
      if (j.contains("trace")) t.trace.push_back(j["trace"].get<double>());
      rows.push_back(j.at("theta").get<std::vector<double>>());
    } catch (const json::exception& e) {
      throw std::runtime_error(path.string() + " line " + std::to_string(number) + ": " + e.what());
    }
    if (rows.back().size() != rows.front().size()) {
      throw std::runtime_error(path.string() + " line " + std::to_string(number) + ": theta length differs");
    }
  }
  if (!t.trace.empty() && t.trace.size() != t.chain.size()) {
    throw std::runtime_error(path.string() + ": trace present on some lines only");
  }
  const auto p = rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size());
  t.theta.resize(static_cast<Eigen::Index>(rows.size()), p);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (Eigen::Index j = 0; j < p; ++j) t.theta(static_cast<Eigen::Index>(r), j) = rows[r][static_cast<std::size_t>(j)];
  return t;
}

DrawTable read_csv(const std::filesystem::path& path) {
  std::string header;
  {
    std::ifstream in(path);
    std::getline(in, header);
  }
  const auto names = split_list(header);
  const bool has_trace = names.size() > 3 && names[3] == "trace";
  const std::size_t first_theta = has_trace ? 4 : 3;
  if (names.size() < first_theta || names[0] != "chain" || names[1] != "draw" || names[2] != "sigma_sq") {
    throw std::runtime_error(path.string() + ": header must start with chain,draw,sigma_sq");
  }
  const Eigen::MatrixXd m = read_csv_matrix(path, CsvOptions{true, ','});
  DrawTable t;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    t.chain.push_back(static_cast<std::size_t>(m(r, 0)));
    t.draw.push_back(static_cast<std::size_t>(m(r, 1)));
    t.sigma_sq.push_back(m(r, 2));
    if (has_trace) t.trace.push_back(m(r, 3));
  }
  t.theta = m.rightCols(m.cols() - static_cast<Eigen::Index>(first_theta));
  return t;
}

std::vector<double> column(const Eigen::MatrixXd& m, Eigen::Index j, const std::vector<std::size_t>& rows) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(m(static_cast<Eigen::Index>(r), j));
  return out;
}

std::vector<double> pick(const std::vector<double>& v, const std::vector<std::size_t>& rows) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(v[r]);
  return out;
}

json ess_json(const std::vector<double>& chain) {
  if (chain.size() < 10) return nullptr;
  const auto e = ess(chain);
  return {{"ess", e.value}, {"degenerate", e.degenerate}};
}

}  // namespace

DrawTable read_draws(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) throw UsageError("file not found: " + path.string());
  return path.extension() == ".jsonl" ? read_jsonl(path) : read_csv(path);
}

json summarize_draws(const DrawTable& table, double threshold, const std::optional<Eigen::VectorXd>& theta0) {
  const Eigen::Index rows = table.theta.rows();
  const Eigen::Index p = table.theta.cols();
  if (rows == 0) throw std::runtime_error("no draws to summarize");
  std::map<std::size_t, std::vector<std::size_t>> by_chain;
  for (std::size_t r = 0; r < table.chain.size(); ++r) by_chain[table.chain[r]].push_back(r);

  const Eigen::VectorXd mean = table.theta.colwise().mean();
  const Eigen::VectorXd sd =
      ((table.theta.rowwise() - mean.transpose()).colwise().squaredNorm() / std::max<double>(1.0, rows - 1.0))
          .cwiseSqrt();
  const Eigen::VectorXd inclusion = (table.theta.array() != 0.0).cast<double>().colwise().mean();
  double sigma_sq_mean = 0.0;
  for (double s : table.sigma_sq) sigma_sq_mean += s;
  sigma_sq_mean /= static_cast<double>(rows);

  // ESS pooled over chains by summation.
  Eigen::VectorXd theta_ess = Eigen::VectorXd::Zero(p);
  json chains = json::array();
  for (const auto& [id, idx] : by_chain) {
    json c{{"chain", id}, {"draws", idx.size()}, {"sigma_sq", ess_json(pick(table.sigma_sq, idx))}};
    if (!table.trace.empty()) c["trace"] = ess_json(pick(table.trace, idx));
    chains.push_back(c);
    if (idx.size() >= 10) {
      for (Eigen::Index j = 0; j < p; ++j) theta_ess(j) += ess(column(table.theta, j, idx)).value;
    }
  }
  Eigen::VectorXd mcse(p);
  for (Eigen::Index j = 0; j < p; ++j) mcse(j) = theta_ess(j) > 0.0 ? sd(j) / std::sqrt(theta_ess(j)) : 0.0;

  const auto selected = hard_threshold_select(mean, std::sqrt(sigma_sq_mean), threshold);
  json out{{"draws", rows},
           {"p", p},
           {"chains", chains},
           {"theta_mean", to_json_array(mean)},
           {"theta_sd", to_json_array(sd)},
           {"theta_ess", to_json_array(theta_ess)},
           {"theta_mcse", to_json_array(mcse)},
           {"inclusion_frequency", to_json_array(inclusion)},
           {"sigma_sq_mean", sigma_sq_mean},
           {"threshold", threshold},
           {"selected", selected}};
  if (theta0) {
    if (theta0->size() != p) throw UsageError("--truth has " + std::to_string(theta0->size()) + " entries, draws have " + std::to_string(p));
    const SelectionTruth truth(*theta0);
    const auto conf = confusion(selected, truth);
    const auto cos = angle(mean, *theta0);
    out["recovery"] = {{"mse", mse(mean, *theta0)},
                       {"angle", cos.value},
                       {"angle_degenerate", cos.degenerate},
                       {"mcc", mcc(conf)},
                       {"tp", conf.tp},
                       {"fp", conf.fp},
                       {"tn", conf.tn},
                       {"fn", conf.fn}};
  }
  return out;
}

}  // namespace neuroprior::cli
