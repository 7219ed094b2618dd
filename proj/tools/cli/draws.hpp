#pragma once

#include "common.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace neuroprior::cli {

/// Posterior draws on the original coefficient scale, in the layout shared by
/// every method: one row per stored draw with its chain, sigma^2 and
/// (optionally) the mixing trace statistic.
struct DrawTable {
  std::vector<std::size_t> chain;
  std::vector<std::size_t> draw;
  std::vector<double> sigma_sq;
  std::vector<double> trace;  ///< empty when no trace was recorded
  Eigen::MatrixXd theta;
};

enum class DrawFormat { csv, jsonl };
DrawFormat draw_format_from_string(const std::string& name);
std::string draw_file_name(DrawFormat format);

void write_draws(const std::filesystem::path& path, const DrawTable& table, DrawFormat format);
/// Format from the extension (.jsonl, otherwise CSV with header).
DrawTable read_draws(const std::filesystem::path& path);

/// Pooled posterior summaries, per-chain ESS and hard-threshold selection at
/// c * sqrt(mean sigma^2); adds recovery metrics when theta0 is given.
json summarize_draws(const DrawTable& table, double threshold, const std::optional<Eigen::VectorXd>& theta0 = {});

}  // namespace neuroprior::cli
