#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "netbd/config.hpp"
#include "netbd/experiment.hpp"

namespace netbd {

struct CdfPoint {
  double value = 0.0;
  double cdf = 0.0;
};

/// Empirical CDF of `samples`: sorted values with cdf = i / n (last is 1).
std::vector<CdfPoint> empirical_cdf(std::vector<double> samples);

/// Writes summary.csv, cdf_sumrate.csv, cdf_meanrate.csv, convergence.csv
/// and config.echo.json into `directory` (created if missing). Throws
/// IoError with the offending path.
void emit_outputs(const ExperimentResult& result, const ExperimentConfig& config,
                  const std::filesystem::path& directory);

}  // namespace netbd
