#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mtfl/datagen.hpp"
#include "mtfl/io.hpp"

namespace mtfl {

enum class ExperimentKind { demo, stage_sweep, lambda_sweep, tau_sensitivity, realdata_sweep };
enum class Algorithm { lasso, l21, msmtfl, msmtfl_at };

std::string_view to_string(ExperimentKind kind);
std::string_view to_string(Algorithm algorithm);

/// Regularisation values, either as alpha in lambda = alpha sqrt(ln(dm)/n) or as lambda itself.
struct RegularizationGrid {
    bool is_alpha = true;
    std::vector<double> values;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::demo;
    SyntheticSpec synthetic = preset("fig2a");
    std::optional<std::filesystem::path> manifest;
    std::vector<Algorithm> algorithms;
    std::vector<std::uint64_t> seeds;
    std::size_t stages = 10;
    RegularizationGrid regularization;
    /// Fixed MSMTFL thresholds as multiples k of m * lambda.
    std::vector<double> theta_presets;
    std::vector<double> tau_multipliers;
    std::vector<double> train_ratios;
    bool early_stop = false;
    double tolerance = 1e-8;
    std::size_t max_sweeps = 10000;
    std::size_t l21_max_iterations = 5000;
    double l21_tolerance = 1e-9;
    /// Worker threads; 0 picks the hardware concurrency. Output does not depend on it.
    std::size_t threads = 0;
    std::filesystem::path out = "results.csv";

    /// Throws ConfigError listing every violated constraint.
    void validate() const;
};

/// Builds a config from an optional key-value file plus overrides (keys as in
/// the file; overrides win). Every problem found is reported in one ConfigError.
/// A relative manifest path given in the file is resolved against the file's directory.
ExperimentConfig parse_config(const std::optional<std::filesystem::path>& file,
                              const std::vector<std::pair<std::string, std::string>>& overrides = {});

/// Keys accepted by parse_config.
const std::vector<std::string>& config_keys();

struct SummaryLine {
    std::string algorithm;
    std::optional<double> lambda;
    std::size_t runs = 0;
    std::size_t failures = 0;
    std::optional<double> mean_l21_error;
    std::optional<double> mean_nmse;
    std::optional<double> mean_amse;
};

struct ExperimentOutcome {
    std::vector<ResultRow> rows;
    std::vector<SummaryLine> summary;
    /// Cells that threw a numerical error; each has a failure row.
    std::size_t hard_failures = 0;
    /// Cells whose inner solver hit its iteration budget.
    std::size_t nonconverged = 0;
};

/// Runs every (algorithm, seed, grid point) cell, in parallel when threads != 1.
/// Rows come out in a fixed order: seed, then algorithm variant, grid point and stage.
ExperimentOutcome run_experiment(const ExperimentConfig& config);

/// Mean final-stage metrics per (algorithm label, lambda).
std::vector<SummaryLine> summarize(const std::vector<ResultRow>& rows);

void print_summary(const ExperimentOutcome& outcome, std::ostream& out);

} // namespace mtfl
