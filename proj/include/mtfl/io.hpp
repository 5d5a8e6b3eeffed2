#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mtfl/core.hpp"

namespace mtfl {

/// One `key: value` line of a manifest or config file.
struct KeyValue {
    std::string key;
    std::string value;
    std::size_t line = 0;
};

/// Reads `key: value` lines. Blank lines and lines starting with '#' are
/// skipped; keys and values are trimmed. Throws IoError naming file and line.
std::vector<KeyValue> read_key_values(const std::filesystem::path& path);

/// Parses a complete decimal floating-point token (also "inf"/"nan").
std::optional<double> parse_double(std::string_view text);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

/// Loads a dataset from a manifest:
///
///     d: <feature count>
///     task: <path relative to the manifest directory>
///     task: ...
///
/// Each task file is a header-less CSV with d feature columns followed by the
/// response. Tasks keep manifest order. Throws IoError naming file and line.
TaskDataset load_dataset(const std::filesystem::path& manifest);

/// Writes `manifest.txt` and `task_<i>.csv` (1-based) into directory, creating
/// it if needed, using shortest round-trip formatting. Returns the manifest path.
std::filesystem::path export_dataset(const TaskDataset& data,
                                     const std::filesystem::path& directory);

struct SplitSpec {
    double train_ratio = 0.2;
    std::uint64_t seed = 1;

    void validate() const;
};

/// Number of training samples for a task of n samples: ceil(ratio * n).
/// Products within 1e-9 above an integer round down to it first, so that
/// 0.15 * 1560 yields 234 regardless of representation error.
std::size_t train_count(double train_ratio, std::size_t samples);

/// Per task, ceil(train_ratio * n_i) samples drawn without replacement form
/// the training set and the rest the test set; both keep the original sample
/// order. Throws std::invalid_argument if any task would get an empty side.
std::pair<TaskDataset, TaskDataset> split(const TaskDataset& data, const SplitSpec& spec);

/// Column layout of the results CSV. Bump kResultsSchemaVersion when it changes.
inline constexpr int kResultsSchemaVersion = 1;
inline constexpr std::string_view kResultsHeader =
    "algorithm,seed,stage,lambda,theta,tau,l21_error,nmse,amse,objective";

/// One results row; empty optionals become empty CSV fields.
struct ResultRow {
    std::string algorithm;
    std::uint64_t seed = 0;
    std::optional<std::size_t> stage;
    std::optional<double> lambda;
    std::optional<double> theta;
    std::optional<double> tau;
    std::optional<double> l21_error;
    std::optional<double> nmse;
    std::optional<double> amse;
    std::optional<double> objective;

    bool operator==(const ResultRow&) const = default;
};

std::string format_results(const std::vector<ResultRow>& rows);
void write_results(const std::vector<ResultRow>& rows, const std::filesystem::path& path);
std::vector<ResultRow> parse_results(std::string_view csv, std::string_view source = "<memory>");
std::vector<ResultRow> read_results(const std::filesystem::path& path);

} // namespace mtfl
