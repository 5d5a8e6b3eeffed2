#include "mtfl/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mtfl/rng.hpp"

namespace mtfl {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        cells.push_back(line.substr(start, comma == std::string_view::npos ? line.npos
                                                                           : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

std::string where(const fs::path& path, std::size_t line) {
    return path.string() + ":" + std::to_string(line);
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const fs::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << contents;
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

Task load_task(const fs::path& path, std::size_t features) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open task file " + path.string());
    std::vector<double> values;
    std::size_t rows = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto content = trim(line);
        if (content.empty()) continue;
        const auto cells = split_commas(content);
        if (cells.size() != features + 1) {
            throw IoError(where(path, line_no) + ": expected " + std::to_string(features + 1) +
                          " columns (d = " + std::to_string(features) + " plus response), found " +
                          std::to_string(cells.size()));
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const auto v = parse_double(trim(cells[c]));
            if (!v || !std::isfinite(*v)) {
                throw IoError(where(path, line_no) + ": column " + std::to_string(c + 1) +
                              " is not a finite number: '" + std::string(trim(cells[c])) + "'");
            }
            values.push_back(*v);
        }
        ++rows;
    }
    if (rows == 0) throw IoError(path.string() + ": task file has no samples");

    const auto n = static_cast<Eigen::Index>(rows);
    const auto d = static_cast<Eigen::Index>(features);
    Task task{Matrix(n, d), Vector(n)};
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto* row = values.data() + r * (d + 1);
        for (Eigen::Index c = 0; c < d; ++c) task.design(r, c) = row[c];
        task.response[r] = row[d];
    }
    return task;
}

void append_optional(std::string& out, const std::optional<double>& v) {
    out += ',';
    if (v) out += format_double(*v);
}

} // namespace

std::vector<KeyValue> read_key_values(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<KeyValue> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto content = trim(line);
        if (content.empty() || content.front() == '#') continue;
        const auto colon = content.find(':');
        if (colon == std::string_view::npos) {
            throw IoError(where(path, line_no) + ": expected 'key: value'");
        }
        const auto key = trim(content.substr(0, colon));
        if (key.empty()) throw IoError(where(path, line_no) + ": empty key");
        entries.push_back({std::string(key), std::string(trim(content.substr(colon + 1))), line_no});
    }
    return entries;
}

std::optional<double> parse_double(std::string_view text) {
    if (text.empty()) return std::nullopt;
    if (text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) return std::nullopt;
    return value;
}

std::string format_double(double value) {
    std::array<char, 64> buffer{};
    const auto [ptr, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
    if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return std::string(buffer.data(), ptr);
}

TaskDataset load_dataset(const fs::path& manifest) {
    const auto entries = read_key_values(manifest);
    std::optional<std::size_t> features;
    std::vector<std::pair<fs::path, std::size_t>> task_paths;
    for (const auto& e : entries) {
        if (e.key == "d") {
            std::size_t d = 0;
            const auto* end = e.value.data() + e.value.size();
            const auto [ptr, ec] = std::from_chars(e.value.data(), end, d);
            if (ec != std::errc{} || ptr != end || d == 0) {
                throw IoError(where(manifest, e.line) + ": d must be a positive integer");
            }
            if (features) throw IoError(where(manifest, e.line) + ": d declared twice");
            features = d;
        } else if (e.key == "task") {
            if (e.value.empty()) throw IoError(where(manifest, e.line) + ": empty task path");
            task_paths.emplace_back(fs::path(e.value), e.line);
        } else {
            throw IoError(where(manifest, e.line) + ": unknown manifest key '" + e.key + "'");
        }
    }
    if (!features) throw IoError(manifest.string() + ": missing 'd: <int>' line");
    if (task_paths.empty()) throw IoError(manifest.string() + ": no 'task:' entries");

    const auto base = manifest.parent_path();
    std::vector<Task> tasks;
    for (const auto& [relative, line] : task_paths) {
        const auto path = relative.is_absolute() ? relative : base / relative;
        if (!fs::exists(path)) {
            throw IoError(where(manifest, line) + ": task file not found: " + path.string());
        }
        tasks.push_back(load_task(path, *features));
    }
    return TaskDataset(std::move(tasks));
}

fs::path export_dataset(const TaskDataset& data, const fs::path& directory) {
    std::error_code ec;
    fs::create_directories(directory, ec);
    if (ec) throw IoError("cannot create directory " + directory.string() + ": " + ec.message());

    std::string manifest = "d: " + std::to_string(data.feature_count()) + "\n";
    for (std::size_t i = 0; i < data.task_count(); ++i) {
        const auto name = "task_" + std::to_string(i + 1) + ".csv";
        manifest += "task: " + name + "\n";
        const auto& x = data.design(i);
        const auto& y = data.response(i);
        std::string csv;
        for (Eigen::Index r = 0; r < x.rows(); ++r) {
            for (Eigen::Index c = 0; c < x.cols(); ++c) {
                csv += format_double(x(r, c));
                csv += ',';
            }
            csv += format_double(y[r]);
            csv += '\n';
        }
        write_file(directory / name, csv);
    }
    const auto path = directory / "manifest.txt";
    write_file(path, manifest);
    return path;
}

void SplitSpec::validate() const {
    if (!(train_ratio > 0.0 && train_ratio < 1.0)) {
        throw std::invalid_argument("SplitSpec: train ratio must lie in (0, 1)");
    }
}

std::size_t train_count(double train_ratio, std::size_t samples) {
    const double product = train_ratio * static_cast<double>(samples);
    const double floor = std::floor(product);
    if (product - floor <= 1e-9) return static_cast<std::size_t>(floor);
    return static_cast<std::size_t>(std::ceil(product));
}

std::pair<TaskDataset, TaskDataset> split(const TaskDataset& data, const SplitSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    std::vector<Task> train;
    std::vector<Task> test;
    for (std::size_t i = 0; i < data.task_count(); ++i) {
        const auto n = data.samples(i);
        const auto k = train_count(spec.train_ratio, n);
        if (k == 0 || k >= n) {
            throw std::invalid_argument("split: train ratio " + format_double(spec.train_ratio) +
                                        " leaves task " + std::to_string(i) + " (" +
                                        std::to_string(n) + " samples) with an empty " +
                                        (k == 0 ? "training" : "test") + " set");
        }
        auto chosen = rng.sample(n, k);
        std::sort(chosen.begin(), chosen.end());
        std::vector<bool> in_train(n, false);
        for (auto s : chosen) in_train[s] = true;

        const auto& x = data.design(i);
        const auto& y = data.response(i);
        Task tr{Matrix(static_cast<Eigen::Index>(k), x.cols()), Vector(static_cast<Eigen::Index>(k))};
        Task te{Matrix(static_cast<Eigen::Index>(n - k), x.cols()),
                Vector(static_cast<Eigen::Index>(n - k))};
        Eigen::Index a = 0;
        Eigen::Index b = 0;
        for (std::size_t s = 0; s < n; ++s) {
            const auto row = static_cast<Eigen::Index>(s);
            if (in_train[s]) {
                tr.design.row(a) = x.row(row);
                tr.response[a++] = y[row];
            } else {
                te.design.row(b) = x.row(row);
                te.response[b++] = y[row];
            }
        }
        train.push_back(std::move(tr));
        test.push_back(std::move(te));
    }
    return {TaskDataset(std::move(train)), TaskDataset(std::move(test))};
}

std::string format_results(const std::vector<ResultRow>& rows) {
    std::string out(kResultsHeader);
    out += '\n';
    for (const auto& row : rows) {
        if (row.algorithm.find_first_of(",\"\n\r") != std::string::npos) {
            throw std::invalid_argument("results: algorithm name may not contain ',', '\"' or "
                                        "line breaks: " + row.algorithm);
        }
        out += row.algorithm;
        out += ',';
        out += std::to_string(row.seed);
        out += ',';
        if (row.stage) out += std::to_string(*row.stage);
        append_optional(out, row.lambda);
        append_optional(out, row.theta);
        append_optional(out, row.tau);
        append_optional(out, row.l21_error);
        append_optional(out, row.nmse);
        append_optional(out, row.amse);
        append_optional(out, row.objective);
        out += '\n';
    }
    return out;
}

void write_results(const std::vector<ResultRow>& rows, const fs::path& path) {
    write_file(path, format_results(rows));
}

std::vector<ResultRow> parse_results(std::string_view csv, std::string_view source) {
    std::vector<ResultRow> rows;
    std::size_t line_no = 0;
    bool header_seen = false;
    const std::string src(source);
    while (!csv.empty()) {
        const auto newline = csv.find('\n');
        auto line = csv.substr(0, newline);
        csv = newline == std::string_view::npos ? std::string_view{} : csv.substr(newline + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (!header_seen) {
            if (line != kResultsHeader) {
                throw IoError(src + ":" + std::to_string(line_no) + ": unexpected header");
            }
            header_seen = true;
            continue;
        }
        const auto cells = split_commas(line);
        if (cells.size() != 10) {
            throw IoError(src + ":" + std::to_string(line_no) + ": expected 10 fields, found " +
                          std::to_string(cells.size()));
        }
        auto number = [&](std::size_t c) -> std::optional<double> {
            if (cells[c].empty()) return std::nullopt;
            const auto v = parse_double(cells[c]);
            if (!v) {
                throw IoError(src + ":" + std::to_string(line_no) + ": field " +
                              std::to_string(c + 1) + " is not a number");
            }
            return v;
        };
        auto integer = [&](std::size_t c) -> std::optional<std::uint64_t> {
            if (cells[c].empty()) return std::nullopt;
            std::uint64_t v = 0;
            const auto* end = cells[c].data() + cells[c].size();
            const auto [ptr, ec] = std::from_chars(cells[c].data(), end, v);
            if (ec != std::errc{} || ptr != end) {
                throw IoError(src + ":" + std::to_string(line_no) + ": field " +
                              std::to_string(c + 1) + " is not an integer");
            }
            return v;
        };
        ResultRow row;
        row.algorithm = std::string(cells[0]);
        const auto seed = integer(1);
        if (!seed) throw IoError(src + ":" + std::to_string(line_no) + ": missing seed");
        row.seed = *seed;
        if (const auto stage = integer(2)) row.stage = static_cast<std::size_t>(*stage);
        row.lambda = number(3);
        row.theta = number(4);
        row.tau = number(5);
        row.l21_error = number(6);
        row.nmse = number(7);
        row.amse = number(8);
        row.objective = number(9);
        rows.push_back(std::move(row));
    }
    if (!header_seen) throw IoError(src + ": missing header");
    return rows;
}

std::vector<ResultRow> read_results(const fs::path& path) {
    return parse_results(read_file(path), path.string());
}

} // namespace mtfl
