#include "mtfl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "mtfl/baselines.hpp"
#include "mtfl/error.hpp"
#include "mtfl/metrics.hpp"
#include "mtfl/multistage.hpp"

namespace mtfl {

namespace fs = std::filesystem;

std::string_view to_string(ExperimentKind kind) {
    switch (kind) {
    case ExperimentKind::demo: return "demo";
    case ExperimentKind::stage_sweep: return "stage-sweep";
    case ExperimentKind::lambda_sweep: return "lambda-sweep";
    case ExperimentKind::tau_sensitivity: return "tau-sensitivity";
    case ExperimentKind::realdata_sweep: return "realdata-sweep";
    }
    return "?";
}

std::string_view to_string(Algorithm algorithm) {
    switch (algorithm) {
    case Algorithm::lasso: return "lasso";
    case Algorithm::l21: return "l21";
    case Algorithm::msmtfl: return "msmtfl";
    case Algorithm::msmtfl_at: return "msmtfl-at";
    }
    return "?";
}

namespace {

constexpr ExperimentKind kAllKinds[] = {ExperimentKind::demo, ExperimentKind::stage_sweep,
                                        ExperimentKind::lambda_sweep,
                                        ExperimentKind::tau_sensitivity,
                                        ExperimentKind::realdata_sweep};
constexpr Algorithm kAllAlgorithms[] = {Algorithm::lasso, Algorithm::l21, Algorithm::msmtfl,
                                        Algorithm::msmtfl_at};

using KindSet = std::set<ExperimentKind>;

KindSet all_kinds_except(std::initializer_list<ExperimentKind> excluded) {
    KindSet kinds(std::begin(kAllKinds), std::end(kAllKinds));
    for (auto k : excluded) kinds.erase(k);
    return kinds;
}

// Which experiment kinds each key applies to.
const std::map<std::string, KindSet>& key_table() {
    using K = ExperimentKind;
    static const std::map<std::string, KindSet> table = [] {
        const KindSet all(std::begin(kAllKinds), std::end(kAllKinds));
        const KindSet synthetic = all_kinds_except({K::realdata_sweep});
        const KindSet single_lambda = all_kinds_except({K::lambda_sweep});
        return std::map<std::string, KindSet>{
            {"experiment", all},
            {"out", all},
            {"seeds", all},
            {"runs", all},
            {"stages", all},
            {"algorithms", all},
            {"tolerance", all},
            {"max_sweeps", all},
            {"l21_max_iterations", all},
            {"l21_tolerance", all},
            {"early_stop", all},
            {"threads", all},
            {"preset", synthetic},
            {"tasks", synthetic},
            {"samples", synthetic},
            {"features", synthetic},
            {"sigma", synthetic},
            {"row_zero_fraction", synthetic},
            {"entry_zero_fraction", synthetic},
            {"manifest", {K::realdata_sweep}},
            {"train_ratio", {K::realdata_sweep}},
            {"alpha", single_lambda},
            {"lambda", single_lambda},
            {"alpha_grid", {K::lambda_sweep}},
            {"lambda_grid", {K::lambda_sweep}},
            {"theta_presets", {K::stage_sweep, K::lambda_sweep, K::realdata_sweep}},
            {"tau_multiplier", all_kinds_except({K::tau_sensitivity})},
            {"tau_multipliers", {K::tau_sensitivity}},
        };
    }();
    return table;
}

struct Entry {
    std::string value;
    std::string origin;
    bool from_file = false;
};

class Parser {
public:
    Parser(std::map<std::string, Entry> entries, fs::path base_dir,
           std::vector<std::string> errors)
        : entries_(std::move(entries)), base_dir_(std::move(base_dir)),
          errors_(std::move(errors)) {}

    ExperimentConfig build() {
        for (const auto& [key, entry] : entries_) {
            if (!key_table().contains(key)) error(entry, "unknown key '" + key + "'");
        }

        ExperimentConfig config;
        const auto kind_entry = find("experiment");
        if (!kind_entry) {
            errors_.push_back("missing required key 'experiment'");
            return finish(config);
        }
        const auto kind = parse_kind(kind_entry->value);
        if (!kind) {
            error(*kind_entry, "unknown experiment '" + kind_entry->value +
                                   "' (expected demo, stage-sweep, lambda-sweep, "
                                   "tau-sensitivity or realdata-sweep)");
            return finish(config);
        }
        config.kind = *kind;

        for (const auto& [key, entry] : entries_) {
            const auto it = key_table().find(key);
            if (it != key_table().end() && !it->second.contains(config.kind)) {
                error(entry, "key '" + key + "' does not apply to experiment '" +
                                 std::string(to_string(config.kind)) + "'");
            }
        }
        conflict("alpha", "lambda");
        conflict("alpha_grid", "lambda_grid");
        conflict("seeds", "runs");

        fill_defaults(config);

        if (auto e = find("out")) config.out = e->value;
        if (auto e = find("manifest")) {
            fs::path p = e->value;
            if (e->from_file && p.is_relative()) p = base_dir_ / p;
            config.manifest = p;
        }

        if (auto e = find("preset")) {
            try {
                config.synthetic = preset(e->value);
            } catch (const std::invalid_argument&) {
                error(*e, "unknown preset '" + e->value + "' (expected fig2a, fig2b or fig2c)");
            }
        }
        read_count("tasks", config.synthetic.tasks);
        read_count("samples", config.synthetic.samples);
        read_count("features", config.synthetic.features);
        read_real("sigma", config.synthetic.sigma);
        read_real("row_zero_fraction", config.synthetic.row_zero_fraction);
        read_real("entry_zero_fraction", config.synthetic.entry_zero_fraction);

        read_count("stages", config.stages);
        read_real("tolerance", config.tolerance);
        read_count("max_sweeps", config.max_sweeps);
        read_count("l21_max_iterations", config.l21_max_iterations);
        read_real("l21_tolerance", config.l21_tolerance);
        read_count("threads", config.threads);
        if (auto e = find("early_stop")) {
            if (e->value == "true") config.early_stop = true;
            else if (e->value == "false") config.early_stop = false;
            else error(*e, "expected true or false, got '" + e->value + "'");
        }

        if (auto e = find("seeds")) {
            config.seeds.clear();
            for (const auto& token : tokens(e->value)) {
                if (auto v = parse_unsigned(token)) config.seeds.push_back(*v);
                else error(*e, "seed '" + token + "' is not a nonnegative integer");
            }
        }
        if (auto e = find("runs")) {
            if (auto v = parse_unsigned(e->value)) {
                config.seeds.clear();
                for (std::uint64_t s = 1; s <= *v; ++s) config.seeds.push_back(s);
            } else {
                error(*e, "expected a nonnegative integer, got '" + e->value + "'");
            }
        }
        if (auto e = find("algorithms")) {
            config.algorithms.clear();
            for (const auto& token : tokens(e->value)) {
                const auto a = parse_algorithm(token);
                if (a) config.algorithms.push_back(*a);
                else error(*e, "unknown algorithm '" + token +
                                   "' (expected lasso, l21, msmtfl or msmtfl-at)");
            }
        }

        for (const char* key : {"alpha", "lambda"}) {
            double v = 0.0;
            if (read_real(key, v)) config.regularization = {std::string_view(key) == "alpha", {v}};
        }
        for (const char* key : {"alpha_grid", "lambda_grid"}) {
            if (find(key)) {
                config.regularization = {std::string_view(key) == "alpha_grid", read_reals(key)};
            }
        }
        if (config.kind == ExperimentKind::lambda_sweep && !find("alpha_grid") &&
            !find("lambda_grid")) {
            errors_.push_back("experiment 'lambda-sweep' requires 'alpha_grid' or 'lambda_grid'");
        }

        if (find("theta_presets")) config.theta_presets = read_reals("theta_presets");
        if (find("tau_multipliers")) config.tau_multipliers = read_reals("tau_multipliers");
        if (find("tau_multiplier")) {
            double v = 0.0;
            if (read_real("tau_multiplier", v)) config.tau_multipliers = {v};
        }
        if (find("train_ratio")) config.train_ratios = read_reals("train_ratio");

        if (errors_.empty()) {
            try {
                config.validate();
            } catch (const ConfigError& e) {
                errors_.push_back(e.what());
            }
        }
        return finish(config);
    }

private:
    const Entry* find(const std::string& key) const {
        const auto it = entries_.find(key);
        return it == entries_.end() ? nullptr : &it->second;
    }

    void error(const Entry& entry, const std::string& message) {
        errors_.push_back(entry.origin + ": " + message);
    }

    void conflict(const std::string& a, const std::string& b) {
        const auto* ea = find(a);
        const auto* eb = find(b);
        if (ea && eb) {
            errors_.push_back("conflicting keys '" + a + "' (" + ea->origin + ") and '" + b +
                              "' (" + eb->origin + ")");
        }
    }

    static std::optional<ExperimentKind> parse_kind(std::string_view text) {
        for (auto k : kAllKinds) {
            if (to_string(k) == text) return k;
        }
        return std::nullopt;
    }

    static std::optional<Algorithm> parse_algorithm(std::string_view text) {
        for (auto a : kAllAlgorithms) {
            if (to_string(a) == text) return a;
        }
        return std::nullopt;
    }

    static std::optional<std::uint64_t> parse_unsigned(std::string_view text) {
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) return std::nullopt;
        return v;
    }

    static std::vector<std::string> tokens(const std::string& text) {
        std::vector<std::string> out;
        std::stringstream in(text);
        std::string token;
        while (std::getline(in, token, ',')) {
            const auto first = token.find_first_not_of(" \t");
            const auto last = token.find_last_not_of(" \t");
            out.push_back(first == std::string::npos ? "" : token.substr(first, last - first + 1));
        }
        return out;
    }

    bool read_count(const std::string& key, std::size_t& target) {
        const auto* e = find(key);
        if (!e) return false;
        if (auto v = parse_unsigned(e->value)) {
            target = static_cast<std::size_t>(*v);
            return true;
        }
        error(*e, "'" + key + "' expects a nonnegative integer, got '" + e->value + "'");
        return false;
    }

    bool read_real(const std::string& key, double& target) {
        const auto* e = find(key);
        if (!e) return false;
        const auto v = parse_double(e->value);
        if (v && std::isfinite(*v)) {
            target = *v;
            return true;
        }
        error(*e, "'" + key + "' expects a finite number, got '" + e->value + "'");
        return false;
    }

    std::vector<double> read_reals(const std::string& key) {
        const auto* e = find(key);
        std::vector<double> values;
        for (const auto& token : tokens(e->value)) {
            const auto v = parse_double(token);
            if (v && std::isfinite(*v)) values.push_back(*v);
            else error(*e, "'" + key + "' entry '" + token + "' is not a finite number");
        }
        return values;
    }

    static void fill_defaults(ExperimentConfig& config) {
        using K = ExperimentKind;
        using A = Algorithm;
        config.regularization = {true, {0.01}};
        config.tau_multipliers = {1.0};
        config.theta_presets = {kThetaPresets.begin(), kThetaPresets.end()};
        config.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
        switch (config.kind) {
        case K::demo:
            config.algorithms = {A::msmtfl_at};
            config.seeds = {1};
            break;
        case K::stage_sweep:
            config.algorithms = {A::msmtfl, A::msmtfl_at};
            config.theta_presets = {kThetaPresets.front()};
            break;
        case K::lambda_sweep:
            config.algorithms = {A::lasso, A::l21, A::msmtfl, A::msmtfl_at};
            config.regularization.values.clear();
            break;
        case K::tau_sensitivity:
            config.algorithms = {A::msmtfl_at};
            config.tau_multipliers = {0.5, 1.0, 5.0};
            break;
        case K::realdata_sweep:
            config.algorithms = {A::lasso, A::l21, A::msmtfl, A::msmtfl_at};
            config.theta_presets = {kThetaPresets.front()};
            config.train_ratios = {0.15, 0.2, 0.25};
            break;
        }
    }

    ExperimentConfig finish(const ExperimentConfig& config) const {
        if (errors_.empty()) return config;
        std::string message = "invalid configuration:";
        for (const auto& e : errors_) message += "\n  " + e;
        throw ConfigError(message);
    }

    std::map<std::string, Entry> entries_;
    fs::path base_dir_;
    std::vector<std::string> errors_;
};

} // namespace

void ExperimentConfig::validate() const {
    std::vector<std::string> problems;
    const auto positive_all = [&](const std::vector<double>& values, const std::string& name) {
        for (double v : values) {
            if (!(v > 0.0) || !std::isfinite(v)) {
                problems.push_back(name + " entries must be positive and finite");
                return;
            }
        }
    };
    const auto uses = [&](Algorithm a) {
        return std::find(algorithms.begin(), algorithms.end(), a) != algorithms.end();
    };

    if (algorithms.empty()) problems.push_back("at least one algorithm is required");
    if (seeds.empty()) problems.push_back("at least one seed is required");
    if (stages == 0) problems.push_back("stages must be at least 1");
    if (regularization.values.empty()) problems.push_back("no regularization value given");
    positive_all(regularization.values, regularization.is_alpha ? "alpha" : "lambda");
    if (uses(Algorithm::msmtfl) && theta_presets.empty()) {
        problems.push_back("msmtfl needs at least one theta preset");
    }
    positive_all(theta_presets, "theta_presets");
    if (uses(Algorithm::msmtfl_at) && tau_multipliers.empty()) {
        problems.push_back("msmtfl-at needs at least one tau multiplier");
    }
    positive_all(tau_multipliers, "tau multipliers");
    if (!(tolerance > 0.0)) problems.push_back("tolerance must be positive");
    if (max_sweeps == 0) problems.push_back("max_sweeps must be at least 1");
    if (l21_max_iterations == 0) problems.push_back("l21_max_iterations must be at least 1");
    if (!(l21_tolerance > 0.0)) problems.push_back("l21_tolerance must be positive");
    if (out.empty()) problems.push_back("output path is empty");

    if (kind == ExperimentKind::tau_sensitivity) {
        for (auto a : algorithms) {
            if (a != Algorithm::msmtfl_at) {
                problems.push_back("tau-sensitivity only runs msmtfl-at, not " +
                                   std::string(to_string(a)));
            }
        }
    }
    if (kind == ExperimentKind::realdata_sweep) {
        if (!manifest) problems.push_back("realdata-sweep requires 'manifest'");
        if (train_ratios.empty()) problems.push_back("realdata-sweep needs at least one train ratio");
        for (double r : train_ratios) {
            if (!(r > 0.0 && r < 1.0)) {
                problems.push_back("train ratios must lie in (0, 1)");
                break;
            }
        }
    } else {
        try {
            synthetic.validate();
        } catch (const std::invalid_argument& e) {
            problems.push_back(std::string("synthetic problem: ") + e.what());
        }
    }

    if (!problems.empty()) {
        std::string message = problems.front();
        for (std::size_t i = 1; i < problems.size(); ++i) message += "\n  " + problems[i];
        throw ConfigError(message);
    }
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& [key, kinds] : key_table()) k.push_back(key);
        return k;
    }();
    return keys;
}

ExperimentConfig parse_config(const std::optional<fs::path>& file,
                              const std::vector<std::pair<std::string, std::string>>& overrides) {
    std::map<std::string, Entry> entries;
    std::vector<std::string> duplicates;
    fs::path base_dir;
    if (file) {
        base_dir = file->parent_path();
        for (const auto& kv : read_key_values(*file)) {
            const std::string origin = file->string() + ":" + std::to_string(kv.line);
            if (entries.contains(kv.key)) {
                duplicates.push_back(origin + ": duplicate key '" + kv.key + "'");
                continue;
            }
            entries[kv.key] = {kv.value, origin, true};
        }
    }
    for (const auto& [key, value] : overrides) {
        entries[key] = {value, "option '" + key + "'", false};
    }
    return Parser(std::move(entries), base_dir, std::move(duplicates)).build();
}

namespace {

struct Job {
    std::uint64_t seed = 0;
    std::optional<double> train_ratio;
};

struct JobOutput {
    std::vector<ResultRow> rows;
    std::size_t failures = 0;
    std::size_t nonconverged = 0;
};

struct Problem {
    TaskDataset train;
    std::optional<WeightMatrix> truth;
    std::optional<TaskDataset> test;
};

Problem make_problem(const ExperimentConfig& config, const Job& job) {
    if (config.kind == ExperimentKind::realdata_sweep) {
        auto [train, test] = split(load_dataset(*config.manifest), {*job.train_ratio, job.seed});
        return {std::move(train), std::nullopt, std::move(test)};
    }
    SyntheticSpec spec = config.synthetic;
    spec.seed = job.seed;
    auto instance = generate(spec);
    return {std::move(instance.data), std::move(instance.true_weights), std::nullopt};
}

std::size_t samples_for_lambda(const TaskDataset& data) {
    return std::max<std::size_t>(1, data.total_samples() / data.task_count());
}

void attach_metrics(ResultRow& row, const Problem& problem, const WeightMatrix& w) {
    if (problem.truth) row.l21_error = l21_error(w, *problem.truth);
    if (problem.test) {
        const auto eval = evaluate_predictions(*problem.test, w);
        row.nmse = eval.nmse;
        row.amse = eval.amse;
    }
}

std::string label(std::string name, const std::string& option, std::optional<double> ratio) {
    if (!option.empty()) name += ":" + option;
    if (ratio) name += ":ratio=" + format_double(*ratio);
    return name;
}

JobOutput run_job(const ExperimentConfig& config, const Job& job) {
    JobOutput output;
    const Problem problem = make_problem(config, job);
    const TaskDataset& data = problem.train;
    const bool all_stages =
        config.kind == ExperimentKind::demo || config.kind == ExperimentKind::stage_sweep;

    std::vector<double> lambdas;
    for (double v : config.regularization.values) {
        lambdas.push_back(config.regularization.is_alpha
                              ? lambda_from_alpha(v, data.feature_count(), data.task_count(),
                                                  samples_for_lambda(data))
                              : v);
    }

    SolverOptions solver;
    solver.tolerance = config.tolerance;
    solver.max_sweeps = config.max_sweeps;

    const auto failure_row = [&](const std::string& name, double lambda) {
        ResultRow row;
        row.algorithm = name;
        row.seed = job.seed;
        row.lambda = lambda;
        ++output.failures;
        return row;
    };

    // Runs one cell; numerical failures become an explicit empty row.
    const auto cell = [&](const std::string& name, double lambda, auto&& body) {
        std::vector<ResultRow> rows;
        try {
            body(rows);
        } catch (const NumericalError&) {
            rows = {failure_row(name, lambda)};
        } catch (const std::domain_error&) {
            rows = {failure_row(name, lambda)};
        }
        output.rows.insert(output.rows.end(), rows.begin(), rows.end());
    };

    const auto emit_traces = [&](const std::string& name, double lambda,
                                 const std::vector<StageTrace>& traces,
                                 std::vector<ResultRow>& rows) {
        for (std::size_t s = all_stages ? 0 : traces.size() - 1; s < traces.size(); ++s) {
            const auto& t = traces[s];
            ResultRow row;
            row.algorithm = name;
            row.seed = job.seed;
            row.stage = t.stage;
            row.lambda = lambda;
            row.theta = t.theta;
            row.tau = t.tau;
            row.objective = t.objective;
            attach_metrics(row, problem, t.solution);
            rows.push_back(std::move(row));
        }
        for (const auto& t : traces) {
            if (!t.solver.converged) {
                ++output.nonconverged;
                break;
            }
        }
    };

    for (auto algorithm : config.algorithms) {
        const std::string base(to_string(algorithm));
        switch (algorithm) {
        case Algorithm::lasso:
            for (double lambda : lambdas) {
                const auto name = label(base, "", job.train_ratio);
                cell(name, lambda, [&](std::vector<ResultRow>& rows) {
                    const auto penalties = PenaltyVector::uniform(data.feature_count(), lambda);
                    const auto report = solve_weighted_l1(data, penalties, solver);
                    if (!report.all_converged()) ++output.nonconverged;
                    ResultRow row;
                    row.algorithm = name;
                    row.seed = job.seed;
                    row.stage = 1;
                    row.lambda = lambda;
                    row.objective = weighted_l1_objective(data, report.solution, penalties);
                    attach_metrics(row, problem, report.solution);
                    rows.push_back(std::move(row));
                });
            }
            break;
        case Algorithm::l21:
            for (double lambda : lambdas) {
                const auto name = label(base, "", job.train_ratio);
                cell(name, lambda, [&](std::vector<ResultRow>& rows) {
                    L21Options options;
                    options.lambda = lambda;
                    options.max_iterations = config.l21_max_iterations;
                    options.tolerance = config.l21_tolerance;
                    const auto result = solve_l21(data, options);
                    if (!result.converged) ++output.nonconverged;
                    ResultRow row;
                    row.algorithm = name;
                    row.seed = job.seed;
                    row.lambda = lambda;
                    row.objective = result.objective;
                    attach_metrics(row, problem, result.solution);
                    rows.push_back(std::move(row));
                });
            }
            break;
        case Algorithm::msmtfl:
            for (double k : config.theta_presets) {
                const auto name = label(base, "theta=" + format_double(k), job.train_ratio);
                for (double lambda : lambdas) {
                    cell(name, lambda, [&](std::vector<ResultRow>& rows) {
                        MultistageConfig mc;
                        mc.lambda = lambda;
                        mc.theta = k * static_cast<double>(data.task_count()) * lambda;
                        mc.stages = config.stages;
                        mc.early_stop = config.early_stop;
                        mc.solver = solver;
                        emit_traces(name, lambda, run_msmtfl(data, mc), rows);
                    });
                }
            }
            break;
        case Algorithm::msmtfl_at:
            for (double mu : config.tau_multipliers) {
                const auto name = label(base, "tau=" + format_double(mu), job.train_ratio);
                for (double lambda : lambdas) {
                    cell(name, lambda, [&](std::vector<ResultRow>& rows) {
                        MultistageConfig mc;
                        mc.lambda = lambda;
                        mc.stages = config.stages;
                        mc.tau_multiplier = mu;
                        mc.early_stop = config.early_stop;
                        mc.solver = solver;
                        emit_traces(name, lambda, run_msmtfl_at(data, mc), rows);
                    });
                }
            }
            break;
        }
    }
    return output;
}

bool is_failure(const ResultRow& row) {
    return !row.l21_error && !row.nmse && !row.amse && !row.objective;
}

} // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& config) {
    config.validate();

    std::vector<Job> jobs;
    for (auto seed : config.seeds) {
        if (config.kind == ExperimentKind::realdata_sweep) {
            for (double r : config.train_ratios) jobs.push_back({seed, r});
        } else {
            jobs.push_back({seed, std::nullopt});
        }
    }
    if (config.kind == ExperimentKind::realdata_sweep) {
        // Fail on unreadable data before spawning workers.
        (void)load_dataset(*config.manifest);
    }

    std::vector<JobOutput> outputs(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    std::size_t workers = config.threads != 0 ? config.threads
                                              : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, jobs.size());
    std::atomic<std::size_t> next{0};
    const auto work = [&] {
        for (std::size_t j = next++; j < jobs.size(); j = next++) {
            try {
                outputs[j] = run_job(config, jobs[j]);
            } catch (...) {
                errors[j] = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    ExperimentOutcome outcome;
    for (auto& o : outputs) {
        outcome.rows.insert(outcome.rows.end(), o.rows.begin(), o.rows.end());
        outcome.hard_failures += o.failures;
        outcome.nonconverged += o.nonconverged;
    }
    write_results(outcome.rows, config.out);
    outcome.summary = summarize(outcome.rows);
    return outcome;
}

std::vector<SummaryLine> summarize(const std::vector<ResultRow>& rows) {
    // Last row per (algorithm, lambda, seed) is the final stage.
    using Key = std::pair<std::string, std::optional<double>>;
    std::vector<Key> order;
    std::map<Key, std::map<std::uint64_t, const ResultRow*>> finals;
    for (const auto& row : rows) {
        Key key{row.algorithm, row.lambda};
        if (!finals.contains(key)) order.push_back(key);
        finals[key][row.seed] = &row;
    }

    std::vector<SummaryLine> lines;
    for (const auto& key : order) {
        SummaryLine line;
        line.algorithm = key.first;
        line.lambda = key.second;
        double sums[3] = {0.0, 0.0, 0.0};
        std::size_t counts[3] = {0, 0, 0};
        for (const auto& [seed, row] : finals[key]) {
            if (is_failure(*row)) {
                ++line.failures;
                continue;
            }
            ++line.runs;
            const std::optional<double>* fields[3] = {&row->l21_error, &row->nmse, &row->amse};
            for (int f = 0; f < 3; ++f) {
                if (*fields[f]) {
                    sums[f] += **fields[f];
                    ++counts[f];
                }
            }
        }
        std::optional<double>* targets[3] = {&line.mean_l21_error, &line.mean_nmse,
                                             &line.mean_amse};
        for (int f = 0; f < 3; ++f) {
            if (counts[f] > 0) *targets[f] = sums[f] / static_cast<double>(counts[f]);
        }
        lines.push_back(std::move(line));
    }
    return lines;
}

void print_summary(const ExperimentOutcome& outcome, std::ostream& out) {
    const auto show = [](const std::optional<double>& v) {
        if (!v) return std::string("-");
        std::ostringstream s;
        s << std::setprecision(4) << *v;
        return s.str();
    };
    out << std::left << std::setw(32) << "algorithm" << std::setw(12) << "lambda" << std::setw(6)
        << "runs" << std::setw(12) << "l21_error" << std::setw(12) << "nmse" << std::setw(12)
        << "amse" << "failed\n";
    for (const auto& line : outcome.summary) {
        out << std::left << std::setw(32) << line.algorithm << std::setw(12) << show(line.lambda)
            << std::setw(6) << line.runs << std::setw(12) << show(line.mean_l21_error)
            << std::setw(12) << show(line.mean_nmse) << std::setw(12) << show(line.mean_amse)
            << line.failures << '\n';
    }
    out << outcome.rows.size() << " rows, " << outcome.hard_failures << " failed cells, "
        << outcome.nonconverged << " cells hit the solver iteration limit\n";
}

} // namespace mtfl
