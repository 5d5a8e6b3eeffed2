// Experiment driver: mtfl --experiment demo --out demo.csv
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "mtfl/error.hpp"
#include "mtfl/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;
constexpr int kExitNumerical = 3;

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-task sparse feature learning experiments"};
    app.set_version_flag("--version", "mtfl 1.0 (results schema " +
                                          std::to_string(mtfl::kResultsSchemaVersion) + ")");

    std::optional<std::string> config_path;
    std::vector<std::pair<std::string, std::string>> overrides;
    std::vector<std::string> settings;
    bool quiet = false;

    struct Flag {
        const char* name;
        const char* key;
        const char* help;
    };
    const Flag flags[] = {
        {"--experiment", "experiment",
         "demo | stage-sweep | lambda-sweep | tau-sensitivity | realdata-sweep"},
        {"--seed", "seeds", "Comma-separated seeds"},
        {"--runs", "runs", "Use seeds 1..N"},
        {"--out", "out", "Results CSV path"},
        {"--algorithms", "algorithms", "Comma-separated subset of lasso,l21,msmtfl,msmtfl-at"},
        {"--stages", "stages", "Number of multi-stage iterations"},
        {"--preset", "preset", "Synthetic preset: fig2a | fig2b | fig2c"},
        {"--manifest", "manifest", "Dataset manifest for realdata-sweep"},
        {"--alpha", "alpha", "lambda = alpha * sqrt(ln(d m) / n)"},
        {"--alpha-grid", "alpha_grid", "Comma-separated alpha values for lambda-sweep"},
        {"--lambda", "lambda", "Regularisation strength, instead of --alpha"},
        {"--lambda-grid", "lambda_grid", "Comma-separated lambda values for lambda-sweep"},
        {"--theta-presets", "theta_presets", "Comma-separated multiples k of theta = k m lambda"},
        {"--tau-multipliers", "tau_multipliers", "Comma-separated tau scale factors"},
        {"--train-ratio", "train_ratio", "Comma-separated training fractions"},
        {"--threads", "threads", "Worker threads (0 = all cores)"},
    };
    std::vector<std::optional<std::string>> values(std::size(flags));
    app.add_option("--config", config_path, "Key-value config file; flags override it");
    for (std::size_t i = 0; i < std::size(flags); ++i) {
        app.add_option(flags[i].name, values[i], flags[i].help);
    }
    app.add_option("--set", settings, "Any config key as key=value (repeatable)");
    app.add_flag("-q,--quiet", quiet, "Suppress the console summary");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    for (const auto& s : settings) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) {
            std::cerr << "error: --set expects key=value, got '" << s << "'\n";
            return kExitConfig;
        }
        overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    for (std::size_t i = 0; i < std::size(flags); ++i) {
        if (values[i]) overrides.emplace_back(flags[i].key, *values[i]);
    }

    try {
        std::optional<std::filesystem::path> file;
        if (config_path) file = *config_path;
        const auto config = mtfl::parse_config(file, overrides);
        const auto outcome = mtfl::run_experiment(config);
        if (!quiet) {
            mtfl::print_summary(outcome, std::cout);
            std::cout << "wrote " << config.out.string() << '\n';
        }
        return outcome.hard_failures > 0 ? kExitNumerical : kExitOk;
    } catch (const mtfl::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const mtfl::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
}
