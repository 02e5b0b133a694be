#ifndef GHOSTUMAP_TOOLS_CLI_HPP
#define GHOSTUMAP_TOOLS_CLI_HPP

#include "ghostumap/ghostumap.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace ghostumap::cli {

enum ExitCode { ok = 0, usage_error = 1, data_error = 2 };

inline std::string kebab(std::string s) {
    std::replace(s.begin(), s.end(), '_', '-');
    return s;
}

/// Flags parsed as text before conversion.
struct FlagValues {
    std::string epochs = "auto";
    std::string reduction;
    std::string init;
};

/**
 * Register one kebab-case flag per hyperparameter, writing into `h`. Enumerations and
 * the optional epoch count go through `text` and are applied by `apply_text_flags()`.
 */
inline void add_hyperparameter_flags(CLI::App& app, Hyperparameters& h, FlagValues& text) {
    const CLI::Range unit(0.0, 1.0);
    text.reduction = to_string(h.reduction);
    text.init = to_string(h.init);

    app.add_option("--n-neighbors", h.n_neighbors, "Neighbors in the kNN graph")
        ->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--min-dist", h.min_dist, "Minimum distance between embedded points")
        ->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--spread", h.spread, "Scale of embedded points")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--n-epochs", text.epochs, "Optimization epochs (auto: 500, or 200 above 10000 points)")
        ->capture_default_str();
    app.add_option("--n-negative-samples", h.n_negative_samples, "Negative samples per positive sample")
        ->capture_default_str()->check(CLI::NonNegativeNumber);
    app.add_option("--n-ghosts", h.n_ghosts, "Ghosts per point (M)")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--radius", h.radius, "Ghost placement radius r, fraction of the embedding extent")
        ->capture_default_str()->check(unit);
    app.add_option("--lazy-gen", h.lazy_gen, "Fraction of epochs before ghosts are generated")
        ->capture_default_str()->check(unit);
    app.add_option("--drop-start", h.drop_start, "Fraction of epochs before adaptive dropping starts")
        ->capture_default_str()->check(unit);
    app.add_option("--beta", h.beta, "EMA weight of the newest distance measurement")->capture_default_str()->check(unit);
    app.add_option("--sensitivity", h.sensitivity, "Quantile of ghost distances used as d_i")
        ->capture_default_str()->check(unit);
    app.add_option("--reduction", text.reduction, "Ghost reduction")
        ->capture_default_str()->check(CLI::IsMember({"none", "halving", "adaptive"}));
    app.add_option("--halving-schedule", h.halving_schedule, "Epochs of the halving steps")
        ->delimiter(',')->default_str("50,100,150");
    app.add_option("--seed", h.seed, "Master random seed")->capture_default_str();
    app.add_option("--init", text.init, "Initial layout")->capture_default_str()->check(CLI::IsMember({"pca", "random"}));
    app.add_option("--learning-rate", h.learning_rate, "Initial learning rate")
        ->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--threads", h.threads, "Worker threads (1 is deterministic)")
        ->capture_default_str()->check(CLI::PositiveNumber);
}

inline void apply_text_flags(Hyperparameters& h, const FlagValues& text) {
    set_hyperparameter(h, "reduction", text.reduction);
    set_hyperparameter(h, "init", text.init);
    if (text.epochs != "auto") {
        try {
            set_hyperparameter(h, "n_epochs", text.epochs);
        } catch (const ConfigError&) {
            throw ConfigError("n_epochs", "expected an integer or 'auto'");
        }
    }
}

inline DataMatrix load_input(const std::string& path, std::string format, const std::string& label_column) {
    if (format.empty()) {
        format = path.size() >= 5 && path.substr(path.size() - 5) == ".gum2" ? "gum2" : "csv";
    }
    if (format == "gum2") {
        return load_f32_matrix(path);
    }
    CsvOptions options;
    options.label_column = label_column;
    return load_csv(path, options);
}

/**
 * Entry point of the `ghostumap` tool. Returns the process exit code.
 */
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Stability-aware UMAP with ghost projections", "ghostumap"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "ghostumap 0.1.0");

    Hyperparameters h;
    FlagValues text;
    std::string input, output, format, label_column;
    auto* fit = app.add_subcommand("fit", "Embed a dataset and export ghosts to .ghost.json");
    fit->add_option("--input", input, "Input matrix (CSV or GUM2)")->required();
    fit->add_option("--format", format, "Input format (default: from the file extension)")
        ->check(CLI::IsMember({"csv", "gum2"}));
    fit->add_option("--label-column", label_column, "CSV label column, by name or index");
    fit->add_option("--out", output, "Output .ghost.json")->required();
    add_hyperparameter_flags(*fit, h, text);

    std::string export_path;
    double threshold = 0.1;
    bool patterns = false;
    auto* analyze = app.add_subcommand("analyze", "Report unstable points of a .ghost.json export");
    analyze->add_option("--input", export_path, "Export written by fit")->required();
    analyze->add_option("--d", threshold, "Stability threshold d")->capture_default_str()->check(CLI::NonNegativeNumber);
    analyze->add_flag("--patterns", patterns, "Tally ghost patterns P1-P4 for points with ghosts");

    std::string suite_path, results_path;
    auto* bench = app.add_subcommand("bench", "Run a TOML benchmark suite");
    bench->add_option("--suite", suite_path, "Suite description (.toml)")->required();
    bench->add_option("--out", results_path, "Per-run results CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::CallForVersion&) {
        out << app.version() << "\n";
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        if (auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front()) {
            err << "run '" << sub->get_name() << " --help' for usage\n";
        }
        return usage_error;
    }

    try {
        if (fit->parsed()) {
            apply_text_flags(h, text);
            auto start = std::chrono::steady_clock::now();
            auto data = load_input(input, format, label_column);
            auto resolved = validate_config(h, data.n_points());
            auto prepared = build_graph(data, resolved.n_neighbors, resolved.threads);
            Diagnostics diagnostics;
            auto init_rng = RngStreams(resolved.seed).init();
            auto initial = initialize_embedding(data, resolved.init, init_rng, &diagnostics);
            auto run = optimize_with_ghosts(prepared.graph, std::move(initial), resolved);
            for (const auto& d : diagnostics) {
                err << "warning: " << d << "\n";
            }
            if (prepared.locality.n_unconverged) {
                err << "warning: " << prepared.locality.n_unconverged
                    << " points did not reach the bandwidth tolerance\n";
            }

            auto exported = make_export(run, prepared.knn, data);
            write_export(output, exported);
            double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

            auto report = exported.report();
            auto unstable = classify(report, exported.default_d).unstable.size();
            out << std::fixed << std::setprecision(1) << "fit: " << data.n_points() << " points, "
                << resolved.n_ghosts << " ghosts, reduction " << to_string(resolved.reduction) << ", "
                << run.ghosts.alive_count() << " with ghosts, " << unstable << " unstable at d="
                << std::setprecision(2) << exported.default_d << ", wrote " << output << " ("
                << std::setprecision(1) << elapsed << " s)\n";
            return ok;
        }

        if (analyze->parsed()) {
            auto exported = read_export(export_path);
            auto report = exported.report();
            auto partition = classify(report, threshold);

            std::size_t dropped = 0;
            for (auto f : report.dropped) {
                dropped += f;
            }
            out << "points: " << report.size() << "\n";
            out << "threshold d: " << threshold << "\n";
            out << "stable: " << partition.stable.size() << "\n";
            out << "unstable: " << partition.unstable.size() << "\n";
            out << "dropped: " << dropped << "\n";

            auto ranked = partition.unstable;
            std::stable_sort(ranked.begin(), ranked.end(),
                             [&](std::size_t a, std::size_t b) { return report.d[a] > report.d[b]; });
            if (ranked.size() > 20) {
                ranked.resize(20);
            }
            out << "top unstable (id d):\n";
            for (auto i : ranked) {
                out << "  " << i << " " << std::setprecision(6) << report.d[i] << "\n";
            }

            if (patterns) {
                std::map<Pattern, std::size_t> tally;
                for (std::size_t i = 0; i < exported.points.size(); ++i) {
                    const auto& p = exported.points[i];
                    tally[p.dropped ? Pattern::dropped : classify_pattern(p.position, p.ghosts, threshold)]++;
                }
                out << "patterns:";
                for (auto p : {Pattern::P1, Pattern::P2, Pattern::P3, Pattern::P4, Pattern::dropped}) {
                    out << " " << to_string(p) << "=" << tally[p];
                }
                out << "\n";
            }
            return ok;
        }

        if (bench->parsed()) {
            auto suite = load_suite(suite_path);
            auto report = run_benchmark(suite, [&](const BenchResult& r) {
                err << "bench: " << r.dataset << " " << to_string(r.mode) << " seed " << r.seed << " "
                    << std::setprecision(3) << r.runtime_seconds << " s\n";
            });
            write_file(results_path, results_to_csv(report.results));
            out << format_summary(summarize(report.results), report.timing_indicative);
            for (const auto& [name, message] : report.errors) {
                err << "error: dataset " << name << ": " << message << "\n";
            }
            return report.errors.empty() ? ok : data_error;
        }
    } catch (const ConfigError& e) {
        err << "error: --" << kebab(e.field()) << ": " << e.what() << "\n";
        return usage_error;
    } catch (const DataError& e) {
        err << "error: " << e.what() << "\n";
        return data_error;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return data_error;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return data_error;
    }
    return usage_error;
}

}

#endif
