#ifndef GHOSTUMAP_BENCH_HPP
#define GHOSTUMAP_BENCH_HPP

#include "core.hpp"
#include "datasets.hpp"
#include "ghosts.hpp"
#include "io.hpp"
#include "knn_graph.hpp"
#include "layout.hpp"

#include "toml.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

/**
 * @file bench.hpp
 *
 * @brief Benchmark harness: unstable-set recovery and runtime of the reduction modes.
 */

namespace ghostumap {

class DatasetError : public Error {
public:
    using Error::Error;
};

enum class BenchMode { vanilla, none, halving, adaptive };

inline const char* to_string(BenchMode m) {
    switch (m) {
        case BenchMode::vanilla: return "vanilla";
        case BenchMode::none: return "none";
        case BenchMode::halving: return "halving";
        case BenchMode::adaptive: return "adaptive";
    }
    return "?";
}

inline std::optional<BenchMode> parse_bench_mode(const std::string& s) {
    if (s == "vanilla") return BenchMode::vanilla;
    if (s == "none") return BenchMode::none;
    if (s == "halving") return BenchMode::halving;
    if (s == "adaptive") return BenchMode::adaptive;
    return std::nullopt;
}

/// Sorted point ids.
using IdSet = std::vector<std::size_t>;

inline IdSet ground_truth_unstable(const GhostRunResult& none_run, double d) {
    IdSet out;
    for (std::size_t i = 0; i < none_run.positions.size(); ++i) {
        if (none_run.distances.d[i] > d) {
            out.push_back(i);
        }
    }
    return out;
}

/**
 * Runs `h` with reduction disabled and returns the points with d_i > d.
 */
inline IdSet ground_truth_unstable(const DataMatrix& data, Hyperparameters h, double d) {
    h.reduction = ReductionMode::none;
    return ground_truth_unstable(run_ghostumap(data, h), d);
}

/// Points that kept their ghosts until the end and have d_i > d.
inline IdSet predicted_unstable_adaptive(const GhostRunResult& run, double d) {
    IdSet out;
    for (std::size_t i = 0; i < run.positions.size(); ++i) {
        if (!run.dropped(i) && run.distances.d[i] > d) {
            out.push_back(i);
        }
    }
    return out;
}

/// Every point that survived the halving steps.
inline IdSet predicted_unstable_halving(const GhostRunResult& run) {
    IdSet out;
    for (std::size_t i = 0; i < run.positions.size(); ++i) {
        if (!run.dropped(i)) {
            out.push_back(i);
        }
    }
    return out;
}

struct Scores {
    double precision = 0;
    double recall = 0;
    double f1 = 0;
};

/**
 * Precision, recall and F1 of `predicted` against `truth` (both sorted, duplicate-free).
 * An empty prediction has precision 1 if the truth is empty too and 0 otherwise; an
 * empty truth gives recall 1; F1 is 0 when precision and recall are both 0.
 */
inline Scores f1_recall(const IdSet& predicted, const IdSet& truth) {
    std::size_t hits = 0;
    for (std::size_t a = 0, b = 0; a < predicted.size() && b < truth.size();) {
        if (predicted[a] < truth[b]) {
            ++a;
        } else if (truth[b] < predicted[a]) {
            ++b;
        } else {
            ++hits, ++a, ++b;
        }
    }

    Scores s;
    if (predicted.empty()) {
        s.precision = truth.empty() ? 1 : 0;
    } else {
        s.precision = static_cast<double>(hits) / predicted.size();
    }
    s.recall = truth.empty() ? 1 : static_cast<double>(hits) / truth.size();
    s.f1 = s.precision + s.recall > 0 ? 2 * s.precision * s.recall / (s.precision + s.recall) : 0;
    return s;
}

/**
 * @brief One timed run.
 */
struct BenchResult {
    std::string dataset;
    BenchMode mode = BenchMode::vanilla;
    std::uint64_t seed = 0;
    /// Wall time of the optimization only; the kNN graph and initialization are excluded.
    double runtime_seconds = 0;
    /// Unset for vanilla and none.
    std::optional<double> precision, recall, f1;
    /// Size of the mode's unstable set (the ground truth for none, survivors for halving).
    std::size_t unstable_count = 0;
    /// Points that still have ghosts at the end.
    std::size_t alive_count = 0;
    Hyperparameters config;
};

/**
 * @brief A dataset entry of a suite; `load` may throw, which only skips this dataset.
 */
struct BenchDataset {
    std::string name;
    std::function<DataMatrix()> load;
};

struct Sweep {
    std::string parameter;
    std::vector<std::string> values;
};

struct BenchSuite {
    std::vector<BenchDataset> datasets;
    std::vector<std::uint64_t> seeds{0, 1, 2};
    std::vector<BenchMode> modes{BenchMode::vanilla, BenchMode::none, BenchMode::halving, BenchMode::adaptive};
    Hyperparameters base;
    /// Grids are combined as a Cartesian product.
    std::vector<Sweep> sweeps;
    double d = 0.1;
    /// Run one untimed vanilla optimization per dataset before the timed runs.
    bool warmup = true;
    /// Lazy generation used for halving runs, whose schedule starts before the default generation epoch.
    double halving_lazy_gen = 0.0;
    /// Run seeds concurrently. Timings are then indicative only.
    bool parallel = false;
};

struct BenchReport {
    std::vector<BenchResult> results;
    /// (dataset, message) for every dataset that failed to load or run.
    std::vector<std::pair<std::string, std::string>> errors;
    bool timing_indicative = false;
};

namespace detail {

inline std::vector<Hyperparameters> expand_sweeps(const Hyperparameters& base, const std::vector<Sweep>& sweeps) {
    std::vector<Hyperparameters> out{base};
    for (const auto& sweep : sweeps) {
        std::vector<Hyperparameters> next;
        for (const auto& h : out) {
            for (const auto& v : sweep.values) {
                auto copy = h;
                set_hyperparameter(copy, sweep.parameter, v);
                next.push_back(std::move(copy));
            }
        }
        out = std::move(next);
    }
    return out;
}

template<class Function>
double seconds(Function&& fun) {
    auto start = std::chrono::steady_clock::now();
    fun();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}

/**
 * Run every (dataset, sweep point, seed, mode) combination of the suite.
 *
 * For each dataset and sweep point the graph is built once. Per seed the same initial
 * embedding is shared by all modes. The ground truth comes from the `none` run, which is
 * executed (and reported) whenever halving or adaptive is requested. A dataset that
 * throws is recorded in `errors` and the suite continues.
 */
inline BenchReport run_benchmark(const BenchSuite& suite,
                                 const std::function<void(const BenchResult&)>& progress = {}) {
    BenchReport report;
    report.timing_indicative = suite.parallel;

    auto modes = suite.modes;
    bool needs_truth = std::count(modes.begin(), modes.end(), BenchMode::halving) ||
                       std::count(modes.begin(), modes.end(), BenchMode::adaptive);
    if (needs_truth && !std::count(modes.begin(), modes.end(), BenchMode::none)) {
        modes.insert(modes.begin(), BenchMode::none);
    }
    // The none run must precede the modes scored against it.
    std::stable_partition(modes.begin(), modes.end(), [](BenchMode m) {
        return m == BenchMode::vanilla || m == BenchMode::none;
    });

    for (const auto& dataset : suite.datasets) {
        try {
            const auto data = dataset.load();
            bool warmed_up = !suite.warmup;
            for (const auto& point : detail::expand_sweeps(suite.base, suite.sweeps)) {
                const auto base = validate_config(point, data.n_points());
                const auto prepared = build_graph(data, base.n_neighbors, base.threads);

                auto run_seed = [&](std::uint64_t seed) {
                    auto h = base;
                    h.seed = seed;
                    auto init_rng = RngStreams(seed).init();
                    const auto initial = initialize_embedding(data, h.init, init_rng);

                    std::vector<BenchResult> rows;
                    IdSet truth;
                    for (auto mode : modes) {
                        BenchResult row;
                        row.dataset = dataset.name;
                        row.mode = mode;
                        row.seed = seed;

                        if (mode == BenchMode::vanilla) {
                            row.config = h;
                            row.runtime_seconds = detail::seconds([&] { optimize_vanilla(prepared.graph, initial, h); });
                            rows.push_back(std::move(row));
                            continue;
                        }

                        auto hm = h;
                        if (mode == BenchMode::none) {
                            hm.reduction = ReductionMode::none;
                        } else if (mode == BenchMode::adaptive) {
                            hm.reduction = ReductionMode::adaptive;
                        } else {
                            hm.reduction = ReductionMode::halving;
                            hm.lazy_gen = suite.halving_lazy_gen;
                        }
                        hm = validate_config(hm, data.n_points());
                        row.config = hm;

                        GhostRunResult run;
                        row.runtime_seconds = detail::seconds([&] { run = optimize_with_ghosts(prepared.graph, initial, hm); });
                        row.alive_count = run.ghosts.alive_count();

                        if (mode == BenchMode::none) {
                            truth = ground_truth_unstable(run, suite.d);
                            row.unstable_count = truth.size();
                        } else {
                            auto predicted = mode == BenchMode::adaptive ? predicted_unstable_adaptive(run, suite.d)
                                                                         : predicted_unstable_halving(run);
                            auto s = f1_recall(predicted, truth);
                            row.precision = s.precision;
                            row.recall = s.recall;
                            row.f1 = s.f1;
                            row.unstable_count = predicted.size();
                        }
                        rows.push_back(std::move(row));
                    }
                    return rows;
                };

                if (!warmed_up) {
                    auto init_rng = RngStreams(base.seed).init();
                    optimize_vanilla(prepared.graph, initialize_embedding(data, base.init, init_rng), base);
                    warmed_up = true;
                }

                std::vector<std::vector<BenchResult>> per_seed(suite.seeds.size());
                auto body = [&](std::size_t start, std::size_t end) {
                    for (std::size_t s = start; s < end; ++s) {
                        per_seed[s] = run_seed(suite.seeds[s]);
                    }
                };
                if (suite.parallel) {
                    parallel_for(suite.seeds.size(), static_cast<int>(suite.seeds.size()), body);
                } else {
                    body(0, suite.seeds.size());
                }
                for (auto& rows : per_seed) {
                    for (auto& row : rows) {
                        if (progress) {
                            progress(row);
                        }
                        report.results.push_back(std::move(row));
                    }
                }
            }
        } catch (const std::exception& ex) {
            report.errors.emplace_back(dataset.name, ex.what());
        }
    }
    return report;
}

/*****************************
 *** Results CSV ***
 *****************************/

inline std::vector<std::string> results_csv_columns() {
    std::vector<std::string> out{"dataset", "mode", "seed", "runtime_s", "precision", "recall", "f1",
                                 "unstable_count", "alive_count"};
    for (const auto& [name, value] : hyperparameter_fields(Hyperparameters{})) {
        if (name != "seed") {
            out.push_back(name);
        }
    }
    return out;
}

namespace detail {

inline std::string format_double(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        out += c;
        if (c == '"') out += '"';
    }
    return out + "\"";
}

}

/**
 * Results as CSV with the columns of `results_csv_columns()`. The hyperparameter
 * columns hold each run's resolved configuration. Absent scores are empty fields.
 */
inline std::string results_to_csv(const std::vector<BenchResult>& results) {
    std::ostringstream out;
    auto columns = results_csv_columns();
    for (std::size_t c = 0; c < columns.size(); ++c) {
        out << (c ? "," : "") << columns[c];
    }
    out << "\n";
    auto opt = [](const std::optional<double>& v) { return v ? detail::format_double(*v) : std::string(); };
    for (const auto& r : results) {
        out << detail::csv_escape(r.dataset) << ',' << to_string(r.mode) << ',' << r.seed << ','
            << detail::format_double(r.runtime_seconds) << ',' << opt(r.precision) << ',' << opt(r.recall) << ','
            << opt(r.f1) << ',' << r.unstable_count << ',' << r.alive_count;
        for (const auto& [name, value] : hyperparameter_fields(r.config)) {
            if (name != "seed") {
                out << ',' << detail::csv_escape(value);
            }
        }
        out << "\n";
    }
    return std::move(out).str();
}

/**
 * Parse a file written by `results_to_csv()`. Throws `DataError` on malformed input.
 */
inline std::vector<BenchResult> results_from_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    {
        std::vector<std::string> row;
        std::string field;
        bool quoted = false, any = false;
        for (std::size_t i = 0; i < text.size(); ++i) {
            char c = text[i];
            if (quoted) {
                if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else if (c == '"') {
                    quoted = false;
                } else {
                    field += c;
                }
            } else if (c == '"') {
                quoted = true;
                any = true;
            } else if (c == ',') {
                row.push_back(std::move(field));
                field.clear();
                any = true;
            } else if (c == '\n') {
                if (any || !field.empty()) {
                    row.push_back(std::move(field));
                    rows.push_back(std::move(row));
                }
                row.clear();
                field.clear();
                any = false;
            } else if (c != '\r') {
                field += c;
                any = true;
            }
        }
        if (any || !field.empty()) {
            row.push_back(std::move(field));
            rows.push_back(std::move(row));
        }
    }

    const auto columns = results_csv_columns();
    if (rows.empty() || rows.front() != columns) {
        throw DataError("results CSV header does not match the expected columns");
    }

    std::vector<BenchResult> out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& f = rows[r];
        if (f.size() != columns.size()) {
            throw ShapeError(r + 1, "expected " + std::to_string(columns.size()) + " fields");
        }
        auto number = [&](std::size_t c) {
            auto v = detail::parse_number(f[c]);
            if (!v) {
                throw ParseError(r + 1, c + 1, "not a number: '" + f[c] + "'");
            }
            return *v;
        };
        auto opt = [&](std::size_t c) { return f[c].empty() ? std::optional<double>() : number(c); };

        BenchResult res;
        res.dataset = f[0];
        auto mode = parse_bench_mode(f[1]);
        if (!mode) {
            throw ParseError(r + 1, 2, "unknown mode '" + f[1] + "'");
        }
        res.mode = *mode;
        try {
            set_hyperparameter(res.config, "seed", f[2]);
            for (std::size_t c = 9; c < columns.size(); ++c) {
                set_hyperparameter(res.config, columns[c], f[c]);
            }
        } catch (const ConfigError& ex) {
            throw DataError("line " + std::to_string(r + 1) + ": " + ex.what());
        }
        res.seed = res.config.seed;
        res.runtime_seconds = number(3);
        res.precision = opt(4);
        res.recall = opt(5);
        res.f1 = opt(6);
        res.unstable_count = static_cast<std::size_t>(number(7));
        res.alive_count = static_cast<std::size_t>(number(8));
        out.push_back(std::move(res));
    }
    return out;
}

/*****************************
 *** Summary table ***
 *****************************/

struct Aggregate {
    std::size_t count = 0;
    double mean = 0, min = 0, max = 0;
};

/**
 * @brief Mean and range over seeds of one (dataset, mode, configuration) group.
 */
struct SummaryRow {
    std::string dataset;
    BenchMode mode = BenchMode::vanilla;
    /// Hyperparameters of the group, excluding the seed.
    std::vector<std::pair<std::string, std::string>> config;
    Aggregate runtime, precision, recall, f1, unstable_count;
};

inline std::vector<SummaryRow> summarize(const std::vector<BenchResult>& results) {
    std::map<std::string, std::size_t> index;
    std::vector<SummaryRow> rows;
    std::vector<std::vector<const BenchResult*>> members;

    for (const auto& r : results) {
        auto fields = hyperparameter_fields(r.config);
        std::erase_if(fields, [](const auto& f) { return f.first == "seed"; });
        std::string key = r.dataset + '\x1f' + to_string(r.mode);
        for (const auto& [name, value] : fields) {
            key += '\x1f' + value;
        }
        auto [it, inserted] = index.emplace(key, rows.size());
        if (inserted) {
            rows.push_back({r.dataset, r.mode, std::move(fields), {}, {}, {}, {}, {}});
            members.emplace_back();
        }
        members[it->second].push_back(&r);
    }

    auto aggregate = [](const std::vector<const BenchResult*>& group, auto&& get) {
        Aggregate a;
        for (const auto* r : group) {
            std::optional<double> v = get(*r);
            if (!v) continue;
            if (a.count == 0) {
                a.min = a.max = *v;
            }
            a.min = std::min(a.min, *v);
            a.max = std::max(a.max, *v);
            a.mean += *v;
            ++a.count;
        }
        if (a.count) {
            a.mean /= a.count;
        }
        return a;
    };

    for (std::size_t g = 0; g < rows.size(); ++g) {
        auto& row = rows[g];
        const auto& group = members[g];
        row.runtime = aggregate(group, [](const BenchResult& r) { return std::optional<double>(r.runtime_seconds); });
        row.precision = aggregate(group, [](const BenchResult& r) { return r.precision; });
        row.recall = aggregate(group, [](const BenchResult& r) { return r.recall; });
        row.f1 = aggregate(group, [](const BenchResult& r) { return r.f1; });
        row.unstable_count = aggregate(group, [](const BenchResult& r) {
            return std::optional<double>(static_cast<double>(r.unstable_count));
        });
    }
    return rows;
}

/**
 * Human-readable table of `summarize()`: mean [min, max] per column, plus the runtime
 * ratio to vanilla and the speedup over none within the same dataset and configuration.
 */
inline std::string format_summary(const std::vector<SummaryRow>& rows, bool timing_indicative = false) {
    auto cell = [](const Aggregate& a, int precision) {
        if (a.count == 0) {
            return std::string("-");
        }
        char buffer[96];
        std::snprintf(buffer, sizeof(buffer), "%.*f [%.*f, %.*f]", precision, a.mean, precision, a.min,
                      precision, a.max);
        return std::string(buffer);
    };

    // Reference runtimes by (dataset, configuration without reduction-specific fields).
    auto reference_key = [](const SummaryRow& r) {
        std::string key = r.dataset;
        for (const auto& [name, value] : r.config) {
            if (name != "reduction" && name != "lazy_gen") {
                key += '\x1f' + value;
            }
        }
        return key;
    };
    std::map<std::string, double> vanilla, none;
    for (const auto& r : rows) {
        if (r.mode == BenchMode::vanilla) vanilla[reference_key(r)] = r.runtime.mean;
        if (r.mode == BenchMode::none) none[reference_key(r)] = r.runtime.mean;
    }

    std::ostringstream out;
    if (timing_indicative) {
        out << "(runs executed concurrently; timings are indicative only)\n";
    }
    char line[512];
    std::snprintf(line, sizeof(line), "%-16s %-9s %5s %-28s %-8s %-8s %-24s %-24s %-24s %s\n", "dataset", "mode",
                  "ghosts", "runtime_s", "x_vanil", "speedup", "precision", "recall", "f1", "unstable");
    out << line;
    for (const auto& r : rows) {
        std::string n_ghosts;
        for (const auto& [name, value] : r.config) {
            if (name == "n_ghosts") n_ghosts = value;
        }
        auto key = reference_key(r);
        std::string ratio = "-", speedup = "-";
        if (r.mode != BenchMode::vanilla && vanilla.count(key) && vanilla[key] > 0) {
            char b[32];
            std::snprintf(b, sizeof(b), "%.2f", r.runtime.mean / vanilla[key]);
            ratio = b;
        }
        if ((r.mode == BenchMode::adaptive || r.mode == BenchMode::halving) && none.count(key) && r.runtime.mean > 0) {
            char b[32];
            std::snprintf(b, sizeof(b), "%.2f", none[key] / r.runtime.mean);
            speedup = b;
        }
        std::snprintf(line, sizeof(line), "%-16s %-9s %5s %-28s %-8s %-8s %-24s %-24s %-24s %s\n",
                      r.dataset.c_str(), to_string(r.mode), n_ghosts.c_str(), cell(r.runtime, 3).c_str(),
                      ratio.c_str(), speedup.c_str(), cell(r.precision, 3).c_str(), cell(r.recall, 3).c_str(),
                      cell(r.f1, 3).c_str(), cell(r.unstable_count, 1).c_str());
        out << line;
    }
    return std::move(out).str();
}

/*****************************
 *** TOML suites ***
 *****************************/

/**
 * Parse a suite description. Relative dataset paths resolve against `base_dir`.
 *
 *     seeds = [0, 1, 2]
 *     modes = ["vanilla", "none", "halving", "adaptive"]
 *     d = 0.1
 *
 *     [hyperparameters]
 *     n_ghosts = 16
 *
 *     [sweep]
 *     n_ghosts = [8, 16, 32]
 *
 *     [[datasets]]
 *     name = "blobs"
 *     generator = "blobs"
 *     n_points = 5000
 *
 *     [[datasets]]
 *     name = "digits"
 *     path = "digits.csv"
 *     label_column = "digit"
 *
 * Throws `ConfigError` for invalid suites.
 */
inline BenchSuite parse_suite(const std::string& text, const std::filesystem::path& base_dir = {}) {
    toml::table root;
    try {
        root = toml::parse(text);
    } catch (const toml::parse_error& ex) {
        std::ostringstream msg;
        msg << ex.description() << " (line " << ex.source().begin.line << ")";
        throw ConfigError("suite", msg.str());
    }

    auto scalar = [](const toml::node& node, const std::string& field) -> std::string {
        if (auto v = node.value<std::string>()) return *v;
        if (auto v = node.value<std::int64_t>()) return std::to_string(*v);
        if (auto v = node.value<double>()) return detail::format_double(*v);
        if (auto v = node.value<bool>()) return *v ? "1" : "0";
        if (auto arr = node.as_array()) {
            std::string out;
            for (const auto& e : *arr) {
                auto i = e.value<std::int64_t>();
                if (!i) throw ConfigError(field, "expected an integer list");
                out += (out.empty() ? "" : ";") + std::to_string(*i);
            }
            return out;
        }
        throw ConfigError(field, "unsupported value type");
    };

    BenchSuite suite;
    if (auto seeds = root["seeds"].as_array()) {
        suite.seeds.clear();
        for (const auto& s : *seeds) {
            auto v = s.value<std::int64_t>();
            if (!v || *v < 0) throw ConfigError("seeds", "expected non-negative integers");
            suite.seeds.push_back(static_cast<std::uint64_t>(*v));
        }
    }
    if (auto modes = root["modes"].as_array()) {
        suite.modes.clear();
        for (const auto& m : *modes) {
            auto mode = parse_bench_mode(m.value<std::string>().value_or(""));
            if (!mode) throw ConfigError("modes", "expected vanilla, none, halving or adaptive");
            suite.modes.push_back(*mode);
        }
    }
    suite.d = root["d"].value<double>().value_or(suite.d);
    suite.warmup = root["warmup"].value<bool>().value_or(suite.warmup);
    suite.parallel = root["parallel"].value<bool>().value_or(suite.parallel);
    suite.halving_lazy_gen = root["halving_lazy_gen"].value<double>().value_or(suite.halving_lazy_gen);

    if (auto hp = root["hyperparameters"].as_table()) {
        for (const auto& [key, node] : *hp) {
            std::string name(key.str());
            set_hyperparameter(suite.base, name, scalar(node, name));
        }
    }
    if (auto sweep = root["sweep"].as_table()) {
        for (const auto& [key, node] : *sweep) {
            Sweep s{std::string(key.str()), {}};
            auto arr = node.as_array();
            if (!arr || arr->empty()) throw ConfigError(s.parameter, "sweep values must be a non-empty array");
            for (const auto& v : *arr) {
                s.values.push_back(scalar(v, s.parameter));
            }
            Hyperparameters probe;
            for (const auto& v : s.values) {
                set_hyperparameter(probe, s.parameter, v);
            }
            suite.sweeps.push_back(std::move(s));
        }
    }

    auto datasets = root["datasets"].as_array();
    if (!datasets || datasets->empty()) {
        throw ConfigError("datasets", "suite lists no datasets");
    }
    for (const auto& entry : *datasets) {
        auto t = entry.as_table();
        if (!t) throw ConfigError("datasets", "each dataset must be a table");
        BenchDataset ds;
        const auto generator = (*t)["generator"].value<std::string>();
        const auto path = (*t)["path"].value<std::string>();
        ds.name = (*t)["name"].value<std::string>().value_or(path ? std::filesystem::path(*path).stem().string()
                                                                  : generator.value_or("dataset"));
        if (generator) {
            if (*generator != "blobs") throw ConfigError("generator", "unknown generator '" + *generator + "'");
            BlobSpec spec;
            spec.n_points = (*t)["n_points"].value<std::int64_t>().value_or(spec.n_points);
            spec.n_dims = (*t)["n_dims"].value<std::int64_t>().value_or(spec.n_dims);
            spec.n_centers = (*t)["n_centers"].value<std::int64_t>().value_or(spec.n_centers);
            spec.cluster_std = (*t)["cluster_std"].value<double>().value_or(spec.cluster_std);
            spec.center_box = (*t)["center_box"].value<double>().value_or(spec.center_box);
            spec.bridge_fraction = (*t)["bridge_fraction"].value<double>().value_or(spec.bridge_fraction);
            spec.seed = (*t)["seed"].value<std::int64_t>().value_or(0);
            ds.load = [spec] { return make_blobs(spec); };
        } else if (path) {
            auto full = std::filesystem::path(*path);
            if (full.is_relative()) full = base_dir / full;
            const auto format = (*t)["format"].value<std::string>().value_or(full.extension() == ".gum2" ? "gum2" : "csv");
            if (format != "csv" && format != "gum2") throw ConfigError("format", "expected csv or gum2");
            CsvOptions options;
            options.label_column = (*t)["label_column"].value<std::string>().value_or("");
            ds.load = [full, format, options] {
                return format == "gum2" ? load_f32_matrix(full.string()) : load_csv(full.string(), options);
            };
        } else {
            throw ConfigError("datasets", "dataset '" + ds.name + "' needs a generator or a path");
        }
        suite.datasets.push_back(std::move(ds));
    }
    return suite;
}

inline BenchSuite load_suite(const std::string& path) {
    return parse_suite(read_file(path), std::filesystem::path(path).parent_path());
}

}

#endif
