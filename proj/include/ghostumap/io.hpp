#ifndef GHOSTUMAP_IO_HPP
#define GHOSTUMAP_IO_HPP

#include "core.hpp"
#include "ghosts.hpp"
#include "knn_graph.hpp"
#include "stability.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

/**
 * @file io.hpp
 *
 * @brief Data ingestion (CSV, GUM2 binary) and the `.ghost.json` export.
 */

namespace ghostumap {

class IoError : public Error {
public:
    using Error::Error;
};

/**
 * @brief Malformed field in a text file; carries the 1-based line and column.
 */
class ParseError : public DataError {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& message) :
        DataError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
        line_(line), column_(column) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/**
 * @brief Row with the wrong number of fields.
 */
class ShapeError : public DataError {
public:
    ShapeError(std::size_t line, const std::string& message) :
        DataError("line " + std::to_string(line) + ": " + message), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class MagicError : public DataError {
public:
    using DataError::DataError;
};

class TruncationError : public DataError {
public:
    TruncationError(std::size_t expected, std::size_t actual) :
        DataError("file truncated: expected " + std::to_string(expected) + " bytes, found " + std::to_string(actual)),
        expected_(expected), actual_(actual) {}

    std::size_t expected() const { return expected_; }
    std::size_t actual() const { return actual_; }

private:
    std::size_t expected_;
    std::size_t actual_;
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return std::move(buffer).str();
}

inline void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path);
    }
    out << contents;
    if (!out) {
        throw IoError("error while writing " + path);
    }
}

/*****************************
 *** CSV ***
 *****************************/

struct CsvOptions {
    /// Whether the first row is a header; detected from non-numeric fields when unset.
    std::optional<bool> header;
    /// Label column, by header name or 0-based index. Empty for none.
    std::string label_column;
    char delimiter = ',';
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
        s = s.substr(1, s.size() - 2);
    }
    return s;
}

inline std::vector<std::string_view> split(std::string_view line, char delim) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(delim, start);
        if (pos == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

inline std::optional<double> parse_number(std::string_view s) {
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    double value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        return std::nullopt;
    }
    return value;
}

}

/**
 * Load a rectangular numeric CSV. The optional label column may hold arbitrary strings;
 * labels are numbered in order of first appearance and the strings kept as names.
 */
inline DataMatrix load_csv(const std::string& path, const CsvOptions& options = {}) {
    const std::string text = read_file(path);

    std::vector<std::pair<std::size_t, std::string_view>> lines;
    {
        std::string_view rest(text);
        std::size_t number = 0;
        while (!rest.empty()) {
            ++number;
            auto pos = rest.find('\n');
            auto line = rest.substr(0, pos);
            if (!detail::trim(line).empty()) {
                lines.emplace_back(number, line);
            }
            if (pos == std::string_view::npos) {
                break;
            }
            rest.remove_prefix(pos + 1);
        }
    }
    if (lines.empty()) {
        throw DataError(path + ": no data rows");
    }

    auto first = detail::split(lines.front().second, options.delimiter);
    bool header = false;
    if (options.header) {
        header = *options.header;
    } else {
        for (auto f : first) {
            if (!detail::parse_number(f)) {
                header = true;
                break;
            }
        }
    }

    const std::size_t n_fields = first.size();
    std::optional<std::size_t> label_index;
    if (!options.label_column.empty()) {
        if (header) {
            for (std::size_t c = 0; c < first.size(); ++c) {
                if (first[c] == options.label_column) {
                    label_index = c;
                }
            }
        }
        if (!label_index) {
            auto idx = detail::parse_number(options.label_column);
            if (idx && *idx >= 0 && *idx == static_cast<double>(static_cast<std::size_t>(*idx)) &&
                static_cast<std::size_t>(*idx) < n_fields) {
                label_index = static_cast<std::size_t>(*idx);
            } else {
                throw DataError(path + ": label column '" + options.label_column + "' not found");
            }
        }
    }

    const std::size_t n_dims = n_fields - (label_index ? 1 : 0);
    std::vector<double> values;
    std::vector<int> labels;
    std::vector<std::string> names;
    std::unordered_map<std::string, int> name_index;

    for (std::size_t r = header ? 1 : 0; r < lines.size(); ++r) {
        const auto [number, line] = lines[r];
        auto fields = detail::split(line, options.delimiter);
        if (fields.size() != n_fields) {
            throw ShapeError(number, "expected " + std::to_string(n_fields) + " fields, found " +
                                     std::to_string(fields.size()));
        }
        for (std::size_t c = 0; c < n_fields; ++c) {
            if (label_index && c == *label_index) {
                std::string key(fields[c]);
                auto [it, inserted] = name_index.emplace(key, static_cast<int>(names.size()));
                if (inserted) {
                    names.push_back(key);
                }
                labels.push_back(it->second);
                continue;
            }
            auto v = detail::parse_number(fields[c]);
            if (!v) {
                throw ParseError(number, c + 1, "not a number: '" + std::string(fields[c]) + "'");
            }
            if (!std::isfinite(*v)) {
                throw ParseError(number, c + 1, "non-finite value");
            }
            values.push_back(*v);
        }
    }

    const std::size_t n_points = n_dims ? values.size() / n_dims : 0;
    return DataMatrix(n_points, n_dims, std::move(values), std::move(labels), std::move(names));
}

/*****************************
 *** GUM2 binary matrix ***
 *****************************/

inline constexpr char gum2_magic[4] = {'G', 'U', 'M', '2'};

/**
 * Binary layout: "GUM2", u32 LE n_points, u32 LE n_dims, then n_points * n_dims
 * little-endian IEEE-754 float32 values, row-major.
 */
inline DataMatrix load_f32_matrix(const std::string& path) {
    const std::string bytes = read_file(path);
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());

    if (bytes.size() >= 4 && std::memcmp(bytes.data(), gum2_magic, 4) != 0) {
        throw MagicError(path + ": bad magic, expected \"GUM2\"");
    }
    if (bytes.size() < 12) {
        throw TruncationError(12, bytes.size());
    }
    auto u32 = [&](std::size_t off) {
        return static_cast<std::uint32_t>(p[off]) | (static_cast<std::uint32_t>(p[off + 1]) << 8) |
               (static_cast<std::uint32_t>(p[off + 2]) << 16) | (static_cast<std::uint32_t>(p[off + 3]) << 24);
    };
    const std::size_t n_points = u32(4), n_dims = u32(8);
    const std::size_t expected = 12 + n_points * n_dims * 4;
    if (bytes.size() < expected) {
        throw TruncationError(expected, bytes.size());
    }

    std::vector<double> values(n_points * n_dims);
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::uint32_t bits = u32(12 + 4 * i);
        float f;
        std::memcpy(&f, &bits, sizeof(f));
        values[i] = f;
    }
    return DataMatrix(n_points, n_dims, std::move(values));
}

inline void write_f32_matrix(const std::string& path, const DataMatrix& data) {
    std::string bytes(gum2_magic, 4);
    auto put = [&](std::uint32_t v) {
        for (int s = 0; s < 4; ++s) {
            bytes.push_back(static_cast<char>((v >> (8 * s)) & 0xff));
        }
    };
    put(static_cast<std::uint32_t>(data.n_points()));
    put(static_cast<std::uint32_t>(data.n_dims()));
    for (double v : data.values()) {
        float f = static_cast<float>(v);
        std::uint32_t bits;
        std::memcpy(&bits, &f, sizeof(f));
        put(bits);
    }
    write_file(path, bytes);
}

/*****************************
 *** Hyperparameters ***
 *****************************/

/**
 * Hyperparameters as (name, value) pairs in a fixed order; used for JSON snapshots and
 * benchmark CSV columns.
 */
inline std::vector<std::pair<std::string, std::string>> hyperparameter_fields(const Hyperparameters& h) {
    auto num = [](double v) {
        std::ostringstream s;
        s.precision(17);
        s << v;
        return s.str();
    };
    std::string schedule;
    for (std::size_t s = 0; s < h.halving_schedule.size(); ++s) {
        schedule += (s ? ";" : "") + std::to_string(h.halving_schedule[s]);
    }
    return {
        {"n_neighbors", std::to_string(h.n_neighbors)},
        {"min_dist", num(h.min_dist)},
        {"spread", num(h.spread)},
        {"n_epochs", h.n_epochs ? std::to_string(*h.n_epochs) : ""},
        {"n_negative_samples", std::to_string(h.n_negative_samples)},
        {"n_ghosts", std::to_string(h.n_ghosts)},
        {"radius", num(h.radius)},
        {"lazy_gen", num(h.lazy_gen)},
        {"drop_start", num(h.drop_start)},
        {"beta", num(h.beta)},
        {"sensitivity", num(h.sensitivity)},
        {"reduction", to_string(h.reduction)},
        {"halving_schedule", schedule},
        {"seed", std::to_string(h.seed)},
        {"init", to_string(h.init)},
        {"learning_rate", num(h.learning_rate)},
        {"threads", std::to_string(h.threads)},
    };
}

/**
 * Set one field from its textual value, using the names of `hyperparameter_fields()`.
 * The halving schedule is a `;` or `,` separated list. An empty `n_epochs` means automatic.
 * Throws `ConfigError` for unknown names or unparsable values; ranges are left to
 * `validate_config()`.
 */
inline void set_hyperparameter(Hyperparameters& h, std::string_view name, std::string_view value) {
    const std::string field(name);
    auto as_double = [&]() {
        auto v = detail::parse_number(detail::trim(value));
        if (!v) {
            throw ConfigError(field, "not a number: '" + std::string(value) + "'");
        }
        return *v;
    };
    auto as_int = [&]() {
        double v = as_double();
        if (v != std::floor(v) || std::abs(v) > 2e9) {
            throw ConfigError(field, "not an integer: '" + std::string(value) + "'");
        }
        return static_cast<int>(v);
    };

    if (name == "n_neighbors") h.n_neighbors = as_int();
    else if (name == "min_dist") h.min_dist = as_double();
    else if (name == "spread") h.spread = as_double();
    else if (name == "n_epochs") {
        if (detail::trim(value).empty()) h.n_epochs.reset();
        else h.n_epochs = as_int();
    }
    else if (name == "n_negative_samples") h.n_negative_samples = as_int();
    else if (name == "n_ghosts") h.n_ghosts = as_int();
    else if (name == "radius") h.radius = as_double();
    else if (name == "lazy_gen") h.lazy_gen = as_double();
    else if (name == "drop_start") h.drop_start = as_double();
    else if (name == "beta") h.beta = as_double();
    else if (name == "sensitivity") h.sensitivity = as_double();
    else if (name == "reduction") {
        auto m = parse_reduction(std::string(detail::trim(value)));
        if (!m) throw ConfigError(field, "expected none, halving or adaptive");
        h.reduction = *m;
    }
    else if (name == "halving_schedule") {
        h.halving_schedule.clear();
        std::string list(value);
        std::replace(list.begin(), list.end(), ',', ';');
        for (auto part : detail::split(list, ';')) {
            if (part.empty()) continue;
            auto v = detail::parse_number(part);
            if (!v || *v != std::floor(*v)) throw ConfigError(field, "not an integer list: '" + list + "'");
            h.halving_schedule.push_back(static_cast<int>(*v));
        }
    }
    else if (name == "seed") {
        std::uint64_t s = 0;
        auto t = detail::trim(value);
        auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), s);
        if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
            throw ConfigError(field, "not an unsigned integer: '" + std::string(value) + "'");
        }
        h.seed = s;
    }
    else if (name == "init") {
        auto m = parse_init(std::string(detail::trim(value)));
        if (!m) throw ConfigError(field, "expected pca or random");
        h.init = *m;
    }
    else if (name == "learning_rate") h.learning_rate = as_double();
    else if (name == "threads") h.threads = as_int();
    else throw ConfigError(field, "unknown hyperparameter");
}

inline nlohmann::json to_json(const Hyperparameters& h) {
    nlohmann::json j;
    j["n_neighbors"] = h.n_neighbors;
    j["min_dist"] = h.min_dist;
    j["spread"] = h.spread;
    j["n_epochs"] = h.n_epochs ? nlohmann::json(*h.n_epochs) : nlohmann::json(nullptr);
    j["n_negative_samples"] = h.n_negative_samples;
    j["n_ghosts"] = h.n_ghosts;
    j["radius"] = h.radius;
    j["lazy_gen"] = h.lazy_gen;
    j["drop_start"] = h.drop_start;
    j["beta"] = h.beta;
    j["sensitivity"] = h.sensitivity;
    j["reduction"] = to_string(h.reduction);
    j["halving_schedule"] = h.halving_schedule;
    j["seed"] = h.seed;
    j["init"] = to_string(h.init);
    j["learning_rate"] = h.learning_rate;
    j["threads"] = h.threads;
    return j;
}

inline Hyperparameters hyperparameters_from_json(const nlohmann::json& j) {
    Hyperparameters h;
    h.n_neighbors = j.value("n_neighbors", h.n_neighbors);
    h.min_dist = j.value("min_dist", h.min_dist);
    h.spread = j.value("spread", h.spread);
    if (j.contains("n_epochs") && !j["n_epochs"].is_null()) {
        h.n_epochs = j["n_epochs"].get<int>();
    }
    h.n_negative_samples = j.value("n_negative_samples", h.n_negative_samples);
    h.n_ghosts = j.value("n_ghosts", h.n_ghosts);
    h.radius = j.value("radius", h.radius);
    h.lazy_gen = j.value("lazy_gen", h.lazy_gen);
    h.drop_start = j.value("drop_start", h.drop_start);
    h.beta = j.value("beta", h.beta);
    h.sensitivity = j.value("sensitivity", h.sensitivity);
    if (j.contains("reduction")) {
        auto m = parse_reduction(j["reduction"].get<std::string>());
        if (!m) throw ConfigError("reduction", "unknown mode");
        h.reduction = *m;
    }
    h.halving_schedule = j.value("halving_schedule", h.halving_schedule);
    h.seed = j.value("seed", h.seed);
    if (j.contains("init")) {
        auto m = parse_init(j["init"].get<std::string>());
        if (!m) throw ConfigError("init", "unknown mode");
        h.init = *m;
    }
    h.learning_rate = j.value("learning_rate", h.learning_rate);
    h.threads = j.value("threads", h.threads);
    return h;
}

/*****************************
 *** Ghost export ***
 *****************************/

struct ExportedPoint {
    /// Final original position, normalized.
    Vec2 position;
    double d = 0;
    bool dropped = false;
    /// -1 when the data has no labels.
    int label = -1;
    std::vector<std::uint32_t> neighbors;
    /// Normalized final ghost positions; empty for dropped points.
    std::vector<Vec2> ghosts;
    /// Normalized distance of each ghost from its target at generation; empty for dropped points.
    std::vector<double> initial_offsets;
};

/**
 * @brief Everything the explorer needs to display a finished run.
 */
struct GhostExport {
    int version = 1;
    std::size_t n_points = 0;
    int n_ghosts = 0;
    double radius = 0;
    double default_d = 0.1;
    Hyperparameters hyperparameters;
    std::vector<std::string> label_names;
    std::vector<ExportedPoint> points;

    StabilityReport report() const {
        StabilityReport r;
        r.r = radius;
        r.default_d = default_d;
        for (const auto& p : points) {
            r.d.push_back(p.d);
            r.dropped.push_back(p.dropped);
        }
        return r;
    }
};

inline GhostExport make_export(const GhostRunResult& run, const KnnIndex& knn, const DataMatrix& data,
                               double default_d = 0.1) {
    GhostExport out;
    out.n_points = run.positions.size();
    out.n_ghosts = run.ghosts.n_ghosts;
    out.radius = run.config.radius;
    out.default_d = default_d;
    out.hyperparameters = run.config;
    out.label_names = data.label_names();

    const auto& t = run.final_transform;
    const auto m = static_cast<std::size_t>(run.ghosts.n_ghosts);
    out.points.resize(out.n_points);
    for (std::size_t i = 0; i < out.n_points; ++i) {
        auto& p = out.points[i];
        p.position = t.apply(run.positions[i]);
        p.d = run.distances.d[i];
        p.dropped = run.dropped(i);
        if (data.has_labels()) {
            p.label = data.labels()[i];
        }
        if (knn.n_points == out.n_points) {
            for (int j = 0; j < knn.k; ++j) {
                p.neighbors.push_back(knn.id(i, j));
            }
        }
        if (!p.dropped) {
            for (const auto& g : run.ghosts.ghosts_of(i)) {
                p.ghosts.push_back(t.apply(g));
            }
            p.initial_offsets.assign(run.ghosts.initial_offsets.begin() + i * m,
                                     run.ghosts.initial_offsets.begin() + (i + 1) * m);
        }
    }
    return out;
}

inline nlohmann::json to_json(const GhostExport& e) {
    nlohmann::json j;
    j["version"] = e.version;
    j["n_points"] = e.n_points;
    j["n_ghosts"] = e.n_ghosts;
    j["radius"] = e.radius;
    j["default_d"] = e.default_d;
    j["hyperparameters"] = to_json(e.hyperparameters);
    if (!e.label_names.empty()) {
        j["label_names"] = e.label_names;
    }
    auto pair = [](const Vec2& v) { return nlohmann::json::array({v.x, v.y}); };
    auto& points = j["points"] = nlohmann::json::array();
    for (std::size_t i = 0; i < e.points.size(); ++i) {
        const auto& p = e.points[i];
        nlohmann::json q;
        q["id"] = i;
        q["position"] = pair(p.position);
        q["d"] = p.d;
        q["dropped"] = p.dropped;
        if (p.label >= 0) {
            q["label"] = p.label;
        }
        q["neighbors"] = p.neighbors;
        if (!p.dropped) {
            auto& gs = q["ghosts"] = nlohmann::json::array();
            for (const auto& g : p.ghosts) {
                gs.push_back(pair(g));
            }
            q["initial_offsets"] = p.initial_offsets;
        }
        points.push_back(std::move(q));
    }
    return j;
}

/// Write a `.ghost.json` file. Doubles are written with 17 significant digits.
inline void write_export(const std::string& path, const GhostExport& e) {
    write_file(path, to_json(e).dump());
}

inline GhostExport export_from_json(const nlohmann::json& j) {
    GhostExport e;
    e.version = j.at("version").get<int>();
    if (e.version != 1) {
        throw DataError("unsupported ghost export version " + std::to_string(e.version));
    }
    e.n_points = j.at("n_points").get<std::size_t>();
    e.n_ghosts = j.at("n_ghosts").get<int>();
    e.radius = j.at("radius").get<double>();
    e.default_d = j.value("default_d", 0.1);
    e.hyperparameters = hyperparameters_from_json(j.at("hyperparameters"));
    e.label_names = j.value("label_names", std::vector<std::string>{});

    auto vec = [](const nlohmann::json& a) { return Vec2{a.at(0).get<double>(), a.at(1).get<double>()}; };
    const auto& points = j.at("points");
    if (points.size() != e.n_points) {
        throw DataError("ghost export lists " + std::to_string(points.size()) + " points, header says " +
                        std::to_string(e.n_points));
    }
    e.points.resize(e.n_points);
    for (const auto& q : points) {
        auto id = q.at("id").get<std::size_t>();
        if (id >= e.n_points) {
            throw DataError("ghost export point id " + std::to_string(id) + " out of range");
        }
        auto& p = e.points[id];
        p.position = vec(q.at("position"));
        p.d = q.at("d").get<double>();
        p.dropped = q.at("dropped").get<bool>();
        p.label = q.value("label", -1);
        p.neighbors = q.value("neighbors", std::vector<std::uint32_t>{});
        if (q.contains("ghosts")) {
            for (const auto& g : q["ghosts"]) {
                p.ghosts.push_back(vec(g));
            }
            p.initial_offsets = q.value("initial_offsets", std::vector<double>{});
            if (p.ghosts.size() != static_cast<std::size_t>(e.n_ghosts) ||
                p.initial_offsets.size() != p.ghosts.size()) {
                throw DataError("ghost export point " + std::to_string(id) + " has inconsistent ghost arrays");
            }
        }
    }
    return e;
}

inline GhostExport read_export(const std::string& path) {
    const auto text = read_file(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
        return export_from_json(j);
    } catch (const nlohmann::json::exception& ex) {
        throw DataError(path + ": malformed ghost export: " + ex.what());
    }
}

}

#endif
