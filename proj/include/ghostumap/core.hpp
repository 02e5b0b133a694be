#ifndef GHOSTUMAP_CORE_HPP
#define GHOSTUMAP_CORE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

/**
 * @file core.hpp
 *
 * @brief Shared domain types, hyperparameter resolution and coordinate normalization.
 */

namespace ghostumap {

/**
 * @brief Base class of all errors raised by this library.
 */
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * @brief An invalid hyperparameter; `field()` names the offending field.
 */
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& message) :
        Error(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const { return field_; }

private:
    std::string field_;
};

/**
 * @brief Input data that cannot be processed (non-finite values, bad shapes, ...).
 */
class DataError : public Error {
public:
    using Error::Error;
};

class DegenerateInput : public DataError {
public:
    using DataError::DataError;
};

/**
 * @brief Two-dimensional coordinate.
 */
struct Vec2 {
    double x = 0;
    double y = 0;

    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    friend Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
    friend Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
    friend Vec2 operator*(double s, const Vec2& v) { return {s * v.x, s * v.y}; }
    bool operator==(const Vec2&) const = default;
};

inline double squared_norm(const Vec2& v) {
    return v.x * v.x + v.y * v.y;
}

inline double distance(const Vec2& a, const Vec2& b) {
    return std::sqrt(squared_norm(a - b));
}

/**
 * @brief Row-major high-dimensional input with optional integer labels.
 *
 * The constructor enforces the invariants: at least two points, at least one dimension,
 * finite values, and labels consistent with `label_names` when both are present.
 */
class DataMatrix {
public:
    DataMatrix() = default;

    DataMatrix(std::size_t n_points, std::size_t n_dims, std::vector<double> values,
               std::vector<int> labels = {}, std::vector<std::string> label_names = {}) :
        n_points_(n_points), n_dims_(n_dims), values_(std::move(values)),
        labels_(std::move(labels)), label_names_(std::move(label_names))
    {
        if (n_points_ < 2) {
            throw DegenerateInput("data must contain at least 2 points, got " + std::to_string(n_points_));
        }
        if (n_dims_ < 1) {
            throw DegenerateInput("data must have at least 1 dimension");
        }
        if (values_.size() != n_points_ * n_dims_) {
            throw DataError("value count " + std::to_string(values_.size()) + " does not match " +
                            std::to_string(n_points_) + "x" + std::to_string(n_dims_));
        }
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (!std::isfinite(values_[i])) {
                throw DegenerateInput("non-finite value at row " + std::to_string(i / n_dims_) +
                                      ", column " + std::to_string(i % n_dims_));
            }
        }
        if (!labels_.empty()) {
            if (labels_.size() != n_points_) {
                throw DataError("label count does not match point count");
            }
            if (!label_names_.empty()) {
                for (int l : labels_) {
                    if (l < 0 || static_cast<std::size_t>(l) >= label_names_.size()) {
                        throw DataError("label " + std::to_string(l) + " has no name");
                    }
                }
            }
        }
    }

    std::size_t n_points() const { return n_points_; }
    std::size_t n_dims() const { return n_dims_; }

    std::span<const double> row(std::size_t i) const {
        return {values_.data() + i * n_dims_, n_dims_};
    }

    const std::vector<double>& values() const { return values_; }
    const std::vector<int>& labels() const { return labels_; }
    const std::vector<std::string>& label_names() const { return label_names_; }
    bool has_labels() const { return !labels_.empty(); }

private:
    std::size_t n_points_ = 0;
    std::size_t n_dims_ = 0;
    std::vector<double> values_;
    std::vector<int> labels_;
    std::vector<std::string> label_names_;
};

enum class ReductionMode { none, halving, adaptive };
enum class InitMode { pca, random };

inline const char* to_string(ReductionMode m) {
    switch (m) {
        case ReductionMode::none: return "none";
        case ReductionMode::halving: return "halving";
        case ReductionMode::adaptive: return "adaptive";
    }
    return "?";
}

inline const char* to_string(InitMode m) {
    return m == InitMode::pca ? "pca" : "random";
}

inline std::optional<ReductionMode> parse_reduction(const std::string& s) {
    if (s == "none") return ReductionMode::none;
    if (s == "halving") return ReductionMode::halving;
    if (s == "adaptive") return ReductionMode::adaptive;
    return std::nullopt;
}

inline std::optional<InitMode> parse_init(const std::string& s) {
    if (s == "pca") return InitMode::pca;
    if (s == "random") return InitMode::random;
    return std::nullopt;
}

/**
 * @brief All tunable parameters of a run.
 *
 * Defaults follow the reference UMAP settings and the ghost defaults (M = 16, r = 0.1,
 * lazy generation at 20% of the epochs, dropping from 40%, beta = 0.2, sensitivity = 0.9).
 */
struct Hyperparameters {
    int n_neighbors = 15;
    double min_dist = 0.1;
    double spread = 1.0;
    /// Resolved by `validate_config()` when absent.
    std::optional<int> n_epochs;
    int n_negative_samples = 5;

    int n_ghosts = 16;
    double radius = 0.1;
    double lazy_gen = 0.2;
    double drop_start = 0.4;
    double beta = 0.2;
    double sensitivity = 0.9;
    ReductionMode reduction = ReductionMode::adaptive;
    std::vector<int> halving_schedule{50, 100, 150};

    std::uint64_t seed = 42;
    InitMode init = InitMode::pca;
    double learning_rate = 1.0;
    int threads = 1;

    bool operator==(const Hyperparameters&) const = default;

    /// Epoch at whose start the ghosts are generated. Requires a resolved `n_epochs`.
    int ghost_generation_epoch() const {
        return static_cast<int>(std::floor(lazy_gen * n_epochs.value() + 1e-9));
    }

    /// First epoch at which adaptive dropping runs. Requires a resolved `n_epochs`.
    int drop_start_epoch() const {
        return static_cast<int>(std::floor(drop_start * n_epochs.value() + 1e-9));
    }
};

/// Epoch count used when none is given: 200 above 10,000 points, 500 otherwise.
inline int default_epochs(std::size_t n_points) {
    return n_points > 10000 ? 200 : 500;
}

/**
 * Resolve the epoch count and check every invariant of `h` for a dataset of `n_points`.
 * Throws `ConfigError` naming the first violated field. Idempotent.
 */
inline Hyperparameters validate_config(Hyperparameters h, std::size_t n_points) {
    if (n_points < 2) {
        throw ConfigError("n_points", "need at least 2 points");
    }
    if (!h.n_epochs) {
        h.n_epochs = default_epochs(n_points);
    }

    auto require = [](bool ok, const char* field, const std::string& msg) {
        if (!ok) {
            throw ConfigError(field, msg);
        }
    };
    auto finite = [](double x) { return std::isfinite(x); };

    require(h.n_neighbors >= 1, "n_neighbors", "must be at least 1");
    require(static_cast<std::size_t>(h.n_neighbors) < n_points, "n_neighbors",
            "must be smaller than the number of points (" + std::to_string(n_points) + ")");
    require(finite(h.min_dist) && h.min_dist > 0, "min_dist", "must be positive");
    require(finite(h.spread) && h.spread > 0, "spread", "must be positive");
    require(h.min_dist < h.spread * 10, "min_dist", "must be smaller than 10 * spread");
    require(*h.n_epochs >= 1, "n_epochs", "must be at least 1");
    require(h.n_negative_samples >= 0, "n_negative_samples", "must be non-negative");
    require(h.n_ghosts >= 1, "n_ghosts", "must be at least 1");
    require(finite(h.radius) && h.radius >= 0 && h.radius <= 1, "radius", "must lie in [0, 1]");
    require(finite(h.lazy_gen) && h.lazy_gen >= 0 && h.lazy_gen < 1, "lazy_gen", "must lie in [0, 1)");
    require(finite(h.drop_start) && h.drop_start >= 0 && h.drop_start <= 1, "drop_start", "must lie in [0, 1]");
    require(finite(h.beta) && h.beta > 0 && h.beta <= 1, "beta", "must lie in (0, 1]");
    require(finite(h.sensitivity) && h.sensitivity >= 0 && h.sensitivity <= 1, "sensitivity", "must lie in [0, 1]");
    require(finite(h.learning_rate) && h.learning_rate > 0, "learning_rate", "must be positive");
    require(h.threads >= 1, "threads", "must be at least 1");

    require(h.lazy_gen * *h.n_epochs < h.drop_start * *h.n_epochs, "drop_start",
            "lazy_gen * n_epochs must be smaller than drop_start * n_epochs");

    if (h.reduction == ReductionMode::halving) {
        for (std::size_t s = 0; s < h.halving_schedule.size(); ++s) {
            int e = h.halving_schedule[s];
            require(e >= 0 && e < *h.n_epochs, "halving_schedule", "entries must lie in [0, n_epochs)");
            require(s == 0 || e > h.halving_schedule[s - 1], "halving_schedule", "must be strictly increasing");
        }
    }
    if (h.reduction == ReductionMode::halving && !h.halving_schedule.empty()) {
        require(h.halving_schedule.front() >= h.ghost_generation_epoch(), "halving_schedule",
                "halving epochs must not precede ghost generation (epoch " +
                std::to_string(h.ghost_generation_epoch()) + ")");
    }

    return h;
}

/**
 * @brief Isotropic map of embedding coordinates into the unit square.
 */
struct NormalizationTransform {
    Vec2 origin;
    /// Normalized units per embedding unit, i.e. `1 / extent`.
    double scale = 1;
    /// Longest side of the bounding box (1 when degenerate). Dividing by it keeps the
    /// far corner at exactly 1.
    double extent = 1;

    Vec2 apply(const Vec2& p) const {
        return {(p.x - origin.x) / extent, (p.y - origin.y) / extent};
    }

    /// Distance between two embedding points, measured in normalized units.
    double distance(const Vec2& a, const Vec2& b) const {
        return ghostumap::distance(a, b) / extent;
    }
};

/**
 * Transform that maps the bounding box of `positions` into [0,1]^2 using one scale for
 * both axes (1 / longest side). A degenerate box keeps scale 1.
 */
inline NormalizationTransform normalization_for(std::span<const Vec2> positions) {
    if (positions.empty()) {
        throw DegenerateInput("cannot normalize an empty set of positions");
    }
    double xmin = std::numeric_limits<double>::infinity(), ymin = xmin;
    double xmax = -xmin, ymax = -xmin;
    for (const auto& p : positions) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw DegenerateInput("non-finite embedding coordinate");
        }
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    NormalizationTransform t;
    t.origin = {xmin, ymin};
    double extent = std::max(xmax - xmin, ymax - ymin);
    t.extent = extent > 0 ? extent : 1.0;
    t.scale = 1.0 / t.extent;
    return t;
}

}

#endif
