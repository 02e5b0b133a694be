#ifndef GHOSTUMAP_GHOSTS_HPP
#define GHOSTUMAP_GHOSTS_HPP

#include "core.hpp"
#include "knn_graph.hpp"
#include "layout.hpp"
#include "parallel.hpp"
#include "random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

/**
 * @file ghosts.hpp
 *
 * @brief Ghost projections: generation, joint optimization and ghost reduction.
 *
 * Each point owns M ghosts, alternative 2-D positions that share the point's row of the
 * fuzzy graph. Ghosts only ever read the original positions; the originals never see
 * the ghosts, so the original trajectory is identical to a run without ghosts.
 */

namespace ghostumap {

/**
 * @brief Ghost positions and dropping bookkeeping for all points.
 *
 * Ghost k of point i lives at index `i * n_ghosts + k` of the per-ghost arrays.
 */
struct GhostState {
    std::size_t n_points = 0;
    int n_ghosts = 0;
    std::vector<Vec2> positions;
    /// Per-ghost negative sampling streams.
    std::vector<SplitStream> streams;
    /// Distance of each ghost from its target at generation, in normalized units.
    std::vector<double> initial_offsets;
    /// Whether the point still carries ghosts.
    std::vector<std::uint8_t> alive;
    /// Smoothed distance D_i; frozen once the point is dropped.
    std::vector<double> smoothed;
    /// Epoch in which the point lost its ghosts, -1 while alive.
    std::vector<int> dropped_at;
    bool has_estimate = false;
    int generated_at_epoch = 0;

    std::span<Vec2> ghosts_of(std::size_t i) {
        return {positions.data() + i * n_ghosts, static_cast<std::size_t>(n_ghosts)};
    }
    std::span<const Vec2> ghosts_of(std::size_t i) const {
        return {positions.data() + i * n_ghosts, static_cast<std::size_t>(n_ghosts)};
    }

    std::size_t alive_count() const {
        return static_cast<std::size_t>(std::count(alive.begin(), alive.end(), std::uint8_t(1)));
    }
};

/**
 * @brief Per-point ghost distances d_i in normalized units.
 */
struct StabilityDistances {
    std::vector<double> d;
    double sensitivity_used = 1;
};

/**
 * Uniform draw from the closed disk of radius `r_embed` around `center`.
 */
inline Vec2 sample_circle(const Vec2& center, double r_embed, SplitStream& rng) {
    double theta = 2 * std::numbers::pi * rng.uniform();
    double rho = r_embed * std::sqrt(rng.uniform());
    return {center.x + rho * std::cos(theta), center.y + rho * std::sin(theta)};
}

/**
 * Place `n_ghosts` ghosts around every current original position, within `radius`
 * normalized units (converted with the current normalization of the originals).
 */
inline GhostState generate_ghosts(const EmbeddingState& state, const Hyperparameters& h, SplitStream& placement) {
    const std::size_t n = state.positions.size();
    const auto m = static_cast<std::size_t>(h.n_ghosts);
    const auto transform = normalization_for(state.positions);
    const double r_embed = h.radius * transform.extent;

    GhostState g;
    g.n_points = n;
    g.n_ghosts = h.n_ghosts;
    g.positions.resize(n * m);
    g.initial_offsets.resize(n * m);
    g.streams.resize(n * m);
    g.alive.assign(n, 1);
    g.smoothed.assign(n, 0);
    g.dropped_at.assign(n, -1);
    g.generated_at_epoch = state.epoch;

    RngStreams streams(h.seed);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& y = state.positions[i];
        for (std::size_t k = 0; k < m; ++k) {
            Vec2 p = sample_circle(y, r_embed, placement);
            g.positions[i * m + k] = p;
            g.initial_offsets[i * m + k] = transform.distance(p, y);
            g.streams[i * m + k] = streams.ghost(i, k);
        }
    }
    return g;
}

/**
 * Optimize every alive ghost for the epoch that `state` has just completed.
 *
 * A ghost of point i reacts to exactly the edges of i that fired for the originals:
 * attraction toward the original neighbor, once for each direction of the edge, plus
 * repulsion from negatives drawn from the originals with the ghost's own stream.
 * Originals are read-only here. Work is split by point, so the result does not depend
 * on the thread count.
 */
inline void optimize_epoch_ghosts(GhostState& ghosts, const EmbeddingState& state, const OptimizerSettings& o) {
    const int epoch = state.epoch - 1;
    const double alpha = learning_rate_at(state.alpha0, epoch, state.n_epochs);
    const auto& sch = state.schedule;
    const Vec2* originals = state.positions.data();
    const auto n = static_cast<std::uint32_t>(state.positions.size());
    const auto m = static_cast<std::size_t>(ghosts.n_ghosts);

    parallel_for(ghosts.n_points, o.threads, [&](std::size_t start, std::size_t end) {
        for (std::size_t i = start; i < end; ++i) {
            if (!ghosts.alive[i]) {
                continue;
            }
            const std::size_t first = sch.offsets[i], last = sch.offsets[i + 1];
            for (std::size_t k = 0; k < m; ++k) {
                Vec2 g = ghosts.positions[i * m + k];
                SplitStream& rng = ghosts.streams[i * m + k];
                for (std::size_t e = first; e < last; ++e) {
                    if (!sch.fired[e]) {
                        continue;
                    }
                    const std::uint32_t j = sch.tail[e];
                    const Vec2& yj = originals[j];
                    g += alpha * clip(attractive_force(g, yj, 1.0, o.curve));
                    for (int p = 0; p < o.n_negative_samples; ++p) {
                        std::uint32_t r = rng.below(n);
                        if (r == i || r == j) {
                            continue;
                        }
                        g += alpha * clip(repulsive_force(g, originals[r], 0.0, o.curve));
                    }
                    // The reverse edge j -> i fires in the same epoch and pulls i as its tail.
                    g += alpha * clip(attractive_force(g, yj, 1.0, o.curve));
                }
                ghosts.positions[i * m + k] = g;
            }
        }
    });
}

/// 1-based nearest rank used for a given sensitivity: `ceil(sensitivity * M)`, at least 1.
inline std::size_t sensitivity_rank(double sensitivity, std::size_t m) {
    auto rank = static_cast<std::size_t>(std::ceil(sensitivity * static_cast<double>(m) - 1e-9));
    return std::clamp<std::size_t>(rank, 1, m);
}

/**
 * d_i for every alive point: the nearest-rank `sensitivity` percentile of the normalized
 * distances between the original and its ghosts (the maximum when sensitivity is 1).
 * Normalization uses the originals only. Dropped points report their frozen D_i.
 */
inline StabilityDistances measure_distances(const GhostState& ghosts, std::span<const Vec2> originals,
                                            double sensitivity) {
    const auto transform = normalization_for(originals);
    const auto m = static_cast<std::size_t>(ghosts.n_ghosts);
    const std::size_t rank = sensitivity_rank(sensitivity, m);

    StabilityDistances out;
    out.sensitivity_used = sensitivity;
    out.d.resize(ghosts.n_points);
    std::vector<double> buffer(m);
    for (std::size_t i = 0; i < ghosts.n_points; ++i) {
        if (!ghosts.alive[i]) {
            out.d[i] = ghosts.smoothed[i];
            continue;
        }
        auto g = ghosts.ghosts_of(i);
        for (std::size_t k = 0; k < m; ++k) {
            buffer[k] = transform.distance(originals[i], g[k]);
        }
        std::nth_element(buffer.begin(), buffer.begin() + (rank - 1), buffer.end());
        out.d[i] = buffer[rank - 1];
    }
    return out;
}

/**
 * Exponential moving average of d_i for alive points: `D = beta * d + (1 - beta) * D`.
 * The first call after generation seeds `D = d`. Dropped points keep their value.
 */
inline void ema_update(GhostState& ghosts, const StabilityDistances& current, double beta) {
    for (std::size_t i = 0; i < ghosts.n_points; ++i) {
        if (!ghosts.alive[i]) {
            continue;
        }
        if (ghosts.has_estimate) {
            ghosts.smoothed[i] = beta * current.d[i] + (1 - beta) * ghosts.smoothed[i];
        } else {
            ghosts.smoothed[i] = current.d[i];
        }
    }
    ghosts.has_estimate = true;
}

/// Mean of D over all points, alive or dropped.
inline double dropping_threshold(const GhostState& ghosts) {
    if (ghosts.smoothed.empty()) {
        return 0;
    }
    return std::accumulate(ghosts.smoothed.begin(), ghosts.smoothed.end(), 0.0) / ghosts.smoothed.size();
}

/**
 * Drop the ghosts of every alive point with `D_i < tau`, where tau is the mean of D over
 * all N points. Frozen values of dropped points stay in the mean, which keeps tau from
 * inflating as stable points leave. Returns the number of points dropped.
 */
inline std::size_t adaptive_drop(GhostState& ghosts, int epoch) {
    const double tau = dropping_threshold(ghosts);
    std::size_t dropped = 0;
    for (std::size_t i = 0; i < ghosts.n_points; ++i) {
        if (ghosts.alive[i] && ghosts.smoothed[i] < tau) {
            ghosts.alive[i] = 0;
            ghosts.dropped_at[i] = epoch;
            ++dropped;
        }
    }
    return dropped;
}

/**
 * Positional variance of a point: mean squared normalized distance of the original and
 * its ghosts from their centroid.
 */
inline double positional_variance(const Vec2& original, std::span<const Vec2> ghosts,
                                  const NormalizationTransform& t) {
    Vec2 c = t.apply(original);
    for (const auto& g : ghosts) {
        c += t.apply(g);
    }
    const double count = static_cast<double>(ghosts.size() + 1);
    c = (1.0 / count) * c;
    double total = squared_norm(t.apply(original) - c);
    for (const auto& g : ghosts) {
        total += squared_norm(t.apply(g) - c);
    }
    return total / count;
}

/**
 * Successive-halving baseline: drop the ghosts of the floor(alive / 2) alive points with
 * the lowest positional variance, ties broken by lower index. Returns the number dropped.
 */
inline std::size_t halving_drop(GhostState& ghosts, std::span<const Vec2> originals, int epoch) {
    const auto t = normalization_for(originals);
    std::vector<std::pair<double, std::size_t>> ranked;
    for (std::size_t i = 0; i < ghosts.n_points; ++i) {
        if (ghosts.alive[i]) {
            ranked.emplace_back(positional_variance(originals[i], ghosts.ghosts_of(i), t), i);
        }
    }
    const std::size_t count = ranked.size() / 2;
    std::partial_sort(ranked.begin(), ranked.begin() + count, ranked.end());
    for (std::size_t r = 0; r < count; ++r) {
        std::size_t i = ranked[r].second;
        ghosts.alive[i] = 0;
        ghosts.dropped_at[i] = epoch;
    }
    return count;
}

/**
 * @brief Outcome of a run with ghosts.
 */
struct GhostRunResult {
    Hyperparameters config;
    std::vector<Vec2> positions;
    GhostState ghosts;
    /// Final d_i (frozen D_i for dropped points).
    StabilityDistances distances;
    NormalizationTransform final_transform;
    /// Alive count after each epoch from ghost generation on.
    std::vector<std::size_t> alive_history;
    Diagnostics diagnostics;

    bool dropped(std::size_t i) const { return !ghosts.alive[i]; }
};

/**
 * Optimize originals and ghosts jointly from `initial` for all epochs of `resolved`.
 *
 * Per epoch: originals first; then, once ghosts exist, the ghost update, distance
 * measurement and EMA, followed by the configured reduction step.
 */
inline GhostRunResult optimize_with_ghosts(const FuzzyGraph& graph, std::vector<Vec2> initial,
                                           const Hyperparameters& resolved, const EpochObserver& observer = {}) {
    const auto settings = make_optimizer_settings(resolved);
    auto state = make_embedding_state(graph, std::move(initial), resolved);
    const int generation = resolved.ghost_generation_epoch();
    const int drop_from = resolved.drop_start_epoch();
    auto placement = RngStreams(resolved.seed).placement();

    GhostRunResult out;
    out.config = resolved;
    std::optional<GhostState> ghosts;
    std::size_t next_halving = 0;

    for (int n = 0; n < state.n_epochs; ++n) {
        if (n == generation) {
            ghosts = generate_ghosts(state, resolved, placement);
        }

        optimize_epoch_original(state, settings);
        if (observer) {
            observer(n, state.positions);
        }
        if (!ghosts) {
            continue;
        }

        optimize_epoch_ghosts(*ghosts, state, settings);
        auto current = measure_distances(*ghosts, state.positions, resolved.sensitivity);
        ema_update(*ghosts, current, resolved.beta);

        if (resolved.reduction == ReductionMode::adaptive && n >= drop_from) {
            adaptive_drop(*ghosts, n);
        } else if (resolved.reduction == ReductionMode::halving) {
            const auto& schedule = resolved.halving_schedule;
            if (next_halving < schedule.size() && schedule[next_halving] == n) {
                halving_drop(*ghosts, state.positions, n);
                ++next_halving;
            }
        }
        out.alive_history.push_back(ghosts->alive_count());
    }

    out.final_transform = normalization_for(state.positions);
    out.distances = measure_distances(*ghosts, state.positions, resolved.sensitivity);
    out.positions = std::move(state.positions);
    out.ghosts = std::move(*ghosts);
    return out;
}

/**
 * Full pipeline with ghosts: graph construction, initialization and joint optimization.
 */
inline GhostRunResult run_ghostumap(const DataMatrix& data, const Hyperparameters& h,
                                    const EpochObserver& observer = {}) {
    auto resolved = validate_config(h, data.n_points());
    auto prepared = build_graph(data, resolved.n_neighbors, resolved.threads);
    Diagnostics diagnostics;
    auto init_rng = RngStreams(resolved.seed).init();
    auto initial = initialize_embedding(data, resolved.init, init_rng, &diagnostics);
    auto result = optimize_with_ghosts(prepared.graph, std::move(initial), resolved, observer);
    if (prepared.locality.n_unconverged > 0) {
        diagnostics.push_back("smooth_locality: " + std::to_string(prepared.locality.n_unconverged) +
                              " points did not reach the bandwidth tolerance");
    }
    result.diagnostics.insert(result.diagnostics.begin(), diagnostics.begin(), diagnostics.end());
    return result;
}

}

#endif
