#ifndef GHOSTUMAP_LAYOUT_HPP
#define GHOSTUMAP_LAYOUT_HPP

#include "core.hpp"
#include "curve.hpp"
#include "forces.hpp"
#include "knn_graph.hpp"
#include "parallel.hpp"
#include "random.hpp"

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

/**
 * @file layout.hpp
 *
 * @brief Initialization and epoch-wise optimization of the original 2-D projections.
 */

namespace ghostumap {

using Diagnostics = std::vector<std::string>;

/**
 * @brief Directed edge list with per-edge sampling accumulators.
 *
 * Each undirected graph edge appears in both directions, sorted by head, so every point
 * is the head of its own edges and receives negative samples. An edge with weight v fires
 * every `max_weight / v` epochs; both directions of a pair share the same accumulator
 * values and therefore always fire in the same epoch.
 */
struct EdgeSchedule {
    std::vector<std::uint32_t> head;
    std::vector<std::uint32_t> tail;
    std::vector<double> weight;
    /// CSR offsets of the edges headed by each point, size N + 1.
    std::vector<std::size_t> offsets;
    std::vector<double> epochs_per_sample;
    std::vector<double> next_sample;
    /// Whether each edge fired in the most recent epoch.
    std::vector<std::uint8_t> fired;

    std::size_t size() const { return head.size(); }
};

inline EdgeSchedule make_edge_schedule(const FuzzyGraph& graph) {
    const std::size_t n = graph.n_points;
    EdgeSchedule s;
    s.offsets.assign(n + 1, 0);
    for (const auto& e : graph.edges) {
        ++s.offsets[e.i + 1];
        ++s.offsets[e.j + 1];
    }
    for (std::size_t i = 0; i < n; ++i) {
        s.offsets[i + 1] += s.offsets[i];
    }

    const std::size_t m = s.offsets[n];
    s.head.resize(m);
    s.tail.resize(m);
    s.weight.resize(m);
    std::vector<std::size_t> fill(s.offsets.begin(), s.offsets.end() - 1);
    // Graph edges are sorted by (i, j), so each head's tails come out ascending.
    auto put = [&](std::uint32_t h, std::uint32_t t, double v) {
        auto& pos = fill[h];
        s.head[pos] = h;
        s.tail[pos] = t;
        s.weight[pos] = v;
        ++pos;
    };
    for (const auto& e : graph.edges) {
        put(e.j, e.i, e.v);
    }
    for (const auto& e : graph.edges) {
        put(e.i, e.j, e.v);
    }

    s.epochs_per_sample.resize(m);
    for (std::size_t e = 0; e < m; ++e) {
        s.epochs_per_sample[e] = graph.max_weight / s.weight[e];
    }
    s.next_sample = s.epochs_per_sample;
    s.fired.assign(m, 0);
    return s;
}

/**
 * @brief Fixed settings of the force computation for one run.
 */
struct OptimizerSettings {
    CurveParams curve;
    int n_negative_samples = 5;
    double learning_rate = 1.0;
    int threads = 1;
};

inline OptimizerSettings make_optimizer_settings(const Hyperparameters& h) {
    OptimizerSettings o;
    o.curve = fit_curve_params(h.min_dist, h.spread);
    o.n_negative_samples = h.n_negative_samples;
    o.learning_rate = h.learning_rate;
    o.threads = h.threads;
    return o;
}

/**
 * @brief Mutable state of the original-projection optimization.
 */
struct EmbeddingState {
    std::vector<Vec2> positions;
    int epoch = 0;
    int n_epochs = 0;
    double alpha0 = 1;
    double alpha = 1;
    EdgeSchedule schedule;
    /// Negative sampling stream of the deterministic (single-worker) mode.
    SplitStream rng;
    /// One stream per worker in parallel mode.
    std::vector<SplitStream> worker_rngs;
};

inline double learning_rate_at(double alpha0, int epoch, int n_epochs) {
    return alpha0 * (1.0 - static_cast<double>(epoch) / n_epochs);
}

inline EmbeddingState make_embedding_state(const FuzzyGraph& graph, std::vector<Vec2> initial,
                                           const Hyperparameters& resolved) {
    if (initial.size() != graph.n_points) {
        throw DataError("initial embedding has " + std::to_string(initial.size()) + " points, graph has " +
                        std::to_string(graph.n_points));
    }
    EmbeddingState s;
    s.positions = std::move(initial);
    s.n_epochs = resolved.n_epochs.value();
    s.alpha0 = resolved.learning_rate;
    s.alpha = s.alpha0;
    s.schedule = make_edge_schedule(graph);
    RngStreams streams(resolved.seed);
    s.rng = streams.original();
    for (int w = 0; w < resolved.threads; ++w) {
        s.worker_rngs.push_back(streams.original_worker(w));
    }
    return s;
}

/**
 * Initial 2-D coordinates. PCA mode projects onto the top two principal components
 * (power iteration), rescales so the largest absolute coordinate is 10 and adds uniform
 * jitter in [-1e-4, 1e-4]; random mode draws uniformly from [-10, 10]^2. Constant data
 * in PCA mode falls back to random with a diagnostic.
 */
inline std::vector<Vec2> initialize_embedding(const DataMatrix& data, InitMode mode, SplitStream& rng,
                                              Diagnostics* diagnostics = nullptr) {
    const std::size_t n = data.n_points(), dims = data.n_dims();
    std::vector<Vec2> out(n);

    auto random_fill = [&]() {
        for (auto& p : out) {
            p.x = -10 + 20 * rng.uniform();
            p.y = -10 + 20 * rng.uniform();
        }
    };

    if (mode == InitMode::random) {
        random_fill();
        return out;
    }

    std::vector<double> mean(dims, 0);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = data.row(i);
        for (std::size_t d = 0; d < dims; ++d) {
            mean[d] += row[d];
        }
    }
    for (auto& m : mean) {
        m /= n;
    }
    std::vector<double> centered(n * dims);
    double total_var = 0;
    for (std::size_t i = 0; i < n; ++i) {
        auto row = data.row(i);
        for (std::size_t d = 0; d < dims; ++d) {
            double c = row[d] - mean[d];
            centered[i * dims + d] = c;
            total_var += c * c;
        }
    }
    if (!(total_var > 0)) {
        if (diagnostics) {
            diagnostics->push_back("pca initialization: data has zero variance, using random initialization");
        }
        random_fill();
        return out;
    }

    // w = X^T X v without forming the covariance matrix.
    std::vector<double> proj(n);
    auto apply_cov = [&](const std::vector<double>& v, std::vector<double>& w) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0;
            for (std::size_t d = 0; d < dims; ++d) {
                s += centered[i * dims + d] * v[d];
            }
            proj[i] = s;
        }
        std::fill(w.begin(), w.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t d = 0; d < dims; ++d) {
                w[d] += centered[i * dims + d] * proj[i];
            }
        }
    };
    auto normalize = [](std::vector<double>& v) {
        double s = 0;
        for (double x : v) s += x * x;
        s = std::sqrt(s);
        if (s > 0) {
            for (auto& x : v) x /= s;
        }
        return s;
    };
    auto orthogonalize = [](std::vector<double>& v, const std::vector<double>& basis) {
        double dot = 0;
        for (std::size_t d = 0; d < v.size(); ++d) dot += v[d] * basis[d];
        for (std::size_t d = 0; d < v.size(); ++d) v[d] -= dot * basis[d];
    };

    constexpr int max_iter = 100;
    constexpr double tol = 1e-7;
    auto power_iteration = [&](std::vector<double> v, const std::vector<double>* against) {
        std::vector<double> w(dims);
        if (against) orthogonalize(v, *against);
        if (normalize(v) == 0) {
            return v;
        }
        for (int it = 0; it < max_iter; ++it) {
            apply_cov(v, w);
            if (against) orthogonalize(w, *against);
            if (normalize(w) == 0) {
                return w;
            }
            double change = 0;
            for (std::size_t d = 0; d < dims; ++d) change += (w[d] - v[d]) * (w[d] - v[d]);
            v.swap(w);
            if (std::sqrt(change) < tol) {
                break;
            }
        }
        return v;
    };

    // Fixed, non-degenerate starting vectors keep the rng stream untouched.
    std::vector<double> start1(dims), start2(dims);
    for (std::size_t d = 0; d < dims; ++d) {
        start1[d] = 1.0 + 0.01 * static_cast<double>(d);
        start2[d] = (d % 2 == 0 ? 1.0 : -1.0) * (1.0 + 0.013 * static_cast<double>(d));
    }
    std::vector<double> pc1 = power_iteration(start1, nullptr);
    std::vector<double> pc2 = dims > 1 ? power_iteration(start2, &pc1) : std::vector<double>(dims, 0.0);

    double max_abs = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double a = 0, b = 0;
        for (std::size_t d = 0; d < dims; ++d) {
            a += centered[i * dims + d] * pc1[d];
            b += centered[i * dims + d] * pc2[d];
        }
        out[i] = {a, b};
        max_abs = std::max({max_abs, std::abs(a), std::abs(b)});
    }
    double expansion = max_abs > 0 ? 10.0 / max_abs : 1.0;
    for (auto& p : out) {
        p.x = p.x * expansion + (2 * rng.uniform() - 1) * 1e-4;
        p.y = p.y * expansion + (2 * rng.uniform() - 1) * 1e-4;
    }
    return out;
}

namespace detail {

struct PlainAccess {
    static Vec2 load(const Vec2& p) { return p; }
    static void store(Vec2& p, const Vec2& v) { p = v; }
};

// Lock-free shared updates for parallel mode: relaxed atomic loads and stores, no
// read-modify-write, so concurrent workers may overwrite each other's updates.
struct RelaxedAccess {
    static Vec2 load(const Vec2& p) {
        auto& q = const_cast<Vec2&>(p);
        return {std::atomic_ref<double>(q.x).load(std::memory_order_relaxed),
                std::atomic_ref<double>(q.y).load(std::memory_order_relaxed)};
    }
    static void store(Vec2& p, const Vec2& v) {
        std::atomic_ref<double>(p.x).store(v.x, std::memory_order_relaxed);
        std::atomic_ref<double>(p.y).store(v.y, std::memory_order_relaxed);
    }
};

template<class Access>
void process_edges(EmbeddingState& s, const OptimizerSettings& o, std::size_t begin, std::size_t end,
                   SplitStream& rng, double alpha) {
    auto& sch = s.schedule;
    Vec2* pos = s.positions.data();
    const auto n = static_cast<std::uint32_t>(s.positions.size());
    const double now = s.epoch + 1;

    for (std::size_t e = begin; e < end; ++e) {
        if (sch.next_sample[e] > now) {
            sch.fired[e] = 0;
            continue;
        }
        sch.fired[e] = 1;

        const std::uint32_t h = sch.head[e], t = sch.tail[e];
        Vec2 yi = Access::load(pos[h]);
        Vec2 yj = Access::load(pos[t]);

        // The sampling rate already carries the edge weight.
        Vec2 step = alpha * clip(attractive_force(yi, yj, 1.0, o.curve));
        yi += step;
        Access::store(pos[h], yi);
        Access::store(pos[t], yj - step);

        for (int p = 0; p < o.n_negative_samples; ++p) {
            std::uint32_t r = rng.below(n);
            if (r == h || r == t) {
                continue;
            }
            Vec2 yr = Access::load(pos[r]);
            yi += alpha * clip(repulsive_force(yi, yr, 0.0, o.curve));
        }
        Access::store(pos[h], yi);

        sch.next_sample[e] += sch.epochs_per_sample[e];
    }
}

}

/**
 * Run one epoch over the original projections: every due edge moves both endpoints
 * toward each other, then the head is repelled from `n_negative_samples` points drawn
 * uniformly from the originals. The learning rate decays linearly afterwards.
 *
 * With one thread, edges are processed in a fixed order and results are bit-reproducible.
 * With more threads, edges are split across workers that update positions without locks.
 */
inline void optimize_epoch_original(EmbeddingState& s, const OptimizerSettings& o) {
    const double alpha = learning_rate_at(s.alpha0, s.epoch, s.n_epochs);
    s.alpha = alpha;
    const std::size_t m = s.schedule.size();

    if (o.threads <= 1 || s.worker_rngs.size() <= 1) {
        detail::process_edges<detail::PlainAccess>(s, o, 0, m, s.rng, alpha);
    } else {
        parallel_for_workers(m, static_cast<int>(s.worker_rngs.size()), [&](std::size_t w, std::size_t b, std::size_t e) {
            detail::process_edges<detail::RelaxedAccess>(s, o, b, e, s.worker_rngs[w], alpha);
        });
    }

    ++s.epoch;
    s.alpha = learning_rate_at(s.alpha0, s.epoch, s.n_epochs);
}

/// Called after every epoch with the epoch index and the original positions.
using EpochObserver = std::function<void(int, std::span<const Vec2>)>;

/**
 * Optimize the original projections for all epochs, starting from `initial`.
 */
inline std::vector<Vec2> optimize_vanilla(const FuzzyGraph& graph, std::vector<Vec2> initial,
                                          const Hyperparameters& resolved, const EpochObserver& observer = {}) {
    auto settings = make_optimizer_settings(resolved);
    auto state = make_embedding_state(graph, std::move(initial), resolved);
    for (int n = 0; n < state.n_epochs; ++n) {
        optimize_epoch_original(state, settings);
        if (observer) {
            observer(n, state.positions);
        }
    }
    return std::move(state.positions);
}

/**
 * Full vanilla pipeline: graph construction, initialization and layout optimization.
 */
inline std::vector<Vec2> run_vanilla(const DataMatrix& data, const Hyperparameters& h,
                                     const EpochObserver& observer = {}, Diagnostics* diagnostics = nullptr) {
    auto resolved = validate_config(h, data.n_points());
    auto prepared = build_graph(data, resolved.n_neighbors, resolved.threads);
    auto init_rng = RngStreams(resolved.seed).init();
    auto initial = initialize_embedding(data, resolved.init, init_rng, diagnostics);
    return optimize_vanilla(prepared.graph, std::move(initial), resolved, observer);
}

}

#endif
