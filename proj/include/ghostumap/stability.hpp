#ifndef GHOSTUMAP_STABILITY_HPP
#define GHOSTUMAP_STABILITY_HPP

#include "core.hpp"

#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

/**
 * @file stability.hpp
 *
 * @brief Post-hoc (r, d)-stability classification and pattern heuristics.
 *
 * Everything here is a pure function of the measured distances, so the threshold d
 * can be changed freely after optimization.
 */

namespace ghostumap {

enum class Pattern { P1, P2, P3, P4, dropped };

inline const char* to_string(Pattern p) {
    switch (p) {
        case Pattern::P1: return "P1";
        case Pattern::P2: return "P2";
        case Pattern::P3: return "P3";
        case Pattern::P4: return "P4";
        case Pattern::dropped: return "dropped";
    }
    return "?";
}

/**
 * @brief Distances and dropping flags of a finished run.
 */
struct StabilityReport {
    double r = 0.1;
    std::vector<double> d;
    std::vector<std::uint8_t> dropped;
    double default_d = 0.1;

    std::size_t size() const { return d.size(); }

    bool is_unstable(std::size_t i, double threshold) const {
        return !(dropped.size() > i && dropped[i]) && d[i] > threshold;
    }
};

struct Partition {
    std::vector<std::size_t> stable;
    std::vector<std::size_t> unstable;
};

/**
 * Points with d_i <= d are stable; points whose ghosts were dropped count as stable.
 */
inline Partition classify(const StabilityReport& report, double d) {
    Partition out;
    for (std::size_t i = 0; i < report.size(); ++i) {
        (report.is_unstable(i, d) ? out.unstable : out.stable).push_back(i);
    }
    return out;
}

/**
 * Fraction of unstable points for each threshold.
 */
inline std::vector<double> instability_summary(const StabilityReport& report, std::span<const double> thresholds) {
    std::vector<double> out;
    out.reserve(thresholds.size());
    const double n = static_cast<double>(report.size());
    for (double t : thresholds) {
        std::size_t count = 0;
        for (std::size_t i = 0; i < report.size(); ++i) {
            count += report.is_unstable(i, t);
        }
        out.push_back(report.size() ? count / n : 0.0);
    }
    return out;
}

/**
 * Connected components of the single-linkage graph that joins two positions whenever
 * they are at most `threshold` apart. Returns a component id per position, numbered in
 * order of first appearance.
 */
inline std::vector<std::size_t> single_linkage_components(std::span<const Vec2> points, double threshold) {
    const std::size_t n = points.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            if (distance(points[a], points[b]) <= threshold) {
                std::size_t ra = find(a), rb = find(b);
                if (ra != rb) {
                    parent[std::max(ra, rb)] = std::min(ra, rb);
                }
            }
        }
    }

    std::vector<std::size_t> label(n), remap(n, n);
    std::size_t next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t root = find(i);
        if (remap[root] == n) {
            remap[root] = next++;
        }
        label[i] = remap[root];
    }
    return label;
}

/**
 * Heuristic pattern of one point from its original and ghost positions (normalized
 * coordinates), using `d` as the single-linkage merge distance:
 *
 * - one cluster: P1 (compact);
 * - two clusters, the original alone and all ghosts together: P4 (separated original);
 * - at least ceil((M + 1) / 2) clusters: P3 (scattered);
 * - otherwise P2 (split into groups).
 */
inline Pattern classify_pattern(const Vec2& original, std::span<const Vec2> ghosts, double d) {
    std::vector<Vec2> points;
    points.reserve(ghosts.size() + 1);
    points.push_back(original);
    points.insert(points.end(), ghosts.begin(), ghosts.end());

    auto label = single_linkage_components(points, d);
    std::size_t clusters = 0;
    for (auto l : label) {
        clusters = std::max(clusters, l + 1);
    }

    if (clusters == 1) {
        return Pattern::P1;
    }
    if (clusters == 2) {
        bool original_alone = true;
        for (std::size_t k = 1; k < label.size(); ++k) {
            original_alone = original_alone && label[k] != label[0];
        }
        if (original_alone) {
            return Pattern::P4;
        }
    }
    const std::size_t fragmented = (points.size() + 1) / 2;
    if (clusters >= fragmented) {
        return Pattern::P3;
    }
    return Pattern::P2;
}

}

#endif
