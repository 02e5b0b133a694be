#ifndef GHOSTUMAP_DATASETS_HPP
#define GHOSTUMAP_DATASETS_HPP

#include "core.hpp"
#include "random.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace ghostumap {

/**
 * @brief Parameters of an isotropic Gaussian mixture.
 */
struct BlobSpec {
    std::size_t n_points = 1000;
    std::size_t n_dims = 10;
    std::size_t n_centers = 5;
    double cluster_std = 1.0;
    /// Centers are drawn uniformly from [-center_box, center_box]^n_dims.
    double center_box = 10.0;
    /// Fraction of points placed between two random centers instead of around one.
    double bridge_fraction = 0.0;
    /// Bridge points sit at t in [0.5 - bridge_width, 0.5 + bridge_width] along their segment.
    double bridge_width = 0.25;
    std::uint64_t seed = 0;
};

/// Standard normal draw (Box-Muller, one value per call).
inline double standard_normal(SplitStream& rng) {
    double u1 = rng.uniform();
    double u2 = rng.uniform();
    if (u1 <= 0) {
        u1 = 0x1.0p-53;
    }
    return std::sqrt(-2 * std::log(u1)) * std::cos(2 * std::numbers::pi * u2);
}

/**
 * Gaussian blobs with labels. Core points are assigned to centers round-robin so
 * cluster sizes differ by at most one. The last `bridge_fraction * n_points` points
 * lie at a uniform position t in [0.5 - bridge_width, 0.5 + bridge_width] along the segment between two distinct
 * random centers, plus the same Gaussian noise, and take the label of the nearer center.
 */
inline DataMatrix make_blobs(const BlobSpec& spec) {
    auto rng = SplitStream::derive(spec.seed, static_cast<std::uint64_t>(StreamTag::data));
    std::vector<double> centers(spec.n_centers * spec.n_dims);
    for (auto& c : centers) {
        c = spec.center_box * (2 * rng.uniform() - 1);
    }

    std::vector<double> values(spec.n_points * spec.n_dims);
    std::vector<int> labels(spec.n_points);
    std::vector<std::string> names;
    for (std::size_t c = 0; c < spec.n_centers; ++c) {
        names.push_back("blob" + std::to_string(c));
    }
    const auto n_bridge = spec.n_centers > 1
        ? static_cast<std::size_t>(spec.bridge_fraction * static_cast<double>(spec.n_points))
        : 0;
    const std::size_t n_core = spec.n_points - n_bridge;
    for (std::size_t i = 0; i < spec.n_points; ++i) {
        std::size_t a = i % spec.n_centers, b = a;
        double t = 0;
        if (i >= n_core) {
            a = rng.below(static_cast<std::uint32_t>(spec.n_centers));
            b = rng.below(static_cast<std::uint32_t>(spec.n_centers - 1));
            b += (b >= a);
            t = 0.5 - spec.bridge_width + 2 * spec.bridge_width * rng.uniform();
        }
        labels[i] = static_cast<int>(t <= 0.5 ? a : b);
        for (std::size_t d = 0; d < spec.n_dims; ++d) {
            const double ca = centers[a * spec.n_dims + d], cb = centers[b * spec.n_dims + d];
            values[i * spec.n_dims + d] = ca + t * (cb - ca) + spec.cluster_std * standard_normal(rng);
        }
    }
    return DataMatrix(spec.n_points, spec.n_dims, std::move(values), std::move(labels), std::move(names));
}

}

#endif
