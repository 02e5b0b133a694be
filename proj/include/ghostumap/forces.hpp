#ifndef GHOSTUMAP_FORCES_HPP
#define GHOSTUMAP_FORCES_HPP

#include "core.hpp"
#include "curve.hpp"

#include <algorithm>
#include <cmath>

/**
 * @file forces.hpp
 *
 * @brief Pairwise forces of the cross-entropy layout objective.
 *
 * Both forces are the negative gradients, with respect to `yi`, of the per-pair terms
 * `v log(v / w)` (attraction) and `(1 - v) log((1 - v) / (1 - w))` (repulsion), where
 * `w = 1 / (1 + a d^(2b))`.
 */

namespace ghostumap {

/// Additive constant in the repulsive denominator.
inline constexpr double repulsion_epsilon = 0.001;

/// Per-component bound applied to a force before it is scaled by the learning rate.
inline constexpr double force_clip = 4.0;

inline double clip(double v, double bound = force_clip) {
    return std::clamp(v, -bound, bound);
}

inline Vec2 clip(const Vec2& f, double bound = force_clip) {
    return {clip(f.x, bound), clip(f.y, bound)};
}

/**
 * `-2ab d^(2(b-1)) / (1 + a d^(2b)) * v * (yi - yj)`; zero when the points coincide.
 */
inline Vec2 attractive_force(const Vec2& yi, const Vec2& yj, double v, const CurveParams& p) {
    Vec2 diff = yi - yj;
    double d2 = squared_norm(diff);
    if (d2 <= 0) {
        return {0, 0};
    }
    double pd2b = std::pow(d2, p.b);
    double coef = (-2 * p.a * p.b * pd2b) / (d2 * (1 + p.a * pd2b)) * v;
    return coef * diff;
}

/**
 * `2b / ((eps + d^2)(1 + a d^(2b))) * (1 - v) * (yi - yj)`; zero when the points coincide.
 */
inline Vec2 repulsive_force(const Vec2& yi, const Vec2& yj, double v, const CurveParams& p,
                            double epsilon = repulsion_epsilon) {
    Vec2 diff = yi - yj;
    double d2 = squared_norm(diff);
    if (d2 <= 0) {
        return {0, 0};
    }
    double coef = (2 * p.b) / ((epsilon + d2) * (1 + p.a * std::pow(d2, p.b))) * (1 - v);
    return coef * diff;
}

}

#endif
