#ifndef GHOSTUMAP_CURVE_HPP
#define GHOSTUMAP_CURVE_HPP

#include "core.hpp"

#include <cmath>
#include <string>

namespace ghostumap {

class FitError : public Error {
public:
    using Error::Error;
};

/**
 * @brief Parameters of the low-dimensional similarity `w(d) = 1 / (1 + a d^(2b))`.
 */
struct CurveParams {
    double a = 1;
    double b = 1;
};

inline double low_dim_weight(double dist, const CurveParams& p) {
    return 1.0 / (1.0 + p.a * std::pow(dist, 2 * p.b));
}

/**
 * Fit (a, b) by damped Gauss-Newton (Levenberg-Marquardt) so that `low_dim_weight()`
 * matches the target curve `1` for `d <= min_dist` and `exp(-(d - min_dist) / spread)`
 * beyond, sampled at 300 evenly spaced distances in [0, 3 * spread].
 */
inline CurveParams fit_curve_params(double min_dist, double spread) {
    if (!(min_dist > 0) || !(spread > 0) || !(min_dist < spread * 10)) {
        throw ConfigError("min_dist", "curve fit requires 0 < min_dist < 10 * spread");
    }

    constexpr int n_samples = 300;
    constexpr int max_iter = 1000;
    constexpr int max_stall = 100;
    constexpr double tol = 1e-6;

    double xs[n_samples], ys[n_samples];
    for (int s = 0; s < n_samples; ++s) {
        double x = 3 * spread * s / (n_samples - 1);
        xs[s] = x;
        ys[s] = x <= min_dist ? 1.0 : std::exp(-(x - min_dist) / spread);
    }

    auto sse = [&](double a, double b) {
        double total = 0;
        for (int s = 0; s < n_samples; ++s) {
            double r = 1.0 / (1.0 + a * std::pow(xs[s], 2 * b)) - ys[s];
            total += r * r;
        }
        return total;
    };

    double a = 1, b = 1;
    double current = sse(a, b);
    double lambda = 1e-3;
    int stall = 0;

    for (int it = 0; it < max_iter; ++it) {
        // Normal equations for the 2-parameter problem.
        double jaa = 0, jab = 0, jbb = 0, ga = 0, gb = 0;
        for (int s = 0; s < n_samples; ++s) {
            double x = xs[s];
            if (x <= 0) {
                continue; // w(0) = 1 for every (a, b): zero residual and zero Jacobian.
            }
            double u = std::pow(x, 2 * b);
            double denom = 1 + a * u;
            double w = 1 / denom;
            double r = w - ys[s];
            double da = -u / (denom * denom);
            double db = -a * u * 2 * std::log(x) / (denom * denom);
            jaa += da * da;
            jab += da * db;
            jbb += db * db;
            ga += da * r;
            gb += db * r;
        }

        double maa = jaa * (1 + lambda), mbb = jbb * (1 + lambda);
        double det = maa * mbb - jab * jab;
        if (!(std::abs(det) > 0)) {
            lambda *= 10;
            if (++stall >= max_stall) {
                throw FitError("curve fit is singular");
            }
            continue;
        }
        double step_a = -(mbb * ga - jab * gb) / det;
        double step_b = -(maa * gb - jab * ga) / det;

        double na = a + step_a, nb = b + step_b;
        double candidate = (na > 0 && nb > 0) ? sse(na, nb) : HUGE_VAL;
        if (candidate < current) {
            bool small = std::abs(step_a) <= tol * std::abs(a) && std::abs(step_b) <= tol * std::abs(b);
            a = na;
            b = nb;
            current = candidate;
            lambda = std::max(lambda / 10, 1e-12);
            stall = 0;
            if (small) {
                break;
            }
        } else {
            bool small = std::abs(step_a) <= tol * std::abs(a) && std::abs(step_b) <= tol * std::abs(b);
            if (small && candidate == current) {
                break;
            }
            lambda *= 10;
            if (++stall >= max_stall) {
                // The damping has grown so large that no step can improve; this is a
                // local minimum unless the gradient is still far from zero.
                double gnorm = std::sqrt(ga * ga + gb * gb);
                if (gnorm > 1e-6) {
                    throw FitError("curve fit residual did not decrease for " + std::to_string(max_stall) +
                                   " consecutive iterations");
                }
                break;
            }
        }
    }

    return {a, b};
}

}

#endif
