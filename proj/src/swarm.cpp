#include "combpso/swarm.hpp"

#include <algorithm>
#include <cmath>

namespace combpso {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Mask decode_position(std::span<const double> x, Rng& rng) {
    Mask b(x.size(), 0);
    bool any = false;
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (rng.uniform() < sigmoid(x[j])) {
            b[j] = 1;
            any = true;
        }
    }
    if (!any) {
        // empty masks are unclassifiable; force the most probable bit
        std::size_t best = 0;
        for (std::size_t j = 1; j < x.size(); ++j)
            if (x[j] > x[best]) best = j;
        b[best] = 1;
    }
    return b;
}

Particle init_particle(std::size_t n, const Bounds& bounds, Rng& rng) {
    bounds.validate();
    Particle p;
    p.x.resize(n);
    p.v.resize(n);
    for (std::size_t j = 0; j < n; ++j)
        p.x[j] = rng.uniform(bounds.x_min, bounds.x_max);
    const double v_max = bounds.v_max();
    for (std::size_t j = 0; j < n; ++j)
        p.v[j] = rng.uniform(bounds.v_min, v_max);
    p.b = decode_position(p.x, rng);
    p.pbest_x = p.x;
    p.pbest_b = p.b;
    return p;
}

std::vector<double> update_velocity(const Particle& p,
                                    std::span<const double> leader_x,
                                    const StepCoefficients& coeff,
                                    const Bounds& bounds, Rng& rng,
                                    bool per_dimension_r) {
    const std::size_t n = p.x.size();
    std::vector<double> v(n);
    const double v_max = bounds.v_max();
    double r1 = rng.uniform();
    double r2 = rng.uniform();
    for (std::size_t j = 0; j < n; ++j) {
        if (per_dimension_r && j > 0) {
            r1 = rng.uniform();
            r2 = rng.uniform();
        }
        const double raw = coeff.omega * p.v[j] +
                           r1 * coeff.c1 * (p.pbest_x[j] - p.x[j]) +
                           r2 * coeff.c2 * (leader_x[j] - p.x[j]);
        v[j] = std::clamp(raw, bounds.v_min, v_max);
    }
    return v;
}

std::vector<double> update_position(const Particle& p,
                                    std::span<const double> new_v,
                                    const Bounds& bounds) {
    std::vector<double> x(p.x.size());
    for (std::size_t j = 0; j < p.x.size(); ++j)
        x[j] = std::clamp(p.x[j] + new_v[j], bounds.x_min, bounds.x_max);
    return x;
}

}  // namespace combpso
