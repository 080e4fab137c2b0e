#pragma once

#include <span>
#include <vector>

#include "combpso/common.hpp"

namespace combpso {

/// Position/velocity box constraints. The velocity ceiling is tied to the
/// floor through the asymmetry coefficient: v_max = -lambda * v_min, so
/// lambda < 1 biases velocities (and therefore decoded bit counts) downward.
struct Bounds {
    double x_min = -3.0;
    double x_max = 3.0;
    double v_min = -3.0;
    double lambda = 1.0 / 3.0;

    double v_max() const { return -lambda * v_min; }

    void validate() const {
        if (!(x_min < x_max)) throw ConfigError("bounds: x_min must be < x_max");
        if (!(v_min < 0)) throw ConfigError("bounds: v_min must be negative");
        if (lambda < 0.0 || lambda > 1.0)
            throw ConfigError("bounds: lambda must be in [0,1]");
    }
};

/// Inertia and acceleration coefficients for one iteration.
struct StepCoefficients {
    double omega;
    double c1;
    double c2;
};

struct Particle {
    std::vector<double> x;   // continuous position
    std::vector<double> v;   // velocity
    Mask b;                  // decoded feature mask
    std::vector<double> pbest_x;
    Mask pbest_b;
};

double sigmoid(double x);

/// Bernoulli decode of a continuous position: bit j set with probability
/// S(x_j). Guarantees at least one set bit by forcing the most-probable bit
/// (ties to the lowest index) when every draw comes up empty.
Mask decode_position(std::span<const double> x, Rng& rng);

Particle init_particle(std::size_t n, const Bounds& bounds, Rng& rng);

/// One velocity step toward pbest and a leader position, clamped to
/// [v_min, v_max]. r1 and r2 are scalar draws by default; the per-dimension
/// variant redraws them for every component.
std::vector<double> update_velocity(const Particle& p,
                                    std::span<const double> leader_x,
                                    const StepCoefficients& coeff,
                                    const Bounds& bounds, Rng& rng,
                                    bool per_dimension_r = false);

/// x' = x + v, saturated at the position box.
std::vector<double> update_position(const Particle& p,
                                    std::span<const double> new_v,
                                    const Bounds& bounds);

}  // namespace combpso
