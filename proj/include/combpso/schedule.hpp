#pragma once

#include "combpso/common.hpp"
#include "combpso/swarm.hpp"

namespace combpso {

/// Returns true iff omega <= 1 and 0 < (c1+c2)/2 < 2(1+omega), the
/// convergence condition the coefficient schedule must respect.
bool check_convergence_constraint(double omega, double c1, double c2);

/// Sigmoid coefficient schedule: inertia and the cognitive coefficient decay
/// from their maxima to their minima while the social coefficient mirrors
/// upward, with transition point a*T and steepness b_shape.
struct ScheduleParams {
    double omega_min = 0.4;
    double omega_max = 0.6;
    double c_min = 1.7;
    double c_max = 2.1;
    double a = 0.5;
    double b_shape = 4.0;
    int T = 300;

    void validate() const {
        if (T < 1) throw ConfigError("schedule: T must be >= 1");
        if (omega_min > omega_max)
            throw ConfigError("schedule: omega_min > omega_max");
        if (c_min > c_max) throw ConfigError("schedule: c_min > c_max");
        if (a <= 0.0 || a >= 1.0)
            throw ConfigError("schedule: a must be in (0,1)");
        if (b_shape <= 0.0) throw ConfigError("schedule: b_shape must be > 0");
        // every emitted triple has c1+c2 = c_min+c_max and omega >= omega_min,
        // so these two checks bound the whole trajectory
        if (!check_convergence_constraint(omega_max, c_max, c_max) ||
            !check_convergence_constraint(omega_min, c_min, c_max))
            throw ConfigError(
                "schedule: coefficient ranges violate the convergence "
                "constraint");
    }
};

/// Coefficients for iteration t in [0, T]. Throws std::out_of_range beyond T.
StepCoefficients coefficients_at(int t, const ScheduleParams& p);

}  // namespace combpso
