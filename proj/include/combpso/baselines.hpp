#pragma once

#include "combpso/mo_engine.hpp"
#include "combpso/so_engine.hpp"

namespace combpso {

/// Shared configuration for the reference algorithms: symmetric velocity
/// clamp, linearly decaying inertia, constant acceleration coefficients.
struct BaselineConfig {
    int swarm_size = 30;
    int iterations = 300;
    double v_abs = 3.0;
    double x_abs = 3.0;  // continuous position range (MOPSO)
    double omega_min = 0.4;
    double omega_max = 0.6;
    double c1 = 1.9;
    double c2 = 1.9;
    double alpha = 0.8;                  // BPSO weighted-sum fitness
    std::size_t archive_capacity = 100;  // MOPSO
    std::uint64_t seed = 1;
    int threads = 1;

    void validate() const {
        if (swarm_size < 2)
            throw ConfigError("baseline: swarm_size must be >= 2");
        if (iterations < 1)
            throw ConfigError("baseline: iterations must be >= 1");
        if (v_abs <= 0.0) throw ConfigError("baseline: v_abs must be > 0");
        if (x_abs <= 0.0) throw ConfigError("baseline: x_abs must be > 0");
        if (omega_min > omega_max)
            throw ConfigError("baseline: omega_min > omega_max");
        if (!check_convergence_constraint(omega_min, c1, c2) ||
            !check_convergence_constraint(omega_max, c1, c2))
            throw ConfigError(
                "baseline: coefficients violate the convergence constraint");
        if (archive_capacity < 2)
            throw ConfigError("baseline: archive_capacity must be >= 2");
    }
};

/// Canonical binary PSO: binary positions resampled from Bernoulli(S(v))
/// every step, pbest/gbest kept as binary vectors, symmetric velocity clamp.
SORunResult run_bpso(const BaselineConfig& cfg, const Dataset& ds,
                     const SplitPlan& split, Oracle& oracle);

/// Reference MOPSO: same continuous encoding as the proposed algorithm, but
/// objective-space crowding pruning and stochastic leader selection (binary
/// tournament on crowding distance), with no equal-objective tie-break,
/// reinjection, or turbulence.
MORunResult run_mopso(const BaselineConfig& cfg, const Dataset& ds,
                      const SplitPlan& split, Oracle& oracle,
                      const MOHooks* hooks = nullptr);

}  // namespace combpso
