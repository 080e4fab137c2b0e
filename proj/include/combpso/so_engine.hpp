#pragma once

#include <functional>
#include <span>

#include "combpso/oracle.hpp"
#include "combpso/schedule.hpp"
#include "combpso/swarm.hpp"

namespace combpso {

struct SOConfig {
    int swarm_size = 30;
    int iterations = 300;  // T
    Bounds bounds{};
    ScheduleParams schedule{};
    double alpha = 0.8;
    int theta = 5;      // stagnation iterations before turbulence
    double gamma = 0.2; // fraction of the swarm whose velocities reset
    std::uint64_t seed = 1;
    bool per_dimension_r = false;
    int threads = 1;

    void validate() const {
        bounds.validate();
        schedule.validate();
        if (swarm_size < 2) throw ConfigError("so: swarm_size must be >= 2");
        if (iterations < 2) throw ConfigError("so: iterations must be >= 2");
        if (theta < 1 || theta >= iterations)
            throw ConfigError("so: theta must satisfy 1 <= theta < iterations");
        if (gamma <= 0.0 || gamma > 1.0)
            throw ConfigError("so: gamma must be in (0,1]");
        if (alpha < 0.0 || alpha > 1.0)
            throw ConfigError("so: alpha must be in [0,1]");
        if (schedule.T != iterations)
            throw ConfigError("so: schedule horizon must equal iterations");
    }
};

struct SORunResult {
    Mask best_mask;
    Fitness best_fitness;
    double cv_error;
    double test_error;
    std::uint64_t function_calls;
    std::vector<double> history;  // incumbent scalar after init and each iteration
};

/// Fires when the tracked value has not improved for theta consecutive
/// iterations, i.e. the newest theta+1 window entries are all equal.
template <typename T>
bool stagnation_fired(std::span<const T> window, int theta) {
    if (window.size() < static_cast<std::size_t>(theta) + 1) return false;
    const T& last = window.back();
    for (std::size_t i = window.size() - static_cast<std::size_t>(theta) - 1;
         i + 1 < window.size(); ++i)
        if (!(window[i] == last)) return false;
    return true;
}

/// Test instrumentation; every callback is optional.
struct SOHooks {
    std::function<void(int t, const std::vector<Particle>& swarm,
                       double gbest_scalar)>
        on_iteration;
    std::function<void(int t, const std::vector<Particle>& before,
                       const std::vector<Particle>& after)>
        on_turbulence;
};

/// Global-best COMB-PSO minimizing the weighted-sum fitness, with the
/// superseded-incumbent reinjection strategy and velocity turbulence on
/// stagnation.
SORunResult run_so(const SOConfig& cfg, const Dataset& ds,
                   const SplitPlan& split, Oracle& oracle,
                   const SOHooks* hooks = nullptr);

}  // namespace combpso
