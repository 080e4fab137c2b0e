#include "combpso/so_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace combpso {

namespace {

// k distinct indices from [0, total) via partial Fisher-Yates.
std::vector<std::size_t> sample_distinct(std::size_t k, std::size_t total,
                                         Rng& rng) {
    std::vector<std::size_t> pool(total);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    k = std::min(k, total);
    for (std::size_t i = 0; i < k; ++i)
        std::swap(pool[i], pool[i + rng.index(total - i)]);
    pool.resize(k);
    return pool;
}

}  // namespace

SORunResult run_so(const SOConfig& cfg, const Dataset& ds,
                   const SplitPlan& split, Oracle& oracle,
                   const SOHooks* hooks) {
    cfg.validate();
    ds.validate();
    (void)split;

    const std::size_t n = ds.n_features();
    const std::size_t swarm_size = static_cast<std::size_t>(cfg.swarm_size);
    const std::uint64_t calls_at_start = oracle.function_calls();

    Rng engine_rng(derive_seed(cfg.seed, 0));
    std::vector<Rng> prng;
    prng.reserve(swarm_size);
    for (std::size_t i = 0; i < swarm_size; ++i)
        prng.emplace_back(derive_seed(cfg.seed, 1000 + i));

    std::vector<Particle> swarm(swarm_size);
    std::vector<Fitness> current(swarm_size);
    std::vector<Fitness> pbest(swarm_size);

    parallel_for(swarm_size, cfg.threads, [&](std::size_t i) {
        swarm[i] = init_particle(n, cfg.bounds, prng[i]);
        const double err = oracle.evaluate_subset(swarm[i].b);
        current[i] = so_fitness(err, mask_count(swarm[i].b), n, cfg.alpha);
    });
    pbest = current;

    std::size_t gbest_idx = 0;
    for (std::size_t i = 1; i < swarm_size; ++i)
        if (current[i].scalar < current[gbest_idx].scalar) gbest_idx = i;
    std::vector<double> gbest_x = swarm[gbest_idx].x;
    Mask gbest_b = swarm[gbest_idx].b;
    Fitness gbest_fit = current[gbest_idx];

    std::vector<double> history{gbest_fit.scalar};
    std::vector<double> window{gbest_fit.scalar};

    for (int t = 1; t <= cfg.iterations; ++t) {
        const StepCoefficients coeff = coefficients_at(t, cfg.schedule);
        if (!check_convergence_constraint(coeff.omega, coeff.c1, coeff.c2))
            throw ConfigError(strfmt(
                "so: coefficients at t=%d violate the convergence constraint", t));

        parallel_for(swarm_size, cfg.threads, [&](std::size_t i) {
            Particle& p = swarm[i];
            auto v = update_velocity(p, gbest_x, coeff, cfg.bounds, prng[i],
                                     cfg.per_dimension_r);
            auto x = update_position(p, v, cfg.bounds);
            p.v = std::move(v);
            p.x = std::move(x);
            p.b = decode_position(p.x, prng[i]);
            const double err = oracle.evaluate_subset(p.b);
            current[i] = so_fitness(err, mask_count(p.b), n, cfg.alpha);
        });

        // reduction in particle-index order keeps parallel runs reproducible
        for (std::size_t i = 0; i < swarm_size; ++i) {
            if (current[i].scalar < pbest[i].scalar) {
                pbest[i] = current[i];
                swarm[i].pbest_x = swarm[i].x;
                swarm[i].pbest_b = swarm[i].b;
            }
            if (current[i].scalar < gbest_fit.scalar) {
                // keep the superseded incumbent: hand its decision-space
                // point to the currently weakest particle (velocity and
                // pbest untouched)
                std::vector<double> old_x = std::move(gbest_x);
                Mask old_b = std::move(gbest_b);
                const Fitness old_fit = gbest_fit;
                gbest_x = swarm[i].x;
                gbest_b = swarm[i].b;
                gbest_fit = current[i];

                std::size_t weakest = 0;
                for (std::size_t j = 1; j < swarm_size; ++j)
                    if (current[j].scalar > current[weakest].scalar)
                        weakest = j;
                swarm[weakest].x = std::move(old_x);
                swarm[weakest].b = std::move(old_b);
                current[weakest] = old_fit;
            }
        }

        history.push_back(gbest_fit.scalar);
        window.push_back(gbest_fit.scalar);

        if (stagnation_fired(std::span<const double>(window), cfg.theta)) {
            std::vector<Particle> before;
            if (hooks && hooks->on_turbulence) before = swarm;
            const std::size_t count = static_cast<std::size_t>(
                std::ceil(cfg.gamma * static_cast<double>(swarm_size)));
            const auto selected =
                sample_distinct(count, swarm_size, engine_rng);
            const double v_max = cfg.bounds.v_max();
            for (auto i : selected)
                for (std::size_t j = 0; j < n; ++j)
                    swarm[i].v[j] = prng[i].uniform(cfg.bounds.v_min, v_max);
            window.clear();
            if (hooks && hooks->on_turbulence)
                hooks->on_turbulence(t, before, swarm);
        }

        if (hooks && hooks->on_iteration)
            hooks->on_iteration(t, swarm, gbest_fit.scalar);
    }

    SORunResult result;
    result.best_mask = gbest_b;
    result.best_fitness = gbest_fit;
    result.cv_error = gbest_fit.error;
    result.test_error = oracle.test_error(gbest_b);
    result.function_calls = oracle.function_calls() - calls_at_start;
    result.history = std::move(history);
    return result;
}

}  // namespace combpso
