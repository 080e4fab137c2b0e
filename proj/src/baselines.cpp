#include "combpso/baselines.hpp"

#include <algorithm>
#include <cmath>

namespace combpso {

namespace {

Mask sample_bits(const std::vector<double>& v, Rng& rng) {
    Mask b(v.size(), 0);
    bool any = false;
    for (std::size_t j = 0; j < v.size(); ++j) {
        if (rng.uniform() < sigmoid(v[j])) {
            b[j] = 1;
            any = true;
        }
    }
    if (!any) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < v.size(); ++j)
            if (v[j] > v[best]) best = j;
        b[best] = 1;
    }
    return b;
}

double linear_inertia(const BaselineConfig& cfg, int t) {
    return cfg.omega_max - (cfg.omega_max - cfg.omega_min) *
                               static_cast<double>(t) /
                               static_cast<double>(cfg.iterations);
}

}  // namespace

SORunResult run_bpso(const BaselineConfig& cfg, const Dataset& ds,
                     const SplitPlan& split, Oracle& oracle) {
    cfg.validate();
    ds.validate();
    (void)split;

    const std::size_t n = ds.n_features();
    const std::size_t swarm_size = static_cast<std::size_t>(cfg.swarm_size);
    const std::uint64_t calls_at_start = oracle.function_calls();

    std::vector<Rng> prng;
    prng.reserve(swarm_size);
    for (std::size_t i = 0; i < swarm_size; ++i)
        prng.emplace_back(derive_seed(cfg.seed, 1000 + i));

    std::vector<std::vector<double>> vel(swarm_size);
    std::vector<Mask> pos(swarm_size);
    std::vector<Mask> pbest_b(swarm_size);
    std::vector<Fitness> current(swarm_size);
    std::vector<Fitness> pbest(swarm_size);

    parallel_for(swarm_size, cfg.threads, [&](std::size_t i) {
        vel[i].resize(n);
        for (std::size_t j = 0; j < n; ++j)
            vel[i][j] = prng[i].uniform(-cfg.v_abs, cfg.v_abs);
        pos[i] = sample_bits(vel[i], prng[i]);
        const double err = oracle.evaluate_subset(pos[i]);
        current[i] = so_fitness(err, mask_count(pos[i]), n, cfg.alpha);
    });
    pbest_b = pos;
    pbest = current;

    std::size_t gbest_idx = 0;
    for (std::size_t i = 1; i < swarm_size; ++i)
        if (current[i].scalar < current[gbest_idx].scalar) gbest_idx = i;
    Mask gbest_b = pos[gbest_idx];
    Fitness gbest_fit = current[gbest_idx];

    std::vector<double> history{gbest_fit.scalar};

    for (int t = 1; t <= cfg.iterations; ++t) {
        const double omega = linear_inertia(cfg, t);

        parallel_for(swarm_size, cfg.threads, [&](std::size_t i) {
            const double r1 = prng[i].uniform();
            const double r2 = prng[i].uniform();
            for (std::size_t j = 0; j < n; ++j) {
                const double raw =
                    omega * vel[i][j] +
                    r1 * cfg.c1 *
                        (static_cast<double>(pbest_b[i][j]) -
                         static_cast<double>(pos[i][j])) +
                    r2 * cfg.c2 *
                        (static_cast<double>(gbest_b[j]) -
                         static_cast<double>(pos[i][j]));
                vel[i][j] = std::clamp(raw, -cfg.v_abs, cfg.v_abs);
            }
            pos[i] = sample_bits(vel[i], prng[i]);
            const double err = oracle.evaluate_subset(pos[i]);
            current[i] = so_fitness(err, mask_count(pos[i]), n, cfg.alpha);
        });

        for (std::size_t i = 0; i < swarm_size; ++i) {
            if (current[i].scalar < pbest[i].scalar) {
                pbest[i] = current[i];
                pbest_b[i] = pos[i];
            }
            if (current[i].scalar < gbest_fit.scalar) {
                gbest_fit = current[i];
                gbest_b = pos[i];
            }
        }
        history.push_back(gbest_fit.scalar);
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

MORunResult run_mopso(const BaselineConfig& cfg, const Dataset& ds,
                      const SplitPlan& split, Oracle& oracle,
                      const MOHooks* hooks) {
    cfg.validate();
    ds.validate();
    (void)split;

    const std::size_t n = ds.n_features();
    const std::size_t swarm_size = static_cast<std::size_t>(cfg.swarm_size);
    const std::uint64_t calls_at_start = oracle.function_calls();

    const Bounds bounds{-cfg.x_abs, cfg.x_abs, -cfg.v_abs, 1.0};

    std::vector<Rng> prng;
    prng.reserve(swarm_size);
    for (std::size_t i = 0; i < swarm_size; ++i)
        prng.emplace_back(derive_seed(cfg.seed, 1000 + i));

    std::vector<Particle> swarm(swarm_size);
    std::vector<Objectives> current(swarm_size);
    std::vector<Objectives> pbest(swarm_size);

    parallel_for(swarm_size, cfg.threads, [&](std::size_t i) {
        swarm[i] = init_particle(n, bounds, prng[i]);
        current[i] = oracle.evaluate_objectives(swarm[i].b);
    });
    pbest = current;

    ParetoArchive archive(cfg.archive_capacity, /*decision_tiebreak=*/false,
                          PruneMode::objective_crowding);
    for (std::size_t i = 0; i < swarm_size; ++i)
        archive.insert(swarm[i].b, swarm[i].x, current[i]);

    for (int t = 1; t <= cfg.iterations; ++t) {
        const StepCoefficients coeff{linear_inertia(cfg, t), cfg.c1, cfg.c2};
        const auto cd = archive.crowding_distances();
        const auto& entries = archive.entries();

        parallel_for(swarm_size, cfg.threads, [&](std::size_t i) {
            // binary tournament on crowding distance, random among ties
            const std::size_t a = prng[i].index(entries.size());
            const std::size_t b = prng[i].index(entries.size());
            std::size_t pick;
            if (cd[a] > cd[b])
                pick = a;
            else if (cd[b] > cd[a])
                pick = b;
            else
                pick = prng[i].coin() ? a : b;

            Particle& p = swarm[i];
            auto v = update_velocity(p, entries[pick].x_snapshot, coeff,
                                     bounds, prng[i]);
            auto x = update_position(p, v, bounds);
            p.v = std::move(v);
            p.x = std::move(x);
            p.b = decode_position(p.x, prng[i]);
            current[i] = oracle.evaluate_objectives(p.b);
        });

        for (std::size_t i = 0; i < swarm_size; ++i) {
            update_pbest_mo(swarm[i], current[i], pbest[i], prng[i]);
            archive.insert(swarm[i].b, swarm[i].x, current[i]);
        }

        if (hooks && hooks->on_iteration) hooks->on_iteration(t, archive, swarm);
    }

    MORunResult result;
    result.archive = archive.entries();
    result.function_calls = oracle.function_calls() - calls_at_start;
    return result;
}

}  // namespace combpso
