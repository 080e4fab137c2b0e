#include "combpso/mo_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>

namespace combpso {

namespace {

double sq_euclidean(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double diff = a[j] - b[j];
        d += diff * diff;
    }
    return d;
}

std::size_t hamming(const Mask& a, const Mask& b) {
    std::size_t d = 0;
    for (std::size_t j = 0; j < a.size(); ++j) d += a[j] != b[j];
    return d;
}

std::uint64_t hash_bits(std::uint64_t h, const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

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

ParetoArchive::ParetoArchive(std::size_t capacity, bool decision_tiebreak,
                             PruneMode prune_mode)
    : capacity_(capacity), decision_tiebreak_(decision_tiebreak),
      prune_mode_(prune_mode) {
    if (capacity_ < 2) throw ConfigError("archive: capacity must be >= 2");
}

ParetoArchive::InsertOutcome ParetoArchive::insert(const Mask& mask,
                                                   std::span<const double> x,
                                                   const Objectives& obj) {
    if (mask.empty() || mask_count(mask) == 0)
        throw ContractError("archive: empty mask");

    InsertOutcome out;
    bool equal_objectives_seen = false;
    for (const auto& e : entries_) {
        if (dominates(e.objectives, obj)) return out;  // rejected
        if (e.objectives == obj) {
            equal_objectives_seen = true;
            if (e.mask == mask) return out;  // exact duplicate
        }
    }
    if (equal_objectives_seen && !decision_tiebreak_) return out;

    // candidate enters: remove everything it dominates
    std::vector<ArchiveEntry> kept;
    kept.reserve(entries_.size() + 1);
    for (auto& e : entries_) {
        if (dominates(obj, e.objectives))
            out.displaced.push_back(std::move(e));
        else
            kept.push_back(std::move(e));
    }
    entries_ = std::move(kept);
    entries_.push_back(ArchiveEntry{mask, {x.begin(), x.end()}, obj, next_id_++});
    out.inserted = true;
    if (entries_.size() > capacity_) prune();
    return out;
}

const ArchiveEntry& ParetoArchive::select_leader(const Particle& p,
                                                 LeaderMetric metric) const {
    if (entries_.empty())
        throw ContractError("archive: leader requested from empty archive");
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const double d =
            metric == LeaderMetric::euclidean
                ? sq_euclidean(p.x, entries_[i].x_snapshot)
                : static_cast<double>(hamming(p.b, entries_[i].mask));
        // strict < keeps the oldest entry on ties (entries are id-ordered)
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return entries_[best];
}

std::vector<double> ParetoArchive::crowding_distances() const {
    const std::size_t n = entries_.size();
    std::vector<double> cd(n, 0.0);
    if (n <= 2) {
        std::fill(cd.begin(), cd.end(),
                  std::numeric_limits<double>::infinity());
        return cd;
    }
    std::vector<std::size_t> order(n);
    auto accumulate_axis = [&](auto objective_of) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const double va = objective_of(entries_[a]);
            const double vb = objective_of(entries_[b]);
            if (va != vb) return va < vb;
            return entries_[a].id < entries_[b].id;
        });
        const double lo = objective_of(entries_[order.front()]);
        const double hi = objective_of(entries_[order.back()]);
        cd[order.front()] = std::numeric_limits<double>::infinity();
        cd[order.back()] = std::numeric_limits<double>::infinity();
        if (hi <= lo) return;  // degenerate axis
        for (std::size_t i = 1; i + 1 < n; ++i)
            cd[order[i]] += (objective_of(entries_[order[i + 1]]) -
                             objective_of(entries_[order[i - 1]])) /
                            (hi - lo);
    };
    accumulate_axis([](const ArchiveEntry& e) { return e.objectives.f1; });
    accumulate_axis([](const ArchiveEntry& e) { return e.objectives.f2; });
    return cd;
}

void ParetoArchive::prune() {
    while (entries_.size() > capacity_) {
        std::size_t victim = entries_.size();

        if (prune_mode_ == PruneMode::decision_nearest_neighbor) {
            // protect the objective-space extremes, then drop the entry whose
            // nearest neighbor in decision space is closest
            std::size_t min_f1 = 0, min_f2 = 0;
            for (std::size_t i = 1; i < entries_.size(); ++i) {
                if (entries_[i].objectives.f1 < entries_[min_f1].objectives.f1)
                    min_f1 = i;
                if (entries_[i].objectives.f2 < entries_[min_f2].objectives.f2)
                    min_f2 = i;
            }
            double victim_d = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < entries_.size(); ++i) {
                if (i == min_f1 || i == min_f2) continue;
                double nn = std::numeric_limits<double>::infinity();
                for (std::size_t j = 0; j < entries_.size(); ++j) {
                    if (j == i) continue;
                    nn = std::min(nn, sq_euclidean(entries_[i].x_snapshot,
                                                   entries_[j].x_snapshot));
                }
                if (nn < victim_d) {
                    victim_d = nn;
                    victim = i;
                }
            }
        } else {
            const auto cd = crowding_distances();
            double victim_cd = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < entries_.size(); ++i)
                if (cd[i] < victim_cd) {
                    victim_cd = cd[i];
                    victim = i;
                }
        }

        if (victim >= entries_.size()) victim = entries_.size() - 1;
        entries_.erase(entries_.begin() +
                       static_cast<std::ptrdiff_t>(victim));
    }
}

std::uint64_t ParetoArchive::signature() const {
    // XOR of per-entry digests: order-independent
    std::uint64_t sig = 0;
    for (const auto& e : entries_) {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        h = hash_bits(h, e.mask.data(), e.mask.size());
        h = hash_bits(h, &e.objectives.f1, sizeof(double));
        h = hash_bits(h, &e.objectives.f2, sizeof(double));
        std::uint64_t s = h;
        sig ^= splitmix64(s);
    }
    return sig;
}

bool update_pbest_mo(Particle& p, const Objectives& incoming,
                     Objectives& pbest_obj, Rng& rng) {
    bool replace;
    if (dominates(incoming, pbest_obj))
        replace = true;
    else if (dominates(pbest_obj, incoming))
        replace = false;
    else
        replace = rng.coin();
    if (replace) {
        p.pbest_x = p.x;
        p.pbest_b = p.b;
        pbest_obj = incoming;
    }
    return replace;
}

MORunResult run_mo(const MOConfig& cfg, const Dataset& ds,
                   const SplitPlan& split, Oracle& oracle,
                   const MOHooks* hooks) {
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
    std::vector<Objectives> current(swarm_size);
    std::vector<Objectives> pbest(swarm_size);

    parallel_for(swarm_size, cfg.threads, [&](std::size_t i) {
        swarm[i] = init_particle(n, cfg.bounds, prng[i]);
        current[i] = oracle.evaluate_objectives(swarm[i].b);
    });
    pbest = current;

    ParetoArchive archive(cfg.archive_capacity, /*decision_tiebreak=*/true,
                          PruneMode::decision_nearest_neighbor);
    for (std::size_t i = 0; i < swarm_size; ++i)
        archive.insert(swarm[i].b, swarm[i].x, current[i]);

    auto weakest_particle = [&]() {
        // the particle dominated by the most archive entries loses; ties go
        // to the larger error objective, then the lower index
        std::size_t weakest = 0;
        std::size_t weakest_count = 0;
        for (std::size_t j = 0; j < swarm_size; ++j) {
            std::size_t count = 0;
            for (const auto& e : archive.entries())
                if (dominates(e.objectives, current[j])) ++count;
            if (j == 0 || count > weakest_count ||
                (count == weakest_count &&
                 current[j].f1 > current[weakest].f1)) {
                weakest = j;
                weakest_count = count;
            }
        }
        return weakest;
    };

    std::vector<std::uint64_t> window{archive.signature()};

    for (int t = 1; t <= cfg.iterations; ++t) {
        const StepCoefficients coeff = coefficients_at(t, cfg.schedule);
        if (!check_convergence_constraint(coeff.omega, coeff.c1, coeff.c2))
            throw ConfigError(strfmt(
                "mo: coefficients at t=%d violate the convergence constraint", t));

        // the archive is frozen during the move/evaluate phase; insertions
        // happen serially afterwards in particle-index order
        parallel_for(swarm_size, cfg.threads, [&](std::size_t i) {
            Particle& p = swarm[i];
            const ArchiveEntry& leader =
                archive.select_leader(p, cfg.leader_metric);
            auto v = update_velocity(p, leader.x_snapshot, coeff, cfg.bounds,
                                     prng[i], cfg.per_dimension_r);
            auto x = update_position(p, v, cfg.bounds);
            p.v = std::move(v);
            p.x = std::move(x);
            p.b = decode_position(p.x, prng[i]);
            current[i] = oracle.evaluate_objectives(p.b);
        });

        for (std::size_t i = 0; i < swarm_size; ++i) {
            update_pbest_mo(swarm[i], current[i], pbest[i], prng[i]);
            auto outcome = archive.insert(swarm[i].b, swarm[i].x, current[i]);
            if (outcome.inserted && !outcome.displaced.empty()) {
                // reinjection: the first superseded entry replaces the
                // weakest particle's decision-space point
                const ArchiveEntry& src = outcome.displaced.front();
                const std::size_t w = weakest_particle();
                swarm[w].x = src.x_snapshot;
                swarm[w].b = src.mask;
                current[w] = src.objectives;
            }
        }

        window.push_back(archive.signature());
        if (stagnation_fired(std::span<const std::uint64_t>(window),
                             cfg.theta)) {
            std::vector<Particle> before;
            if (hooks && hooks->on_turbulence) before = swarm;
            const std::size_t count = static_cast<std::size_t>(
                std::ceil(cfg.gamma * static_cast<double>(swarm_size)));
            const auto selected = sample_distinct(count, swarm_size, engine_rng);
            const double v_max = cfg.bounds.v_max();
            for (auto i : selected)
                for (std::size_t j = 0; j < n; ++j)
                    swarm[i].v[j] = prng[i].uniform(cfg.bounds.v_min, v_max);
            window.clear();
            if (hooks && hooks->on_turbulence)
                hooks->on_turbulence(t, before, swarm);
        }

        if (hooks && hooks->on_iteration) hooks->on_iteration(t, archive, swarm);
    }

    MORunResult result;
    result.archive = archive.entries();
    result.function_calls = oracle.function_calls() - calls_at_start;
    return result;
}

}  // namespace combpso
