#pragma once

#include <functional>
#include <span>

#include "combpso/oracle.hpp"
#include "combpso/schedule.hpp"
#include "combpso/swarm.hpp"

namespace combpso {

/// Pareto dominance under minimization of both objectives: a is nowhere
/// worse and somewhere strictly better.
inline bool dominates(const Objectives& a, const Objectives& b) {
    return a.f1 <= b.f1 && a.f2 <= b.f2 && (a.f1 < b.f1 || a.f2 < b.f2);
}

struct ArchiveEntry {
    Mask mask;
    std::vector<double> x_snapshot;  // continuous position at insertion
    Objectives objectives;
    std::uint64_t id;  // insertion order, used for all tie-breaks
};

enum class LeaderMetric { euclidean, hamming };
enum class PruneMode {
    decision_nearest_neighbor,  // drop the entry closest to a neighbor in x
    objective_crowding          // drop the smallest crowding distance in (f1,f2)
};

/// Bounded archive of mutually non-dominated solutions. Dominance is decided
/// in objective space; with the decision tie-break enabled, a candidate with
/// objectives equal to an existing entry is still admitted when its mask
/// differs (exact duplicates are rejected).
class ParetoArchive {
public:
    explicit ParetoArchive(
        std::size_t capacity, bool decision_tiebreak = true,
        PruneMode prune_mode = PruneMode::decision_nearest_neighbor);

    struct InsertOutcome {
        bool inserted = false;
        std::vector<ArchiveEntry> displaced;  // entries the candidate dominated
    };

    InsertOutcome insert(const Mask& mask, std::span<const double> x,
                         const Objectives& obj);

    /// Entry nearest to the particle in decision space (Eq of the leader
    /// rule); ties go to the oldest entry. Archive must be non-empty.
    const ArchiveEntry& select_leader(
        const Particle& p, LeaderMetric metric = LeaderMetric::euclidean) const;

    /// Objective-space crowding distances (boundary entries get +inf).
    std::vector<double> crowding_distances() const;

    const std::vector<ArchiveEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    std::size_t capacity() const { return capacity_; }

    /// Order-independent digest of the (mask, objectives) set; used for the
    /// front-unchanged stagnation test.
    std::uint64_t signature() const;

private:
    void prune();

    std::vector<ArchiveEntry> entries_;  // insertion-ordered
    std::size_t capacity_;
    bool decision_tiebreak_;
    PruneMode prune_mode_;
    std::uint64_t next_id_ = 0;
};

/// Personal-best rule for two objectives: dominance decides; mutual
/// non-dominance is resolved by a fair coin. Returns true when replaced.
bool update_pbest_mo(Particle& p, const Objectives& incoming,
                     Objectives& pbest_obj, Rng& rng);

struct MOConfig {
    int swarm_size = 30;
    int iterations = 300;
    Bounds bounds{};
    ScheduleParams schedule{};
    int theta = 5;
    double gamma = 0.2;
    std::size_t archive_capacity = 100;
    LeaderMetric leader_metric = LeaderMetric::euclidean;
    std::uint64_t seed = 1;
    bool per_dimension_r = false;
    int threads = 1;

    void validate() const {
        bounds.validate();
        schedule.validate();
        if (swarm_size < 2) throw ConfigError("mo: swarm_size must be >= 2");
        if (iterations < 2) throw ConfigError("mo: iterations must be >= 2");
        if (theta < 1 || theta >= iterations)
            throw ConfigError("mo: theta must satisfy 1 <= theta < iterations");
        if (gamma <= 0.0 || gamma > 1.0)
            throw ConfigError("mo: gamma must be in (0,1]");
        if (archive_capacity < 2)
            throw ConfigError("mo: archive_capacity must be >= 2");
        if (schedule.T != iterations)
            throw ConfigError("mo: schedule horizon must equal iterations");
    }
};

struct MORunResult {
    std::vector<ArchiveEntry> archive;
    std::uint64_t function_calls;
};

struct MOHooks {
    std::function<void(int t, const ParetoArchive& archive,
                       const std::vector<Particle>& swarm)>
        on_iteration;
    std::function<void(int t, const std::vector<Particle>& before,
                       const std::vector<Particle>& after)>
        on_turbulence;
};

/// Multi-objective COMB-PSO: decision-space leader selection from the
/// archive, superseded-entry reinjection, and turbulence when the front
/// stalls.
MORunResult run_mo(const MOConfig& cfg, const Dataset& ds,
                   const SplitPlan& split, Oracle& oracle,
                   const MOHooks* hooks = nullptr);

}  // namespace combpso
