#include "episim/abm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace episim {

std::size_t AgentState::count(AgentStatus s) const {
    return static_cast<std::size_t>(std::count(status.begin(), status.end(), s));
}

void AbmConfig::validate() const {
    if (!deployment) throw std::invalid_argument("abm: deployment required");
    if (replications < 1) throw std::invalid_argument("abm: replications must be >= 1");
    if (!(dt > 0.0)) throw std::invalid_argument("abm: dt must be positive");
    if (!(event_radius > 0.0)) throw std::invalid_argument("abm: event radius must be positive");
    if (mode == InfectionMode::Correlated && !matrix)
        throw std::invalid_argument("abm: correlated mode requires a correlation matrix");
    if (control) {
        if (!(control->threshold > 0.0) || control->threshold > 1.0)
            throw std::invalid_argument("abm: control threshold must be in (0, 1]");
        if (!control->clusters)
            throw std::invalid_argument("abm: control requires a cluster result");
    }
}

std::vector<std::vector<std::uint32_t>> build_adjacency(const Deployment& dep, double r_t) {
    const std::size_t n = dep.size();
    std::vector<std::vector<std::uint32_t>> adj(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (distance(dep.positions[i], dep.positions[j]) <= r_t) {
                adj[i].push_back(static_cast<std::uint32_t>(j));
                adj[j].push_back(static_cast<std::uint32_t>(i));
            }
        }
    }
    return adj;
}

std::vector<std::size_t> seed_event(const Deployment& dep, const EventSeed& ev) {
    if (!(ev.r_e > 0.0)) throw std::invalid_argument("seed_event: r_e must be positive");
    if (ev.center.x < 0.0 || ev.center.x > dep.width || ev.center.y < 0.0 ||
        ev.center.y > dep.height)
        throw std::invalid_argument("seed_event: center outside deployment");
    std::vector<std::size_t> covered;
    for (std::size_t i = 0; i < dep.size(); ++i)
        if (distance(dep.positions[i], ev.center) <= ev.r_e) covered.push_back(i);
    if (covered.empty())
        throw std::runtime_error("seed_event: event disk covers no node");
    return covered;
}

void apply_control(AgentState& state, const AbmConfig& cfg, const ClusterResult& clusters) {
    if (state.control_latched) return;
    const double n = static_cast<double>(state.status.size());
    const double infected_fraction = static_cast<double>(state.count(AgentStatus::Infected)) / n;
    if (infected_fraction < cfg.control->threshold) return;

    state.control_latched = true;
    for (const auto& members : clusters.sets) {
        const bool touched = std::any_of(members.begin(), members.end(), [&](std::size_t id) {
            return state.status[id] == AgentStatus::Infected;
        });
        if (touched)
            for (std::size_t id : members) state.status[id] = AgentStatus::Quarantined;
    }
}

void step(AgentState& state, const AbmConfig& cfg,
          const std::vector<std::vector<std::uint32_t>>& adjacency,
          std::vector<TransmissionEvent>* audit) {
    const std::size_t n = state.status.size();
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double base_p = cfg.si.beta * state.dt;
    const double peak = kernel_peak(Convention::PaperEq);

    // Synchronous infection pass against the pre-step statuses.
    std::vector<std::uint32_t> newly_infected;
    for (std::uint32_t j = 0; j < n; ++j) {
        if (state.status[j] != AgentStatus::Susceptible) continue;
        double escape = 1.0;
        std::uint32_t first_src = 0;
        bool exposed = false;
        for (std::uint32_t i : adjacency[j]) {
            if (state.status[i] != AgentStatus::Infected) continue;
            double p_ij = base_p;
            if (cfg.mode == InfectionMode::Correlated)
                p_ij = std::min(1.0, base_p * (1.0 + cfg.matrix->at(i, j) / peak));
            if (!exposed) first_src = i;
            exposed = true;
            escape *= 1.0 - p_ij;
        }
        if (!exposed) continue;
        if (u(state.rng) < 1.0 - escape) {
            newly_infected.push_back(j);
            if (audit) audit->push_back({state.step_count, first_src, j});
        }
    }

    // Duty-cycle curing of pre-step infected nodes.
    const double cure_p = cfg.si.lambda * cfg.si.p * state.dt;
    std::vector<std::uint32_t> cured;
    if (cure_p > 0.0) {
        for (std::uint32_t i = 0; i < n; ++i) {
            if (state.status[i] != AgentStatus::Infected) continue;
            if (u(state.rng) < cure_p) cured.push_back(i);
        }
    }

    for (std::uint32_t j : newly_infected) {
        state.status[j] = AgentStatus::Infected;
        state.ever_infected[j] = true;
    }
    for (std::uint32_t i : cured) state.status[i] = AgentStatus::Susceptible;

    ++state.step_count;

    if (cfg.control) apply_control(state, cfg, *cfg.control->clusters);
}

namespace {

StepCounts snapshot(const AgentState& state) {
    StepCounts c;
    for (std::size_t i = 0; i < state.status.size(); ++i) {
        switch (state.status[i]) {
            case AgentStatus::Susceptible: ++c.susceptible; break;
            case AgentStatus::Infected: ++c.infected; break;
            case AgentStatus::Quarantined: ++c.quarantined; break;
        }
        if (state.ever_infected[i]) ++c.ever_infected;
    }
    return c;
}

}  // namespace

AbmResult run(const AbmConfig& cfg, std::vector<TransmissionEvent>* audit) {
    cfg.validate();
    const Deployment& dep = *cfg.deployment;
    const std::size_t n = dep.size();
    const auto adjacency = build_adjacency(dep, dep.r_t);

    AbmResult result;
    result.replications.reserve(cfg.replications);

    for (std::uint64_t rep = 0; rep < cfg.replications; ++rep) {
        const std::uint64_t seed = cfg.base_seed + rep;
        AgentState state;
        state.status.assign(n, AgentStatus::Susceptible);
        state.ever_infected.assign(n, false);
        state.dt = cfg.dt;
        state.rng.seed(seed);

        EventSeed ev;
        ev.r_e = cfg.event_radius;
        if (cfg.event_center) {
            ev.center = *cfg.event_center;
        } else {
            std::uniform_real_distribution<double> ux(0.0, dep.width), uy(0.0, dep.height);
            // Resample until the event disk covers at least one node.
            for (;;) {
                ev.center = {ux(state.rng), uy(state.rng)};
                bool covered = false;
                for (const auto& p : dep.positions)
                    if (distance(p, ev.center) <= ev.r_e) { covered = true; break; }
                if (covered) break;
            }
        }
        for (std::size_t id : seed_event(dep, ev)) {
            state.status[id] = AgentStatus::Infected;
            state.ever_infected[id] = true;
        }

        ReplicationTrace trace;
        trace.seed = seed;
        trace.counts.reserve(cfg.steps + 1);
        trace.counts.push_back(snapshot(state));
        for (std::uint64_t k = 0; k < cfg.steps; ++k) {
            step(state, cfg, adjacency, audit);
            trace.counts.push_back(snapshot(state));
        }
        result.replications.push_back(std::move(trace));
    }

    // Aggregate: counts per step across replications.
    const std::size_t rows = cfg.steps + 1;
    result.s_mean.assign(rows, 0.0);
    result.i_mean.assign(rows, 0.0);
    result.q_mean.assign(rows, 0.0);
    result.s_std.assign(rows, 0.0);
    result.i_std.assign(rows, 0.0);
    const double reps = static_cast<double>(cfg.replications);
    for (std::size_t k = 0; k < rows; ++k) {
        double s = 0.0, i = 0.0, q = 0.0, s2 = 0.0, i2 = 0.0;
        for (const auto& trace : result.replications) {
            const auto& c = trace.counts[k];
            s += static_cast<double>(c.susceptible);
            i += static_cast<double>(c.infected);
            q += static_cast<double>(c.quarantined);
            s2 += static_cast<double>(c.susceptible) * static_cast<double>(c.susceptible);
            i2 += static_cast<double>(c.infected) * static_cast<double>(c.infected);
        }
        result.s_mean[k] = s / reps;
        result.i_mean[k] = i / reps;
        result.q_mean[k] = q / reps;
        result.s_std[k] = std::sqrt(std::max(0.0, s2 / reps - result.s_mean[k] * result.s_mean[k]));
        result.i_std[k] = std::sqrt(std::max(0.0, i2 / reps - result.i_mean[k] * result.i_mean[k]));
    }

    for (double f : {0.1, 0.25, 0.5, 0.9}) {
        TimeToFraction ttf;
        ttf.fraction = f;
        double sum = 0.0;
        const double target = f * static_cast<double>(n);
        for (const auto& trace : result.replications) {
            for (std::size_t k = 0; k < trace.counts.size(); ++k) {
                if (static_cast<double>(trace.counts[k].ever_infected) >= target) {
                    sum += static_cast<double>(k);
                    ++ttf.reached;
                    break;
                }
            }
        }
        ttf.mean_step = ttf.reached > 0 ? sum / static_cast<double>(ttf.reached)
                                        : std::numeric_limits<double>::quiet_NaN();
        result.time_to_fraction.push_back(ttf);
    }

    double attack = 0.0;
    for (const auto& trace : result.replications)
        attack += static_cast<double>(trace.counts.back().ever_infected) /
                  static_cast<double>(n);
    result.attack_rate = attack / reps;
    return result;
}

}  // namespace episim
