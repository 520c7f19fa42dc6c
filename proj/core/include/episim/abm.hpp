#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "episim/clustering.hpp"
#include "episim/correlation.hpp"
#include "episim/deployment.hpp"
#include "episim/models.hpp"

namespace episim {

enum class AgentStatus : std::uint8_t { Susceptible, Infected, Quarantined };

struct AgentState {
    std::vector<AgentStatus> status;
    std::vector<bool> ever_infected;
    std::uint64_t step_count = 0;
    double dt = 0.01;
    std::mt19937_64 rng;
    bool control_latched = false;

    std::size_t count(AgentStatus s) const;
};

struct EventSeed {
    Point2 center;
    double r_e = 0.0;
};

enum class InfectionMode { Uniform, Correlated };

struct ControlConfig {
    double threshold = 0.1;                 // infected fraction that trips quarantine
    const ClusterResult* clusters = nullptr;
};

struct AbmConfig {
    const Deployment* deployment = nullptr;
    SiParams si;
    std::uint64_t steps = 0;
    std::uint64_t replications = 1;
    std::uint64_t base_seed = 0;
    InfectionMode mode = InfectionMode::Uniform;
    const CorrelationMatrix* matrix = nullptr;  // required in correlated mode
    std::optional<ControlConfig> control;
    std::optional<Point2> event_center;         // fixed center; random per replication otherwise
    double event_radius = 0.0;
    double dt = 0.01;
    double duty_cycle = 0.05;  // recorded for provenance; curing uses si.lambda * si.p

    void validate() const;
};

struct StepCounts {
    std::uint64_t susceptible = 0;
    std::uint64_t infected = 0;
    std::uint64_t quarantined = 0;
    std::uint64_t ever_infected = 0;
};

struct ReplicationTrace {
    std::uint64_t seed = 0;
    std::vector<StepCounts> counts;  // counts[k] is the state after k steps
};

struct TimeToFraction {
    double fraction = 0.0;
    double mean_step = 0.0;   // over replications that reached it; NaN if none
    std::uint64_t reached = 0;
};

struct AbmResult {
    std::vector<ReplicationTrace> replications;
    std::vector<double> s_mean, i_mean, q_mean, s_std, i_std;
    std::vector<TimeToFraction> time_to_fraction;  // f in {0.1, 0.25, 0.5, 0.9}
    double attack_rate = 0.0;                      // mean final ever-infected fraction
};

struct TransmissionEvent {
    std::uint64_t step;
    std::uint32_t src;
    std::uint32_t dst;
};

/// Node ids within r_t of each node, excluding itself.
std::vector<std::vector<std::uint32_t>> build_adjacency(const Deployment& dep, double r_t);

/// All nodes within r_e of the event center become infected.
/// Throws std::runtime_error when the event disk covers no node.
std::vector<std::size_t> seed_event(const Deployment& dep, const EventSeed& ev);

/// One synchronous update: infections over the transmission graph, then
/// duty-cycle cures, then the quarantine latch when control is enabled.
void step(AgentState& state, const AbmConfig& cfg,
          const std::vector<std::vector<std::uint32_t>>& adjacency,
          std::vector<TransmissionEvent>* audit = nullptr);

/// Quarantine every HCS set touching an infected node once the infected
/// fraction reaches the threshold. One-shot latch.
void apply_control(AgentState& state, const AbmConfig& cfg, const ClusterResult& clusters);

/// `replications` independent runs seeded base_seed + k, aggregated.
AbmResult run(const AbmConfig& cfg, std::vector<TransmissionEvent>* audit = nullptr);

}  // namespace episim
