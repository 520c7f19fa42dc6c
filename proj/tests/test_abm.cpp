#include <stdexcept>
#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "episim/abm.hpp"

using namespace episim;

namespace {

AbmConfig base_config(const Deployment& dep) {
    AbmConfig cfg;
    cfg.deployment = &dep;
    cfg.si.beta = 0.3;
    cfg.si.sigma = dep.density();
    cfg.si.r_t = dep.r_t;
    cfg.si.n_total = static_cast<double>(dep.size());
    cfg.si.lambda = 0.0;
    cfg.si.p = 0.0;
    cfg.steps = 50;
    cfg.replications = 1;
    cfg.base_seed = 7;
    cfg.event_radius = 10.0;
    cfg.event_center = Point2{75.0, 75.0};
    cfg.dt = 0.01;
    return cfg;
}

}  // namespace

TEST_CASE("seed_event coverage") {
    auto dep = generate_deployment(200, 150.0, 150.0, 4.5, 9.0, 21);

    SUBCASE("radius below nearest node distance") {
        // Center in a corner far from any node of this seed's layout, tiny radius.
        EventSeed ev{{0.0, 0.0}, 1e-6};
        CHECK_THROWS_AS(seed_event(dep, ev), std::runtime_error);
    }
    SUBCASE("radius covering the whole field") {
        EventSeed ev{{75.0, 75.0}, 1000.0};
        CHECK(seed_event(dep, ev).size() == dep.size());
    }
    SUBCASE("expected coverage tracks sigma pi r_e^2") {
        const double r_e = 10.0;
        const double sigma = 1000.0 / (150.0 * 150.0);
        double total = 0.0;
        int draws = 0;
        for (std::uint64_t s = 0; s < 100; ++s) {
            auto d = generate_deployment(1000, 150.0, 150.0, 4.5, 9.0, 500 + s);
            EventSeed ev{{75.0, 75.0}, r_e};
            total += static_cast<double>(seed_event(d, ev).size());
            ++draws;
        }
        const double mean = total / draws;
        const double p_in = std::numbers::pi * r_e * r_e / (150.0 * 150.0);
        const double expected = 1000.0 * p_in;
        const double se = std::sqrt(1000.0 * p_in * (1.0 - p_in) / draws);
        CHECK(std::abs(mean - expected) <= 3.0 * se);
        CHECK(expected == doctest::Approx(sigma * std::numbers::pi * r_e * r_e).epsilon(1e-12));
    }
}

TEST_CASE("step with no infected nodes is absorbing") {
    auto dep = generate_deployment(50, 50.0, 50.0, 3.0, 6.0, 2);
    auto cfg = base_config(dep);
    auto adj = build_adjacency(dep, dep.r_t);
    AgentState state;
    state.status.assign(dep.size(), AgentStatus::Susceptible);
    state.ever_infected.assign(dep.size(), false);
    state.dt = cfg.dt;
    state.rng.seed(1);
    step(state, cfg, adj);
    CHECK(state.count(AgentStatus::Susceptible) == dep.size());
}

TEST_CASE("certain transmission infects every neighbor") {
    auto dep = generate_deployment(50, 40.0, 40.0, 3.0, 8.0, 3);
    auto cfg = base_config(dep);
    cfg.si.beta = 1.0;
    cfg.dt = 1.0;
    auto adj = build_adjacency(dep, dep.r_t);
    AgentState state;
    state.status.assign(dep.size(), AgentStatus::Susceptible);
    state.ever_infected.assign(dep.size(), false);
    state.dt = cfg.dt;
    state.rng.seed(1);
    state.status[0] = AgentStatus::Infected;
    state.ever_infected[0] = true;
    step(state, cfg, adj);
    for (auto j : adj[0]) CHECK(state.status[j] == AgentStatus::Infected);
    CHECK(state.count(AgentStatus::Infected) == adj[0].size() + 1);
}

TEST_CASE("single-source infections follow the binomial rate") {
    auto dep = generate_deployment(120, 40.0, 40.0, 3.0, 8.0, 4);
    auto cfg = base_config(dep);
    cfg.si.beta = 0.2;
    cfg.dt = 1.0;  // per-neighbor probability 0.2
    auto adj = build_adjacency(dep, dep.r_t);
    const std::size_t src = 0;
    const double k = static_cast<double>(adj[src].size());
    REQUIRE(k >= 3);

    double total = 0.0;
    const int reps = 10000;
    AgentState state;
    for (int rep = 0; rep < reps; ++rep) {
        state.status.assign(dep.size(), AgentStatus::Susceptible);
        state.ever_infected.assign(dep.size(), false);
        state.dt = cfg.dt;
        state.rng.seed(10000 + rep);
        state.step_count = 0;
        state.status[src] = AgentStatus::Infected;
        step(state, cfg, adj);
        total += static_cast<double>(state.count(AgentStatus::Infected)) - 1.0;
    }
    const double mean = total / reps;
    const double expected = 0.2 * k;
    const double se = std::sqrt(k * 0.2 * 0.8 / reps);
    CHECK(std::abs(mean - expected) <= 3.0 * se);
}

TEST_CASE("per-step conservation and the spatial wave bound") {
    auto dep = generate_deployment(300, 100.0, 100.0, 4.0, 10.0, 6);
    auto cfg = base_config(dep);
    cfg.si.beta = 0.8;
    cfg.dt = 0.5;
    const Point2 center{50.0, 50.0};
    cfg.event_center = center;
    cfg.event_radius = 8.0;
    auto adj = build_adjacency(dep, dep.r_t);

    AgentState state;
    state.status.assign(dep.size(), AgentStatus::Susceptible);
    state.ever_infected.assign(dep.size(), false);
    state.dt = cfg.dt;
    state.rng.seed(5);
    for (auto id : seed_event(dep, {center, cfg.event_radius})) {
        state.status[id] = AgentStatus::Infected;
        state.ever_infected[id] = true;
    }

    auto max_infected_distance = [&] {
        double m = 0.0;
        for (std::size_t i = 0; i < dep.size(); ++i)
            if (state.status[i] == AgentStatus::Infected)
                m = std::max(m, distance(dep.positions[i], center));
        return m;
    };

    double prev = max_infected_distance();
    for (int k = 0; k < 30; ++k) {
        step(state, cfg, adj);
        CHECK(state.count(AgentStatus::Susceptible) + state.count(AgentStatus::Infected) +
                  state.count(AgentStatus::Quarantined) ==
              dep.size());
        const double now = max_infected_distance();
        CHECK(now <= prev + dep.r_t + 1e-12);
        prev = now;
    }
}

TEST_CASE("run determinism and flat trajectory without infection") {
    auto dep = generate_deployment(100, 80.0, 80.0, 4.0, 8.0, 8);
    auto cfg = base_config(dep);
    cfg.steps = 30;
    cfg.replications = 3;

    SUBCASE("beta = 0 stays flat") {
        auto flat_cfg = cfg;
        flat_cfg.si.beta = 1e-300;  // beta = 0 fails validation; this never fires
        auto r = run(flat_cfg);
        const double first = r.i_mean.front();
        for (double v : r.i_mean) CHECK(v == first);
    }
    SUBCASE("identical configs give identical results") {
        auto a = run(cfg);
        auto b = run(cfg);
        REQUIRE(a.replications.size() == b.replications.size());
        for (std::size_t r = 0; r < a.replications.size(); ++r)
            for (std::size_t k = 0; k < a.replications[r].counts.size(); ++k) {
                CHECK(a.replications[r].counts[k].infected ==
                      b.replications[r].counts[k].infected);
                CHECK(a.replications[r].counts[k].susceptible ==
                      b.replications[r].counts[k].susceptible);
            }
        CHECK(a.attack_rate == b.attack_rate);
    }
}

TEST_CASE("doubling replications shrinks the time-to-fraction spread") {
    auto dep = generate_deployment(200, 100.0, 100.0, 4.0, 12.0, 12);
    auto cfg = base_config(dep);
    cfg.si.beta = 0.6;
    cfg.dt = 0.2;
    cfg.steps = 200;
    cfg.event_center.reset();
    cfg.event_radius = 12.0;

    auto sample_ttf = [&](std::uint64_t reps, std::uint64_t seed) {
        auto c = cfg;
        c.replications = reps;
        c.base_seed = seed;
        auto r = run(c);
        return r.time_to_fraction[2].mean_step;  // f = 0.5
    };

    // Standard error of the mean over batches.
    auto batch_se = [&](std::uint64_t reps) {
        const int batches = 12;
        double sum = 0.0, sum2 = 0.0;
        for (int b = 0; b < batches; ++b) {
            const double v = sample_ttf(reps, 1000 + b * 100);
            sum += v;
            sum2 += v * v;
        }
        const double mean = sum / batches;
        return std::sqrt(std::max(0.0, sum2 / batches - mean * mean));
    };

    const double se1 = batch_se(8);
    const double se2 = batch_se(16);
    const double ratio = se2 / se1;  // nominal 1/sqrt(2) ~ 0.707
    CHECK(ratio < 0.707 * 1.45);
}

TEST_CASE("quarantine control") {
    auto dep = generate_deployment(200, 80.0, 80.0, 6.0, 12.0, 9);
    auto m = build_matrix(dep, KernelParams{2.0 * dep.r_s});
    auto clusters = build_sets(dep, m, 0.3);
    REQUIRE(!clusters.sets.empty());

    auto cfg = base_config(dep);
    cfg.si.beta = 0.6;
    cfg.dt = 0.2;
    cfg.steps = 150;
    cfg.event_center = Point2{40.0, 40.0};
    cfg.event_radius = 8.0;

    SUBCASE("threshold 1.0 never fires before full infection") {
        auto c = cfg;
        c.control = ControlConfig{1.0, &clusters};
        auto r = run(c);
        for (const auto& trace : r.replications)
            for (std::size_t k = 0; k + 1 < trace.counts.size(); ++k)
                if (trace.counts[k].quarantined > 0)
                    CHECK(trace.counts[k].infected + trace.counts[k].quarantined ==
                          dep.size());
    }
    SUBCASE("all-singleton clustering quarantines nothing") {
        ClusterResult empty;
        empty.xi = 0.3;
        for (std::size_t i = 0; i < dep.size(); ++i) empty.singletons.push_back(i);
        auto c = cfg;
        c.control = ControlConfig{0.05, &empty};
        auto r = run(c);
        for (const auto& trace : r.replications)
            CHECK(trace.counts.back().quarantined == 0);
    }
    SUBCASE("control lowers the attack rate on paired seeds") {
        auto with = cfg;
        with.control = ControlConfig{0.1, &clusters};
        with.replications = 20;
        auto without = cfg;
        without.replications = 20;
        auto a = run(with);
        auto b = run(without);
        int lower = 0;
        for (std::size_t r = 0; r < 20; ++r)
            if (a.replications[r].counts.back().ever_infected <
                b.replications[r].counts.back().ever_infected)
                ++lower;
        CHECK(lower >= 16);
    }
}

TEST_CASE("no transmission touches a quarantined endpoint") {
    auto dep = generate_deployment(150, 60.0, 60.0, 6.0, 12.0, 14);
    auto m = build_matrix(dep, KernelParams{2.0 * dep.r_s});
    auto clusters = build_sets(dep, m, 0.3);

    auto cfg = base_config(dep);
    cfg.si.beta = 0.6;
    cfg.dt = 0.2;
    cfg.steps = 100;
    cfg.event_center = Point2{30.0, 30.0};
    cfg.event_radius = 8.0;
    cfg.control = ControlConfig{0.1, &clusters};

    std::vector<TransmissionEvent> audit;
    auto result = run(cfg, &audit);
    (void)result;

    // Re-run step by step to know quarantine membership over time: the
    // latch is permanent, so it is enough to check final quarantined nodes
    // against events after the latch. Simpler and strict: replay with the
    // audit and assert endpoints were never quarantined at event time.
    // Quarantined nodes can never appear as dst (they are not susceptible)
    // nor as src (they are skipped in the neighbor scan); verify dst of all
    // events is never a node that was quarantined earlier.
    std::vector<std::uint64_t> quarantine_step(dep.size(),
                                               std::numeric_limits<std::uint64_t>::max());
    {
        // Replay deterministically.
        auto adj = build_adjacency(dep, dep.r_t);
        AgentState state;
        state.status.assign(dep.size(), AgentStatus::Susceptible);
        state.ever_infected.assign(dep.size(), false);
        state.dt = cfg.dt;
        state.rng.seed(cfg.base_seed);
        for (auto id : seed_event(dep, {*cfg.event_center, cfg.event_radius})) {
            state.status[id] = AgentStatus::Infected;
            state.ever_infected[id] = true;
        }
        for (std::uint64_t k = 0; k < cfg.steps; ++k) {
            step(state, cfg, adj);
            for (std::size_t i = 0; i < dep.size(); ++i)
                if (state.status[i] == AgentStatus::Quarantined &&
                    quarantine_step[i] == std::numeric_limits<std::uint64_t>::max())
                    quarantine_step[i] = k;
        }
    }
    for (const auto& e : audit) {
        CHECK(e.step <= quarantine_step[e.dst]);
        CHECK(e.step <= quarantine_step[e.src]);
    }
}

TEST_CASE("correlated mode spreads no slower than uniform") {
    auto dep = generate_deployment(250, 70.0, 70.0, 6.0, 12.0, 31);
    auto cfg = base_config(dep);
    cfg.si.beta = 0.3;
    cfg.dt = 0.2;
    cfg.steps = 250;
    cfg.event_center = Point2{35.0, 35.0};
    cfg.event_radius = 8.0;
    cfg.replications = 40;
    auto m = build_matrix(dep, KernelParams{2.0 * dep.r_s});

    auto uni = run(cfg);
    auto c = cfg;
    c.mode = InfectionMode::Correlated;
    c.matrix = &m;
    auto cor = run(c);

    int faster = 0, informative = 0;
    auto ttf = [&](const ReplicationTrace& t) {
        const double target = 0.5 * static_cast<double>(dep.size());
        for (std::size_t k = 0; k < t.counts.size(); ++k)
            if (static_cast<double>(t.counts[k].ever_infected) >= target) return (long)k;
        return (long)-1;
    };
    for (std::size_t r = 0; r < cfg.replications; ++r) {
        const long a = ttf(cor.replications[r]);
        const long b = ttf(uni.replications[r]);
        if (a < 0 || b < 0 || a == b) continue;
        ++informative;
        if (a < b) ++faster;
    }
    REQUIRE(informative >= 10);
    CHECK(faster * 2 > informative);  // majority of informative pairs
}
