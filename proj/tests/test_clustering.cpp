#include <stdexcept>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "episim/clustering.hpp"

using namespace episim;

namespace {

// Independent brute-force reference of the same greedy rule, written
// directly against the textual description rather than sharing any code
// with build_sets.
std::vector<std::vector<std::size_t>> reference_sets(const CorrelationMatrix& m, double xi,
                                                     Linkage rule) {
    std::vector<std::size_t> pool(m.n);
    for (std::size_t i = 0; i < m.n; ++i) pool[i] = i;
    std::vector<std::vector<std::size_t>> sets;
    for (;;) {
        double best = -1.0;
        std::pair<std::size_t, std::size_t> best_pair{0, 0};
        for (std::size_t a = 0; a < pool.size(); ++a)
            for (std::size_t b = a + 1; b < pool.size(); ++b) {
                const auto i = std::min(pool[a], pool[b]);
                const auto j = std::max(pool[a], pool[b]);
                if (m.at(i, j) > best) {
                    best = m.at(i, j);
                    best_pair = {i, j};
                }
            }
        if (best < xi) break;
        std::vector<std::size_t> members{best_pair.first, best_pair.second};
        pool.erase(std::remove(pool.begin(), pool.end(), best_pair.first), pool.end());
        pool.erase(std::remove(pool.begin(), pool.end(), best_pair.second), pool.end());
        std::sort(pool.begin(), pool.end());
        std::vector<std::size_t> absorbed;
        for (std::size_t cand : pool) {
            double link;
            {
                double sum = 0.0, lo = 1e300, hi = -1e300;
                for (std::size_t mem : members) {
                    const double v = m.at(mem, cand);
                    sum += v;
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
                link = rule == Linkage::Average ? sum / members.size()
                       : rule == Linkage::Complete ? lo
                                                   : hi;
            }
            if (link >= xi) {
                members.push_back(cand);
                absorbed.push_back(cand);
            }
        }
        for (std::size_t cand : absorbed)
            pool.erase(std::remove(pool.begin(), pool.end(), cand), pool.end());
        std::sort(members.begin(), members.end());
        sets.push_back(members);
    }
    return sets;
}

std::string serialize(const ClusterResult& r) {
    std::ostringstream os;
    for (std::size_t k = 0; k < r.sets.size(); ++k) {
        os << k << ":";
        for (auto id : r.sets[k]) os << " " << id;
        os << " r=" << r.radii[k] << "\n";
    }
    os << "singles:";
    for (auto id : r.singletons) os << " " << id;
    return os.str();
}

}  // namespace

TEST_CASE("pair classification") {
    CHECK(classify_pair(0.6, 0.5) == PairClass::HCS);
    CHECK(classify_pair(0.5, 0.5) == PairClass::HCS);
    CHECK(classify_pair(0.49, 0.5) == PairClass::WCS);
    CHECK_THROWS_AS(classify_pair(-0.1, 0.5), std::domain_error);
    CHECK_THROWS_AS(classify_pair(0.5, 0.0), std::domain_error);
}

TEST_CASE("set-node correlation rules") {
    CorrelationMatrix m;
    m.n = 3;
    m.rho.assign(9, 0.0);
    m.at(0, 2) = m.at(2, 0) = 0.2;
    m.at(1, 2) = m.at(2, 1) = 0.6;

    SUBCASE("singleton set reduces to the pair value") {
        for (auto rule : {Linkage::Average, Linkage::Complete, Linkage::Single})
            CHECK(set_node_correlation({1}, 2, m, rule) == doctest::Approx(0.6));
    }
    SUBCASE("two-member arithmetic") {
        CHECK(set_node_correlation({0, 1}, 2, m, Linkage::Average) == doctest::Approx(0.4));
        CHECK(set_node_correlation({0, 1}, 2, m, Linkage::Complete) == doctest::Approx(0.2));
        CHECK(set_node_correlation({0, 1}, 2, m, Linkage::Single) == doctest::Approx(0.6));
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(set_node_correlation({}, 2, m, Linkage::Average), std::domain_error);
        CHECK_THROWS_AS(set_node_correlation({2}, 2, m, Linkage::Average), std::domain_error);
    }
}

TEST_CASE("linkage rules are ordered single >= average >= complete") {
    auto dep = generate_deployment(10, 20.0, 20.0, 4.0, 8.0, 3);
    auto m = build_matrix(dep, KernelParams{8.0});
    for (std::size_t cand = 0; cand < 10; ++cand) {
        std::vector<std::size_t> set;
        for (std::size_t i = 0; i < 10; ++i)
            if (i != cand) set.push_back(i);
        const double s = set_node_correlation(set, cand, m, Linkage::Single);
        const double a = set_node_correlation(set, cand, m, Linkage::Average);
        const double c = set_node_correlation(set, cand, m, Linkage::Complete);
        CHECK(s >= a);
        CHECK(a >= c);
    }
}

TEST_CASE("build_sets trivial cases") {
    Deployment dep;
    dep.width = dep.height = 100.0;
    dep.r_s = 1.0;
    dep.r_t = 2.0;

    SUBCASE("all distant: only singletons") {
        dep.positions = {{0, 0}, {50, 0}, {0, 50}, {50, 50}};
        auto m = build_matrix(dep, KernelParams{2.0});
        auto r = build_sets(dep, m, 0.2);
        CHECK(r.sets.empty());
        CHECK(r.singletons.size() == 4);
    }
    SUBCASE("one close pair") {
        dep.positions = {{0, 0}, {0.5, 0}, {0, 50}, {50, 50}};
        auto m = build_matrix(dep, KernelParams{2.0});
        auto r = build_sets(dep, m, 0.2);
        REQUIRE(r.sets.size() == 1);
        CHECK(r.sets[0] == std::vector<std::size_t>{0, 1});
        CHECK(r.singletons == std::vector<std::size_t>{2, 3});
        REQUIRE(r.radii.size() == 1);
        CHECK(r.radii[0] == doctest::Approx(0.25).epsilon(1e-12));
    }
    SUBCASE("size mismatch") {
        dep.positions = {{0, 0}, {1, 0}};
        CorrelationMatrix m;
        m.n = 3;
        m.rho.assign(9, 0.0);
        CHECK_THROWS_AS(build_sets(dep, m, 0.2), std::invalid_argument);
    }
}

TEST_CASE("build_sets matches the brute-force reference") {
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
        auto dep = generate_deployment(30, 40.0, 40.0, 4.0, 8.0, seed);
        auto m = build_matrix(dep, KernelParams{8.0});
        for (auto rule : {Linkage::Average, Linkage::Complete, Linkage::Single}) {
            auto got = build_sets(dep, m, 0.2, rule);
            auto want = reference_sets(m, 0.2, rule);
            CHECK(got.sets == want);
        }
    }
}

TEST_CASE("cluster invariants on random deployments") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto dep = generate_deployment(40, 50.0, 50.0, 5.0, 10.0, 900 + seed);
        auto m = build_matrix(dep, KernelParams{10.0});
        auto r = build_sets(dep, m, 0.25);

        // Disjointness and coverage.
        std::vector<int> hits(dep.size(), 0);
        for (const auto& set : r.sets) {
            CHECK(set.size() >= 2);
            for (auto id : set) ++hits[id];
        }
        for (auto id : r.singletons) ++hits[id];
        for (int h : hits) CHECK(h == 1);

        // Threshold soundness of the audit trail.
        for (const auto& e : r.audit) CHECK(e.linkage_value >= r.xi);

        // Radius bound: no set spans beyond kernel support.
        for (double radius : r.radii) CHECK(radius <= 10.0);
    }
}

TEST_CASE("raising xi never adds clustered nodes") {
    auto dep = generate_deployment(60, 60.0, 60.0, 6.0, 12.0, 77);
    auto m = build_matrix(dep, KernelParams{12.0});
    std::size_t prev = dep.size() + 1;
    for (double xi : {0.1, 0.2, 0.3, 0.4, 0.5 - 1e-12}) {
        auto r = build_sets(dep, m, xi);
        std::size_t clustered = 0;
        for (const auto& set : r.sets) clustered += set.size();
        CHECK(clustered <= prev);
        prev = clustered;
    }
}

TEST_CASE("build_sets is deterministic") {
    auto dep = generate_deployment(35, 40.0, 40.0, 4.0, 8.0, 13);
    auto m = build_matrix(dep, KernelParams{8.0});
    CHECK(serialize(build_sets(dep, m, 0.2)) == serialize(build_sets(dep, m, 0.2)));
}

TEST_CASE("r_cc grid scales with r_t") {
    auto table = cluster_radius_table({9, 12, 15, 18, 21, 24}, {0.2, 0.4, 0.5, 0.6, 0.8},
                                      Convention::Doubled);
    // Column-wise r_cc/r_t is constant: the kernel is scale covariant.
    for (std::size_t c = 0; c < table.xi_values.size(); ++c) {
        const double base = table.at(0, c) / table.r_t_values[0];
        for (std::size_t r = 1; r < table.r_t_values.size(); ++r) {
            const double ratio = table.at(r, c) / table.r_t_values[r];
            CHECK(std::abs(ratio - base) / base < 0.03);
        }
    }
    // Spot checks against the reference grid (10% band).
    CHECK(std::abs(table.at(0, 0) - 5.78) / 5.78 < 0.10);    // r_t=9,  xi=0.2
    CHECK(std::abs(table.at(5, 4) - 3.46) / 3.46 < 0.10);    // r_t=24, xi=0.8
}
