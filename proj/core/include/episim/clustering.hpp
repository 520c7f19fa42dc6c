#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "episim/correlation.hpp"
#include "episim/deployment.hpp"

namespace episim {

enum class PairClass { HCS, WCS };

/// HCS iff rho_ij >= xi (inclusive boundary).
PairClass classify_pair(double rho_ij, double xi);

enum class Linkage { Average, Complete, Single };

std::string to_string(Linkage rule);
Linkage linkage_from_string(const std::string& name);

/// Set-to-candidate correlation under the chosen linkage rule.
/// Throws std::domain_error on an empty set.
double set_node_correlation(const std::vector<std::size_t>& set_members,
                            std::size_t candidate, const CorrelationMatrix& m,
                            Linkage rule);

struct AuditEvent {
    enum class Kind { Merge, Absorb } kind;
    std::size_t set_index;
    std::size_t node_a;      // for Merge: the pair; for Absorb: the absorbed node (node_b unused)
    std::size_t node_b;
    double linkage_value;    // correlation that justified the event
};

struct ClusterResult {
    std::vector<std::vector<std::size_t>> sets;  // each sorted by id, >= 2 members
    std::vector<double> radii;                   // max member distance to set centroid
    std::vector<std::size_t> singletons;         // sorted
    double xi = 0.0;
    Linkage rule = Linkage::Average;
    std::vector<AuditEvent> audit;
};

/// Greedy agglomeration: repeatedly merge the globally most-correlated
/// eligible pair (ties broken by smallest (i, j)), absorb remaining nodes
/// whose set linkage reaches xi, and stop when no pair reaches xi.
ClusterResult build_sets(const Deployment& dep, const CorrelationMatrix& m,
                         double xi, Linkage rule = Linkage::Average);

struct RccTable {
    std::vector<double> r_t_values;
    std::vector<double> xi_values;
    std::vector<double> r_cc;  // row-major, rows follow r_t_values

    double at(std::size_t row, std::size_t col) const {
        return r_cc[row * xi_values.size() + col];
    }
};

/// Grid of invert_threshold(xi, theta = r_t) values.
RccTable cluster_radius_table(const std::vector<double>& r_t_values,
                              const std::vector<double>& xi_values,
                              Convention convention);

}  // namespace episim
