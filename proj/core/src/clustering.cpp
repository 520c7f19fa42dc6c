#include "episim/clustering.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace episim {

PairClass classify_pair(double rho_ij, double xi) {
    if (rho_ij < 0.0) throw std::domain_error("classify_pair: negative correlation");
    if (!(xi > 0.0) || xi > 1.0) throw std::domain_error("classify_pair: xi outside (0, 1]");
    return rho_ij >= xi ? PairClass::HCS : PairClass::WCS;
}

std::string to_string(Linkage rule) {
    switch (rule) {
        case Linkage::Average: return "average";
        case Linkage::Complete: return "complete";
        case Linkage::Single: return "single";
    }
    throw std::logic_error("unknown linkage");
}

Linkage linkage_from_string(const std::string& name) {
    if (name == "average") return Linkage::Average;
    if (name == "complete") return Linkage::Complete;
    if (name == "single") return Linkage::Single;
    throw std::invalid_argument("unknown linkage: " + name);
}

double set_node_correlation(const std::vector<std::size_t>& set_members,
                            std::size_t candidate, const CorrelationMatrix& m,
                            Linkage rule) {
    if (set_members.empty())
        throw std::domain_error("set_node_correlation: empty set");
    double sum = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t member : set_members) {
        if (member == candidate)
            throw std::domain_error("set_node_correlation: candidate inside set");
        const double v = m.at(member, candidate);
        sum += v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    switch (rule) {
        case Linkage::Average: return sum / static_cast<double>(set_members.size());
        case Linkage::Complete: return lo;
        case Linkage::Single: return hi;
    }
    throw std::logic_error("unknown linkage");
}

ClusterResult build_sets(const Deployment& dep, const CorrelationMatrix& m,
                         double xi, Linkage rule) {
    const std::size_t n = dep.size();
    if (m.n != n) throw std::invalid_argument("build_sets: matrix/deployment size mismatch");
    if (!(xi > 0.0)) throw std::domain_error("build_sets: xi must be positive");

    ClusterResult result;
    result.xi = xi;
    result.rule = rule;

    std::vector<bool> in_pool(n, true);

    for (;;) {
        // Globally most-correlated eligible pair; ties go to the smallest (i, j).
        double best = -1.0;
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!in_pool[i]) continue;
            for (std::size_t j = i + 1; j < n; ++j) {
                if (!in_pool[j]) continue;
                if (m.at(i, j) > best) {
                    best = m.at(i, j);
                    bi = i;
                    bj = j;
                }
            }
        }
        if (best < xi) break;

        const std::size_t set_index = result.sets.size();
        std::vector<std::size_t> members{bi, bj};
        in_pool[bi] = in_pool[bj] = false;
        result.audit.push_back({AuditEvent::Kind::Merge, set_index, bi, bj, best});

        // Single ascending-id pass over the remaining pool; the set grows as
        // nodes are absorbed, so later candidates see the updated membership.
        for (std::size_t l = 0; l < n; ++l) {
            if (!in_pool[l]) continue;
            const double link = set_node_correlation(members, l, m, rule);
            if (link >= xi) {
                members.push_back(l);
                in_pool[l] = false;
                result.audit.push_back({AuditEvent::Kind::Absorb, set_index, l, l, link});
            }
        }
        std::sort(members.begin(), members.end());
        result.sets.push_back(std::move(members));
    }

    for (std::size_t i = 0; i < n; ++i)
        if (in_pool[i]) result.singletons.push_back(i);

    // Centroid-based max distance per set.
    for (const auto& members : result.sets) {
        Point2 centroid{0.0, 0.0};
        for (std::size_t id : members) {
            centroid.x += dep.positions[id].x;
            centroid.y += dep.positions[id].y;
        }
        centroid.x /= static_cast<double>(members.size());
        centroid.y /= static_cast<double>(members.size());
        double radius = 0.0;
        for (std::size_t id : members)
            radius = std::max(radius, distance(dep.positions[id], centroid));
        result.radii.push_back(radius);
    }
    return result;
}

RccTable cluster_radius_table(const std::vector<double>& r_t_values,
                              const std::vector<double>& xi_values,
                              Convention convention) {
    RccTable table;
    table.r_t_values = r_t_values;
    table.xi_values = xi_values;
    table.r_cc.reserve(r_t_values.size() * xi_values.size());
    for (double rt : r_t_values)
        for (double xi : xi_values)
            table.r_cc.push_back(invert_threshold(xi, rt, convention));
    return table;
}

}  // namespace episim
