#pragma once

#include <string>
#include <vector>

#include "episim/abm.hpp"
#include "episim/clustering.hpp"
#include "episim/correlation.hpp"
#include "episim/deployment.hpp"
#include "episim/models.hpp"

namespace episim::io {

/// Shortest round-trip decimal representation; used everywhere a file is
/// written so identical values serialize to identical bytes.
std::string fmt(double v);

void save_deployment(const Deployment& dep, const std::string& path);
Deployment load_deployment(const std::string& path);

void save_matrix_csv(const CorrelationMatrix& m, const std::string& path);
void save_weights_csv(const CorrelationWeights& w, const std::string& path);

void save_trajectory_csv(const Trajectory& traj, const std::string& path);
Trajectory load_trajectory_csv(const std::string& path);

void save_clusters_csv(const ClusterResult& result, const std::string& members_path,
                       const std::string& summary_path);
void save_rcc_table_csv(const RccTable& table, const std::string& path);

void save_abm_csv(const AbmResult& result, double dt, const std::string& path);
void save_abm_replications_csv(const AbmResult& result, double dt,
                               const std::string& path_prefix);
std::string abm_summary_json(const AbmResult& result);
void save_audit_log(const std::vector<TransmissionEvent>& events, const std::string& path);

}  // namespace episim::io
