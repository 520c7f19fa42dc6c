#pragma once

#include <cstdint>
#include <vector>

#include "episim/deployment.hpp"

namespace episim {

/// Support length of the correlation kernel. theta = 2 r_s by convention.
struct KernelParams {
    double theta = 0.0;
};

/// The kernel as printed peaks at 0.5; the true disk-overlap fraction is
/// twice that. Both readings are useful, so the choice is explicit.
enum class Convention { PaperEq, Doubled };

/// Kernel value at distance d: strictly decreasing on [0, theta), zero at
/// and beyond theta. Throws std::domain_error for d < 0.
double kernel(double d, const KernelParams& params);

/// Peak value kernel(0) under the given convention (0.5 or 1.0).
double kernel_peak(Convention convention);

/// Kernel scaled per convention.
double kernel_as(double d, const KernelParams& params, Convention convention);

struct OverlapEstimate {
    double fraction = 0.0;
    double std_error = 0.0;
    std::uint64_t samples = 0;
};

/// Monte-Carlo estimate of |disk(0,r_s) ∩ disk(d,r_s)| / (pi r_s^2).
/// Deterministic per seed; the sample budget is split into fixed-size
/// seeded shards so a parallel evaluation gives the same answer.
OverlapEstimate overlap_fraction_mc(double d, double r_s, std::uint64_t samples,
                                    std::uint64_t seed);

struct CorrelationMatrix {
    std::size_t n = 0;
    std::vector<double> rho;  // row-major n*n, diagonal stored as 0

    double at(std::size_t i, std::size_t j) const { return rho[i * n + j]; }
    double& at(std::size_t i, std::size_t j) { return rho[i * n + j]; }
};

CorrelationMatrix build_matrix(const Deployment& dep, const KernelParams& params);

struct CorrelationWeights {
    std::vector<double> w;   // per-node sum of correlations to all others
    double w_theta = 0.0;    // network mean of w
};

CorrelationWeights weights(const CorrelationMatrix& m);

/// Unique r_cc in [0, theta] with K(r_cc) = xi under the chosen convention,
/// by bisection to 1e-9 * theta. Throws std::domain_error when xi lies
/// outside (0, K(0)].
double invert_threshold(double xi, double theta, Convention convention);

}  // namespace episim
