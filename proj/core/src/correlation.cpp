#include "episim/correlation.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace episim {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr std::uint64_t kMcShardSize = 1u << 16;
}  // namespace

double kernel(double d, const KernelParams& params) {
    if (d < 0.0) throw std::domain_error("kernel: negative distance");
    if (params.theta <= 0.0) throw std::domain_error("kernel: theta must be positive");
    const double th = params.theta;
    if (d >= th) return 0.0;
    return std::acos(d / th) / kPi - d / (kPi * th * th) * std::sqrt(th * th - d * d);
}

double kernel_peak(Convention convention) {
    return convention == Convention::PaperEq ? 0.5 : 1.0;
}

double kernel_as(double d, const KernelParams& params, Convention convention) {
    const double k = kernel(d, params);
    return convention == Convention::PaperEq ? k : 2.0 * k;
}

OverlapEstimate overlap_fraction_mc(double d, double r_s, std::uint64_t samples,
                                    std::uint64_t seed) {
    if (d < 0.0) throw std::domain_error("overlap_fraction_mc: negative distance");
    if (r_s <= 0.0) throw std::domain_error("overlap_fraction_mc: r_s must be positive");
    if (samples < 10000) throw std::domain_error("overlap_fraction_mc: need >= 1e4 samples");

    // Sample uniformly in the first disk; count hits inside the second.
    // One independent stream per fixed-size shard, so the estimate does not
    // depend on how shards are distributed across threads.
    const std::uint64_t shards = (samples + kMcShardSize - 1) / kMcShardSize;
    std::uint64_t hits = 0;
    std::uint64_t drawn = 0;
    for (std::uint64_t shard = 0; shard < shards; ++shard) {
        std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ull * (shard + 1)));
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const std::uint64_t count =
            std::min<std::uint64_t>(kMcShardSize, samples - shard * kMcShardSize);
        for (std::uint64_t k = 0; k < count; ++k) {
            const double r = r_s * std::sqrt(u(rng));
            const double phi = 2.0 * kPi * u(rng);
            const double x = r * std::cos(phi);
            const double y = r * std::sin(phi);
            const double dx = x - d;
            if (dx * dx + y * y <= r_s * r_s) ++hits;
        }
        drawn += count;
    }
    OverlapEstimate est;
    est.samples = drawn;
    est.fraction = static_cast<double>(hits) / static_cast<double>(drawn);
    est.std_error =
        std::sqrt(est.fraction * (1.0 - est.fraction) / static_cast<double>(drawn));
    return est;
}

CorrelationMatrix build_matrix(const Deployment& dep, const KernelParams& params) {
    CorrelationMatrix m;
    m.n = dep.size();
    m.rho.assign(m.n * m.n, 0.0);
    for (std::size_t i = 0; i < m.n; ++i) {
        for (std::size_t j = i + 1; j < m.n; ++j) {
            const double v = kernel(distance(dep.positions[i], dep.positions[j]), params);
            m.at(i, j) = v;
            m.at(j, i) = v;
        }
    }
    return m;
}

CorrelationWeights weights(const CorrelationMatrix& m) {
    CorrelationWeights out;
    out.w.assign(m.n, 0.0);
    for (std::size_t i = 0; i < m.n; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < m.n; ++j) sum += m.at(i, j);  // diagonal is 0
        out.w[i] = sum;
        out.w_theta += sum;
    }
    if (m.n > 0) out.w_theta /= static_cast<double>(m.n);
    return out;
}

double invert_threshold(double xi, double theta, Convention convention) {
    if (theta <= 0.0) throw std::domain_error("invert_threshold: theta must be positive");
    const double peak = kernel_peak(convention);
    if (!(xi > 0.0) || xi > peak)
        throw std::domain_error("invert_threshold: xi must lie in (0, " +
                                std::to_string(peak) + "]");
    const KernelParams params{theta};
    double lo = 0.0, hi = theta;
    const double tol = 1e-9 * theta;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (kernel_as(mid, params, convention) > xi)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace episim
