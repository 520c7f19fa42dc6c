#include "episim/deployment.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace episim {

double distance(const Point2& a, const Point2& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

std::vector<std::string> Deployment::validate() const {
    if (width <= 0.0 || height <= 0.0)
        throw std::invalid_argument("deployment: degenerate area");
    if (r_s <= 0.0 || r_t <= 0.0)
        throw std::invalid_argument("deployment: radii must be positive");
    for (const auto& p : positions) {
        if (p.x < 0.0 || p.x > width || p.y < 0.0 || p.y > height)
            throw std::invalid_argument("deployment: position outside field");
    }
    std::vector<std::string> warnings;
    if (r_t < 2.0 * r_s)
        warnings.push_back("r_t < 2*r_s: transmission range below twice the sensing range");
    return warnings;
}

Deployment generate_deployment(std::size_t n, double width, double height,
                               double r_s, double r_t, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("generate_deployment: need at least 2 nodes");
    if (width <= 0.0 || height <= 0.0)
        throw std::invalid_argument("generate_deployment: degenerate area");
    Deployment dep;
    dep.width = width;
    dep.height = height;
    dep.r_s = r_s;
    dep.r_t = r_t;
    dep.positions.resize(n);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(0.0, width), uy(0.0, height);
    for (auto& p : dep.positions) {
        p.x = ux(rng);
        p.y = uy(rng);
    }
    dep.validate();
    return dep;
}

}  // namespace episim
