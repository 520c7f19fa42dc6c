#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace episim {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

double distance(const Point2& a, const Point2& b);

/// A planar sensor field: node positions plus the radio/sensing radii
/// that every geometric quantity downstream is derived from.
struct Deployment {
    std::vector<Point2> positions;  // index == node id
    double width = 0.0;             // meters
    double height = 0.0;            // meters
    double r_s = 0.0;               // sensing radius
    double r_t = 0.0;               // transmission radius

    std::size_t size() const { return positions.size(); }
    double density() const { return static_cast<double>(positions.size()) / (width * height); }

    /// Throws std::invalid_argument on a broken field. Returns a list of
    /// non-fatal warnings (e.g. r_t < 2 r_s).
    std::vector<std::string> validate() const;
};

/// Uniform i.i.d. positions, deterministic per seed.
Deployment generate_deployment(std::size_t n, double width, double height,
                               double r_s, double r_t, std::uint64_t seed);

}  // namespace episim
