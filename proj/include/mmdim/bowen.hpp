#pragma once

#include "mmdim/pamap.hpp"

#include <vector>

namespace mmdim {

/// The inside part of the orbit x, f(x), ..., f^{steps-1}(x); shorter when the orbit escapes.
std::vector<Point> orbit(const PartialMap& map, const Point& x, int steps);

struct BowenDistance {
    Distance distance;
    /// Some orbit escaped before m steps; the max covers only the common prefix.
    bool truncated = false;
    int steps_compared = 0;
};

/// d_m(x, y) = max_{0 <= i < m} d(f^i x, f^i y). Throws std::invalid_argument for m == 0.
BowenDistance bowen_distance(const PartialMap& map, const Point& x, const Point& y, int m,
                             Metric metric = Metric::maxnorm);

/// Same quantity on precomputed orbits.
BowenDistance bowen_distance(const std::vector<Point>& orbit_x, const std::vector<Point>& orbit_y, int m,
                             Metric metric = Metric::maxnorm);

}  // namespace mmdim
