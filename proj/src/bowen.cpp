#include "mmdim/bowen.hpp"

#include <algorithm>
#include <stdexcept>

namespace mmdim {

std::vector<Point> orbit(const PartialMap& map, const Point& x, int steps) {
    std::vector<Point> out;
    if (steps <= 0) return out;
    out.reserve(static_cast<std::size_t>(steps));
    MapState cur = MapState::inside(x);
    for (int i = 0; i < steps; ++i) {
        if (i > 0) cur = map.apply(cur);
        if (cur.is_escaped()) break;
        out.push_back(cur.point());
    }
    return out;
}

BowenDistance bowen_distance(const PartialMap& map, const Point& x, const Point& y, int m, Metric metric) {
    if (m <= 0) throw std::invalid_argument("bowen distance needs m >= 1");
    return bowen_distance(orbit(map, x, m), orbit(map, y, m), m, metric);
}

BowenDistance bowen_distance(const std::vector<Point>& orbit_x, const std::vector<Point>& orbit_y, int m,
                             Metric metric) {
    if (m <= 0) throw std::invalid_argument("bowen distance needs m >= 1");
    const auto common = std::min({orbit_x.size(), orbit_y.size(), static_cast<std::size_t>(m)});
    BowenDistance out{Distance{metric, Rational(0)}, common < static_cast<std::size_t>(m), static_cast<int>(common)};
    for (std::size_t i = 0; i < common; ++i) out.distance = max(out.distance, distance(orbit_x[i], orbit_y[i], metric));
    return out;
}

}  // namespace mmdim
