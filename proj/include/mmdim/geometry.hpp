#pragma once

#include "mmdim/rational.hpp"

#include <compare>
#include <optional>
#include <string>
#include <vector>

namespace mmdim {

struct Point {
    std::vector<Rational> coords;

    Point() = default;
    explicit Point(std::vector<Rational> c) : coords(std::move(c)) {}

    int dim() const { return static_cast<int>(coords.size()); }
    const Rational& operator[](int i) const { return coords[static_cast<std::size_t>(i)]; }
    Rational& operator[](int i) { return coords[static_cast<std::size_t>(i)]; }

    friend bool operator==(const Point&, const Point&) = default;
    friend std::strong_ordering operator<=>(const Point& a, const Point& b) {
        return std::lexicographical_compare_three_way(a.coords.begin(), a.coords.end(),
                                                      b.coords.begin(), b.coords.end());
    }
};

std::string to_string(const Point& p);

struct Interval {
    Rational lo;
    Rational hi;

    Rational length() const { return hi - lo; }
    bool contains(const Rational& x) const { return lo <= x && x <= hi; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Closed axis-aligned box with rational corners.
class Box {
public:
    Box() = default;
    explicit Box(std::vector<Interval> axes);

    int dim() const { return static_cast<int>(axes_.size()); }
    const Interval& axis(int i) const { return axes_[static_cast<std::size_t>(i)]; }
    const std::vector<Interval>& axes() const { return axes_; }

    bool contains(const Point& p) const;
    bool contains_interior(const Point& p) const;
    bool contains(const Box& other) const;
    /// True when every side has positive length.
    bool has_interior() const;
    Point center() const;
    Point lower_corner() const;
    Point upper_corner() const;
    Rational volume() const;

    /// Closed intersection, nullopt when empty.
    std::optional<Box> intersect(const Box& other) const;
    bool interiors_intersect(const Box& other) const;

    friend bool operator==(const Box&, const Box&) = default;
    friend bool operator<(const Box& a, const Box& b);

private:
    std::vector<Interval> axes_;
};

std::string to_string(const Box& b);

/// The diagonal cube [lo, hi]^dim.
struct Cube {
    Rational lo;
    Rational hi;
    int dim = 2;

    Cube() = default;
    Cube(Rational lo_, Rational hi_, int dim_);

    Rational side() const { return hi - lo; }
    Box box() const;
    bool contains(const Point& p) const { return box().contains(p); }
    friend bool operator==(const Cube&, const Cube&) = default;
};

/// Either a point still inside the coded region or the absorbing escape state.
class MapState {
public:
    static MapState inside(Point p) { return MapState(std::move(p)); }
    static MapState escaped() { return MapState(); }

    bool is_escaped() const { return !point_.has_value(); }
    bool is_inside() const { return point_.has_value(); }
    const Point& point() const { return point_.value(); }

    friend bool operator==(const MapState&, const MapState&) = default;

private:
    MapState() = default;
    explicit MapState(Point p) : point_(std::move(p)) {}
    std::optional<Point> point_;
};

enum class Metric { maxnorm, euclidean };

std::string to_string(Metric m);
Metric parse_metric(const std::string& name);

/// Exact distance: the distance itself under maxnorm, its square under euclidean.
struct Distance {
    Metric metric = Metric::maxnorm;
    Rational value;

    double to_double() const;
    friend bool operator==(const Distance&, const Distance&) = default;
};

Distance distance(const Point& x, const Point& y, Metric metric);
Distance max(const Distance& a, const Distance& b);

/// Strict d > eps, decided exactly (squared form under euclidean).
bool compare_separation(const Distance& d, const Rational& eps);

}  // namespace mmdim
