#include "mmdim/geometry.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mmdim {

std::string to_string(const Point& p) {
    std::ostringstream os;
    os << '(';
    for (int i = 0; i < p.dim(); ++i) os << (i ? ", " : "") << p[i];
    os << ')';
    return os.str();
}

Box::Box(std::vector<Interval> axes) : axes_(std::move(axes)) {
    for (const auto& a : axes_)
        if (a.hi < a.lo) throw std::invalid_argument("box with inverted interval");
}

bool Box::contains(const Point& p) const {
    if (p.dim() != dim()) return false;
    for (int i = 0; i < dim(); ++i)
        if (!axis(i).contains(p[i])) return false;
    return true;
}

bool Box::contains_interior(const Point& p) const {
    if (p.dim() != dim()) return false;
    for (int i = 0; i < dim(); ++i)
        if (!(axis(i).lo < p[i] && p[i] < axis(i).hi)) return false;
    return true;
}

bool Box::contains(const Box& other) const {
    if (other.dim() != dim()) return false;
    for (int i = 0; i < dim(); ++i)
        if (other.axis(i).lo < axis(i).lo || axis(i).hi < other.axis(i).hi) return false;
    return true;
}

bool Box::has_interior() const {
    if (axes_.empty()) return false;
    for (const auto& a : axes_)
        if (!(a.lo < a.hi)) return false;
    return true;
}

Point Box::center() const {
    std::vector<Rational> c;
    c.reserve(axes_.size());
    const Rational half(1, 2);
    for (const auto& a : axes_) c.push_back((a.lo + a.hi) * half);
    return Point(std::move(c));
}

Point Box::lower_corner() const {
    std::vector<Rational> c;
    for (const auto& a : axes_) c.push_back(a.lo);
    return Point(std::move(c));
}

Point Box::upper_corner() const {
    std::vector<Rational> c;
    for (const auto& a : axes_) c.push_back(a.hi);
    return Point(std::move(c));
}

Rational Box::volume() const {
    Rational v(1);
    for (const auto& a : axes_) v *= a.length();
    return v;
}

std::optional<Box> Box::intersect(const Box& other) const {
    if (other.dim() != dim()) return std::nullopt;
    std::vector<Interval> out;
    out.reserve(axes_.size());
    for (int i = 0; i < dim(); ++i) {
        Interval iv{max(axis(i).lo, other.axis(i).lo), min(axis(i).hi, other.axis(i).hi)};
        if (iv.hi < iv.lo) return std::nullopt;
        out.push_back(std::move(iv));
    }
    return Box(std::move(out));
}

bool Box::interiors_intersect(const Box& other) const {
    if (other.dim() != dim()) return false;
    for (int i = 0; i < dim(); ++i)
        if (!(max(axis(i).lo, other.axis(i).lo) < min(axis(i).hi, other.axis(i).hi))) return false;
    return true;
}

bool operator<(const Box& a, const Box& b) {
    const auto n = std::min(a.axes_.size(), b.axes_.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (a.axes_[i].lo != b.axes_[i].lo) return a.axes_[i].lo < b.axes_[i].lo;
        if (a.axes_[i].hi != b.axes_[i].hi) return a.axes_[i].hi < b.axes_[i].hi;
    }
    return a.axes_.size() < b.axes_.size();
}

std::string to_string(const Box& b) {
    std::ostringstream os;
    for (int i = 0; i < b.dim(); ++i)
        os << (i ? " x " : "") << '[' << b.axis(i).lo << ", " << b.axis(i).hi << ']';
    return os.str();
}

Cube::Cube(Rational lo_, Rational hi_, int dim_) : lo(std::move(lo_)), hi(std::move(hi_)), dim(dim_) {
    if (!(lo < hi)) throw std::invalid_argument("cube needs lo < hi");
    if (dim < 1) throw std::invalid_argument("cube dimension must be positive");
}

Box Cube::box() const { return Box(std::vector<Interval>(static_cast<std::size_t>(dim), Interval{lo, hi})); }

std::string to_string(Metric m) { return m == Metric::maxnorm ? "maxnorm" : "euclidean"; }

Metric parse_metric(const std::string& name) {
    if (name == "maxnorm") return Metric::maxnorm;
    if (name == "euclidean") return Metric::euclidean;
    throw std::invalid_argument("unknown metric '" + name + "'");
}

double Distance::to_double() const {
    return metric == Metric::maxnorm ? value.to_double() : std::sqrt(value.to_double());
}

Distance distance(const Point& x, const Point& y, Metric metric) {
    if (x.dim() != y.dim()) throw std::invalid_argument("distance between points of different dimension");
    Rational acc(0);
    for (int i = 0; i < x.dim(); ++i) {
        const Rational diff = (x[i] - y[i]).abs();
        if (metric == Metric::maxnorm) {
            if (acc < diff) acc = diff;
        } else {
            acc += diff * diff;
        }
    }
    return Distance{metric, acc};
}

Distance max(const Distance& a, const Distance& b) {
    if (a.metric != b.metric) throw std::invalid_argument("comparing distances under different metrics");
    return a.value < b.value ? b : a;
}

bool compare_separation(const Distance& d, const Rational& eps) {
    if (d.metric == Metric::maxnorm) return d.value > eps;
    if (eps.sign() < 0) return true;
    return d.value > eps * eps;
}

}  // namespace mmdim
