#include "mmdim/horseshoe.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mmdim {

namespace {

constexpr long kGridStripLimit = 1L << 22;

long checked_power(int base, int exp) {
    long out = 1;
    for (int i = 0; i < exp; ++i) {
        if (out > kGridStripLimit / base) throw std::invalid_argument("horseshoe grid too large to materialize");
        out *= base;
    }
    return out;
}

std::string leg_str(const LegIndex& leg) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < leg.size(); ++i) os << (i ? "," : "") << leg[i];
    os << ')';
    return os.str();
}

}  // namespace

SubdivisionGrid::SubdivisionGrid(Cube cube, int legs) : cube_(std::move(cube)), legs_(legs) {
    if (cube_.dim < 2) throw std::invalid_argument("horseshoe needs dimension n >= 2");
    if (legs_ < 3 || legs_ % 2 == 0) throw std::invalid_argument("legs per axis must be odd and >= 3");
    odd_strips_ = checked_power(legs_, cube_.dim - 1);

    const Rational side = cube_.side();
    const Rational dt = side / Rational(2 * legs_ - 1);
    t_.reserve(static_cast<std::size_t>(2 * legs_));
    for (int i = 0; i < 2 * legs_ - 1; ++i) t_.push_back(cube_.lo + dt * Rational(i));
    t_.push_back(cube_.hi);

    const long strips = 2 * odd_strips_ - 1;
    const Rational ds = side / Rational(strips);
    s_.reserve(static_cast<std::size_t>(strips + 1));
    for (long i = 0; i < strips; ++i) s_.push_back(cube_.lo + ds * Rational(i));
    s_.push_back(cube_.hi);
}

Box SubdivisionGrid::strip_box(long l) const {
    if (l < 1 || l > strip_count()) throw std::out_of_range("strip index out of range");
    std::vector<Interval> axes(static_cast<std::size_t>(dim()), Interval{cube_.lo, cube_.hi});
    axes[0] = Interval{s_[static_cast<std::size_t>(l - 1)], s_[static_cast<std::size_t>(l)]};
    return Box(std::move(axes));
}

bool SubdivisionGrid::valid_leg(const LegIndex& leg) const {
    if (static_cast<int>(leg.size()) != dim() - 1) return false;
    return std::all_of(leg.begin(), leg.end(), [&](int i) { return i >= 1 && i <= 2 * legs_ - 1 && i % 2 == 1; });
}

Box SubdivisionGrid::leg_box(const LegIndex& leg) const {
    if (static_cast<int>(leg.size()) != dim() - 1) throw std::invalid_argument("leg index has wrong arity");
    std::vector<Interval> axes;
    axes.reserve(static_cast<std::size_t>(dim()));
    axes.push_back(Interval{cube_.lo, cube_.hi});
    for (int i : leg) {
        if (i < 1 || i > 2 * legs_ - 1) throw std::out_of_range("leg index out of range");
        axes.push_back(Interval{t_[static_cast<std::size_t>(i - 1)], t_[static_cast<std::size_t>(i)]});
    }
    return Box(std::move(axes));
}

LegIndex SubdivisionGrid::leg_at(long position) const {
    if (position < 0 || position >= odd_strips_) throw std::out_of_range("leg position out of range");
    const int digits = dim() - 1;
    std::vector<int> plain(static_cast<std::size_t>(digits));
    long rest = position;
    for (int j = digits - 1; j >= 0; --j) {
        plain[static_cast<std::size_t>(j)] = static_cast<int>(rest % legs_);
        rest /= legs_;
    }
    // Snake order: a digit runs backwards whenever the number formed by the
    // more significant digits is odd (L odd, so parity of the digit sum).
    LegIndex leg(static_cast<std::size_t>(digits));
    int prefix_sum = 0;
    for (int j = 0; j < digits; ++j) {
        const int d = plain[static_cast<std::size_t>(j)];
        int q = (prefix_sum % 2 == 0) ? d : legs_ - 1 - d;
        if (j == digits - 1) q = legs_ - 1 - q;
        leg[static_cast<std::size_t>(j)] = 2 * q + 1;
        prefix_sum += d;
    }
    return leg;
}

std::vector<LegIndex> SubdivisionGrid::all_legs() const {
    std::vector<LegIndex> out;
    out.reserve(static_cast<std::size_t>(odd_strips_));
    for (long p = 0; p < odd_strips_; ++p) {
        LegIndex leg(static_cast<std::size_t>(dim() - 1));
        long rest = p;
        for (int j = dim() - 2; j >= 0; --j) {
            leg[static_cast<std::size_t>(j)] = 2 * static_cast<int>(rest % legs_) + 1;
            rest /= legs_;
        }
        out.push_back(std::move(leg));
    }
    return out;
}

Point SubdivisionGrid::corner_low() const {
    std::vector<Rational> c(static_cast<std::size_t>(dim()), cube_.lo);
    c.back() = cube_.hi;
    return Point(std::move(c));
}

Point SubdivisionGrid::corner_high() const {
    std::vector<Rational> c(static_cast<std::size_t>(dim()), cube_.hi);
    c.back() = cube_.lo;
    return Point(std::move(c));
}

SubdivisionGrid subdivide(const Cube& cube, int legs) { return SubdivisionGrid(cube, legs); }

HorseshoeMap::HorseshoeMap(SubdivisionGrid grid, std::vector<LegIndex> assignment, PAMap map)
    : grid_(std::move(grid)), assignment_(std::move(assignment)), map_(std::move(map)) {}

HorseshoeMap build_horseshoe(const Cube& cube, int legs) {
    SubdivisionGrid grid(cube, legs);
    const int n = cube.dim;
    const long N = grid.odd_strips();
    const Rational stretch(2 * N - 1);
    const Rational shrink = Rational(1) / Rational(2 * legs - 1);

    std::vector<LegIndex> assignment;
    std::vector<AffinePiece> pieces;
    assignment.reserve(static_cast<std::size_t>(N));
    pieces.reserve(static_cast<std::size_t>(N));
    for (long p = 0; p < N; ++p) {
        const long l = 2 * p + 1;
        LegIndex leg = grid.leg_at(p);
        AffinePiece piece;
        piece.domain = grid.strip_box(l);
        piece.reflect.assign(static_cast<std::size_t>(n), false);
        piece.scale.push_back(stretch);
        piece.offset.push_back(cube.lo - stretch * grid.s()[static_cast<std::size_t>(l - 1)]);
        for (int j = 1; j < n; ++j) {
            const Rational& leg_lo = grid.t()[static_cast<std::size_t>(leg[static_cast<std::size_t>(j - 1)] - 1)];
            piece.scale.push_back(shrink);
            piece.offset.push_back(leg_lo - shrink * cube.lo);
        }
        pieces.push_back(std::move(piece));
        assignment.push_back(std::move(leg));
    }
    PAMap map(cube, std::move(pieces));
    return HorseshoeMap(std::move(grid), std::move(assignment), std::move(map));
}

bool ValidationReport::ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const ValidationCheck& c) { return c.passed; });
}

const ValidationCheck* ValidationReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

bool ValidationReport::passed(const std::string& name) const {
    const auto* c = find(name);
    return c != nullptr && c->passed;
}

ValidationReport validate_horseshoe(const HorseshoeMap& h) {
    const auto& grid = h.grid();
    const auto& map = h.map();
    const long N = grid.odd_strips();
    ValidationReport report;

    for (const auto& [name, corner] : {std::pair{"corner_low_fixed", grid.corner_low()},
                                        std::pair{"corner_high_fixed", grid.corner_high()}}) {
        const MapState img = map.apply(corner);
        const bool ok = img.is_inside() && img.point() == corner;
        report.checks.push_back({name, ok, ok ? "" : to_string(corner) + " is not fixed"});
    }

    // Pieces whose domain is exactly an odd strip.
    std::vector<std::vector<const AffinePiece*>> on_strip(static_cast<std::size_t>(N));
    std::vector<Box> odd_boxes;
    odd_boxes.reserve(static_cast<std::size_t>(N));
    for (long p = 0; p < N; ++p) odd_boxes.push_back(grid.strip_box(2 * p + 1));
    for (const auto& piece : map.pieces()) {
        // Odd strips are sorted along axis 0; find by lower edge.
        auto it = std::lower_bound(odd_boxes.begin(), odd_boxes.end(), piece.domain.axis(0).lo,
                                   [](const Box& b, const Rational& x) { return b.axis(0).lo < x; });
        if (it != odd_boxes.end() && *it == piece.domain)
            on_strip[static_cast<std::size_t>(it - odd_boxes.begin())].push_back(&piece);
    }
    {
        std::string detail;
        for (long p = 0; p < N && detail.empty(); ++p) {
            const auto c = on_strip[static_cast<std::size_t>(p)].size();
            if (c != 1) detail = "odd strip V_" + std::to_string(2 * p + 1) + " has " + std::to_string(c) + " pieces";
        }
        report.checks.push_back({"strip_domains", detail.empty(), detail});
    }

    {
        std::string detail;
        if (static_cast<long>(h.assignment().size()) != N) detail = "assignment size differs from strip count";
        for (long p = 0; p < N && detail.empty(); ++p) {
            const auto& pieces = on_strip[static_cast<std::size_t>(p)];
            if (pieces.size() != 1) continue;  // reported by strip_domains
            const auto& leg = h.assignment()[static_cast<std::size_t>(p)];
            if (!grid.valid_leg(leg)) {
                detail = "strip V_" + std::to_string(2 * p + 1) + " assigned invalid leg " + leg_str(leg);
            } else if (!(pieces.front()->image() == grid.leg_box(leg))) {
                detail = "image of V_" + std::to_string(2 * p + 1) + " is " + to_string(pieces.front()->image()) +
                         ", expected leg " + leg_str(leg);
            }
        }
        report.checks.push_back({"images_equal_legs", detail.empty(), detail});
    }

    {
        std::string detail;
        std::set<LegIndex> seen;
        for (const auto& leg : h.assignment()) {
            if (!grid.valid_leg(leg)) {
                detail = "invalid leg " + leg_str(leg);
                break;
            }
            if (!seen.insert(leg).second) {
                detail = "leg " + leg_str(leg) + " assigned twice";
                break;
            }
        }
        if (detail.empty() && static_cast<long>(seen.size()) != N)
            detail = std::to_string(seen.size()) + " legs covered, expected " + std::to_string(N);
        report.checks.push_back({"assignment_bijection", detail.empty(), detail});
    }

    {
        std::string detail;
        for (long p = 1; p < N && detail.empty(); ++p) {
            const Box even = grid.strip_box(2 * p);
            for (const auto& piece : map.pieces()) {
                if (piece.domain.interiors_intersect(even)) {
                    detail = "a piece is defined on even strip V_" + std::to_string(2 * p);
                    break;
                }
            }
            if (detail.empty() && map.apply(even.center()).is_inside())
                detail = "center of even strip V_" + std::to_string(2 * p) + " does not escape";
        }
        report.checks.push_back({"even_strips_escape", detail.empty(), detail});
    }
    return report;
}

PAMap square(const HorseshoeMap& h) { return compose(h.map(), h.map()); }

}  // namespace mmdim
