#include "mmdim/constructions.hpp"

#include <algorithm>

namespace mmdim {

namespace {

const BigInt kThree(3);

// Rational 3^{k r} when k r is an integer.
std::optional<BigInt> three_pow(long k, const Rational& r) {
    const Rational e = Rational(k) * r;
    if (!e.is_integer() || e.sign() < 0) return std::nullopt;
    return ipow(kThree, e.num().get_ui());
}

bool in_unit_cube(const Point& p) {
    const Rational zero(0), one(1);
    return std::all_of(p.coords.begin(), p.coords.end(), [&](const Rational& x) { return zero <= x && x <= one; });
}

BlockPlacement make_block(long k, const Rational& side, const Rational& slot_lo, const Rational& slot_hi, int n) {
    const Rational tenth = side / Rational(10);
    BlockPlacement b;
    b.k = k;
    b.side = side;
    b.slot_lo = slot_lo;
    b.slot_hi = slot_hi;
    b.cube = Cube(slot_lo + tenth, slot_lo + tenth + side, n);
    b.outer = Cube(slot_lo, slot_lo + side + tenth + tenth, n);
    return b;
}

// Slot geometry along axis 0 for a placed schedule (B already effective).
struct SlotWalker {
    const Schedule& s;
    long k = 1;
    Rational lo{0};

    Rational length() const {
        if (s.law == SizeLaw::geometric) {
            const auto R = s.r.num().get_ui();
            const BigInt base = ipow(kThree, R);
            const Rational C = Rational(base - 1, base);
            return C / Rational(ipow(base, static_cast<unsigned long>(k - 1)));
        }
        return Rational(6, 5) * s.B / Rational(k * k);
    }
    void next() {
        lo += length();
        ++k;
    }
};

}  // namespace

std::string to_string(SizeLaw law) { return law == SizeLaw::geometric ? "geometric" : "quadratic"; }
std::string to_string(ActiveSet set) { return set == ActiveSet::all ? "all" : "self_powers"; }

std::string to_string(BlockStatus s) {
    switch (s) {
        case BlockStatus::identity: return "identity";
        case BlockStatus::horseshoe: return "horseshoe";
        case BlockStatus::symbolic_only: return "symbolic_only";
    }
    return "unknown";
}

Schedule Schedule::geometric(Rational B, Rational r) {
    Schedule s;
    s.law = SizeLaw::geometric;
    s.B = std::move(B);
    s.r = std::move(r);
    return s;
}

Schedule Schedule::quadratic(Rational B) {
    Schedule s;
    s.law = SizeLaw::quadratic;
    s.B = std::move(B);
    s.r = Rational(0);
    return s;
}

Schedule Schedule::sparse() const {
    Schedule s = *this;
    s.active = ActiveSet::self_powers;
    return s;
}

void Schedule::validate() const {
    if (B.sign() <= 0) throw std::invalid_argument("B must be positive");
    if (law == SizeLaw::geometric) {
        if (r.sign() <= 0) throw std::invalid_argument("r must be positive, r in (0, inf)");
        // first cube must fit: B <= 3^r, i.e. u^q <= 3^p v^q for B = u/v, r = p/q
        const auto q = r.den().get_ui();
        const auto p = r.num().get_ui();
        if (ipow(B.num(), q) > ipow(kThree, p) * ipow(B.den(), q))
            throw std::invalid_argument("B too large: the first cube B/3^r exceeds the unit cube");
    } else {
        if (!r.is_zero()) throw std::invalid_argument("r is not allowed for a quadratic schedule");
        if (B > Rational(1)) throw std::invalid_argument("B too large: the first cube B exceeds the unit cube");
    }
    for (long L : legs_override)
        if (L < 3 || L % 2 == 0) throw std::invalid_argument("legScheduleOverride entries must be odd and >= 3");
}

bool Schedule::is_active(long k) const {
    if (k < 1) return false;
    if (active == ActiveSet::all) return true;
    // j^j grows monotonically; stop as soon as it passes k.
    for (long j = 1;; ++j) {
        long v = 1;
        for (long i = 0; i < j; ++i) {
            if (v > k / j) return false;
            v *= j;
        }
        if (v > k) return false;
        if (v == k) return true;
    }
}

BigInt Schedule::legs(long k) const {
    if (k >= 1 && static_cast<std::size_t>(k) <= legs_override.size())
        return BigInt(std::to_string(legs_override[static_cast<std::size_t>(k - 1)]), 10);
    return ipow(kThree, static_cast<unsigned long>(k));
}

LogExpr Schedule::log_legs(long k) const {
    if (k >= 1 && static_cast<std::size_t>(k) <= legs_override.size()) return LogExpr::log_of(legs(k));
    return LogExpr::log_of(kThree) * Rational(k);
}

std::optional<Rational> Schedule::side(long k) const {
    if (law == SizeLaw::quadratic) return B / Rational(k * k);
    const auto p = three_pow(k, r);
    if (!p) return std::nullopt;
    return B / Rational(*p);
}

LogExpr Schedule::log_side(long k) const {
    if (law == SizeLaw::quadratic) return LogExpr::log_of(B) - LogExpr::log_of(BigInt(std::to_string(k), 10)) * Rational(2);
    return LogExpr::log_of(B) - LogExpr::log_of(kThree) * (Rational(k) * r);
}

std::optional<Rational> Schedule::eps(long k) const {
    auto s = side(k);
    if (!s) return std::nullopt;
    return *s / Rational(2 * legs(k) - 1);
}

LogExpr Schedule::log_eps(long k) const { return log_side(k) - LogExpr::log_of(BigInt(2 * legs(k) - 1)); }

bool Schedule::sides_rational() const { return law == SizeLaw::quadratic || r.is_integer(); }

Rational Schedule::dense_target(int n) const {
    if (law == SizeLaw::quadratic) return Rational(n);
    return Rational(n) / (r + Rational(1));
}

Schedule solve_rate(const Rational& alpha, int n) {
    if (n < 2) throw std::invalid_argument("n must be >= 2");
    if (alpha.sign() <= 0) throw std::invalid_argument("alpha must be positive (alpha = 0 is the identity system)");
    if (alpha > Rational(n)) throw std::invalid_argument("alpha must not exceed n");
    if (alpha == Rational(n)) return Schedule::quadratic(Rational(1));
    return Schedule::geometric(Rational(1), Rational(n) / alpha - Rational(1));
}

Placement place_cubes(const Schedule& schedule, int n, long k_max) {
    schedule.validate();
    if (!schedule.sides_rational())
        throw std::domain_error("block sides B/3^{kr} are irrational for non-integral r; geometry unavailable");
    Placement out;
    out.schedule = schedule;
    // Enlarged cubes take 6/5 of the side; they must fit their slot.
    Rational b_max;
    if (schedule.law == SizeLaw::geometric) {
        const BigInt base = ipow(kThree, schedule.r.num().get_ui());
        b_max = Rational(5) * Rational(base - 1) / Rational(6);
    } else {
        // sum 1/k^2 < 2, so sum 6/5 B/k^2 < 12/5 B <= 1
        b_max = Rational(5, 12);
    }
    if (schedule.B > b_max) {
        out.rescale = b_max / schedule.B;
        out.schedule.B = b_max;
    }
    SlotWalker walk{out.schedule};
    for (long k = 1; k <= k_max; ++k) {
        const Rational len = walk.length();
        out.blocks.push_back(make_block(k, *out.schedule.side(k), walk.lo, walk.lo + len, n));
        walk.next();
    }
    return out;
}

StackedSystem::StackedSystem(int n, std::optional<Schedule> schedule, Rational rescale, long k_max, long leg_limit,
                             std::vector<Block> blocks)
    : n_(n),
      schedule_(std::move(schedule)),
      rescale_(std::move(rescale)),
      k_max_(k_max),
      leg_limit_(leg_limit),
      blocks_(std::move(blocks)) {
    if (n_ < 2) throw std::invalid_argument("n must be >= 2");
    for (std::size_t i = 0; i < blocks_.size(); ++i)
        if (blocks_[i].k != static_cast<long>(i) + 1) throw std::invalid_argument("blocks must be numbered 1..kMax");
}

StackedSystem StackedSystem::identity(int n) { return StackedSystem(n, std::nullopt, Rational(1), 0, kDefaultLegLimit, {}); }

const Block& StackedSystem::block(long k) const {
    if (k < 1 || k > static_cast<long>(blocks_.size()))
        throw UnmaterializedBlock("block " + std::to_string(k) + " is beyond kMax = " + std::to_string(k_max_));
    return blocks_[static_cast<std::size_t>(k - 1)];
}

const HorseshoeMap& StackedSystem::horseshoe(long k) const {
    const Block& b = block(k);
    if (!b.horseshoe)
        throw UnmaterializedBlock("block " + std::to_string(k) + " has no explicit geometry (" + to_string(b.status) + ")");
    return *b.horseshoe;
}

MapState StackedSystem::apply(const MapState& s) const {
    if (s.is_escaped() || is_identity()) return s;
    const Point& p = s.point();
    if (!in_unit_cube(p)) return MapState::escaped();
    if (!schedule_->sides_rational()) throw UnmaterializedBlock("system has irrational block sizes; no pointwise map");

    for (const Block& b : blocks_) {
        if (!b.placement || !b.placement->outer.contains(p)) continue;
        const bool in_core = b.placement->cube.contains(p);
        switch (b.status) {
            case BlockStatus::identity: return s;
            case BlockStatus::horseshoe: return in_core ? b.horseshoe->apply(s) : MapState::escaped();
            case BlockStatus::symbolic_only:
                throw UnmaterializedBlock("point lies in block " + std::to_string(b.k) + " which is symbolic-only");
        }
    }

    // Beyond the materialized blocks: walk the remaining slots until the
    // point's slot is found or the point is provably past all of them.
    SlotWalker walk{*schedule_};
    for (const Block& b : blocks_) {
        (void)b;
        walk.next();
    }
    const Rational& x = p[0];
    while (true) {
        if (x < walk.lo) return s;  // in a gap between enlarged cubes
        const Rational len = walk.length();
        if (x <= walk.lo + len) {
            const Rational side = *schedule_->side(walk.k);
            const Rational outer_hi = walk.lo + side * Rational(6, 5);
            const Cube outer(walk.lo, outer_hi, n_);
            if (outer.contains(p) && schedule_->is_active(walk.k))
                throw UnmaterializedBlock("point lies in block " + std::to_string(walk.k) + " beyond kMax");
            return s;
        }
        if (schedule_->law == SizeLaw::geometric) {
            if (x >= Rational(1)) return s;
        } else if (walk.k > 1 && x >= walk.lo + Rational(6, 5) * schedule_->B / Rational(walk.k - 1)) {
            return s;  // tail sum of remaining slots is below 6/5 B/(k-1)
        }
        walk.next();
    }
}

StackedSystem build_stacked(const Schedule& schedule, int n, long k_max, long leg_limit) {
    if (n < 2) throw std::invalid_argument("n must be >= 2");
    if (k_max < 1) throw std::invalid_argument("kMax must be >= 1");
    schedule.validate();

    std::optional<Placement> placement;
    Schedule effective = schedule;
    Rational rescale(1);
    if (schedule.sides_rational()) {
        placement = place_cubes(schedule, n, k_max);
        effective = placement->schedule;
        rescale = placement->rescale;
    }

    std::vector<Block> blocks;
    blocks.reserve(static_cast<std::size_t>(k_max));
    for (long k = 1; k <= k_max; ++k) {
        Block b;
        b.k = k;
        b.legs = effective.legs(k);
        if (placement) b.placement = placement->blocks[static_cast<std::size_t>(k - 1)];
        if (!effective.is_active(k)) {
            b.status = BlockStatus::identity;
        } else if (b.placement && ipow(b.legs, static_cast<unsigned long>(n - 1)) <= BigInt(std::to_string(leg_limit), 10)) {
            b.status = BlockStatus::horseshoe;
            b.horseshoe = build_horseshoe(b.placement->cube, static_cast<int>(b.legs.get_si()));
        } else {
            b.status = BlockStatus::symbolic_only;
        }
        blocks.push_back(std::move(b));
    }
    return StackedSystem(n, effective, rescale, k_max, leg_limit, std::move(blocks));
}

DisjointnessReport check_disjointness(const StackedSystem& system) {
    const Box unit = Cube(Rational(0), Rational(1), system.dim()).box();
    std::vector<const BlockPlacement*> placed;
    for (const auto& b : system.blocks()) {
        if (!b.placement) continue;
        const auto& pl = *b.placement;
        const Box core = pl.cube.box();
        const Box outer = pl.outer.box();
        if (!outer.contains_interior(core.lower_corner()) || !outer.contains_interior(core.upper_corner()))
            return {false, "E_" + std::to_string(b.k) + " is not inside the interior of E'_" + std::to_string(b.k)};
        if (!unit.contains(outer)) return {false, "E'_" + std::to_string(b.k) + " leaves the unit cube"};
        placed.push_back(&pl);
    }
    for (std::size_t i = 0; i < placed.size(); ++i)
        for (std::size_t j = i + 1; j < placed.size(); ++j)
            if (placed[i]->outer.box().interiors_intersect(placed[j]->outer.box()))
                return {false, "E'_" + std::to_string(placed[i]->k) + " and E'_" + std::to_string(placed[j]->k) +
                                   " overlap"};
    return {};
}

TwoBlockSystem::TwoBlockSystem(Rational alpha, Rational beta, StackedSystem lower, StackedSystem upper)
    : alpha_(std::move(alpha)), beta_(std::move(beta)), lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.dim() != upper_.dim()) throw std::invalid_argument("two-block halves differ in dimension");
}

Point TwoBlockSystem::to_lower_chart(const Point& p) {
    Point q = p;
    for (auto& x : q.coords) x *= Rational(2);
    return q;
}

Point TwoBlockSystem::from_lower_chart(const Point& p) {
    Point q = p;
    for (auto& x : q.coords) x /= Rational(2);
    return q;
}

Point TwoBlockSystem::to_upper_chart(const Point& p) {
    Point q = p;
    for (auto& x : q.coords) x = x * Rational(2) - Rational(1);
    return q;
}

Point TwoBlockSystem::from_upper_chart(const Point& p) {
    Point q = p;
    for (auto& x : q.coords) x = (x + Rational(1)) / Rational(2);
    return q;
}

MapState TwoBlockSystem::apply(const MapState& s) const {
    if (s.is_escaped()) return s;
    const Point& p = s.point();
    if (!in_unit_cube(p)) return MapState::escaped();
    const Rational half(1, 2);
    const bool low = std::all_of(p.coords.begin(), p.coords.end(), [&](const Rational& x) { return x <= half; });
    if (low) {
        const MapState r = lower_.apply(MapState::inside(to_lower_chart(p)));
        return r.is_escaped() ? r : MapState::inside(from_lower_chart(r.point()));
    }
    const bool high = std::all_of(p.coords.begin(), p.coords.end(), [&](const Rational& x) { return half <= x; });
    if (high) {
        const MapState r = upper_.apply(MapState::inside(to_upper_chart(p)));
        return r.is_escaped() ? r : MapState::inside(from_upper_chart(r.point()));
    }
    return s;
}

TwoBlockSystem build_two_block(const Rational& alpha, const Rational& beta, int n, long k_max, long leg_limit) {
    if (n < 2) throw std::invalid_argument("n must be >= 2");
    if (alpha.sign() < 0) throw std::invalid_argument("alpha must be >= 0");
    if (beta > Rational(n)) throw std::invalid_argument("beta must not exceed n");
    if (alpha > beta) throw std::invalid_argument("alpha must not exceed beta");

    auto dense = [&](const Rational& a) {
        return a.sign() > 0 ? build_stacked(solve_rate(a, n), n, k_max, leg_limit) : StackedSystem::identity(n);
    };
    if (alpha == beta) return TwoBlockSystem(alpha, beta, dense(alpha), dense(alpha));
    StackedSystem lower = build_stacked(solve_rate(beta, n).sparse(), n, k_max, leg_limit);
    return TwoBlockSystem(alpha, beta, std::move(lower), dense(alpha));
}

std::string system_kind(const System& system) {
    if (std::holds_alternative<TwoBlockSystem>(system)) return "two_block";
    const auto& s = std::get<StackedSystem>(system);
    if (s.is_identity()) return "identity";
    if (s.schedule()->active == ActiveSet::self_powers) return "sparse";
    return to_string(s.schedule()->law);
}

int system_dim(const System& system) {
    return std::visit([](const auto& s) { return s.dim(); }, system);
}

const PartialMap& as_map(const System& system) {
    return std::visit([](const auto& s) -> const PartialMap& { return s; }, system);
}

TargetValues analytic_target(const StackedSystem& system) {
    if (system.is_identity()) return {Rational(0), Rational(0)};
    const Rational t = system.schedule()->dense_target(system.dim());
    if (system.schedule()->active == ActiveSet::self_powers) return {Rational(0), t};
    return {t, t};
}

TargetValues analytic_target(const System& system) {
    if (const auto* s = std::get_if<StackedSystem>(&system)) return analytic_target(*s);
    const auto& tb = std::get<TwoBlockSystem>(system);
    const auto lo = analytic_target(tb.lower());
    const auto up = analytic_target(tb.upper());
    return {max(lo.liminf, up.liminf), max(lo.limsup, up.limsup)};
}

}  // namespace mmdim
