#include <doctest.h>

#include "mmdim/bowen.hpp"
#include "mmdim/constructions.hpp"
#include "oracles.hpp"

using namespace mmdim;
using oracle::pt;
using oracle::q;

TEST_CASE("schedule sizes and eps") {
    const Schedule g = Schedule::geometric(q(1), q(1));
    CHECK(*g.side(1) == q(1, 3));
    CHECK(*g.side(2) == q(1, 9));
    CHECK(*g.eps(1) == q(1, 15));
    CHECK(*g.eps(2) == q(1, 153));
    CHECK(g.legs(3) == 27);
    const Schedule quad = Schedule::quadratic(q(1));
    CHECK(*quad.side(2) == q(1, 4));
    CHECK(*quad.eps(2) == q(1, 4 * 17));
    const Schedule half = Schedule::geometric(q(1), q(1, 2));
    CHECK_FALSE(half.side(1).has_value());
    CHECK(half.side(2) == std::optional<Rational>(q(1, 3)));
    CHECK(half.log_side(1).evaluate(30).to_double() == doctest::Approx(-0.5 * std::log(3.0)));
}

TEST_CASE("schedule validation names the problem") {
    auto message = [](const Schedule& s) {
        try {
            s.validate();
        } catch (const std::invalid_argument& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message(Schedule::geometric(q(1), q(0))).find("r must be positive") != std::string::npos);
    CHECK(message(Schedule::geometric(q(0), q(1))).find("B must be positive") != std::string::npos);
    CHECK(message(Schedule::geometric(q(4), q(1))).find("B too large") != std::string::npos);
    Schedule bad_r = Schedule::quadratic(q(1));
    bad_r.r = q(1);
    CHECK(message(bad_r).find("quadratic") != std::string::npos);
    Schedule legs = Schedule::geometric(q(1), q(1));
    legs.legs_override = {3, 4};
    CHECK(message(legs).find("legScheduleOverride") != std::string::npos);
    CHECK(message(Schedule::geometric(q(1), q(1))).empty());
}

TEST_CASE("self-power active set") {
    const Schedule s = Schedule::geometric(q(1), q(1)).sparse();
    std::vector<long> active;
    for (long k = 1; k <= 3200; ++k)
        if (s.is_active(k)) active.push_back(k);
    CHECK(active == std::vector<long>{1, 4, 27, 256, 3125});
    CHECK(s.is_active(823543));
    CHECK_FALSE(s.is_active(823542));
}

TEST_CASE("solve_rate inverts n/(r+1)") {
    CHECK(solve_rate(q(1), 2).r == q(1));
    CHECK(solve_rate(q(1), 2).law == SizeLaw::geometric);
    CHECK(solve_rate(q(2), 2).law == SizeLaw::quadratic);
    CHECK(solve_rate(q(1), 3).r == q(2));
    CHECK(solve_rate(q(2, 3), 2).r == q(2));
    CHECK(solve_rate(q(2, 3), 2).dense_target(2) == q(2, 3));
    CHECK_THROWS_AS(solve_rate(q(0), 2), std::invalid_argument);
    CHECK_THROWS_AS(solve_rate(q(3), 2), std::invalid_argument);
}

TEST_CASE("geometric slots follow the a_k sums") {
    const Placement p = place_cubes(Schedule::geometric(q(1), q(1)), 2, 20);
    CHECK(p.rescale == q(1));
    CHECK(p.blocks[0].slot_hi == q(2, 3));
    CHECK(p.blocks[1].slot_hi == q(8, 9));
    CHECK(p.blocks[0].side == q(1, 3));
    // exact partial sums of C/3^{ir}
    Rational a(0);
    Rational sides(0);
    for (long k = 1; k <= 20; ++k) {
        a += q(2, 3) / pow(q(3), static_cast<unsigned long>(k - 1));
        sides += *Schedule::geometric(q(1), q(1)).side(k);
        CHECK(p.blocks[static_cast<std::size_t>(k - 1)].slot_hi == a);
    }
    CHECK(a == q(1) - pow(q(1, 3), 20));
    CHECK(sides < q(1, 2));
}

TEST_CASE("placement rescales oversized B") {
    const Placement quad = place_cubes(Schedule::quadratic(q(1)), 2, 5);
    CHECK(quad.schedule.B == q(5, 12));
    CHECK(quad.rescale == q(5, 12));
    const Placement geo = place_cubes(Schedule::geometric(q(3), q(1)), 2, 5);
    CHECK(geo.schedule.B == q(5, 3));
    CHECK_THROWS_AS(place_cubes(Schedule::geometric(q(1), q(1, 2)), 2, 3), std::domain_error);
}

TEST_CASE("stacked builds satisfy disjointness and validate") {
    struct Case {
        Schedule s;
        int n;
        long k_max;
    };
    const std::vector<Case> cases{{Schedule::geometric(q(1), q(1)), 2, 6},
                                  {Schedule::geometric(q(1), q(2)), 3, 3},
                                  {Schedule::geometric(q(3), q(1)), 2, 4},
                                  {Schedule::quadratic(q(1)), 2, 12},
                                  {Schedule::quadratic(q(1, 10)), 3, 4},
                                  {Schedule::geometric(q(1), q(1)).sparse(), 2, 10}};
    for (const auto& c : cases) {
        const StackedSystem s = build_stacked(c.s, c.n, c.k_max);
        const DisjointnessReport d = check_disjointness(s);
        CHECK_MESSAGE(d.ok, d.detail);
        for (const auto& b : s.blocks()) {
            if (b.horseshoe) CHECK(validate_horseshoe(*b.horseshoe).ok());
            if (b.status == BlockStatus::horseshoe) CHECK(b.legs == ipow(BigInt(3), static_cast<unsigned long>(b.k)));
        }
    }
}

TEST_CASE("build examples") {
    const StackedSystem one = build_stacked(Schedule::geometric(q(1), q(1)), 2, 1);
    REQUIRE(one.blocks().size() == 1);
    CHECK(one.horseshoe(1).cube().side() == q(1, 3));
    CHECK(one.horseshoe(1).grid().leg_count() == 3);

    const StackedSystem sparse = build_stacked(Schedule::geometric(q(1), q(1)).sparse(), 2, 10);
    for (const auto& b : sparse.blocks()) {
        const bool active = b.k == 1 || b.k == 4;
        CHECK((b.status == BlockStatus::identity) == !active);
    }
    // k = 4 has 81 legs, within the default limit of 729
    CHECK(sparse.block(4).status == BlockStatus::horseshoe);

    const StackedSystem limited = build_stacked(Schedule::geometric(q(1), q(1)), 3, 4, 100);
    CHECK(limited.block(2).status == BlockStatus::horseshoe);
    CHECK(limited.block(3).status == BlockStatus::symbolic_only);
    CHECK_THROWS_AS(limited.horseshoe(3), UnmaterializedBlock);
    CHECK_THROWS_AS(limited.horseshoe(5), UnmaterializedBlock);

    const StackedSystem irrational = build_stacked(Schedule::geometric(q(1), q(1, 2)), 2, 3);
    for (const auto& b : irrational.blocks()) CHECK(b.status == BlockStatus::symbolic_only);
}

TEST_CASE("stacked map: identity outside, horseshoe inside, escape in the margin") {
    const StackedSystem s = build_stacked(Schedule::geometric(q(1), q(1)), 2, 3);
    const HorseshoeMap& h1 = s.horseshoe(1);
    std::mt19937_64 rng(17);
    for (int i = 0; i < 500; ++i) {
        const Point x = oracle::random_point(rng, h1.cube());
        CHECK(s.apply(x) == h1.apply(MapState::inside(x)));
    }
    const auto& pl = *s.block(1).placement;
    const Point margin = pt({pl.outer.lo + pl.side / q(20), pl.outer.lo + pl.side / q(20)});
    CHECK(s.apply(margin).is_escaped());
    const Point outside = pt({q(1, 100), q(99, 100)});
    CHECK(s.apply(outside).point() == outside);
    CHECK(s.apply(pt({q(2), q(0)})).is_escaped());
    // a point in block 5's enlarged cube: beyond kMax
    const Schedule& sch = *s.schedule();
    Rational lo(0);
    for (long k = 1; k < 5; ++k) lo += q(2, 3) / pow(q(3), static_cast<unsigned long>(k - 1));
    const Rational mid = lo + *sch.side(5) / q(2);
    CHECK_THROWS_AS(s.apply(pt({mid, mid})), UnmaterializedBlock);
    // in the gap just after block 5's enlarged cube
    const Rational gap = lo + *sch.side(5) * q(6, 5) + *sch.side(5) / q(100);
    CHECK(s.apply(pt({gap, gap})).point() == pt({gap, gap}));
}

TEST_CASE("two-block charts conjugate the halves") {
    const TwoBlockSystem tb = build_two_block(q(2, 3), q(1), 2, 3);
    CHECK(tb.lower().schedule()->active == ActiveSet::self_powers);
    CHECK(tb.lower().schedule()->r == q(1));
    CHECK(tb.upper().schedule()->active == ActiveSet::all);
    CHECK(tb.upper().schedule()->r == q(2));
    CHECK(TwoBlockSystem::to_lower_chart(pt({q(1, 4), q(1, 2)})) == pt({q(1, 2), q(1)}));
    CHECK(TwoBlockSystem::to_upper_chart(pt({q(3, 4), q(1)})) == pt({q(1, 2), q(1)}));

    std::mt19937_64 rng(99);
    const HorseshoeMap& inner_lo = tb.lower().horseshoe(1);
    const HorseshoeMap& inner_up = tb.upper().horseshoe(1);
    for (int i = 0; i < 300; ++i) {
        for (int half = 0; half < 2; ++half) {
            const StackedSystem& inner = half == 0 ? tb.lower() : tb.upper();
            const Point y = oracle::random_point(rng, (half == 0 ? inner_lo : inner_up).cube());
            const Point x = half == 0 ? TwoBlockSystem::from_lower_chart(y) : TwoBlockSystem::from_upper_chart(y);
            const auto outer_orbit = orbit(tb, x, 4);
            const auto inner_orbit = orbit(inner, y, 4);
            REQUIRE(outer_orbit.size() == inner_orbit.size());
            for (std::size_t t = 0; t < inner_orbit.size(); ++t) {
                const Point back = half == 0 ? TwoBlockSystem::from_lower_chart(inner_orbit[t])
                                             : TwoBlockSystem::from_upper_chart(inner_orbit[t]);
                CHECK(outer_orbit[t] == back);
            }
        }
    }
    // mixed point: identity
    const Point mixed = pt({q(1, 4), q(3, 4)});
    CHECK(tb.apply(mixed).point() == mixed);

    const TwoBlockSystem same = build_two_block(q(1), q(1), 2, 2);
    CHECK(*same.lower().schedule() == *same.upper().schedule());
    const TwoBlockSystem zero = build_two_block(q(0), q(1), 2, 2);
    CHECK(zero.upper().is_identity());
    CHECK_THROWS_AS(build_two_block(q(1), q(1, 2), 2, 2), std::invalid_argument);
}

TEST_CASE("analytic targets") {
    CHECK(analytic_target(System(build_stacked(Schedule::geometric(q(1), q(1)), 2, 1))).liminf == q(1));
    CHECK(analytic_target(System(build_stacked(Schedule::quadratic(q(1)), 3, 1))).limsup == q(3));
    const auto sparse = analytic_target(System(build_stacked(Schedule::geometric(q(1), q(1)).sparse(), 2, 1)));
    CHECK(sparse.liminf == q(0));
    CHECK(sparse.limsup == q(1));
    const auto tb = analytic_target(System(build_two_block(q(2, 3), q(1), 2, 1)));
    CHECK(tb.liminf == q(2, 3));
    CHECK(tb.limsup == q(1));
    CHECK(analytic_target(System(StackedSystem::identity(2))).limsup == q(0));
    CHECK(system_kind(System(StackedSystem::identity(3))) == "identity");
}
