#include <doctest.h>

#include "mmdim/estimators.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace mmdim;
using oracle::pt;
using oracle::q;

namespace {

const StackedSystem& dense_system() {
    static const StackedSystem s = build_stacked(Schedule::geometric(q(1), q(1)), 2, 2);
    return s;
}

// Brute-force separation count by the same greedy rule, no shortcuts.
std::size_t naive_separated(const PartialMap& map, const std::vector<Point>& pts, int m, const Rational& eps) {
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        bool far = true;
        for (std::size_t j : kept)
            if (!compare_separation(bowen_distance(map, pts[i], pts[j], m).distance, eps)) {
                far = false;
                break;
            }
        if (far) kept.push_back(i);
    }
    return kept.size();
}

}  // namespace

TEST_CASE("seed sets are sorted and deduplicated") {
    const SeedSet s = make_seeds({pt({q(1), q(0)}), pt({q(0), q(1)}), pt({q(1), q(0)})}, SeedTag::grid);
    REQUIRE(s.size() == 2);
    CHECK(s[0].point == pt({q(0), q(1)}));
    CHECK(to_string(SeedTag::cylinder_center) == "cylinder-center");
    const SeedSet g = grid_seeds(Cube(q(0), q(1), 2), 4);
    CHECK(g.size() == 16);
    CHECK(g[0].point == pt({q(1, 8), q(1, 8)}));
}

TEST_CASE("729 separated cylinder centers at eps_1 for m = 3") {
    const StackedSystem& s = dense_system();
    const HorseshoeMap& h = s.horseshoe(1);
    const PAMap phi2 = square(h);
    const SeedSet seeds = cylinder_centers(s, 1, 3, BigInt(1000000));
    REQUIRE(seeds.size() == 729);
    const GreedyResult r = greedy_separated(phi2, seeds, 3, *s.schedule()->eps(1));
    CHECK(r.count() == 729);
    CHECK(check_greedy(phi2, seeds, r, true).empty());
    CHECK_THROWS_AS(cylinder_centers(s, 1, 3, BigInt(700)), BudgetExceeded);
    CHECK_THROWS_AS(cylinder_centers(s, 3, 1, BigInt(1000)), UnmaterializedBlock);
}

TEST_CASE("scale above the diameter leaves one point") {
    const HorseshoeMap& h = dense_system().horseshoe(1);
    const PAMap phi2 = square(h);
    const SeedSet seeds = cylinder_centers(h, 2, BigInt(1000));
    for (int m = 1; m <= 3; ++m) {
        CHECK(greedy_separated(phi2, seeds, m, q(2)).count() == 1);
        CHECK(greedy_spanning(phi2, seeds, m, q(2)).count() == 1);
    }
}

TEST_CASE("identity map counts do not depend on m") {
    const IdentityMap id(2);
    const SeedSet seeds = grid_seeds(Cube(q(0), q(1), 2), 12);
    const std::size_t c1 = greedy_separated(id, seeds, 1, q(1, 7)).count();
    CHECK(c1 > 1);
    for (int m = 2; m <= 5; ++m) CHECK(greedy_separated(id, seeds, m, q(1, 7)).count() == c1);
    const GrowthEstimate g = growth_rate(
        id, [&](int) { return seeds; }, q(1, 7), {1, 2, 3, 4});
    CHECK(g.rate == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("greedy matches a brute-force oracle on random seeds") {
    const HorseshoeMap& h = dense_system().horseshoe(1);
    const PAMap phi2 = square(h);
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Point> pts;
        for (int i = 0; i < 60; ++i) pts.push_back(oracle::random_point(rng, h.cube(), 600));
        const SeedSet seeds = make_seeds(pts, SeedTag::user);
        const Rational eps = q(1, 15 + trial);
        for (int m = 1; m <= 3; ++m) {
            const GreedyResult r = greedy_separated(phi2, seeds, m, eps, Metric::maxnorm, 3);
            CHECK(r.count() == naive_separated(phi2, seeds.points(), m, eps));
            CHECK(check_greedy(phi2, seeds, r, true).empty());
            const GreedyResult span = greedy_spanning(phi2, seeds, m, eps, Metric::maxnorm, 3);
            CHECK(span.count() <= r.count());
            CHECK(check_greedy(phi2, seeds, span, false).empty());
        }
    }
}

TEST_CASE("spanning covers every target") {
    const HorseshoeMap& h = dense_system().horseshoe(1);
    const PAMap phi2 = square(h);
    const SeedSet seeds = grid_seeds(h.cube(), 15);
    const Rational eps = q(1, 30);
    const GreedyResult span = greedy_spanning(phi2, seeds, 2, eps);
    REQUIRE(span.witness.size() == seeds.size());
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        const auto d = bowen_distance(phi2, seeds[i].point, seeds[span.witness[i]].point, 2);
        CHECK_FALSE(compare_separation(d.distance, eps));
    }
    CHECK(span.count() <= greedy_separated(phi2, seeds, 2, eps).count());
}

TEST_CASE("results do not depend on the thread count") {
    const HorseshoeMap& h = dense_system().horseshoe(1);
    const PAMap phi2 = square(h);
    const SeedSet seeds = grid_seeds(h.cube(), 23);
    for (int m : {1, 3}) {
        const auto a = greedy_separated(phi2, seeds, m, q(1, 40), Metric::maxnorm, 1);
        const auto b = greedy_separated(phi2, seeds, m, q(1, 40), Metric::maxnorm, 4);
        CHECK(a.chosen == b.chosen);
        CHECK(a.witness == b.witness);
        const auto c = greedy_spanning(phi2, seeds, m, q(1, 40), Metric::maxnorm, 1);
        const auto d = greedy_spanning(phi2, seeds, m, q(1, 40), Metric::maxnorm, 4);
        CHECK(c.chosen == d.chosen);
    }
}

TEST_CASE("counts grow as eps shrinks and m grows") {
    const HorseshoeMap& h = dense_system().horseshoe(1);
    const PAMap phi2 = square(h);
    const SeedSet seeds = grid_seeds(h.cube(), 20);
    std::size_t prev = 0;
    for (long d : {10, 20, 40, 80}) {
        const std::size_t c = greedy_separated(phi2, seeds, 2, q(1, d)).count();
        CHECK(c >= prev);
        prev = c;
    }
    const SeedSet cyl = cylinder_centers(h, 3, BigInt(1000));
    prev = 0;
    for (int m = 1; m <= 3; ++m) {
        const std::size_t c = greedy_separated(phi2, cyl, m, q(1, 15)).count();
        CHECK(c >= prev);
        prev = c;
    }
}

TEST_CASE("growth rates of phi squared and of phi") {
    const HorseshoeMap& h = dense_system().horseshoe(1);
    const PAMap phi2 = square(h);
    const GrowthEstimate sq = growth_rate(
        phi2, [&](int m) { return cylinder_centers(h, m, BigInt(100000)); }, q(1, 15), {1, 2, 3});
    CHECK(sq.counts == std::vector<std::size_t>{9, 81, 729});
    CHECK(std::fabs(sq.rate - 2 * std::log(3.0)) < 1e-6);

    // strips of phi are one strip width apart: all N^m codings separate at that width
    const Rational width = h.grid().strip_width();
    const GrowthEstimate full = growth_rate(
        h.map(), [&](int m) { return full_coding_centers(h, m, BigInt(100000)); }, width, {1, 2, 3, 4});
    CHECK(full.counts == std::vector<std::size_t>{3, 9, 27, 81});
    CHECK(std::fabs(full.rate - std::log(3.0)) < 1e-6);
    CHECK_THROWS_AS(growth_rate(
                        phi2, [&](int m) { return cylinder_centers(h, m, BigInt(100)); }, q(1, 15), {2}),
                    std::invalid_argument);
}

TEST_CASE("numeric profile agrees with the closed form") {
    const System sys(dense_system());
    const auto rows = mdim_numeric_profile(sys, {1}, {1, 2, 3});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].status == NumericStatus::ok);
    CHECK(rows[0].counts == std::vector<std::size_t>{9, 81, 729});
    const auto sym = rate_profile(dense_system(), 1, 1);
    CHECK(std::fabs(rows[0].lower_ratio - sym[0].lower_ratio.to_double()) < 1e-9);
    CHECK(std::fabs(rows[0].ratio_at_scale - sym[0].lower_ratio_at_scale.to_double()) < 1e-9);
    CHECK(rows[0].lower_ratio <= 2.0);

    const auto single = mdim_numeric_profile(sys, {1}, {3});
    CHECK(single[0].rate == doctest::Approx(std::log(729.0) / 3));

    NumericOptions tiny;
    tiny.budget = BigInt(10);
    CHECK(mdim_numeric_profile(sys, {1}, {1, 2}, tiny)[0].status == NumericStatus::budget_exceeded);
    CHECK(mdim_numeric_profile(sys, {5}, {1, 2})[0].status == NumericStatus::unmaterialized);

    NumericOptions big;
    big.eps = q(2);
    const auto one = mdim_numeric_profile(sys, {1}, {1, 2}, big);
    CHECK(one[0].counts == std::vector<std::size_t>{1, 1});
    CHECK(one[0].lower_ratio == 0.0);
}

TEST_CASE("numeric profile of identity and two-block systems") {
    const auto id = mdim_numeric_profile(System(StackedSystem::identity(2)), {1, 2}, {1, 2});
    for (const auto& r : id) CHECK(r.rate == 0.0);

    const TwoBlockSystem tb = build_two_block(q(2, 3), q(1), 2, 1);
    const auto rows = mdim_numeric_profile(System(tb), {1}, {1, 2});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].status == NumericStatus::ok);
    const auto sym = rate_profile(tb, 1, 1);
    CHECK(std::fabs(rows[0].lower_ratio - sym[0].lower_ratio.to_double()) < 1e-9);
}
