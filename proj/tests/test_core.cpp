#include <doctest.h>

#include "mmdim/bowen.hpp"
#include "mmdim/horseshoe.hpp"
#include "oracles.hpp"

#include <memory>
#include <sstream>

using namespace mmdim;
using oracle::pt;
using oracle::q;

TEST_CASE("rational normal form and parsing") {
    const Rational a(6, -8);
    CHECK(a.num() == -3);
    CHECK(a.den() == 4);
    CHECK(a.str() == "-3/4");
    CHECK(Rational(2).str() == "2/1");
    CHECK(Rational::parse("10/4") == q(5, 2));
    CHECK(Rational::parse("-7") == q(-7));
    CHECK(Rational::parse("+3/9") == q(1, 3));
    CHECK_THROWS_AS(Rational::parse("1/0"), std::invalid_argument);
    CHECK_THROWS_AS(Rational::parse("x"), std::invalid_argument);
    CHECK_THROWS_AS(Rational::parse(""), std::invalid_argument);
    CHECK(ipow(BigInt(3), 40) == BigInt("12157665459056928801", 10));
    CHECK(pow(q(2, 3), 3) == q(8, 27));
}

TEST_CASE("rational arithmetic is exact on random values") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 2000; ++i) {
        const Rational a = oracle::random_rational(rng);
        const Rational b = oracle::random_rational(rng);
        CHECK((a + b) - b == a);
        if (!b.is_zero()) CHECK((a * b) / b == a);
        CHECK(a.den() > 0);
        CHECK(gcd(a.num(), a.den()) == 1);
    }
}

TEST_CASE("escaped is absorbing and identity keeps points") {
    const PAMap id = PAMap::identity(Cube(q(0), q(1), 2));
    CHECK(id.apply(MapState::escaped()).is_escaped());
    const MapState s = id.apply(pt({q(1, 3), q(1, 2)}));
    REQUIRE(s.is_inside());
    CHECK(s.point() == pt({q(1, 3), q(1, 2)}));
    const HorseshoeMap h = build_horseshoe(Cube(q(0), q(1), 2), 3);
    CHECK(h.map().apply(MapState::escaped()).is_escaped());
}

TEST_CASE("even strip of the 2D 3-horseshoe escapes") {
    const Cube cube(q(0), q(1), 2);
    const HorseshoeMap h = build_horseshoe(cube, 3);
    std::mt19937_64 rng(5);
    for (int i = 0; i < 300; ++i) {
        const Point x = oracle::random_point(rng, cube);
        const long l = oracle::strip_of(x, cube, 3);
        // interior of an even strip: strictly between its cuts
        const bool interior_even = l % 2 == 0 && x[0] > q(l - 1, 5) && x[0] < q(l, 5);
        if (interior_even) CHECK(h.map().apply(x).is_escaped());
        if (l % 2 == 1) CHECK(h.map().apply(x).is_inside());
    }
    CHECK(h.map().apply(pt({q(3, 10), q(1, 2)})).is_escaped());
}

TEST_CASE("shared piece boundary goes to the lexicographically first piece") {
    const Cube cube(q(0), q(1), 2);
    AffinePiece left{Box({{q(0), q(1, 2)}, {q(0), q(1)}}), {q(1), q(1)}, {q(0), q(0)}, {false, false}};
    AffinePiece right{Box({{q(1, 2), q(1)}, {q(0), q(1)}}), {q(1), q(1)}, {q(1, 10), q(0)}, {false, false}};
    const PAMap m(cube, {right, left});
    REQUIRE(m.locate(pt({q(1, 2), q(1, 3)})).has_value());
    CHECK(m.pieces()[*m.locate(pt({q(1, 2), q(1, 3)}))].domain == left.domain);
    CHECK(m.apply(pt({q(1, 2), q(1, 3)})).point() == pt({q(1, 2), q(1, 3)}));
    CHECK(m.apply(pt({q(3, 4), q(1, 3)})).point() == pt({q(17, 20), q(1, 3)}));
}

TEST_CASE("bowen distance basics") {
    const Cube cube(q(0), q(1), 2);
    const HorseshoeMap h = build_horseshoe(cube, 3);
    const Point x = pt({q(1, 10), q(1, 2)});
    const Point y = pt({q(1, 2), q(1, 2)});
    const BowenDistance d = bowen_distance(h.map(), x, y, 1);
    CHECK(d.distance.value == q(2, 5));
    CHECK_FALSE(d.truncated);
    CHECK(bowen_distance(h.map(), x, x, 4).distance.value == q(0));
    CHECK_THROWS_AS(bowen_distance(h.map(), x, y, 0), std::invalid_argument);
    // the even strip point escapes after one step; only the first iterate counts
    const BowenDistance t = bowen_distance(h.map(), x, pt({q(3, 10), q(1, 2)}), 3);
    CHECK(t.truncated);
    CHECK(t.steps_compared == 1);
    CHECK(t.distance.value == q(1, 5));
}

TEST_CASE("separation comparisons are exact and strict") {
    CHECK(compare_separation(Distance{Metric::maxnorm, q(2, 5)}, q(1, 5)));
    CHECK_FALSE(compare_separation(Distance{Metric::maxnorm, q(1, 5)}, q(1, 5)));
    CHECK(compare_separation(Distance{Metric::euclidean, q(1, 25) + q(1, 25)}, q(1, 5)));
    CHECK_FALSE(compare_separation(Distance{Metric::euclidean, q(1, 25)}, q(1, 5)));
    const Distance e = distance(pt({q(0), q(0)}), pt({q(3), q(4)}), Metric::euclidean);
    CHECK(e.value == q(25));
    CHECK(e.to_double() == doctest::Approx(5.0));
    CHECK(parse_metric("maxnorm") == Metric::maxnorm);
    CHECK_THROWS(parse_metric("taxicab"));
}

TEST_CASE("bowen metric axioms and monotonicity on random pairs") {
    const Cube cube(q(0), q(1), 2);
    const HorseshoeMap h = build_horseshoe(cube, 3);
    const PAMap sq = square(h);
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 1000; ++i) {
        const Point x = oracle::random_point(rng, cube);
        const Point y = oracle::random_point(rng, cube);
        for (const PartialMap* map : {static_cast<const PartialMap*>(&h.map()), static_cast<const PartialMap*>(&sq)}) {
            Rational prev(0);
            for (int m = 1; m <= 3; ++m) {
                const auto dxy = bowen_distance(*map, x, y, m);
                const auto dyx = bowen_distance(*map, y, x, m);
                CHECK(dxy.distance == dyx.distance);
                CHECK(prev <= dxy.distance.value);
                prev = dxy.distance.value;
                if (!dxy.truncated) CHECK((dxy.distance.value.is_zero() == (x == y)));
            }
            CHECK(oracle::maxdist(x, y) == bowen_distance(*map, x, y, 1).distance.value);
        }
    }
}

TEST_CASE("piece preimage and composition") {
    AffinePiece p{Box({{q(0), q(1, 5)}, {q(0), q(1)}}), {q(5), q(1, 5)}, {q(0), q(4, 5)}, {false, false}};
    CHECK(p.image() == Box({{q(0), q(1)}, {q(4, 5), q(1)}}));
    const auto pre = p.preimage(Box({{q(1, 2), q(1)}, {q(0), q(1)}}));
    REQUIRE(pre.has_value());
    CHECK(*pre == Box({{q(1, 10), q(1, 5)}, {q(0), q(1)}}));
    CHECK_FALSE(p.preimage(Box({{q(0), q(1)}, {q(0), q(1, 2)}})).has_value());
    const Point x = pt({q(1, 7), q(2, 9)});
    CHECK(p.apply_inverse(p.apply(x)) == x);

    AffinePiece r{Box({{q(0), q(1)}, {q(0), q(1)}}), {q(1), q(1)}, {q(1), q(0)}, {true, false}};
    CHECK(r.coefficient(0) == q(-1));
    CHECK(r.apply(pt({q(1, 4), q(1, 3)})) == pt({q(3, 4), q(1, 3)}));
    const auto c = compose(p, r);
    REQUIRE(c.has_value());
    CHECK(c->apply(x) == r.apply(p.apply(x)));
}

TEST_CASE("square of a horseshoe agrees with two steps and power maps") {
    const Cube cube(q(0), q(1), 2);
    const HorseshoeMap h = build_horseshoe(cube, 3);
    const PAMap sq = square(h);
    CHECK(sq.pieces().size() == 9);
    auto base = std::make_shared<PAMap>(h.map());
    const PowerMap four(base, 4);
    const PAMap sq2 = compose(sq, sq);
    std::mt19937_64 rng(8);
    int inside = 0;
    for (int i = 0; i < 2000; ++i) {
        const Point x = oracle::random_point(rng, cube, 3125);
        const MapState a = sq.apply(x);
        const MapState b = h.map().apply(h.map().apply(x));
        CHECK(a == b);
        const MapState a4 = sq2.apply(x);
        CHECK(a4 == four.apply(x));
        if (a4.is_inside()) ++inside;
    }
    CHECK(inside > 0);
    const Point corner = pt({q(0), q(1)});
    CHECK(sq.apply(corner).point() == corner);
}

TEST_CASE("maps are injective on piece domains") {
    const Cube cube(q(0), q(1), 3);
    const HorseshoeMap h = build_horseshoe(cube, 3);
    CHECK(h.map().images_disjoint());
    std::mt19937_64 rng(3);
    std::map<Point, Point> seen;
    for (int i = 0; i < 3000; ++i) {
        const Point x = oracle::random_point(rng, cube, 85);
        const MapState s = h.map().apply(x);
        if (!s.is_inside()) continue;
        auto [it, fresh] = seen.emplace(s.point(), x);
        if (!fresh) CHECK(it->second == x);
    }
}

TEST_CASE("orbit stops at the first escape") {
    const HorseshoeMap h = build_horseshoe(Cube(q(0), q(1), 2), 3);
    const auto o = orbit(h.map(), pt({q(1, 2), q(1, 2)}), 5);
    // (1/2, 1/2) is the center of V_3; phi(x) has first coordinate 1/2 again
    REQUIRE(o.size() == 5);
    CHECK(o[1][0] == q(1, 2));
    const auto e = orbit(h.map(), pt({q(3, 10), q(1, 2)}), 5);
    CHECK(e.size() == 1);
}
