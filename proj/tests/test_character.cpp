#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "imchar/character.hpp"

using namespace imchar;

namespace {

using DChar = ImaginaryCharacter<double>;
using RChar = ImaginaryCharacter<Rat>;

RChar rchar(long x, long y, long z) { return {Rat(x), Rat(y), Rat(z)}; }

std::mt19937_64 rng(20240817);

DChar random_char(double lo = -5.0, double hi = 5.0) {
    std::uniform_real_distribution<double> d(lo, hi);
    return {d(rng), d(rng), d(rng)};
}

Rat rq(long n, long d) {
    Rat r(n, d);
    r.canonicalize();
    return r;
}

RChar random_rat_char() {
    std::uniform_int_distribution<long> num(-9, 9);
    std::uniform_int_distribution<long> den(1, 4);
    return {rq(num(rng), den(rng)), rq(num(rng), den(rng)), rq(num(rng), den(rng))};
}

Generator random_generator() {
    std::uniform_int_distribution<int> d(0, 6);
    return kAllGenerators[static_cast<std::size_t>(d(rng))];
}

}  // namespace

TEST_CASE("kappa on pinned points") {
    CHECK(kappa(rchar(0, 0, 0)) == Rat(-2));
    CHECK(kappa(rchar(1, 1, 3)) == Rat(8));
    CHECK(kappa(rchar(2, 2, -2)) == Rat(-14));
    CHECK(kappa(DChar{1, 1, 3}) == doctest::Approx(8.0));
}

TEST_CASE("apply matches the generator table") {
    RChar c = rchar(1, 1, 3);
    CHECK(apply(c, Generator::V3) == rchar(1, 1, -4));
    CHECK(apply(c, Generator::V1) == rchar(2, 1, 3));
    CHECK(apply(c, Generator::S2) == rchar(-1, 1, -3));
    CHECK(apply(c, Generator::P12) == rchar(1, 1, 3));
    CHECK(apply(rchar(2, 1, 3), Generator::P12) == rchar(1, 2, 3));
}

TEST_CASE("every generator is an involution and preserves kappa (exact)") {
    for (int i = 0; i < 500; ++i) {
        RChar c = random_rat_char();
        Rat k = kappa(c);
        for (Generator g : kAllGenerators) {
            RChar im = apply(c, g);
            CHECK(kappa(im) == k);
            CHECK(apply(im, g) == c);
        }
    }
}

// Float drift in kappa is bounded by the conditioning of the cubic at the
// orbit's coordinate scale M: |dk| <~ steps * eps * M^3.  The 1e-9 budget
// leaves ~1e7 ulps of headroom.
TEST_CASE("kappa preserved to scale-relative tolerance in float mode") {
    int checked = 0;
    for (int i = 0; i < 2000; ++i) {
        DChar c = random_char();
        double k = kappa(c);
        MoveWord w;
        for (int j = 0; j < 16; ++j) w.push_back(random_generator());
        double scale = std::max({1.0, std::fabs(c.x), std::fabs(c.y), std::fabs(c.z)});
        DChar cur = c;
        for (Generator g : w) {
            cur = apply(cur, g);
            scale = std::max({scale, std::fabs(cur.x), std::fabs(cur.y), std::fabs(cur.z)});
        }
        if (scale > 1e80) continue;  // orbit left the trustworthy double range
        double k2 = kappa(cur);
        CHECK(std::fabs(k2 - k) <= 1e-9 * scale * scale * scale);
        ++checked;
    }
    CHECK(checked > 1000);
}

TEST_CASE("edge relations") {
    for (int i = 0; i < 200; ++i) {
        RChar c = random_rat_char();
        CHECK(apply(c, Generator::V3).z + c.z == -c.x * c.y);
        CHECK(apply(c, Generator::V1).x + c.x == c.y * c.z);
        CHECK(apply(c, Generator::V2).y + c.y == c.x * c.z);
    }
}

TEST_CASE("apply_word composes left to right") {
    RChar c = rchar(1, 1, 3);
    CHECK(apply_word(c, {}) == c);
    CHECK(apply_word(c, {Generator::V3, Generator::V3}) == c);
    CHECK(apply_word(c, {Generator::V1, Generator::V3}) == rchar(2, 1, -5));
}

TEST_CASE("word reduction flag and serialization") {
    CHECK(word_is_reduced(parse_word("13")));
    CHECK(word_is_reduced(parse_word("1a1")));  // sign-change separates the pair
    CHECK(!word_is_reduced(parse_word("11")));
    CHECK(format_word(parse_word("123abcp")) == "123abcp");
    CHECK_THROWS_AS(parse_word("1x"), std::invalid_argument);
}

TEST_CASE("boundary traces of the two-holed cross-surface") {
    auto [z1, z1p] = boundary_traces_c02(rchar(3, 3, -2));
    CHECK(z1 == Rat(-2));
    CHECK(z1p == Rat(-7));
    auto [z2, z2p] = boundary_traces_c02(rchar(1, 1, 3));
    CHECK(z2 == Rat(3));
    CHECK(z2p == Rat(-4));
    auto [z3, z3p] = boundary_traces_c02(rchar(0, 0, 5));
    CHECK(z3 == Rat(5));
    CHECK(z3p == Rat(-5));
}

TEST_CASE("boundary trace of the one-holed Klein bottle") {
    CHECK(boundary_trace_c11(rchar(1, 1, 3)) == Rat(1));
    CHECK(boundary_trace_c11(rchar(2, 2, 4)) == Rat(-6));
    CHECK(boundary_trace_c11(rchar(0, 0, 7)) == Rat(2));
    // identity delta = z^2 - kappa, exact and float
    for (int i = 0; i < 200; ++i) {
        RChar c = random_rat_char();
        CHECK(boundary_trace_c11(c) == c.z * c.z - kappa(c));
    }
    for (int i = 0; i < 10000; ++i) {
        DChar c = random_char();
        double lhs = boundary_trace_c11(c), rhs = c.z * c.z - kappa(c);
        CHECK(std::fabs(lhs - rhs) <= 1e-12 * std::max({1.0, std::fabs(lhs), std::fabs(rhs)}));
    }
}

TEST_CASE("Fricke membership for the two-holed cross-surface") {
    CHECK(in_fricke_c02(rchar(3, 3, -2)));
    CHECK(!in_fricke_c02(rchar(1, 1, -3)));
    CHECK(in_fricke_c02(rchar(2, 2, -2)));
    CHECK(kappa(rchar(2, 2, -2)) == Rat(-14));
}

TEST_CASE("members of Fricke(C02) have kappa <= -14, equality pinned") {
    std::uniform_real_distribution<double> zd(-8.0, -2.0), xd(0.1, 6.0);
    int hits = 0;
    while (hits < 2000) {
        double z = zd(rng), x = xd(rng), y = xd(rng);
        if (std::uniform_int_distribution<int>(0, 1)(rng)) {
            x = -x;
            y = -y;
        }
        DChar c{x, y, z};
        if (!in_fricke_c02(c)) continue;
        ++hits;
        double k = kappa(c);
        CHECK(k <= -14.0 + 1e-9);
        if (std::fabs(k + 14.0) < 1e-9) {
            CHECK(std::fabs(std::fabs(c.x) - 2) < 1e-4);
            CHECK(std::fabs(std::fabs(c.y) - 2) < 1e-4);
            CHECK(std::fabs(c.z + 2) < 1e-4);
        }
    }
}

TEST_CASE("generalized Fricke membership for the one-holed Klein bottle") {
    auto cone = in_generalized_fricke_c11(DChar{1, 1, 3});
    REQUIRE(cone.has_value());
    CHECK(cone->kind == BoundaryCase::Cone);
    CHECK(cone->delta == doctest::Approx(1.0));
    CHECK(cone->value == doctest::Approx(4.0 * M_PI / 3.0));

    auto geo = in_generalized_fricke_c11(DChar{2, 2, 4});
    REQUIRE(geo.has_value());
    CHECK(geo->kind == BoundaryCase::Geodesic);
    CHECK(geo->delta == doctest::Approx(-6.0));
    CHECK(geo->value == doctest::Approx(2.0 * std::acosh(3.0)));

    CHECK(!in_generalized_fricke_c11(DChar{1, 1, -3}).has_value());
    // delta = 2 boundary (q_z = 0) is a non-member under the strict form
    CHECK(!in_generalized_fricke_c11(rchar(2, 2, 2)).has_value());

    // exact mode: membership decided exactly, transcendental value in double
    auto rg = in_generalized_fricke_c11(rchar(2, 2, 4));
    REQUIRE(rg.has_value());
    CHECK(rg->kind == BoundaryCase::Geodesic);
    CHECK(rg->delta == -6.0);
    // cusp at delta = -2 exactly
    auto rc = in_generalized_fricke_c11(rchar(2, 2, 3));
    REQUIRE(rc.has_value());
    CHECK(rc->kind == BoundaryCase::Cusp);
}

TEST_CASE("exceptional kinds") {
    CHECK(exceptional_kind(rchar(0, 0, 3)) == ExceptionalKind::Dihedral);
    CHECK(exceptional_kind(rchar(0, 2, 3)) == ExceptionalKind::CoordinateZero);
    CHECK(exceptional_kind(rchar(2, 0, 3)) == ExceptionalKind::CoordinateZero);
    CHECK(!exceptional_kind(rchar(1, 1, 3)).has_value());
    CHECK(exceptional_kind(rchar(1, 1, 2)) == ExceptionalKind::Reducible);  // kappa = 2
    CHECK(exceptional_kind(rchar(0, 0, 2)) == ExceptionalKind::Dihedral);   // dihedral wins
}

TEST_CASE("nielsen twist") {
    CHECK(nielsen_twist(rchar(1, 1, 0)) == rchar(-1, 1, 0));
    CHECK(nielsen_twist(rchar(1, 1, 3)) == rchar(2, 1, 3));
    CHECK(nielsen_twist(rchar(0, 0, 5)) == rchar(0, 0, 5));
    for (int i = 0; i < 200; ++i) {
        RChar c = random_rat_char();
        RChar t = nielsen_twist(c);
        CHECK(t.z == c.z);
        CHECK(kappa(t) == kappa(c));
    }
}

TEST_CASE("the line x = y = 0 is preserved by the whole group") {
    RChar d = rchar(0, 0, 7);
    CHECK(apply(d, Generator::V1) == d);
    CHECK(apply(d, Generator::V2) == d);
    CHECK(apply(d, Generator::S3) == d);
    for (Generator g : kAllGenerators) {
        RChar im = apply(d, g);
        CHECK(sgn(im.x) == 0);
        CHECK(sgn(im.y) == 0);
    }
}

TEST_CASE("deep orbits: exact arithmetic survives where doubles overflow") {
    // alternating Vieta moves grow coordinates doubly exponentially
    RChar seed = rchar(3, 4, 5);
    Rat k = kappa(seed);
    CHECK(k == Rat(58));

    // cycling all three Vieta moves compounds products: bit lengths grow
    // like a Fibonacci sequence (alternating just two circles one region
    // and only grows exponentially)
    MoveWord grow, shrink;
    for (int i = 0; i < 8; ++i)
        for (Generator g : {Generator::V1, Generator::V2, Generator::V3}) grow.push_back(g);
    for (int i = 0; i < 8; ++i)
        for (Generator g : {Generator::V3, Generator::V2, Generator::V1}) shrink.push_back(g);

    RChar far = apply_word(seed, grow);
    CHECK(kappa(far) == k);                       // invariant exactly, at ~10^4 digits
    CHECK(mpz_sizeinbase(far.x.get_num().get_mpz_t(), 2) > 5000);
    CHECK(apply_word(far, shrink) == seed);       // the reverse word recovers the seed

    // the same word in floats leaves the representable range
    DChar fseed{3, 4, 5};
    DChar ffar = apply_word(fseed, grow);
    CHECK(!std::isfinite(ffar.x));
}

TEST_CASE("rational literal parsing") {
    CHECK(parse_rational("3") == Rat(3));
    CHECK(parse_rational("-7/2") == rq(-7, 2));
    CHECK(parse_rational("1.25") == rq(5, 4));
    CHECK_THROWS_AS(parse_rational("sqrt10"), std::invalid_argument);
    CHECK_THROWS_AS(parse_rational("1e-3"), std::invalid_argument);
    CHECK_THROWS_AS(parse_rational(""), std::invalid_argument);
}
