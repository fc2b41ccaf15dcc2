#include "doctest.h"

#include <array>
#include <random>

#include "vecseg/error.hpp"
#include "vecseg/geometry/affine.hpp"

using namespace vecseg;

namespace {

using M3 = std::array<std::array<double, 3>, 3>;

M3 to_m3(const AffineTransform2D& t) { return {{{t.a, t.c, t.e}, {t.b, t.d, t.f}, {0, 0, 1}}}; }

M3 mul(const M3& x, const M3& y) {
    M3 r{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) r[i][j] += x[i][k] * y[k][j];
    return r;
}

std::array<double, 2> apply_m3(const M3& m, double x, double y) {
    return {m[0][0] * x + m[0][1] * y + m[0][2], m[1][0] * x + m[1][1] * y + m[1][2]};
}

}  // namespace

TEST_CASE("nested scale outside translate maps (1,1) to (4,2)") {
    const auto outer = AffineTransform2D::scale(2, 2);
    const auto inner = AffineTransform2D::translate(1, 0);
    const M3 oracle = mul(to_m3(outer), to_m3(inner));
    const auto expect = apply_m3(oracle, 1, 1);
    CHECK(expect[0] == 4.0);
    CHECK(expect[1] == 2.0);

    const Vec2 p = (outer * inner).apply({1, 1});
    CHECK(p.x == doctest::Approx(expect[0]).epsilon(1e-15));
    CHECK(p.y == doctest::Approx(expect[1]).epsilon(1e-15));
    CHECK(parse_transform_list("scale(2) translate(1,0)").apply({1, 1}) == Vec2{4, 2});
}

TEST_CASE("composition agrees with the 3x3 product and is associative") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3, 3);
    auto rand_t = [&] { return AffineTransform2D{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)}; };
    for (int trial = 0; trial < 200; ++trial) {
        const auto a = rand_t(), b = rand_t(), c = rand_t();
        const M3 m = mul(to_m3(a), to_m3(b));
        const Vec2 p{u(rng), u(rng)};
        const Vec2 q = (a * b).apply(p);
        const auto o = apply_m3(m, p.x, p.y);
        CHECK(q.x == doctest::Approx(o[0]).epsilon(1e-12));
        CHECK(q.y == doctest::Approx(o[1]).epsilon(1e-12));
        const Vec2 l = ((a * b) * c).apply(p), r = (a * (b * c)).apply(p);
        CHECK(l.x == doctest::Approx(r.x).epsilon(1e-12));
        CHECK(l.y == doctest::Approx(r.y).epsilon(1e-12));
    }
    CHECK(AffineTransform2D::identity().is_identity());
    CHECK((AffineTransform2D::identity() * AffineTransform2D::translate(3, 4)) == AffineTransform2D::translate(3, 4));
}

TEST_CASE("transform list forms") {
    CHECK(parse_transform_list("translate(1,2)").apply({0, 0}) == Vec2{1, 2});
    CHECK(parse_transform_list("translate(5)").apply({0, 0}) == Vec2{5, 0});
    CHECK(parse_transform_list("scale(3)").apply({1, 2}) == Vec2{3, 6});
    CHECK(parse_transform_list("matrix(1 2 3 4 5 6)").apply({1, 1}) == Vec2{9, 12});

    const Vec2 r = parse_transform_list("rotate(90)").apply({1, 0});
    CHECK(r.x == doctest::Approx(0).epsilon(1e-15));
    CHECK(r.y == doctest::Approx(1));
    const Vec2 rc = parse_transform_list("rotate(180, 1, 1)").apply({2, 1});
    CHECK(rc.x == doctest::Approx(0));
    CHECK(rc.y == doctest::Approx(1));

    const Vec2 sk = parse_transform_list("skewX(45)").apply({0, 1});
    CHECK(sk.x == doctest::Approx(1));
    CHECK(sk.y == doctest::Approx(1));
    const Vec2 sy = parse_transform_list("skewY(45)").apply({1, 0});
    CHECK(sy.y == doctest::Approx(1));

    CHECK(parse_transform_list("").is_identity());
    CHECK(parse_transform_list("  translate(1e1,-2.5E-1) ").apply({0, 0}) == Vec2{10, -0.25});
}

TEST_CASE("transform list errors") {
    auto kind_of = [](const char* text) {
        try {
            parse_transform_list(text);
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::Io;
    };
    CHECK(kind_of("perspective(1)") == ErrorKind::UnsupportedTransformKind);
    CHECK(kind_of("translate(1") == ErrorKind::BadFormat);
    CHECK(kind_of("matrix(1 2 3)") == ErrorKind::BadFormat);
    CHECK(kind_of("scale(a)") == ErrorKind::BadFormat);
}
