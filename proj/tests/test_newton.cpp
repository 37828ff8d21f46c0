#include <doctest.h>

#include "frob/error.hpp"
#include "frob/newton.hpp"

#include <random>

using namespace frob;

namespace {
NewtonPolyhedron hull_of(const std::string& text, int n) {
    return newton_polyhedron(parse_laurent(text, n));
}
} // namespace

TEST_CASE("segment hull and facet forms") {
    NewtonPolyhedron P = hull_of("u1 + u1^-1", 1);
    CHECK(P.full_dim);
    CHECK(P.origin_interior);
    REQUIRE(P.facets.size() == 2);
    REQUIRE(P.vertices.size() == 2);
    CHECK(newton_degree(P, ExpVec{1}) == Rat(1));
    CHECK(newton_degree(P, ExpVec{-1}) == Rat(1));
    CHECK(newton_degree(P, ExpVec{0}) == Rat(0));
    CHECK(newton_degree(P, ExpVec{3}) == Rat(3));
}

TEST_CASE("triangle hull for the P2 mirror") {
    NewtonPolyhedron P = hull_of("u1 + u2 + u1^-1*u2^-1", 2);
    CHECK(is_convenient(P));
    CHECK(P.vertices.size() == 3);
    CHECK(P.facets.size() == 3);
    CHECK(newton_degree(P, ExpVec{1, 0}) == Rat(1));
    CHECK(newton_degree(P, ExpVec{-1, -1}) == Rat(1));
    CHECK(newton_degree(P, ExpVec{1, 1}) == Rat(2));
}

TEST_CASE("half-integral degrees") {
    NewtonPolyhedron P = hull_of("u1^2 + u1^-2", 1);
    CHECK(newton_degree(P, ExpVec{1}) == rat(1, 2));
    CHECK(newton_degree(P, ExpVec{-1}) == rat(1, 2));
    CHECK(newton_degree(P, ExpVec{3}) == rat(3, 2));
}

TEST_CASE("convenience detection") {
    CHECK(is_convenient(parse_laurent("u1+u1^-1", 1)));
    CHECK_FALSE(is_convenient(parse_laurent("u1+u2", 2)));
    CHECK(is_convenient(parse_laurent("u1+u2+u1^-1*u2^-1", 2)));
    CHECK_FALSE(is_convenient(parse_laurent("u1+u1^2", 1)));
    CHECK_FALSE(is_convenient(parse_laurent("u1 + u1^-1", 2))); // not full-dimensional
}

TEST_CASE("milnor numbers from volumes") {
    CHECK(milnor_number(hull_of("u1+u1^-1", 1)) == 2);
    CHECK(milnor_number(hull_of("u1+u2+u1^-1*u2^-1", 2)) == 3);
    CHECK(milnor_number(hull_of("u1^2+u1^-2", 1)) == 4);
    CHECK(milnor_number(hull_of("u1+u2+u1^-1+u2^-1", 2)) == 4);
    // 3d: the P1 x P1 x P1 mirror octahedron has volume 8 * 1/6 * 6
    CHECK(milnor_number(hull_of("u1+u2+u3+u1^-1+u2^-1+u3^-1", 3)) == 8);
}

TEST_CASE("subdiagram monomials") {
    auto s1 = subdiagram_monomials(hull_of("u1+u1^-1", 1));
    REQUIRE(s1.size() == 1);
    CHECK(exp_is_zero(s1[0]));

    auto s2 = subdiagram_monomials(hull_of("u1+u2+u1^-1*u2^-1", 2));
    REQUIRE(s2.size() == 1);
    CHECK(exp_is_zero(s2[0]));

    auto s3 = subdiagram_monomials(hull_of("u1^2+u1^-2", 1));
    REQUIRE(s3.size() == 3);
    CHECK(exp_is_zero(s3[0]));
    CHECK(s3[1] == ExpVec{1});
    CHECK(s3[2] == ExpVec{-1});
}

TEST_CASE("nondegeneracy verdicts") {
    {
        Laurent f = parse_laurent("u1+u1^-1", 1);
        auto rep = is_nondegenerate(f, newton_polyhedron(f));
        CHECK(rep.verdict == NondegVerdict::nondegenerate_exact);
    }
    {
        Laurent f = parse_laurent("u1+u2+u1^-1*u2^-1", 2);
        auto rep = is_nondegenerate(f, newton_polyhedron(f));
        CHECK(rep.verdict == NondegVerdict::nondegenerate_exact);
    }
    {
        // Degenerate edge: (u1 + u2)^2 lies on the boundary edge.
        Laurent f = parse_laurent("u1^2 + 2*u1*u2 + u2^2 + u1^-1*u2^-1", 2);
        auto rep = is_nondegenerate(f, newton_polyhedron(f));
        CHECK(rep.verdict == NondegVerdict::degenerate);
        REQUIRE(rep.witness_point.has_value());
        CHECK(rep.witness_point->size() == 2);
    }
    {
        // 3d with an honest 2-face: the basis engine route.
        Laurent f = parse_laurent("u1+u2+u3+u1^-1*u2^-1*u3^-1", 3);
        auto rep = is_nondegenerate(f, newton_polyhedron(f));
        CHECK(rep.nondegenerate());
    }
}

TEST_CASE("segment face checker on the doubled-root example") {
    // (u1+1)^2 supported on exponents 0..2: torus critical point at u1 = -1.
    Laurent face = parse_laurent("u1^2 + 2*u1 + 1", 1);
    auto w = segment_face_critical_point(face);
    REQUIRE(w.has_value());
    REQUIRE(w->size() == 1);
    CHECK((*w)[0] == Rat(-1));

    // A genuine boundary edge (missing the origin): u1^2 + 3 u1 u2 + u2^2 is
    // squarefree along the edge, (u1 + u2)^2 is not.
    Laurent fine = parse_laurent("u1^2 + 3*u1*u2 + u2^2", 2);
    CHECK_FALSE(segment_face_critical_point(fine).has_value());
    Laurent bad = parse_laurent("u1^2 + 2*u1*u2 + u2^2", 2);
    REQUIRE(segment_face_critical_point(bad).has_value());
}

TEST_CASE("errors on misuse") {
    CHECK_THROWS_AS(newton_polyhedron(Laurent(1, 0)), Error);
    CHECK_THROWS_AS(milnor_number(hull_of("u1+u2", 2)), Error);
    CHECK_THROWS_AS(newton_degree(hull_of("u1+u2", 2), ExpVec{1, 0}), Error);
}

TEST_CASE("subdiagram monomials contain the origin and avoid vertices") {
    std::vector<std::pair<std::string, int>> corpus = {
        {"u1+u1^-1", 1},          {"u1^2+u1^-2", 1},      {"u1+u2+u1^-1*u2^-1", 2},
        {"u1+u2+u1^-1+u2^-1", 2}, {"u1*u2+u1^-1+u2^-1", 2}};
    for (const auto& [text, n] : corpus) {
        NewtonPolyhedron P = newton_polyhedron(parse_laurent(text, n));
        auto sub = subdiagram_monomials(P);
        bool has_origin = false;
        for (const auto& e : sub) {
            if (exp_is_zero(e)) has_origin = true;
            for (const auto& v : P.vertices) CHECK_FALSE(e == v);
        }
        CHECK(has_origin);
        // every monomial of f sits at degree <= 1, with 1 attained
        Laurent f = parse_laurent(text, n);
        Rat top(0);
        for (const auto& [e, c] : f.terms()) {
            Rat d = newton_degree(P, e);
            CHECK(d <= Rat(1));
            top = std::max(top, d);
        }
        CHECK(top == Rat(1));
    }
}

TEST_CASE("newton degree is subadditive and homogeneous along rays") {
    std::mt19937_64 rng(5150);
    NewtonPolyhedron P = newton_polyhedron(parse_laurent("u1*u2+u1^-1+u2^-1", 2));
    for (int it = 0; it < 60; ++it) {
        ExpVec a{static_cast<int32_t>(rng() % 9) - 4, static_cast<int32_t>(rng() % 9) - 4};
        ExpVec b{static_cast<int32_t>(rng() % 9) - 4, static_cast<int32_t>(rng() % 9) - 4};
        CHECK(newton_degree(P, exp_add(a, b)) <= newton_degree(P, a) + newton_degree(P, b));
        int k = 1 + static_cast<int>(rng() % 3);
        ExpVec ka = a;
        for (auto& v : ka) v *= k;
        CHECK(newton_degree(P, ka) == Rat(k) * newton_degree(P, a));
    }
}
