#include <doctest.h>

#include "frob/error.hpp"
#include <random>

#include "frob/structure.hpp"

using namespace frob;

namespace {
std::vector<Laurent> gs_list(int n, std::initializer_list<const char*> texts) {
    std::vector<Laurent> out;
    for (const char* t : texts) out.push_back(parse_laurent(t, n));
    return out;
}
} // namespace

TEST_CASE("classification flags") {
    Laurent f1 = parse_laurent("u1+u1^-1", 1);
    {
        SubdiagramDeformation D = classify_deformation(f1, gs_list(1, {"1"}));
        CHECK(D.injective);
        CHECK(D.maximal);
        CHECK_FALSE(D.surjective);
        CHECK(D.good);
    }
    {
        SubdiagramDeformation D = classify_deformation(f1, gs_list(1, {"1", "1"}));
        CHECK_FALSE(D.injective);
    }
    {
        Laurent f = parse_laurent("u1^2+u1^-2", 1);
        SubdiagramDeformation D = classify_deformation(f, gs_list(1, {"1", "u1", "u1^-1"}));
        CHECK(D.injective);
        CHECK(D.maximal);
        CHECK(D.surjective);
        CHECK(D.good);
    }
    // non-subdiagram generator is rejected with a diagnostic
    CHECK_THROWS_AS(classify_deformation(f1, gs_list(1, {"u1"})), Error);
}

TEST_CASE("lattice test is independent of the subdiagram restriction") {
    Laurent f = parse_laurent("u1+u1^-1", 1);
    JacobiBasis B = monomial_basis(f);
    CHECK(is_lattice(gs_list(1, {"u1"}), B));
    CHECK_FALSE(is_lattice(gs_list(1, {"1"}), B));
    CHECK(is_lattice(gs_list(1, {"u1^-1"}), B));

    QMat cols = period_columns(B, gs_list(1, {"u1"}));
    CHECK(cols[0][0] == Rat(0));
    CHECK(cols[1][0] == Rat(1));
}

TEST_CASE("canonical structure of the P1 mirror") {
    Laurent f = parse_laurent("u1+u1^-1", 1);
    SubdiagramDeformation D = classify_deformation(f, gs_list(1, {"1"}));
    FrobTypeStructure S = build_canonical_structure(D);
    REQUIRE(S.mu == 2);
    CHECK(S.B0[0][0] == Mpoly::variable(1, 0));
    CHECK(S.B0[0][1].constant_value() == Rat(2));
    CHECK(S.B0[1][0].constant_value() == Rat(2));
    CHECK(S.B0[1][1] == Mpoly::variable(1, 0));
    CHECK(pmat_equal(S.C[0], pmat_scaled(pmat_identity(2, 1), Rat(-1))));
    CHECK(S.alpha == QVec{Rat(0), Rat(1)});
    CHECK(S.g[0][1] == Rat(1));
    CHECK(S.g[0][0] == Rat(0));

    RelationReport rep = verify_structure_relations(S);
    CHECK(rep.all_pass());

    // negative control: poison the grading
    FrobTypeStructure bad = S;
    bad.alpha[0] += 1;
    CHECK_FALSE(verify_structure_relations(bad).all_pass());
}

TEST_CASE("restriction coherence at random points") {
    Laurent f = parse_laurent("u1^2+u1^-2", 1);
    SubdiagramDeformation D = build_good_maximal_deformation(f);
    FrobTypeStructure S = build_canonical_structure(D);
    std::vector<std::vector<Rat>> points = {
        {rat(1, 2), rat(-1, 3), Rat(2)}, {Rat(1), Rat(0), Rat(0)}, {rat(2, 5), rat(3, 7), rat(-1, 2)}};
    for (const auto& a : points) {
        PointStructure pt = restrict_at(S, a);
        Laurent fa = S.deformation->F().specialize_params(a);
        SubdiagramDeformation Da = classify_deformation(fa, D.gs);
        FrobTypeStructure Sa = build_canonical_structure(Da);
        CHECK(pt.R0 == pmat_eval(Sa.B0, std::vector<Rat>(3, Rat(0))));
        CHECK(pt.g == Sa.g);
        CHECK(pt.alpha == Sa.alpha);
    }
}

TEST_CASE("translation") {
    Laurent f = parse_laurent("u1+u1^-1", 1);
    FrobTypeStructure S = build_canonical_structure(classify_deformation(f, gs_list(1, {"1"})));
    FrobTypeStructure T0 = translate_structure(S, {Rat(0)});
    CHECK(pmat_equal(T0.B0, S.B0));
    FrobTypeStructure T3 = translate_structure(S, {Rat(3)});
    CHECK(T3.B0[0][0] == Mpoly::variable(1, 0) + Mpoly::constant(1, Rat(3)));
    CHECK(T3.B0[0][1].constant_value() == Rat(2));
    FrobTypeStructure T5 = translate_structure(translate_structure(S, {Rat(2)}), {Rat(3)});
    CHECK(pmat_equal(T5.B0, translate_structure(S, {Rat(5)}).B0));
}

TEST_CASE("change of lattice") {
    Laurent f = parse_laurent("u1^2+u1^-2", 1);
    SubdiagramDeformation D1 = classify_deformation(f, gs_list(1, {"1", "u1", "u1^-1"}));
    SubdiagramDeformation D2 =
        classify_deformation(f, gs_list(1, {"1", "u1+u1^-1", "u1-u1^-1"}));
    {
        LatticeChange same = change_of_lattice_iso(D1, D1);
        CHECK(same.L == qmat_identity(3));
        CHECK(same.verified);
    }
    LatticeChange ch = change_of_lattice_iso(D1, D2);
    QMat expect = {{Rat(1), Rat(0), Rat(0)}, {Rat(0), Rat(1), Rat(1)}, {Rat(0), Rat(1), Rat(-1)}};
    CHECK(ch.L == expect);
    CHECK(ch.verified);
}

TEST_CASE("primitive map") {
    Laurent f = parse_laurent("u1+u1^-1", 1);
    FrobTypeStructure S = build_canonical_structure(classify_deformation(f, gs_list(1, {"1"})));
    PrimitiveMapPoly chi = primitive_map(S);
    REQUIRE(chi.gamma.size() == 2);
    CHECK(chi.gamma[0] == -Mpoly::variable(1, 0));
    CHECK(chi.gamma[1].is_zero());
    CHECK(chi.triangular);
}

TEST_CASE("IC and GC conditions") {
    Laurent f = parse_laurent("u1+u1^-1", 1);
    FrobTypeStructure S = build_canonical_structure(classify_deformation(f, gs_list(1, {"1"})));
    CHECK(check_IC(S, {Rat(0)}));
    CHECK(check_GC(S, {Rat(0)}));       // R0-iterates span even though gs=(1) is no lattice
    CHECK(check_GC(S, {rat(5, 3)}));
    CHECK(check_GC_global(S));

    Laurent f2 = parse_laurent("u1+u2+u1^-1*u2^-1", 2);
    FrobTypeStructure S2 = build_canonical_structure(classify_deformation(f2, gs_list(2, {"1"})));
    CHECK(check_GC(S2, {Rat(0)}));
    CHECK(check_GC_global(S2));

    Laurent f3 = parse_laurent("u1^2+u1^-2", 1);
    FrobTypeStructure S3 = build_canonical_structure(build_good_maximal_deformation(f3));
    CHECK(check_IC(S3, {Rat(0), Rat(0), Rat(0)}));
    CHECK(check_GC_global(S3));
    for (int s = 1; s <= 3; ++s) {
        std::vector<Rat> a = {Rat(s), rat(s, 2), rat(-s, 3)};
        CHECK(check_IC(S3, a)); // injective deformations have IC everywhere
    }
}

TEST_CASE("good maximal deformations") {
    CHECK(build_good_maximal_deformation(parse_laurent("u1+u1^-1", 1)).gs.size() == 1);
    auto D = build_good_maximal_deformation(parse_laurent("u1^2+u1^-2", 1));
    REQUIRE(D.gs.size() == 3);
    CHECK(D.gs[0] == parse_laurent("1", 1));
    CHECK(D.gs[1] == parse_laurent("u1", 1));
    CHECK(D.gs[2] == parse_laurent("u1^-1", 1));
    CHECK(build_good_maximal_deformation(parse_laurent("u1+u2+u1^-1*u2^-1", 2)).gs.size() == 1);
}

TEST_CASE("extended connection display") {
    Laurent f = parse_laurent("u1+u1^-1", 1);
    FrobTypeStructure S = build_canonical_structure(classify_deformation(f, gs_list(1, {"1"})));
    ExtendedConnection E = extended_connection(S, {Rat(0)});
    CHECK(E.B0_at_a[0][1] == Rat(2));
    CHECK(E.alpha == QVec{Rat(0), Rat(1)});
    CHECK(E.higgs_at_a[0][0][0] == Rat(-1));
    CHECK(E.to_string().find("-(tau*B0 + Binf) dtau/tau") != std::string::npos);
}

TEST_CASE("JSON round-trip is byte-exact") {
    Laurent f = parse_laurent("u1^2+u1^-2", 1);
    FrobTypeStructure S = build_canonical_structure(build_good_maximal_deformation(f));
    std::string once = structure_to_json(S);
    FrobTypeStructure back = structure_from_json(once);
    std::string twice = structure_to_json(back);
    CHECK(once == twice);
    CHECK(verify_structure_relations(back).all_pass());
    CHECK(back.mu == S.mu);
    CHECK(pmat_equal(back.B0, S.B0));
}

TEST_CASE("principal parts of the structure matrices are constant") {
    // The degree-preserving blocks of B0 and of each Higgs matrix carry no
    // parameter dependence; only strictly filtration-lowering entries may.
    std::vector<std::pair<std::string, int>> corpus = {
        {"u1+u1^-1", 1}, {"u1^2+u1^-2", 1}, {"u1+u2+u1^-1*u2^-1", 2},
        {"u1+u2+u1^-1+u2^-1", 2}};
    for (const auto& [text, n] : corpus) {
        Laurent f = parse_laurent(text, n);
        SubdiagramDeformation D = build_good_maximal_deformation(f);
        FrobTypeStructure S = build_canonical_structure(D);
        const NewtonPolyhedron& P = D.basis.reducer->polyhedron();
        for (size_t a = 0; a < S.mu; ++a)
            for (size_t b = 0; b < S.mu; ++b) {
                if (S.alpha[a] == S.alpha[b] + Rat(1))
                    CHECK(S.B0[a][b].is_constant());
                for (int k = 0; k < S.r; ++k)
                    if (S.alpha[a] == S.alpha[b] + newton_degree(P, D.gs[k]))
                        CHECK(S.C[k][a][b].is_constant());
            }
    }
}

TEST_CASE("GC holds for the P2 mirror unit deformation while the lattice test fails") {
    Laurent f = parse_laurent("u1+u2+u1^-1*u2^-1", 2);
    JacobiBasis B = monomial_basis(f);
    CHECK_FALSE(is_lattice({parse_laurent("1", 2)}, B));
    FrobTypeStructure S =
        build_canonical_structure(classify_deformation(f, {parse_laurent("1", 2)}));
    CHECK(check_GC(S, {Rat(0)}));
}

TEST_CASE("randomized one-variable pipeline survives end to end") {
    std::mt19937_64 rng(271828);
    int built = 0;
    for (int it = 0; it < 40 && built < 12; ++it) {
        // random convenient f: pick positive and negative extremes plus noise
        int hi = 1 + static_cast<int>(rng() % 3);
        int lo = -(1 + static_cast<int>(rng() % 3));
        Laurent f(1, 0);
        f += Laurent::monomial_q(1, {hi}, rat(1 + static_cast<long>(rng() % 3)));
        f += Laurent::monomial_q(1, {lo}, rat(1 + static_cast<long>(rng() % 3)));
        for (int e = lo + 1; e < hi; ++e)
            if (rng() % 2)
                f += Laurent::monomial_q(1, {e}, rat(static_cast<long>(rng() % 5) - 2));
        NewtonPolyhedron P = newton_polyhedron(f);
        if (!is_convenient(P)) continue;
        auto rep = is_nondegenerate(f, P);
        if (!rep.nondegenerate()) continue;
        // one-variable convenient polynomials are never degenerate
        CHECK(rep.verdict == NondegVerdict::nondegenerate_exact);
        SubdiagramDeformation D = build_good_maximal_deformation(f);
        FrobTypeStructure S = build_canonical_structure(D);
        CHECK(verify_structure_relations(S).all_pass());
        CHECK(primitive_map(S).triangular);
        CHECK(milnor_number(P) == Int(static_cast<unsigned long>(S.mu)));
        ++built;
    }
    CHECK(built >= 8);
}
