#include <doctest.h>

#include "frob/error.hpp"
#include "frob/hm.hpp"

using namespace frob;

namespace {

FrobTypeStructure p1_structure() {
    Laurent f = parse_laurent("u1+u1^-1", 1);
    return build_canonical_structure(classify_deformation(f, {parse_laurent("1", 1)}));
}

Rat factorial(int k) {
    Rat r(1);
    for (int i = 2; i <= k; ++i) r *= Rat(i);
    return r;
}

} // namespace

TEST_CASE("prescribing the unit column reproduces the shift deformation") {
    FrobTypeStructure S = p1_structure();
    HMOptions opt;
    opt.order = 5;
    // f_11 = y, f_21 = 0
    std::vector<Mpoly> f_choices(2, Mpoly(2));
    f_choices[0] = Mpoly::variable(2, 1);
    HMDeformation H = hm_extend(S, 1, f_choices, opt);

    // D = identity, C first column unchanged, B0 = B0(x) - y
    CHECK(pmat_equal(H.D[0], pmat_identity(2, 2)));
    CHECK(H.C[0][0][0] == Mpoly::constant(2, Rat(-1)));
    CHECK(H.C[0][1][0].is_zero());
    Mpoly expect00 = Mpoly::variable(2, 0) - Mpoly::variable(2, 1);
    CHECK(H.B0[0][0] == expect00);
    CHECK(H.B0[1][1] == expect00);
    CHECK(H.B0[0][1].constant_value() == Rat(2));
}

TEST_CASE("no extra variables is the identity extension") {
    FrobTypeStructure S = p1_structure();
    HMOptions opt;
    HMDeformation H = hm_extend(S, 0, {}, opt);
    CHECK(pmat_equal(H.B0, S.B0));
    CHECK(H.D.empty());
}

TEST_CASE("universal deformation of the P1 mirror") {
    FrobTypeStructure S = p1_structure();
    HMOptions opt;
    opt.order = 6;
    HMDeformation H = universal_good_deformation(S, opt);
    REQUIRE(H.ell == 1);

    // B0[0][1] = 2 exp(-y), D[0][1] = exp(-y), C = -I
    for (int k = 0; k <= 6; ++k) {
        ExpVec e{0, k};
        Rat expect = Rat(k % 2 == 0 ? 1 : -1) / factorial(k);
        CHECK(H.D[0][0][1].coeff(e) == expect);
        CHECK(H.B0[0][1].coeff(e) == Rat(2) * expect);
    }
    CHECK(H.D[0][1][0] == Mpoly::constant(2, Rat(1)));
    CHECK(H.D[0][0][0].is_zero());
    CHECK(H.D[0][1][1].is_zero());
    CHECK(pmat_equal(H.C[0], pmat_scaled(pmat_identity(2, 2), Rat(-1))));

    CHECK(verify_extended_relations(H).all_pass());

    // y = 0 recovers the input
    FrobTypeStructure back = restrict_y0(H);
    CHECK(pmat_equal(back.B0, S.B0));
    CHECK(pmat_equal(back.C[0], S.C[0]));

    // determinism
    HMDeformation H2 = universal_good_deformation(S, opt);
    CHECK(pmat_equal(H2.B0, H.B0));
    CHECK(pmat_equal(H2.D[0], H.D[0]));
}

TEST_CASE("P1 mirror germ: flat coordinates and potential") {
    FrobTypeStructure S = p1_structure();
    HMOptions opt;
    opt.order = 6;
    HMDeformation H = universal_good_deformation(S, opt);
    FrobeniusGerm G = frobenius_manifold_from_deformation(H);

    // chi = (-x1, y1), so t = (x1, -y1)
    REQUIRE(G.flat_coords.size() == 2);
    CHECK(G.flat_coords[0] == Mpoly::variable(2, 0));
    CHECK(G.flat_coords[1] == -Mpoly::variable(2, 1));

    // potential: (1/2) t1^2 t2 + sum_{k >= 3} t2^k / k!
    CHECK(G.potential_coeff({2, 1}) == rat(1, 2));
    for (int k = 3; k <= G.pot_order; ++k) {
        ExpVec e{0, k};
        CHECK(G.potential_coeff(e) == Rat(1) / factorial(k));
    }
    // nothing of degree <= 2 and no stray monomials
    for (const auto& [e, c] : G.potential.terms()) {
        CHECK(exp_total(e) >= 3);
        bool classical = (e == ExpVec{2, 1});
        bool quantum = (e[0] == 0);
        CHECK((classical || quantum));
    }

    // Phi_111 in zero-based coordinates is c_{222}; exponential structure
    Mpoly phi111 = G.potential.derivative(1).derivative(1).derivative(1);
    Mpoly diff = phi111.derivative(1) - phi111;
    CHECK(diff.truncated(G.pot_order - 5).is_zero());

    GermCheckReport rep = check_wdvv(G);
    CHECK(rep.relations.all_pass());
    CHECK(rep.homogeneous);
    REQUIRE(rep.euler_shifts.size() == 2);
    CHECK(rep.euler_shifts[0] == Rat(0));
    CHECK(rep.euler_shifts[1] == Rat(2)); // the anticanonical degree of P1

    // negative control: break one quantum coefficient
    FrobeniusGerm bad = G;
    bad.potential.add_term({0, 4}, rat(1, 7));
    GermCheckReport brep = check_wdvv(bad);
    CHECK_FALSE(brep.relations.all_pass());
}

TEST_CASE("translation compatibility of the extension") {
    FrobTypeStructure S = p1_structure();
    HMOptions opt;
    opt.order = 4;
    HMDeformation H = universal_good_deformation(S, opt);
    std::vector<Rat> a{rat(1, 3)};

    FrobeniusGerm via_pullback = frobenius_germ_at(H, a);

    FrobTypeStructure Sa = translate_structure(S, a);
    HMDeformation Ha = universal_good_deformation(Sa, opt);
    FrobeniusGerm direct = frobenius_manifold_from_deformation(Ha);

    CHECK(via_pullback.potential == direct.potential);
    GermIso iso = compare_structures(direct, via_pullback);
    CHECK(iso.found);
    CHECK(iso.map == qmat_identity(2));
}

TEST_CASE("germ comparison finds the isomorphism for two lattices") {
    Laurent f = parse_laurent("u1^2+u1^-2", 1);
    HMOptions opt;
    opt.order = 4;
    FrobTypeStructure S1 = build_canonical_structure(build_good_maximal_deformation(f));
    FrobTypeStructure S2 = build_canonical_structure(classify_deformation(
        f, {parse_laurent("1", 1), parse_laurent("u1+u1^-1", 1), parse_laurent("u1-u1^-1", 1)}));
    HMDeformation H1 = universal_deformation(S1, opt);
    HMDeformation H2 = universal_deformation(S2, opt);
    FrobeniusGerm G1 = frobenius_manifold_from_deformation(H1);
    FrobeniusGerm G2 = frobenius_manifold_from_deformation(H2);
    CHECK(check_wdvv(G1).relations.all_pass());
    CHECK(check_wdvv(G2).relations.all_pass());
    GermIso iso = compare_structures(G1, G2);
    CHECK(iso.found);

    GermIso self = compare_structures(G1, G1);
    CHECK(self.found);
    CHECK(self.map == qmat_identity(4));
}

TEST_CASE("generation failure is reported honestly") {
    // For u1 + u2 + 1/u1 + 1/u2 the only subdiagram monomial is the
    // constant; polynomials in it span one dimension of the four, and
    // multiplication by f is non-regular (f^3 = 16 f), so no universal
    // deformation exists along this base. The precondition must fire.
    Laurent f = parse_laurent("u1+u2+u1^-1+u2^-1", 2);
    FrobTypeStructure S = build_canonical_structure(build_good_maximal_deformation(f));
    CHECK_FALSE(check_GC(S, {Rat(0)}));
    HMOptions opt;
    opt.order = 3;
    CHECK_THROWS_WITH_AS(universal_good_deformation(S, opt),
                         doctest::Contains("generation"), Error);
}

TEST_CASE("third derivatives at the origin match the algebra multiplication") {
    for (const auto& [text, n] : std::vector<std::pair<std::string, int>>{
             {"u1+u1^-1", 1}, {"u1+u2+u1^-1*u2^-1", 2}}) {
        Laurent f = parse_laurent(text, n);
        FrobTypeStructure S = build_canonical_structure(build_good_maximal_deformation(f));
        HMOptions opt;
        opt.order = 4;
        FrobeniusGerm G =
            frobenius_manifold_from_deformation(universal_good_deformation(S, opt));
        // multiplication by the basis classes at x = 0, straight from the
        // reduction engine
        JacobianIdeal I = build_ideal(f);
        const auto& basis = S.basis_monomials;
        for (size_t a = 0; a < G.mu; ++a) {
            QMat Ma = pmat_eval(multiplication_matrix(
                                    Laurent::monomial_q(n, basis[a], Rat(1)), I),
                                {});
            QMat gMa = qmat_mul(S.g, Ma);
            for (size_t b = 0; b < G.mu; ++b)
                for (size_t c = 0; c < G.mu; ++c) {
                    Mpoly third = G.potential.derivative(static_cast<int>(a))
                                      .derivative(static_cast<int>(b))
                                      .derivative(static_cast<int>(c));
                    CHECK(third.coeff(ExpVec(G.mu, 0)) == gMa[c][b]);
                }
        }
    }
}

TEST_CASE("extended primitive map keeps the triangular-plus-shift shape") {
    Laurent f = parse_laurent("u1^2+u1^-2", 1);
    FrobTypeStructure S = build_canonical_structure(build_good_maximal_deformation(f));
    HMOptions opt;
    opt.order = 4;
    HMDeformation H = universal_good_deformation(S, opt);
    FrobeniusGerm G = frobenius_manifold_from_deformation(H);
    int r = S.r; // 3
    REQUIRE(r == 3);
    // chi_j = -x_j + G_j(x_{j+1..r}) for j <= r, chi_{r+k} = y_k; here
    // flat t = -chi.
    for (int j = 0; j < r; ++j) {
        Mpoly shifted = G.flat_coords[j] - Mpoly::variable(4, j);
        for (int i = 0; i <= j; ++i) CHECK(shifted.degree(i) <= 0);
        CHECK(shifted.degree(3) <= 0); // no dependence on the formal variable
    }
    CHECK(G.flat_coords[3] == -Mpoly::variable(4, 3));
}

TEST_CASE("germ mode only requires generation at the origin") {
    FrobTypeStructure S = p1_structure();
    HMOptions semi, germ;
    semi.order = germ.order = 3;
    germ.germ_mode = true;
    HMDeformation H1 = universal_good_deformation(S, semi);
    HMDeformation H2 = universal_good_deformation(S, germ);
    CHECK(pmat_equal(H1.B0, H2.B0));
    CHECK(pmat_equal(H1.D[0], H2.D[0]));
}

TEST_CASE("degree-four curve count appears at order eight") {
    Laurent f = parse_laurent("u1+u2+u1^-1*u2^-1", 2);
    FrobTypeStructure S = build_canonical_structure(build_good_maximal_deformation(f));
    HMOptions opt;
    opt.order = 8;
    FrobeniusGerm G = frobenius_manifold_from_deformation(universal_good_deformation(S, opt));
    Rat fact11("39916800");
    CHECK(G.potential_coeff({0, 0, 11}) == Rat(620) / fact11);
}

TEST_CASE("torus-equivalent mirror presentations give the same germ") {
    HMOptions opt;
    opt.order = 5;
    Laurent f1 = parse_laurent("u1+u2+u1^-1*u2^-1", 2);
    Laurent f2 = parse_laurent("u1*u2+u1^-1+u2^-1", 2);
    FrobeniusGerm G1 = frobenius_manifold_from_deformation(universal_good_deformation(
        build_canonical_structure(build_good_maximal_deformation(f1)), opt));
    FrobeniusGerm G2 = frobenius_manifold_from_deformation(universal_good_deformation(
        build_canonical_structure(build_good_maximal_deformation(f2)), opt));
    CHECK(G1.potential == G2.potential);
    CHECK(compare_structures(G1, G2).found);
}
