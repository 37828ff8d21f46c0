#include <json.hpp>

#include <algorithm>
#include <functional>
#include <set>

#include "frob/error.hpp"
#include "frob/hm.hpp"

namespace frob {

namespace {

int64_t ydeg(const ExpVec& e, int r) {
    int64_t d = 0;
    for (size_t i = r; i < e.size(); ++i) d += e[i];
    return d;
}

// Antiderivative of a closed 1-form with polynomial components, vanishing at
// the origin, via the homogeneous Euler formula.
Mpoly euler_antiderivative(const std::vector<Mpoly>& omega) {
    int nz = omega.empty() ? 0 : omega[0].nvars();
    Mpoly contracted(nz);
    for (int a = 0; a < nz; ++a) contracted += Mpoly::variable(nz, a) * omega[a];
    Mpoly gamma(nz);
    for (int64_t d = 1; d <= contracted.total_degree(); ++d)
        gamma += contracted.homogeneous_part(d).scaled(Rat(1) / Rat(static_cast<long>(d)));
    return gamma;
}

std::vector<Mpoly> compose(const std::vector<Mpoly>& p, const std::vector<Mpoly>& images,
                           int64_t cap) {
    std::vector<Mpoly> out;
    out.reserve(p.size());
    for (const auto& q : p) {
        // truncated substitution
        int nv = images.empty() ? 0 : images[0].nvars();
        Mpoly acc(nv);
        for (const auto& [e, c] : q.terms()) {
            Mpoly t = Mpoly::constant(nv, c);
            bool dead = false;
            for (size_t i = 0; i < e.size() && !dead; ++i) {
                for (int32_t k = 0; k < e[i]; ++k) {
                    t = mul_trunc(t, images[i], cap);
                    if (t.is_zero()) {
                        dead = true;
                        break;
                    }
                }
            }
            acc += t;
        }
        out.push_back(acc.truncated(cap));
    }
    return out;
}

Mpoly compose_one(const Mpoly& q, const std::vector<Mpoly>& images, int64_t cap) {
    return compose({q}, images, cap)[0];
}

} // namespace

Rat FrobeniusGerm::potential_coeff(const ExpVec& t_exponent) const {
    return potential.coeff(t_exponent);
}

FrobeniusGerm frobenius_manifold_from_deformation(const HMDeformation& H) {
    return frobenius_germ_at(H, std::vector<Rat>(H.r, Rat(0)));
}

FrobeniusGerm frobenius_germ_at(const HMDeformation& H, const std::vector<Rat>& a) {
    int r = H.r, nz = H.nz();
    size_t mu = H.mu;
    if (static_cast<size_t>(nz) != mu)
        fail_precondition("period map cannot be invertible: base has " + std::to_string(nz) +
                          " directions for rank " + std::to_string(mu));
    if (static_cast<int>(a.size()) != r) fail_input("basepoint size mismatch");

    // Recenter at the basepoint.
    std::vector<Mpoly> shift_images;
    for (int i = 0; i < r; ++i)
        shift_images.push_back(Mpoly::variable(nz, i) + Mpoly::constant(nz, a[i]));
    for (int k = 0; k < H.ell; ++k) shift_images.push_back(Mpoly::variable(nz, r + k));
    std::vector<PMat> higgs; // z-direction Higgs matrices at the basepoint
    for (const auto& M : H.C) higgs.push_back(pmat_subst(M, shift_images));
    for (const auto& M : H.D) higgs.push_back(pmat_subst(M, shift_images));

    int64_t K = H.N; // germ order for the structure constants

    // Flat coordinates: t = -chi, the negated primitive map.
    std::vector<Mpoly> t(mu, Mpoly(nz));
    for (size_t j = 0; j < mu; ++j) {
        std::vector<Mpoly> omega;
        for (int e = 0; e < nz; ++e) omega.push_back(higgs[e][j][0]);
        Mpoly gamma = euler_antiderivative(omega);
        for (int e = 0; e < nz; ++e) {
            Mpoly diff = gamma.derivative(e) - higgs[e][j][0];
            for (const auto& [em, c] : diff.terms())
                if (ydeg(em, r) <= H.N - 1)
                    fail_verification("primitive-map component is not closed");
        }
        t[j] = -gamma;
    }

    // Invert t(z) as a truncated series.
    QMat T = qmat_zero(mu, mu);
    for (size_t a2 = 0; a2 < mu; ++a2)
        for (size_t e = 0; e < mu; ++e) {
            ExpVec unit(nz, 0);
            unit[e] = 1;
            T[a2][e] = t[a2].coeff(unit);
        }
    auto Tinv = qmat_inverse(T);
    if (!Tinv)
        fail_precondition("extended period map is singular at the origin; "
                          "not a universal deformation");
    std::vector<Mpoly> z(mu, Mpoly(nz)); // z as series in t (variables renamed in place)
    auto linear_apply = [&](const QMat& M, const std::vector<Mpoly>& v) {
        std::vector<Mpoly> out(mu, Mpoly(nz));
        for (size_t i = 0; i < mu; ++i)
            for (size_t j = 0; j < mu; ++j)
                if (!is_zero(M[i][j])) out[i] += v[j].scaled(M[i][j]);
        return out;
    };
    std::vector<Mpoly> tvars;
    for (size_t i = 0; i < mu; ++i) tvars.push_back(Mpoly::variable(nz, static_cast<int>(i)));
    z = linear_apply(*Tinv, tvars);
    for (int64_t iter = 0; iter < K + 1; ++iter) {
        // residual: t(z(t)) - t, subtract the nonlinear part
        std::vector<Mpoly> tz = compose(t, z, K);
        std::vector<Mpoly> nonlinear(mu, Mpoly(nz));
        for (size_t i = 0; i < mu; ++i) nonlinear[i] = tz[i] - linear_apply(T, z)[i];
        std::vector<Mpoly> rhs(mu, Mpoly(nz));
        for (size_t i = 0; i < mu; ++i) rhs[i] = tvars[i] - nonlinear[i];
        std::vector<Mpoly> znew = linear_apply(*Tinv, rhs);
        for (auto& p : znew) p = p.truncated(K);
        if (znew == z) break;
        z = std::move(znew);
    }

    // Multiplication matrices in flat coordinates: A_a = -sum_e W[e][a] H_e(z)
    // with W the inverse transposed Jacobian of t.
    std::vector<PMat> higgs_t;
    for (size_t e = 0; e < mu; ++e) {
        PMat M = pmat_zero(mu, mu, nz);
        for (size_t i = 0; i < mu; ++i)
            for (size_t j = 0; j < mu; ++j) M[i][j] = compose_one(higgs[e][i][j], z, K);
        higgs_t.push_back(std::move(M));
    }
    PMat Jt = pmat_zero(mu, mu, nz); // (a, e) = d t_a / d z_e composed with z(t)
    for (size_t a2 = 0; a2 < mu; ++a2)
        for (size_t e = 0; e < mu; ++e)
            Jt[a2][e] = compose_one(t[a2].derivative(static_cast<int>(e)), z, K);
    // W = Jt^{-1} as a truncated series: W = (I + T^{-1} R)^{-1} T^{-1}
    PMat W;
    {
        PMat R = pmat_sub(Jt, pmat_from_q(T, nz));
        PMat TinvP = pmat_from_q(*Tinv, nz);
        PMat X = pmat_mul_trunc(TinvP, R, K); // strictly positive order
        PMat acc = pmat_identity(mu, nz);
        PMat pw = pmat_identity(mu, nz);
        for (int64_t k2 = 1; k2 <= K; ++k2) {
            pw = pmat_mul_trunc(pw, X, K);
            if (pmat_is_zero(pw)) break;
            acc = (k2 % 2 == 1) ? pmat_sub(acc, pw) : pmat_add(acc, pw);
        }
        W = pmat_mul_trunc(acc, TinvP, K);
    }
    std::vector<PMat> mult;
    for (size_t a2 = 0; a2 < mu; ++a2) {
        PMat A = pmat_zero(mu, mu, nz);
        for (size_t e = 0; e < mu; ++e) {
            const Mpoly& w = W[e][a2];
            if (w.is_zero()) continue;
            for (size_t i = 0; i < mu; ++i)
                for (size_t j = 0; j < mu; ++j)
                    A[i][j] -= mul_trunc(w, higgs_t[e][i][j], K);
        }
        mult.push_back(std::move(A));
    }

    FrobeniusGerm G;
    G.mu = mu;
    G.n = H.base.n;
    G.unit_index = 0;
    G.c_order = static_cast<int>(K);
    G.pot_order = static_cast<int>(K) + 3;
    G.charges = H.alpha;
    G.metric = H.g;
    G.flat_coords = t;
    G.mult = mult;

    // unit axis: multiplication by d/dt_1 must be the identity
    {
        PMat diff = pmat_sub(pmat_truncated(mult[0], K), pmat_identity(mu, nz));
        if (!pmat_is_zero(diff))
            fail_verification("unit direction does not act as the identity");
    }

    // potential by the triple Euler formula; quadratic part normalized to 0
    Mpoly big(nz);
    for (size_t a2 = 0; a2 < mu; ++a2) {
        PMat gA = pmat_mul_trunc(pmat_from_q(H.g, nz), mult[a2], K);
        for (size_t b = 0; b < mu; ++b)
            for (size_t c = 0; c < mu; ++c) {
                // c_{abc} = (g A_a)[c][b]
                Mpoly term = gA[c][b];
                if (term.is_zero()) continue;
                Mpoly tri = mul_trunc(mul_trunc(tvars[a2], tvars[b], G.pot_order), tvars[c],
                                      G.pot_order);
                big += mul_trunc(tri, term, G.pot_order);
            }
    }
    Mpoly pot(nz);
    for (int64_t d = 3; d <= G.pot_order; ++d) {
        Rat scale = Rat(1) / Rat(static_cast<long>(d * (d - 1) * (d - 2)));
        pot += big.homogeneous_part(d).scaled(scale);
    }
    G.potential = pot;
    return G;
}

GermCheckReport check_wdvv(const FrobeniusGerm& G) {
    GermCheckReport rep;
    size_t mu = G.mu;
    int nz = static_cast<int>(mu);
    int64_t K = G.c_order;

    // structure constants from the multiplication matrices
    std::vector<PMat> gA;
    for (size_t a = 0; a < mu; ++a)
        gA.push_back(pmat_mul_trunc(pmat_from_q(G.metric, nz), G.mult[a], K));
    auto c_of = [&](size_t a, size_t b, size_t c) { return gA[a][c][b]; };

    {
        bool ok = true;
        for (size_t a = 0; a < mu && ok; ++a)
            for (size_t b = a; b < mu && ok; ++b)
                for (size_t c = b; c < mu && ok; ++c) {
                    Mpoly v = c_of(a, b, c);
                    ok = (v - c_of(a, c, b)).truncated(K).is_zero() &&
                         (v - c_of(b, a, c)).truncated(K).is_zero() &&
                         (v - c_of(c, b, a)).truncated(K).is_zero();
                }
        rep.relations.items.push_back({"structure constants totally symmetric", ok, ""});
    }
    {
        bool ok = true;
        for (size_t a = 0; a < mu && ok; ++a)
            for (size_t b = a + 1; b < mu && ok; ++b) {
                PMat comm = pmat_sub(pmat_mul_trunc(G.mult[a], G.mult[b], K),
                                     pmat_mul_trunc(G.mult[b], G.mult[a], K));
                ok = pmat_is_zero(pmat_truncated(comm, K));
            }
        rep.relations.items.push_back({"multiplication associative (WDVV)", ok, ""});
    }
    {
        PMat diff = pmat_sub(pmat_truncated(G.mult[G.unit_index], K), pmat_identity(mu, nz));
        rep.relations.items.push_back({"unit field acts as identity", pmat_is_zero(diff), ""});
    }
    rep.relations.items.push_back({"metric constant in flat coordinates", true, ""});
    {
        // third derivatives of the potential reproduce the structure constants
        bool ok = true;
        int64_t through = std::min<int64_t>(K, G.pot_order - 3);
        for (size_t a = 0; a < mu && ok; ++a)
            for (size_t b = a; b < mu && ok; ++b)
                for (size_t c = b; c < mu && ok; ++c) {
                    Mpoly third = G.potential.derivative(static_cast<int>(a))
                                      .derivative(static_cast<int>(b))
                                      .derivative(static_cast<int>(c));
                    ok = (third - c_of(a, b, c)).truncated(through).is_zero();
                }
        rep.relations.items.push_back({"potential integrates the structure constants", ok, ""});
    }

    // Homogeneity: (sum_a (w_a t_a + r_a) dPhi/dt_a) = (3 - n) Phi modulo
    // quadratic terms, solving for one shift constant per direction. Germs
    // centered away from the homogeneous origin carry shifts along every
    // direction, not only the charge-1 ones.
    {
        Mpoly lhs(nz);
        for (size_t a = 0; a < mu; ++a) {
            Rat w = Rat(1) - G.charges[a];
            if (is_zero(w)) continue;
            lhs += (Mpoly::variable(nz, static_cast<int>(a)) *
                    G.potential.derivative(static_cast<int>(a)))
                       .scaled(w);
        }
        Mpoly residual = lhs - G.potential.scaled(Rat(3 - G.n));
        std::set<ExpVec> monos;
        for (const auto& [e, c] : residual.terms())
            if (exp_total(e) >= 3 && exp_total(e) <= G.pot_order - 1) monos.insert(e);
        std::vector<Mpoly> dirs;
        for (size_t a = 0; a < mu; ++a) {
            dirs.push_back(G.potential.derivative(static_cast<int>(a)));
            for (const auto& [e, c] : dirs.back().terms())
                if (exp_total(e) >= 3 && exp_total(e) <= G.pot_order - 1) monos.insert(e);
        }
        std::vector<ExpVec> rows(monos.begin(), monos.end());
        QMat A = qmat_zero(rows.size(), mu);
        QVec b(rows.size(), Rat(0));
        for (size_t i = 0; i < rows.size(); ++i) {
            b[i] = -residual.coeff(rows[i]);
            for (size_t j = 0; j < mu; ++j) A[i][j] = dirs[j].coeff(rows[i]);
        }
        auto sol = qmat_solve_any(A, b);
        rep.homogeneous = sol.has_value();
        if (sol) rep.euler_shifts = *sol;
    }
    return rep;
}

GermIso compare_structures(const FrobeniusGerm& G1, const FrobeniusGerm& G2) {
    GermIso iso;
    if (G1.mu != G2.mu) {
        iso.detail = "different ranks";
        return iso;
    }
    if (G1.charges != G2.charges) {
        iso.detail = "different spectra";
        return iso;
    }
    size_t mu = G1.mu;
    int64_t order = std::min(G1.pot_order, G2.pot_order);
    Mpoly p1 = G1.potential.truncated(order);
    Mpoly p2 = G2.potential.truncated(order);

    // Charge blocks; candidate maps are signed permutations inside each block
    // fixing the unit axis, filtered by the metric and decided on potentials.
    std::vector<std::vector<int>> blocks;
    for (size_t i = 0; i < mu; ++i) {
        if (i > 0 && G1.charges[i] == G1.charges[i - 1])
            blocks.back().push_back(static_cast<int>(i));
        else
            blocks.push_back({static_cast<int>(i)});
    }
    std::vector<QMat> candidates;
    std::function<void(size_t, QMat&)> build = [&](size_t bi, QMat& acc) {
        if (bi == blocks.size()) {
            candidates.push_back(acc);
            return;
        }
        const auto& blk = blocks[bi];
        std::vector<int> perm(blk.size());
        for (size_t i = 0; i < blk.size(); ++i) perm[i] = static_cast<int>(i);
        std::sort(perm.begin(), perm.end());
        do {
            for (uint32_t signs = 0; signs < (1u << blk.size()); ++signs) {
                QMat next = acc;
                bool unit_ok = true;
                for (size_t i = 0; i < blk.size(); ++i) {
                    int from = blk[i], to = blk[perm[i]];
                    Rat s = (signs >> i) & 1 ? Rat(-1) : Rat(1);
                    next[to][from] = s;
                    if (from == static_cast<int>(G1.unit_index) &&
                        (to != from || s != Rat(1)))
                        unit_ok = false;
                }
                if (!unit_ok) continue;
                build(bi + 1, next);
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
    };
    QMat zero = qmat_zero(mu, mu);
    build(0, zero);
    if (candidates.size() > 20000) {
        iso.detail = "charge blocks too large for the signed-permutation search";
        return iso;
    }

    for (const auto& T : candidates) {
        // metric compatibility: T^t G2 T = G1
        if (!(qmat_mul(qmat_transpose(T), qmat_mul(G2.metric, T)) == G1.metric)) continue;
        // potential matching: Phi2(T t) = Phi1(t)
        std::vector<Mpoly> images(mu, Mpoly(static_cast<int>(mu)));
        for (size_t i = 0; i < mu; ++i)
            for (size_t j = 0; j < mu; ++j)
                if (!is_zero(T[i][j]))
                    images[i] += Mpoly::variable(static_cast<int>(mu), static_cast<int>(j))
                                     .scaled(T[i][j]);
        Mpoly transported = compose_one(p2, images, order);
        if ((transported - p1).truncated(order).is_zero()) {
            iso.found = true;
            iso.map = T;
            return iso;
        }
    }
    // certified obstruction: report the lowest order at which every candidate
    // mismatches
    int64_t best = 0;
    for (const auto& T : candidates) {
        if (!(qmat_mul(qmat_transpose(T), qmat_mul(G2.metric, T)) == G1.metric)) continue;
        std::vector<Mpoly> images(mu, Mpoly(static_cast<int>(mu)));
        for (size_t i = 0; i < mu; ++i)
            for (size_t j = 0; j < mu; ++j)
                if (!is_zero(T[i][j]))
                    images[i] += Mpoly::variable(static_cast<int>(mu), static_cast<int>(j))
                                     .scaled(T[i][j]);
        Mpoly diff = compose_one(p2, images, order) - p1;
        int64_t low = order + 1;
        for (const auto& [e, c] : diff.terms()) low = std::min(low, exp_total(e));
        best = std::max(best, low);
    }
    iso.detail = "no signed block permutation matches the potentials; first obstruction at "
                 "order " +
                 std::to_string(best);
    return iso;
}

} // namespace frob
