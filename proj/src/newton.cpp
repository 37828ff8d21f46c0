#include "frob/newton.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "frob/error.hpp"
#include "frob/groebner.hpp"

namespace frob {

namespace {

Rat dot(const QVec& w, const ExpVec& a) {
    Rat s(0);
    for (size_t i = 0; i < w.size(); ++i) s += w[i] * Rat(a[i]);
    return s;
}

// Nullspace direction of the n x (n+1) system (p_i, -1) . (w, c) = 0.
std::optional<std::pair<QVec, Rat>> hyperplane_through(const std::vector<ExpVec>& pts, int n) {
    QMat m(pts.size(), QVec(n + 1, Rat(0)));
    for (size_t i = 0; i < pts.size(); ++i) {
        for (int j = 0; j < n; ++j) m[i][j] = Rat(pts[i][j]);
        m[i][n] = Rat(-1);
    }
    if (qmat_rank(m) != static_cast<size_t>(n)) return std::nullopt;
    // Solve for the 1-dimensional kernel by echelon on the transpose trick:
    // append unknowns one by one; easier: find kernel via full elimination.
    QMat work = m;
    size_t rows = work.size(), cols = n + 1;
    std::vector<int> pivot_col;
    size_t rank = 0;
    for (size_t col = 0; col < cols && rank < rows; ++col) {
        size_t p = rank;
        while (p < rows && is_zero(work[p][col])) ++p;
        if (p == rows) continue;
        std::swap(work[p], work[rank]);
        Rat inv = 1 / work[rank][col];
        for (size_t j = 0; j < cols; ++j) work[rank][j] *= inv;
        for (size_t i = 0; i < rows; ++i) {
            if (i == rank || is_zero(work[i][col])) continue;
            Rat f = work[i][col];
            for (size_t j = 0; j < cols; ++j) work[i][j] -= f * work[rank][j];
        }
        pivot_col.push_back(static_cast<int>(col));
        ++rank;
    }
    int free_col = -1;
    for (int c = 0; c <= n; ++c)
        if (std::find(pivot_col.begin(), pivot_col.end(), c) == pivot_col.end()) {
            free_col = c;
            break;
        }
    if (free_col < 0) return std::nullopt;
    QVec sol(n + 1, Rat(0));
    sol[free_col] = 1;
    for (size_t r = 0; r < rank; ++r) sol[pivot_col[r]] = -work[r][free_col];
    QVec w(sol.begin(), sol.begin() + n);
    return std::make_pair(w, sol[n]);
}

std::string facet_key(const QVec& w, const Rat& c) {
    std::string k = rat_to_string(c);
    for (const auto& v : w) k += "|" + rat_to_string(v);
    return k;
}

// All k-subsets of [0, m); visits in lexicographic order.
template <class F>
void for_each_subset(int m, int k, F&& fn) {
    std::vector<int> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    if (k > m) return;
    while (true) {
        fn(idx);
        int i = k - 1;
        while (i >= 0 && idx[i] == m - k + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

} // namespace

NewtonPolyhedron newton_polyhedron(const Laurent& f) {
    if (f.is_zero()) fail_precondition("newton polyhedron of the zero polynomial");
    NewtonPolyhedron P;
    P.n = f.nu();
    std::set<ExpVec> pts;
    for (const auto& [e, c] : f.terms()) pts.insert(e);
    pts.insert(ExpVec(P.n, 0));
    P.points.assign(pts.begin(), pts.end());

    // Linear span rank (the origin is among the points).
    {
        QMat m;
        for (const auto& p : P.points) {
            QVec row(P.n);
            for (int j = 0; j < P.n; ++j) row[j] = Rat(p[j]);
            m.push_back(row);
        }
        P.full_dim = qmat_rank(m) == static_cast<size_t>(P.n);
    }
    if (!P.full_dim) return P;

    int m = static_cast<int>(P.points.size());
    std::map<std::string, Facet> facets;
    for_each_subset(m, P.n, [&](const std::vector<int>& idx) {
        std::vector<ExpVec> sub;
        for (int i : idx) sub.push_back(P.points[i]);
        auto hp = hyperplane_through(sub, P.n);
        if (!hp) return;
        auto [w, c] = *hp;
        Rat lo = dot(w, P.points[0]), hi = lo;
        for (const auto& p : P.points) {
            Rat v = dot(w, p);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        bool support_hi = (hi == c), support_lo = (lo == c);
        if (!support_hi && !support_lo) return;
        QVec ww = w;
        Rat cc = c;
        if (support_lo && !support_hi) {
            for (auto& v : ww) v = -v;
            cc = -cc;
        }
        // Points satisfy ww . p <= cc with equality on the facet; the origin
        // forces cc >= 0.
        if (sgn(cc) > 0) {
            for (auto& v : ww) v /= cc;
            cc = 1;
        }
        Facet F;
        F.form = ww;
        F.offset = cc;
        for (const auto& p : P.points)
            if (dot(ww, p) == cc) F.touching.push_back(p);
        facets.emplace(facet_key(ww, cc), std::move(F));
    });
    for (auto& [k, F] : facets) P.facets.push_back(std::move(F));

    P.origin_interior = true;
    for (const auto& F : P.facets)
        if (is_zero(F.offset)) P.origin_interior = false;

    // Vertices: points whose touching facet forms span the whole space.
    for (const auto& p : P.points) {
        QMat forms;
        for (const auto& F : P.facets)
            if (dot(F.form, p) == F.offset) forms.push_back(F.form);
        if (!forms.empty() && qmat_rank(forms) == static_cast<size_t>(P.n))
            P.vertices.push_back(p);
    }
    return P;
}

bool is_convenient(const NewtonPolyhedron& P) { return P.full_dim && P.origin_interior; }

bool is_convenient(const Laurent& f) {
    if (f.is_zero()) return false;
    return is_convenient(newton_polyhedron(f));
}

Rat newton_degree(const NewtonPolyhedron& P, const ExpVec& a) {
    if (!is_convenient(P)) fail_precondition("newton_degree requires a convenient polyhedron");
    if (exp_is_zero(a)) return Rat(0);
    Rat best;
    bool first = true;
    for (const auto& F : P.facets) {
        Rat v = dot(F.form, a);
        if (first || v > best) best = v;
        first = false;
    }
    return best;
}

Rat newton_degree(const NewtonPolyhedron& P, const Laurent& g) {
    Rat best(0);
    for (const auto& [e, c] : g.terms()) best = std::max(best, newton_degree(P, e));
    return best;
}

namespace {

Rat det3(const ExpVec& a, const ExpVec& b, const ExpVec& c) {
    Int d = Int(a[0]) * (Int(b[1]) * c[2] - Int(b[2]) * c[1]) -
            Int(a[1]) * (Int(b[0]) * c[2] - Int(b[2]) * c[0]) +
            Int(a[2]) * (Int(b[0]) * c[1] - Int(b[1]) * c[0]);
    return Rat(d);
}

// Cyclic order of facet points around their centroid, exact; any affine
// chart of the facet plane preserves the convex cyclic order.
std::vector<ExpVec> cyclic_sort_facet(const std::vector<ExpVec>& pts) {
    size_t k = pts.size();
    std::vector<QVec> rel(k, QVec(2, Rat(0)));
    // Build two independent in-plane directions from point differences.
    QVec e1, e2;
    std::vector<QVec> diffs;
    for (size_t i = 1; i < k; ++i) {
        QVec d(3);
        for (int j = 0; j < 3; ++j) d[j] = Rat(pts[i][j] - pts[0][j]);
        diffs.push_back(d);
    }
    QMat basis;
    for (const auto& d : diffs) {
        QMat trial = basis;
        trial.push_back(d);
        if (qmat_rank(trial) > basis.size()) basis = trial;
        if (basis.size() == 2) break;
    }
    if (basis.size() != 2) fail_internal("facet is not two-dimensional");
    e1 = basis[0];
    e2 = basis[1];
    QVec centroid(3, Rat(0));
    for (const auto& p : pts)
        for (int j = 0; j < 3; ++j) centroid[j] += Rat(p[j]);
    for (int j = 0; j < 3; ++j) centroid[j] /= Rat(static_cast<long>(k));

    auto coords = [&](const ExpVec& p) {
        QVec d(3);
        for (int j = 0; j < 3; ++j) d[j] = Rat(p[j]) - centroid[j];
        Rat s(0), t(0);
        for (int j = 0; j < 3; ++j) {
            s += d[j] * e1[j];
            t += d[j] * e2[j];
        }
        return std::make_pair(s, t);
    };
    auto quadrant = [](const Rat& s, const Rat& t) {
        if (sgn(s) > 0 && sgn(t) >= 0) return 0;
        if (sgn(s) <= 0 && sgn(t) > 0) return 1;
        if (sgn(s) < 0 && sgn(t) <= 0) return 2;
        return 3;
    };
    std::vector<ExpVec> order = pts;
    std::sort(order.begin(), order.end(), [&](const ExpVec& a, const ExpVec& b) {
        auto [sa, ta] = coords(a);
        auto [sb, tb] = coords(b);
        int qa = quadrant(sa, ta), qb = quadrant(sb, tb);
        if (qa != qb) return qa < qb;
        Rat cross = sa * tb - ta * sb;
        if (!is_zero(cross)) return sgn(cross) > 0;
        return exp_lex_less(a, b);
    });
    return order;
}

} // namespace

Int milnor_number(const NewtonPolyhedron& P) {
    if (!is_convenient(P)) fail_precondition("milnor_number requires a convenient polyhedron");
    Int total(0);
    if (P.n == 1) {
        for (const auto& F : P.facets) total += abs(Int(F.touching[0][0]));
        return total;
    }
    if (P.n == 2) {
        for (const auto& F : P.facets) {
            std::vector<ExpVec> t = F.touching;
            std::sort(t.begin(), t.end(), exp_lex_less);
            const ExpVec& a = t.front();
            const ExpVec& b = t.back();
            total += abs(Int(a[0]) * b[1] - Int(a[1]) * b[0]);
        }
        return total;
    }
    if (P.n == 3) {
        for (const auto& F : P.facets) {
            std::vector<ExpVec> ring = cyclic_sort_facet(F.touching);
            for (size_t i = 1; i + 1 < ring.size(); ++i) {
                Rat d = det3(ring[0], ring[i], ring[i + 1]);
                total += abs(d.get_num());
            }
        }
        return total;
    }
    fail_precondition("milnor_number implemented for n <= 3");
}

bool nu_lex_before(const NewtonPolyhedron& P, const ExpVec& a, const ExpVec& b) {
    Rat na = newton_degree(P, a), nb = newton_degree(P, b);
    if (na != nb) return na < nb;
    return exp_lex_less(b, a);
}

std::vector<ExpVec> subdiagram_monomials(const NewtonPolyhedron& P) {
    if (!is_convenient(P)) fail_precondition("subdiagram monomials require a convenient polyhedron");
    ExpVec lo(P.n, 0), hi(P.n, 0);
    for (const auto& v : P.vertices)
        for (int j = 0; j < P.n; ++j) {
            lo[j] = std::min(lo[j], v[j]);
            hi[j] = std::max(hi[j], v[j]);
        }
    std::vector<ExpVec> out;
    ExpVec cur = lo;
    while (true) {
        bool interior = true;
        for (const auto& F : P.facets) {
            if (dot(F.form, cur) >= Rat(1)) {
                interior = false;
                break;
            }
        }
        if (interior) out.push_back(cur);
        int j = 0;
        while (j < P.n && cur[j] == hi[j]) {
            cur[j] = lo[j];
            ++j;
        }
        if (j == P.n) break;
        ++cur[j];
    }
    std::sort(out.begin(), out.end(),
              [&](const ExpVec& a, const ExpVec& b) { return nu_lex_before(P, a, b); });
    return out;
}

// ---------------------------------------------------------------------------
// Nondegeneracy
// ---------------------------------------------------------------------------

namespace {

using UPoly = std::vector<Rat>; // dense univariate, index = degree

UPoly up_trim(UPoly p) {
    while (!p.empty() && is_zero(p.back())) p.pop_back();
    return p;
}

int up_deg(const UPoly& p) { return static_cast<int>(p.size()) - 1; }

UPoly up_derivative(const UPoly& p) {
    UPoly d;
    for (size_t k = 1; k < p.size(); ++k) d.push_back(p[k] * Rat(static_cast<long>(k)));
    return up_trim(d);
}

UPoly up_rem(UPoly a, const UPoly& b) {
    a = up_trim(a);
    while (up_deg(a) >= up_deg(b) && !a.empty()) {
        Rat f = a.back() / b.back();
        int shift = up_deg(a) - up_deg(b);
        for (int i = 0; i <= up_deg(b); ++i) a[i + shift] -= f * b[i];
        a = up_trim(a);
    }
    return a;
}

UPoly up_gcd(UPoly a, UPoly b) {
    a = up_trim(a);
    b = up_trim(b);
    while (!b.empty()) {
        UPoly r = up_rem(a, b);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) {
        Rat lead = a.back();
        for (auto& c : a) c /= lead;
    }
    return a;
}

UPoly up_strip(UPoly p) {
    p = up_trim(p);
    size_t v = 0;
    while (v < p.size() && is_zero(p[v])) ++v;
    return UPoly(p.begin() + v, p.end());
}

std::vector<Int> small_divisors(Int a, size_t cap = 4096) {
    a = abs(a);
    std::vector<Int> out;
    if (a == 0) return out;
    for (Int d(1); d * d <= a && out.size() < cap; ++d) {
        if (a % d == 0) {
            out.push_back(d);
            out.push_back(a / d);
        }
    }
    return out;
}

// Rational roots of a nonconstant polynomial with nonzero constant term.
std::vector<Rat> up_rational_roots(const UPoly& p) {
    std::vector<Rat> roots;
    if (up_deg(p) < 1) return roots;
    Int lead(1);
    for (const auto& c : p) {
        lead = lcm(lead, c.get_den());
    }
    UPoly zp = p;
    for (auto& c : zp) c *= Rat(lead);
    std::vector<Int> ps = small_divisors(zp.front().get_num());
    std::vector<Int> qs = small_divisors(zp.back().get_num());
    std::set<std::string> seen;
    for (const Int& num : ps)
        for (const Int& den : qs)
            for (int s : {1, -1}) {
                Rat cand(s * num, den);
                cand.canonicalize();
                if (!seen.insert(rat_to_string(cand)).second) continue;
                Rat acc(0), pw(1);
                for (const auto& c : zp) {
                    acc += c * pw;
                    pw *= cand;
                }
                if (is_zero(acc)) roots.push_back(cand);
            }
    return roots;
}

// Extended gcd over all entries: finds alpha with sum alpha_i d_i = g > 0.
Int ext_gcd_vec(const std::vector<Int>& d, std::vector<Int>& alpha) {
    alpha.assign(d.size(), Int(0));
    Int g(0);
    for (size_t i = 0; i < d.size(); ++i) {
        if (d[i] == 0) continue;
        if (g == 0) {
            g = abs(d[i]);
            alpha[i] = sgn(d[i]);
            continue;
        }
        Int s, t, gg;
        mpz_gcdext(gg.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), g.get_mpz_t(), d[i].get_mpz_t());
        for (size_t j = 0; j < i; ++j) alpha[j] *= s;
        alpha[i] = t;
        g = gg;
    }
    return g;
}

std::vector<Rat> lift_segment_witness(const ExpVec& dir, const Rat& s0, int n) {
    std::vector<Int> d(dir.begin(), dir.end());
    std::vector<Int> alpha;
    Int g = ext_gcd_vec(d, alpha);
    if (g != 1) fail_internal("segment direction not primitive");
    std::vector<Rat> u(n, Rat(1));
    for (int i = 0; i < n; ++i) {
        Int a = alpha[i];
        Rat v(1);
        Rat base = a >= 0 ? s0 : Rat(1) / s0;
        Int k = abs(a);
        for (Int j(0); j < k; ++j) v *= base;
        u[i] = v;
    }
    return u;
}

bool kills_all_log_derivatives(const Laurent& face, const std::vector<Rat>& u) {
    for (int i = 1; i <= face.nu(); ++i) {
        Laurent d = face.log_derivative(i);
        Rat acc(0);
        for (const auto& [e, c] : d.terms()) {
            Rat t = c.constant_value();
            for (int j = 0; j < face.nu(); ++j) {
                Int k = abs(Int(e[j]));
                Rat base = e[j] >= 0 ? u[j] : Rat(1) / u[j];
                for (Int w(0); w < k; ++w) t *= base;
            }
            acc += t;
        }
        if (!is_zero(acc)) return false;
    }
    return true;
}

} // namespace

std::optional<std::vector<Rat>> segment_face_critical_point(const Laurent& face_poly) {
    int n = face_poly.nu();
    std::vector<ExpVec> pts = face_poly.support();
    if (pts.size() < 2) return std::nullopt; // vertex face: never critical on the torus
    ExpVec dir = exp_sub(pts.back(), pts.front());
    Int g(0);
    for (int32_t v : dir) g = gcd(g, Int(v));
    for (auto& v : dir) v = static_cast<int32_t>(Int(Int(v) / g).get_si());

    // Parametrize the segment: point = base + k * dir with k >= 0.
    int pivot = 0;
    while (dir[pivot] == 0) ++pivot;
    auto param = [&](const ExpVec& p) { return (p[pivot] - pts.front()[pivot]) / dir[pivot]; };
    std::vector<ExpVec> sorted = pts;
    std::sort(sorted.begin(), sorted.end(),
              [&](const ExpVec& a, const ExpVec& b) { return param(a) < param(b); });
    ExpVec base = sorted.front();
    int deg = param(sorted.back());
    UPoly p(deg + 1, Rat(0));
    for (const auto& [e, c] : face_poly.terms()) p[param(e)] = c.constant_value();

    // rank of (base | dir): rank 1 means the segment's line passes through 0.
    QMat m(2, QVec(n));
    for (int j = 0; j < n; ++j) {
        m[0][j] = Rat(base[j]);
        m[1][j] = Rat(dir[j]);
    }
    bool through_origin = qmat_rank(m) < 2;

    UPoly test;
    if (through_origin) {
        Rat lambda(0);
        if (!exp_is_zero(base)) lambda = Rat(base[pivot]) / Rat(dir[pivot]);
        // single condition: sum (lambda + k) c_k s^k has a nonzero root
        UPoly q(p.size(), Rat(0));
        for (size_t k = 0; k < p.size(); ++k) q[k] = (lambda + Rat(static_cast<long>(k))) * p[k];
        q = up_strip(q);
        if (q.empty()) {
            std::vector<Rat> u(n, Rat(1));
            return u; // identically critical
        }
        if (up_deg(q) < 1) return std::nullopt;
        test = q;
    } else {
        // two independent conditions: p(s) = p'(s) = 0 away from s = 0
        UPoly gcd_pp = up_strip(up_gcd(p, up_derivative(p)));
        if (gcd_pp.empty() || up_deg(gcd_pp) < 1) return std::nullopt;
        test = gcd_pp;
    }
    for (const Rat& s0 : up_rational_roots(test)) {
        if (is_zero(s0)) continue;
        std::vector<Rat> u = lift_segment_witness(dir, s0, n);
        if (kills_all_log_derivatives(face_poly, u)) return u;
    }
    // Degenerate with an irrational witness: signal with an empty point.
    return std::vector<Rat>{};
}

NondegeneracyReport is_nondegenerate(const Laurent& f, const NewtonPolyhedron& P,
                                     const NondegOptions& opt) {
    if (!is_convenient(P)) fail_precondition("nondegeneracy requires a convenient polynomial");
    NondegeneracyReport rep;
    int n = P.n;

    // Closed faces not containing the origin: close the facet touching sets
    // under intersection.
    std::set<std::vector<ExpVec>> faces;
    std::vector<std::vector<ExpVec>> work;
    for (const auto& F : P.facets) {
        auto t = F.touching;
        std::sort(t.begin(), t.end(), exp_lex_less);
        work.push_back(t);
    }
    for (const auto& t : work) faces.insert(t);
    bool grew = true;
    while (grew) {
        grew = false;
        std::vector<std::vector<ExpVec>> cur(faces.begin(), faces.end());
        for (size_t i = 0; i < cur.size(); ++i)
            for (size_t j = i + 1; j < cur.size(); ++j) {
                std::vector<ExpVec> inter;
                std::set_intersection(cur[i].begin(), cur[i].end(), cur[j].begin(), cur[j].end(),
                                      std::back_inserter(inter), exp_lex_less);
                if (!inter.empty() && faces.insert(inter).second) grew = true;
            }
    }

    bool all_exact = true;
    for (const auto& face_pts : faces) {
        // Restrict to monomials of f on the face.
        Laurent face(f.nu(), 0);
        for (const auto& e : face_pts) {
            auto c = f.coeff(e);
            if (!c.is_zero()) face.add_term(e, c);
        }
        if (face.term_count() <= 1) continue; // vertex faces are monomials

        QMat m;
        for (const auto& e : face_pts) {
            QVec row(n);
            for (int j = 0; j < n; ++j) row[j] = Rat(e[j]);
            m.push_back(row);
        }
        // Affine dimension of the face (its affine span misses 0, so linear
        // rank = affine dim + 1).
        size_t rank = qmat_rank(m);
        if (rank <= 1) continue;
        if (rank == 2) {
            auto w = segment_face_critical_point(face);
            if (w) {
                rep.verdict = NondegVerdict::degenerate;
                rep.witness_face = face.support();
                if (!w->empty()) rep.witness_point = *w;
                rep.note = w->empty() ? "irrational critical point on face" : "";
                return rep;
            }
            continue;
        }
        // Higher-dimensional faces: decide 1 in the saturated face ideal.
        std::vector<Laurent> gens;
        for (int i = 1; i <= n; ++i) gens.push_back(face.log_derivative(i));
        TriState st = torus_system_empty_q(gens, opt.budget);
        if (st == TriState::yes) continue;
        if (st == TriState::no) {
            rep.verdict = NondegVerdict::degenerate;
            rep.witness_face = face.support();
            rep.note = "face part has a torus critical point (no rational witness computed)";
            return rep;
        }
        // Budget exhausted: modular fallback.
        all_exact = false;
        if (opt.trials <= 0) {
            rep.verdict = NondegVerdict::unknown;
            rep.note = "budget exceeded and randomization disabled";
            return rep;
        }
        uint64_t state = opt.seed * 6364136223846793005ULL + 1442695040888963407ULL;
        int agreed = 0;
        for (int t = 0; t < opt.trials; ++t) {
            state = state * 6364136223846793005ULL + 1442695040888963407ULL;
            uint64_t p = 1000003ULL + (state % 1000000ULL) * 2;
            while (!is_probable_prime(p)) p += 2;
            TriState mt = torus_system_empty_zp(gens, p, opt.budget);
            if (mt == TriState::yes) {
                ++agreed;
                rep.primes.push_back(p);
            } else if (mt == TriState::no) {
                rep.verdict = NondegVerdict::degenerate;
                rep.witness_face = face.support();
                rep.note = "modular face check found a nonunit ideal (mod " + std::to_string(p) + ")";
                return rep;
            }
        }
        if (agreed == 0) {
            rep.verdict = NondegVerdict::unknown;
            rep.note = "face check inconclusive within budget";
            return rep;
        }
        rep.trials += agreed;
    }
    rep.verdict = all_exact ? NondegVerdict::nondegenerate_exact
                            : NondegVerdict::nondegenerate_probabilistic;
    if (rep.verdict == NondegVerdict::nondegenerate_probabilistic) rep.trials = opt.trials;
    return rep;
}

} // namespace frob
