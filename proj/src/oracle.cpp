#include "frob/oracle.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

#include "frob/error.hpp"

namespace frob {

namespace {

std::vector<ExpVec> box_monomials(int n, int box) {
    std::vector<ExpVec> out;
    ExpVec cur(n, -box);
    while (true) {
        out.push_back(cur);
        int j = 0;
        while (j < n && cur[j] == box) {
            cur[j] = -box;
            ++j;
        }
        if (j == n) break;
        ++cur[j];
    }
    return out;
}

bool in_box(const ExpVec& e, int box) {
    for (int32_t v : e)
        if (v < -box || v > box) return false;
    return true;
}

// Rows u^c * (u_i df/du_i) whose support stays inside the big box.
std::vector<Laurent> windowed_relations(const Laurent& f, int box) {
    int n = f.nu();
    std::vector<Laurent> rows;
    for (int i = 1; i <= n; ++i) {
        Laurent g = f.log_derivative(i);
        if (g.is_zero()) continue;
        ExpVec lo(n, 0), hi(n, 0);
        bool first = true;
        for (const auto& [e, c] : g.terms()) {
            for (int j = 0; j < n; ++j) {
                lo[j] = first ? e[j] : std::min(lo[j], e[j]);
                hi[j] = first ? e[j] : std::max(hi[j], e[j]);
            }
            first = false;
        }
        ExpVec cur(n), stop(n);
        bool any = true;
        for (int j = 0; j < n; ++j) {
            cur[j] = -box - lo[j];
            stop[j] = box - hi[j];
            if (cur[j] > stop[j]) any = false;
        }
        if (!any) continue;
        while (true) {
            rows.push_back(g * Laurent::monomial_q(n, cur, Rat(1)));
            int j = 0;
            while (j < n && cur[j] == stop[j]) {
                cur[j] = -box - lo[j];
                ++j;
            }
            if (j == n) break;
            ++cur[j];
        }
    }
    return rows;
}

// dim of span{inner monomials, optionally filtered to degree <= alpha}
// modulo the visible ideal rows: relation rows live in the big box, and the
// intersection with the inner span is read off a block-ordered echelon.
struct BoxDim {
    Int dim;
    Int relation_rank;
};

BoxDim filtered_box_dim(const Laurent& f, const NewtonPolyhedron* P, int small_box, int big_box,
                        const std::optional<Rat>& alpha) {
    int n = f.nu();
    std::vector<ExpVec> big = box_monomials(n, big_box);
    if (big.size() > 6000) fail_budget("oracle box grew too large");

    auto inner = [&](const ExpVec& e) {
        if (!in_box(e, small_box)) return false;
        if (alpha && newton_degree(*P, e) > *alpha) return false;
        return true;
    };
    std::vector<ExpVec> outside, keep;
    for (const auto& m : big)
        (inner(m) ? keep : outside).push_back(m);
    std::vector<ExpVec> ordered = outside;
    ordered.insert(ordered.end(), keep.begin(), keep.end());
    std::map<ExpVec, int> index;
    for (size_t i = 0; i < ordered.size(); ++i) index.emplace(ordered[i], static_cast<int>(i));

    Echelon full(ordered.size());
    Echelon proj(outside.size());
    for (const auto& row : windowed_relations(f, big_box)) {
        QVec v(ordered.size(), Rat(0));
        for (const auto& [e, c] : row.terms()) v[index.at(e)] = c.constant_value();
        full.add(v);
        QVec vh(v.begin(), v.begin() + static_cast<long>(outside.size()));
        proj.add(vh);
    }
    Int cut(static_cast<unsigned long>(full.dim() - proj.dim()));
    return BoxDim{Int(static_cast<unsigned long>(keep.size())) - cut,
                  Int(static_cast<unsigned long>(full.dim()))};
}

// Stabilize over the relation window first, then over the sample window.
Int stabilized_dim(const Laurent& f, const NewtonPolyhedron* P, const std::optional<Rat>& alpha,
                   int max_box, Int* rank_out) {
    Int prev_outer(-1);
    for (int small = 1; small <= max_box; ++small) {
        Int prev_inner(-1);
        Int settled(-1);
        for (int big = small; big <= small + max_box; ++big) {
            BoxDim bd = filtered_box_dim(f, P, small, big, alpha);
            if (rank_out) *rank_out = bd.relation_rank;
            if (bd.dim == prev_inner) {
                settled = bd.dim;
                break;
            }
            prev_inner = bd.dim;
        }
        if (settled < 0) fail_budget("oracle relation window did not stabilize");
        if (settled == prev_outer) return settled;
        prev_outer = settled;
    }
    fail_budget("oracle sample window did not stabilize");
}

} // namespace

OracleResult jacobi_dim_bruteforce(const Laurent& f, int max_box) {
    if (f.nx() != 0) fail_input("oracle expects a parameter-free polynomial");
    Int rank(0);
    Int dim = stabilized_dim(f, nullptr, std::nullopt, max_box, &rank);
    return OracleResult{dim, "windowed box rank", rank};
}

OracleResult graded_dim_bruteforce(const Laurent& f, const Rat& alpha, int max_box) {
    if (f.nx() != 0) fail_input("oracle expects a parameter-free polynomial");
    NewtonPolyhedron P = newton_polyhedron(f);
    if (!is_convenient(P)) fail_precondition("graded oracle requires a convenient polynomial");

    // filtered dimension at alpha minus the one at the previous attained level
    std::optional<Rat> below;
    for (const auto& m : box_monomials(f.nu(), std::max(2, max_box))) {
        Rat d = newton_degree(P, m);
        if (d < alpha && (!below || d > *below)) below = d;
    }
    Int rank(0);
    Int fd = stabilized_dim(f, &P, alpha, max_box, &rank);
    Int fd_below = below ? stabilized_dim(f, &P, *below, max_box, nullptr) : Int(0);
    return OracleResult{fd - fd_below, "windowed graded box rank", rank};
}

Rat kontsevich_Nd(int d) {
    if (d < 1) fail_input("kontsevich_Nd requires d >= 1");
    static auto binom = [](long n, long k) -> Rat {
        if (k < 0 || k > n) return Rat(0);
        Int num(1), den(1);
        for (long i = 0; i < k; ++i) {
            num *= Int(n - i);
            den *= Int(i + 1);
        }
        Rat r(num, den);
        r.canonicalize();
        return r;
    };
    std::vector<Rat> N(static_cast<size_t>(d) + 1, Rat(0));
    N[1] = 1;
    for (long dd = 2; dd <= d; ++dd) {
        Rat acc(0);
        for (long a = 1; a < dd; ++a) {
            long b = dd - a;
            Rat term = N[a] * N[b] * Rat(a * a * b) *
                       (Rat(b) * binom(3 * dd - 4, 3 * a - 2) - Rat(a) * binom(3 * dd - 4, 3 * a - 1));
            acc += term;
        }
        N[dd] = acc;
    }
    return N[d];
}

} // namespace frob
