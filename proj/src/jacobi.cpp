#include "frob/jacobi.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <set>

#include "frob/error.hpp"

namespace frob {

// Echelon rows remember how they were assembled from the labelled generator
// vectors, so a slice decomposition yields both basis coordinates and the
// rewriting cofactors in one pass.
struct GradedReducer::TrackedEchelon {
    size_t width = 0;
    std::vector<QVec> rows;
    std::vector<size_t> pivots;
    std::vector<std::map<int, Rat>> combos;

    explicit TrackedEchelon(size_t w) : width(w) {}

    // v = sum combo_label * generator_label + residue
    std::pair<QVec, std::map<int, Rat>> reduce(QVec v) const {
        std::map<int, Rat> combo;
        for (size_t k = 0; k < rows.size(); ++k) {
            const Rat& c = v[pivots[k]];
            if (is_zero(c)) continue;
            Rat f = c;
            for (size_t j = 0; j < width; ++j) v[j] -= f * rows[k][j];
            for (const auto& [lab, w] : combos[k]) {
                auto [it, ins] = combo.emplace(lab, f * w);
                if (!ins) {
                    it->second += f * w;
                    if (is_zero(it->second)) combo.erase(it);
                }
            }
        }
        return {std::move(v), std::move(combo)};
    }

    bool add(const QVec& v, int label) {
        auto [res, combo] = reduce(v);
        size_t pivot = width;
        for (size_t j = 0; j < width; ++j) {
            if (!is_zero(res[j])) {
                pivot = j;
                break;
            }
        }
        if (pivot == width) return false;
        Rat lead = res[pivot];
        for (auto& c : res) c /= lead;
        std::map<int, Rat> own;
        own[label] = Rat(1) / lead;
        for (const auto& [lab, w] : combo) {
            Rat val = -w / lead;
            if (!is_zero(val)) own[lab] = val;
        }
        rows.push_back(std::move(res));
        pivots.push_back(pivot);
        combos.push_back(std::move(own));
        return true;
    }
};

struct GradedReducer::Level {
    std::vector<ExpVec> monos;
    std::map<ExpVec, int> index;
    // relation label k -> (multiplier monomial, generator index)
    std::vector<std::pair<ExpVec, int>> rels;
    // admitted label = rels.size() + position; values are global basis slots
    std::vector<int> admitted_slots;
    std::vector<ExpVec> admitted;
    std::unique_ptr<TrackedEchelon> ech;
};

struct GradedReducer::Cache {
    std::map<Rat, Level> levels;
    std::mutex mtx;
};

namespace {

Rat nu_or_zero(const NewtonPolyhedron& P, const ExpVec& a) { return newton_degree(P, a); }

} // namespace

GradedReducer::GradedReducer(Laurent f, NewtonPolyhedron P, std::vector<Laurent> gs,
                             int64_t budget)
    : f_(std::move(f)), P_(std::move(P)), gs_(std::move(gs)), budget_(budget),
      cache_(std::make_shared<Cache>()) {
    if (!is_convenient(P_)) fail_precondition("reduction requires a convenient polynomial");
    int n = f_.nu();
    for (const auto& g : gs_) {
        if (g.nu() != n) fail_input("deformation variable count mismatch");
        if (g.nx() != 0) fail_input("deformation generators must be parameter-free");
        for (const auto& [e, c] : g.terms())
            if (newton_degree(P_, e) >= Rat(1))
                fail_precondition("deformation generator is not subdiagram: monomial " +
                                  Laurent::monomial_q(n, e, Rat(1)).to_string() +
                                  " has degree " + rat_to_string(newton_degree(P_, e)));
    }
    for (int i = 1; i <= n; ++i) {
        Laurent d = f_.log_derivative(i);
        Laurent sig(n, 0);
        for (const auto& [e, c] : d.terms())
            if (newton_degree(P_, e) == Rat(1)) sig.add_term(e, c);
        if (sig.is_zero()) fail_internal("vanishing principal part; polyhedron inconsistent");
        gen_f_.push_back(std::move(d));
        sigma_.push_back(std::move(sig));
    }
    gen_g_.resize(gs_.size());
    for (size_t k = 0; k < gs_.size(); ++k)
        for (int i = 1; i <= n; ++i) gen_g_[k].push_back(gs_[k].log_derivative(i));

    // Enumerate the basis: all candidate levels live among the degrees of
    // lattice points in n * P.
    std::set<Rat> candidate_levels;
    for (const auto& a : lattice_points_at_level(Rat(-1))) // sentinel: full n*P scan
        candidate_levels.insert(nu_or_zero(P_, a));
    for (const Rat& alpha : candidate_levels) {
        if (alpha > Rat(n)) continue;
        const Level& L = level(alpha);
        for (size_t j = 0; j < L.admitted.size(); ++j) {
            basis_.push_back(L.admitted[j]);
            degrees_.push_back(alpha);
        }
    }
    // Record basis slots inside the levels.
    {
        std::lock_guard<std::mutex> lock(cache_->mtx);
        size_t slot = 0;
        for (auto& [alpha, L] : cache_->levels) {
            if (alpha > Rat(n)) continue;
            for (size_t j = 0; j < L.admitted.size(); ++j) L.admitted_slots[j] = static_cast<int>(slot++);
        }
        if (slot != basis_.size()) fail_internal("basis slot bookkeeping mismatch");
    }

    Int vol_mu = milnor_number(P_);
    if (Int(static_cast<unsigned long>(basis_.size())) != vol_mu)
        fail_verification("monomial basis count " + std::to_string(basis_.size()) +
                          " does not match the Kouchnirenko number " + vol_mu.get_str() +
                          " (degenerate input?)");
}

std::vector<ExpVec> GradedReducer::lattice_points_at_level(const Rat& alpha) const {
    // alpha = -1 is a sentinel: enumerate every lattice point of n * P.
    bool full_scan = alpha < 0;
    Rat scale = full_scan ? Rat(f_.nu()) : alpha;
    int n = f_.nu();
    ExpVec lo(n, 0), hi(n, 0);
    for (const auto& v : P_.vertices)
        for (int j = 0; j < n; ++j) {
            Rat coord = Rat(v[j]) * scale;
            Int fl, ce;
            mpz_fdiv_q(fl.get_mpz_t(), coord.get_num().get_mpz_t(), coord.get_den().get_mpz_t());
            mpz_cdiv_q(ce.get_mpz_t(), coord.get_num().get_mpz_t(), coord.get_den().get_mpz_t());
            lo[j] = std::min(lo[j], static_cast<int32_t>(fl.get_si()));
            hi[j] = std::max(hi[j], static_cast<int32_t>(ce.get_si()));
        }
    std::vector<ExpVec> out;
    ExpVec cur = lo;
    while (true) {
        Rat nu = nu_or_zero(P_, cur);
        if (full_scan ? (nu <= scale) : (nu == scale)) out.push_back(cur);
        int j = 0;
        while (j < n && cur[j] == hi[j]) {
            cur[j] = lo[j];
            ++j;
        }
        if (j == n) break;
        ++cur[j];
    }
    // Scan order inside a level: larger exponent vectors first.
    std::sort(out.begin(), out.end(), [](const ExpVec& a, const ExpVec& b) {
        return exp_lex_less(b, a);
    });
    return out;
}

const GradedReducer::Level& GradedReducer::level(const Rat& alpha) const {
    std::lock_guard<std::mutex> lock(cache_->mtx);
    auto it = cache_->levels.find(alpha);
    if (it != cache_->levels.end()) return it->second;

    Level L;
    L.monos = lattice_points_at_level(alpha);
    for (size_t i = 0; i < L.monos.size(); ++i) L.index.emplace(L.monos[i], static_cast<int>(i));
    L.ech = std::make_unique<TrackedEchelon>(L.monos.size());

    if (alpha >= Rat(1)) {
        Rat prev = alpha - 1;
        for (const auto& m : lattice_points_at_level(prev)) {
            for (int i = 0; i < f_.nu(); ++i) {
                QVec v(L.monos.size(), Rat(0));
                bool nonzero = false;
                for (const auto& [s, c] : sigma_[i].terms()) {
                    ExpVec ms = exp_add(m, s);
                    if (nu_or_zero(P_, ms) != alpha) continue;
                    v[L.index.at(ms)] += c.constant_value();
                    nonzero = true;
                }
                if (!nonzero) continue;
                // labels index the generator list; dependent generators keep
                // their slot but never appear in a combination
                int label = static_cast<int>(L.rels.size());
                L.ech->add(v, label);
                L.rels.push_back({m, i});
            }
        }
    }
    int rel_count = static_cast<int>(L.rels.size());
    for (const auto& mono : L.monos) {
        QVec v(L.monos.size(), Rat(0));
        v[L.index.at(mono)] = 1;
        int label = rel_count + static_cast<int>(L.admitted.size());
        if (L.ech->add(v, label)) {
            if (alpha > Rat(f_.nu()))
                fail_verification("graded slice at level " + rat_to_string(alpha) +
                                  " exceeds the top spectral degree (degenerate input?)");
            L.admitted.push_back(mono);
            L.admitted_slots.push_back(-1);
        }
    }
    auto [pos, inserted] = cache_->levels.emplace(alpha, std::move(L));
    return pos->second;
}

std::vector<Mpoly> GradedReducer::reduce(const Laurent& h_in) const {
    int rr = r();
    Laurent work = h_in.nx() == rr ? h_in : h_in.with_params(rr);
    if (work.nu() != f_.nu()) fail_input("variable count mismatch in reduce");
    std::vector<Mpoly> coords(mu(), Mpoly(rr));
    int64_t steps = budget_;

    while (!work.is_zero()) {
        if (--steps < 0) fail_budget("reduction exceeded its step budget");
        Rat alpha(0);
        for (const auto& [e, c] : work.terms()) alpha = std::max(alpha, nu_or_zero(P_, e));
        const Level& L = level(alpha);

        // Collect the top slice grouped by parameter monomial.
        std::map<ExpVec, QVec> slices;
        Laurent rest(work.nu(), rr);
        for (const auto& [e, c] : work.terms()) {
            if (nu_or_zero(P_, e) != alpha) {
                rest.add_term(e, c);
                continue;
            }
            int idx = L.index.at(e);
            for (const auto& [xe, q] : c.terms()) {
                auto [it, ins] = slices.emplace(xe, QVec(L.monos.size(), Rat(0)));
                it->second[idx] += q;
            }
        }

        work = std::move(rest);
        for (const auto& [xe, vec] : slices) {
            auto [residue, combo] = L.ech->reduce(vec);
            for (const auto& q : residue)
                if (!is_zero(q)) fail_internal("slice reduction left a residue");
            Mpoly xmono = Mpoly::monomial(xe, Rat(1));
            for (const auto& [label, coeff] : combo) {
                if (label >= static_cast<int>(L.rels.size())) {
                    int slot = L.admitted_slots[label - L.rels.size()];
                    if (slot < 0) fail_internal("basis slot unset");
                    coords[slot] += xmono.scaled(coeff);
                    continue;
                }
                // Rewrite m * sigma_i via the full generator: the slice part
                // m (star) sigma_i equals m*Gen_i minus strictly lower terms.
                const auto& [m, gi] = L.rels[label];
                Laurent low(work.nu(), rr);
                // m * gen_f - m (star) sigma
                for (const auto& [s, c] : gen_f_[gi].terms()) {
                    ExpVec ms = exp_add(m, s);
                    bool in_star = sigma_[gi].terms().count(s) && nu_or_zero(P_, ms) == alpha;
                    if (in_star) continue;
                    low.add_term(ms, Mpoly::constant(rr, c.constant_value()));
                }
                for (size_t k = 0; k < gs_.size(); ++k) {
                    for (const auto& [s, c] : gen_g_[k][gi].terms()) {
                        ExpVec xk(rr, 0);
                        xk[k] = 1;
                        low.add_term(exp_add(m, s),
                                     Mpoly::monomial(xk, c.constant_value()));
                    }
                }
                // slice part = m*Gen - low == -low (mod the ideal)
                work -= low.scaled(xmono.scaled(coeff));
            }
        }
    }
    return coords;
}

QVec GradedReducer::reduce_q(const Laurent& h) const {
    if (r() != 0) fail_internal("reduce_q requires the x-free reducer");
    auto coords = reduce(h);
    QVec out(coords.size());
    for (size_t i = 0; i < coords.size(); ++i) out[i] = coords[i].constant_value();
    return out;
}

Laurent GradedReducer::combination(const std::vector<Mpoly>& coords) const {
    Laurent out(f_.nu(), r());
    for (size_t i = 0; i < coords.size(); ++i) out.add_term(basis_[i], coords[i]);
    return out;
}

// ---------------------------------------------------------------------------

namespace {

// F = f + sum_k x_k g_k; rejects higher parameter degrees.
void split_deformation(const Laurent& F, Laurent& f, std::vector<Laurent>& gs) {
    int n = F.nu(), r = F.nx();
    f = Laurent(n, 0);
    gs.assign(r, Laurent(n, 0));
    for (const auto& [e, c] : F.terms()) {
        for (const auto& [xe, q] : c.terms()) {
            int64_t d = exp_total(xe);
            if (d == 0) {
                f.add_term(e, Mpoly::constant(0, q));
            } else if (d == 1) {
                int k = 0;
                while (xe[k] == 0) ++k;
                gs[k].add_term(e, Mpoly::constant(0, q));
            } else {
                fail_input("deformation must be affine-linear in the parameters");
            }
        }
    }
}

} // namespace

JacobianIdeal build_ideal(const Laurent& F, int64_t budget) {
    Laurent f;
    std::vector<Laurent> gs;
    split_deformation(F, f, gs);
    if (f.is_zero()) fail_precondition("empty constant part");
    NewtonPolyhedron P = newton_polyhedron(f);
    if (!is_convenient(P)) fail_precondition("polynomial is not convenient");

    JacobianIdeal I;
    I.reducer = std::make_shared<GradedReducer>(f, P, gs, budget);
    for (int i = 1; i <= F.nu(); ++i) I.generators.push_back(F.log_derivative(i));
    std::vector<Laurent> gens0;
    for (int i = 1; i <= F.nu(); ++i) gens0.push_back(f.log_derivative(i));
    I.groebner = saturated_laurent_ideal_q(gens0, budget);
    I.monomial_order = "degrevlex (saturation variable eliminated first)";
    return I;
}

Laurent normal_form(const Laurent& h, const JacobianIdeal& I) {
    return I.reducer->combination(I.reducer->reduce(h));
}

JacobiBasis monomial_basis(const Laurent& f, int64_t budget) {
    if (f.nx() != 0) fail_input("monomial_basis expects a parameter-free polynomial");
    NewtonPolyhedron P = newton_polyhedron(f);
    if (!is_convenient(P)) fail_precondition("polynomial is not convenient");
    JacobiBasis B;
    B.reducer = std::make_shared<GradedReducer>(f, P, std::vector<Laurent>{}, budget);
    B.monomials = B.reducer->basis_monomials();
    B.degrees = B.reducer->degrees();
    B.mu = B.monomials.size();
    B.n = f.nu();

    // Endpoint and symmetry facts for the degree ladder.
    if (B.degrees.front() != Rat(0) || (B.mu > 1 && B.degrees[1] == Rat(0)))
        fail_verification("spectrum does not start with a simple 0");
    if (B.degrees.back() != Rat(B.n) || (B.mu > 1 && B.degrees[B.mu - 2] == Rat(B.n)))
        fail_verification("spectrum does not end with a simple n");
    for (size_t i = 0; i < B.mu; ++i)
        if (B.degrees[i] + B.degrees[B.mu - 1 - i] != Rat(B.n))
            fail_verification("spectrum is not symmetric about n/2");
    return B;
}

SpectrumData spectrum(const Laurent& f, int64_t budget) {
    JacobiBasis B = monomial_basis(f, budget);
    return SpectrumData{B.degrees};
}

PMat multiplication_matrix(const Laurent& h, const JacobianIdeal& I) {
    const GradedReducer& R = *I.reducer;
    size_t mu = R.mu();
    Laurent hh = h.nx() == R.r() ? h : h.with_params(R.r());
    PMat M = pmat_zero(mu, mu, R.r());
    for (size_t j = 0; j < mu; ++j) {
        Laurent bj = Laurent::monomial(R.n(), R.r(), R.basis_monomials()[j],
                                       Mpoly::constant(R.r(), Rat(1)));
        auto coords = R.reduce(hh * bj);
        for (size_t i = 0; i < mu; ++i) M[i][j] = coords[i];
    }
    return M;
}

QMat residue_pairing(const JacobiBasis& B) {
    const GradedReducer& R = *B.reducer;
    size_t mu = R.mu();
    QMat g = qmat_zero(mu, mu);
    for (size_t i = 0; i < mu; ++i)
        for (size_t j = i; j < mu; ++j) {
            Laurent prod = Laurent::monomial_q(B.n, exp_add(B.monomials[i], B.monomials[j]), Rat(1));
            QVec coords = R.reduce_q(prod);
            g[i][j] = coords[mu - 1];
            g[j][i] = g[i][j];
            if (!is_zero(g[i][j]) && B.degrees[i] + B.degrees[j] != Rat(B.n))
                fail_verification("residue pairing is not graded");
        }
    if (is_zero(qmat_det(g)))
        fail_verification("degenerate residue pairing (non-canonical basis)");
    return g;
}

} // namespace frob
