#include "frob/hm.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "frob/error.hpp"

namespace frob {

namespace {

int64_t ydeg(const ExpVec& e, int r) {
    int64_t d = 0;
    for (size_t i = r; i < e.size(); ++i) d += e[i];
    return d;
}

Mpoly extend_vars(const Mpoly& p, int total) {
    Mpoly q(total);
    for (const auto& [e, c] : p.terms()) {
        ExpVec ee = e;
        ee.resize(total, 0);
        q.add_term(ee, c);
    }
    return q;
}

PMat extend_mat(const PMat& M, int total) {
    PMat out = M;
    for (auto& row : out)
        for (auto& p : row) p = extend_vars(p, total);
    return out;
}

Mpoly y_slice(const Mpoly& p, int r, int64_t d) {
    Mpoly out(p.nvars());
    for (const auto& [e, c] : p.terms())
        if (ydeg(e, r) == d) out.add_term(e, c);
    return out;
}

PMat y_slice_mat(const PMat& M, int r, int64_t d) {
    PMat out = M;
    for (auto& row : out)
        for (auto& p : row) p = y_slice(p, r, d);
    return out;
}

PMat binf_commutator_vec(const QVec& alpha, const PMat& M) {
    PMat out = M;
    for (size_t i = 0; i < M.size(); ++i)
        for (size_t j = 0; j < M.size(); ++j) out[i][j] = M[i][j].scaled(alpha[i] - alpha[j]);
    return out;
}

// Unknown coefficient slots for one elimination order.
struct Slot {
    int mat; // 0 = B0, 1..r = C, r+1..r+ell = D
    size_t a, b;
    ExpVec mono;
};

struct Assembler {
    std::map<std::vector<int32_t>, int> row_ix;
    std::vector<std::map<int, Rat>> rows;
    std::vector<Rat> rhs;
    std::vector<std::string> tags;

    int row(const std::vector<int32_t>& key, const std::string& tag) {
        auto [it, inserted] = row_ix.emplace(key, static_cast<int>(rows.size()));
        if (inserted) {
            rows.push_back({});
            rhs.push_back(Rat(0));
            tags.push_back(tag);
        }
        return it->second;
    }
    void add(int row_id, int col, const Rat& v) {
        auto [it, inserted] = rows[row_id].emplace(col, v);
        if (!inserted) {
            it->second += v;
            if (is_zero(it->second)) rows[row_id].erase(it);
        }
    }
};

std::vector<int32_t> row_key(int fam, int p1, int p2, size_t a, size_t b, const ExpVec& mono) {
    std::vector<int32_t> k{fam, p1, p2, static_cast<int32_t>(a), static_cast<int32_t>(b)};
    k.insert(k.end(), mono.begin(), mono.end());
    return k;
}

} // namespace

// ---------------------------------------------------------------------------
// Extension solver
// ---------------------------------------------------------------------------

namespace {

struct SolverState {
    int r, ell, nz;
    size_t mu;
    QVec alpha;
    PMat B0;
    std::vector<PMat> C;
    std::vector<PMat> D;
};

// Full relation residuals of the current state, for right-hand sides and for
// final verification. Families:
//  0: pinning (handled separately)
//  1: [C_i, C_j]            (p1 = i, p2 = j)
//  2: [B0, C_i]
//  3: [C_i, D_k]
//  4: [B0, D_k]
//  5: [D_k, D_l]
//  6: dC_i/dx_j - dC_j/dx_i
//  7: dC_i/dy_k - dD_k/dx_i
//  8: dD_k/dy_l - dD_l/dy_k
//  9: C_i + dB0/dx_i - [Binf, C_i]
// 10: D_k + dB0/dy_k - [Binf, D_k]
PMat family_residual(const SolverState& st, int fam, int p1, int p2) {
    switch (fam) {
        case 1: return pmat_commutator(st.C[p1], st.C[p2]);
        case 2: return pmat_commutator(st.B0, st.C[p1]);
        case 3: return pmat_commutator(st.C[p1], st.D[p2]);
        case 4: return pmat_commutator(st.B0, st.D[p1]);
        case 5: return pmat_commutator(st.D[p1], st.D[p2]);
        case 6:
            return pmat_sub(pmat_derivative(st.C[p1], p2), pmat_derivative(st.C[p2], p1));
        case 7:
            return pmat_sub(pmat_derivative(st.C[p1], st.r + p2), pmat_derivative(st.D[p2], p1));
        case 8:
            return pmat_sub(pmat_derivative(st.D[p1], st.r + p2),
                            pmat_derivative(st.D[p2], st.r + p1));
        case 9:
            return pmat_sub(pmat_add(st.C[p1], pmat_derivative(st.B0, p1)),
                            binf_commutator_vec(st.alpha, st.C[p1]));
        case 10:
            return pmat_sub(pmat_add(st.D[p1], pmat_derivative(st.B0, st.r + p1)),
                            binf_commutator_vec(st.alpha, st.D[p1]));
        default: fail_internal("unknown relation family");
    }
}

struct FamilySpec {
    int fam, p1, p2;
    int64_t target_shift; // target ydeg at step m is m - target_shift
};

std::vector<FamilySpec> family_list(int r, int ell, int step) {
    std::vector<FamilySpec> fams;
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j) {
            fams.push_back({1, i, j, 0});
            fams.push_back({6, i, j, 0});
        }
    for (int i = 0; i < r; ++i) {
        fams.push_back({2, i, -1, 0});
        fams.push_back({9, i, -1, 0});
    }
    for (int k = 0; k < ell; ++k) {
        fams.push_back({4, k, -1, 1});
        fams.push_back({10, k, -1, 1});
        for (int i = 0; i < r; ++i) {
            fams.push_back({3, i, k, 1});
            fams.push_back({7, i, k, 1});
        }
        for (int l = k + 1; l < ell; ++l) {
            if (step >= 2) fams.push_back({5, k, l, 1});
            if (step >= 2) fams.push_back({8, k, l, 2});
        }
    }
    return fams;
}

} // namespace

HMDeformation hm_extend(const FrobTypeStructure& S, int ell,
                        const std::vector<Mpoly>& f_choices, const HMOptions& opt) {
    if (ell < 0) fail_input("negative number of deformation variables");
    int r = S.r;
    int nz = r + ell;
    size_t mu = S.mu;
    int N = opt.order;

    HMDeformation H;
    H.base = S;
    H.ell = ell;
    H.N = N;
    H.mu = mu;
    H.r = r;
    H.alpha = S.alpha;
    H.g = S.g;
    H.B0 = extend_mat(S.B0, nz);
    for (const auto& Ck : S.C) H.C.push_back(extend_mat(Ck, nz));
    if (ell == 0) return H;

    if (f_choices.size() != mu) fail_input("need one prescribed series per basis element");
    H.f_choices = f_choices;
    for (const auto& p : f_choices) {
        if (p.nvars() != nz) fail_input("prescribed series must live in (x, y) variables");
        for (const auto& [e, c] : p.terms())
            if (ydeg(e, r) == 0) fail_precondition("prescribed series must vanish at y = 0");
    }
    if (opt.germ_mode) {
        if (!check_GC(S, std::vector<Rat>(r, Rat(0))))
            fail_precondition("generation fails at the origin");
    } else {
        if (!check_GC_global(S)) fail_precondition("generation over Q[x] fails");
    }

    // Weight data for the x-support of the unknowns. Usable when the base
    // deformation is Newton-homogeneous and the prescribed series are the
    // canonical coordinate choices.
    bool have_weights = false;
    std::vector<Rat> wx(r), wy(ell);
    std::vector<Rat> charge_C(r), charge_D(ell);
    if (S.deformation) {
        const auto& D = *S.deformation;
        const NewtonPolyhedron& P = D.basis.reducer->polyhedron();
        have_weights = true;
        for (const auto& [e, c] : D.f.terms())
            if (newton_degree(P, e) != Rat(1)) have_weights = false;
        for (int k = 0; k < r && have_weights; ++k) {
            std::optional<Rat> deg;
            for (const auto& [e, c] : D.gs[k].terms()) {
                Rat nu = newton_degree(P, e);
                if (!deg)
                    deg = nu;
                else if (*deg != nu)
                    have_weights = false;
            }
            if (!have_weights || !deg) {
                have_weights = false;
                break;
            }
            charge_C[k] = *deg;
            wx[k] = Rat(1) - *deg;
            if (wx[k] <= 0) have_weights = false;
        }
        // canonical coordinate prescription: f_i is 0 or a plain y_k
        std::vector<int> assigned(ell, -1);
        for (size_t i = 0; i < mu && have_weights; ++i) {
            const Mpoly& p = f_choices[i];
            if (p.is_zero()) continue;
            if (p.terms().size() != 1) {
                have_weights = false;
                break;
            }
            const auto& [e, c] = *p.terms().begin();
            int which = -1;
            for (int k = 0; k < ell; ++k) {
                if (e[r + k] == 1 && exp_total(e) == 1) which = k;
            }
            if (which < 0 || c != Rat(1) || assigned[which] >= 0) {
                have_weights = false;
                break;
            }
            assigned[which] = static_cast<int>(i);
        }
        for (int k = 0; k < ell && have_weights; ++k) {
            if (assigned[k] < 0) {
                have_weights = false;
                break;
            }
            charge_D[k] = S.alpha[assigned[k]];
            wy[k] = Rat(1) - charge_D[k];
        }
    }

    SolverState st{r, ell, nz, mu, S.alpha, H.B0, H.C, {}};
    for (int k = 0; k < ell; ++k) st.D.push_back(pmat_zero(mu, mu, nz));

    // x-monomials subject to a weight budget (or a plain degree cap).
    std::function<void(int, const Rat&, int, ExpVec&, std::vector<ExpVec>&)> enum_x =
        [&](int pos, const Rat& budget, int cap, ExpVec& cur, std::vector<ExpVec>& out) {
            if (have_weights && budget < 0) return;
            if (pos == r) {
                out.push_back(cur);
                return;
            }
            for (int e = 0;; ++e) {
                cur[pos] = e;
                if (have_weights) {
                    Rat rem = budget - wx[pos] * Rat(e);
                    if (rem < 0) break;
                    enum_x(pos + 1, rem, cap, cur, out);
                } else {
                    int64_t used = 0;
                    for (int t = 0; t <= pos; ++t) used += cur[t];
                    if (used > cap) break;
                    enum_x(pos + 1, budget, cap, cur, out);
                }
            }
            cur[pos] = 0;
        };

    int xcap = 2; // escalated on demand in the capped mode
    for (int step = 1; step <= N + 1; ++step) {
        bool solved = false;
        while (!solved) {
            // --- slots
            std::vector<Slot> slots;
            auto add_slots = [&](int mat, const Rat& charge) {
                int64_t want = (mat > r) ? step - 1 : step; // D one order behind
                // y-monomials of exactly the wanted degree
                std::vector<ExpVec> ymonos;
                ExpVec ycur(ell, 0);
                std::function<void(int, int64_t)> yrec = [&](int pos, int64_t left) {
                    if (pos == ell) {
                        if (left == 0) ymonos.push_back(ycur);
                        return;
                    }
                    for (int e = 0; e <= left; ++e) {
                        ycur[pos] = e;
                        yrec(pos + 1, left - e);
                    }
                    ycur[pos] = 0;
                };
                yrec(0, want);
                for (size_t a = 0; a < mu; ++a)
                    for (size_t b = 0; b < mu; ++b)
                        for (const auto& ym : ymonos) {
                            Rat budget(0);
                            if (have_weights) {
                                budget = charge + S.alpha[b] - S.alpha[a];
                                for (int k = 0; k < ell; ++k) budget -= wy[k] * Rat(ym[k]);
                            }
                            std::vector<ExpVec> xs;
                            ExpVec xcur(r, 0);
                            enum_x(0, budget, xcap, xcur, xs);
                            for (const auto& xm : xs) {
                                ExpVec mono = xm;
                                mono.insert(mono.end(), ym.begin(), ym.end());
                                slots.push_back({mat, a, b, mono});
                            }
                        }
            };
            add_slots(0, Rat(1));
            for (int i = 0; i < r; ++i) add_slots(1 + i, charge_C[i]);
            for (int k = 0; k < ell; ++k) add_slots(r + 1 + k, charge_D[k]);

            std::map<std::vector<int32_t>, int> col_ix;
            for (size_t s = 0; s < slots.size(); ++s) {
                std::vector<int32_t> key{slots[s].mat, static_cast<int32_t>(slots[s].a),
                                         static_cast<int32_t>(slots[s].b)};
                key.insert(key.end(), slots[s].mono.begin(), slots[s].mono.end());
                col_ix.emplace(key, static_cast<int>(s));
            }

            Assembler as;
            // --- pinning rows: D_k[i][0] coefficients equal d f_i / d y_k
            for (int k = 0; k < ell; ++k)
                for (size_t i = 0; i < mu; ++i) {
                    Mpoly want = f_choices[i].derivative(r + k);
                    Mpoly have = st.D[k][i][0];
                    Mpoly diff = want - have;
                    std::set<ExpVec> monos;
                    for (const auto& [e, c] : diff.terms())
                        if (ydeg(e, r) == step - 1) monos.insert(e);
                    // also pin every candidate slot in this entry
                    for (const auto& s : slots)
                        if (s.mat == r + 1 + k && s.a == i && s.b == 0) monos.insert(s.mono);
                    for (const auto& e : monos) {
                        int rid = as.row(row_key(0, k, -1, i, 0, e), "pinning");
                        as.rhs[rid] = diff.coeff(e);
                    }
                }
            // unknown coefficients in pinned rows
            for (size_t s = 0; s < slots.size(); ++s) {
                const Slot& sl = slots[s];
                if (sl.mat > r && sl.b == 0 && ydeg(sl.mono, r) == step - 1) {
                    int k = sl.mat - r - 1;
                    int rid = as.row(row_key(0, k, -1, sl.a, 0, sl.mono), "pinning");
                    as.add(rid, static_cast<int>(s), Rat(1));
                }
            }

            // --- relation rows
            auto fams = family_list(r, ell, step);
            // base slices of the state for the known factors in products
            PMat B0_0 = y_slice_mat(st.B0, r, 0);
            std::vector<PMat> C_0, D_0;
            for (const auto& M : st.C) C_0.push_back(y_slice_mat(M, r, 0));
            for (const auto& M : st.D) D_0.push_back(y_slice_mat(M, r, 0));

            for (const auto& fs : fams) {
                int64_t target = step - fs.target_shift;
                if (target < 0) continue;
                std::string tag = "family " + std::to_string(fs.fam) + " (" +
                                  std::to_string(fs.p1) + "," + std::to_string(fs.p2) +
                                  ") order " + std::to_string(target);
                // rhs: minus the current residual at the target order
                PMat res = family_residual(st, fs.fam, fs.p1, fs.p2);
                for (size_t a = 0; a < mu; ++a)
                    for (size_t b = 0; b < mu; ++b)
                        for (const auto& [e, c] : res[a][b].terms())
                            if (ydeg(e, r) == target) {
                                int rid = as.row(row_key(fs.fam, fs.p1, fs.p2, a, b, e), tag);
                                as.rhs[rid] -= c;
                            }

                // unknown contributions
                auto scatter_product = [&](const PMat& known0, bool known_left, int slot_mat,
                                           int sign) {
                    for (size_t s = 0; s < slots.size(); ++s) {
                        const Slot& sl = slots[s];
                        if (sl.mat != slot_mat) continue;
                        if (known_left) {
                            // (K * U)[p][sl.b], p over rows with K[p][sl.a] != 0
                            for (size_t p = 0; p < mu; ++p)
                                for (const auto& [e, c] : known0[p][sl.a].terms()) {
                                    ExpVec mono = exp_add(e, sl.mono);
                                    if (ydeg(mono, r) != target) continue;
                                    int rid = as.row(row_key(fs.fam, fs.p1, fs.p2, p, sl.b, mono), tag);
                                    as.add(rid, static_cast<int>(s), Rat(sign) * c);
                                }
                        } else {
                            // (U * K)[sl.a][q]
                            for (size_t q = 0; q < mu; ++q)
                                for (const auto& [e, c] : known0[sl.b][q].terms()) {
                                    ExpVec mono = exp_add(e, sl.mono);
                                    if (ydeg(mono, r) != target) continue;
                                    int rid = as.row(row_key(fs.fam, fs.p1, fs.p2, sl.a, q, mono), tag);
                                    as.add(rid, static_cast<int>(s), Rat(sign) * c);
                                }
                        }
                    }
                };
                auto scatter_entry = [&](int slot_mat, const std::function<Rat(const Slot&)>& coeff) {
                    for (size_t s = 0; s < slots.size(); ++s) {
                        const Slot& sl = slots[s];
                        if (sl.mat != slot_mat) continue;
                        Rat c = coeff(sl);
                        if (is_zero(c)) continue;
                        if (ydeg(sl.mono, r) != target) continue;
                        int rid = as.row(row_key(fs.fam, fs.p1, fs.p2, sl.a, sl.b, sl.mono), tag);
                        as.add(rid, static_cast<int>(s), c);
                    }
                };
                auto scatter_derivative = [&](int slot_mat, int var, int sign) {
                    for (size_t s = 0; s < slots.size(); ++s) {
                        const Slot& sl = slots[s];
                        if (sl.mat != slot_mat) continue;
                        if (sl.mono[var] == 0) continue;
                        ExpVec mono = sl.mono;
                        Rat c = Rat(sign) * Rat(mono[var]);
                        mono[var] -= 1;
                        if (ydeg(mono, r) != target) continue;
                        int rid = as.row(row_key(fs.fam, fs.p1, fs.p2, sl.a, sl.b, mono), tag);
                        as.add(rid, static_cast<int>(s), c);
                    }
                };

                switch (fs.fam) {
                    case 1: // [C_i, C_j]
                        scatter_product(C_0[fs.p2], false, 1 + fs.p1, 1);  // C_i^u * C_j
                        scatter_product(C_0[fs.p2], true, 1 + fs.p1, -1);  // - C_j * C_i^u
                        scatter_product(C_0[fs.p1], true, 1 + fs.p2, 1);   // C_i * C_j^u
                        scatter_product(C_0[fs.p1], false, 1 + fs.p2, -1); // - C_j^u * C_i
                        break;
                    case 2: // [B0, C_i]
                        scatter_product(C_0[fs.p1], false, 0, 1);
                        scatter_product(C_0[fs.p1], true, 0, -1);
                        scatter_product(B0_0, true, 1 + fs.p1, 1);
                        scatter_product(B0_0, false, 1 + fs.p1, -1);
                        break;
                    case 3: // [C_i, D_k]
                        scatter_product(D_0[fs.p2], false, 1 + fs.p1, 1);
                        scatter_product(D_0[fs.p2], true, 1 + fs.p1, -1);
                        scatter_product(C_0[fs.p1], true, r + 1 + fs.p2, 1);
                        scatter_product(C_0[fs.p1], false, r + 1 + fs.p2, -1);
                        break;
                    case 4: // [B0, D_k]
                        scatter_product(D_0[fs.p1], false, 0, 1);
                        scatter_product(D_0[fs.p1], true, 0, -1);
                        scatter_product(B0_0, true, r + 1 + fs.p1, 1);
                        scatter_product(B0_0, false, r + 1 + fs.p1, -1);
                        break;
                    case 5: // [D_k, D_l]
                        scatter_product(D_0[fs.p2], false, r + 1 + fs.p1, 1);
                        scatter_product(D_0[fs.p2], true, r + 1 + fs.p1, -1);
                        scatter_product(D_0[fs.p1], true, r + 1 + fs.p2, 1);
                        scatter_product(D_0[fs.p1], false, r + 1 + fs.p2, -1);
                        break;
                    case 6: // dC_i/dx_j - dC_j/dx_i
                        scatter_derivative(1 + fs.p1, fs.p2, 1);
                        scatter_derivative(1 + fs.p2, fs.p1, -1);
                        break;
                    case 7: // dC_i/dy_k - dD_k/dx_i
                        scatter_derivative(1 + fs.p1, r + fs.p2, 1);
                        scatter_derivative(r + 1 + fs.p2, fs.p1, -1);
                        break;
                    case 8: // dD_k/dy_l - dD_l/dy_k
                        scatter_derivative(r + 1 + fs.p1, r + fs.p2, 1);
                        scatter_derivative(r + 1 + fs.p2, r + fs.p1, -1);
                        break;
                    case 9: // C_i + dB0/dx_i - [Binf, C_i]
                        scatter_entry(1 + fs.p1, [&](const Slot& sl) -> Rat {
                            return Rat(1) - (S.alpha[sl.a] - S.alpha[sl.b]);
                        });
                        scatter_derivative(0, fs.p1, 1);
                        break;
                    case 10: // D_k + dB0/dy_k - [Binf, D_k]
                        scatter_entry(r + 1 + fs.p1, [&](const Slot& sl) -> Rat {
                            return Rat(1) - (S.alpha[sl.a] - S.alpha[sl.b]);
                        });
                        scatter_derivative(0, r + fs.p1, 1);
                        break;
                    default: break;
                }
            }

            if (static_cast<int64_t>(slots.size()) > opt.budget / 2000 ||
                static_cast<int64_t>(as.rows.size()) > opt.budget / 200)
                fail_budget("deformation system exceeded its budget at order " +
                            std::to_string(step));

            SparseLinearSystem sys(static_cast<int>(slots.size()));
            for (size_t i = 0; i < as.rows.size(); ++i)
                sys.add_row(as.rows[i], as.rhs[i], static_cast<int>(i));
            auto result = sys.solve();
            if (!result.unique) {
                if (!have_weights && xcap < opt.max_xdegree_cap) {
                    xcap += 2; // widen the ansatz and retry this order
                    continue;
                }
                if (result.inconsistent_tag >= 0)
                    fail_verification(
                        "deformation recursion: no solution at order " + std::to_string(step) +
                        " (equation " + as.tags[result.inconsistent_tag] +
                        "); the section fails the generation hypothesis");
                fail_verification("deformation recursion: solution not unique at order " +
                                  std::to_string(step) +
                                  "; the section fails the generation hypothesis");
            }
            for (size_t s = 0; s < slots.size(); ++s) {
                const Rat& v = result.solution[s];
                if (is_zero(v)) continue;
                const Slot& sl = slots[s];
                Mpoly add = Mpoly::monomial(sl.mono, v);
                if (sl.mat == 0)
                    st.B0[sl.a][sl.b] += add;
                else if (sl.mat <= r)
                    st.C[sl.mat - 1][sl.a][sl.b] += add;
                else
                    st.D[sl.mat - r - 1][sl.a][sl.b] += add;
            }
            solved = true;
        }
    }

    H.B0 = st.B0;
    H.C = st.C;
    H.D = st.D;

    RelationReport rep = verify_extended_relations(H);
    if (!rep.all_pass())
        fail_verification("extended structure failed verification: " + rep.first_failure());
    return H;
}

RelationReport verify_extended_relations(const HMDeformation& H) {
    RelationReport rep;
    if (H.ell == 0) {
        rep.items.push_back({"trivial extension", true, ""});
        return rep;
    }
    SolverState st{H.r, H.ell, H.nz(), H.mu, H.alpha, H.B0, H.C, H.D};
    auto fams = family_list(H.r, H.ell, 2);
    auto check = [&](int fam, int p1, int p2, int64_t through, const std::string& name) {
        PMat res = family_residual(st, fam, p1, p2);
        for (size_t a = 0; a < H.mu; ++a)
            for (size_t b = 0; b < H.mu; ++b)
                for (const auto& [e, c] : res[a][b].terms())
                    if (ydeg(e, H.r) <= through) {
                        rep.items.push_back(
                            {name, false,
                             "entry (" + std::to_string(a + 1) + "," + std::to_string(b + 1) +
                                 ") at y-order " + std::to_string(ydeg(e, H.r))});
                        return;
                    }
        rep.items.push_back({name, true, ""});
    };
    for (const auto& fs : fams) {
        std::string name = "family " + std::to_string(fs.fam) + " (" + std::to_string(fs.p1) +
                           "," + std::to_string(fs.p2) + ")";
        check(fs.fam, fs.p1, fs.p2, H.N, name);
    }
    // metric relations, inherited by uniqueness: checked exactly
    {
        PMat gP = pmat_from_q(H.g, H.nz());
        auto sym = [&](const PMat& M, const std::string& name) {
            PMat gM = pmat_mul(gP, M);
            for (size_t i = 0; i < H.mu; ++i)
                for (size_t j = 0; j < H.mu; ++j) {
                    Mpoly diff = gM[i][j] - gM[j][i];
                    for (const auto& [e, c] : diff.terms())
                        if (ydeg(e, H.r) <= H.N) {
                            rep.items.push_back({name, false, "asymmetric entry"});
                            return;
                        }
                }
            rep.items.push_back({name, true, ""});
        };
        sym(H.B0, "g*B0 symmetric");
        for (int i = 0; i < H.r; ++i) sym(H.C[i], "g*C symmetric");
        for (int k = 0; k < H.ell; ++k) sym(H.D[k], "g*D symmetric");
    }
    // prescribed first column
    for (int k = 0; k < H.ell; ++k)
        for (size_t i = 0; i < H.mu; ++i) {
            Mpoly diff = H.D[k][i][0] - H.f_choices[i].derivative(H.r + k);
            bool ok = true;
            for (const auto& [e, c] : diff.terms())
                if (ydeg(e, H.r) <= H.N - 1) ok = false;
            rep.items.push_back({"prescribed column dy" + std::to_string(k + 1), ok,
                                 ok ? "" : "entry " + std::to_string(i + 1)});
            if (!ok) break;
        }
    return rep;
}

FrobTypeStructure restrict_y0(const HMDeformation& H) {
    FrobTypeStructure S = H.base;
    // slice the extension back at y = 0 and drop the y variables
    std::vector<Mpoly> images;
    for (int i = 0; i < H.r; ++i) images.push_back(Mpoly::variable(H.r, i));
    for (int k = 0; k < H.ell; ++k) images.push_back(Mpoly(H.r));
    S.B0 = pmat_subst(H.B0, images);
    S.C.clear();
    for (const auto& Ck : H.C) S.C.push_back(pmat_subst(Ck, images));
    return S;
}

HMDeformation universal_good_deformation(const FrobTypeStructure& S, const HMOptions& opt) {
    if (!S.deformation || !S.deformation->good)
        fail_precondition("universal good deformation requires a good deformation");
    return universal_deformation(S, opt);
}

HMDeformation universal_deformation(const FrobTypeStructure& S, const HMOptions& opt) {
    int r = S.r;
    int ell = static_cast<int>(S.mu) - r;
    if (ell < 0) fail_precondition("more parameters than basis elements");
    int nz = r + ell;
    std::vector<Mpoly> f_choices(S.mu, Mpoly(nz));
    for (int k = 0; k < ell; ++k) {
        ExpVec e(nz, 0);
        e[r + k] = 1;
        f_choices[r + k] = Mpoly::monomial(e, Rat(1));
    }
    // universality at the origin: the extended period map must be invertible
    QMat J = qmat_zero(S.mu, S.mu);
    QMat period = period_map(S, std::vector<Rat>(r, Rat(0)));
    for (size_t i = 0; i < S.mu; ++i)
        for (int k = 0; k < r; ++k) J[i][k] = period[i][k];
    for (int k = 0; k < ell; ++k) J[r + k][r + k] = 1;
    if (!qmat_inverse(J))
        fail_precondition("extended period map is singular at the origin; "
                          "not a universal deformation");
    return hm_extend(S, ell, f_choices, opt);
}

} // namespace frob
