#include "frob/error.hpp"
#include "frob/linalg.hpp"

namespace frob {

void SparseLinearSystem::add_row(std::map<int, Rat> coeffs, Rat rhs, int tag) {
    for (auto it = coeffs.begin(); it != coeffs.end();) {
        if (is_zero(it->second))
            it = coeffs.erase(it);
        else
            ++it;
    }
    rows_.push_back(std::move(coeffs));
    rhs_.push_back(std::move(rhs));
    tags_.push_back(tag);
}

SparseLinearSystem::Result SparseLinearSystem::solve(bool allow_free) const {
    Result res;
    std::vector<std::map<int, Rat>> rows = rows_;
    std::vector<Rat> rhs = rhs_;
    size_t nrows = rows.size();

    std::vector<std::vector<int>> col_rows(ncols_);
    for (size_t r = 0; r < nrows; ++r)
        for (const auto& [c, v] : rows[r]) col_rows[c].push_back(static_cast<int>(r));

    std::vector<bool> active(nrows, true);

    struct Pivot {
        int col;
        std::map<int, Rat> row; // normalized, includes col with coeff 1
        Rat rhs;
    };
    std::vector<Pivot> pivots;
    std::vector<int> pivot_of_col(ncols_, -1);

    while (true) {
        // Deterministic pivot choice: smallest active row, first index wins.
        int best = -1;
        size_t best_size = SIZE_MAX;
        for (size_t r = 0; r < nrows; ++r) {
            if (!active[r]) continue;
            if (rows[r].empty()) {
                if (!is_zero(rhs[r])) {
                    res.inconsistent_tag = tags_[r];
                    return res;
                }
                active[r] = false;
                continue;
            }
            if (rows[r].size() < best_size) {
                best_size = rows[r].size();
                best = static_cast<int>(r);
                if (best_size == 1) break;
            }
        }
        if (best < 0) break;

        int pc = rows[best].begin()->first;
        Rat pv = rows[best].begin()->second;
        Pivot piv;
        piv.col = pc;
        piv.rhs = rhs[best] / pv;
        for (const auto& [c, v] : rows[best]) piv.row.emplace(c, v / pv);
        active[best] = false;
        rows[best].clear();

        for (int r : col_rows[pc]) {
            if (!active[r]) continue;
            auto it = rows[r].find(pc);
            if (it == rows[r].end()) continue;
            Rat f = it->second;
            rows[r].erase(it);
            for (const auto& [c, v] : piv.row) {
                if (c == pc) continue;
                auto [jt, inserted] = rows[r].emplace(c, -f * v);
                if (inserted) {
                    col_rows[c].push_back(r);
                } else {
                    jt->second -= f * v;
                    if (is_zero(jt->second)) rows[r].erase(jt);
                }
            }
            rhs[r] -= f * piv.rhs;
            if (rows[r].empty()) {
                if (!is_zero(rhs[r])) {
                    res.inconsistent_tag = tags_[r];
                    return res;
                }
                active[r] = false;
            }
        }

        pivot_of_col[pc] = static_cast<int>(pivots.size());
        pivots.push_back(std::move(piv));
    }

    for (int c = 0; c < ncols_; ++c) {
        if (pivot_of_col[c] < 0) {
            res.free_column = c;
            if (!allow_free) return res;
        }
    }

    // Each pivot row references only columns eliminated later; resolve in
    // reverse order.
    QVec value(ncols_, Rat(0));
    for (size_t k = pivots.size(); k-- > 0;) {
        const Pivot& p = pivots[k];
        Rat v = p.rhs;
        for (const auto& [c, coeff] : p.row) {
            if (c == p.col) continue;
            v -= coeff * value[c];
        }
        value[p.col] = std::move(v);
    }

    res.unique = true;
    res.solution = std::move(value);
    return res;
}

} // namespace frob
