#include "frob/linalg.hpp"

#include <algorithm>

#include "frob/error.hpp"

namespace frob {

QMat qmat_zero(size_t rows, size_t cols) { return QMat(rows, QVec(cols, Rat(0))); }

QMat qmat_identity(size_t n) {
    QMat a = qmat_zero(n, n);
    for (size_t i = 0; i < n; ++i) a[i][i] = 1;
    return a;
}

QMat qmat_mul(const QMat& a, const QMat& b) {
    size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
    QMat r = qmat_zero(n, m);
    for (size_t i = 0; i < n; ++i)
        for (size_t l = 0; l < k; ++l) {
            if (is_zero(a[i][l])) continue;
            for (size_t j = 0; j < m; ++j) r[i][j] += a[i][l] * b[l][j];
        }
    return r;
}

QMat qmat_add(const QMat& a, const QMat& b) {
    QMat r = a;
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < a[i].size(); ++j) r[i][j] += b[i][j];
    return r;
}

QMat qmat_sub(const QMat& a, const QMat& b) {
    QMat r = a;
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < a[i].size(); ++j) r[i][j] -= b[i][j];
    return r;
}

QMat qmat_transpose(const QMat& a) {
    if (a.empty()) return a;
    QMat r = qmat_zero(a[0].size(), a.size());
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < a[i].size(); ++j) r[j][i] = a[i][j];
    return r;
}

bool qmat_is_zero(const QMat& a) {
    for (const auto& row : a)
        for (const auto& v : row)
            if (!is_zero(v)) return false;
    return true;
}

bool qmat_is_symmetric(const QMat& a) {
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = i + 1; j < a.size(); ++j)
            if (a[i][j] != a[j][i]) return false;
    return true;
}

namespace {

// In-place row echelon; returns rank. Optionally tracks the determinant.
size_t echelonize(QMat& a, Rat* det) {
    size_t rows = a.size();
    size_t cols = rows == 0 ? 0 : a[0].size();
    size_t rank = 0;
    if (det) *det = 1;
    for (size_t col = 0; col < cols && rank < rows; ++col) {
        size_t pivot = rank;
        while (pivot < rows && is_zero(a[pivot][col])) ++pivot;
        if (pivot == rows) {
            if (det) *det = 0;
            continue;
        }
        if (pivot != rank) {
            std::swap(a[pivot], a[rank]);
            if (det) *det = -*det;
        }
        if (det) *det *= a[rank][col];
        Rat inv = 1 / a[rank][col];
        for (size_t j = col; j < cols; ++j) a[rank][j] *= inv;
        for (size_t i = 0; i < rows; ++i) {
            if (i == rank || is_zero(a[i][col])) continue;
            Rat f = a[i][col];
            for (size_t j = col; j < cols; ++j) a[i][j] -= f * a[rank][j];
        }
        ++rank;
    }
    return rank;
}

} // namespace

size_t qmat_rank(QMat a) { return echelonize(a, nullptr); }

Rat qmat_det(QMat a) {
    if (a.empty()) return Rat(1);
    if (a.size() != a[0].size()) fail_internal("det of non-square matrix");
    Rat det;
    size_t rank = echelonize(a, &det);
    return rank == a.size() ? det : Rat(0);
}

std::optional<QMat> qmat_inverse(const QMat& a) {
    size_t n = a.size();
    QMat work = a;
    for (size_t i = 0; i < n; ++i) {
        QMat id_row = qmat_identity(n);
        work[i].insert(work[i].end(), id_row[i].begin(), id_row[i].end());
    }
    if (echelonize(work, nullptr) != n) return std::nullopt;
    QMat inv = qmat_zero(n, n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) inv[i][j] = work[i][n + j];
    return inv;
}

std::optional<QVec> qmat_solve(const QMat& a, const QVec& b) {
    size_t rows = a.size();
    size_t cols = rows == 0 ? 0 : a[0].size();
    QMat work = a;
    for (size_t i = 0; i < rows; ++i) work[i].push_back(b[i]);
    echelonize(work, nullptr);
    QVec x(cols, Rat(0));
    std::vector<bool> pinned(cols, false);
    for (size_t i = 0; i < rows; ++i) {
        size_t lead = cols + 1;
        for (size_t j = 0; j <= cols; ++j) {
            if (!is_zero(work[i][j])) {
                lead = j;
                break;
            }
        }
        if (lead == cols) return std::nullopt; // 0 = nonzero
        if (lead > cols) continue;
        x[lead] = work[i][cols];
        pinned[lead] = true;
        for (size_t j = lead + 1; j < cols; ++j)
            if (!is_zero(work[i][j])) return std::nullopt; // free variable
    }
    for (size_t j = 0; j < cols; ++j)
        if (!pinned[j]) return std::nullopt;
    return x;
}


std::optional<QVec> qmat_solve_any(const QMat& a, const QVec& b) {
    size_t rows = a.size();
    size_t cols = rows == 0 ? 0 : a[0].size();
    QMat work = a;
    for (size_t i = 0; i < rows; ++i) work[i].push_back(b[i]);
    echelonize(work, nullptr);
    QVec x(cols, Rat(0));
    for (size_t i = 0; i < rows; ++i) {
        size_t lead = cols + 1;
        for (size_t j = 0; j <= cols; ++j) {
            if (!is_zero(work[i][j])) {
                lead = j;
                break;
            }
        }
        if (lead == cols) return std::nullopt;
        if (lead > cols) continue;
        x[lead] = work[i][cols]; // frees stay zero in reduced form
    }
    return x;
}

QVec Echelon::reduce(QVec v) const {
    for (size_t r = 0; r < rows_.size(); ++r) {
        const Rat& c = v[pivots_[r]];
        if (is_zero(c)) continue;
        Rat f = c;
        for (size_t j = 0; j < width_; ++j) v[j] -= f * rows_[r][j];
    }
    return v;
}

bool Echelon::contains(const QVec& v) const {
    QVec r = reduce(v);
    return std::all_of(r.begin(), r.end(), [](const Rat& q) { return is_zero(q); });
}

bool Echelon::add(const QVec& v) {
    QVec r = reduce(v);
    size_t pivot = width_;
    for (size_t j = 0; j < width_; ++j) {
        if (!is_zero(r[j])) {
            pivot = j;
            break;
        }
    }
    if (pivot == width_) return false;
    Rat inv = 1 / r[pivot];
    for (size_t j = 0; j < width_; ++j) r[j] *= inv;
    for (size_t k = 0; k < rows_.size(); ++k) {
        Rat f = rows_[k][pivot];
        if (is_zero(f)) continue;
        for (size_t j = 0; j < width_; ++j) rows_[k][j] -= f * r[j];
    }
    rows_.push_back(std::move(r));
    pivots_.push_back(pivot);
    return true;
}

PMat pmat_zero(size_t rows, size_t cols, int nvars) {
    return PMat(rows, std::vector<Mpoly>(cols, Mpoly(nvars)));
}

PMat pmat_identity(size_t n, int nvars) {
    PMat a = pmat_zero(n, n, nvars);
    for (size_t i = 0; i < n; ++i) a[i][i] = Mpoly::constant(nvars, Rat(1));
    return a;
}

PMat pmat_from_q(const QMat& a, int nvars) {
    PMat r = pmat_zero(a.size(), a.empty() ? 0 : a[0].size(), nvars);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < a[i].size(); ++j) r[i][j] = Mpoly::constant(nvars, a[i][j]);
    return r;
}

PMat pmat_mul(const PMat& a, const PMat& b) {
    size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
    int nv = n && a[0].size() ? a[0][0].nvars() : 0;
    PMat r = pmat_zero(n, m, nv);
    for (size_t i = 0; i < n; ++i)
        for (size_t l = 0; l < k; ++l) {
            if (a[i][l].is_zero()) continue;
            for (size_t j = 0; j < m; ++j) {
                if (b[l][j].is_zero()) continue;
                r[i][j] += a[i][l] * b[l][j];
            }
        }
    return r;
}

PMat pmat_mul_trunc(const PMat& a, const PMat& b, int64_t cap) {
    size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
    int nv = n && a[0].size() ? a[0][0].nvars() : 0;
    PMat r = pmat_zero(n, m, nv);
    for (size_t i = 0; i < n; ++i)
        for (size_t l = 0; l < k; ++l) {
            if (a[i][l].is_zero()) continue;
            for (size_t j = 0; j < m; ++j) {
                if (b[l][j].is_zero()) continue;
                r[i][j] += mul_trunc(a[i][l], b[l][j], cap);
            }
        }
    return r;
}

PMat pmat_add(const PMat& a, const PMat& b) {
    PMat r = a;
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < a[i].size(); ++j) r[i][j] += b[i][j];
    return r;
}

PMat pmat_sub(const PMat& a, const PMat& b) {
    PMat r = a;
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < a[i].size(); ++j) r[i][j] -= b[i][j];
    return r;
}

PMat pmat_scaled(const PMat& a, const Rat& c) {
    PMat r = a;
    for (auto& row : r)
        for (auto& e : row) e = e.scaled(c);
    return r;
}

PMat pmat_derivative(const PMat& a, int var) {
    PMat r = a;
    for (auto& row : r)
        for (auto& e : row) e = e.derivative(var);
    return r;
}

PMat pmat_subst(const PMat& a, const std::vector<Mpoly>& images) {
    PMat r = a;
    for (auto& row : r)
        for (auto& e : row) e = e.subst(images);
    return r;
}

PMat pmat_truncated(const PMat& a, int64_t cap) {
    PMat r = a;
    for (auto& row : r)
        for (auto& e : row) e = e.truncated(cap);
    return r;
}

QMat pmat_eval(const PMat& a, const std::vector<Rat>& point) {
    QMat r = qmat_zero(a.size(), a.empty() ? 0 : a[0].size());
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < a[i].size(); ++j) r[i][j] = a[i][j].eval(point);
    return r;
}

bool pmat_is_zero(const PMat& a) {
    for (const auto& row : a)
        for (const auto& e : row)
            if (!e.is_zero()) return false;
    return true;
}

bool pmat_equal(const PMat& a, const PMat& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].size() != b[i].size()) return false;
        for (size_t j = 0; j < a[i].size(); ++j)
            if (!(a[i][j] == b[i][j])) return false;
    }
    return true;
}

PMat pmat_commutator(const PMat& a, const PMat& b) {
    return pmat_sub(pmat_mul(a, b), pmat_mul(b, a));
}

} // namespace frob
