#pragma once

#include <map>
#include <optional>
#include <vector>

#include "frob/mpoly.hpp"

namespace frob {

using QVec = std::vector<Rat>;
using QMat = std::vector<QVec>;

QMat qmat_zero(size_t rows, size_t cols);
QMat qmat_identity(size_t n);
QMat qmat_mul(const QMat& a, const QMat& b);
QMat qmat_add(const QMat& a, const QMat& b);
QMat qmat_sub(const QMat& a, const QMat& b);
QMat qmat_transpose(const QMat& a);
bool qmat_is_zero(const QMat& a);
bool qmat_is_symmetric(const QMat& a);
size_t qmat_rank(QMat a);
Rat qmat_det(QMat a);
std::optional<QMat> qmat_inverse(const QMat& a);
// Unique solution of A x = b or nullopt (inconsistent or underdetermined).
std::optional<QVec> qmat_solve(const QMat& a, const QVec& b);
// Some solution of A x = b when the system is consistent; free variables 0.
std::optional<QVec> qmat_solve_any(const QMat& a, const QVec& b);

// Incremental row space with exact membership queries.
class Echelon {
public:
    explicit Echelon(size_t width) : width_(width) {}

    size_t dim() const { return rows_.size(); }
    size_t width() const { return width_; }

    // Reduces v against the current rows; returns the residue.
    QVec reduce(QVec v) const;
    bool contains(const QVec& v) const;
    // Adds v to the span; returns true if the dimension grew.
    bool add(const QVec& v);

private:
    size_t width_;
    std::vector<QVec> rows_;     // each normalized to a unit pivot
    std::vector<size_t> pivots_; // pivot column per row
};

// Matrices over a polynomial ring (entries share a variable count).
using PMat = std::vector<std::vector<Mpoly>>;

PMat pmat_zero(size_t rows, size_t cols, int nvars);
PMat pmat_identity(size_t n, int nvars);
PMat pmat_from_q(const QMat& a, int nvars);
PMat pmat_mul(const PMat& a, const PMat& b);
PMat pmat_mul_trunc(const PMat& a, const PMat& b, int64_t cap);
PMat pmat_add(const PMat& a, const PMat& b);
PMat pmat_sub(const PMat& a, const PMat& b);
PMat pmat_scaled(const PMat& a, const Rat& c);
PMat pmat_derivative(const PMat& a, int var);
PMat pmat_subst(const PMat& a, const std::vector<Mpoly>& images);
PMat pmat_truncated(const PMat& a, int64_t cap);
QMat pmat_eval(const PMat& a, const std::vector<Rat>& point);
bool pmat_is_zero(const PMat& a);
bool pmat_equal(const PMat& a, const PMat& b);
PMat pmat_commutator(const PMat& a, const PMat& b);

// Sparse exact linear system; used by the order-by-order deformation solver.
class SparseLinearSystem {
public:
    explicit SparseLinearSystem(int ncols) : ncols_(ncols) {}

    // Adds the equation sum coeff_j * x_j = rhs; tag identifies the source.
    void add_row(std::map<int, Rat> coeffs, Rat rhs, int tag);

    struct Result {
        bool unique = false;
        QVec solution;          // valid when unique (or when frees were allowed)
        int inconsistent_tag = -1; // tag of a contradictory equation, if any
        int free_column = -1;      // an unconstrained column, if any
    };

    // allow_free: return some solution with unconstrained columns set to 0
    // instead of reporting non-uniqueness.
    Result solve(bool allow_free = false) const;

private:
    int ncols_;
    std::vector<std::map<int, Rat>> rows_;
    std::vector<Rat> rhs_;
    std::vector<int> tags_;
};

} // namespace frob
