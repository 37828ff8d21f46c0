#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "frob/jacobi.hpp"
#include "frob/laurent.hpp"
#include "frob/linalg.hpp"

namespace frob {

// f + sum_k x_k g_k as a single Laurent polynomial over Q[x1..xr].
Laurent assemble_deformation(const Laurent& f, const std::vector<Laurent>& gs);

struct SubdiagramDeformation {
    Laurent f; // parameter-free
    std::vector<Laurent> gs;
    JacobiBasis basis;
    std::shared_ptr<const GradedReducer> reducer; // parametric, over (f, gs)

    bool injective = false;
    bool maximal = false;
    bool surjective = false;
    bool good = false;

    int r() const { return static_cast<int>(gs.size()); }
    Laurent F() const { return assemble_deformation(f, gs); }
};

// Computes all four flags. Precondition: f convenient (nondegeneracy is the
// caller's check); every g_i must be subdiagram, reported otherwise.
SubdiagramDeformation classify_deformation(const Laurent& f, const std::vector<Laurent>& gs,
                                           int64_t budget = 2000000);

// Span closure of polynomial expressions in the gs: true iff the classes of
// polynomials in g_1..g_r fill A_f. Does not require subdiagram inputs.
bool is_lattice(const std::vector<Laurent>& gs, const JacobiBasis& B);

// Columns: coordinates of the classes of the g_i at the origin.
QMat period_columns(const JacobiBasis& B, const std::vector<Laurent>& gs);

struct RelationReport {
    struct Item {
        std::string name;
        bool pass;
        std::string witness; // matrix entry and mismatch when failing
    };
    std::vector<Item> items;

    bool all_pass() const {
        for (const auto& it : items)
            if (!it.pass) return false;
        return true;
    }
    std::string first_failure() const {
        for (const auto& it : items)
            if (!it.pass) return it.name + ": " + it.witness;
        return "";
    }
};

struct FrobTypeStructure {
    int n = 0;
    int r = 0;
    size_t mu = 0;
    std::vector<ExpVec> basis_monomials;
    QVec alpha; // diagonal of the constant endomorphism, sorted
    PMat B0;    // multiplication by F, entries in Q[x]
    std::vector<PMat> C; // C[i] = multiplication by -g_i
    QMat g;

    // Provenance; absent on structures re-read from JSON.
    std::optional<SubdiagramDeformation> deformation;
};

// The canonical structure of an injective subdiagram deformation. Verifies
// every structure relation exactly and fails loudly on violation.
FrobTypeStructure build_canonical_structure(const SubdiagramDeformation& D);

// Exact polynomial identity checks; never throws.
RelationReport verify_structure_relations(const FrobTypeStructure& S);

// g_i = the subdiagram monomials in basis order (the alpha < 1 slots).
SubdiagramDeformation build_good_maximal_deformation(const Laurent& f, int64_t budget = 2000000);

QMat period_map(const FrobTypeStructure& S, const std::vector<Rat>& a);
bool check_IC(const FrobTypeStructure& S, const std::vector<Rat>& a);
bool check_GC(const FrobTypeStructure& S, const std::vector<Rat>& a);

// Generation over Q[x]: sample-point failures are definitive; a positive
// answer carries an exact module-membership certificate (constant minor or
// explicit polynomial combinations). Inconclusive searches raise a budget
// error rather than guessing.
bool check_GC_global(const FrobTypeStructure& S, int64_t budget = 4000000);

FrobTypeStructure translate_structure(const FrobTypeStructure& S, const std::vector<Rat>& a);

struct LatticeChange {
    QMat L;        // expresses D2's generators in terms of D1's
    bool verified; // pullback identity checked on the structure matrices
};
LatticeChange change_of_lattice_iso(const SubdiagramDeformation& D1,
                                    const SubdiagramDeformation& D2);

struct PrimitiveMapPoly {
    std::vector<Mpoly> gamma; // Gamma_{j1}, Gamma(0) = 0
    bool triangular = false;  // the good-deformation shape
};
PrimitiveMapPoly primitive_map(const FrobTypeStructure& S);

struct PointStructure {
    QMat R0;
    QVec alpha;
    QMat g;
};
PointStructure restrict_at(const FrobTypeStructure& S, const std::vector<Rat>& a);

struct ExtendedConnection {
    QMat B0_at_a;
    QVec alpha;
    std::vector<QMat> higgs_at_a;
    std::string to_string() const;
};
ExtendedConnection extended_connection(const FrobTypeStructure& S, const std::vector<Rat>& a);

// JSON round-trip: {n, mu, r, basis, alpha, B0, C, g}; rationals as "p/q"
// strings, matrix entries as polynomial strings in x1..xr. Byte-stable.
std::string structure_to_json(const FrobTypeStructure& S);
FrobTypeStructure structure_from_json(const std::string& text);

} // namespace frob
