#pragma once

#include <memory>
#include <string>
#include <vector>

#include "frob/groebner.hpp"
#include "frob/laurent.hpp"
#include "frob/linalg.hpp"
#include "frob/newton.hpp"

namespace frob {

// Reduction engine for the Jacobian ideal of F = f + sum_k x_k g_k with the
// g_k subdiagram. Works level by level along the Newton filtration: the
// degree-1 parts of the u_i df/du_i span each graded slice of the ideal
// (Kouchnirenko), and rewriting a slice against the full generators only
// produces terms of strictly smaller degree, so the loop terminates and
// every output coordinate stays in Q[x].
class GradedReducer {
public:
    GradedReducer(Laurent f, NewtonPolyhedron P, std::vector<Laurent> gs, int64_t budget);

    int n() const { return f_.nu(); }
    int r() const { return static_cast<int>(gs_.size()); }
    size_t mu() const { return basis_.size(); }
    const Laurent& f() const { return f_; }
    const NewtonPolyhedron& polyhedron() const { return P_; }
    const std::vector<Laurent>& gs() const { return gs_; }
    const std::vector<ExpVec>& basis_monomials() const { return basis_; }
    const std::vector<Rat>& degrees() const { return degrees_; }

    // Coordinates of the class of h in the monomial basis, entries in Q[x].
    // h must have nx == r (or 0, which is promoted).
    std::vector<Mpoly> reduce(const Laurent& h) const;
    QVec reduce_q(const Laurent& h) const; // x-free convenience

    Laurent combination(const std::vector<Mpoly>& coords) const;

private:
    struct TrackedEchelon;
    struct Level;

    const Level& level(const Rat& alpha) const;
    std::vector<ExpVec> lattice_points_at_level(const Rat& alpha) const;

    Laurent f_;
    NewtonPolyhedron P_;
    std::vector<Laurent> gs_;
    int64_t budget_;

    std::vector<Laurent> gen_f_;      // u_i df/du_i
    std::vector<Laurent> sigma_;      // their Newton-degree-1 parts
    std::vector<std::vector<Laurent>> gen_g_; // gen_g_[k][i] = u_i dg_k/du_i

    std::vector<ExpVec> basis_;
    std::vector<Rat> degrees_;

    struct Cache;
    std::shared_ptr<Cache> cache_;
};

// Jacobian ideal data per the module contract: the torus-saturated, shifted
// polynomial basis at x = 0 plus the parametric reducer.
struct JacobianIdeal {
    std::vector<Laurent> generators; // u_i dF/du_i over Q[x]
    SaturatedIdealQ groebner;        // x = 0 basis, degrevlex after eliminating w
    std::string monomial_order;
    std::shared_ptr<const GradedReducer> reducer;

    int r() const { return reducer->r(); }
};

// Splits F into f + sum x_k g_k (F must be affine-linear in the parameters)
// and prepares the reduction machinery. Requires f convenient; nondegeneracy
// is the caller's responsibility (the engine reports internal mismatches).
JacobianIdeal build_ideal(const Laurent& F, int64_t budget = 2000000);

// Canonical representative supported on the basis monomials.
Laurent normal_form(const Laurent& h, const JacobianIdeal& I);

struct JacobiBasis {
    size_t mu = 0;
    int n = 0;
    std::vector<ExpVec> monomials;
    std::vector<Rat> degrees; // alpha_1 <= ... <= alpha_mu
    std::shared_ptr<const GradedReducer> reducer; // x-free reducer over f
};

// Filtration-adapted monomial basis of A_f with its degree ladder.
// Checks the Kouchnirenko count and the spectrum endpoint/symmetry facts.
JacobiBasis monomial_basis(const Laurent& f, int64_t budget = 2000000);

struct SpectrumData {
    std::vector<Rat> values; // sorted, size mu

    bool operator==(const SpectrumData& o) const { return values == o.values; }
};

SpectrumData spectrum(const Laurent& f, int64_t budget = 2000000);

// Matrix of multiplication by h on A_F in the basis; entries in Q[x].
PMat multiplication_matrix(const Laurent& h, const JacobianIdeal& I);

// Graded trace form: g(b_i, b_j) is the top-coefficient of b_i b_j at x = 0,
// normalized so the top basis class itself has value 1.
QMat residue_pairing(const JacobiBasis& B);

} // namespace frob
