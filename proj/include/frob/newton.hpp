#pragma once

#include <optional>
#include <string>
#include <vector>

#include "frob/laurent.hpp"
#include "frob/linalg.hpp"

namespace frob {

// Supporting form of a facet, normalized so that form(a) = offset on the
// facet with offset = 1 whenever the facet misses the origin.
struct Facet {
    QVec form;                // rational linear form
    Rat offset;               // 1 after normalization, 0 if through the origin
    std::vector<ExpVec> touching; // hull points lying on the facet
};

// Convex hull of supp(f) together with the origin.
struct NewtonPolyhedron {
    int n = 0;
    bool full_dim = false;
    bool origin_interior = false;
    std::vector<ExpVec> points;   // supp(f) plus the origin
    std::vector<ExpVec> vertices;
    std::vector<Facet> facets;
};

NewtonPolyhedron newton_polyhedron(const Laurent& f);

bool is_convenient(const NewtonPolyhedron& P);
bool is_convenient(const Laurent& f);

// Newton degree: the gauge of the polyhedron, max of the facet forms.
// Requires a convenient polyhedron.
Rat newton_degree(const NewtonPolyhedron& P, const ExpVec& a);
Rat newton_degree(const NewtonPolyhedron& P, const Laurent& g); // max over terms; 0 for g = 0

// n! times the exact volume (Kouchnirenko bound, attained when
// nondegenerate). Requires a convenient polyhedron.
Int milnor_number(const NewtonPolyhedron& P);

// Lattice points with degree < 1, i.e. the interior points; the canonical
// listing order is (degree, then lex with larger vectors first).
std::vector<ExpVec> subdiagram_monomials(const NewtonPolyhedron& P);
bool nu_lex_before(const NewtonPolyhedron& P, const ExpVec& a, const ExpVec& b);

enum class NondegVerdict {
    nondegenerate_exact,
    nondegenerate_probabilistic,
    degenerate,
    unknown,
};

struct NondegeneracyReport {
    NondegVerdict verdict = NondegVerdict::unknown;
    int trials = 0;
    std::vector<uint64_t> primes;           // moduli used by the probabilistic path
    std::vector<ExpVec> witness_face;       // face support on failure
    std::optional<std::vector<Rat>> witness_point; // rational torus point, when found
    std::string note;

    bool nondegenerate() const {
        return verdict == NondegVerdict::nondegenerate_exact ||
               verdict == NondegVerdict::nondegenerate_probabilistic;
    }
};

struct NondegOptions {
    int trials = 32;        // modular retries for n >= 3 fallback
    uint64_t seed = 1;
    int64_t budget = 200000; // basis computation step budget per face
};

// Kouchnirenko's condition: no boundary face part of f has a critical point
// on the torus. Exact for n <= 2 (vertex and segment faces); for n >= 3 the
// face ideals go through the basis engine, with a modular fallback when the
// exact computation exceeds its budget.
NondegeneracyReport is_nondegenerate(const Laurent& f, const NewtonPolyhedron& P,
                                     const NondegOptions& opt = {});

// Checks a single segment-supported face part for torus critical points.
// Exposed for direct testing of degenerate witnesses.
std::optional<std::vector<Rat>> segment_face_critical_point(const Laurent& face_poly);

} // namespace frob
