#pragma once

#include <optional>
#include <string>
#include <vector>

#include "frob/structure.hpp"

namespace frob {

// Deformation of a Frobenius-type structure in extra formal variables
// y_1..y_ell, truncated at total y-order N. Matrices live over
// Q[x1..xr, y1..yell] with the y-block last; x-parts stay exact.
struct HMDeformation {
    FrobTypeStructure base;
    int ell = 0;
    int N = 6;
    size_t mu = 0;
    int r = 0;
    std::vector<Mpoly> f_choices; // mu prescribed series, f_{i1}(x, 0) = 0

    PMat B0;              // known through y-order N + 1
    std::vector<PMat> C;  // r matrices, through y-order N + 1
    std::vector<PMat> D;  // ell matrices, through y-order N
    QVec alpha;
    QMat g;

    int nz() const { return r + ell; }
};

struct HMOptions {
    int order = 6;            // truncation order N
    bool germ_mode = false;   // only requires generation at the origin
    int64_t budget = 80000000;
    int max_xdegree_cap = 14; // fallback cap when weights are unavailable
};

// Order-by-order extension with the prescribed first column of the dy-block.
// Each order is one exact sparse linear solve; a singular system is reported
// as a generation failure with the order and the offending equation.
HMDeformation hm_extend(const FrobTypeStructure& S, int ell,
                        const std::vector<Mpoly>& f_choices, const HMOptions& opt);

// Canonical semi-global choices f_{i1} = 0 (i <= r), f_{i1} = y_{i-r}.
// Requires a good deformation; use universal_deformation for the general
// maximal case.
HMDeformation universal_good_deformation(const FrobTypeStructure& S, const HMOptions& opt);

// Same prescription without the goodness requirement; checks that the
// extended period map is invertible at the origin.
HMDeformation universal_deformation(const FrobTypeStructure& S, const HMOptions& opt);

// Exact identity checks through y-order N.
RelationReport verify_extended_relations(const HMDeformation& H);

// y = 0 slice; equals the input structure by construction.
FrobTypeStructure restrict_y0(const HMDeformation& H);

struct FrobeniusGerm {
    size_t mu = 0;
    int n = 0;
    int unit_index = 0; // 0-based flat coordinate acting as the unit
    int c_order = 6;    // structure constants exact through this t-order
    int pot_order = 9;  // potential exact through this t-order
    QVec charges;       // spectrum values alpha_i
    QMat metric;        // constant metric in flat coordinates
    std::vector<Mpoly> flat_coords; // t_a as functions of (x, y)
    std::vector<PMat> mult;         // multiplication by d/dt_a, entries in t
    Mpoly potential;                // in t, degree <= 2 part normalized to 0

    Rat potential_coeff(const ExpVec& t_exponent) const;
};

// Transports the structure through the period map: flat coordinates are the
// negated primitive map, so the unit direction is +d/dt_1 and the quantum
// parts carry positive exponentials.
FrobeniusGerm frobenius_manifold_from_deformation(const HMDeformation& H);

// Re-centers the deformation at basepoint a before extracting the germ.
FrobeniusGerm frobenius_germ_at(const HMDeformation& H, const std::vector<Rat>& a);

struct GermCheckReport {
    RelationReport relations; // associativity, symmetry, unit, metric
    bool homogeneous = false;
    QVec euler_shifts; // constants along the charge-1 directions
    bool all_pass() const { return relations.all_pass() && homogeneous; }
};

GermCheckReport check_wdvv(const FrobeniusGerm& G);

struct GermIso {
    bool found = false;
    QMat map;           // flat-coordinate isomorphism when found
    std::string detail; // obstruction description otherwise
};

// Searches for an exact linear isomorphism of flat coordinates respecting
// unit, metric and the charge grading, matching the potentials through the
// common order.
GermIso compare_structures(const FrobeniusGerm& G1, const FrobeniusGerm& G2);

} // namespace frob
