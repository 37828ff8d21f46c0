#pragma once

#include <string>

#include "frob/laurent.hpp"
#include "frob/linalg.hpp"
#include "frob/newton.hpp"

namespace frob {

// Results from code paths deliberately disjoint from the main pipeline:
// plain row reduction on explicit monomial boxes, no basis engine involved.
struct OracleResult {
    Int value;
    std::string method;
    Int certificate_rank; // rank of the relation matrix that was reduced
};

// Dimension of the Jacobi algebra by exact rank computation over growing
// boxes [-box, box]^n; stops when two consecutive boxes agree.
OracleResult jacobi_dim_bruteforce(const Laurent& f, int max_box = 10);

// Graded dimension of the Newton-filtered quotient at level alpha.
OracleResult graded_dim_bruteforce(const Laurent& f, const Rat& alpha, int max_box = 10);

// Number of degree-d rational plane curves through 3d-1 general points.
Rat kontsevich_Nd(int d);

} // namespace frob
