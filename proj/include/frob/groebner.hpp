#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "frob/laurent.hpp"

namespace frob {

enum class TriState { yes, no, budget_exceeded };

bool is_probable_prime(uint64_t n);

// Degrevlex with an optional leading elimination block (variables
// [0, elim_block) dominate; used to cut auxiliary saturation variables).
struct MonomialOrder {
    int nvars = 0;
    int elim_block = 0;

    bool less(const ExpVec& a, const ExpVec& b) const;
    bool divides(const ExpVec& a, const ExpVec& b) const; // a | b entrywise
};

struct RatField {
    using Elem = Rat;
    Elem zero() const { return Rat(0); }
    Elem one() const { return Rat(1); }
    bool is_zero(const Elem& a) const { return sgn(a) == 0; }
    Elem add(const Elem& a, const Elem& b) const { return a + b; }
    Elem sub(const Elem& a, const Elem& b) const { return a - b; }
    Elem mul(const Elem& a, const Elem& b) const { return a * b; }
    Elem div(const Elem& a, const Elem& b) const { return a / b; }
    Elem neg(const Elem& a) const { return -a; }
};

struct ZpField {
    uint64_t p = 2;
    using Elem = uint64_t;
    Elem zero() const { return 0; }
    Elem one() const { return 1 % p; }
    bool is_zero(const Elem& a) const { return a == 0; }
    Elem add(const Elem& a, const Elem& b) const { return (a + b) % p; }
    Elem sub(const Elem& a, const Elem& b) const { return (a + p - b % p) % p; }
    Elem mul(const Elem& a, const Elem& b) const {
        return static_cast<Elem>((static_cast<unsigned __int128>(a) * b) % p);
    }
    Elem inv(Elem a) const;
    Elem div(const Elem& a, const Elem& b) const { return mul(a, inv(b)); }
    Elem neg(const Elem& a) const { return a == 0 ? 0 : p - a; }
};

// Terms sorted descending in the active order; leading term first.
template <class F>
using GBPoly = std::vector<std::pair<ExpVec, typename F::Elem>>;

template <class F>
class Buchberger {
public:
    Buchberger(F field, MonomialOrder order, int64_t budget)
        : field_(field), order_(order), budget_(budget) {}

    void add_generator(GBPoly<F> g);
    // Computes the reduced basis; throws a budget error when exceeded.
    void run();
    const std::vector<GBPoly<F>>& basis() const { return basis_; }

    GBPoly<F> normal_form(GBPoly<F> h) const;
    bool contains_unit() const;

    GBPoly<F> sort_terms(GBPoly<F> p) const;

private:
    void spend(int64_t units) const;

    F field_;
    MonomialOrder order_;
    mutable int64_t budget_;
    std::vector<GBPoly<F>> basis_;
};

// Shifts a Laurent system into a polynomial ring with an auxiliary leading
// variable w, adds w*u1*...*un - 1, and eliminates w: the w-free part of the
// reduced basis generates the torus (saturated) ideal.
struct SaturatedIdealQ {
    int nvars = 0;
    std::vector<GBPoly<RatField>> basis; // w-free elements, degrevlex on u
};
SaturatedIdealQ saturated_laurent_ideal_q(const std::vector<Laurent>& gens, int64_t budget);

// Decides whether the log-derivative system has no torus solution, i.e.
// whether the saturated ideal is the unit ideal.
TriState torus_system_empty_q(const std::vector<Laurent>& gens, int64_t budget);
TriState torus_system_empty_zp(const std::vector<Laurent>& gens, uint64_t p, int64_t budget);

// Renders a basis element through the Laurent printer conventions (for
// reports and tests).
std::string gbpoly_to_string(const GBPoly<RatField>& p, const std::string& letter);

} // namespace frob
