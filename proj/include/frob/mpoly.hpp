#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "frob/rational.hpp"

namespace frob {

// Exponent vector of a monomial. Entries may be negative (Laurent usage);
// polynomial-ring usage keeps them >= 0.
using ExpVec = std::vector<int32_t>;

ExpVec exp_add(const ExpVec& a, const ExpVec& b);
ExpVec exp_sub(const ExpVec& a, const ExpVec& b);
int64_t exp_total(const ExpVec& a);
bool exp_is_zero(const ExpVec& a);

// true if a < b lexicographically (entrywise signed comparison).
bool exp_lex_less(const ExpVec& a, const ExpVec& b);

// Graded-lex used for canonical term listing: higher total degree first,
// lex tie-break with larger vector first.
bool term_order_before(const ExpVec& a, const ExpVec& b);

// Sparse multivariate polynomial over Q. Doubles as the coefficient ring
// Q[x1..xr], the series carrier in y/t variables, and (with signed
// exponents) the raw monomial layer under Laurent.
class Mpoly {
public:
    Mpoly() = default;
    explicit Mpoly(int nvars) : nvars_(nvars) {}

    static Mpoly constant(int nvars, const Rat& c);
    static Mpoly monomial(const ExpVec& e, const Rat& c);
    static Mpoly variable(int nvars, int i); // 0-based index

    int nvars() const { return nvars_; }
    const std::map<ExpVec, Rat>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    Rat constant_value() const; // 0 if zero polynomial

    // No stored zero coefficients.
    void add_term(const ExpVec& e, const Rat& c);
    Rat coeff(const ExpVec& e) const;

    Mpoly operator-() const;
    Mpoly& operator+=(const Mpoly& o);
    Mpoly& operator-=(const Mpoly& o);
    friend Mpoly operator+(Mpoly a, const Mpoly& b) { return a += b; }
    friend Mpoly operator-(Mpoly a, const Mpoly& b) { return a -= b; }
    friend Mpoly operator*(const Mpoly& a, const Mpoly& b);
    friend bool operator==(const Mpoly& a, const Mpoly& b) {
        return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
    }

    Mpoly scaled(const Rat& c) const;
    Mpoly pow(int64_t k) const;

    Mpoly derivative(int i) const;
    int64_t degree(int i) const;       // -1 for the zero polynomial
    int64_t total_degree() const;      // -1 for the zero polynomial

    Rat eval(const std::vector<Rat>& point) const;
    // Substitutes images[i] for variable i; images share a variable count.
    Mpoly subst(const std::vector<Mpoly>& images) const;

    // Drops all terms of total degree > cap (series truncation).
    Mpoly truncated(int64_t cap) const;
    // Homogeneous part of the given total degree.
    Mpoly homogeneous_part(int64_t d) const;

    std::string to_string(const std::string& var_letter) const;

private:
    int nvars_ = 0;
    std::map<ExpVec, Rat> terms_;
};

// Product with truncation at total degree cap; cheaper than truncating after.
Mpoly mul_trunc(const Mpoly& a, const Mpoly& b, int64_t cap);

} // namespace frob
