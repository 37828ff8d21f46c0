#pragma once

#include <map>
#include <string>
#include <vector>

#include "frob/mpoly.hpp"

namespace frob {

// Sparse Laurent polynomial in u1..u_nu. Coefficients live in Q[x1..x_nx];
// nx = 0 covers the plain rational case. Values are immutable in spirit:
// every operation returns a fresh object.
class Laurent {
public:
    Laurent() = default;
    Laurent(int nu, int nx) : nu_(nu), nx_(nx) {}

    static Laurent monomial(int nu, int nx, const ExpVec& e, const Mpoly& c);
    static Laurent monomial_q(int nu, const ExpVec& e, const Rat& c);
    static Laurent constant(int nu, int nx, const Mpoly& c);

    int nu() const { return nu_; }
    int nx() const { return nx_; }
    const std::map<ExpVec, Mpoly>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    size_t term_count() const { return terms_.size(); }

    void add_term(const ExpVec& e, const Mpoly& c);
    Mpoly coeff(const ExpVec& e) const;

    Laurent operator-() const;
    Laurent& operator+=(const Laurent& o);
    Laurent& operator-=(const Laurent& o);
    friend Laurent operator+(Laurent a, const Laurent& b) { return a += b; }
    friend Laurent operator-(Laurent a, const Laurent& b) { return a -= b; }
    friend Laurent operator*(const Laurent& a, const Laurent& b);
    friend bool operator==(const Laurent& a, const Laurent& b) {
        return a.nu_ == b.nu_ && a.nx_ == b.nx_ && a.terms_ == b.terms_;
    }

    Laurent scaled(const Mpoly& c) const;
    Laurent scaled_q(const Rat& c) const;

    // u_i * d/du_i, the torus-adapted derivative; i is 1-based.
    Laurent log_derivative(int i) const;

    // Substitutes rational values for the parameters; result has nx = 0.
    Laurent specialize_params(const std::vector<Rat>& a) const;
    // Reinterprets a parameter-free polynomial as living over Q[x1..x_nx].
    Laurent with_params(int nx) const;

    std::vector<ExpVec> support() const;

    std::string to_string() const;

private:
    int nu_ = 0;
    int nx_ = 0;
    std::map<ExpVec, Mpoly> terms_;
};

// Parses the CLI grammar:
//   poly  := term (('+'|'-') term)*
//   term  := coeff? ('*'? monom)*
//   monom := 'u' index ('^' signed_int)?
//   coeff := int ('/' int)?
// Whitespace is insignificant. Errors carry the 0-based offset.
Laurent parse_laurent(const std::string& text, int n);

// Same grammar with variable letter "x" and exponents required >= 0;
// used for the JSON round-trip of matrix entries.
Mpoly parse_param_poly(const std::string& text, int r);

} // namespace frob
