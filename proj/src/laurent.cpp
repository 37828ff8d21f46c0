#include "frob/laurent.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "frob/error.hpp"

namespace frob {

Laurent Laurent::monomial(int nu, int nx, const ExpVec& e, const Mpoly& c) {
    Laurent f(nu, nx);
    f.add_term(e, c);
    return f;
}

Laurent Laurent::monomial_q(int nu, const ExpVec& e, const Rat& c) {
    return monomial(nu, 0, e, Mpoly::constant(0, c));
}

Laurent Laurent::constant(int nu, int nx, const Mpoly& c) {
    return monomial(nu, nx, ExpVec(nu, 0), c);
}

void Laurent::add_term(const ExpVec& e, const Mpoly& c) {
    if (static_cast<int>(e.size()) != nu_) fail_internal("exponent length mismatch");
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

Mpoly Laurent::coeff(const ExpVec& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Mpoly(nx_) : it->second;
}

Laurent Laurent::operator-() const {
    Laurent r(nu_, nx_);
    for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
    return r;
}

Laurent& Laurent::operator+=(const Laurent& o) {
    if (nu_ != o.nu_ || nx_ != o.nx_) fail_input("variable-count mismatch in add");
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
}

Laurent& Laurent::operator-=(const Laurent& o) {
    if (nu_ != o.nu_ || nx_ != o.nx_) fail_input("variable-count mismatch in sub");
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
}

Laurent operator*(const Laurent& a, const Laurent& b) {
    if (a.nu_ != b.nu_ || a.nx_ != b.nx_) fail_input("variable-count mismatch in mul");
    Laurent r(a.nu_, a.nx_);
    for (const auto& [ea, ca] : a.terms_)
        for (const auto& [eb, cb] : b.terms_) r.add_term(exp_add(ea, eb), ca * cb);
    return r;
}

Laurent Laurent::scaled(const Mpoly& c) const {
    Laurent r(nu_, nx_);
    for (const auto& [e, k] : terms_) r.add_term(e, k * c);
    return r;
}

Laurent Laurent::scaled_q(const Rat& c) const {
    Laurent r(nu_, nx_);
    for (const auto& [e, k] : terms_) r.add_term(e, k.scaled(c));
    return r;
}

Laurent Laurent::log_derivative(int i) const {
    if (i < 1 || i > nu_) fail_input("log_derivative index out of range");
    Laurent r(nu_, nx_);
    for (const auto& [e, c] : terms_) {
        if (e[i - 1] == 0) continue;
        r.add_term(e, c.scaled(Rat(e[i - 1])));
    }
    return r;
}

Laurent Laurent::specialize_params(const std::vector<Rat>& a) const {
    if (static_cast<int>(a.size()) != nx_) fail_input("parameter point size mismatch");
    Laurent r(nu_, 0);
    for (const auto& [e, c] : terms_) r.add_term(e, Mpoly::constant(0, c.eval(a)));
    return r;
}

Laurent Laurent::with_params(int nx) const {
    if (nx_ == nx) return *this;
    if (nx_ != 0) fail_internal("with_params expects a parameter-free polynomial");
    Laurent r(nu_, nx);
    for (const auto& [e, c] : terms_) r.add_term(e, Mpoly::constant(nx, c.constant_value()));
    return r;
}

std::vector<ExpVec> Laurent::support() const {
    std::vector<ExpVec> s;
    s.reserve(terms_.size());
    for (const auto& [e, c] : terms_) s.push_back(e);
    return s;
}

std::string Laurent::to_string() const {
    if (terms_.empty()) return "0";
    std::vector<const std::pair<const ExpVec, Mpoly>*> order;
    order.reserve(terms_.size());
    for (const auto& t : terms_) order.push_back(&t);
    std::sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
        return term_order_before(a->first, b->first);
    });

    std::ostringstream os;
    bool first = true;
    for (const auto* t : order) {
        const auto& [e, c] = *t;
        bool has_var = !exp_is_zero(e);
        std::string coeff_str;
        bool negate = false;
        if (c.is_constant()) {
            Rat v = c.constant_value();
            negate = sgn(v) < 0;
            Rat a = abs(v);
            if (!has_var || a != 1) coeff_str = rat_to_string(a);
        } else {
            coeff_str = "(" + c.to_string("x") + ")";
        }
        if (first) {
            if (negate) os << "-";
            first = false;
        } else {
            os << (negate ? " - " : " + ");
        }
        os << coeff_str;
        bool first_var = coeff_str.empty();
        for (int i = 0; i < nu_; ++i) {
            if (e[i] == 0) continue;
            if (!first_var) os << "*";
            first_var = false;
            os << "u" << (i + 1);
            if (e[i] != 1) os << "^" << e[i];
        }
    }
    return os.str();
}

namespace {

// Recursive-descent parser for the input grammar; reports 0-based offsets.
class LaurentParser {
public:
    LaurentParser(const std::string& text, int n) : text_(text), n_(n) {}

    Laurent parse() {
        Laurent acc(n_, 0);
        skip_ws();
        bool negative = false;
        if (peek() == '+' || peek() == '-') {
            negative = (peek() == '-');
            ++pos_;
        }
        acc += term(negative);
        skip_ws();
        while (pos_ < text_.size()) {
            char c = peek();
            if (c != '+' && c != '-') error("expected '+' or '-'");
            ++pos_;
            acc += term(c == '-');
            skip_ws();
        }
        return acc;
    }

private:
    [[noreturn]] void error(const std::string& what) const {
        fail_input("syntax error at offset " + std::to_string(pos_) + ": " + what);
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool at_digit() { return std::isdigit(static_cast<unsigned char>(peek())) != 0; }

    Int integer() {
        skip_ws();
        if (!at_digit()) error("expected integer");
        size_t start = pos_;
        while (at_digit()) ++pos_;
        return Int(text_.substr(start, pos_ - start));
    }

    int64_t signed_int() {
        skip_ws();
        bool neg = false;
        if (peek() == '+' || peek() == '-') {
            neg = (peek() == '-');
            ++pos_;
        }
        skip_ws();
        if (!at_digit()) error("expected integer");
        int64_t v = 0;
        while (at_digit()) {
            v = v * 10 + (text_[pos_] - '0');
            if (v > (1 << 20)) error("exponent too large");
            ++pos_;
        }
        return neg ? -v : v;
    }

    // monom := 'u' index ('^' signed_int)?
    void monom(ExpVec& e) {
        ++pos_; // consumes 'u'
        skip_ws();
        if (!at_digit()) error("expected variable index");
        int64_t idx = 0;
        while (at_digit()) {
            idx = idx * 10 + (text_[pos_] - '0');
            if (idx > 64) break;
            ++pos_;
        }
        if (idx < 1 || idx > n_)
            fail_input("variable index out of range at offset " + std::to_string(pos_) +
                       ": u" + std::to_string(idx) + " with n=" + std::to_string(n_));
        int64_t k = 1;
        skip_ws();
        if (peek() == '^') {
            ++pos_;
            skip_ws();
            k = signed_int();
        }
        e[idx - 1] += static_cast<int32_t>(k);
    }

    Laurent term(bool negative) {
        skip_ws();
        Rat coeff(1);
        bool saw_anything = false;
        if (at_digit()) {
            Int num = integer();
            Int den(1);
            skip_ws();
            if (peek() == '/') {
                ++pos_;
                skip_ws();
                den = integer();
                if (den == 0) error("zero denominator");
            }
            coeff = Rat(num, den);
            coeff.canonicalize();
            saw_anything = true;
        }
        ExpVec e(n_, 0);
        while (true) {
            skip_ws();
            size_t save = pos_;
            if (peek() == '*') {
                ++pos_;
                skip_ws();
                if (peek() != 'u') {
                    pos_ = save;
                    error("expected monomial after '*'");
                }
            }
            if (peek() != 'u') break;
            monom(e);
            saw_anything = true;
        }
        if (!saw_anything) error("expected term");
        if (negative) coeff = -coeff;
        return Laurent::monomial_q(n_, e, coeff);
    }

    const std::string& text_;
    int n_;
    size_t pos_ = 0;
};

} // namespace

Laurent parse_laurent(const std::string& text, int n) {
    if (n < 1) fail_input("variable count must be >= 1");
    return LaurentParser(text, n).parse();
}

Mpoly parse_param_poly(const std::string& text, int r) {
    std::string converted = text;
    for (auto& ch : converted)
        if (ch == 'x') ch = 'u';
    Laurent f = parse_laurent(converted, std::max(r, 1));
    Mpoly p(r);
    for (const auto& [e, c] : f.terms()) {
        ExpVec xe(r, 0);
        for (int i = 0; i < static_cast<int>(e.size()); ++i) {
            if (e[i] < 0) fail_input("negative exponent in parameter polynomial");
            if (e[i] != 0 && i >= r) fail_input("parameter index out of range");
            if (i < r) xe[i] = e[i];
        }
        p.add_term(xe, c.constant_value());
    }
    return p;
}

} // namespace frob
