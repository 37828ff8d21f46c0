#include "frob/mpoly.hpp"

#include <algorithm>
#include <sstream>

namespace frob {

std::string rat_to_string(const Rat& q) {
    std::ostringstream os;
    os << q.get_num();
    if (q.get_den() != 1) os << "/" << q.get_den();
    return os.str();
}

Rat rat_from_string(const std::string& text) {
    if (text.empty()) fail_input("empty rational literal");
    try {
        Rat q(text);
        if (q.get_den() == 0) fail_input("zero denominator in '" + text + "'");
        q.canonicalize();
        return q;
    } catch (const std::invalid_argument&) {
        fail_input("malformed rational literal '" + text + "'");
    }
}

ExpVec exp_add(const ExpVec& a, const ExpVec& b) {
    ExpVec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

ExpVec exp_sub(const ExpVec& a, const ExpVec& b) {
    ExpVec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

int64_t exp_total(const ExpVec& a) {
    int64_t t = 0;
    for (int32_t e : a) t += e;
    return t;
}

bool exp_is_zero(const ExpVec& a) {
    return std::all_of(a.begin(), a.end(), [](int32_t e) { return e == 0; });
}

bool exp_lex_less(const ExpVec& a, const ExpVec& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

bool term_order_before(const ExpVec& a, const ExpVec& b) {
    int64_t ta = exp_total(a), tb = exp_total(b);
    if (ta != tb) return ta > tb;
    return exp_lex_less(b, a);
}

Mpoly Mpoly::constant(int nvars, const Rat& c) {
    Mpoly p(nvars);
    p.add_term(ExpVec(nvars, 0), c);
    return p;
}

Mpoly Mpoly::monomial(const ExpVec& e, const Rat& c) {
    Mpoly p(static_cast<int>(e.size()));
    p.add_term(e, c);
    return p;
}

Mpoly Mpoly::variable(int nvars, int i) {
    ExpVec e(nvars, 0);
    e[i] = 1;
    return monomial(e, 1);
}

bool Mpoly::is_constant() const {
    if (terms_.empty()) return true;
    return terms_.size() == 1 && exp_is_zero(terms_.begin()->first);
}

Rat Mpoly::constant_value() const {
    if (terms_.empty()) return Rat(0);
    auto it = terms_.find(ExpVec(nvars_, 0));
    return it == terms_.end() ? Rat(0) : it->second;
}

void Mpoly::add_term(const ExpVec& e, const Rat& c) {
    if (frob::is_zero(c)) return;
    auto [it, inserted] = terms_.emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (frob::is_zero(it->second)) terms_.erase(it);
    }
}

Rat Mpoly::coeff(const ExpVec& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Rat(0) : it->second;
}

Mpoly Mpoly::operator-() const {
    Mpoly r(nvars_);
    for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
    return r;
}

Mpoly& Mpoly::operator+=(const Mpoly& o) {
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
}

Mpoly& Mpoly::operator-=(const Mpoly& o) {
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
}

Mpoly operator*(const Mpoly& a, const Mpoly& b) {
    Mpoly r(a.nvars_);
    for (const auto& [ea, ca] : a.terms_)
        for (const auto& [eb, cb] : b.terms_) r.add_term(exp_add(ea, eb), ca * cb);
    return r;
}

Mpoly Mpoly::scaled(const Rat& c) const {
    Mpoly r(nvars_);
    if (frob::is_zero(c)) return r;
    for (const auto& [e, k] : terms_) r.terms_.emplace(e, k * c);
    return r;
}

Mpoly Mpoly::pow(int64_t k) const {
    Mpoly r = constant(nvars_, 1);
    for (int64_t i = 0; i < k; ++i) r = r * *this;
    return r;
}

Mpoly Mpoly::derivative(int i) const {
    Mpoly r(nvars_);
    for (const auto& [e, c] : terms_) {
        if (e[i] == 0) continue;
        ExpVec d = e;
        d[i] -= 1;
        r.add_term(d, c * Rat(e[i]));
    }
    return r;
}

int64_t Mpoly::degree(int i) const {
    int64_t d = -1;
    for (const auto& [e, c] : terms_) d = std::max<int64_t>(d, e[i]);
    return d;
}

int64_t Mpoly::total_degree() const {
    int64_t d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, exp_total(e));
    return d;
}

Rat Mpoly::eval(const std::vector<Rat>& point) const {
    Rat acc(0);
    for (const auto& [e, c] : terms_) {
        Rat t = c;
        for (int i = 0; i < nvars_; ++i) {
            if (e[i] == 0) continue;
            if (e[i] < 0) fail_internal("eval on negative exponent");
            Rat p(1);
            for (int32_t k = 0; k < e[i]; ++k) p *= point[i];
            t *= p;
        }
        acc += t;
    }
    return acc;
}

Mpoly Mpoly::subst(const std::vector<Mpoly>& images) const {
    int out_vars = images.empty() ? 0 : images[0].nvars();
    Mpoly acc(out_vars);
    for (const auto& [e, c] : terms_) {
        Mpoly t = Mpoly::constant(out_vars, c);
        for (int i = 0; i < nvars_; ++i) {
            if (e[i] < 0) fail_internal("subst on negative exponent");
            for (int32_t k = 0; k < e[i]; ++k) t = t * images[i];
        }
        acc += t;
    }
    return acc;
}

Mpoly Mpoly::truncated(int64_t cap) const {
    Mpoly r(nvars_);
    for (const auto& [e, c] : terms_)
        if (exp_total(e) <= cap) r.terms_.emplace(e, c);
    return r;
}

Mpoly Mpoly::homogeneous_part(int64_t d) const {
    Mpoly r(nvars_);
    for (const auto& [e, c] : terms_)
        if (exp_total(e) == d) r.terms_.emplace(e, c);
    return r;
}

Mpoly mul_trunc(const Mpoly& a, const Mpoly& b, int64_t cap) {
    Mpoly r(a.nvars());
    for (const auto& [ea, ca] : a.terms()) {
        int64_t da = exp_total(ea);
        if (da > cap) continue;
        for (const auto& [eb, cb] : b.terms()) {
            if (da + exp_total(eb) > cap) continue;
            r.add_term(exp_add(ea, eb), ca * cb);
        }
    }
    return r;
}

std::string Mpoly::to_string(const std::string& var_letter) const {
    if (terms_.empty()) return "0";
    std::vector<const std::pair<const ExpVec, Rat>*> order;
    order.reserve(terms_.size());
    for (const auto& t : terms_) order.push_back(&t);
    std::sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
        return term_order_before(a->first, b->first);
    });

    std::ostringstream os;
    bool first = true;
    for (const auto* t : order) {
        const auto& [e, c] = *t;
        Rat a = abs(c);
        if (first) {
            if (sgn(c) < 0) os << "-";
            first = false;
        } else {
            os << (sgn(c) < 0 ? " - " : " + ");
        }
        bool has_var = !exp_is_zero(e);
        if (!has_var || a != 1) {
            os << rat_to_string(a);
            if (has_var) os << "*";
        }
        bool first_var = true;
        for (size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            if (!first_var) os << "*";
            first_var = false;
            os << var_letter << (i + 1);
            if (e[i] != 1) os << "^" << e[i];
        }
    }
    return os.str();
}

} // namespace frob
