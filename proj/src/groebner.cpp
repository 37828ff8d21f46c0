#include "frob/groebner.hpp"

#include <map>
#include <queue>

#include "frob/error.hpp"

namespace frob {

bool is_probable_prime(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t q : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % q == 0) return n == q;
    }
    uint64_t d = n - 1;
    int r = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++r;
    }
    auto mulmod = [&](uint64_t a, uint64_t b) {
        return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) % n);
    };
    auto powmod = [&](uint64_t a, uint64_t e) {
        uint64_t acc = 1;
        a %= n;
        while (e) {
            if (e & 1) acc = mulmod(acc, a);
            a = mulmod(a, a);
            e >>= 1;
        }
        return acc;
    };
    for (uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        uint64_t x = powmod(a, d);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (int i = 1; i < r; ++i) {
            x = mulmod(x, x);
            if (x == n - 1) {
                witness = false;
                break;
            }
        }
        if (witness) return false;
    }
    return true;
}

ZpField::Elem ZpField::inv(Elem a) const {
    // Fermat; p is prime.
    Elem acc = 1, base = a % p;
    uint64_t e = p - 2;
    while (e) {
        if (e & 1) acc = mul(acc, base);
        base = mul(base, base);
        e >>= 1;
    }
    return acc;
}

bool MonomialOrder::less(const ExpVec& a, const ExpVec& b) const {
    if (elim_block > 0) {
        int64_t da = 0, db = 0;
        for (int i = 0; i < elim_block; ++i) {
            da += a[i];
            db += b[i];
        }
        if (da != db) return da < db;
    }
    int64_t ta = 0, tb = 0;
    for (int i = elim_block; i < nvars; ++i) {
        ta += a[i];
        tb += b[i];
    }
    if (ta != tb) return ta < tb;
    // revlex tail within the block, then on the elimination block
    for (int i = nvars - 1; i >= elim_block; --i)
        if (a[i] != b[i]) return a[i] > b[i];
    for (int i = elim_block - 1; i >= 0; --i)
        if (a[i] != b[i]) return a[i] > b[i];
    return false;
}

bool MonomialOrder::divides(const ExpVec& a, const ExpVec& b) const {
    for (int i = 0; i < nvars; ++i)
        if (a[i] > b[i]) return false;
    return true;
}

template <class F>
void Buchberger<F>::spend(int64_t units) const {
    budget_ -= units;
    if (budget_ < 0) fail_budget("basis computation exceeded its step budget");
}

template <class F>
GBPoly<F> Buchberger<F>::sort_terms(GBPoly<F> p) const {
    std::sort(p.begin(), p.end(),
              [&](const auto& a, const auto& b) { return order_.less(b.first, a.first); });
    GBPoly<F> out;
    for (auto& [e, c] : p) {
        if (!out.empty() && out.back().first == e)
            out.back().second = field_.add(out.back().second, c);
        else
            out.push_back({e, c});
        if (!out.empty() && field_.is_zero(out.back().second)) out.pop_back();
    }
    return out;
}

namespace {

template <class F>
GBPoly<F> mul_monomial(const F& field, const GBPoly<F>& p, const ExpVec& e,
                       const typename F::Elem& c) {
    GBPoly<F> r;
    r.reserve(p.size());
    for (const auto& [pe, pc] : p) r.push_back({exp_add(pe, e), field.mul(pc, c)});
    return r;
}

template <class F>
GBPoly<F> sub(const F& field, const MonomialOrder& order, const GBPoly<F>& a, const GBPoly<F>& b) {
    GBPoly<F> r;
    size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && order.less(b[j].first, a[i].first))) {
            r.push_back(a[i++]);
        } else if (i == a.size() || order.less(a[i].first, b[j].first)) {
            r.push_back({b[j].first, field.neg(b[j].second)});
            ++j;
        } else {
            auto c = field.sub(a[i].second, b[j].second);
            if (!field.is_zero(c)) r.push_back({a[i].first, c});
            ++i;
            ++j;
        }
    }
    return r;
}

} // namespace

template <class F>
void Buchberger<F>::add_generator(GBPoly<F> g) {
    g = sort_terms(std::move(g));
    if (!g.empty()) basis_.push_back(std::move(g));
}

template <class F>
GBPoly<F> Buchberger<F>::normal_form(GBPoly<F> h) const {
    h = sort_terms(std::move(h));
    GBPoly<F> out;
    while (!h.empty()) {
        spend(1);
        bool reduced = false;
        for (const auto& g : basis_) {
            if (!order_.divides(g[0].first, h[0].first)) continue;
            auto factor = field_.div(h[0].second, g[0].second);
            ExpVec shift = exp_sub(h[0].first, g[0].first);
            h = sub(field_, order_, h, mul_monomial(field_, g, shift, factor));
            reduced = true;
            break;
        }
        if (!reduced) {
            out.push_back(h[0]);
            h.erase(h.begin());
        }
    }
    return out;
}

template <class F>
void Buchberger<F>::run() {
    // Classic pair processing with the coprime-lcm criterion.
    std::vector<std::pair<size_t, size_t>> pairs;
    auto push_pairs = [&](size_t k) {
        for (size_t i = 0; i < k; ++i) pairs.push_back({i, k});
    };
    for (size_t k = 1; k < basis_.size(); ++k) push_pairs(k);

    while (!pairs.empty()) {
        spend(1);
        auto [i, j] = pairs.back();
        pairs.pop_back();
        const auto& gi = basis_[i];
        const auto& gj = basis_[j];
        const ExpVec& a = gi[0].first;
        const ExpVec& b = gj[0].first;
        ExpVec lcm(a.size());
        bool coprime = true;
        for (size_t t = 0; t < a.size(); ++t) {
            lcm[t] = std::max(a[t], b[t]);
            if (a[t] > 0 && b[t] > 0) coprime = false;
        }
        if (coprime) continue;
        auto spoly = sub(field_, order_,
                         mul_monomial(field_, gi, exp_sub(lcm, a), field_.one()),
                         mul_monomial(field_, gj, exp_sub(lcm, b),
                                      field_.div(gi[0].second, gj[0].second)));
        auto rem = normal_form(std::move(spoly));
        if (rem.empty()) continue;
        basis_.push_back(std::move(rem));
        push_pairs(basis_.size() - 1);
    }

    // Inter-reduce and normalize to unit leading coefficients.
    for (size_t i = 0; i < basis_.size(); ++i) {
        std::vector<GBPoly<F>> others;
        for (size_t j = 0; j < basis_.size(); ++j)
            if (j != i) others.push_back(basis_[j]);
        Buchberger<F> tmp(field_, order_, budget_);
        tmp.basis_ = std::move(others);
        auto r = tmp.normal_form(basis_[i]);
        budget_ = tmp.budget_;
        if (r.empty()) {
            basis_.erase(basis_.begin() + static_cast<long>(i));
            --i;
            continue;
        }
        basis_[i] = std::move(r);
    }
    for (auto& g : basis_) {
        auto lead = g[0].second;
        for (auto& [e, c] : g) c = field_.div(c, lead);
    }
    std::sort(basis_.begin(), basis_.end(),
              [&](const GBPoly<F>& x, const GBPoly<F>& y) { return order_.less(x[0].first, y[0].first); });
}

template <class F>
bool Buchberger<F>::contains_unit() const {
    for (const auto& g : basis_)
        if (exp_is_zero(g[0].first)) return true;
    return false;
}

template class Buchberger<RatField>;
template class Buchberger<ZpField>;

namespace {

// Shift a Laurent polynomial by the minimal exponents, prepend a w slot.
ExpVec shifted_with_w(const ExpVec& e, const ExpVec& mins) {
    ExpVec r(e.size() + 1, 0);
    for (size_t i = 0; i < e.size(); ++i) r[i + 1] = e[i] - mins[i];
    return r;
}

std::vector<std::pair<ExpVec, Rat>> shift_gen(const Laurent& g) {
    ExpVec mins(g.nu(), 0);
    bool first = true;
    for (const auto& [e, c] : g.terms()) {
        for (int i = 0; i < g.nu(); ++i) mins[i] = first ? e[i] : std::min(mins[i], e[i]);
        first = false;
    }
    std::vector<std::pair<ExpVec, Rat>> out;
    for (const auto& [e, c] : g.terms()) out.push_back({shifted_with_w(e, mins), c.constant_value()});
    return out;
}

template <class F>
TriState torus_system_empty_impl(const F& field, const std::vector<Laurent>& gens, int64_t budget,
                                 std::vector<GBPoly<F>>* out_basis) {
    if (gens.empty()) return TriState::no;
    int n = gens[0].nu();
    MonomialOrder order{n + 1, 1};
    Buchberger<F> engine(field, order, budget);
    bool any = false;
    for (const auto& g : gens) {
        if (g.is_zero()) continue;
        any = true;
        GBPoly<F> p;
        for (const auto& [e, c] : shift_gen(g)) {
            typename F::Elem elem;
            if constexpr (std::is_same_v<F, RatField>) {
                elem = c;
            } else {
                Int num = c.get_num() % Int(static_cast<unsigned long>(field.p));
                Int den = c.get_den() % Int(static_cast<unsigned long>(field.p));
                if (den == 0) return TriState::budget_exceeded; // bad prime
                uint64_t nu_ = num < 0 ? field.p - mpz_class(-num).get_ui() % field.p
                                       : mpz_class(num).get_ui() % field.p;
                elem = field.div(nu_, mpz_class(den).get_ui() % field.p);
            }
            if (!field.is_zero(elem)) p.push_back({e, elem});
        }
        engine.add_generator(std::move(p));
    }
    if (!any) return TriState::no; // all generators vanish: everything critical
    // w * u1...un - 1
    GBPoly<F> sat;
    ExpVec wu(n + 1, 1);
    sat.push_back({wu, field.one()});
    sat.push_back({ExpVec(n + 1, 0), field.neg(field.one())});
    engine.add_generator(std::move(sat));
    try {
        engine.run();
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::budget) return TriState::budget_exceeded;
        throw;
    }
    if (out_basis) *out_basis = engine.basis();
    return engine.contains_unit() ? TriState::yes : TriState::no;
}

} // namespace

TriState torus_system_empty_q(const std::vector<Laurent>& gens, int64_t budget) {
    return torus_system_empty_impl(RatField{}, gens, budget, nullptr);
}

TriState torus_system_empty_zp(const std::vector<Laurent>& gens, uint64_t p, int64_t budget) {
    ZpField field{p};
    return torus_system_empty_impl(field, gens, budget, nullptr);
}

SaturatedIdealQ saturated_laurent_ideal_q(const std::vector<Laurent>& gens, int64_t budget) {
    SaturatedIdealQ out;
    if (gens.empty()) fail_input("empty generator list");
    out.nvars = gens[0].nu();
    std::vector<GBPoly<RatField>> basis;
    TriState st = torus_system_empty_impl(RatField{}, gens, budget, &basis);
    if (st == TriState::budget_exceeded) fail_budget("saturation basis exceeded budget");
    for (const auto& g : basis) {
        bool has_w = false;
        for (const auto& [e, c] : g)
            if (e[0] != 0) has_w = true;
        if (has_w) continue;
        GBPoly<RatField> trimmed;
        for (const auto& [e, c] : g) trimmed.push_back({ExpVec(e.begin() + 1, e.end()), c});
        out.basis.push_back(std::move(trimmed));
    }
    return out;
}

std::string gbpoly_to_string(const GBPoly<RatField>& p, const std::string& letter) {
    Mpoly m(p.empty() ? 0 : static_cast<int>(p[0].first.size()));
    for (const auto& [e, c] : p) m.add_term(e, c);
    return m.to_string(letter);
}

} // namespace frob
