#include "combspec/polynomial.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace combspec {

Polynomial::Polynomial(long c) {
    if (c != 0) terms_.emplace_back(0, mpz_class(c));
}

Polynomial::Polynomial(const mpz_class& c) {
    if (c != 0) terms_.emplace_back(0, c);
}

Polynomial Polynomial::variable(int i, unsigned exponent) {
    if (i < 0 || i >= kMaxVars) throw std::out_of_range("polynomial variable index out of range");
    if (exponent > kMaxExponent) throw std::overflow_error("polynomial exponent overflow");
    Polynomial p;
    p.terms_.emplace_back(static_cast<Monomial>(exponent) << (16 * i), mpz_class(1));
    return p;
}

Polynomial::Monomial Polynomial::monomial(const std::vector<unsigned>& exps) {
    if (exps.size() > static_cast<std::size_t>(kMaxVars)) throw std::out_of_range("too many polynomial variables");
    Monomial m = 0;
    for (std::size_t i = 0; i < exps.size(); ++i) {
        if (exps[i] > kMaxExponent) throw std::overflow_error("polynomial exponent overflow");
        m |= static_cast<Monomial>(exps[i]) << (16 * i);
    }
    return m;
}

mpz_class Polynomial::constant() const { return coefficient(0); }

mpz_class Polynomial::coefficient(Monomial m) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                               [](const Term& t, Monomial key) { return t.first < key; });
    if (it != terms_.end() && it->first == m) return it->second;
    return 0;
}

unsigned Polynomial::degree(int var) const {
    unsigned d = 0;
    for (const auto& t : terms_) d = std::max(d, exponent(t.first, var));
    return d;
}

void Polynomial::normalize() {
    std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) { return a.first < b.first; });
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (auto& t : terms_) {
        if (!out.empty() && out.back().first == t.first) out.back().second += t.second;
        else out.push_back(std::move(t));
    }
    out.erase(std::remove_if(out.begin(), out.end(), [](const Term& t) { return t.second == 0; }), out.end());
    terms_ = std::move(out);
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
    if (o.terms_.empty()) return *this;
    if (terms_.size() == 1 && o.terms_.size() == 1 && terms_[0].first == o.terms_[0].first) {
        terms_[0].second += o.terms_[0].second;
        if (terms_[0].second == 0) terms_.clear();
        return *this;
    }
    std::vector<Term> out;
    out.reserve(terms_.size() + o.terms_.size());
    auto a = terms_.begin();
    auto b = o.terms_.begin();
    while (a != terms_.end() || b != o.terms_.end()) {
        if (b == o.terms_.end() || (a != terms_.end() && a->first < b->first)) {
            out.push_back(std::move(*a++));
        } else if (a == terms_.end() || b->first < a->first) {
            out.push_back(*b++);
        } else {
            mpz_class c = a->second + b->second;
            if (c != 0) out.emplace_back(a->first, std::move(c));
            ++a;
            ++b;
        }
    }
    terms_ = std::move(out);
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) { return *this += -o; }

Polynomial Polynomial::operator-() const {
    Polynomial p = *this;
    for (auto& t : p.terms_) t.second = -t.second;
    return p;
}

Polynomial Polynomial::multiply(const Polynomial& a, const Polynomial& b, const Caps& caps) {
    Polynomial p;
    if (a.is_zero() || b.is_zero()) return p;
    if (a.terms_.size() == 1 && a.terms_[0].first == 0) {
        p = b;
        for (auto& t : p.terms_) t.second *= a.terms_[0].second;
        return p.truncated(caps);
    }
    if (b.terms_.size() == 1 && b.terms_[0].first == 0) return multiply(b, a, caps);

    std::unordered_map<Monomial, mpz_class> acc;
    acc.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& [ma, ca] : a.terms_) {
        for (const auto& [mb, cb] : b.terms_) {
            Monomial m = 0;
            bool keep = true;
            for (int v = 0; v < kMaxVars && keep; ++v) {
                unsigned e = exponent(ma, v) + exponent(mb, v);
                if (e > caps[v]) {
                    if (caps[v] == kMaxExponent) throw std::overflow_error("polynomial exponent overflow");
                    keep = false;
                }
                m |= static_cast<Monomial>(e) << (16 * v);
            }
            if (!keep) continue;
            mpz_class& slot = acc[m];
            mpz_addmul(slot.get_mpz_t(), ca.get_mpz_t(), cb.get_mpz_t());
        }
    }
    p.terms_.reserve(acc.size());
    for (auto& [m, c] : acc)
        if (c != 0) p.terms_.emplace_back(m, std::move(c));
    std::sort(p.terms_.begin(), p.terms_.end(), [](const Term& x, const Term& y) { return x.first < y.first; });
    return p;
}

Polynomial Polynomial::truncated(const Caps& caps) const {
    Polynomial p;
    for (const auto& t : terms_) {
        bool keep = true;
        for (int v = 0; v < kMaxVars; ++v) keep = keep && exponent(t.first, v) <= caps[v];
        if (keep) p.terms_.push_back(t);
    }
    return p;
}

Polynomial Polynomial::pow(unsigned long e, const Caps& caps) const {
    if (is_constant()) {
        mpz_class c = constant();
        mpz_class r;
        mpz_pow_ui(r.get_mpz_t(), c.get_mpz_t(), e);
        return Polynomial(r);
    }
    Polynomial result(1L), base = truncated(caps);
    while (e > 0) {
        if (e & 1UL) result = multiply(result, base, caps);
        e >>= 1;
        if (e > 0) base = multiply(base, base, caps);
    }
    return result;
}

Polynomial Polynomial::permuted(const std::vector<int>& perm) const {
    Polynomial p;
    for (const auto& [m, c] : terms_) {
        Monomial out = 0;
        for (int v = 0; v < kMaxVars; ++v) {
            int target = v < static_cast<int>(perm.size()) ? perm[v] : v;
            out |= static_cast<Monomial>(exponent(m, v)) << (16 * target);
        }
        p.terms_.emplace_back(out, c);
    }
    p.normalize();
    return p;
}

std::string Polynomial::to_string() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [m, c] = *it;
        mpz_class mag = abs(c);
        if (s.empty()) {
            if (c < 0) s += '-';
        } else {
            s += c < 0 ? " - " : " + ";
        }
        std::string vars;
        for (int v = 0; v < kMaxVars; ++v) {
            unsigned e = exponent(m, v);
            if (e == 0) continue;
            if (!vars.empty()) vars += '*';
            vars += "x" + std::to_string(v);
            if (e > 1) vars += "^" + std::to_string(e);
        }
        if (vars.empty()) s += mag.get_str();
        else if (mag == 1) s += vars;
        else s += mag.get_str() + "*" + vars;
    }
    return s;
}

}  // namespace combspec
