#pragma once

// Sparse multivariate polynomial with arbitrary-precision integer
// coefficients over at most kMaxVars symbolic variables x0..x3.

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace combspec {

class Polynomial {
public:
    static constexpr int kMaxVars = 4;
    static constexpr unsigned kMaxExponent = 0x7FFF;

    // Packed exponent vector, 16 bits per variable.
    using Monomial = std::uint64_t;
    using Term = std::pair<Monomial, mpz_class>;
    // Per-variable degree bounds; terms above any bound are discarded.
    using Caps = std::array<unsigned, kMaxVars>;

    static Caps no_caps() { return {kMaxExponent, kMaxExponent, kMaxExponent, kMaxExponent}; }

    Polynomial() = default;
    Polynomial(long c);  // NOLINT(google-explicit-constructor)
    Polynomial(const mpz_class& c);  // NOLINT(google-explicit-constructor)

    static Polynomial variable(int i, unsigned exponent = 1);

    static unsigned exponent(Monomial m, int var) { return static_cast<unsigned>((m >> (16 * var)) & 0xFFFF); }
    static Monomial monomial(const std::vector<unsigned>& exps);

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].first == 0); }
    mpz_class constant() const;
    mpz_class coefficient(Monomial m) const;
    unsigned degree(int var) const;
    const std::vector<Term>& terms() const { return terms_; }

    Polynomial& operator+=(const Polynomial& o);
    Polynomial& operator-=(const Polynomial& o);
    Polynomial& operator*=(const Polynomial& o) { return *this = multiply(*this, o, no_caps()); }
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) { return multiply(a, b, no_caps()); }
    Polynomial operator-() const;

    static Polynomial multiply(const Polynomial& a, const Polynomial& b, const Caps& caps);
    Polynomial pow(unsigned long e, const Caps& caps) const;
    Polynomial truncated(const Caps& caps) const;

    // Renames x_i to x_{perm[i]}.
    Polynomial permuted(const std::vector<int>& perm) const;

    // Deterministic text, e.g. "3*x0^2*x1 - 1".
    std::string to_string() const;

    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }

private:
    void normalize();

    // Sorted by monomial; no zero coefficients.
    std::vector<Term> terms_;
};

}  // namespace combspec
