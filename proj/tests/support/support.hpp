#pragma once

// Shared helpers for unit and acceptance tests: seeded random sentences and
// small conveniences around the oracle.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "combspec/generator.hpp"
#include "combspec/logic.hpp"

namespace combspec::testing {

using Rng = std::mt19937_64;

struct SentenceShape {
    std::vector<std::string> unary{"U"};
    std::vector<std::string> binary{"B"};
    int max_clauses = 2;
    int max_literals = 3;
    bool existential = true;
    int max_count_k = 0;  // counting quantifiers E=1..k when positive
};

inline Quantifier random_quantifier(Rng& rng, const SentenceShape& shape) {
    std::vector<Quantifier> qs{Quantifier::forall()};
    if (shape.existential) qs.push_back(Quantifier::exists());
    for (int k = 1; k <= shape.max_count_k; ++k) qs.push_back(Quantifier::exactly(k));
    return qs[rng() % qs.size()];
}

inline Literal random_literal(Rng& rng, const SentenceShape& shape, int vars) {
    const std::size_t nu = shape.unary.size(), nb = shape.binary.size();
    const bool neg = rng() & 1;
    auto var = [&] { return vars == 2 && (rng() & 1) ? Var::Y : Var::X; };
    if (nb == 0 || (nu > 0 && rng() % (nu + nb) < nu)) return Literal::unary(shape.unary[rng() % nu], var(), neg);
    return Literal::binary(shape.binary[rng() % nb], var(), var(), neg);
}

inline Clause random_clause(Rng& rng, const SentenceShape& shape) {
    const int vars = 1 + static_cast<int>(rng() % 2);
    std::vector<Quantifier> qs;
    for (int i = 0; i < vars; ++i) qs.push_back(random_quantifier(rng, shape));
    const int lits = 1 + static_cast<int>(rng() % static_cast<unsigned>(shape.max_literals));
    std::vector<Literal> body;
    for (int i = 0; i < lits; ++i) body.push_back(random_literal(rng, shape, vars));
    // Make sure every bound variable occurs.
    if (vars == 2 && std::none_of(body.begin(), body.end(), [](const Literal& l) { return l.mentions(Var::Y); }))
        body.push_back(shape.binary.empty() ? Literal::unary(shape.unary[0], Var::Y, rng() & 1)
                                            : Literal::binary(shape.binary[rng() % shape.binary.size()], Var::X, Var::Y,
                                                              rng() & 1));
    return Clause(std::move(qs), std::move(body));
}

inline Sentence random_sentence(Rng& rng, const SentenceShape& shape = {}) {
    const int clauses = 1 + static_cast<int>(rng() % static_cast<unsigned>(shape.max_clauses));
    std::vector<Clause> cs;
    for (int i = 0; i < clauses; ++i) cs.push_back(random_clause(rng, shape));
    return Sentence(std::move(cs));
}

// Random walk of refinement steps from the empty sentence, so the result lies
// in the generation space of the given limits.
inline Sentence random_profile_sentence(Rng& rng, const GenLimits& limits, int max_steps) {
    Sentence s;
    const int steps = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_steps));
    for (int i = 0; i < steps; ++i) {
        auto children = refinements(s, limits);
        if (children.empty()) break;
        s = children[rng() % children.size()];
    }
    return s;
}

inline mpz_class pow_z(long base, unsigned long e) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(base), e);
    return r;
}

inline std::vector<mpz_class> terms(std::initializer_list<const char*> xs) {
    std::vector<mpz_class> v;
    for (const char* x : xs) v.emplace_back(x);
    return v;
}

inline std::string join(const std::vector<mpz_class>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i].get_str();
    return s;
}

}  // namespace combspec::testing
