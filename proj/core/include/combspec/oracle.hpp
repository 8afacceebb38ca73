#pragma once

// Brute-force model counting by enumerating every subset of the Herbrand
// base. Independent of the lifted engine; used as ground truth.

#include <stdexcept>

#include <gmpxx.h>

#include "combspec/logic.hpp"
#include "combspec/wfomc.hpp"

namespace combspec {

class HerbrandCapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kDefaultHerbrandCap = 24;

// Number of ground atoms of the sentence's signature over a domain of size n.
long herbrand_size(const Sentence& s, int n);

// Direct semantics; counting quantifiers mean "exactly k elements".
bool holds(const Sentence& s, int n, std::uint64_t world);

mpz_class brute_force_count(const Sentence& s, int n, int herbrand_cap = kDefaultHerbrandCap);
mpz_class brute_force_wfomc(const Sentence& s, int n, const WeightMap& w, int herbrand_cap = kDefaultHerbrandCap);

}  // namespace combspec
