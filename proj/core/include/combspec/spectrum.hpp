#pragma once

#include <string>
#include <vector>

#include <gmpxx.h>

namespace combspec {

// Model counts for n = 1, 2, ...; truncated marks a prefix cut short by a
// time budget.
struct Spectrum {
    std::vector<mpz_class> terms;
    bool truncated = false;

    std::size_t size() const { return terms.size(); }
    std::string to_string(const char* sep = ",") const {
        std::string s;
        for (std::size_t i = 0; i < terms.size(); ++i) {
            if (i) s += sep;
            s += terms[i].get_str();
        }
        return s;
    }
    friend bool operator==(const Spectrum& a, const Spectrum& b) {
        return a.terms == b.terms && a.truncated == b.truncated;
    }
};

}  // namespace combspec
