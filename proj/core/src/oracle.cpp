#include "combspec/oracle.hpp"

#include <map>

namespace combspec {

namespace {

struct AtomLayout {
    std::vector<long> base;
    long size = 0;
};

AtomLayout layout(const Sentence& s, int n) {
    AtomLayout l;
    for (const auto& p : s.signature()) {
        l.base.push_back(l.size);
        long count = 1;
        for (int i = 0; i < p.arity; ++i) count *= n;
        l.size += count;
    }
    return l;
}

int predicate_index(const Sentence& s, const std::string& name) {
    const auto& sig = s.signature();
    for (std::size_t i = 0; i < sig.size(); ++i)
        if (sig[i].name == name) return static_cast<int>(i);
    return -1;
}

struct CompiledLiteral {
    long base;
    int arity;
    Var args[2];
    bool negated;
};

struct CompiledClause {
    std::vector<Quantifier> quants;
    std::vector<CompiledLiteral> body;
};

std::vector<CompiledClause> compile_clauses(const Sentence& s, const AtomLayout& l) {
    std::vector<CompiledClause> out;
    for (const auto& c : s.clauses()) {
        CompiledClause cc{c.quants, {}};
        for (const auto& lit : c.body)
            cc.body.push_back({l.base[predicate_index(s, lit.pred)], lit.arity, {lit.args[0], lit.args[1]}, lit.negated});
        out.push_back(std::move(cc));
    }
    return out;
}

bool body_true(const CompiledClause& c, int n, std::uint64_t world, int x, int y) {
    for (const auto& l : c.body) {
        long bit = l.base;
        auto value = [&](Var v) { return v == Var::X ? x : y; };
        if (l.arity == 1) bit += value(l.args[0]);
        else if (l.arity == 2) bit += static_cast<long>(value(l.args[0])) * n + value(l.args[1]);
        if (static_cast<bool>((world >> bit) & 1U) != l.negated) return true;
    }
    return false;
}

// Evaluates quantifiers from position q onwards with bound values.
bool quantified(const CompiledClause& c, int n, std::uint64_t world, std::size_t q, int x, int y) {
    if (q == c.quants.size()) return body_true(c, n, world, x, y);
    const Quantifier& quant = c.quants[q];
    int count = 0;
    for (int e = 0; e < n; ++e) {
        bool v = q == 0 ? quantified(c, n, world, 1, e, y) : quantified(c, n, world, 2, x, e);
        switch (quant.kind) {
            case QuantKind::ForAll:
                if (!v) return false;
                break;
            case QuantKind::Exists:
                if (v) return true;
                break;
            case QuantKind::Count:
                count += v;
                if (count > quant.count) return false;
                break;
        }
    }
    switch (quant.kind) {
        case QuantKind::ForAll: return true;
        case QuantKind::Exists: return false;
        case QuantKind::Count: return count == quant.count;
    }
    return false;
}

bool all_hold(const std::vector<CompiledClause>& cs, int n, std::uint64_t world) {
    for (const auto& c : cs)
        if (!quantified(c, n, world, 0, 0, 0)) return false;
    return true;
}

}  // namespace

long herbrand_size(const Sentence& s, int n) { return layout(s, n).size; }

bool holds(const Sentence& s, int n, std::uint64_t world) {
    AtomLayout l = layout(s, n);
    return all_hold(compile_clauses(s, l), n, world);
}

mpz_class brute_force_count(const Sentence& s, int n, int herbrand_cap) {
    return brute_force_wfomc(s, n, {}, herbrand_cap);
}

mpz_class brute_force_wfomc(const Sentence& s, int n, const WeightMap& w, int herbrand_cap) {
    if (n < 1) throw std::invalid_argument("domain size must be at least 1");
    AtomLayout l = layout(s, n);
    if (l.size > herbrand_cap || l.size > 62)
        throw HerbrandCapExceeded("Herbrand base of " + std::to_string(l.size) + " atoms exceeds cap " +
                                  std::to_string(herbrand_cap));
    const auto clauses = compile_clauses(s, l);
    const auto& sig = s.signature();

    // Worlds grouped by their number of true atoms per predicate.
    std::map<std::vector<int>, long long> tally;
    const std::uint64_t worlds = std::uint64_t{1} << l.size;
    for (std::uint64_t world = 0; world < worlds; ++world) {
        if (!all_hold(clauses, n, world)) continue;
        std::vector<int> counts(sig.size());
        for (std::size_t p = 0; p < sig.size(); ++p) {
            long end = p + 1 < sig.size() ? l.base[p + 1] : l.size;
            std::uint64_t mask = end - l.base[p] >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << (end - l.base[p])) - 1);
            counts[p] = __builtin_popcountll((world >> l.base[p]) & mask);
        }
        ++tally[counts];
    }

    mpz_class total = 0;
    for (const auto& [counts, num] : tally) {
        mpz_class term = static_cast<long>(num);
        for (std::size_t p = 0; p < sig.size(); ++p) {
            Weight wt = weight_of(w, sig[p].name);
            if (!wt.pos.is_constant() || !wt.neg.is_constant())
                throw std::invalid_argument("oracle weights must be integer constants");
            long atoms = (p + 1 < sig.size() ? l.base[p + 1] : l.size) - l.base[p];
            mpz_class a, b;
            mpz_class pos = wt.pos.constant(), neg = wt.neg.constant();
            mpz_pow_ui(a.get_mpz_t(), pos.get_mpz_t(), counts[p]);
            mpz_pow_ui(b.get_mpz_t(), neg.get_mpz_t(), atoms - counts[p]);
            term *= a * b;
        }
        total += term;
    }
    return total;
}

}  // namespace combspec
