#include <algorithm>
#include <map>

#include "combspec/wfomc.hpp"

namespace combspec {

namespace {

struct IntegerRing {
    using Value = mpz_class;
    Value from(const Polynomial& p) const {
        if (!p.is_constant()) throw std::logic_error("symbolic weight in integer evaluation");
        return p.constant();
    }
    Value one() const { return 1; }
    bool is_zero(const Value& v) const { return v == 0; }
    Value mul(const Value& a, const Value& b) const { return a * b; }
    Value scale(const Value& a, const mpz_class& c) const { return a * c; }
};

struct PolynomialRing {
    using Value = Polynomial;
    Polynomial::Caps caps;
    Value from(const Polynomial& p) const { return p.truncated(caps); }
    Value one() const { return Polynomial(1L); }
    bool is_zero(const Value& v) const { return v.is_zero(); }
    Value mul(const Value& a, const Value& b) const { return Polynomial::multiply(a, b, caps); }
    Value scale(const Value& a, const mpz_class& c) const { return Polynomial::multiply(a, Polynomial(c), caps); }
};

// Number of classes when `processed` cells are grouped by their r-row
// restricted to `remaining`.
int count_classes(const std::vector<std::vector<int>>& id, const std::vector<int>& processed,
                  const std::vector<int>& remaining) {
    std::vector<std::vector<int>> rows;
    for (int i : processed) {
        std::vector<int> row;
        for (int k : remaining) row.push_back(id[i][k]);
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end());
    return static_cast<int>(std::unique(rows.begin(), rows.end()) - rows.begin());
}

// Greedy order keeping the number of simultaneous classes small.
std::vector<int> choose_order(const std::vector<std::vector<int>>& id) {
    const int p = static_cast<int>(id.size());
    std::vector<int> processed, remaining(p);
    for (int i = 0; i < p; ++i) remaining[i] = i;
    while (!remaining.empty()) {
        int best = -1, best_classes = 0;
        for (std::size_t t = 0; t < remaining.size(); ++t) {
            std::vector<int> rest = remaining;
            rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(t));
            std::vector<int> with = processed;
            with.push_back(remaining[t]);
            int c = count_classes(id, with, rest);
            if (best < 0 || c < best_classes) {
                best = static_cast<int>(t);
                best_classes = c;
            }
        }
        processed.push_back(remaining[best]);
        remaining.erase(remaining.begin() + best);
    }
    return processed;
}

// Dynamic program over cells: the state records, for each class of already
// placed cells sharing the same edge weights to every unplaced cell, how
// many domain elements it holds. Produces values for every n <= max_n.
template <class Ring>
std::vector<typename Ring::Value> cell_dp(const CellGraph& g, int max_n, const Ring& ring, const Deadline& deadline) {
    using Value = typename Ring::Value;
    if (max_n > 255) throw std::invalid_argument("domain size above 255 is not supported");
    const int p = static_cast<int>(g.size());
    std::vector<Value> result(max_n + 1);
    if (p == 0) {
        result[0] = ring.one();
        return result;
    }

    std::map<std::string, int> intern;
    std::vector<std::vector<int>> id(p, std::vector<int>(p));
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) id[i][j] = intern.emplace(g.r[i][j].to_string(), static_cast<int>(intern.size())).first->second;

    const std::vector<int> order = choose_order(id);

    std::vector<std::vector<mpz_class>> binom(max_n + 1, std::vector<mpz_class>(max_n + 1));
    for (int a = 0; a <= max_n; ++a) {
        binom[a][0] = 1;
        for (int b = 1; b <= a; ++b) binom[a][b] = binom[a - 1][b - 1] + (b <= a - 1 ? binom[a - 1][b] : mpz_class(0));
    }

    using State = std::vector<std::uint8_t>;
    std::map<State, Value> current;
    current.emplace(State{}, ring.one());
    std::vector<std::vector<int>> classes;  // members of each current class

    for (int t = 0; t < p; ++t) {
        const int j = order[t];
        const std::vector<int> remaining(order.begin() + t + 1, order.end());

        // Next partition of placed cells (including j) by rows over the remaining cells.
        std::map<std::vector<int>, int> row_class;
        auto class_of = [&](int cell) {
            std::vector<int> row;
            for (int k : remaining) row.push_back(id[cell][k]);
            return row_class.emplace(std::move(row), static_cast<int>(row_class.size())).first->second;
        };
        std::vector<int> next_id(classes.size());
        for (std::size_t c = 0; c < classes.size(); ++c) next_id[c] = class_of(classes[c].front());
        const int j_class = class_of(j);
        std::vector<std::vector<int>> next_classes(row_class.size());
        for (std::size_t c = 0; c < classes.size(); ++c)
            next_classes[next_id[c]].insert(next_classes[next_id[c]].end(), classes[c].begin(), classes[c].end());
        next_classes[j_class].push_back(j);

        // Powers r_{c,j}^K for each current class and the loop/vertex weights of j.
        std::vector<std::vector<Value>> class_pow(classes.size());
        for (std::size_t c = 0; c < classes.size(); ++c) {
            Value base = ring.from(g.r[classes[c].front()][j]);
            class_pow[c].push_back(ring.one());
            for (int k = 1; k <= max_n; ++k) class_pow[c].push_back(ring.mul(class_pow[c].back(), base));
        }
        const Value wj = ring.from(g.w[j]);
        const Value rjj = ring.from(g.r[j][j]);
        std::vector<Value> loop_pow{ring.one()};
        for (int k = 1; k <= max_n; ++k) loop_pow.push_back(ring.mul(loop_pow.back(), rjj));

        std::map<State, Value> next;
        for (const auto& [state, value] : current) {
            deadline.check();
            int total = 0;
            State base(next_classes.size(), 0);
            Value cross = ring.one();
            for (std::size_t c = 0; c < state.size(); ++c) {
                total += state[c];
                base[next_id[c]] = static_cast<std::uint8_t>(base[next_id[c]] + state[c]);
                if (state[c]) cross = ring.mul(cross, class_pow[c][state[c]]);
            }
            const Value step = ring.mul(cross, wj);
            Value acc = ring.one();  // w_j^k r_jj^C(k,2) cross^k
            for (int k = 0; total + k <= max_n; ++k) {
                if (k > 0) {
                    acc = ring.mul(ring.mul(acc, step), loop_pow[k - 1]);
                    if (ring.is_zero(acc)) break;
                }
                State key = base;
                key[j_class] = static_cast<std::uint8_t>(key[j_class] + k);
                Value term = ring.scale(ring.mul(value, acc), binom[total + k][k]);
                auto [it, inserted] = next.try_emplace(std::move(key), std::move(term));
                if (!inserted) it->second += term;
            }
        }
        current = std::move(next);
        classes = std::move(next_classes);
    }

    for (auto& [state, value] : current) {
        int total = 0;
        for (auto c : state) total += c;
        result[total] += value;
    }
    return result;
}

Polynomial::Caps caps_for(const ConditionedCellGraph& cg, int max_n) {
    Polynomial::Caps caps{};
    for (int v = 0; v < Polynomial::kMaxVars; ++v) caps[v] = v < cg.num_vars ? 0 : Polynomial::kMaxExponent;
    for (const auto& c : cg.constraints)
        for (int n = 1; n <= max_n; ++n) {
            long t = std::clamp<long>(c.target(n), 0, Polynomial::kMaxExponent - 1);
            caps[c.var] = std::max<unsigned>(caps[c.var], static_cast<unsigned>(t));
        }
    return caps;
}

// Coefficient of the monomial selected by the constraint targets at n, times
// the original weights raised to those targets.
mpz_class select_monomial(const Polynomial& p, const std::vector<CardinalityConstraint>& constraints, int n,
                          const std::vector<Polynomial>& multipliers) {
    std::vector<long> target(multipliers.size(), -1);
    for (const auto& c : constraints) {
        long t = c.target(n);
        if (t < 0 || t > static_cast<long>(Polynomial::kMaxExponent)) return 0;
        if (target[c.var] >= 0 && target[c.var] != t) return 0;
        target[c.var] = t;
    }
    std::vector<unsigned> exps;
    for (long t : target) exps.push_back(static_cast<unsigned>(std::max(0L, t)));
    mpz_class coef = p.coefficient(Polynomial::monomial(exps));
    for (std::size_t v = 0; v < multipliers.size() && coef != 0; ++v) {
        if (!multipliers[v].is_constant())
            throw FragmentError("symbolic weight on a constrained predicate is not supported");
        mpz_class m;
        mpz_class base = multipliers[v].constant();
        mpz_pow_ui(m.get_mpz_t(), base.get_mpz_t(), static_cast<unsigned long>(std::max(0L, target[v])));
        coef *= m;
    }
    return coef;
}

}  // namespace

std::vector<Polynomial> evaluate_cell_sums(const CellGraph& g, int max_n, const Polynomial::Caps& caps,
                                           const Deadline& deadline) {
    return cell_dp(simplify_cell_graph(g), max_n, PolynomialRing{caps}, deadline);
}

Polynomial evaluate_cell_sum(const CellGraph& g, int n) {
    if (n < 1) throw std::invalid_argument("domain size must be at least 1");
    return evaluate_cell_sums(g, n, Polynomial::no_caps())[n];
}

mpz_class extract_coefficient(const Polynomial& p, const std::vector<CardinalityConstraint>& constraints, int n,
                              const WeightMap& w) {
    if (constraints.empty()) {
        if (!p.is_constant()) throw std::invalid_argument("symbolic polynomial without constraints");
        return p.constant();
    }
    // Variables are numbered by first appearance when not yet assigned.
    std::vector<CardinalityConstraint> cs = constraints;
    std::map<std::pair<std::string, bool>, int> var_of;
    for (auto& c : cs) {
        if (c.var < 0) c.var = var_of.emplace(std::make_pair(c.predicate.name, c.negated), static_cast<int>(var_of.size())).first->second;
        else var_of.emplace(std::make_pair(c.predicate.name, c.negated), c.var);
    }
    int num_vars = 0;
    for (const auto& c : cs) num_vars = std::max(num_vars, c.var + 1);
    std::vector<Polynomial> multipliers(num_vars, Polynomial(1L));
    for (const auto& c : cs) {
        Weight wt = weight_of(w, c.predicate.name);
        multipliers[c.var] = c.negated ? wt.neg : wt.pos;
    }
    return select_monomial(p, cs, n, multipliers);
}

std::vector<mpz_class> evaluate_compiled(const ConditionedCellGraph& cg, int max_n, const Deadline& deadline) {
    std::vector<mpz_class> out(max_n);
    if (cg.num_vars == 0) {
        IntegerRing ring;
        for (const auto& b : cg.branches) {
            mpz_class factor = ring.from(b.factor);
            auto values = cell_dp(b.graph, max_n, ring, deadline);
            for (int n = 1; n <= max_n; ++n) out[n - 1] += factor * values[n];
        }
        return out;
    }
    PolynomialRing ring{caps_for(cg, max_n)};
    std::vector<Polynomial> sums(max_n + 1);
    for (const auto& b : cg.branches) {
        Polynomial factor = ring.from(b.factor);
        auto values = cell_dp(b.graph, max_n, ring, deadline);
        for (int n = 1; n <= max_n; ++n) sums[n] += ring.mul(factor, values[n]);
    }
    for (int n = 1; n <= max_n; ++n) out[n - 1] = select_monomial(sums[n], cg.constraints, n, cg.multipliers);
    return out;
}

mpz_class wfomc(const Sentence& s, int n, const WeightMap& w) {
    if (n < 1) throw std::invalid_argument("domain size must be at least 1");
    return evaluate_compiled(compile(s, w), n).back();
}

Spectrum compute_spectrum(const Sentence& s, int length, std::chrono::steady_clock::duration budget) {
    return compute_spectrum(s, length, Deadline(budget));
}

Spectrum compute_spectrum(const Sentence& s, int length, Deadline deadline) {
    if (length < 1) throw std::invalid_argument("spectrum length must be at least 1");
    Spectrum sp;
    ConditionedCellGraph cg = compile(s);
    // Stages of growing length so that an expired budget still leaves a prefix.
    int stage = std::min(length, 4);
    while (true) {
        try {
            sp.terms = evaluate_compiled(cg, stage, deadline);
        } catch (const BudgetExceeded&) {
            sp.truncated = true;
            return sp;
        }
        if (stage == length) return sp;
        stage = std::min(length, stage * 2);
    }
}

}  // namespace combspec
