#include <algorithm>
#include <map>

#include "combspec/wfomc.hpp"

namespace combspec {

namespace {

// Ground atoms over the two-element domain {A, B} packed into a bitmask.
class TwoElementWorld {
public:
    explicit TwoElementWorld(const std::vector<Predicate>& preds) : preds_(preds) {
        int bit = 0;
        for (const auto& p : preds_) {
            base_.push_back(bit);
            bit += p.arity == 1 ? 2 : 4;
        }
        if (bit > 64) throw FragmentError("too many predicates for cell graph construction");
    }

    int index(const std::string& pred) const {
        for (std::size_t i = 0; i < preds_.size(); ++i)
            if (preds_[i].name == pred) return static_cast<int>(i);
        throw FragmentError("predicate not in signature: " + pred);
    }
    int unary_bit(int p, int e) const { return base_[p] + e; }
    int binary_bit(int p, int e1, int e2) const { return base_[p] + 2 * e1 + e2; }

    int literal_bit(const Literal& l, int ex, int ey) const {
        int p = index(l.pred);
        auto elem = [&](Var v) { return v == Var::X ? ex : ey; };
        if (l.arity == 1) return unary_bit(p, elem(l.args[0]));
        return binary_bit(p, elem(l.args[0]), elem(l.args[1]));
    }

private:
    const std::vector<Predicate>& preds_;
    std::vector<int> base_;
};

struct GroundLiteral {
    int bit;
    bool negated;
};

using GroundClause = std::vector<GroundLiteral>;

bool satisfied(const GroundClause& c, std::uint64_t world) {
    for (const auto& l : c)
        if (static_cast<bool>((world >> l.bit) & 1U) != l.negated) return true;
    return false;
}

bool all_satisfied(const std::vector<GroundClause>& cs, std::uint64_t world) {
    for (const auto& c : cs)
        if (!satisfied(c, world)) return false;
    return true;
}

}  // namespace

CellGraph build_cell_graph(const Sentence& s, const WeightMap& w, const std::vector<CardinalityConstraint>& constraints,
                           bool prune_zero) {
    return build_cell_graph(s, s.signature(), w, constraints, prune_zero);
}

CellGraph build_cell_graph(const Sentence& s, const std::vector<Predicate>& signature, const WeightMap& w,
                           const std::vector<CardinalityConstraint>& constraints, bool prune_zero) {
    std::vector<Predicate> preds;
    for (const auto& p : signature)
        if (p.arity > 0) preds.push_back(p);
    for (const auto& c : s.clauses()) {
        if (!c.is_universal()) throw FragmentError("cell graph needs a universally quantified sentence: " + c.to_string());
        for (const auto& l : c.body)
            if (l.arity == 0) throw FragmentError("cell graph cannot hold nullary atom " + l.pred);
    }

    TwoElementWorld world(preds);

    // Clauses instantiated at (x, y) over {A = 0, B = 1}.
    std::vector<GroundClause> at_aa, at_cross;
    for (const auto& c : s.clauses()) {
        auto ground = [&](int ex, int ey) {
            GroundClause g;
            for (const auto& l : c.body) g.push_back({world.literal_bit(l, ex, ey), l.negated});
            return g;
        };
        at_aa.push_back(ground(0, 0));
        if (c.num_vars() == 2) {
            at_cross.push_back(ground(0, 1));
            at_cross.push_back(ground(1, 0));
        }
    }

    const std::size_t m = preds.size();
    std::vector<std::size_t> binaries;
    for (std::size_t i = 0; i < m; ++i)
        if (preds[i].arity == 2) binaries.push_back(i);

    std::vector<Weight> pw;
    for (const auto& p : preds) pw.push_back(weight_of(w, p.name));

    // Cell atoms at element e, as a world fragment.
    auto cell_world = [&](std::size_t mask, int e) {
        std::uint64_t bits = 0;
        for (std::size_t i = 0; i < m; ++i) {
            if (!((mask >> i) & 1U)) continue;
            int p = static_cast<int>(i);
            bits |= std::uint64_t{1} << (preds[i].arity == 1 ? world.unary_bit(p, e) : world.binary_bit(p, e, e));
        }
        return bits;
    };

    const std::size_t num_cells = std::size_t{1} << m;
    std::vector<Polynomial> wk(num_cells);
    for (std::size_t mask = 0; mask < num_cells; ++mask) {
        if (!all_satisfied(at_aa, cell_world(mask, 0))) continue;
        Polynomial v(1L);
        for (std::size_t i = 0; i < m; ++i) v *= ((mask >> i) & 1U) ? pw[i].pos : pw[i].neg;
        wk[mask] = std::move(v);
    }

    std::vector<std::size_t> kept;
    for (std::size_t mask = 0; mask < num_cells; ++mask)
        if (!prune_zero || !wk[mask].is_zero()) kept.push_back(mask);

    // Weight of each assignment to the cross atoms P(A,B), P(B,A).
    const std::size_t nb = binaries.size();
    const std::size_t num_cross = std::size_t{1} << (2 * nb);
    std::vector<std::uint64_t> cross_bits(num_cross);
    std::vector<Polynomial> cross_weight(num_cross);
    for (std::size_t a = 0; a < num_cross; ++a) {
        std::uint64_t bits = 0;
        Polynomial v(1L);
        for (std::size_t b = 0; b < nb; ++b) {
            int p = static_cast<int>(binaries[b]);
            bool ab = (a >> (2 * b)) & 1U, ba = (a >> (2 * b + 1)) & 1U;
            if (ab) bits |= std::uint64_t{1} << world.binary_bit(p, 0, 1);
            if (ba) bits |= std::uint64_t{1} << world.binary_bit(p, 1, 0);
            v *= ab ? pw[binaries[b]].pos : pw[binaries[b]].neg;
            v *= ba ? pw[binaries[b]].pos : pw[binaries[b]].neg;
        }
        cross_bits[a] = bits;
        cross_weight[a] = std::move(v);
    }

    CellGraph g;
    const auto atoms = cell_atoms(preds);
    const std::size_t p = kept.size();
    g.r.assign(p, std::vector<Polynomial>(p));
    for (std::size_t i = 0; i < p; ++i) {
        Cell cell;
        for (std::size_t t = 0; t < m; ++t) {
            Literal l = atoms[t];
            l.negated = !((kept[i] >> t) & 1U);
            cell.literals.push_back(std::move(l));
        }
        g.cells.push_back(std::move(cell));
        g.w.push_back(wk[kept[i]]);
    }
    for (std::size_t i = 0; i < p; ++i) {
        std::uint64_t wa = cell_world(kept[i], 0);
        for (std::size_t j = i; j < p; ++j) {
            std::uint64_t base = wa | cell_world(kept[j], 1);
            Polynomial r;
            for (std::size_t a = 0; a < num_cross; ++a)
                if (all_satisfied(at_cross, base | cross_bits[a])) r += cross_weight[a];
            g.r[j][i] = r;
            g.r[i][j] = std::move(r);
        }
    }
    g.constraints = constraints;
    return g;
}

CellGraph simplify_cell_graph(const CellGraph& g) {
    std::vector<std::size_t> alive;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (!g.w[i].is_zero()) alive.push_back(i);
    std::vector<Polynomial> w;
    for (auto i : alive) w.push_back(g.w[i]);

    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t a = 0; a < alive.size() && !changed; ++a) {
            for (std::size_t b = a + 1; b < alive.size() && !changed; ++b) {
                std::size_t i = alive[a], j = alive[b];
                if (!(g.r[i][i] == g.r[j][j] && g.r[i][j] == g.r[i][i])) continue;
                bool twins = true;
                for (std::size_t c = 0; c < alive.size() && twins; ++c) {
                    std::size_t k = alive[c];
                    if (k != i && k != j) twins = g.r[i][k] == g.r[j][k];
                }
                if (!twins) continue;
                w[a] += w[b];
                alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(b));
                w.erase(w.begin() + static_cast<std::ptrdiff_t>(b));
                if (w[a].is_zero()) {
                    alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(a));
                    w.erase(w.begin() + static_cast<std::ptrdiff_t>(a));
                }
                changed = true;
            }
        }
    }

    CellGraph out;
    out.constraints = g.constraints;
    out.w = std::move(w);
    for (auto i : alive) out.cells.push_back(g.cells[i]);
    out.r.assign(alive.size(), std::vector<Polynomial>(alive.size()));
    for (std::size_t a = 0; a < alive.size(); ++a)
        for (std::size_t b = 0; b < alive.size(); ++b) out.r[a][b] = g.r[alive[a]][alive[b]];
    return out;
}

ConditionedCellGraph compile(const Sentence& s, const WeightMap& w, bool merge_twins) {
    Reduction red = reduce_counting_quantifiers(s);

    ConditionedCellGraph cg;
    std::map<std::pair<std::string, bool>, int> var_of;
    for (auto& c : red.constraints) {
        auto [it, inserted] = var_of.emplace(std::make_pair(c.predicate.name, c.negated), static_cast<int>(var_of.size()));
        c.var = it->second;
    }
    if (var_of.size() > static_cast<std::size_t>(Polynomial::kMaxVars))
        throw FragmentError("too many distinct cardinality constraints");
    cg.num_vars = static_cast<int>(var_of.size());
    cg.multipliers.resize(var_of.size());

    WeightMap symbolic;
    for (const auto& p : red.signature) symbolic[p.name] = weight_of(w, p.name);
    for (const auto& [key, var] : var_of) {
        Weight& wt = symbolic[key.first];
        Polynomial& slot = key.second ? wt.neg : wt.pos;
        cg.multipliers[var] = slot;
        slot = Polynomial::variable(var);
    }
    cg.constraints = red.constraints;

    Skolemized sk = skolemize(red.sentence, red.signature, symbolic);

    std::vector<Predicate> nullary, cellular;
    for (const auto& p : sk.signature) (p.arity == 0 ? nullary : cellular).push_back(p);
    if (nullary.size() > 16) throw FragmentError("too many nullary predicates");

    for (std::size_t mask = 0; mask < (std::size_t{1} << nullary.size()); ++mask) {
        Polynomial factor(1L);
        std::map<std::string, bool> value;
        for (std::size_t i = 0; i < nullary.size(); ++i) {
            bool v = (mask >> i) & 1U;
            value[nullary[i].name] = v;
            Weight wt = weight_of(sk.weights, nullary[i].name);
            factor *= v ? wt.pos : wt.neg;
        }
        if (factor.is_zero()) continue;

        std::vector<Clause> clauses;
        bool consistent = true;
        for (const auto& c : sk.sentence.clauses()) {
            std::vector<Literal> body;
            bool sat = false;
            for (const auto& l : c.body) {
                if (l.arity != 0) {
                    body.push_back(l);
                } else if (value.at(l.pred) != l.negated) {
                    sat = true;
                    break;
                }
            }
            if (sat) continue;
            if (body.empty()) {
                consistent = false;
                break;
            }
            clauses.emplace_back(c.quants, std::move(body));
        }
        if (!consistent) continue;

        Sentence branch(std::move(clauses), cellular);
        CellGraph g = build_cell_graph(branch, cellular, sk.weights, cg.constraints);
        if (merge_twins) g = simplify_cell_graph(g);
        if (g.size() == 0) continue;
        cg.branches.push_back({std::move(factor), std::move(g)});
    }
    return cg;
}

}  // namespace combspec
