#include "combspec/generator.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <thread>
#include <tuple>
#include <unordered_map>

namespace combspec {

// ------------------------------------------------------------------ limits

GenLimits GenLimits::fo2() { return GenLimits{}; }

GenLimits GenLimits::c2() {
    GenLimits l;
    l.max_count_k = 1;
    return l;
}

std::vector<Quantifier> GenLimits::quantifiers() const {
    std::vector<Quantifier> qs{Quantifier::forall(), Quantifier::exists()};
    for (int k = 1; k <= max_count_k; ++k) qs.push_back(Quantifier::exactly(k));
    return qs;
}

bool GenLimits::allowed_pair(const Quantifier& q1, const Quantifier& q2) const {
    if (!restrict_counting) return true;
    if (q1.is_counting()) return q2.kind == QuantKind::ForAll;
    if (q2.is_counting()) return q1.kind == QuantKind::ForAll;
    return true;
}

std::vector<Predicate> GenLimits::language() const {
    std::vector<Predicate> preds;
    auto add = [&](const char* stem, int count, int arity) {
        for (int i = 1; i <= count; ++i)
            preds.push_back({count == 1 ? std::string(stem) : stem + std::to_string(i), arity, PredicateKind::User});
    };
    add("U", unary_predicates, 1);
    add("B", binary_predicates, 2);
    return preds;
}

RuleSet RuleSet::ablation(int level) {
    RuleSet r;
    r.tautology = r.contradiction = level >= 1;
    r.isomorphism = {level >= 2, level >= 3, level >= 4};
    r.reflexive_atoms = level >= 5;
    r.subsumption = level >= 6;
    r.trivial_constraint = level >= 7;
    r.cell_graph = level >= 8;
    return r;
}

const char* rule_name(PruneRule r) {
    switch (r) {
        case PruneRule::None: return "none";
        case PruneRule::Structural: return "structural";
        case PruneRule::Tautology: return "tautology";
        case PruneRule::Contradiction: return "contradiction";
        case PruneRule::Decomposable: return "decomposable";
        case PruneRule::Isomorphic: return "isomorphic";
        case PruneRule::TrivialConstraint: return "trivial-constraint";
        case PruneRule::ReflexiveAtoms: return "reflexive-atoms";
        case PruneRule::Subsumption: return "subsumption";
        case PruneRule::CellGraphIsomorphism: return "cell-graph-isomorphism";
    }
    return "?";
}

// ------------------------------------------------------------- refinement

namespace {

std::vector<Literal> literals_over(const std::vector<Predicate>& language, int num_vars) {
    std::vector<Var> vars{Var::X};
    if (num_vars == 2) vars.push_back(Var::Y);
    std::vector<Literal> out;
    for (const auto& p : language) {
        for (bool neg : {false, true}) {
            if (p.arity == 1) {
                for (Var a : vars) out.push_back(Literal::unary(p.name, a, neg));
            } else if (p.arity == 2) {
                for (Var a : vars)
                    for (Var b : vars) out.push_back(Literal::binary(p.name, a, b, neg));
            }
        }
    }
    return out;
}

}  // namespace

std::vector<Sentence> refinements(const Sentence& s, const GenLimits& limits) {
    const auto language = limits.language();
    const auto& clauses = s.clauses();
    std::set<std::string> seen;
    std::vector<Sentence> out;
    auto emit = [&](std::vector<Clause> cs) {
        Sentence child(std::move(cs));
        if (seen.insert(render_sentence(child)).second) out.push_back(std::move(child));
    };

    for (std::size_t i = 0; i < clauses.size(); ++i) {
        const Clause& c = clauses[i];
        int cap = limits.max_literals;
        if (c.has_counting() && limits.restrict_counting) cap = std::min(cap, limits.counting_max_literals);
        if (static_cast<int>(c.body.size()) >= cap) continue;
        for (const auto& l : literals_over(language, c.num_vars())) {
            if (std::find(c.body.begin(), c.body.end(), l) != c.body.end()) continue;
            std::vector<Literal> body = c.body;
            body.push_back(l);
            std::vector<Clause> cs = clauses;
            cs[i] = Clause(c.quants, std::move(body));
            emit(std::move(cs));
        }
    }

    if (static_cast<int>(clauses.size()) < limits.max_clauses && limits.max_literals > 0) {
        const auto qs = limits.quantifiers();
        for (const auto& q : qs) {
            for (const auto& p : language) {
                for (bool neg : {false, true}) {
                    Literal l = p.arity == 1 ? Literal::unary(p.name, Var::X, neg) : Literal::binary(p.name, Var::X, Var::X, neg);
                    std::vector<Clause> cs = clauses;
                    cs.emplace_back(std::vector<Quantifier>{q}, std::vector<Literal>{l});
                    emit(std::move(cs));
                }
            }
        }
        for (const auto& q1 : qs) {
            for (const auto& q2 : qs) {
                if (!limits.allowed_pair(q1, q2)) continue;
                for (const auto& p : language) {
                    if (p.arity != 2) continue;
                    for (bool neg : {false, true}) {
                        for (bool flip : {false, true}) {
                            Literal l = flip ? Literal::binary(p.name, Var::Y, Var::X, neg)
                                             : Literal::binary(p.name, Var::X, Var::Y, neg);
                            std::vector<Clause> cs = clauses;
                            cs.emplace_back(std::vector<Quantifier>{q1, q2}, std::vector<Literal>{l});
                            emit(std::move(cs));
                        }
                    }
                }
            }
        }
    }
    return out;
}

// ---------------------------------------------------------- simple checks

bool is_tautological_clause(const Clause& c) {
    if (c.has_counting()) return false;
    for (std::size_t i = 0; i < c.body.size(); ++i)
        for (std::size_t j = i + 1; j < c.body.size(); ++j)
            if (c.body[i].same_atom(c.body[j]) && c.body[i].negated != c.body[j].negated) return true;
    return false;
}

bool is_decomposable(const Sentence& s) {
    const auto& cs = s.clauses();
    if (cs.size() < 2) return false;
    std::vector<std::size_t> parent(cs.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    std::map<std::string, std::size_t> owner;
    for (std::size_t i = 0; i < cs.size(); ++i) {
        for (const auto& l : cs[i].body) {
            auto [it, inserted] = owner.emplace(l.pred, i);
            if (!inserted) parent[find(i)] = find(it->second);
        }
    }
    for (std::size_t i = 1; i < cs.size(); ++i)
        if (find(i) != find(0)) return true;
    return false;
}

bool has_trivial_constraint(const Sentence& s) {
    for (const auto& c : s.clauses()) {
        if (c.body.size() != 1 || !c.is_universal()) continue;
        const Literal& l = c.body[0];
        if (l.arity == 1) return true;
        if (l.arity == 2 && c.num_vars() == 2 && l.args[0] != l.args[1]) return true;
    }
    return false;
}

bool reflexive_only_binary(const Sentence& s, int min_literals) {
    if (s.num_literals() < min_literals) return false;
    std::map<std::string, bool> reflexive_only;
    for (const auto& c : s.clauses())
        for (const auto& l : c.body) {
            if (l.arity != 2) continue;
            auto [it, inserted] = reflexive_only.emplace(l.pred, true);
            if (l.args[0] != l.args[1]) it->second = false;
        }
    return std::any_of(reflexive_only.begin(), reflexive_only.end(), [](const auto& kv) { return kv.second; });
}

bool reflexive_only_binary(const Sentence& s) { return reflexive_only_binary(s, 2); }

namespace {

using Subst = std::array<Var, 2>;

std::vector<Subst> sound_substitutions(const Clause& c) {
    const Subst id{Var::X, Var::Y}, swap{Var::Y, Var::X}, to_x{Var::X, Var::X}, to_y{Var::Y, Var::Y};
    if (c.num_vars() < 2) return {id};
    if (c.is_universal()) return {id, swap, to_x, to_y};
    if (c.symmetric_prefix()) return {id, swap};
    return {id};
}

Literal substitute(Literal l, const Subst& th) {
    for (int i = 0; i < l.arity; ++i) l.args[i] = th[static_cast<int>(l.args[i])];
    return l;
}

}  // namespace

bool has_subsumed_clause(const Sentence& s) {
    const auto& cs = s.clauses();
    for (std::size_t i = 0; i < cs.size(); ++i) {
        if (cs[i].has_counting()) continue;
        for (std::size_t j = 0; j < cs.size(); ++j) {
            if (i == j || cs[i].quants != cs[j].quants || cs[i].body.size() > cs[j].body.size()) continue;
            for (const auto& th : sound_substitutions(cs[i])) {
                bool subset = std::all_of(cs[i].body.begin(), cs[i].body.end(), [&](const Literal& l) {
                    Literal m = substitute(l, th);
                    return std::find(cs[j].body.begin(), cs[j].body.end(), m) != cs[j].body.end();
                });
                if (subset) return true;
            }
        }
    }
    return false;
}

// ----------------------------------------------------------------- refute

namespace {

// Ground instantiation over Skolem terms followed by a budgeted DPLL search.
class Refuter {
public:
    explicit Refuter(long budget) : budget_(budget) {}

    bool run(const Sentence& s) {
        struct Template {
            const Clause* clause;
            // Per variable: -1 universal, otherwise a Skolem symbol; function
            // symbols take the x term as argument.
            int sym[2] = {-1, -1};
            bool function[2] = {false, false};
        };
        std::vector<Template> templates;
        int symbols = 0;
        bool have_constant = false;
        std::vector<int> functions;
        std::vector<int> constants;
        for (const auto& c : s.clauses()) {
            Template t{&c};
            const bool ex0 = c.quants[0].kind != QuantKind::ForAll;
            if (ex0) {
                t.sym[0] = symbols++;
                constants.push_back(t.sym[0]);
                have_constant = true;
            }
            if (c.num_vars() == 2 && c.quants[1].kind != QuantKind::ForAll) {
                t.sym[1] = symbols++;
                if (ex0) {
                    constants.push_back(t.sym[1]);
                } else {
                    t.function[1] = true;
                    functions.push_back(t.sym[1]);
                }
            }
            templates.push_back(t);
        }
        if (!have_constant) constants.push_back(symbols++);

        std::vector<int> universe;
        for (int c : constants) universe.push_back(term(c, -1));
        for (int depth = 0; depth < 2 && universe.size() < kMaxTerms; ++depth) {
            std::vector<int> next = universe;
            for (int f : functions)
                for (int t : universe)
                    if (next.size() < kMaxTerms) next.push_back(term(f, t));
            std::sort(next.begin(), next.end());
            next.erase(std::unique(next.begin(), next.end()), next.end());
            universe = std::move(next);
        }

        std::set<std::vector<int>> ground;
        for (const auto& t : templates) {
            const Clause& c = *t.clause;
            auto xs = t.sym[0] < 0 ? universe : std::vector<int>{term(t.sym[0], -1)};
            for (int tx : xs) {
                std::vector<int> ys;
                if (c.num_vars() == 2) {
                    if (t.sym[1] < 0) ys = universe;
                    else ys = {term(t.sym[1], t.function[1] ? tx : -1)};
                } else {
                    ys = {-1};
                }
                for (int ty : ys) {
                    std::vector<int> g;
                    bool taut = false;
                    for (const auto& l : c.body) {
                        int a0 = l.arity >= 1 ? (l.args[0] == Var::X ? tx : ty) : -1;
                        int a1 = l.arity >= 2 ? (l.args[1] == Var::X ? tx : ty) : -1;
                        int v = atom(l.pred, a0, a1) + 1;
                        int lit = l.negated ? -v : v;
                        if (std::find(g.begin(), g.end(), -lit) != g.end()) taut = true;
                        if (std::find(g.begin(), g.end(), lit) == g.end()) g.push_back(lit);
                    }
                    if (taut) continue;
                    std::sort(g.begin(), g.end());
                    ground.insert(std::move(g));
                    if (ground.size() > kMaxClauses) break;
                }
            }
        }
        clauses_.assign(ground.begin(), ground.end());
        std::vector<signed char> assignment(atoms_.size() + 1, 0);
        try {
            return !satisfiable(assignment);
        } catch (const OutOfBudget&) {
            return false;
        }
    }

private:
    struct OutOfBudget {};
    static constexpr std::size_t kMaxTerms = 24;
    static constexpr std::size_t kMaxClauses = 4000;

    int term(int sym, int arg) {
        auto [it, inserted] = terms_.emplace(std::make_pair(sym, arg), static_cast<int>(terms_.size()));
        return it->second;
    }
    int atom(const std::string& pred, int a0, int a1) {
        auto [it, inserted] = atoms_.emplace(std::make_tuple(pred, a0, a1), static_cast<int>(atoms_.size()));
        return it->second;
    }

    void spend() {
        if (--budget_ < 0) throw OutOfBudget{};
    }

    bool satisfiable(std::vector<signed char>& a) {
        // Unit propagation to fixpoint.
        std::vector<int> trail;
        auto value = [&](int lit) {
            signed char v = a[static_cast<std::size_t>(std::abs(lit))];
            return lit > 0 ? v : static_cast<signed char>(-v);
        };
        bool changed = true;
        int branch = 0;
        while (changed) {
            changed = false;
            branch = 0;
            for (const auto& c : clauses_) {
                spend();
                int unassigned = 0, last = 0;
                bool sat = false;
                for (int lit : c) {
                    signed char v = value(lit);
                    if (v > 0) {
                        sat = true;
                        break;
                    }
                    if (v == 0) {
                        ++unassigned;
                        last = lit;
                    }
                }
                if (sat) continue;
                if (unassigned == 0) {
                    for (int v : trail) a[static_cast<std::size_t>(v)] = 0;
                    return false;
                }
                if (unassigned == 1) {
                    a[static_cast<std::size_t>(std::abs(last))] = last > 0 ? 1 : -1;
                    trail.push_back(std::abs(last));
                    changed = true;
                } else if (branch == 0) {
                    branch = last;
                }
            }
        }
        if (branch == 0) return true;
        for (int lit : {branch, -branch}) {
            a[static_cast<std::size_t>(std::abs(lit))] = lit > 0 ? 1 : -1;
            if (satisfiable(a)) return true;
            a[static_cast<std::size_t>(std::abs(lit))] = 0;
        }
        for (int v : trail) a[static_cast<std::size_t>(v)] = 0;
        return false;
    }

    long budget_;
    std::map<std::pair<int, int>, int> terms_;
    std::map<std::tuple<std::string, int, int>, int> atoms_;
    std::vector<std::vector<int>> clauses_;
};

}  // namespace

bool refute(const Sentence& s, long budget) {
    if (s.empty()) return false;
    return Refuter(budget).run(s);
}

// --------------------------------------------------------------- classify

namespace {

// Verdict from the rules that depend on the sentence alone.
PruneRule intrinsic_delete(const Sentence& s, const RuleSet& rules) {
    if (rules.tautology)
        for (const auto& c : s.clauses())
            if (is_tautological_clause(c)) return PruneRule::Tautology;
    if (rules.contradiction && refute(s)) return PruneRule::Contradiction;
    if (rules.decomposable && is_decomposable(s)) return PruneRule::Decomposable;
    return PruneRule::None;
}

PruneRule intrinsic_hidden(const Sentence& s, const RuleSet& rules) {
    if (rules.trivial_constraint && has_trivial_constraint(s)) return PruneRule::TrivialConstraint;
    if (rules.reflexive_atoms && reflexive_only_binary(s, 1)) return PruneRule::ReflexiveAtoms;
    if (rules.subsumption && has_subsumed_clause(s)) return PruneRule::Subsumption;
    return PruneRule::None;
}

CanonicalKey sentence_cell_graph_key(const Sentence& s) { return cell_graph_key(compile(s, {}, false)); }

}  // namespace

PruneVerdict classify(const Sentence& s, const KeySet& seen_sentences, const KeySet& seen_cell_graphs,
                      const RuleSet& rules) {
    if (PruneRule r = intrinsic_delete(s, rules); r != PruneRule::None) return {Verdict::Delete, r};
    if (seen_sentences.count(canonical_key(s, rules.isomorphism))) return {Verdict::Delete, PruneRule::Isomorphic};
    if (PruneRule r = intrinsic_hidden(s, rules); r != PruneRule::None) return {Verdict::KeepExpanding, r};
    if (rules.cell_graph && seen_cell_graphs.count(sentence_cell_graph_key(s)))
        return {Verdict::KeepExpanding, PruneRule::CellGraphIsomorphism};
    return {Verdict::KeepNew, PruneRule::None};
}

// ---------------------------------------------------------- generation

namespace {

template <typename F>
void parallel_for(std::size_t count, int workers, F&& body) {
    const std::size_t w = std::max(1, workers);
    if (w == 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < std::min(w, count); ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) body(i);
        });
}

struct Candidate {
    Sentence sentence;
    std::string text;
    CanonicalKey key;
    PruneRule rule = PruneRule::None;
    CanonicalKey cg_key;
};

}  // namespace

GenStats generate_layers(const GenLimits& limits, int layers, const Sink& sink, const GenOptions& options) {
    GenStats stats;
    const int bound = std::min(layers, limits.max_literals * limits.max_clauses);
    std::vector<Sentence> frontier{Sentence{}};
    KeySet seen_sentences;
    std::unordered_map<CanonicalKey, Sentence> seen_cell_graphs;
    std::unordered_set<std::string> seen_texts;
    long cumulative = 0;

    for (int layer = 1; layer <= bound; ++layer) {
        if (options.deadline.expired()) {
            stats.exhausted = true;
            break;
        }
        LayerStats ls;
        ls.layer = layer;
        ls.by_rule.assign(static_cast<std::size_t>(PruneRule::CellGraphIsomorphism) + 1, 0);

        std::vector<std::vector<Sentence>> children(frontier.size());
        parallel_for(frontier.size(), options.workers, [&](std::size_t i) { children[i] = refinements(frontier[i], limits); });

        std::map<std::string, Sentence> unique;
        for (auto& group : children)
            for (auto& c : group) {
                ++ls.generated;
                std::string text = render_sentence(c);
                unique.emplace(std::move(text), std::move(c));
            }
        const long repeats = ls.generated - static_cast<long>(unique.size());
        ls.by_rule[static_cast<std::size_t>(PruneRule::Structural)] += repeats;
        ls.deleted += repeats;
        children.clear();

        std::vector<Candidate> cands;
        cands.reserve(unique.size());
        for (auto& [text, s] : unique) cands.push_back({std::move(s), text, {}, PruneRule::None, {}});
        unique.clear();

        std::vector<Sentence> next;
        auto count_rule = [&](PruneRule r) { ++ls.by_rule[static_cast<std::size_t>(r)]; };

        if (options.mode == PruneMode::StructuralOnly) {
            for (auto& c : cands) {
                if (!seen_texts.insert(c.text).second) {
                    count_rule(PruneRule::Structural);
                    ++ls.deleted;
                    continue;
                }
                ++ls.kept_new;
                sink({c.sentence, layer, {}});
                next.push_back(std::move(c.sentence));
            }
        } else {
            // Phase 1: rules that depend on the sentence alone.
            std::atomic<bool> timed_out{false};
            parallel_for(cands.size(), options.workers, [&](std::size_t i) {
                if (timed_out || options.deadline.expired()) {
                    timed_out = true;
                    return;
                }
                Candidate& c = cands[i];
                c.rule = intrinsic_delete(c.sentence, options.rules);
                if (c.rule != PruneRule::None) return;
                c.key = canonical_key(c.sentence, options.rules.isomorphism);
                c.rule = intrinsic_hidden(c.sentence, options.rules);
            });
            if (timed_out) {
                stats.exhausted = true;
                break;
            }

            // Merge against the seen sentences in sorted order.
            std::vector<std::size_t> survivors;
            for (std::size_t i = 0; i < cands.size(); ++i) {
                Candidate& c = cands[i];
                const bool deleted_now = c.rule == PruneRule::Tautology || c.rule == PruneRule::Contradiction ||
                                         c.rule == PruneRule::Decomposable;
                if (deleted_now) {
                    count_rule(c.rule);
                    ++ls.deleted;
                    continue;
                }
                if (!seen_sentences.insert(c.key).second) {
                    c.rule = PruneRule::Isomorphic;
                    count_rule(c.rule);
                    ++ls.deleted;
                    continue;
                }
                survivors.push_back(i);
            }

            // Phase 2: cell graph keys for sentences no cheaper rule hides.
            parallel_for(survivors.size(), options.workers, [&](std::size_t k) {
                Candidate& c = cands[survivors[k]];
                if (c.rule != PruneRule::None || !options.rules.cell_graph || timed_out) return;
                if (options.deadline.expired()) {
                    timed_out = true;
                    return;
                }
                c.cg_key = sentence_cell_graph_key(c.sentence);
            });
            if (timed_out) {
                stats.exhausted = true;
                break;
            }

            for (std::size_t i : survivors) {
                Candidate& c = cands[i];
                if (c.rule == PruneRule::None && options.rules.cell_graph) {
                    auto [it, inserted] = seen_cell_graphs.emplace(c.cg_key, c.sentence);
                    if (!inserted) {
                        c.rule = PruneRule::CellGraphIsomorphism;
                        if (options.on_cell_graph_match) options.on_cell_graph_match(it->second, c.sentence);
                    }
                }
                if (c.rule == PruneRule::None) {
                    ++ls.kept_new;
                    sink({c.sentence, layer, c.cg_key});
                } else {
                    count_rule(c.rule);
                    ++ls.keep_expanding;
                }
                next.push_back(std::move(c.sentence));
            }
        }

        cumulative += ls.kept_new;
        ls.cumulative_kept = cumulative;
        stats.layers.push_back(std::move(ls));
        frontier = std::move(next);
        if (frontier.empty()) break;
    }
    return stats;
}

}  // namespace combspec
