#include <algorithm>
#include <set>

#include "combspec/wfomc.hpp"

namespace combspec {

Weight weight_of(const WeightMap& w, const std::string& pred) {
    auto it = w.find(pred);
    return it == w.end() ? Weight{} : it->second;
}

long CardinalityConstraint::positive_target(long n) const {
    if (!negated) return target(n);
    long total = 1;
    for (int i = 0; i < predicate.arity; ++i) total *= n;
    return total - target(n);
}

std::string CardinalityConstraint::to_string() const {
    std::string t;
    if (a != 0) t = (a == 1 ? std::string("n") : std::to_string(a) + "n");
    if (b != 0 || t.empty()) {
        if (!t.empty()) t += b < 0 ? " - " : " + ";
        t += std::to_string(t.empty() ? b : std::labs(b));
    }
    return std::string("|") + (negated ? "~" : "") + predicate.name + "| = " + t;
}

namespace {

class FreshNames {
public:
    explicit FreshNames(const std::vector<Predicate>& signature) {
        for (const auto& p : signature) used_.insert(p.name);
    }
    std::string next(const std::string& stem) {
        for (int i = 1;; ++i) {
            std::string name = stem + std::to_string(i);
            if (used_.insert(name).second) return name;
        }
    }

private:
    std::set<std::string> used_;
};

Literal on_x(Literal l) {
    for (int i = 0; i < l.arity; ++i) l.args[i] = Var::X;
    return l;
}

void add_predicate(std::vector<Predicate>& signature, Predicate p) {
    signature.push_back(std::move(p));
    std::sort(signature.begin(), signature.end(),
              [](const Predicate& a, const Predicate& b) { return a.name < b.name; });
}

}  // namespace

Reduction reduce_counting_quantifiers(const Sentence& s) {
    Reduction out;
    out.signature = s.signature();
    FreshNames fresh(out.signature);
    std::vector<Clause> clauses;

    const auto V = Quantifier::forall();
    const auto E = Quantifier::exists();

    auto auxiliary = [&](const char* stem) {
        Predicate p{fresh.next(stem), 1, PredicateKind::Auxiliary};
        add_predicate(out.signature, p);
        return p;
    };
    auto constrain = [&](const Predicate& p, bool negated, long a, long b) {
        out.constraints.push_back(CardinalityConstraint{p, negated, a, b, -1});
    };
    // Exactly one element satisfies l, where l mentions at most x.
    auto exactly_one = [&](const Literal& l) {
        if (l.arity == 1) {
            constrain(*s.find_predicate(l.pred), l.negated, 0, 1);
            return;
        }
        Predicate d = auxiliary("Aux");
        clauses.emplace_back(std::vector{V}, std::vector{Literal::unary(d.name, Var::X, true), l});
        clauses.emplace_back(std::vector{V}, std::vector{Literal::unary(d.name, Var::X), l.negation()});
        constrain(d, false, 0, 1);
    };

    for (const auto& c : s.clauses()) {
        if (!c.has_counting()) {
            clauses.push_back(c);
            continue;
        }
        for (const auto& q : c.quants)
            if (q.is_counting() && q.count != 1)
                throw FragmentError("counting quantifier E=" + std::to_string(q.count) + " is not supported (k = 1 only)");
        if (c.body.size() != 1)
            throw FragmentError("counting clause must have exactly one literal: " + c.to_string());
        const Literal& l = c.body[0];

        if (c.num_vars() == 1) {
            exactly_one(l);
            continue;
        }
        const Quantifier q0 = c.quants[0], q1 = c.quants[1];
        if (q0.kind == QuantKind::ForAll && q1.is_counting()) {
            bool mx = l.mentions(Var::X), my = l.mentions(Var::Y);
            if (mx && my) {
                clauses.emplace_back(std::vector{V, E}, std::vector{l});
                constrain(*s.find_predicate(l.pred), l.negated, 1, 0);
            } else if (my) {
                Literal lx = on_x(l);
                exactly_one(lx);
            } else {
                // Every x sees either all n witnesses or none, so n = 1 and l holds.
                clauses.emplace_back(std::vector{V}, std::vector{l});
                Predicate t = auxiliary("One");
                clauses.emplace_back(std::vector{V}, std::vector{Literal::unary(t.name, Var::X)});
                constrain(t, false, 0, 1);
            }
        } else if (q0.is_counting() && q1.kind == QuantKind::ForAll) {
            Predicate a = auxiliary("Aux");
            clauses.emplace_back(std::vector{V, V}, std::vector{Literal::unary(a.name, Var::X, true), l});
            clauses.emplace_back(std::vector{V, E}, std::vector{Literal::unary(a.name, Var::X), l.negation()});
            constrain(a, false, 0, 1);
        } else {
            throw FragmentError("unsupported counting prefix " + c.prefix_string());
        }
    }
    out.sentence = Sentence(std::move(clauses), out.signature);
    return out;
}

Skolemized skolemize(const Sentence& s, const WeightMap& w) { return skolemize(s, s.signature(), w); }

Skolemized skolemize(const Sentence& s, const std::vector<Predicate>& signature, const WeightMap& w) {
    Skolemized out;
    out.signature = signature;
    out.weights = w;
    FreshNames fresh(signature);
    std::vector<Clause> clauses;

    const auto V = Quantifier::forall();
    const Weight skolem_weight{Polynomial(1L), Polynomial(-1L)};

    auto fresh_predicate = [&](const char* stem, int arity) {
        Predicate p{fresh.next(stem), arity, PredicateKind::Skolem};
        add_predicate(out.signature, p);
        out.weights[p.name] = skolem_weight;
        return p;
    };

    for (const auto& c : s.clauses()) {
        if (c.has_counting()) throw FragmentError("skolemize: counting quantifier present in " + c.to_string());
        if (c.is_universal()) {
            clauses.push_back(c);
            continue;
        }
        const QuantKind q0 = c.quants[0].kind;
        if (c.num_vars() == 1 || (q0 == QuantKind::Exists && c.quants[1].kind == QuantKind::Exists)) {
            // Z | ~l for every literal l of the body.
            Predicate z = fresh_predicate("Z", 0);
            std::vector<Quantifier> prefix(c.quants.size(), V);
            for (const auto& l : c.body) clauses.emplace_back(prefix, std::vector{Literal::nullary(z.name), l.negation()});
        } else if (q0 == QuantKind::ForAll) {
            Predicate sk = fresh_predicate("Sk", 1);
            for (const auto& l : c.body)
                clauses.emplace_back(std::vector{V, V}, std::vector{Literal::unary(sk.name, Var::X), l.negation()});
        } else {
            // Exists x forall y: ~Z | S(x) and S(x) | body.
            Predicate sk = fresh_predicate("Sk", 1);
            Predicate z = fresh_predicate("Z", 0);
            clauses.emplace_back(std::vector{V},
                                 std::vector{Literal::nullary(z.name, true), Literal::unary(sk.name, Var::X)});
            std::vector<Literal> body = c.body;
            body.push_back(Literal::unary(sk.name, Var::X));
            clauses.emplace_back(std::vector{V, V}, std::move(body));
        }
    }
    out.sentence = Sentence(std::move(clauses), out.signature);
    return out;
}

}  // namespace combspec
