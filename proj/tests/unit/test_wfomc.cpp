#include <numeric>

#include "doctest.h"

#include "combspec/oracle.hpp"
#include "combspec/wfomc.hpp"
#include "support.hpp"

using namespace combspec;
using namespace combspec::testing;

namespace {

// Cell decomposition sum written out over all compositions of n.
mpz_class naive_cell_sum(const std::vector<mpz_class>& w, const std::vector<std::vector<mpz_class>>& r, int n) {
    const std::size_t p = w.size();
    mpz_class total = 0;
    std::vector<int> k(p, 0);
    auto binom2 = [](long m) { return static_cast<unsigned long>(m * (m - 1) / 2); };
    std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
        if (i + 1 == p) {
            k[i] = left;
            mpz_class term;
            mpz_fac_ui(term.get_mpz_t(), static_cast<unsigned long>(n));
            for (std::size_t a = 0; a < p; ++a) {
                mpz_class f;
                mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(k[a]));
                term /= f;
            }
            mpz_class pw;
            for (std::size_t a = 0; a < p; ++a) {
                mpz_pow_ui(pw.get_mpz_t(), w[a].get_mpz_t(), static_cast<unsigned long>(k[a]));
                term *= pw;
                mpz_pow_ui(pw.get_mpz_t(), r[a][a].get_mpz_t(), binom2(k[a]));
                term *= pw;
                for (std::size_t b = a + 1; b < p; ++b) {
                    mpz_pow_ui(pw.get_mpz_t(), r[a][b].get_mpz_t(), static_cast<unsigned long>(k[a] * k[b]));
                    term *= pw;
                }
            }
            total += term;
            return;
        }
        for (int v = 0; v <= left; ++v) {
            k[i] = v;
            rec(i + 1, left - v);
        }
    };
    if (p > 0) rec(0, n);
    return total;
}

CellGraph constant_graph(const std::vector<mpz_class>& w, const std::vector<std::vector<mpz_class>>& r) {
    CellGraph g;
    g.cells.resize(w.size());
    for (const auto& x : w) g.w.emplace_back(x);
    g.r.assign(w.size(), std::vector<Polynomial>(w.size()));
    for (std::size_t i = 0; i < w.size(); ++i)
        for (std::size_t j = 0; j < w.size(); ++j) g.r[i][j] = r[i][j];
    return g;
}

WeightMap heads_weight() {
    WeightMap w;
    w["Heads"] = Weight{Polynomial(4L), Polynomial(1L)};
    return w;
}

}  // namespace

TEST_SUITE("wfomc") {
    TEST_CASE("skolemizing a forall-exists clause") {
        const Skolemized k = skolemize(parse_sentence("(V x E y E(x,y))"), {});
        REQUIRE(k.sentence.clauses().size() == 1);
        const Clause& c = k.sentence.clauses()[0];
        CHECK(c.is_universal());
        CHECK(c.num_vars() == 2);
        REQUIRE(c.body.size() == 2);
        const Predicate* sk = nullptr;
        for (const auto& p : k.signature)
            if (p.kind == PredicateKind::Skolem) sk = &p;
        REQUIRE(sk != nullptr);
        CHECK(sk->arity == 1);
        CHECK(std::count(c.body.begin(), c.body.end(), Literal::binary("E", Var::X, Var::Y, true)) == 1);
        CHECK(std::count(c.body.begin(), c.body.end(), Literal::unary(sk->name, Var::X)) == 1);
        const Weight w = weight_of(k.weights, sk->name);
        CHECK(w.pos == Polynomial(1L));
        CHECK(w.neg == Polynomial(-1L));
    }

    TEST_CASE("universal sentences are unchanged") {
        const Sentence s = parse_sentence("(V x V y R(x,y) | ~R(y,x))");
        CHECK(skolemize(s, {}).sentence == s);
    }

    TEST_CASE("skolemized count equals rows without zeros") {
        const Skolemized k = skolemize(parse_sentence("(V x E y E(x,y))"), {});
        for (int n = 1; n <= 4; ++n) {
            const mpz_class expect = pow_z(pow_z(2, n).get_si() - 1, n);
            CHECK(brute_force_wfomc(k.sentence, n, k.weights) == expect);
            CHECK(wfomc(parse_sentence("(V x E y E(x,y))"), n) == expect);
        }
    }

    TEST_CASE("skolemization preserves the weighted count for every prefix") {
        Rng rng(31);
        SentenceShape shape;
        shape.max_clauses = 1;
        for (int i = 0; i < 150; ++i) {
            const Sentence s = random_sentence(rng, shape);
            const Skolemized k = skolemize(s, {});
            for (int n = 1; n <= 3; ++n) {
                INFO(render_sentence(s), " n=", n);
                REQUIRE(brute_force_wfomc(k.sentence, n, k.weights) == brute_force_count(s, n));
            }
        }
    }

    TEST_CASE("counting reduction") {
        const Reduction a = reduce_counting_quantifiers(parse_sentence("(V x E=1 y E(x,y))"));
        CHECK(a.sentence == parse_sentence("(V x E y E(x,y))"));
        REQUIRE(a.constraints.size() == 1);
        CHECK(a.constraints[0].predicate.name == "E");
        for (long n = 1; n <= 5; ++n) CHECK(a.constraints[0].positive_target(n) == n);

        const Reduction b = reduce_counting_quantifiers(parse_sentence("(V x E=1 y ~B(x,y))"));
        CHECK(b.sentence == parse_sentence("(V x E y ~B(x,y))"));
        REQUIRE(b.constraints.size() == 1);
        for (long n = 1; n <= 5; ++n) CHECK(b.constraints[0].positive_target(n) == n * n - n);

        const Reduction c = reduce_counting_quantifiers(parse_sentence("(E=1 x U(x))"));
        CHECK(c.sentence.empty());
        REQUIRE(c.constraints.size() == 1);
        for (long n = 1; n <= 5; ++n) CHECK(c.constraints[0].positive_target(n) == 1);
        CHECK(c.signature == std::vector<Predicate>{{"U", 1}});
    }

    TEST_CASE("unsupported counting patterns") {
        CHECK_THROWS_AS(reduce_counting_quantifiers(parse_sentence("(V x E=2 y E(x,y))")), FragmentError);
        CHECK_THROWS_AS(reduce_counting_quantifiers(parse_sentence("(V x E=1 y E(x,y) | U(y))")), FragmentError);
        CHECK_THROWS_AS(reduce_counting_quantifiers(parse_sentence("(E x E=1 y E(x,y))")), FragmentError);
        CHECK_THROWS_AS(wfomc(parse_sentence("(V x E=2 y E(x,y))"), 2), FragmentError);
    }

    TEST_CASE("counting reduction matches the oracle") {
        for (const char* text : {"(V x E=1 y E(x,y))", "(V x E=1 y ~B(x,y))", "(E=1 x U(x))", "(E=1 x ~U(x))",
                                 "(V x E=1 y U(y))", "(V x E=1 y ~B(y,y)) & (V x V y B(x,y) | U(x))",
                                 "(E=1 x V y B(x,y))"}) {
            const Sentence s = parse_sentence(text);
            for (int n = 1; n <= 4; ++n) {
                INFO(text, " n=", n);
                CHECK(wfomc(s, n) == brute_force_count(s, n));
            }
        }
    }

    TEST_CASE("cell graph of the loopless sentence") {
        const CellGraph g = build_cell_graph(parse_sentence("(V x ~E(x,x))"), {});
        REQUIRE(g.size() == 1);
        CHECK(g.w[0] == Polynomial(1L));
        CHECK(g.r[0][0] == Polynomial(4L));
    }

    TEST_CASE("smokers sentence has four cells before pruning") {
        const Sentence s = parse_sentence("(V x V y ~Smokes(x) | ~Friends(x,y) | Smokes(y))");
        CHECK(build_cell_graph(s, {}, {}, false).size() == 4);
    }

    TEST_CASE("contradictory reflexive conditions give zero") {
        const Sentence s = parse_sentence("(V x E(x,x)) & (V x ~E(x,x))");
        const CellGraph g = build_cell_graph(s, {}, {}, false);
        for (const auto& w : g.w) CHECK(w.is_zero());
        CHECK(build_cell_graph(s, {}).size() == 0);
        for (int n = 1; n <= 4; ++n) CHECK(wfomc(s, n) == 0);
    }

    TEST_CASE("edge weights are symmetric") {
        Rng rng(32);
        SentenceShape shape;
        shape.existential = false;
        shape.unary = {"U", "V"};
        for (int i = 0; i < 200; ++i) {
            const Sentence s = random_sentence(rng, shape);
            const CellGraph g = build_cell_graph(s, {}, {}, false);
            for (std::size_t a = 0; a < g.size(); ++a)
                for (std::size_t b = 0; b < g.size(); ++b) REQUIRE(g.r[a][b] == g.r[b][a]);
        }
    }

    TEST_CASE("cell sum examples") {
        const CellGraph g = build_cell_graph(parse_sentence("(V x ~E(x,x))"), {});
        CHECK(evaluate_cell_sum(g, 3) == Polynomial(64L));
        const CellGraph h = constant_graph({2, 3, 5}, {{1, 2, 3}, {2, 1, 1}, {3, 1, 7}});
        CHECK(evaluate_cell_sum(h, 1) == Polynomial(10L));
    }

    TEST_CASE("cell sum agrees with the naive composition sum") {
        Rng rng(33);
        for (int i = 0; i < 200; ++i) {
            const std::size_t p = 1 + rng() % 4;
            std::vector<mpz_class> w(p);
            std::vector<std::vector<mpz_class>> r(p, std::vector<mpz_class>(p));
            for (std::size_t a = 0; a < p; ++a) {
                w[a] = static_cast<long>(rng() % 6) - 2;
                for (std::size_t b = a; b < p; ++b) r[a][b] = r[b][a] = static_cast<long>(rng() % 6) - 2;
            }
            const CellGraph g = constant_graph(w, r);
            for (int n = 1; n <= 6; ++n) REQUIRE(evaluate_cell_sum(g, n) == Polynomial(naive_cell_sum(w, r, n)));
        }
    }

    TEST_CASE("cell sum is invariant under cell permutation") {
        Rng rng(34);
        SentenceShape shape;
        shape.existential = false;
        shape.unary = {"U", "V"};
        for (int i = 0; i < 100; ++i) {
            const CellGraph g = build_cell_graph(random_sentence(rng, shape), {});
            std::vector<std::size_t> perm(g.size());
            std::iota(perm.begin(), perm.end(), 0);
            std::shuffle(perm.begin(), perm.end(), rng);
            CellGraph h = g;
            for (std::size_t a = 0; a < g.size(); ++a) {
                h.cells[a] = g.cells[perm[a]];
                h.w[a] = g.w[perm[a]];
                for (std::size_t b = 0; b < g.size(); ++b) h.r[a][b] = g.r[perm[a]][perm[b]];
            }
            for (int n = 1; n <= 5; ++n) REQUIRE(evaluate_cell_sum(h, n) == evaluate_cell_sum(g, n));
            CHECK(cell_graph_key(h) == cell_graph_key(g));
        }
    }

    TEST_CASE("coefficient extraction") {
        const Polynomial x = Polynomial::variable(0);
        CardinalityConstraint c{{"U", 1}, false, 0, 2, 0};
        WeightMap w;
        w["U"] = Weight{Polynomial(2L), Polynomial(1L)};
        const Polynomial p = Polynomial(3L) * x * x + Polynomial(5L) * x;
        CHECK(extract_coefficient(p, {c}, 4, w) == 12);
        c.b = 3;
        CHECK(extract_coefficient(p, {c}, 4, w) == 0);
        CHECK(extract_coefficient(Polynomial(7L), {}, 4, {}) == 7);
    }

    TEST_CASE("closed forms") {
        const Sentence loopless = parse_sentence("(V x ~E(x,x))");
        const Sentence heads = parse_sentence("(E x Heads(x))");
        const Sentence functions = parse_sentence("(V x E=1 y E(x,y))");
        CHECK(wfomc(loopless, 4) == 4096);
        CHECK(wfomc(heads, 2, heads_weight()) == 24);
        CHECK(wfomc(heads, 3, heads_weight()) == 124);
        CHECK(wfomc(functions, 5) == 3125);
        for (int n = 1; n <= 8; ++n) {
            CHECK(wfomc(loopless, n) == pow_z(2, static_cast<unsigned long>(n * n - n)));
            CHECK(wfomc(heads, n, heads_weight()) == pow_z(5, n) - 1);
        }
        for (int n = 1; n <= 6; ++n) CHECK(wfomc(functions, n) == pow_z(n, n));
    }

    TEST_CASE("spectrum examples") {
        CHECK(compute_spectrum(parse_sentence("(E x Heads(x))"), 4).terms == terms({"1", "3", "7", "15"}));
        CHECK(compute_spectrum(parse_sentence("(V x E=1 y B(x,y)) & (V x E=1 y B(y,x))"), 7).terms ==
              terms({"1", "2", "6", "24", "120", "720", "5040"}));
        const Spectrum z = compute_spectrum(parse_sentence("(V x U(x)) & (V x ~U(x))"), 3);
        CHECK(z.terms == terms({"0", "0", "0"}));
        CHECK_FALSE(z.truncated);
    }

    TEST_CASE("spectrum stops on request") {
        std::stop_source stop;
        stop.request_stop();
        const Spectrum s = compute_spectrum(parse_sentence("(V x E y B(x,y))"), 10, Deadline(std::chrono::hours(1), stop.get_token()));
        CHECK(s.truncated);
        CHECK(s.size() < 10);
    }

    TEST_CASE("engine agrees with the oracle on random sentences") {
        Rng rng(35);
        SentenceShape shape;
        shape.max_count_k = 1;
        int checked = 0;
        for (int i = 0; checked < 150 && i < 2000; ++i) {
            const Sentence s = random_sentence(rng, shape);
            std::vector<mpz_class> counts;
            try {
                counts = evaluate_compiled(compile(s), 4);
            } catch (const FragmentError&) {
                continue;
            }
            ++checked;
            for (int n = 1; n <= 4; ++n) {
                INFO(render_sentence(s), " n=", n);
                REQUIRE(counts[n - 1] == brute_force_count(s, n));
            }
        }
        CHECK(checked == 150);
    }

    TEST_CASE("weighted engine agrees with the weighted oracle") {
        Rng rng(36);
        SentenceShape shape;
        for (int i = 0; i < 60; ++i) {
            const Sentence s = random_sentence(rng, shape);
            WeightMap w;
            w["U"] = Weight{Polynomial(static_cast<long>(rng() % 4)), Polynomial(static_cast<long>(1 + rng() % 3))};
            w["B"] = Weight{Polynomial(static_cast<long>(1 + rng() % 3)), Polynomial(static_cast<long>(rng() % 3))};
            for (int n = 1; n <= 3; ++n) {
                INFO(render_sentence(s), " n=", n);
                REQUIRE(wfomc(s, n, w) == brute_force_wfomc(s, n, w));
            }
        }
    }

    TEST_CASE("cell graph keys") {
        auto key = [](const char* t) { return cell_graph_key(compile(parse_sentence(t), {}, false)); };
        CHECK(key("(V x E y R(x,y))") == key("(V x E y R(y,x))"));
        CHECK(key("(V x U(x) | V(x))") == key("(V x ~U(x) | V(x))"));
        CHECK(key("(V x ~E(x,x))") != key("(V x V y B(x,y) | U(x))"));
        for (int n = 1; n <= 3; ++n)
            CHECK(brute_force_count(parse_sentence("(V x E y R(x,y))"), n) ==
                  brute_force_count(parse_sentence("(V x E y R(y,x))"), n));

        const CellGraph a = constant_graph({2}, {{3}});
        const CellGraph b = constant_graph({2}, {{3}});
        CHECK(cell_graph_key(a) == cell_graph_key(b));
        CHECK(cell_graph_key(a) != cell_graph_key(constant_graph({2, 1}, {{3, 1}, {1, 1}})));
    }

    TEST_CASE("key ignores the naming of symbolic variables") {
        const Polynomial x0 = Polynomial::variable(0), x1 = Polynomial::variable(1);
        CellGraph a = constant_graph({1, 1}, {{1, 1}, {1, 1}});
        a.w = {x0 + Polynomial(1L), x1};
        a.r[0][1] = a.r[1][0] = x0 * x1;
        a.constraints = {{{"P", 1}, false, 1, 0, 0}, {{"Q", 1}, false, 0, 1, 1}};
        CellGraph b = a;
        b.w = {x1 + Polynomial(1L), x0};
        b.r[0][1] = b.r[1][0] = x1 * x0;
        b.constraints = {{{"P", 1}, false, 1, 0, 1}, {{"Q", 1}, false, 0, 1, 0}};
        CHECK(cell_graph_key(a) == cell_graph_key(b));
        CellGraph c = b;
        c.constraints[0].b = 1;
        CHECK(cell_graph_key(a) != cell_graph_key(c));
    }
}
