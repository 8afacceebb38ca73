// Acceptance criteria 1-10. Usage: combspec_acceptance <n>|all
// Prints one "criterion N: PASS|FAIL (detail)" line per criterion; the exit
// status is nonzero if any selected criterion fails.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cli.hpp"
#include "combspec/generator.hpp"
#include "combspec/oracle.hpp"
#include "combspec/seqdb.hpp"
#include "combspec/wfomc.hpp"
#include "json.hpp"
#include "support.hpp"

using namespace combspec;
using namespace combspec::testing;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt_secs(double s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2fs", s);
    return buf;
}

int workers() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

std::vector<Spectrum> parallel_spectra(const std::vector<Sentence>& ss, int length) {
    std::vector<Spectrum> out(ss.size());
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (int t = 0; t < workers(); ++t)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < ss.size();) out[i] = compute_spectrum(ss[i], length);
        });
    pool.clear();
    return out;
}

std::vector<Sentence> run_generation(const GenLimits& limits, int layers, PruneMode mode, GenStats* stats = nullptr,
                                     std::vector<std::pair<Sentence, Sentence>>* matches = nullptr) {
    std::vector<Sentence> kept;
    GenOptions opts;
    opts.mode = mode;
    opts.workers = workers();
    if (matches) opts.on_cell_graph_match = [&](const Sentence& a, const Sentence& b) { matches->emplace_back(a, b); };
    GenStats st = generate_layers(limits, layers, [&](const GeneratedSentence& g) { kept.push_back(g.sentence); }, opts);
    if (stats) *stats = st;
    return kept;
}

bool within(double value, double target, double tolerance) { return std::abs(value - target) <= tolerance * target; }

// ---------------------------------------------------------------- criteria

Outcome criterion1() {
    const auto t0 = Clock::now();
    const Sentence loopless = parse_sentence("(V x ~E(x,x))");
    const Sentence heads = parse_sentence("(E x Heads(x))");
    const Sentence functions = parse_sentence("(V x E=1 y E(x,y))");
    WeightMap w;
    w["Heads"] = Weight{Polynomial(4L), Polynomial(1L)};
    int failures = 0;
    for (int n = 1; n <= 8; ++n) {
        failures += wfomc(loopless, n) != pow_z(2, static_cast<unsigned long>(n * n - n));
        failures += wfomc(heads, n, w) != pow_z(5, static_cast<unsigned long>(n)) - 1;
    }
    for (int n = 1; n <= 6; ++n) failures += wfomc(functions, n) != pow_z(n, static_cast<unsigned long>(n));
    const bool example = wfomc(functions, 5) == 3125;
    const double secs = seconds_since(t0);
    return {failures == 0 && example && secs < 1.0,
            std::to_string(failures) + " mismatches, n^n at 5 = " + wfomc(functions, 5).get_str() + ", " + fmt_secs(secs)};
}

Outcome criterion2() {
    const auto t0 = Clock::now();
    Rng rng(2024);
    const GenLimits limits = GenLimits::c2();
    std::vector<Sentence> sample;
    std::set<std::string> seen;
    while (sample.size() < 200) {
        Sentence s = random_profile_sentence(rng, limits, 6);
        if (seen.insert(render_sentence(s)).second) sample.push_back(std::move(s));
    }
    std::atomic<int> mismatches{0}, comparisons{0}, counting{0};
    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;
    std::string first_mismatch;
    {
        std::vector<std::jthread> pool;
        for (int t = 0; t < workers(); ++t)
            pool.emplace_back([&] {
                for (std::size_t i; (i = next.fetch_add(1)) < sample.size();) {
                    const Sentence& s = sample[i];
                    int binaries = 0;
                    for (const auto& p : s.signature()) binaries += p.arity == 2;
                    const int max_n = binaries <= 1 ? 4 : 3;
                    const auto engine = evaluate_compiled(compile(s), max_n);
                    bool has_counting = false;
                    for (const auto& c : s.clauses()) has_counting |= c.has_counting();
                    counting += has_counting;
                    for (int n = 1; n <= max_n; ++n) {
                        ++comparisons;
                        if (engine[n - 1] != brute_force_count(s, n)) {
                            ++mismatches;
                            std::lock_guard lock(log_mutex);
                            if (first_mismatch.empty()) first_mismatch = render_sentence(s) + " at n=" + std::to_string(n);
                        }
                    }
                }
            });
    }
    const double secs = seconds_since(t0);
    std::string detail = std::to_string(sample.size()) + " sentences (" + std::to_string(counting.load()) +
                         " with counting), " + std::to_string(comparisons.load()) + " comparisons, " +
                         std::to_string(mismatches.load()) + " mismatches, " + fmt_secs(secs);
    if (!first_mismatch.empty()) detail += ", first: " + first_mismatch;
    return {mismatches == 0 && secs < 600, detail};
}

Outcome criterion3() {
    const auto t0 = Clock::now();
    struct Golden {
        const char* name;
        const char* sentence;
        std::vector<mpz_class> expect;
    };
    const std::vector<Golden> rows{
        {"factorial", "(V x E=1 y B(x,y)) & (V x E=1 y B(y,x))", terms({"1", "2", "6", "24", "120", "720", "5040"})},
        {"involutions", "(V x E=1 y B(x,y)) & (V x E=1 y B(y,x)) & (V x V y B(x,x) | B(x,y) | ~B(y,x))",
         terms({"1", "2", "4", "10", "26", "76", "232"})},
        {"derangements", "(V x B(x,x)) & (V x E=1 y ~B(x,y)) & (V x E=1 y ~B(y,x))",
         terms({"0", "1", "2", "9", "44", "265", "1854"})},
    };
    std::string detail;
    bool ok = true;
    for (const auto& g : rows) {
        const Sentence s = parse_sentence(g.sentence);
        const Spectrum sp = compute_spectrum(s, 7);
        bool oracle_ok = true;
        for (int n = 1; n <= 4; ++n) oracle_ok &= brute_force_count(s, n) == g.expect[n - 1];
        const bool row_ok = sp.terms == g.expect && !sp.truncated && oracle_ok;
        ok &= row_ok;
        detail += std::string(g.name) + "=" + join(sp.terms) + (row_ok ? "" : " (expected " + join(g.expect) + ")") + "; ";
    }
    const double secs = seconds_since(t0);
    return {ok && secs < 60, detail + fmt_secs(secs)};
}

Outcome criterion4() {
    const auto t0 = Clock::now();
    const std::vector<std::pair<const char*, std::vector<mpz_class>>> rows{
        {"(V x ~B(x,x)) & (E x V y ~B(y,x)) & (V x E=1 y B(x,y))", terms({"0", "0", "6", "72", "980", "15360"})},
        {"(V x E y B(x,y)) & (E x V y B(x,y) | B(y,x))",
         terms({"1", "7", "237", "31613", "16224509", "31992952773"})},
        {"(V x E y B(x,y)) & (E x V y B(x,y))", terms({"1", "5", "127", "12209", "4329151", "5723266625"})},
        {"(V x ~B(x,x)) & (V x V y ~B(x,y) | B(y,x)) & (E x V y ~B(x,y) | ~U(y)) & (E x E y B(x,y))",
         terms({"0", "3", "43", "747", "22813", "1352761"})},
    };
    bool ok = true;
    std::string detail;
    for (const auto& [text, expect] : rows) {
        const Spectrum sp = compute_spectrum(parse_sentence(text), 6);
        const bool row_ok = sp.terms == expect;
        ok &= row_ok;
        detail += join(sp.terms) + (row_ok ? "" : " (expected " + join(expect) + ")") + "; ";
    }
    const double secs = seconds_since(t0);
    return {ok && secs < 300, detail + fmt_secs(secs)};
}

GenLimits soundness_limits() {
    GenLimits l = GenLimits::fo2();
    l.max_literals = 3;
    l.max_clauses = 2;
    return l;
}

std::set<std::vector<mpz_class>> prefixes(const std::vector<Spectrum>& v) {
    std::set<std::vector<mpz_class>> out;
    for (const auto& s : v) out.insert(s.terms);
    return out;
}

Outcome criterion5() {
    const auto t0 = Clock::now();
    const GenLimits limits = soundness_limits();
    const int layers = limits.max_literals * limits.max_clauses;
    const auto full_sentences = run_generation(limits, layers, PruneMode::Full);
    const auto full = prefixes(parallel_spectra(full_sentences, 4));
    const auto base_sentences = run_generation(limits, layers, PruneMode::StructuralOnly);
    const auto base = prefixes(parallel_spectra(base_sentences, 4));

    std::vector<std::vector<mpz_class>> missing, extra;
    std::set_difference(base.begin(), base.end(), full.begin(), full.end(), std::back_inserter(missing));
    std::set_difference(full.begin(), full.end(), base.begin(), base.end(), std::back_inserter(extra));

    // Classify what the pruned run lost.
    int zero = 0, products = 0;
    for (const auto& m : missing) {
        if (std::all_of(m.begin(), m.end(), [](const mpz_class& t) { return t == 0; })) {
            ++zero;
            continue;
        }
        for (const auto& a : full) {
            bool ok = true;
            std::vector<mpz_class> b(m.size());
            for (std::size_t i = 0; i < m.size() && ok; ++i) {
                if (a[i] == 0 || !mpz_divisible_p(m[i].get_mpz_t(), a[i].get_mpz_t())) ok = false;
                else b[i] = m[i] / a[i];
            }
            if (ok && full.count(b)) {
                ++products;
                break;
            }
        }
    }
    std::string detail = "pruned run " + std::to_string(full_sentences.size()) + " sentences / " +
                         std::to_string(full.size()) + " prefixes, structural run " +
                         std::to_string(base_sentences.size()) + " sentences / " + std::to_string(base.size()) +
                         " prefixes; missing " + std::to_string(missing.size()) + " (" + std::to_string(products) +
                         " element-wise products of kept prefixes, " + std::to_string(zero) +
                         " all-zero), extra " + std::to_string(extra.size()) + ", " + fmt_secs(seconds_since(t0));
    return {missing.empty() && extra.empty(), detail};
}

Outcome criterion6() {
    const auto t0 = Clock::now();
    std::vector<std::pair<Sentence, Sentence>> matches;
    const GenLimits limits = soundness_limits();
    run_generation(limits, limits.max_literals * limits.max_clauses, PruneMode::Full, nullptr, &matches);
    std::vector<Sentence> flat;
    for (const auto& [a, b] : matches) {
        flat.push_back(a);
        flat.push_back(b);
    }
    const auto spectra = parallel_spectra(flat, 6);
    long violations = 0;
    std::string first;
    for (std::size_t i = 0; i < matches.size(); ++i)
        if (spectra[2 * i].terms != spectra[2 * i + 1].terms) {
            if (!violations) first = render_sentence(matches[i].first) + " vs " + render_sentence(matches[i].second);
            ++violations;
        }
    std::string detail = std::to_string(matches.size()) + " key matches, " + std::to_string(violations) +
                         " violations, " + fmt_secs(seconds_since(t0));
    if (violations) detail += ", first: " + first;
    return {violations == 0 && !matches.empty(), detail};
}

Outcome criterion7() {
    const auto t0 = Clock::now();
    const std::vector<std::pair<const char*, std::vector<Quantifier>>> rules{
        {"VV", {Quantifier::forall(), Quantifier::forall()}}, {"VE", {Quantifier::forall(), Quantifier::exists()}},
        {"E", {Quantifier::exists()}},                        {"EE", {Quantifier::exists(), Quantifier::exists()}},
        {"EV", {Quantifier::exists(), Quantifier::forall()}},
    };
    Rng rng(77);
    SentenceShape shape;
    shape.unary = {"U"};
    shape.binary = {"B"};
    long mismatches = 0, checks = 0;
    std::string detail;
    for (const auto& [name, quants] : rules) {
        int sentences = 0;
        for (; sentences < 40; ++sentences) {
            const int lits = 1 + static_cast<int>(rng() % 3);
            std::vector<Literal> body;
            for (int i = 0; i < lits; ++i) body.push_back(random_literal(rng, shape, static_cast<int>(quants.size())));
            if (quants.size() == 2) body.push_back(Literal::binary("B", Var::X, Var::Y, rng() & 1));
            const Sentence s({Clause(quants, body)});
            const Skolemized k = skolemize(s, {});
            for (const auto& c : k.sentence.clauses()) mismatches += !c.is_universal();
            for (int n = 1; n <= 3; ++n) {
                const mpz_class truth = brute_force_count(s, n);
                mismatches += brute_force_wfomc(k.sentence, n, k.weights) != truth;
                mismatches += wfomc(s, n) != truth;
                checks += 2;
            }
        }
        detail += std::string(name) + ":" + std::to_string(sentences) + " ";
    }
    return {mismatches == 0, detail + "sentences, " + std::to_string(checks) + " checks, " + std::to_string(mismatches) +
                                 " mismatches, " + fmt_secs(seconds_since(t0))};
}

Outcome criterion8() {
    const auto t0 = Clock::now();
    bool ok = true;
    std::string detail;

    GenStats fo2;
    std::vector<GeneratedSentence> kept;
    {
        GenOptions opts;
        opts.workers = workers();
        fo2 = generate_layers(GenLimits::fo2(), 5, [&](const GeneratedSentence& g) { kept.push_back(g); }, opts);
    }
    const std::vector<long> fo2_target{4, 40, 216, 923, 2642};
    detail += "fo2 kept";
    for (std::size_t i = 0; i < fo2_target.size(); ++i) {
        const long got = i < fo2.layers.size() ? fo2.layers[i].cumulative_kept : 0;
        ok &= within(static_cast<double>(got), static_cast<double>(fo2_target[i]), 0.15);
        detail += " " + std::to_string(got) + "/" + std::to_string(fo2_target[i]);
    }

    GenStats c2;
    run_generation(GenLimits::c2(), 3, PruneMode::Full, &c2);
    const std::vector<long> c2_target{7, 91, 405};
    detail += "; c2 kept";
    for (std::size_t i = 0; i < c2_target.size(); ++i) {
        const long got = i < c2.layers.size() ? c2.layers[i].cumulative_kept : 0;
        ok &= within(static_cast<double>(got), static_cast<double>(c2_target[i]), 0.15);
        detail += " " + std::to_string(got) + "/" + std::to_string(c2_target[i]);
    }

    std::vector<Sentence> sentences;
    for (const auto& g : kept) sentences.push_back(g.sentence);
    const auto spectra = parallel_spectra(sentences, 10);
    std::vector<std::size_t> order(kept.size());
    std::vector<std::string> texts(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) {
        order[i] = i;
        texts[i] = render_sentence(kept[i].sentence);
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::tie(kept[a].layer, texts[a]) < std::tie(kept[b].layer, texts[b]);
    });
    SeqDb db;
    for (std::size_t i : order) db.insert(kept[i].sentence, spectra[i], kept[i].layer, "fo2-paper");
    const DbStats st = db.stats();
    const std::vector<long> unique_target{4, 37, 171, 590, 1390};
    detail += "; unique spectra";
    for (std::size_t i = 0; i < unique_target.size(); ++i) {
        long got = 0;
        for (const auto& [l, c] : st.cumulative_unique_by_layer)
            if (l <= static_cast<int>(i) + 1) got = c;
        ok &= within(static_cast<double>(got), static_cast<double>(unique_target[i]), 0.10);
        detail += " " + std::to_string(got) + "/" + std::to_string(unique_target[i]);
    }
    const double secs = seconds_since(t0);
    detail += "; " + fmt_secs(secs);
    return {ok && secs < 7200, detail};
}

Outcome criterion9() {
    const std::vector<std::pair<const char*, const char*>> rows{
        {"(V x E=1 y B(x,y)) & (V x E=1 y B(y,x)) & (V x V y B(x,x) | B(x,y) | ~B(y,x))", "A000085"},
        {"(V x E=1 y B(x,y)) & (V x E=1 y B(y,x))", "A000142"},
        {"(V x B(x,x)) & (V x E=1 y ~B(x,y)) & (V x E=1 y ~B(y,x))", "A000166"},
        {"(V x V y B(x,y) | ~B(y,x)) & (E x B(x,x)) & (V x E=1 y ~B(x,y))", "A001189"},
        {"(V x V y U(x) | B(x,y)) & (V x V y ~U(x) | B(y,x))", "A047863"},
        {"(V x B(x,x)) & (V x E y ~B(x,y)) & (V x E y ~B(y,x))", "A086193"},
        {"(V x V y U(x) | ~U(y) | B(x,y)) & (V x E=1 y ~B(x,y))", "A290840"},
    };
    const auto dir = std::filesystem::temp_directory_path() / "combspec-acceptance";
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "criterion9.jsonl").string();
    std::filesystem::remove(path);
    std::set<std::string> expect;
    {
        SeqDb db = SeqDb::open(path);
        for (const auto& [text, id] : rows) {
            const Sentence s = parse_sentence(text);
            db.insert(s, compute_spectrum(s, 9), 0, "known");
            expect.insert(id);
        }
    }
    const std::string stripped = std::string(COMBSPEC_FIXTURE_DIR) + "/known_sequences.stripped";
    const char* argv[] = {"combspec", "oeis", "--db", path.c_str(), "--stripped", stripped.c_str(), "--json"};
    std::ostringstream out, err;
    const int code = cli::run(7, argv, out, err);
    std::set<std::string> reported;
    std::istringstream in(out.str());
    for (std::string line; std::getline(in, line);) {
        const auto j = nlohmann::json::parse(line);
        if (j["type"] == "oeis_hit")
            for (const auto& id : j["oeis"]) reported.insert(id.get<std::string>());
    }
    std::string ids;
    for (const auto& id : reported) ids += id + " ";
    return {code == 0 && reported == expect, "exit " + std::to_string(code) + ", reported " + ids};
}

Outcome criterion10() {
    const auto t0 = Clock::now();
    std::vector<Sentence> sample;
    std::set<std::string> seen;
    GenOptions opts;
    opts.workers = workers();
    generate_layers(GenLimits::fo2(), 4, [&](const GeneratedSentence& g) {
        if (g.sentence.clauses().size() == 2 && seen.insert(render_sentence(g.sentence)).second) sample.push_back(g.sentence);
    }, opts);
    Rng rng(10);
    for (int added = 0; added < 200;) {
        Sentence s = random_profile_sentence(rng, GenLimits::fo2(), 10);
        if (s.clauses().size() != 2 || !seen.insert(render_sentence(s)).second) continue;
        sample.push_back(std::move(s));
        ++added;
    }
    double worst = 0;
    std::string worst_text;
    long truncated = 0;
    for (const auto& s : sample) {
        const auto t = Clock::now();
        const Spectrum sp = compute_spectrum(s, 20, std::chrono::seconds(10));
        const double secs = seconds_since(t);
        truncated += sp.truncated || sp.size() != 20;
        if (secs > worst) {
            worst = secs;
            worst_text = render_sentence(s);
        }
    }
    return {truncated == 0 && worst < 10.0, std::to_string(sample.size()) + " two-clause sentences, worst " +
                                               fmt_secs(worst) + " for " + worst_text + ", " +
                                               std::to_string(truncated) + " over budget, total " +
                                               fmt_secs(seconds_since(t0))};
}

}  // namespace

int main(int argc, char** argv) {
    using Fn = Outcome (*)();
    const Fn criteria[] = {criterion1, criterion2, criterion3, criterion4, criterion5,
                           criterion6, criterion7, criterion8, criterion9, criterion10};
    std::vector<int> selected;
    const std::string arg = argc > 1 ? argv[1] : "all";
    if (arg == "all") {
        for (int i = 1; i <= 10; ++i) selected.push_back(i);
    } else {
        const int n = std::atoi(arg.c_str());
        if (n < 1 || n > 10) {
            std::cerr << "usage: combspec_acceptance <1-10>|all\n";
            return 2;
        }
        selected.push_back(n);
    }
    bool all_pass = true;
    for (int n : selected) {
        Outcome o;
        try {
            o = criteria[n - 1]();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        all_pass &= o.pass;
        std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << " (" << o.detail << ")" << std::endl;
    }
    return all_pass ? 0 : 1;
}
