#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <stop_token>
#include <thread>

#include "CLI11.hpp"
#include "combspec/oeis.hpp"
#include "combspec/seqdb.hpp"
#include "json.hpp"

namespace combspec::cli {

using json = nlohmann::ordered_json;

namespace {

json terms_json(const Spectrum& s) {
    json a = json::array();
    for (const auto& t : s.terms) a.push_back(t.get_str());
    return a;
}

json envelope(const char* type) {
    json j;
    j["v"] = kJsonVersion;
    j["type"] = type;
    return j;
}

int report(const Output& o, int code, const std::string& msg) {
    if (o.json) {
        json j = envelope("error");
        j["code"] = code;
        j["message"] = msg;
        o.out << j.dump() << '\n';
    }
    o.err << "error: " << msg << '\n';
    return code;
}

// Runs f and maps library exceptions onto exit codes.
template <class F>
int guarded(const Output& o, F&& f) {
    try {
        return f();
    } catch (const ParseError& e) {
        return report(o, kParse, std::string("parse: ") + e.what());
    } catch (const SentenceError& e) {
        return report(o, kParse, std::string("sentence: ") + e.what());
    } catch (const FragmentError& e) {
        return report(o, kFragment, std::string("unsupported fragment: ") + e.what());
    } catch (const BudgetExceeded& e) {
        return report(o, kBudget, e.what());
    } catch (const DbError& e) {
        return report(o, kIo, std::string("database: ") + e.what());
    } catch (const OeisError& e) {
        return report(o, kIo, std::string("oeis: ") + e.what());
    } catch (const std::ios_base::failure& e) {
        return report(o, kIo, e.what());
    } catch (const std::invalid_argument& e) {
        return report(o, kParse, e.what());
    }
}

// SIGINT turns into a stop request for in-flight work.
std::atomic<bool> g_interrupted{false};

extern "C" void on_sigint(int) { g_interrupted.store(true); }

class InterruptWatch {
public:
    InterruptWatch() {
        g_interrupted.store(false);
        previous_ = std::signal(SIGINT, on_sigint);
        watcher_ = std::jthread([this](std::stop_token self) {
            while (!self.stop_requested()) {
                if (g_interrupted.load()) {
                    source_.request_stop();
                    return;
                }
                std::this_thread::sleep_for(std::chrono::milliseconds(50));
            }
        });
    }
    ~InterruptWatch() {
        watcher_.request_stop();
        watcher_.join();
        std::signal(SIGINT, previous_);
    }
    InterruptWatch(const InterruptWatch&) = delete;
    InterruptWatch& operator=(const InterruptWatch&) = delete;

    std::stop_token token() const { return source_.get_token(); }
    bool interrupted() const { return source_.stop_requested(); }

private:
    std::stop_source source_;
    void (*previous_)(int) = SIG_DFL;
    std::jthread watcher_;
};

SeqDb open_db(const std::string& path) { return path.empty() ? SeqDb() : SeqDb::open(path); }

}  // namespace

RunProfile builtin_profile(const std::string& name) {
    RunProfile p;
    p.name = name;
    p.workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (name == "fo2-paper") {
        p.limits = GenLimits::fo2();
    } else if (name == "c2-paper") {
        p.limits = GenLimits::c2();
    } else {
        throw std::invalid_argument("unknown profile '" + name + "'");
    }
    return p;
}

std::vector<std::string> builtin_profile_names() { return {"fo2-paper", "c2-paper"}; }

WeightMap parse_weights(const std::vector<std::string>& specs) {
    WeightMap w;
    auto integer = [](const std::string& tok, const std::string& spec) {
        mpz_class v;
        if (tok.empty() || v.set_str(tok, 10) != 0) throw std::invalid_argument("bad weight '" + spec + "'");
        return v;
    };
    for (const auto& spec : specs) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos || eq == 0) throw std::invalid_argument("weight must be P=w[,wbar]: '" + spec + "'");
        const std::string name = spec.substr(0, eq);
        const std::string rest = spec.substr(eq + 1);
        const auto comma = rest.find(',');
        Weight wt;
        wt.pos = integer(rest.substr(0, comma), spec);
        if (comma != std::string::npos) wt.neg = integer(rest.substr(comma + 1), spec);
        w[name] = wt;
    }
    return w;
}

int cmd_wfomc(const Output& o, const std::string& sentence, int n, const WeightMap& w, std::chrono::seconds budget) {
    return guarded(o, [&] {
        if (n < 1) throw std::invalid_argument("--n must be at least 1");
        const Sentence s = parse_sentence(sentence);
        InterruptWatch watch;
        const auto counts = evaluate_compiled(compile(s, w), n, Deadline(budget, watch.token()));
        const mpz_class& count = counts.at(static_cast<std::size_t>(n - 1));
        if (o.json) {
            json j = envelope("wfomc");
            j["sentence"] = render_sentence(s);
            j["n"] = n;
            j["count"] = count.get_str();
            o.out << j.dump() << '\n';
        } else {
            o.out << count.get_str() << '\n';
        }
        return static_cast<int>(kOk);
    });
}

int cmd_spectrum(const Output& o, const std::string& sentence, int length, std::chrono::seconds budget) {
    return guarded(o, [&] {
        if (length < 1) throw std::invalid_argument("--length must be at least 1");
        const Sentence s = parse_sentence(sentence);
        InterruptWatch watch;
        const Spectrum sp = compute_spectrum(s, length, Deadline(budget, watch.token()));
        if (o.json) {
            json j = envelope("spectrum");
            j["sentence"] = render_sentence(s);
            j["terms"] = terms_json(sp);
            j["truncated"] = sp.truncated;
            o.out << j.dump() << '\n';
        } else {
            o.out << sp.to_string() << (sp.truncated ? "…(truncated)" : "") << '\n';
        }
        return static_cast<int>(sp.truncated ? kBudget : kOk);
    });
}

int cmd_generate(const Output& o, const GenerateOptions& opts) {
    return guarded(o, [&] {
        if (opts.layers < 0) throw std::invalid_argument("--layers must be nonnegative");
        const RunProfile& prof = opts.profile;
        SeqDb db = open_db(opts.db_path);
        InterruptWatch watch;

        std::vector<GeneratedSentence> kept;
        GenOptions gopts;
        gopts.workers = std::max(1, prof.workers);
        gopts.deadline = Deadline(Deadline::Clock::time_point::max(), watch.token());
        const GenStats stats =
            generate_layers(prof.limits, opts.layers, [&](const GeneratedSentence& g) { kept.push_back(g); }, gopts);

        // Spectra in parallel across sentences, inserted in a fixed order.
        std::vector<Spectrum> spectra(kept.size());
        std::atomic<std::size_t> next{0};
        {
            std::vector<std::jthread> pool;
            for (int t = 0; t < gopts.workers; ++t)
                pool.emplace_back([&] {
                    for (std::size_t i; (i = next.fetch_add(1)) < kept.size();) {
                        if (watch.interrupted()) return;
                        spectra[i] = compute_spectrum(kept[i].sentence, prof.length, Deadline(prof.budget, watch.token()));
                    }
                });
        }

        std::vector<std::size_t> order(kept.size());
        std::vector<std::string> texts(kept.size());
        for (std::size_t i = 0; i < kept.size(); ++i) {
            order[i] = i;
            texts[i] = render_sentence(kept[i].sentence);
        }
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return std::tie(kept[a].layer, texts[a]) < std::tie(kept[b].layer, texts[b]);
        });

        std::map<int, long> truncated, skipped;
        for (std::size_t i : order) {
            if (spectra[i].terms.empty()) {
                ++skipped[kept[i].layer];
                continue;
            }
            if (spectra[i].truncated) ++truncated[kept[i].layer];
            db.insert(kept[i].sentence, spectra[i], kept[i].layer, prof.name);
        }
        const DbStats dbs = db.stats();
        auto unique_through = [&](int layer) {
            long v = 0;
            for (const auto& [l, c] : dbs.cumulative_unique_by_layer)
                if (l <= layer) v = c;
            return v;
        };

        if (o.json) {
            for (const auto& ls : stats.layers) {
                json j = envelope("layer");
                j["profile"] = prof.name;
                j["layer"] = ls.layer;
                j["generated"] = ls.generated;
                j["kept_new"] = ls.kept_new;
                j["keep_expanding"] = ls.keep_expanding;
                j["deleted"] = ls.deleted;
                j["cumulative_kept"] = ls.cumulative_kept;
                j["cumulative_unique_spectra"] = unique_through(ls.layer);
                j["truncated_spectra"] = truncated[ls.layer];
                j["skipped_spectra"] = skipped[ls.layer];
                json rules = json::object();
                for (std::size_t r = 0; r < ls.by_rule.size(); ++r)
                    if (ls.by_rule[r]) rules[rule_name(static_cast<PruneRule>(r))] = ls.by_rule[r];
                j["by_rule"] = std::move(rules);
                o.out << j.dump() << '\n';
            }
            json j = envelope("summary");
            j["profile"] = prof.name;
            j["spectrum_length"] = prof.length;
            j["records"] = dbs.records;
            j["unique"] = dbs.unique;
            j["duplicates"] = dbs.duplicates;
            j["product_redundant"] = dbs.product_redundant;
            j["interrupted"] = watch.interrupted() || stats.exhausted;
            o.out << j.dump() << '\n';
        } else {
            o.out << "profile " << prof.name << "  ML=" << prof.limits.max_literals << " MC=" << prof.limits.max_clauses
                  << " UP=" << prof.limits.unary_predicates << " BP=" << prof.limits.binary_predicates
                  << " K=" << prof.limits.max_count_k << "  length=" << prof.length << '\n';
            o.out << std::setw(5) << "layer" << std::setw(11) << "generated" << std::setw(10) << "kept_new"
                  << std::setw(11) << "expanding" << std::setw(10) << "deleted" << std::setw(10) << "cum_kept"
                  << std::setw(12) << "cum_unique" << std::setw(11) << "truncated" << '\n';
            for (const auto& ls : stats.layers)
                o.out << std::setw(5) << ls.layer << std::setw(11) << ls.generated << std::setw(10) << ls.kept_new
                      << std::setw(11) << ls.keep_expanding << std::setw(10) << ls.deleted << std::setw(10)
                      << ls.cumulative_kept << std::setw(12) << unique_through(ls.layer) << std::setw(11)
                      << truncated[ls.layer] << '\n';
            if (watch.interrupted() || stats.exhausted) o.out << "(interrupted)\n";
        }
        if (!opts.db_path.empty()) db.save();
        return static_cast<int>(watch.interrupted() ? kBudget : kOk);
    });
}

int cmd_db_stats(const Output& o, const std::string& db_path) {
    return guarded(o, [&] {
        const DbStats st = open_db(db_path).stats();
        if (o.json) {
            json j = envelope("db_stats");
            j["records"] = st.records;
            j["unique"] = st.unique;
            j["duplicates"] = st.duplicates;
            j["product_redundant"] = st.product_redundant;
            json layers = json::object();
            for (const auto& [l, c] : st.cumulative_unique_by_layer) layers[std::to_string(l)] = c;
            j["cumulative_unique_by_layer"] = std::move(layers);
            j["dedup"] = "prefix agreement over the common length, at least " + std::to_string(st.min_common_length) + " terms";
            o.out << j.dump() << '\n';
        } else {
            o.out << "records            " << st.records << '\n'
                  << "unique spectra     " << st.unique << '\n'
                  << "duplicates         " << st.duplicates << '\n'
                  << "product redundant  " << st.product_redundant << '\n'
                  << "dedup              prefix agreement over the common length, at least " << st.min_common_length
                  << " terms\n";
            for (const auto& [l, c] : st.cumulative_unique_by_layer)
                o.out << "unique through layer " << l << "  " << c << '\n';
        }
        return static_cast<int>(kOk);
    });
}

int cmd_db_export(const Output& o, const std::string& db_path, const std::string& out_path,
                  const std::string& status, int layer, const std::string& profile) {
    return guarded(o, [&] {
        ExportFilter f;
        if (!status.empty()) {
            try {
                f.status = parse_status(status);
            } catch (const DbError& e) {
                throw std::invalid_argument(e.what());
            }
        }
        if (layer >= 0) f.layer = layer;
        if (!profile.empty()) f.profile = profile;
        const SeqDb db = open_db(db_path);
        if (out_path.empty() || out_path == "-") {
            db.write_jsonl(o.out, f);
        } else {
            std::ofstream out(out_path, std::ios::trunc);
            if (!out) throw DbError("cannot write " + out_path);
            db.write_jsonl(out, f);
        }
        return static_cast<int>(kOk);
    });
}

int cmd_db_import(const Output& o, const std::string& db_path, const std::string& in_path) {
    return guarded(o, [&] {
        if (db_path.empty()) throw std::invalid_argument("import needs --db");
        std::ifstream in(in_path);
        if (!in) throw DbError("cannot read " + in_path);
        SeqDb db = SeqDb::open(db_path);
        const std::size_t before = db.size();
        db.import_jsonl(in);
        db.save();
        if (o.json) {
            json j = envelope("db_import");
            j["imported"] = db.size() - before;
            o.out << j.dump() << '\n';
        } else {
            o.out << "imported " << db.size() - before << " records\n";
        }
        return static_cast<int>(kOk);
    });
}

int cmd_oeis(const Output& o, const OeisOptions& opts) {
    return guarded(o, [&] {
        if (opts.stripped_path.empty() && !opts.online)
            throw std::invalid_argument("oeis needs --stripped or --online");
        SeqDb db = open_db(opts.db_path);
        std::optional<OeisIndex> index;
        if (!opts.stripped_path.empty()) {
            index = load_stripped(opts.stripped_path, opts.lenient);
            for (const auto& e : index->errors()) o.err << "warning: " << e << '\n';
        }
        std::optional<OeisClient> client;
        if (opts.online) {
            if (opts.replay_path.empty()) client.emplace(make_http_transport());
            else client.emplace(ReplayTransport::from_file(opts.replay_path));
        }

        struct Hit {
            long id;
            std::string sentence;
            std::vector<std::string> ids;
        };
        std::vector<Hit> hits;
        for (const auto& r : db.export_records()) {
            if (r.spectrum.size() < kMinQueryTerms) continue;
            std::set<std::string> ids;
            if (index)
                for (const auto& e : index->match(r.spectrum)) ids.insert(e.id);
            if (client)
                for (const auto& e : client->online_search(r.spectrum)) ids.insert(e.id);
            std::vector<std::string> v(ids.begin(), ids.end());
            db.set_oeis(r.id, v);
            if (!v.empty()) hits.push_back({r.id, r.sentence, std::move(v)});
        }
        if (!db.path().empty()) db.save();

        if (o.json) {
            for (const auto& h : hits) {
                json j = envelope("oeis_hit");
                j["record"] = h.id;
                j["sentence"] = h.sentence;
                j["oeis"] = h.ids;
                o.out << j.dump() << '\n';
            }
            json j = envelope("oeis_summary");
            j["records_with_hits"] = hits.size();
            j["matching"] = "contiguous subsequence at any offset, at least " + std::to_string(kMinQueryTerms) + " terms";
            o.out << j.dump() << '\n';
        } else {
            std::size_t width = 8;
            for (const auto& h : hits) width = std::max(width, h.sentence.size());
            o.out << std::left << std::setw(static_cast<int>(width) + 2) << "sentence" << "oeis\n";
            for (const auto& h : hits) {
                std::string ids;
                for (const auto& id : h.ids) ids += (ids.empty() ? "" : " ") + id;
                o.out << std::setw(static_cast<int>(width) + 2) << h.sentence << ids << '\n';
            }
            o.out << std::right;
        }
        return static_cast<int>(kOk);
    });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Combinatorial spectra of two-variable first-order sentences"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value file with option defaults");
    app.get_config_formatter_base()->arrayDelimiter(';');

    bool json_out = false;
    int n = 0;
    int length = -1;
    long budget_secs = -1;
    std::string profile_name = "fo2-paper";
    std::optional<int> ml, mc, up, bp, k, workers;
    int layers = 3;
    std::string db_path, stripped_path, replay_path;
    bool online = false, lenient = false;
    std::vector<std::string> weights;

    app.add_flag("--json", json_out, "one JSON object per line");
    app.add_option("--n", n, "domain size");
    app.add_option("--length", length, "spectrum length (default 10)");
    app.add_option("--budget-secs", budget_secs, "time budget per count or spectrum (default 300)");
    app.add_option("--profile", profile_name, "fo2-paper or c2-paper");
    app.add_option("--ml", ml, "max literals per clause");
    app.add_option("--mc", mc, "max clauses");
    app.add_option("--up", up, "unary predicates");
    app.add_option("--bp", bp, "binary predicates");
    app.add_option("--k", k, "largest counting quantifier index (0 disables)");
    app.add_option("--layers", layers, "generation layers");
    app.add_option("--workers", workers, "spectrum workers (default: hardware threads)");
    app.add_option("--db", db_path, "JSON Lines database file");
    app.add_option("--stripped", stripped_path, "OEIS stripped file");
    app.add_flag("--online", online, "query the OEIS search service");
    app.add_option("--replay", replay_path, "serve online queries from recorded responses");
    app.add_flag("--lenient", lenient, "skip malformed stripped lines");
    app.add_option("--w", weights, "weight P=w or P=w,wbar (repeatable)");

    std::string sentence;
    auto* wfomc = app.add_subcommand("wfomc", "count models at one domain size")->fallthrough();
    wfomc->add_option("sentence", sentence)->required();
    auto* spectrum = app.add_subcommand("spectrum", "model counts for n = 1..length")->fallthrough();
    spectrum->add_option("sentence", sentence)->required();
    auto* generate = app.add_subcommand("generate", "layered generation with spectra")->fallthrough();
    auto* db = app.add_subcommand("db", "database operations")->fallthrough()->require_subcommand(1);
    auto* db_stats = db->add_subcommand("stats", "summary counts")->fallthrough();
    std::string export_out, export_status, export_profile;
    int export_layer = -1;
    auto* db_export = db->add_subcommand("export", "write records as JSON Lines")->fallthrough();
    db_export->add_option("--out", export_out, "output file (default stdout)");
    db_export->add_option("--status", export_status, "unique, duplicate or product_redundant");
    db_export->add_option("--layer", export_layer, "generation layer");
    db_export->add_option("--only-profile", export_profile, "profile name");
    std::string import_in;
    auto* db_import = db->add_subcommand("import", "add records from JSON Lines")->fallthrough();
    db_import->add_option("file", import_in)->required();
    auto* oeis = app.add_subcommand("oeis", "annotate records with OEIS matches")->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kParse;
    }

    const Output o{out, err, json_out};
    const auto budget = std::chrono::seconds(budget_secs >= 0 ? budget_secs : 300);
    const int len = length >= 0 ? length : 10;

    if (wfomc->parsed()) {
        WeightMap w;
        try {
            w = parse_weights(weights);
        } catch (const std::invalid_argument& e) {
            return report(o, kParse, e.what());
        }
        if (n == 0) return report(o, kParse, "wfomc needs --n");
        return cmd_wfomc(o, sentence, n, w, budget);
    }
    if (spectrum->parsed()) return cmd_spectrum(o, sentence, len, budget);
    if (generate->parsed()) {
        GenerateOptions g;
        try {
            g.profile = builtin_profile(profile_name);
        } catch (const std::invalid_argument& e) {
            return report(o, kParse, e.what());
        }
        if (ml) g.profile.limits.max_literals = *ml;
        if (mc) g.profile.limits.max_clauses = *mc;
        if (up) g.profile.limits.unary_predicates = *up;
        if (bp) g.profile.limits.binary_predicates = *bp;
        if (k) g.profile.limits.max_count_k = *k;
        if (workers) g.profile.workers = std::max(1, *workers);
        if (length >= 0) g.profile.length = length;
        if (budget_secs >= 0) g.profile.budget = budget;
        g.layers = layers;
        g.db_path = db_path;
        return cmd_generate(o, g);
    }
    if (db_stats->parsed()) return cmd_db_stats(o, db_path);
    if (db_export->parsed()) return cmd_db_export(o, db_path, export_out, export_status, export_layer, export_profile);
    if (db_import->parsed()) return cmd_db_import(o, db_path, import_in);
    if (oeis->parsed()) return cmd_oeis(o, {db_path, stripped_path, online, replay_path, lenient});
    return kParse;
}

}  // namespace combspec::cli
