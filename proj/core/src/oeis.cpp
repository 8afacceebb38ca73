#include "combspec/oeis.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace combspec {

using json = nlohmann::json;

bool valid_oeis_id(const std::string& id) {
    return id.size() == 7 && id[0] == 'A' &&
           std::all_of(id.begin() + 1, id.end(), [](unsigned char c) { return std::isdigit(c); });
}

namespace {

bool parse_integer(const std::string& tok, mpz_class& out) {
    std::size_t i = tok[0] == '-' ? 1 : 0;
    if (i == tok.size()) return false;
    for (std::size_t j = i; j < tok.size(); ++j)
        if (!std::isdigit(static_cast<unsigned char>(tok[j]))) return false;
    return out.set_str(tok, 10) == 0;
}

std::string gram_key(const mpz_class& a, const mpz_class& b, const mpz_class& c) {
    return a.get_str() + "," + b.get_str() + "," + c.get_str();
}

void sort_by_id(std::vector<OeisEntry>& v) {
    std::sort(v.begin(), v.end(), [](const OeisEntry& a, const OeisEntry& b) { return a.id < b.id; });
}

void check_query(const Spectrum& s) {
    if (s.size() < kMinQueryTerms)
        throw OeisError("query needs at least " + std::to_string(kMinQueryTerms) + " terms, got " +
                        std::to_string(s.size()));
}

bool contains_at(const std::vector<mpz_class>& hay, std::size_t off, const std::vector<mpz_class>& needle) {
    if (off + needle.size() > hay.size()) return false;
    for (std::size_t i = 0; i < needle.size(); ++i)
        if (hay[off + i] != needle[i]) return false;
    return true;
}

}  // namespace

void OeisIndex::add(OeisEntry e) {
    const auto idx = static_cast<std::uint32_t>(entries_.size());
    for (std::size_t off = 0; off + 3 <= e.terms.size(); ++off)
        grams_[gram_key(e.terms[off], e.terms[off + 1], e.terms[off + 2])].emplace_back(idx, static_cast<std::uint32_t>(off));
    entries_.push_back(std::move(e));
}

std::vector<OeisEntry> OeisIndex::match(const Spectrum& s) const {
    check_query(s);
    std::vector<OeisEntry> out;
    auto it = grams_.find(gram_key(s.terms[0], s.terms[1], s.terms[2]));
    if (it == grams_.end()) return out;
    std::set<std::uint32_t> hits;
    for (const auto& [e, off] : it->second)
        if (!hits.count(e) && contains_at(entries_[e].terms, off, s.terms)) hits.insert(e);
    for (auto e : hits) out.push_back(entries_[e]);
    sort_by_id(out);
    return out;
}

std::vector<OeisEntry> OeisIndex::match_full_scan(const Spectrum& s) const {
    check_query(s);
    std::vector<OeisEntry> out;
    for (const auto& e : entries_)
        for (std::size_t off = 0; off + s.size() <= e.terms.size(); ++off)
            if (contains_at(e.terms, off, s.terms)) {
                out.push_back(e);
                break;
            }
    sort_by_id(out);
    return out;
}

OeisIndex load_stripped(std::istream& in, bool lenient) {
    OeisIndex index;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto fail = [&](const std::string& msg) {
            std::string full = "line " + std::to_string(lineno) + ": " + msg;
            if (!lenient) throw OeisError(full);
            index.errors_.push_back(std::move(full));
        };
        const auto space = line.find(' ');
        const std::string id = line.substr(0, space);
        if (!valid_oeis_id(id)) {
            fail("bad sequence id '" + id + "'");
            continue;
        }
        std::string rest = space == std::string::npos ? "" : line.substr(space + 1);
        rest.erase(0, rest.find_first_not_of(' '));
        if (rest.size() < 2 || rest.front() != ',' || rest.back() != ',') {
            fail("terms must be written as ,t1,t2,...,");
            continue;
        }
        OeisEntry e;
        e.id = id;
        bool ok = true;
        std::stringstream ss(rest.substr(1, rest.size() - 2));
        std::string tok;
        while (ok && std::getline(ss, tok, ',')) {
            mpz_class v;
            if (!parse_integer(tok, v)) {
                fail("bad term '" + tok + "'");
                ok = false;
            } else {
                e.terms.push_back(std::move(v));
            }
        }
        if (!ok) continue;
        if (e.terms.empty()) {
            fail("no terms");
            continue;
        }
        index.add(std::move(e));
    }
    return index;
}

OeisIndex load_stripped(const std::string& path, bool lenient) {
    std::ifstream in(path);
    if (!in) throw OeisError("cannot read " + path);
    return load_stripped(in, lenient);
}

std::vector<OeisEntry> match_sequence(const Spectrum& s, const OeisIndex& index) { return index.match(s); }

// ------------------------------------------------------------------ online

namespace {

class HttpTransport : public Transport {
public:
    explicit HttpTransport(std::chrono::seconds timeout) : client_("oeis.org", 443) {
        client_.set_connection_timeout(timeout);
        client_.set_read_timeout(timeout);
        client_.set_follow_location(true);
    }

    HttpResponse get(const std::string& path_and_query) override {
        auto res = client_.Get(path_and_query);
        if (!res) throw OeisError("request failed: " + httplib::to_string(res.error()));
        return {res->status, res->body};
    }

private:
    httplib::SSLClient client_;
};

}  // namespace

std::unique_ptr<Transport> make_http_transport(std::chrono::seconds timeout) {
    return std::make_unique<HttpTransport>(timeout);
}

std::unique_ptr<ReplayTransport> ReplayTransport::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw OeisError("cannot read " + path);
    std::map<std::string, HttpResponse> responses;
    try {
        json j = json::parse(in);
        for (const auto& [key, value] : j.items())
            responses[key] = {value.at("status").get<int>(), value.at("body").get<std::string>()};
    } catch (const json::exception& e) {
        throw OeisError("bad replay fixture " + path + ": " + e.what());
    }
    return std::make_unique<ReplayTransport>(std::move(responses));
}

HttpResponse ReplayTransport::get(const std::string& path_and_query) {
    requests_.push_back(path_and_query);
    auto it = responses_.find(path_and_query);
    if (it == responses_.end()) throw OeisError("no recorded response for " + path_and_query);
    return it->second;
}

OeisClient::OeisClient(std::unique_ptr<Transport> transport, OnlineOptions options)
    : transport_(std::move(transport)), options_(options) {}

std::string OeisClient::query_path(const Spectrum& s) {
    if (s.terms.empty()) throw OeisError("online search needs at least one term");
    return "/search?q=" + s.to_string(",") + "&fmt=json";
}

std::vector<OeisEntry> OeisClient::parse_results(const std::string& body) {
    std::vector<OeisEntry> out;
    json j;
    try {
        j = json::parse(body);
    } catch (const json::exception& e) {
        throw OeisError(std::string("unparseable search response: ") + e.what());
    }
    const json* results = &j;
    if (j.is_object()) {
        if (!j.contains("results")) throw OeisError("search response has no results field");
        results = &j["results"];
    }
    if (results->is_null()) return out;
    if (!results->is_array()) throw OeisError("search results are not a list");
    for (const auto& r : *results) {
        OeisEntry e;
        try {
            char buf[16];
            std::snprintf(buf, sizeof buf, "A%06ld", r.at("number").get<long>());
            e.id = buf;
            e.name = r.value("name", "");
            std::stringstream ss(r.at("data").get<std::string>());
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                mpz_class v;
                if (!parse_integer(tok, v)) throw OeisError("bad term '" + tok + "' in " + e.id);
                e.terms.push_back(std::move(v));
            }
        } catch (const json::exception& ex) {
            throw OeisError(std::string("malformed search result: ") + ex.what());
        }
        out.push_back(std::move(e));
    }
    sort_by_id(out);
    return out;
}

std::vector<OeisEntry> OeisClient::online_search(const Spectrum& s) {
    if (!transport_) throw OeisError("online search unavailable in offline mode");
    const std::string path = query_path(s);
    std::lock_guard lock(mutex_);
    std::string last_error;
    for (int attempt = 0; attempt <= options_.retries; ++attempt) {
        if (attempt > 0) std::this_thread::sleep_for(options_.backoff * (1 << (attempt - 1)));
        if (have_last_) {
            auto wait = last_ + options_.min_interval - std::chrono::steady_clock::now();
            if (wait > std::chrono::steady_clock::duration::zero()) std::this_thread::sleep_for(wait);
        }
        last_ = std::chrono::steady_clock::now();
        have_last_ = true;
        try {
            HttpResponse r = transport_->get(path);
            if (r.status == 200) return parse_results(r.body);
            last_error = "HTTP " + std::to_string(r.status);
            if (r.status != 429 && r.status < 500) break;
        } catch (const OeisError& e) {
            last_error = e.what();
        }
    }
    throw OeisError("online search failed: " + last_error);
}

}  // namespace combspec
