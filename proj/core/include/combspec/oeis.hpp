#pragma once

// OEIS lookup: a local index over the "stripped" dump and an optional
// rate-limited online search.

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "combspec/spectrum.hpp"

namespace combspec {

class OeisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct OeisEntry {
    std::string id;  // "A" followed by six digits
    std::vector<mpz_class> terms;
    std::string name;

    friend bool operator==(const OeisEntry& a, const OeisEntry& b) { return a.id == b.id && a.terms == b.terms; }
};

bool valid_oeis_id(const std::string& id);

constexpr std::size_t kMinQueryTerms = 5;

// Immutable after loading; lookups are safe from several threads.
class OeisIndex {
public:
    const std::vector<OeisEntry>& entries() const { return entries_; }
    // "line N: message" for each skipped line.
    const std::vector<std::string>& errors() const { return errors_; }
    std::size_t size() const { return entries_.size(); }

    // Entries containing the spectrum as a contiguous run, ordered by id.
    std::vector<OeisEntry> match(const Spectrum& s) const;
    // Same result by scanning every entry.
    std::vector<OeisEntry> match_full_scan(const Spectrum& s) const;

    void add(OeisEntry e);

private:
    friend OeisIndex load_stripped(std::istream& in, bool lenient);

    std::vector<OeisEntry> entries_;
    std::vector<std::string> errors_;
    // First three terms of every window -> (entry, offset).
    std::unordered_map<std::string, std::vector<std::pair<std::uint32_t, std::uint32_t>>> grams_;
};

// Lines "Axxxxxx ,t1,t2,...,tk," and "#" comments. A malformed line throws
// OeisError naming the line unless lenient, in which case it is recorded in
// errors() and skipped.
OeisIndex load_stripped(std::istream& in, bool lenient = false);
OeisIndex load_stripped(const std::string& path, bool lenient = false);

std::vector<OeisEntry> match_sequence(const Spectrum& s, const OeisIndex& index);

// Online search.

struct HttpResponse {
    int status = 0;
    std::string body;
};

class Transport {
public:
    virtual ~Transport() = default;
    // GET path?query on the OEIS host; throws OeisError on transport failure.
    virtual HttpResponse get(const std::string& path_and_query) = 0;
};

// HTTPS to oeis.org.
std::unique_ptr<Transport> make_http_transport(std::chrono::seconds timeout = std::chrono::seconds(30));

// Replays recorded responses: a JSON object mapping "path?query" to
// {"status": int, "body": string}. Unknown requests fail.
class ReplayTransport : public Transport {
public:
    explicit ReplayTransport(std::map<std::string, HttpResponse> responses) : responses_(std::move(responses)) {}
    static std::unique_ptr<ReplayTransport> from_file(const std::string& path);
    HttpResponse get(const std::string& path_and_query) override;
    const std::vector<std::string>& requests() const { return requests_; }

private:
    std::map<std::string, HttpResponse> responses_;
    std::vector<std::string> requests_;
};

struct OnlineOptions {
    std::chrono::milliseconds min_interval{1000};
    int retries = 3;
    std::chrono::milliseconds backoff{1000};
};

class OeisClient {
public:
    // A null transport means offline: online_search then throws.
    explicit OeisClient(std::unique_ptr<Transport> transport, OnlineOptions options = {});

    bool online() const { return transport_ != nullptr; }
    std::vector<OeisEntry> online_search(const Spectrum& s);

    static std::string query_path(const Spectrum& s);
    // Accepts both the bare-array and the {"results": [...]} response shapes.
    static std::vector<OeisEntry> parse_results(const std::string& body);

private:
    std::unique_ptr<Transport> transport_;
    OnlineOptions options_;
    std::mutex mutex_;
    std::chrono::steady_clock::time_point last_{};
    bool have_last_ = false;
};

}  // namespace combspec
