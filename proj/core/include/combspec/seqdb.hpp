#pragma once

// Store of (sentence, spectrum) records with spectrum-keyed deduplication
// and element-wise product detection. Persisted as JSON Lines.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "combspec/logic.hpp"
#include "combspec/spectrum.hpp"

namespace combspec {

class DbError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class RecordStatus : std::uint8_t { Unique, Duplicate, ProductRedundant };

const char* status_name(RecordStatus s);
RecordStatus parse_status(const std::string& s);

struct DbRecord {
    long id = 0;
    std::string sentence;  // canonical rendering
    Spectrum spectrum;
    RecordStatus status = RecordStatus::Unique;
    std::optional<long> duplicate_of;
    std::optional<std::pair<long, long>> product_of;
    int layer = 0;
    std::string profile;
    std::string created;  // UTC, ISO 8601
    std::vector<std::string> oeis;

    friend bool operator==(const DbRecord&, const DbRecord&) = default;
};

struct DbOptions {
    int min_common_length = 5;
    long product_candidate_budget = 100000;
};

struct ExportFilter {
    std::optional<RecordStatus> status;
    std::optional<int> layer;
    std::optional<std::string> profile;

    bool accepts(const DbRecord& r) const;
};

struct DbStats {
    long records = 0;
    long unique = 0;
    long duplicates = 0;
    long product_redundant = 0;
    // Cumulative unique records by generation layer.
    std::map<int, long> cumulative_unique_by_layer;
    int min_common_length = 5;
};

class SeqDb {
public:
    explicit SeqDb(DbOptions options = {});

    // Loads an existing file (if any); later inserts are appended to it.
    static SeqDb open(const std::string& path, DbOptions options = {});

    SeqDb(SeqDb&& o) noexcept;
    SeqDb& operator=(SeqDb&& o) noexcept;

    DbRecord insert(const Sentence& s, const Spectrum& spectrum, int layer = 0, const std::string& profile = "");

    std::optional<std::pair<long, long>> product_redundant(const Spectrum& spectrum) const;

    std::vector<DbRecord> export_records(const ExportFilter& filter = {}) const;
    void write_jsonl(std::ostream& out, const ExportFilter& filter = {}) const;
    // Adds records verbatim; ids must not collide with existing ones.
    void import_jsonl(std::istream& in);

    void set_oeis(long id, std::vector<std::string> ids);
    // Rewrites the backing file from memory.
    void save() const;
    void save(const std::string& path) const;

    DbStats stats() const;
    std::size_t size() const;
    std::optional<DbRecord> find(long id) const;
    const std::string& path() const { return path_; }

private:
    using Key = std::vector<std::string>;

    Key prefix_key(const std::vector<mpz_class>& terms) const;
    bool all_ones(const std::vector<mpz_class>& terms, std::size_t len) const;
    bool agree(const Spectrum& a, const Spectrum& b) const;
    std::optional<long> find_duplicate(const Spectrum& s) const;
    std::optional<std::pair<long, long>> find_product(const Spectrum& s) const;
    void index(const DbRecord& r);
    void append_line(const DbRecord& r) const;

    DbOptions options_;
    std::string path_;
    std::vector<DbRecord> records_;
    std::unordered_map<long, std::size_t> by_id_;
    std::map<Key, std::vector<std::size_t>> unique_by_prefix_;
    std::map<std::pair<std::string, std::string>, std::size_t> by_pair_;
    long next_id_ = 1;
    mutable std::unique_ptr<std::shared_mutex> mutex_;
};

std::string record_to_json(const DbRecord& r);
DbRecord record_from_json(const std::string& line);

}  // namespace combspec
