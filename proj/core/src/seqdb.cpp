#include "combspec/seqdb.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>

#include "json.hpp"

namespace combspec {

using json = nlohmann::ordered_json;

const char* status_name(RecordStatus s) {
    switch (s) {
        case RecordStatus::Unique: return "unique";
        case RecordStatus::Duplicate: return "duplicate";
        case RecordStatus::ProductRedundant: return "product_redundant";
    }
    return "?";
}

RecordStatus parse_status(const std::string& s) {
    if (s == "unique") return RecordStatus::Unique;
    if (s == "duplicate") return RecordStatus::Duplicate;
    if (s == "product_redundant") return RecordStatus::ProductRedundant;
    throw DbError("unknown record status: " + s);
}

bool ExportFilter::accepts(const DbRecord& r) const {
    if (status && r.status != *status) return false;
    if (layer && r.layer != *layer) return false;
    if (profile && r.profile != *profile) return false;
    return true;
}

namespace {

std::string now_utc() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

std::string record_to_json(const DbRecord& r) {
    json j;
    j["id"] = r.id;
    j["sentence"] = r.sentence;
    json terms = json::array();
    for (const auto& t : r.spectrum.terms) terms.push_back(t.get_str());
    j["spectrum"] = std::move(terms);
    j["truncated"] = r.spectrum.truncated;
    j["status"] = status_name(r.status);
    j["duplicate_of"] = r.duplicate_of ? json(*r.duplicate_of) : json(nullptr);
    j["product_of"] = r.product_of ? json::array({r.product_of->first, r.product_of->second}) : json(nullptr);
    j["layer"] = r.layer;
    j["profile"] = r.profile;
    j["created"] = r.created;
    j["oeis"] = r.oeis;
    return j.dump();
}

DbRecord record_from_json(const std::string& line) {
    DbRecord r;
    try {
        json j = json::parse(line);
        r.id = j.at("id").get<long>();
        r.sentence = j.at("sentence").get<std::string>();
        for (const auto& t : j.at("spectrum")) r.spectrum.terms.emplace_back(t.get<std::string>());
        r.spectrum.truncated = j.at("truncated").get<bool>();
        r.status = parse_status(j.at("status").get<std::string>());
        if (!j.at("duplicate_of").is_null()) r.duplicate_of = j["duplicate_of"].get<long>();
        if (!j.at("product_of").is_null()) r.product_of = {j["product_of"].at(0).get<long>(), j["product_of"].at(1).get<long>()};
        r.layer = j.value("layer", 0);
        r.profile = j.value("profile", "");
        r.created = j.value("created", "");
        r.oeis = j.value("oeis", std::vector<std::string>{});
    } catch (const json::exception& e) {
        throw DbError(std::string("malformed record: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw DbError(std::string("malformed spectrum term: ") + e.what());
    }
    return r;
}

SeqDb::SeqDb(DbOptions options) : options_(options), mutex_(std::make_unique<std::shared_mutex>()) {
    if (options_.min_common_length < 1) throw DbError("min_common_length must be positive");
}

SeqDb::SeqDb(SeqDb&& o) noexcept = default;
SeqDb& SeqDb::operator=(SeqDb&& o) noexcept = default;

SeqDb SeqDb::open(const std::string& path, DbOptions options) {
    SeqDb db(options);
    if (std::filesystem::exists(path)) {
        std::ifstream in(path);
        if (!in) throw DbError("cannot read " + path);
        db.import_jsonl(in);
    }
    db.path_ = path;
    return db;
}

SeqDb::Key SeqDb::prefix_key(const std::vector<mpz_class>& terms) const {
    Key k;
    for (std::size_t i = 0; i < static_cast<std::size_t>(options_.min_common_length) && i < terms.size(); ++i)
        k.push_back(terms[i].get_str());
    return k;
}

bool SeqDb::all_ones(const std::vector<mpz_class>& terms, std::size_t len) const {
    for (std::size_t i = 0; i < len && i < terms.size(); ++i)
        if (terms[i] != 1) return false;
    return true;
}

bool SeqDb::agree(const Spectrum& a, const Spectrum& b) const {
    const std::size_t len = std::min(a.size(), b.size());
    if (len < static_cast<std::size_t>(options_.min_common_length)) return false;
    for (std::size_t i = 0; i < len; ++i)
        if (a.terms[i] != b.terms[i]) return false;
    return true;
}

std::optional<long> SeqDb::find_duplicate(const Spectrum& s) const {
    if (s.size() < static_cast<std::size_t>(options_.min_common_length)) return std::nullopt;
    auto it = unique_by_prefix_.find(prefix_key(s.terms));
    if (it == unique_by_prefix_.end()) return std::nullopt;
    for (std::size_t idx : it->second)
        if (agree(records_[idx].spectrum, s)) return records_[idx].id;
    return std::nullopt;
}

std::optional<std::pair<long, long>> SeqDb::find_product(const Spectrum& s) const {
    const std::size_t floor = static_cast<std::size_t>(options_.min_common_length);
    if (s.size() < floor) return std::nullopt;
    long budget = options_.product_candidate_budget;
    for (const auto& [key, members] : unique_by_prefix_) {
        for (std::size_t ai : members) {
            if (--budget < 0) return std::nullopt;
            const Spectrum& a = records_[ai].spectrum;
            const std::size_t la = std::min(s.size(), a.size());
            if (la < floor || all_ones(a.terms, la)) continue;
            // Implied cofactor over the hashed prefix.
            std::vector<mpz_class> b(floor);
            bool ok = true;
            for (std::size_t i = 0; i < floor && ok; ++i) {
                if (a.terms[i] == 0) ok = false;
                else if (!mpz_divisible_p(s.terms[i].get_mpz_t(), a.terms[i].get_mpz_t())) ok = false;
                else b[i] = s.terms[i] / a.terms[i];
            }
            if (!ok) continue;
            auto it = unique_by_prefix_.find(prefix_key(b));
            if (it == unique_by_prefix_.end()) continue;
            for (std::size_t ci : it->second) {
                const Spectrum& c = records_[ci].spectrum;
                const std::size_t len = std::min(la, c.size());
                if (len < floor || all_ones(c.terms, len)) continue;
                bool match = true;
                for (std::size_t i = 0; i < len && match; ++i) match = a.terms[i] * c.terms[i] == s.terms[i];
                if (match) return std::make_pair(records_[ai].id, records_[ci].id);
            }
        }
    }
    return std::nullopt;
}

std::optional<std::pair<long, long>> SeqDb::product_redundant(const Spectrum& spectrum) const {
    std::shared_lock lock(*mutex_);
    return find_product(spectrum);
}

void SeqDb::index(const DbRecord& r) {
    const std::size_t idx = records_.size() - 1;
    by_id_[r.id] = idx;
    by_pair_[{r.sentence, r.spectrum.to_string()}] = idx;
    if (r.status == RecordStatus::Unique && r.spectrum.size() >= static_cast<std::size_t>(options_.min_common_length))
        unique_by_prefix_[prefix_key(r.spectrum.terms)].push_back(idx);
    next_id_ = std::max(next_id_, r.id + 1);
}

void SeqDb::append_line(const DbRecord& r) const {
    if (path_.empty()) return;
    std::ofstream out(path_, std::ios::app);
    if (!out) throw DbError("cannot write " + path_);
    out << record_to_json(r) << '\n';
    if (!out) throw DbError("write failed on " + path_);
}

DbRecord SeqDb::insert(const Sentence& s, const Spectrum& spectrum, int layer, const std::string& profile) {
    for (const auto& t : spectrum.terms)
        if (t < 0) throw DbError("spectrum terms must be nonnegative");
    if (spectrum.terms.empty()) throw DbError("spectrum must be nonempty");

    std::unique_lock lock(*mutex_);
    DbRecord r;
    r.sentence = render_sentence(s);
    r.spectrum = spectrum;
    if (auto it = by_pair_.find({r.sentence, spectrum.to_string()}); it != by_pair_.end()) return records_[it->second];

    r.id = next_id_;
    r.layer = layer;
    r.profile = profile;
    r.created = now_utc();
    if (auto d = find_duplicate(spectrum)) {
        r.status = RecordStatus::Duplicate;
        r.duplicate_of = *d;
    } else if (auto p = find_product(spectrum)) {
        r.status = RecordStatus::ProductRedundant;
        r.product_of = *p;
    }
    append_line(r);
    records_.push_back(r);
    index(records_.back());
    return r;
}

std::vector<DbRecord> SeqDb::export_records(const ExportFilter& filter) const {
    std::shared_lock lock(*mutex_);
    std::vector<DbRecord> out;
    for (const auto& r : records_)
        if (filter.accepts(r)) out.push_back(r);
    return out;
}

void SeqDb::write_jsonl(std::ostream& out, const ExportFilter& filter) const {
    for (const auto& r : export_records(filter)) out << record_to_json(r) << '\n';
    if (!out) throw DbError("write failed");
}

void SeqDb::import_jsonl(std::istream& in) {
    std::unique_lock lock(*mutex_);
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        DbRecord r;
        try {
            r = record_from_json(line);
        } catch (const DbError& e) {
            throw DbError("line " + std::to_string(lineno) + ": " + e.what());
        }
        if (by_id_.count(r.id)) throw DbError("line " + std::to_string(lineno) + ": duplicate record id " + std::to_string(r.id));
        records_.push_back(std::move(r));
        index(records_.back());
    }
}

void SeqDb::set_oeis(long id, std::vector<std::string> ids) {
    std::unique_lock lock(*mutex_);
    auto it = by_id_.find(id);
    if (it == by_id_.end()) throw DbError("no record with id " + std::to_string(id));
    records_[it->second].oeis = std::move(ids);
}

void SeqDb::save() const {
    if (path_.empty()) throw DbError("database has no backing file");
    save(path_);
}

void SeqDb::save(const std::string& path) const {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw DbError("cannot write " + tmp);
        write_jsonl(out);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw DbError("cannot replace " + path + ": " + ec.message());
}

DbStats SeqDb::stats() const {
    std::shared_lock lock(*mutex_);
    DbStats st;
    st.min_common_length = options_.min_common_length;
    std::map<int, long> per_layer;
    for (const auto& r : records_) {
        ++st.records;
        switch (r.status) {
            case RecordStatus::Unique:
                ++st.unique;
                ++per_layer[r.layer];
                break;
            case RecordStatus::Duplicate: ++st.duplicates; break;
            case RecordStatus::ProductRedundant: ++st.product_redundant; break;
        }
    }
    long cumulative = 0;
    for (const auto& [layer, count] : per_layer) st.cumulative_unique_by_layer[layer] = cumulative += count;
    return st;
}

std::size_t SeqDb::size() const {
    std::shared_lock lock(*mutex_);
    return records_.size();
}

std::optional<DbRecord> SeqDb::find(long id) const {
    std::shared_lock lock(*mutex_);
    auto it = by_id_.find(id);
    if (it == by_id_.end()) return std::nullopt;
    return records_[it->second];
}

}  // namespace combspec
