#include "combspec/logic.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace combspec {

// ---------------------------------------------------------------- literals

Literal Literal::nullary(std::string p, bool neg) {
    Literal l;
    l.pred = std::move(p);
    l.arity = 0;
    l.negated = neg;
    return l;
}

Literal Literal::unary(std::string p, Var a, bool neg) {
    Literal l;
    l.pred = std::move(p);
    l.arity = 1;
    l.args[0] = a;
    l.negated = neg;
    return l;
}

Literal Literal::binary(std::string p, Var a, Var b, bool neg) {
    Literal l;
    l.pred = std::move(p);
    l.arity = 2;
    l.args[0] = a;
    l.args[1] = b;
    l.negated = neg;
    return l;
}

bool Literal::mentions(Var v) const {
    for (int i = 0; i < arity; ++i)
        if (args[i] == v) return true;
    return false;
}

bool Literal::same_atom(const Literal& o) const {
    if (pred != o.pred || arity != o.arity) return false;
    for (int i = 0; i < arity; ++i)
        if (args[i] != o.args[i]) return false;
    return true;
}

Literal Literal::negation() const {
    Literal l = *this;
    l.negated = !negated;
    return l;
}

std::string Literal::to_string() const {
    std::string s;
    if (negated) s += '~';
    s += pred;
    if (arity > 0) {
        s += '(';
        s += var_name(args[0]);
        if (arity == 2) {
            s += ',';
            s += var_name(args[1]);
        }
        s += ')';
    }
    return s;
}

static int args_code(const Literal& l) {
    int c = 0;
    for (int i = 0; i < l.arity; ++i) c = c * 2 + static_cast<int>(l.args[i]);
    return c;
}

// Matches the lexicographic order of the rendered text.
bool operator<(const Literal& a, const Literal& b) {
    if (a.negated != b.negated) return !a.negated;
    if (a.pred != b.pred) return a.pred < b.pred;
    if (a.arity != b.arity) return a.arity < b.arity;
    return args_code(a) < args_code(b);
}

// ------------------------------------------------------------- quantifiers

std::string Quantifier::to_string() const {
    switch (kind) {
        case QuantKind::ForAll: return "V";
        case QuantKind::Exists: return "E";
        case QuantKind::Count: return "E=" + std::to_string(count);
    }
    return "?";
}

// ----------------------------------------------------------------- clauses

Clause::Clause(std::vector<Quantifier> q, std::vector<Literal> b) : quants(std::move(q)), body(std::move(b)) {
    std::sort(body.begin(), body.end());
    body.erase(std::unique(body.begin(), body.end()), body.end());
}

bool Clause::is_universal() const {
    return std::all_of(quants.begin(), quants.end(), [](const Quantifier& q) { return q.kind == QuantKind::ForAll; });
}

bool Clause::has_counting() const {
    return std::any_of(quants.begin(), quants.end(), [](const Quantifier& q) { return q.is_counting(); });
}

Clause Clause::swapped() const {
    std::vector<Literal> lits = body;
    for (auto& l : lits)
        for (int i = 0; i < l.arity; ++i) l.args[i] = other(l.args[i]);
    return Clause(quants, std::move(lits));
}

std::string Clause::prefix_string() const {
    std::string s;
    for (std::size_t i = 0; i < quants.size(); ++i) {
        if (i) s += ' ';
        s += quants[i].to_string();
        s += ' ';
        s += var_name(static_cast<Var>(i));
    }
    return s;
}

std::string Clause::to_string() const {
    std::string s = "(" + prefix_string();
    for (std::size_t i = 0; i < body.size(); ++i) {
        s += i ? " | " : " ";
        s += body[i].to_string();
    }
    s += ')';
    return s;
}

static bool clause_less(const Clause& a, const Clause& b) {
    if (a.quants != b.quants) {
        std::string pa = a.prefix_string(), pb = b.prefix_string();
        if (pa != pb) return pa < pb;
    }
    return std::lexicographical_compare(a.body.begin(), a.body.end(), b.body.begin(), b.body.end());
}

// --------------------------------------------------------------- sentences

Sentence::Sentence(std::vector<Clause> clauses) : clauses_(std::move(clauses)) { normalize({}); }

Sentence::Sentence(std::vector<Clause> clauses, const std::vector<Predicate>& kinds_hint)
    : clauses_(std::move(clauses)) {
    normalize(kinds_hint);
}

void Sentence::normalize(const std::vector<Predicate>& kinds_hint) {
    for (const auto& c : clauses_) {
        if (c.quants.empty() || c.quants.size() > 2) throw SentenceError("clause must bind one or two variables");
        if (c.body.empty()) throw SentenceError("clause body must be nonempty");
        for (const auto& q : c.quants)
            if (q.is_counting() && q.count < 1) throw SentenceError("counting quantifier needs k >= 1");
        for (const auto& l : c.body) {
            if (l.arity > 2) throw SentenceError("arity above 2 is not supported");
            for (int i = 0; i < l.arity; ++i)
                if (static_cast<int>(l.args[i]) >= c.num_vars())
                    throw SentenceError("unbound variable " + std::string(1, var_name(l.args[i])) + " in " + l.to_string());
        }
    }
    std::sort(clauses_.begin(), clauses_.end(), clause_less);
    clauses_.erase(std::unique(clauses_.begin(), clauses_.end()), clauses_.end());

    std::map<std::string, int> arity;
    for (const auto& c : clauses_)
        for (const auto& l : c.body) {
            auto [it, inserted] = arity.emplace(l.pred, l.arity);
            if (!inserted && it->second != l.arity)
                throw SentenceError("predicate " + l.pred + " used with arities " + std::to_string(it->second) +
                                    " and " + std::to_string(l.arity));
        }
    signature_.clear();
    for (const auto& [name, a] : arity) {
        Predicate p{name, a, PredicateKind::User};
        for (const auto& h : kinds_hint)
            if (h.name == name) p.kind = h.kind;
        signature_.push_back(std::move(p));
    }
}

const Predicate* Sentence::find_predicate(std::string_view name) const {
    for (const auto& p : signature_)
        if (p.name == name) return &p;
    return nullptr;
}

int Sentence::num_literals() const {
    int n = 0;
    for (const auto& c : clauses_) n += static_cast<int>(c.body.size());
    return n;
}

// ----------------------------------------------------------------- parsing

ParseError::ParseError(const std::string& msg, std::size_t pos)
    : std::runtime_error(msg + " at position " + std::to_string(pos)), pos_(pos) {}

namespace {

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Sentence parse() {
        std::vector<Clause> clauses;
        skip_ws();
        if (pos_ == text_.size()) return Sentence{};
        clauses.push_back(parse_clause());
        skip_ws();
        while (pos_ < text_.size()) {
            expect('&');
            clauses.push_back(parse_clause());
            skip_ws();
        }
        try {
            return Sentence(std::move(clauses));
        } catch (const SentenceError& e) {
            throw ParseError(e.what(), pos_);
        }
    }

private:
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    void expect(char c) {
        if (peek() != c) throw ParseError(std::string("expected '") + c + "'", pos_);
        ++pos_;
    }

    std::string ident() {
        skip_ws();
        std::size_t start = pos_;
        if (pos_ >= text_.size() || !std::isalpha(static_cast<unsigned char>(text_[pos_])))
            throw ParseError("expected identifier", pos_);
        while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        return std::string(text_.substr(start, pos_ - start));
    }

    // Identifier at the cursor without consuming it.
    std::string peek_ident(std::size_t& after) {
        std::size_t save = pos_;
        skip_ws();
        std::string id;
        if (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) id = ident();
        after = pos_;
        pos_ = save;
        return id;
    }

    Var parse_var() {
        std::size_t at = pos_;
        std::string v = ident();
        if (v == "x") return Var::X;
        if (v == "y") return Var::Y;
        throw ParseError("expected variable x or y, got '" + v + "'", at);
    }

    Quantifier parse_quant() {
        std::size_t at = pos_;
        std::string q = ident();
        if (q == "V") return Quantifier::forall();
        if (q != "E") throw ParseError("expected quantifier, got '" + q + "'", at);
        if (peek() != '=') return Quantifier::exists();
        ++pos_;
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (start == pos_) throw ParseError("expected integer after 'E='", pos_);
        int k = std::stoi(std::string(text_.substr(start, pos_ - start)));
        if (k < 1) throw ParseError("counting quantifier needs k >= 1", start);
        return Quantifier::exactly(k);
    }

    // A quantifier follows if the next identifier is V/E and is followed by a
    // variable token (or by '=' for E=k).
    bool quant_ahead() {
        std::size_t after = 0;
        std::string id = peek_ident(after);
        if (id != "V" && id != "E") return false;
        std::size_t save = pos_;
        pos_ = after;
        bool result = false;
        if (id == "E" && peek() == '=') {
            result = true;
        } else {
            std::size_t after2 = 0;
            std::string v = peek_ident(after2);
            if (v == "x" || v == "y") {
                pos_ = after2;
                result = peek() != '(';
            }
        }
        pos_ = save;
        return result;
    }

    Literal parse_literal(std::size_t& at) {
        bool neg = false;
        if (peek() == '~') {
            neg = true;
            ++pos_;
        }
        at = pos_;
        std::string name = ident();
        if (name == "x" || name == "y") throw ParseError("variable used as predicate", at);
        std::vector<Var> args;
        if (peek() == '(') {
            ++pos_;
            args.push_back(parse_var());
            while (peek() == ',') {
                ++pos_;
                args.push_back(parse_var());
            }
            expect(')');
        }
        if (args.size() > 2) throw ParseError("arity above 2 is not supported", at);
        Literal l;
        l.pred = std::move(name);
        l.arity = static_cast<std::uint8_t>(args.size());
        for (std::size_t i = 0; i < args.size(); ++i) l.args[i] = args[i];
        l.negated = neg;
        return l;
    }

    Clause parse_clause() {
        expect('(');
        std::size_t prefix_at = pos_;
        std::vector<std::pair<Quantifier, Var>> prefix;
        auto bind = [&] {
            Quantifier q = parse_quant();
            prefix.emplace_back(q, parse_var());
        };
        bind();
        if (quant_ahead()) bind();
        if (prefix.size() == 2 && prefix[0].second == prefix[1].second)
            throw ParseError("quantified variables must be distinct", prefix_at);

        std::vector<Literal> body;
        std::vector<std::size_t> at(1);
        body.push_back(parse_literal(at[0]));
        while (peek() == '|') {
            ++pos_;
            at.push_back(0);
            body.push_back(parse_literal(at.back()));
        }
        expect(')');

        // Normalize so that the first quantifier binds x.
        bool swap = prefix[0].second == Var::Y;
        std::vector<Quantifier> quants;
        for (auto& [q, v] : prefix) quants.push_back(q);
        for (std::size_t i = 0; i < body.size(); ++i) {
            auto& l = body[i];
            for (int a = 0; a < l.arity; ++a) {
                bool bound = false;
                for (auto& [q, v] : prefix) bound = bound || v == l.args[a];
                if (!bound)
                    throw ParseError("unbound variable " + std::string(1, var_name(l.args[a])) + " in " + l.to_string(),
                                     at[i]);
                if (swap) l.args[a] = other(l.args[a]);
            }
        }
        return Clause(std::move(quants), std::move(body));
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

Sentence parse_sentence(std::string_view text) { return Parser(text).parse(); }

std::string render_sentence(const Sentence& s) {
    std::string out;
    for (std::size_t i = 0; i < s.clauses().size(); ++i) {
        if (i) out += " & ";
        out += s.clauses()[i].to_string();
    }
    return out;
}

// ------------------------------------------------------------------- cells

std::string Cell::to_string() const {
    std::string s;
    for (std::size_t i = 0; i < literals.size(); ++i) {
        if (i) s += " & ";
        s += literals[i].to_string();
    }
    return s;
}

std::vector<Literal> cell_atoms(const std::vector<Predicate>& signature) {
    std::vector<Literal> atoms;
    for (const auto& p : signature) {
        if (p.arity == 0) atoms.push_back(Literal::nullary(p.name));
        else if (p.arity == 1) atoms.push_back(Literal::unary(p.name, Var::X));
        else atoms.push_back(Literal::binary(p.name, Var::X, Var::X));
    }
    return atoms;
}

std::vector<Cell> sentence_cells(const Sentence& s) {
    const auto atoms = cell_atoms(s.signature());
    const std::size_t m = atoms.size();
    std::vector<Cell> cells;
    cells.reserve(std::size_t{1} << m);
    for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
        Cell c;
        for (std::size_t i = 0; i < m; ++i) {
            Literal l = atoms[i];
            l.negated = !((mask >> i) & 1U);
            c.literals.push_back(std::move(l));
        }
        cells.push_back(std::move(c));
    }
    return cells;
}

// -------------------------------------------------------------- transforms

Sentence apply_transform(const Sentence& s, const PredicateTransform& t) {
    std::map<std::string, std::string> rename;
    for (const auto& [from, to] : t.renaming) {
        const Predicate* p = s.find_predicate(from);
        if (!p) throw SentenceError("unknown predicate in transform: " + from);
        rename[from] = to;
    }
    std::set<std::string> flip(t.sign_flip.begin(), t.sign_flip.end());
    std::set<std::string> argflip(t.arg_flip.begin(), t.arg_flip.end());
    for (const auto& n : flip)
        if (!s.find_predicate(n)) throw SentenceError("unknown predicate in transform: " + n);
    for (const auto& n : argflip) {
        const Predicate* p = s.find_predicate(n);
        if (!p) throw SentenceError("unknown predicate in transform: " + n);
        if (p->arity != 2) throw SentenceError("argument flip needs a binary predicate: " + n);
    }
    std::set<std::string> targets;
    for (const auto& p : s.signature()) {
        auto it = rename.find(p.name);
        const std::string& target = it == rename.end() ? p.name : it->second;
        if (!targets.insert(target).second) throw SentenceError("renaming is not injective on " + target);
    }

    std::vector<Clause> clauses;
    std::vector<Predicate> kinds;
    for (const auto& c : s.clauses()) {
        std::vector<Literal> body;
        for (Literal l : c.body) {
            if (flip.count(l.pred)) l.negated = !l.negated;
            if (l.arity == 2 && argflip.count(l.pred)) std::swap(l.args[0], l.args[1]);
            if (auto it = rename.find(l.pred); it != rename.end()) l.pred = it->second;
            body.push_back(std::move(l));
        }
        clauses.emplace_back(c.quants, std::move(body));
    }
    for (auto p : s.signature()) {
        if (auto it = rename.find(p.name); it != rename.end()) p.name = it->second;
        kinds.push_back(std::move(p));
    }
    return Sentence(std::move(clauses), kinds);
}

// ------------------------------------------------------------ canonical key

namespace {

// Byte encoding of a clause image under a fixed placeholder assignment.
// Literal code: [placeholder][args][negated] packed into one 16-bit value.
using Code = std::uint16_t;

std::string encode_clause(const Clause& c, const std::vector<Code>& slot, const std::vector<int>& pred_index,
                          const std::vector<bool>& flip, const std::vector<bool>& argflip, bool swap_vars) {
    std::vector<Code> lits;
    lits.reserve(c.body.size());
    for (std::size_t i = 0; i < c.body.size(); ++i) {
        const Literal& l = c.body[i];
        int p = pred_index[i];
        Var a0 = l.args[0], a1 = l.args[1];
        if (l.arity == 2 && argflip[p]) std::swap(a0, a1);
        if (swap_vars) {
            a0 = other(a0);
            a1 = other(a1);
        }
        int ac = 0;
        if (l.arity >= 1) ac = static_cast<int>(a0);
        if (l.arity == 2) ac = ac * 2 + static_cast<int>(a1);
        bool neg = l.negated != static_cast<bool>(flip[p]);
        lits.push_back(static_cast<Code>((slot[p] << 3) | (ac << 1) | (neg ? 1 : 0)));
    }
    std::sort(lits.begin(), lits.end());
    std::string out;
    out.reserve(2 + 2 * c.quants.size() + 2 * lits.size());
    out.push_back(static_cast<char>(c.quants.size()));
    for (const auto& q : c.quants) {
        out.push_back(static_cast<char>(q.kind));
        out.push_back(static_cast<char>(q.count));
    }
    out.push_back(static_cast<char>(lits.size()));
    for (Code v : lits) {
        out.push_back(static_cast<char>(v >> 8));
        out.push_back(static_cast<char>(v & 0xFF));
    }
    return out;
}

}  // namespace

CanonicalKey canonical_key(const Sentence& s) { return canonical_key(s, KeyGroup{}); }

CanonicalKey canonical_key(const Sentence& s, const KeyGroup& group) {
    const auto& sig = s.signature();
    const std::size_t np = sig.size();

    // Group predicates by (arity, kind); renamings permute within a group.
    std::map<std::pair<int, int>, std::vector<int>> groups;
    for (std::size_t i = 0; i < np; ++i) groups[{sig[i].arity, static_cast<int>(sig[i].kind)}].push_back(static_cast<int>(i));
    std::vector<std::vector<int>> group_members;
    std::vector<int> group_base;
    int base = 0;
    for (auto& [k, members] : groups) {
        group_members.push_back(members);
        group_base.push_back(base);
        base += static_cast<int>(members.size());
    }

    // Per-literal predicate indices, computed once.
    std::vector<std::vector<int>> lit_pred(s.clauses().size());
    for (std::size_t c = 0; c < s.clauses().size(); ++c)
        for (const auto& l : s.clauses()[c].body) {
            auto it = std::lower_bound(sig.begin(), sig.end(), l.pred,
                                       [](const Predicate& p, const std::string& n) { return p.name < n; });
            lit_pred[c].push_back(static_cast<int>(it - sig.begin()));
        }

    std::vector<int> binaries;
    for (std::size_t i = 0; i < np; ++i)
        if (sig[i].arity == 2) binaries.push_back(static_cast<int>(i));

    std::string best;
    bool have_best = false;

    std::vector<std::vector<int>> perms(group_members.size());
    for (std::size_t g = 0; g < group_members.size(); ++g) {
        perms[g].resize(group_members[g].size());
        std::iota(perms[g].begin(), perms[g].end(), 0);
    }
    std::vector<Code> slot(np);
    std::vector<bool> flip(np), argflip(np);
    std::vector<std::string> clause_codes(s.clauses().size());

    // Header so that different signatures never collide.
    std::string header;
    for (auto& [k, members] : groups) {
        header.push_back(static_cast<char>(k.first));
        header.push_back(static_cast<char>(k.second));
        header.push_back(static_cast<char>(members.size()));
    }
    if (!group.renaming)
        for (const auto& p : sig) header += p.name + ",";
    header.push_back('|');
    const std::size_t sign_masks = group.sign_flips ? (std::size_t{1} << np) : 1;
    const std::size_t arg_masks = group.arg_flips ? (std::size_t{1} << binaries.size()) : 1;

    while (true) {
        for (std::size_t g = 0; g < group_members.size(); ++g)
            for (std::size_t j = 0; j < group_members[g].size(); ++j)
                slot[group_members[g][j]] = static_cast<Code>(group_base[g] + perms[g][j]);

        for (std::size_t fmask = 0; fmask < sign_masks; ++fmask) {
            for (std::size_t i = 0; i < np; ++i) flip[i] = (fmask >> i) & 1U;
            for (std::size_t amask = 0; amask < arg_masks; ++amask) {
                std::fill(argflip.begin(), argflip.end(), false);
                for (std::size_t b = 0; b < binaries.size(); ++b) argflip[binaries[b]] = (amask >> b) & 1U;
                for (std::size_t c = 0; c < s.clauses().size(); ++c) {
                    const Clause& cl = s.clauses()[c];
                    std::string code = encode_clause(cl, slot, lit_pred[c], flip, argflip, false);
                    if (cl.symmetric_prefix()) {
                        std::string alt = encode_clause(cl, slot, lit_pred[c], flip, argflip, true);
                        if (alt < code) code = std::move(alt);
                    }
                    clause_codes[c] = std::move(code);
                }
                std::sort(clause_codes.begin(), clause_codes.end());
                std::string cand = header;
                for (const auto& cc : clause_codes) cand += cc;
                if (!have_best || cand < best) {
                    best = std::move(cand);
                    have_best = true;
                }
            }
        }

        // Advance the product of group permutations.
        if (!group.renaming) break;
        std::size_t g = 0;
        for (; g < perms.size(); ++g) {
            if (std::next_permutation(perms[g].begin(), perms[g].end())) break;
        }
        if (g == perms.size()) break;
    }
    return CanonicalKey{std::move(best)};
}

}  // namespace combspec
