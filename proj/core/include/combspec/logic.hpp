#pragma once

// Sentence AST for the two-variable fragment with counting quantifiers.
//
// A sentence is a conjunction of clauses. Each clause is a quantifier prefix
// over one or two of the variables {x, y} followed by a disjunction of
// literals. Variables are always named x and y; a prefix is normalized so
// that its first quantifier binds x.

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace combspec {

enum class Var : std::uint8_t { X = 0, Y = 1 };

inline Var other(Var v) { return v == Var::X ? Var::Y : Var::X; }
inline char var_name(Var v) { return v == Var::X ? 'x' : 'y'; }

enum class PredicateKind : std::uint8_t { User, Skolem, Auxiliary };

struct Predicate {
    std::string name;
    int arity = 0;
    PredicateKind kind = PredicateKind::User;

    friend bool operator==(const Predicate&, const Predicate&) = default;
    friend auto operator<=>(const Predicate&, const Predicate&) = default;
};

struct Literal {
    std::string pred;
    std::uint8_t arity = 0;
    Var args[2] = {Var::X, Var::X};
    bool negated = false;

    static Literal nullary(std::string p, bool neg = false);
    static Literal unary(std::string p, Var a, bool neg = false);
    static Literal binary(std::string p, Var a, Var b, bool neg = false);

    bool mentions(Var v) const;
    bool same_atom(const Literal& o) const;
    Literal negation() const;
    std::string to_string() const;

    friend bool operator==(const Literal& a, const Literal& b) {
        return a.pred == b.pred && a.arity == b.arity && a.negated == b.negated &&
               (a.arity < 1 || a.args[0] == b.args[0]) && (a.arity < 2 || a.args[1] == b.args[1]);
    }
    friend bool operator<(const Literal& a, const Literal& b);
};

enum class QuantKind : std::uint8_t { ForAll, Exists, Count };

struct Quantifier {
    QuantKind kind = QuantKind::ForAll;
    int count = 0;  // k for "exactly k"; 0 otherwise

    static Quantifier forall() { return {QuantKind::ForAll, 0}; }
    static Quantifier exists() { return {QuantKind::Exists, 0}; }
    static Quantifier exactly(int k) { return {QuantKind::Count, k}; }

    bool is_counting() const { return kind == QuantKind::Count; }
    std::string to_string() const;

    friend bool operator==(const Quantifier&, const Quantifier&) = default;
    friend auto operator<=>(const Quantifier&, const Quantifier&) = default;
};

struct Clause {
    // quants[0] binds x; quants[1], if present, binds y.
    std::vector<Quantifier> quants;
    // Sorted, duplicate-free.
    std::vector<Literal> body;

    Clause() = default;
    Clause(std::vector<Quantifier> q, std::vector<Literal> b);

    int num_vars() const { return static_cast<int>(quants.size()); }
    bool is_universal() const;
    bool has_counting() const;
    // Both quantifiers present and equal, so swapping x and y preserves meaning.
    // Equal quantifiers that commute; two counting quantifiers do not.
    bool symmetric_prefix() const {
        return quants.size() == 2 && quants[0] == quants[1] && !quants[0].is_counting();
    }

    // Exchanges x and y in every literal (prefix unchanged).
    Clause swapped() const;
    std::string prefix_string() const;
    std::string to_string() const;

    friend bool operator==(const Clause& a, const Clause& b) {
        return a.quants == b.quants && a.body == b.body;
    }
};

class Sentence {
public:
    Sentence() = default;
    // Normalizes the clause set and infers the signature. Throws SentenceError
    // on arity conflicts.
    explicit Sentence(std::vector<Clause> clauses);
    Sentence(std::vector<Clause> clauses, const std::vector<Predicate>& kinds_hint);

    const std::vector<Clause>& clauses() const { return clauses_; }
    const std::vector<Predicate>& signature() const { return signature_; }
    const Predicate* find_predicate(std::string_view name) const;
    bool empty() const { return clauses_.empty(); }
    int num_literals() const;

    friend bool operator==(const Sentence& a, const Sentence& b) {
        return a.clauses_ == b.clauses_ && a.signature_ == b.signature_;
    }

private:
    void normalize(const std::vector<Predicate>& kinds_hint);

    std::vector<Clause> clauses_;
    std::vector<Predicate> signature_;
};

class SentenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t pos);
    std::size_t position() const { return pos_; }

private:
    std::size_t pos_;
};

// Grammar:
//   sentence := clause { "&" clause }
//   clause   := "(" prefix body ")"
//   prefix   := quant var [ quant var ]
//   quant    := "V" | "E" | "E=" INT
//   body     := literal { "|" literal }
//   literal  := [ "~" ] IDENT [ "(" var { "," var } ")" ]
// The empty string parses to the empty sentence.
Sentence parse_sentence(std::string_view text);

// Clauses and literals in canonical order; parse(render(s)) == s.
std::string render_sentence(const Sentence& s);

// A cell is a complete truth assignment to the atoms over the single variable
// x: U(x) for unary, R(x,x) for binary and P for nullary predicates.
struct Cell {
    std::vector<Literal> literals;
    std::string to_string() const;
};

// Atoms a cell assigns, in the order used by sentence_cells.
std::vector<Literal> cell_atoms(const std::vector<Predicate>& signature);
// All 2^m cells; bit i of the enumeration index is the value of cell_atoms()[i].
std::vector<Cell> sentence_cells(const Sentence& s);

struct PredicateTransform {
    // Pairs (from, to); predicates not listed map to themselves.
    std::vector<std::pair<std::string, std::string>> renaming;
    std::vector<std::string> sign_flip;
    std::vector<std::string> arg_flip;
};

Sentence apply_transform(const Sentence& s, const PredicateTransform& t);

struct CanonicalKey {
    std::string bytes;

    friend bool operator==(const CanonicalKey&, const CanonicalKey&) = default;
    friend auto operator<=>(const CanonicalKey&, const CanonicalKey&) = default;
};

// Invariant under arity-preserving renaming, per-predicate sign flips,
// per-binary argument flips, x/y swap in clauses with equal quantifiers, and
// clause/literal order. Exact: equal keys iff same orbit.
CanonicalKey canonical_key(const Sentence& s);

// Subgroups of the transformation group, for rule attribution.
struct KeyGroup {
    bool renaming = true;
    bool sign_flips = true;
    bool arg_flips = true;
};

CanonicalKey canonical_key(const Sentence& s, const KeyGroup& group);

}  // namespace combspec

template <>
struct std::hash<combspec::CanonicalKey> {
    std::size_t operator()(const combspec::CanonicalKey& k) const noexcept {
        return std::hash<std::string>{}(k.bytes);
    }
};
