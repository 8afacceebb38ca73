#pragma once

// Lifted weighted model counting for the two-variable fragment with counting
// quantifiers, via the cell decomposition.

#include <chrono>
#include <map>
#include <stdexcept>
#include <stop_token>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "combspec/logic.hpp"
#include "combspec/polynomial.hpp"
#include "combspec/spectrum.hpp"

namespace combspec {

struct Weight {
    Polynomial pos{1L};
    Polynomial neg{1L};
};

// Predicates without an entry have weights (1, 1).
using WeightMap = std::map<std::string, Weight>;

Weight weight_of(const WeightMap& w, const std::string& pred);

class FragmentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class BudgetExceeded : public std::runtime_error {
public:
    BudgetExceeded() : std::runtime_error("time budget exhausted") {}
};

// Wall-clock limit plus an optional external stop request.
class Deadline {
public:
    using Clock = std::chrono::steady_clock;

    Deadline() = default;
    explicit Deadline(Clock::duration budget, std::stop_token stop = {})
        : limited_(true), at_(Clock::now() + budget), stop_(std::move(stop)) {}
    Deadline(Clock::time_point at, std::stop_token stop) : limited_(true), at_(at), stop_(std::move(stop)) {}

    bool expired() const {
        if (stop_.stop_requested()) return true;
        return limited_ && Clock::now() >= at_;
    }
    void check() const {
        if (expired()) throw BudgetExceeded();
    }

private:
    bool limited_ = false;
    Clock::time_point at_{};
    std::stop_token stop_{};
};

// |{true atoms of P}| = a*n + b, or false atoms when negated.
struct CardinalityConstraint {
    Predicate predicate;
    bool negated = false;
    long a = 0;
    long b = 0;
    int var = -1;  // symbolic variable carrying this constraint

    long target(long n) const { return a * n + b; }
    // Target expressed as a count of true atoms.
    long positive_target(long n) const;
    std::string to_string() const;

    friend bool operator==(const CardinalityConstraint&, const CardinalityConstraint&) = default;
};

struct Reduction {
    Sentence sentence;
    std::vector<Predicate> signature;  // includes predicates left only in constraints
    std::vector<CardinalityConstraint> constraints;
};

// Replaces every ∃=1 clause by counting-free clauses plus cardinality
// constraints. Only k = 1, single-literal bodies and prefixes pairing ∃=1
// with ∀ are supported.
Reduction reduce_counting_quantifiers(const Sentence& s);

struct Skolemized {
    Sentence sentence;
    std::vector<Predicate> signature;
    WeightMap weights;
};

// Removes existential quantifiers with fresh predicates weighted (1, -1).
Skolemized skolemize(const Sentence& s, const WeightMap& w);
Skolemized skolemize(const Sentence& s, const std::vector<Predicate>& signature, const WeightMap& w);

struct CellGraph {
    std::vector<Cell> cells;
    std::vector<Polynomial> w;
    std::vector<std::vector<Polynomial>> r;
    std::vector<CardinalityConstraint> constraints;

    std::size_t size() const { return cells.size(); }
};

// s must be universally quantified with no nullary predicates. Cells range
// over the non-nullary predicates of signature.
CellGraph build_cell_graph(const Sentence& s, const std::vector<Predicate>& signature, const WeightMap& w,
                           const std::vector<CardinalityConstraint>& constraints = {}, bool prune_zero = true);
CellGraph build_cell_graph(const Sentence& s, const WeightMap& w,
                           const std::vector<CardinalityConstraint>& constraints = {}, bool prune_zero = true);

// Drops zero-weight cells and merges interchangeable cells (equal rows and
// equal loop weights) into one cell carrying the summed vertex weight.
CellGraph simplify_cell_graph(const CellGraph& g);

// The full compiled form of a sentence: one cell graph per truth assignment
// to the nullary atoms, each scaled by the assignment's weight.
struct ConditionedCellGraph {
    struct Branch {
        Polynomial factor;
        CellGraph graph;
    };
    std::vector<Branch> branches;
    std::vector<CardinalityConstraint> constraints;
    // Original weight of the constrained polarity, per symbolic variable.
    std::vector<Polynomial> multipliers;
    int num_vars = 0;
};

// With merge_twins unset the branch graphs keep every nonzero cell, which is
// the form cell_graph_key compares.
ConditionedCellGraph compile(const Sentence& s, const WeightMap& w = {}, bool merge_twins = true);

// Cell decomposition sum at a single domain size.
Polynomial evaluate_cell_sum(const CellGraph& g, int n);

// Values for n = 0..max_n in one pass. Terms whose degree in variable v
// exceeds caps[v] are discarded.
std::vector<Polynomial> evaluate_cell_sums(const CellGraph& g, int max_n, const Polynomial::Caps& caps,
                                           const Deadline& deadline = {});

mpz_class extract_coefficient(const Polynomial& p, const std::vector<CardinalityConstraint>& constraints, int n,
                              const WeightMap& w);

// Counts for n = 1..max_n (index n-1) of a compiled sentence.
std::vector<mpz_class> evaluate_compiled(const ConditionedCellGraph& cg, int max_n, const Deadline& deadline = {});

mpz_class wfomc(const Sentence& s, int n, const WeightMap& w = {});

Spectrum compute_spectrum(const Sentence& s, int length, Deadline deadline = {});
Spectrum compute_spectrum(const Sentence& s, int length, std::chrono::steady_clock::duration budget);

// Invariant under cell permutation and renaming of symbolic variables; the
// graphs are compared as given. Equal keys certify equal counts at every
// domain size.
CanonicalKey cell_graph_key(const CellGraph& g);
CanonicalKey cell_graph_key(const ConditionedCellGraph& cg);

}  // namespace combspec
