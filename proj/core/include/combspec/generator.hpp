#pragma once

// Layered breadth-first generation of sentences with redundancy pruning.

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_set>
#include <vector>

#include "combspec/logic.hpp"
#include "combspec/wfomc.hpp"

namespace combspec {

struct GenLimits {
    int max_literals = 5;  // ML, per clause
    int max_clauses = 2;   // MC
    int unary_predicates = 1;
    int binary_predicates = 1;
    int max_count_k = 0;  // 0 disables counting quantifiers
    // Forbid E/E=k and E=k/E=l pairs and extend counting clauses beyond one literal.
    bool restrict_counting = true;
    int counting_max_literals = 1;

    static GenLimits fo2();
    static GenLimits c2();

    std::vector<Quantifier> quantifiers() const;
    bool allowed_pair(const Quantifier& q1, const Quantifier& q2) const;
    // Predicate names of the generation language.
    std::vector<Predicate> language() const;
};

enum class Verdict : std::uint8_t { KeepNew, KeepExpanding, Delete };

enum class PruneRule : std::uint8_t {
    None,
    Structural,
    Tautology,
    Contradiction,
    Decomposable,
    Isomorphic,
    TrivialConstraint,
    ReflexiveAtoms,
    Subsumption,
    CellGraphIsomorphism,
};

const char* rule_name(PruneRule r);

// Enabled pruning rules. The isomorphism rule uses the given key subgroup.
struct RuleSet {
    bool tautology = true;
    bool contradiction = true;
    bool decomposable = true;
    KeyGroup isomorphism{};
    bool trivial_constraint = true;
    bool reflexive_atoms = true;
    bool subsumption = true;
    bool cell_graph = true;

    static RuleSet all() { return {}; }
    // Cumulative ablation: level 0 keeps only structural isomorphism and
    // decomposition; each further level adds tautologies and contradictions,
    // renaming, negations, argument permutation, reflexive atoms,
    // subsumption, trivial constraints and cell graph isomorphism.
    static RuleSet ablation(int level);
};

struct PruneVerdict {
    Verdict verdict = Verdict::KeepNew;
    PruneRule rule = PruneRule::None;
};

std::vector<Sentence> refinements(const Sentence& s, const GenLimits& limits);

bool is_tautological_clause(const Clause& c);
// True only if s has no model at any domain size.
bool refute(const Sentence& s, long budget = 20000);
bool is_decomposable(const Sentence& s);
bool has_trivial_constraint(const Sentence& s);
// Requires at least two literals.
bool reflexive_only_binary(const Sentence& s);
bool reflexive_only_binary(const Sentence& s, int min_literals);
bool has_subsumed_clause(const Sentence& s);

using KeySet = std::unordered_set<CanonicalKey>;

// Rule order: tautology, contradiction, decomposable, isomorphic (all
// delete); trivial constraint, reflexive atoms, subsumption, cell graph
// isomorphism (keep expanding); otherwise new.
PruneVerdict classify(const Sentence& s, const KeySet& seen_sentences, const KeySet& seen_cell_graphs,
                      const RuleSet& rules = RuleSet::all());

enum class PruneMode : std::uint8_t {
    Full,
    // Only exact structural duplicates are removed.
    StructuralOnly,
};

struct LayerStats {
    int layer = 0;
    long generated = 0;
    long kept_new = 0;
    long keep_expanding = 0;
    long deleted = 0;
    long cumulative_kept = 0;
    std::vector<long> by_rule;  // indexed by PruneRule
};

struct GenStats {
    std::vector<LayerStats> layers;
    bool exhausted = false;  // stopped early by the deadline
    long total_kept() const { return layers.empty() ? 0 : layers.back().cumulative_kept; }
};

struct GeneratedSentence {
    Sentence sentence;
    int layer = 0;
    CanonicalKey cell_graph_key;
};

struct GenOptions {
    PruneMode mode = PruneMode::Full;
    RuleSet rules{};
    int workers = 1;
    Deadline deadline{};
    // Called with each pair of kept sentences that share a cell graph key
    // (the later sentence is hidden because of the earlier one).
    std::function<void(const Sentence& kept, const Sentence& hidden)> on_cell_graph_match;
};

using Sink = std::function<void(const GeneratedSentence&)>;

// Runs up to `layers` layers (capped at ML * MC) and emits every new sentence.
GenStats generate_layers(const GenLimits& limits, int layers, const Sink& sink, const GenOptions& options = {});

}  // namespace combspec
