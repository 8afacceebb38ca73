#include <algorithm>
#include <map>
#include <numeric>

#include "combspec/wfomc.hpp"

namespace combspec {

namespace {

constexpr int kLeafBudget = 4096;

// Canonical form of a complete graph with labeled vertices and edges, by
// colour refinement plus individualization. Labels are small integers whose
// order is itself canonical (sorted label strings).
class GraphCanonizer {
public:
    GraphCanonizer(std::vector<int> vertex_label, std::vector<std::vector<int>> edge_label)
        : vlabel_(std::move(vertex_label)), elabel_(std::move(edge_label)), n_(static_cast<int>(vlabel_.size())) {}

    std::string canonical() {
        std::vector<int> colour = vlabel_;
        rank(colour);
        refine(colour);
        search(colour);
        return best_;
    }

private:
    // Replaces values with their rank among the distinct values.
    static void rank(std::vector<int>& colour) {
        std::vector<int> sorted = colour;
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        for (auto& c : colour) c = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), c) - sorted.begin());
    }

    void refine(std::vector<int>& colour) const {
        int classes = num_classes(colour);
        while (true) {
            std::vector<std::pair<std::vector<int>, int>> sig(n_);
            for (int v = 0; v < n_; ++v) {
                std::vector<int> s{colour[v]};
                std::vector<int> nb;
                for (int u = 0; u < n_; ++u)
                    if (u != v) nb.push_back(elabel_[v][u] * (n_ + 1) + colour[u]);
                std::sort(nb.begin(), nb.end());
                s.insert(s.end(), nb.begin(), nb.end());
                sig[v] = {std::move(s), v};
            }
            std::vector<std::vector<int>> keys;
            for (auto& s : sig) keys.push_back(s.first);
            std::sort(keys.begin(), keys.end());
            keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
            for (int v = 0; v < n_; ++v)
                colour[v] = static_cast<int>(std::lower_bound(keys.begin(), keys.end(), sig[v].first) - keys.begin());
            int now = num_classes(colour);
            if (now == classes) return;
            classes = now;
        }
    }

    static int num_classes(const std::vector<int>& colour) {
        std::vector<int> s = colour;
        std::sort(s.begin(), s.end());
        return static_cast<int>(std::unique(s.begin(), s.end()) - s.begin());
    }

    void search(const std::vector<int>& colour) {
        if (leaves_ >= kLeafBudget) return;
        // Smallest colour shared by more than one vertex.
        std::vector<int> count(n_, 0);
        for (int c : colour) ++count[c];
        int target = -1;
        for (int c = 0; c < n_; ++c)
            if (count[c] > 1) {
                target = c;
                break;
            }
        if (target < 0) {
            ++leaves_;
            std::string s = render(colour);
            if (best_.empty() || s < best_) best_ = std::move(s);
            return;
        }
        for (int v = 0; v < n_; ++v) {
            if (colour[v] != target) continue;
            std::vector<int> next(n_);
            for (int u = 0; u < n_; ++u) next[u] = 2 * colour[u] + ((colour[u] == target && u != v) ? 1 : 0);
            rank(next);
            refine(next);
            search(next);
        }
    }

    std::string render(const std::vector<int>& colour) const {
        std::vector<int> order(n_);
        for (int v = 0; v < n_; ++v) order[colour[v]] = v;
        std::string s;
        for (int i = 0; i < n_; ++i) s += std::to_string(vlabel_[order[i]]) + ",";
        s += "/";
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j) s += std::to_string(elabel_[order[i]][order[j]]) + ",";
        return s;
    }

    std::vector<int> vlabel_;
    std::vector<std::vector<int>> elabel_;
    int n_;
    int leaves_ = 0;
    std::string best_;
};

// Canonical text of a cell graph with symbolic variables renamed
// by perm.
std::string graph_text(const CellGraph& g, const std::vector<int>& perm) {
    const std::size_t p = g.size();
    std::vector<std::string> vtext(p);
    std::vector<std::vector<std::string>> etext(p, std::vector<std::string>(p));
    for (std::size_t i = 0; i < p; ++i) {
        vtext[i] = g.w[i].permuted(perm).to_string() + "|" + g.r[i][i].permuted(perm).to_string();
        for (std::size_t j = 0; j < p; ++j)
            if (i != j) etext[i][j] = g.r[i][j].permuted(perm).to_string();
    }
    std::vector<std::string> vdict(vtext), edict;
    std::sort(vdict.begin(), vdict.end());
    vdict.erase(std::unique(vdict.begin(), vdict.end()), vdict.end());
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j)
            if (i != j) edict.push_back(etext[i][j]);
    std::sort(edict.begin(), edict.end());
    edict.erase(std::unique(edict.begin(), edict.end()), edict.end());

    std::vector<int> vl(p);
    std::vector<std::vector<int>> el(p, std::vector<int>(p, 0));
    for (std::size_t i = 0; i < p; ++i) {
        vl[i] = static_cast<int>(std::lower_bound(vdict.begin(), vdict.end(), vtext[i]) - vdict.begin());
        for (std::size_t j = 0; j < p; ++j)
            if (i != j) el[i][j] = static_cast<int>(std::lower_bound(edict.begin(), edict.end(), etext[i][j]) - edict.begin());
    }

    std::string out = "V[";
    for (const auto& s : vdict) out += s + ";";
    out += "]E[";
    for (const auto& s : edict) out += s + ";";
    out += "]G[" + GraphCanonizer(std::move(vl), std::move(el)).canonical() + "]";
    return out;
}

std::string constraint_text(const std::vector<CardinalityConstraint>& cs, const std::vector<Polynomial>& multipliers,
                            const std::vector<int>& perm) {
    std::vector<std::string> parts;
    for (const auto& c : cs) {
        std::string m = c.var < static_cast<int>(multipliers.size()) ? multipliers[c.var].to_string() : "1";
        parts.push_back("x" + std::to_string(perm[c.var]) + "=" + std::to_string(c.a) + "n+" + std::to_string(c.b) +
                        "*" + m);
    }
    std::sort(parts.begin(), parts.end());
    parts.erase(std::unique(parts.begin(), parts.end()), parts.end());
    std::string out = "C[";
    for (const auto& s : parts) out += s + ";";
    return out + "]";
}

int vars_in(const std::vector<CardinalityConstraint>& cs) {
    int n = 0;
    for (const auto& c : cs) n = std::max(n, c.var + 1);
    return n;
}

}  // namespace

CanonicalKey cell_graph_key(const CellGraph& g) {
    ConditionedCellGraph cg;
    cg.constraints = g.constraints;
    cg.num_vars = vars_in(g.constraints);
    cg.multipliers.assign(cg.num_vars, Polynomial(1L));
    cg.branches.push_back({Polynomial(1L), g});
    return cell_graph_key(cg);
}

CanonicalKey cell_graph_key(const ConditionedCellGraph& cg) {
    std::vector<int> perm(cg.num_vars);
    std::iota(perm.begin(), perm.end(), 0);
    std::string best;
    bool have = false;
    do {
        // Branches with equal graphs are merged by summing their factors.
        std::map<std::string, Polynomial> merged;
        for (const auto& b : cg.branches) {
            if (b.graph.size() == 0) continue;
            merged[graph_text(b.graph, perm)] += b.factor.permuted(perm);
        }
        std::string text = constraint_text(cg.constraints, cg.multipliers, perm);
        for (const auto& [gt, factor] : merged)
            if (!factor.is_zero()) text += "B{" + factor.to_string() + "}" + gt;
        if (!have || text < best) {
            best = std::move(text);
            have = true;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return CanonicalKey{std::move(best)};
}

}  // namespace combspec
