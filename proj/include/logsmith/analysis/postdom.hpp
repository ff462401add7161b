#pragma once

#include "logsmith/analysis/cfg.hpp"

namespace logsmith::analysis {

// Post-dominator sets, computed by the iterative dataflow scheme:
//   pdom(exit) = {exit};  pdom(n) = {n} ∪ ⋂ over successors s of pdom(s).
// Sets are reflexive. Nodes that cannot reach the exit keep the full set
// (vacuous intersection), which the CFG builder prevents by wiring dead ends
// to the exit.
struct PostDominators {
    std::vector<std::vector<bool>> sets;  // sets[n][w]: w post-dominates n

    bool postdominates(int w, int n) const {
        return sets[static_cast<size_t>(n)][static_cast<size_t>(w)];
    }
    bool strictly_postdominates(int w, int n) const { return w != n && postdominates(w, n); }
};

inline PostDominators compute_postdominators(const Cfg& cfg) {
    size_t n = cfg.nodes.size();
    PostDominators pd;
    pd.sets.assign(n, std::vector<bool>(n, true));
    auto exit = static_cast<size_t>(cfg.exit);
    pd.sets[exit].assign(n, false);
    pd.sets[exit][exit] = true;

    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i = 0; i < n; i++) {
            if (i == exit) continue;
            const auto& succs = cfg.nodes[i].succs;
            std::vector<bool> next(n, !succs.empty());
            for (int s : succs) {
                const auto& ss = pd.sets[static_cast<size_t>(s)];
                for (size_t w = 0; w < n; w++) next[w] = next[w] && ss[w];
            }
            next[i] = true;
            if (next != pd.sets[i]) {
                pd.sets[i] = std::move(next);
                changed = true;
            }
        }
    }
    return pd;
}

}  // namespace logsmith::analysis
