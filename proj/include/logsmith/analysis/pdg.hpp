#pragma once

#include <set>

#include "logsmith/analysis/cfg.hpp"
#include "logsmith/analysis/postdom.hpp"

namespace logsmith::analysis {

// One dependence edge. Direction runs from the dependent node to the node it
// depends on, so walking `from → to` repeatedly answers "what does this
// statement rely on" — exactly the order a backward slice visits nodes.
struct PdgEdge {
    int from = 0;          // dependent node
    int to = 0;            // dependency
    std::string kind;      // "data" | "control"
    std::string var;       // variable for data edges
};

struct MethodPdg {
    Cfg cfg;
    PostDominators postdom;
    std::vector<PdgEdge> edges;
    std::vector<std::vector<int>> deps;  // deps[n]: nodes n depends on (deduped, sorted)

    void index_edges() {
        deps.assign(cfg.nodes.size(), {});
        for (const auto& e : edges) deps[static_cast<size_t>(e.from)].push_back(e.to);
        for (auto& v : deps) {
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
        }
    }
};

// Reaching definitions over (node, variable) pairs, keyed textually so field
// paths like `this.cache` participate like plain locals.
namespace detail {

struct DefSite {
    int node;
    std::string var;
};

}  // namespace detail

inline MethodPdg build_method_pdg(const MethodUnit& method) {
    MethodPdg pdg;
    pdg.cfg = build_cfg(method);
    const Cfg& cfg = pdg.cfg;
    size_t n = cfg.nodes.size();

    // --- data dependence: reaching definitions ---
    std::vector<detail::DefSite> defs;
    std::map<std::string, std::vector<size_t>> defs_of_var;  // var → def indices
    for (const auto& node : cfg.nodes)
        for (const auto& v : node.defs) {
            defs_of_var[v].push_back(defs.size());
            defs.push_back({node.id, v});
        }
    size_t nd = defs.size();

    std::vector<std::vector<bool>> gen(n, std::vector<bool>(nd, false));
    std::vector<std::vector<bool>> kill(n, std::vector<bool>(nd, false));
    for (size_t d = 0; d < nd; d++) {
        gen[static_cast<size_t>(defs[d].node)][d] = true;
        for (size_t other : defs_of_var[defs[d].var])
            if (other != d) kill[static_cast<size_t>(defs[d].node)][other] = true;
    }
    std::vector<std::vector<bool>> in(n, std::vector<bool>(nd, false));
    std::vector<std::vector<bool>> out(n, std::vector<bool>(nd, false));
    for (size_t i = 0; i < n; i++) out[i] = gen[i];
    bool changed = nd > 0;
    while (changed) {
        changed = false;
        for (size_t i = 0; i < n; i++) {
            std::vector<bool> next_in(nd, false);
            for (int p : cfg.nodes[i].preds) {
                const auto& po = out[static_cast<size_t>(p)];
                for (size_t d = 0; d < nd; d++)
                    if (po[d]) next_in[d] = true;
            }
            std::vector<bool> next_out = next_in;
            for (size_t d = 0; d < nd; d++) {
                if (kill[i][d]) next_out[d] = false;
                if (gen[i][d]) next_out[d] = true;
            }
            if (next_in != in[i] || next_out != out[i]) {
                in[i] = std::move(next_in);
                out[i] = std::move(next_out);
                changed = true;
            }
        }
    }
    std::set<std::tuple<int, int, std::string>> seen;
    for (const auto& node : cfg.nodes) {
        auto i = static_cast<size_t>(node.id);
        for (const auto& v : node.uses) {
            auto it = defs_of_var.find(v);
            if (it == defs_of_var.end()) continue;
            for (size_t d : it->second) {
                if (!in[i][d]) continue;
                if (defs[d].node == node.id) continue;
                if (seen.insert({node.id, defs[d].node, v}).second)
                    pdg.edges.push_back({node.id, defs[d].node, "data", v});
            }
        }
    }

    // --- control dependence (Ferrante/Ottenstein on the post-dominator sets):
    // w depends on u iff some edge u→v has w post-dominating v while w does
    // not strictly post-dominate u.
    pdg.postdom = compute_postdominators(cfg);
    std::set<std::pair<int, int>> cseen;
    for (const auto& u : cfg.nodes) {
        for (int v : u.succs) {
            for (size_t w = 0; w < n; w++) {
                if (!pdg.postdom.postdominates(static_cast<int>(w), v)) continue;
                if (pdg.postdom.strictly_postdominates(static_cast<int>(w), u.id)) continue;
                auto wi = static_cast<int>(w);
                if (wi == u.id) continue;
                if (cfg.nodes[w].is_entry || cfg.nodes[w].is_exit) continue;
                if (u.is_entry || u.is_exit) continue;
                if (cseen.insert({wi, u.id}).second)
                    pdg.edges.push_back({wi, u.id, "control", ""});
            }
        }
    }

    pdg.index_edges();
    return pdg;
}

}  // namespace logsmith::analysis
