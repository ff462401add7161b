#pragma once

#include <deque>

#include "logsmith/analysis/callgraph.hpp"
#include "logsmith/analysis/pdg.hpp"

namespace logsmith::analysis {

// Node identity across the whole project.
struct NodeKey {
    std::string method;
    int node = 0;
    bool operator<(const NodeKey& o) const {
        return method != o.method ? method < o.method : node < o.node;
    }
    bool operator==(const NodeKey& o) const { return method == o.method && node == o.node; }
};

struct ProjectPdg {
    const java::CodeModel* model = nullptr;
    std::map<std::string, MethodPdg> methods;
    CallGraph callgraph;
    // inter-procedural dependence adjacency, dependent → dependency
    std::map<NodeKey, std::vector<std::pair<NodeKey, std::string>>> inter;
};

// Builds per-method dependence graphs plus the parameter/return binding edges
// that connect them:
//  - call_return: a call site depends on each return statement of the callee;
//  - call_param:  a callee's entry (parameter definitions) depends on every
//    call site that supplies the arguments.
inline ProjectPdg build_project_pdg(const java::CodeModel& model) {
    ProjectPdg p;
    p.model = &model;
    for (const auto& m : model.methods) {
        if (m.body_end_line == 0) continue;  // abstract: nothing to analyze
        p.methods.emplace(m.id, build_method_pdg(m));
    }
    p.callgraph = build_call_graph(model);

    for (auto& [caller_id, pdg] : p.methods) {
        for (const auto& node : pdg.cfg.nodes) {
            for (const auto& call : node.calls) {
                for (const auto& callee_id : resolve_call(model, call)) {
                    auto it = p.methods.find(callee_id);
                    if (it == p.methods.end() || callee_id == caller_id) continue;
                    const MethodPdg& callee = it->second;
                    NodeKey call_key{caller_id, node.id};
                    // call site depends on what the callee returns
                    for (const auto& cn : callee.cfg.nodes)
                        if (cn.stmt && cn.stmt->kind == java::StmtKind::Return)
                            p.inter[call_key].push_back({{callee_id, cn.id}, "call_return"});
                    // callee parameters depend on the arguments at this site
                    NodeKey entry_key{callee_id, callee.cfg.entry};
                    p.inter[entry_key].push_back({call_key, "call_param"});
                }
            }
        }
    }
    for (auto& [k, v] : p.inter) {
        std::sort(v.begin(), v.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    return p;
}

struct SliceNode {
    std::string method;
    int node = 0;
    int line = 0;
    int hops = 0;
};

struct Slice {
    NodeKey seed;
    int hop_cap = 0;
    bool degenerate = false;           // seed line resolved to no real statement
    std::vector<SliceNode> nodes;      // BFS discovery order, seed first
    std::vector<std::string> method_order;  // methods by first appearance
};

// Backward slice: repeatedly follow dependence edges (dependent → dependency)
// from the seed, each edge costing one hop, up to hop_cap hops.
inline Slice backward_slice(const ProjectPdg& p, const NodeKey& seed, int hop_cap) {
    Slice out;
    out.seed = seed;
    out.hop_cap = hop_cap;
    auto seed_it = p.methods.find(seed.method);
    if (seed_it == p.methods.end())
        throw Error("bad_slice_seed", "unknown method '" + seed.method + "'");

    std::map<NodeKey, int> dist;
    std::deque<NodeKey> frontier;
    dist[seed] = 0;
    frontier.push_back(seed);
    while (!frontier.empty()) {
        NodeKey cur = frontier.front();
        frontier.pop_front();
        int d = dist[cur];
        if (d >= hop_cap) continue;
        const MethodPdg& pdg = p.methods.at(cur.method);
        for (int dep : pdg.deps[static_cast<size_t>(cur.node)]) {
            NodeKey nk{cur.method, dep};
            if (!dist.count(nk)) {
                dist[nk] = d + 1;
                frontier.push_back(nk);
            }
        }
        if (auto it = p.inter.find(cur); it != p.inter.end()) {
            for (const auto& [nk, kind] : it->second) {
                if (!dist.count(nk)) {
                    dist[nk] = d + 1;
                    frontier.push_back(nk);
                }
            }
        }
    }

    // report in BFS hop order, then method/node for determinism
    std::vector<std::pair<int, NodeKey>> ordered;
    for (const auto& [k, d] : dist) ordered.push_back({d, k});
    std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second < b.second;
    });
    for (const auto& [d, k] : ordered) {
        const MethodPdg& pdg = p.methods.at(k.method);
        const CfgNode& node = pdg.cfg.nodes[static_cast<size_t>(k.node)];
        out.nodes.push_back({k.method, k.node, node.line, d});
        if (std::find(out.method_order.begin(), out.method_order.end(), k.method) ==
            out.method_order.end())
            out.method_order.push_back(k.method);
    }
    return out;
}

// Resolves "the statement an inserted line would follow" to a slice seed:
// finds the method covering `line` in `file`, then the tightest CFG node.
inline NodeKey select_slice_entry(const ProjectPdg& p, const std::string& file, int line,
                                  bool* degenerate = nullptr) {
    const java::MethodUnit* best = nullptr;
    for (const auto& m : p.model->methods) {
        if (m.file != file || m.body_end_line == 0) continue;
        if (line < m.decl_line || line > m.body_end_line) continue;
        if (!best || m.decl_line > best->decl_line) best = &m;
    }
    if (!best) throw Error("bad_slice_seed",
                           file + ":" + std::to_string(line) + " is not inside any method");
    const MethodPdg& pdg = p.methods.at(best->id);
    bool degen = false;
    int node = select_node_for_line(pdg.cfg, line, &degen);
    if (degenerate) *degenerate = degen;
    return {best->id, node};
}

// Renders the sliced statements grouped by method, lines ascending — the
// order they would execute within each method.
inline std::string render_slice(const ProjectPdg& p, const Slice& slice) {
    std::string out;
    for (const auto& mid : slice.method_order) {
        const java::MethodUnit* m = p.model->method(mid);
        if (!m) continue;
        const java::SourceUnit* unit = p.model->file(m->file);
        out += "method " + mid + ":\n";
        std::vector<const SliceNode*> rows;
        for (const auto& sn : slice.nodes)
            if (sn.method == mid) rows.push_back(&sn);
        std::sort(rows.begin(), rows.end(), [](const SliceNode* a, const SliceNode* b) {
            if (a->line != b->line) return a->line < b->line;
            return a->node < b->node;
        });
        std::set<int> lines_done;
        for (const auto* sn : rows) {
            const CfgNode& node = p.methods.at(mid).cfg.nodes[static_cast<size_t>(sn->node)];
            if (node.is_entry) {
                out += "  (entry) " + m->signature + "\n";
                continue;
            }
            if (node.is_exit || !unit) continue;
            if (!lines_done.insert(sn->line).second) continue;
            out += "  " + std::to_string(sn->line) + ": " + trim(unit->line_text(sn->line)) + "\n";
        }
    }
    return out;
}

// GraphViz rendering of the dependence edges inside one method plus the
// inter-procedural edges touching it.
inline std::string pdg_to_dot(const ProjectPdg& p, const std::string& method_id) {
    auto it = p.methods.find(method_id);
    if (it == p.methods.end()) throw Error("bad_slice_seed", "unknown method '" + method_id + "'");
    const MethodPdg& pdg = it->second;
    const java::MethodUnit* m = p.model->method(method_id);
    const java::SourceUnit* unit = m ? p.model->file(m->file) : nullptr;
    std::string out = "digraph pdg {\n  rankdir=BT;\n  node [shape=box, fontname=\"monospace\"];\n";
    auto esc = [](std::string s) {
        std::string r;
        for (char ch : s) {
            if (ch == '"' || ch == '\\') r += '\\';
            r += ch;
        }
        return r;
    };
    for (const auto& node : pdg.cfg.nodes) {
        std::string label;
        if (node.is_entry) label = "entry";
        else if (node.is_exit) label = "exit";
        else if (unit) label = std::to_string(node.line) + ": " + trim(unit->line_text(node.line));
        out += "  n" + std::to_string(node.id) + " [label=\"" + esc(label) + "\"];\n";
    }
    for (const auto& e : pdg.edges) {
        out += "  n" + std::to_string(e.from) + " -> n" + std::to_string(e.to);
        out += e.kind == "control" ? " [style=dashed, label=\"ctrl\"]"
                                   : " [label=\"" + esc(e.var) + "\"]";
        out += ";\n";
    }
    int ext = 0;
    std::map<std::string, std::string> ext_ids;
    auto dot_name = [&](const NodeKey& k) {
        if (k.method == method_id) return "n" + std::to_string(k.node);
        std::string key = k.method + "#" + std::to_string(k.node);
        auto found = ext_ids.find(key);
        if (found != ext_ids.end()) return found->second;
        std::string id = "x" + std::to_string(ext++);
        ext_ids[key] = id;
        out += "  " + id + " [label=\"" + esc(key) + "\", style=dotted];\n";
        return id;
    };
    for (const auto& [key, targets] : p.inter) {
        for (const auto& [to, kind] : targets) {
            if (key.method != method_id && to.method != method_id) continue;
            std::string from_name = dot_name(key);
            std::string to_name = dot_name(to);
            out += "  " + from_name + " -> " + to_name + " [color=blue, label=\"" + kind + "\"];\n";
        }
    }
    out += "}\n";
    return out;
}

}  // namespace logsmith::analysis
