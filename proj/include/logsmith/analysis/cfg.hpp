#pragma once

#include "logsmith/java/model.hpp"

namespace logsmith::analysis {

using java::CallSite;
using java::MethodUnit;
using java::Statement;
using java::StmtKind;

struct CfgNode {
    int id = 0;
    const Statement* stmt = nullptr;  // null for entry/exit
    int line = 0;                     // governing line (condition line for do-while)
    int end_line = 0;
    std::vector<int> succs;
    std::vector<int> preds;
    std::vector<std::string> defs;
    std::vector<std::string> uses;
    std::vector<CallSite> calls;
    bool is_entry = false;
    bool is_exit = false;
};

struct Cfg {
    std::vector<CfgNode> nodes;
    int entry = 0;
    int exit = 1;
    const MethodUnit* method = nullptr;

    int add_node(const Statement* st, int line, int end_line) {
        CfgNode n;
        n.id = static_cast<int>(nodes.size());
        n.stmt = st;
        n.line = line;
        n.end_line = end_line;
        if (st) {
            n.defs = st->defs;
            n.uses = st->uses;
            n.calls = st->calls;
        }
        nodes.push_back(std::move(n));
        return nodes.back().id;
    }

    void add_edge(int from, int to) {
        auto& s = nodes[static_cast<size_t>(from)].succs;
        if (std::find(s.begin(), s.end(), to) == s.end()) s.push_back(to);
        auto& p = nodes[static_cast<size_t>(to)].preds;
        if (std::find(p.begin(), p.end(), from) == p.end()) p.push_back(from);
    }
};

namespace detail {

struct CfgBuilder {
    Cfg cfg;
    std::vector<std::vector<int>*> break_targets;     // collect nodes jumping past loop
    std::vector<int> continue_targets;                // loop header node ids

    // Wires `froms` into `to`.
    void connect(const std::vector<int>& froms, int to) {
        for (int f : froms) cfg.add_edge(f, to);
    }

    // Builds a statement list; returns the set of open exits.
    std::vector<int> build_seq(const std::vector<Statement>& stmts, std::vector<int> in,
                               std::vector<int>* try_nodes) {
        for (const auto& st : stmts) {
            in = build_stmt(st, in, try_nodes);
        }
        return in;
    }

    std::vector<int> build_stmt(const Statement& st, std::vector<int> in,
                                std::vector<int>* try_nodes) {
        auto track = [&](int node) {
            if (try_nodes) try_nodes->push_back(node);
        };
        switch (st.kind) {
            case StmtKind::Block:
                return st.arms.empty() ? in : build_seq(st.arms[0], in, try_nodes);

            case StmtKind::If: {
                int cond = cfg.add_node(&st, st.start_line, st.header_end_line);
                track(cond);
                connect(in, cond);
                std::vector<int> out;
                std::vector<int> then_exits = build_seq(st.arms[0], {cond}, try_nodes);
                out.insert(out.end(), then_exits.begin(), then_exits.end());
                if (st.arms.size() >= 2) {
                    std::vector<int> else_exits = build_seq(st.arms[1], {cond}, try_nodes);
                    out.insert(out.end(), else_exits.begin(), else_exits.end());
                } else {
                    out.push_back(cond);  // fallthrough when the condition is false
                }
                return out;
            }

            case StmtKind::While: {
                int cond = cfg.add_node(&st, st.start_line, st.header_end_line);
                track(cond);
                connect(in, cond);
                std::vector<int> breaks;
                break_targets.push_back(&breaks);
                continue_targets.push_back(cond);
                std::vector<int> body_exits = build_seq(st.arms[0], {cond}, try_nodes);
                continue_targets.pop_back();
                break_targets.pop_back();
                connect(body_exits, cond);
                std::vector<int> out = {cond};
                out.insert(out.end(), breaks.begin(), breaks.end());
                return out;
            }

            case StmtKind::For:
            case StmtKind::ForEach: {
                int header = cfg.add_node(&st, st.start_line, st.header_end_line);
                track(header);
                connect(in, header);
                std::vector<int> breaks;
                break_targets.push_back(&breaks);
                continue_targets.push_back(header);
                std::vector<int> body_exits = build_seq(st.arms[0], {header}, try_nodes);
                continue_targets.pop_back();
                break_targets.pop_back();
                connect(body_exits, header);
                std::vector<int> out = {header};
                out.insert(out.end(), breaks.begin(), breaks.end());
                return out;
            }

            case StmtKind::DoWhile: {
                // the condition node sits after the body but is the loop header
                int cond = cfg.add_node(&st, st.header_end_line, st.header_end_line);
                track(cond);
                std::vector<int> breaks;
                break_targets.push_back(&breaks);
                continue_targets.push_back(cond);
                // body entry: first node of body; build with a placeholder join
                std::vector<int> body_entry_preds = in;
                body_entry_preds.push_back(cond);
                std::vector<int> body_exits = build_seq(st.arms[0], body_entry_preds, try_nodes);
                continue_targets.pop_back();
                break_targets.pop_back();
                connect(body_exits, cond);
                std::vector<int> out = {cond};
                out.insert(out.end(), breaks.begin(), breaks.end());
                return out;
            }

            case StmtKind::Try: {
                int header = cfg.add_node(&st, st.start_line, st.header_end_line);
                track(header);
                connect(in, header);
                std::vector<int> body_nodes;  // every node inside the try body
                body_nodes.push_back(header); // resource acquisition can throw
                std::vector<int> exits;
                std::vector<int> try_exits;
                size_t finally_idx = SIZE_MAX;
                for (size_t i = 0; i < st.arm_info.size(); i++)
                    if (st.arm_info[i].label == "finally") finally_idx = i;
                for (size_t i = 0; i < st.arm_info.size(); i++) {
                    if (st.arm_info[i].label == "try")
                        try_exits = build_seq(st.arms[i], {header}, &body_nodes);
                }
                exits.insert(exits.end(), try_exits.begin(), try_exits.end());
                for (size_t i = 0; i < st.arm_info.size(); i++) {
                    if (st.arm_info[i].label != "catch") continue;
                    // first statement is the synthetic CatchHeader
                    std::vector<int> catch_in;
                    std::vector<int> catch_exits = build_seq(st.arms[i], catch_in, try_nodes);
                    // locate the entry node just created for this catch arm
                    int catch_entry = -1;
                    for (const auto& n : cfg.nodes)
                        if (n.stmt && n.stmt->kind == StmtKind::CatchHeader &&
                            n.stmt == &st.arms[i][0])
                            catch_entry = n.id;
                    if (catch_entry >= 0)
                        for (int bn : body_nodes) cfg.add_edge(bn, catch_entry);
                    exits.insert(exits.end(), catch_exits.begin(), catch_exits.end());
                }
                // nodes of this try body are also part of any enclosing try body
                if (try_nodes)
                    for (int bn : body_nodes) try_nodes->push_back(bn);
                if (finally_idx != SIZE_MAX) {
                    std::vector<int> fin_exits = build_seq(st.arms[finally_idx], exits, try_nodes);
                    return fin_exits;
                }
                return exits;
            }

            case StmtKind::Return:
            case StmtKind::Throw: {
                int node = cfg.add_node(&st, st.start_line, st.end_line);
                track(node);
                connect(in, node);
                cfg.add_edge(node, cfg.exit);
                return {};
            }

            case StmtKind::Break: {
                int node = cfg.add_node(&st, st.start_line, st.end_line);
                track(node);
                connect(in, node);
                if (!break_targets.empty()) break_targets.back()->push_back(node);
                else cfg.add_edge(node, cfg.exit);
                return {};
            }

            case StmtKind::Continue: {
                int node = cfg.add_node(&st, st.start_line, st.end_line);
                track(node);
                connect(in, node);
                if (!continue_targets.empty()) cfg.add_edge(node, continue_targets.back());
                else cfg.add_edge(node, cfg.exit);
                return {};
            }

            case StmtKind::Empty:
                return in;

            default: {  // Expr, LocalDecl, Switch, Assert, Synchronized, CatchHeader
                int node = cfg.add_node(&st, st.start_line, st.end_line);
                track(node);
                connect(in, node);
                if (st.kind == StmtKind::Synchronized && !st.arms.empty()) {
                    std::vector<int> body_exits = build_seq(st.arms[0], {node}, try_nodes);
                    return body_exits;
                }
                return {node};
            }
        }
    }
};

}  // namespace detail

// Builds the control-flow graph of one method body. Node 0 is the synthetic
// entry (defining the parameters), node 1 the exit; every statement node that
// can throw inside a try body has an edge to each catch entry.
inline Cfg build_cfg(const MethodUnit& method) {
    detail::CfgBuilder b;
    b.cfg.method = &method;
    int entry = b.cfg.add_node(nullptr, method.decl_line, method.decl_line);
    b.cfg.nodes[static_cast<size_t>(entry)].is_entry = true;
    int exit = b.cfg.add_node(nullptr, method.body_end_line, method.body_end_line);
    b.cfg.nodes[static_cast<size_t>(exit)].is_exit = true;
    b.cfg.entry = entry;
    b.cfg.exit = exit;
    for (const auto& p : method.params)
        b.cfg.nodes[static_cast<size_t>(entry)].defs.push_back(p.name);

    std::vector<int> exits = b.build_seq(method.body, {entry}, nullptr);
    for (int e : exits) b.cfg.add_edge(e, exit);
    // dead ends (e.g. all paths return) keep postdominance well-defined
    for (auto& n : b.cfg.nodes)
        if (!n.is_exit && n.succs.empty()) b.cfg.add_edge(n.id, exit);
    return b.cfg;
}

// Picks the CFG node a source line refers to: the tightest statement node
// covering the line, falling back to the governing composite header (so a
// bare `} else {` resolves to its if condition). `degenerate` is set when the
// line hits no statement at all and the entry node is returned.
inline int select_node_for_line(const Cfg& cfg, int line, bool* degenerate = nullptr) {
    if (degenerate) *degenerate = false;
    int best = -1, best_span = INT32_MAX;
    for (const auto& n : cfg.nodes) {
        if (n.is_entry || n.is_exit) continue;
        if (line < n.line || line > n.end_line) continue;
        int span = n.end_line - n.line;
        if (span < best_span || (span == best_span && best >= 0 &&
                                 n.line > cfg.nodes[static_cast<size_t>(best)].line)) {
            best = n.id;
            best_span = span;
        }
    }
    if (best >= 0) return best;
    // composite fallback: innermost composite statement whose whole span covers it
    best_span = INT32_MAX;
    for (const auto& n : cfg.nodes) {
        if (!n.stmt) continue;
        int lo = n.stmt->start_line, hi = n.stmt->end_line;
        if (line < lo || line > hi) continue;
        int span = hi - lo;
        if (span < best_span) {
            best = n.id;
            best_span = span;
        }
    }
    if (best >= 0) return best;
    // nearest preceding statement node
    for (const auto& n : cfg.nodes) {
        if (n.is_entry || n.is_exit || n.line > line) continue;
        if (best < 0 || n.line >= cfg.nodes[static_cast<size_t>(best)].line) best = n.id;
    }
    if (best >= 0) return best;
    if (degenerate) *degenerate = true;
    return cfg.entry;
}

}  // namespace logsmith::analysis
