#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "logsmith/analysis/callgraph.hpp"
#include "logsmith/analysis/pdg.hpp"
#include "logsmith/common.hpp"
#include "logsmith/java/blocks.hpp"
#include "logsmith/java/logging.hpp"
#include "logsmith/java/model.hpp"

namespace logsmith::refine {

struct DedupOptions {
    double jaccard_threshold = 0.7;
    std::vector<std::string> start_markers = {"start", "starting", "begin", "beginning",
                                              "initiating"};
    std::vector<std::string> end_markers = {"finished", "completed", "done", "ended",
                                            "succeeded"};
};

// ---- message equivalence ----

// Lowercased word tokens with {} placeholders and punctuation stripped.
inline std::set<std::string> message_tokens(const std::string& message) {
    std::string cleaned;
    cleaned.reserve(message.size());
    for (size_t i = 0; i < message.size(); i++) {
        if (message[i] == '{' && i + 1 < message.size() && message[i + 1] == '}') {
            cleaned += ' ';
            i++;
            continue;
        }
        char c = message[i];
        if (std::isalnum(static_cast<unsigned char>(c)))
            cleaned += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        else
            cleaned += ' ';
    }
    std::set<std::string> tokens;
    for (const auto& t : split(cleaned, ' '))
        if (!t.empty()) tokens.insert(t);
    return tokens;
}

inline double token_jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) return 1.0;
    size_t common = 0;
    for (const auto& t : a)
        if (b.count(t)) common++;
    size_t united = a.size() + b.size() - common;
    return united == 0 ? 1.0 : static_cast<double>(common) / static_cast<double>(united);
}

inline bool message_equivalent(const std::string& a, const std::string& b,
                               double threshold = 0.7) {
    return token_jaccard(message_tokens(a), message_tokens(b)) >= threshold;
}

// ---- outcome types ----

struct DedupEntry {
    java::LogStatement removed_log;
    std::string rule;  // throw | if-else | start-end | shared-var | proximity
    std::string counterpart;

    nlohmann::json to_json() const {
        return nlohmann::json{
            {"removed_log", removed_log}, {"rule", rule}, {"counterpart", counterpart}};
    }
};

struct DedupOutcome {
    std::map<std::string, std::string> files;   // augmented text with removals applied
    std::vector<java::LogStatement> surviving;  // line numbers valid in `files`
    std::vector<int> surviving_index;           // surviving[i] == predicted[surviving_index[i]]
    std::vector<DedupEntry> report;
    Diagnostics diagnostics;
};

namespace detail {

// One log statement in the augmented source, developer-written or predicted.
struct LogSite {
    const java::MethodUnit* method = nullptr;
    std::string file;
    int line = 0;
    std::string level;
    std::string message;
    std::vector<std::string> variables;
    bool predicted = false;
    int predicted_index = -1;
    bool removed = false;
};

inline std::string describe(const LogSite& s) {
    return s.file + ":" + std::to_string(s.line) + " " + s.level + " \"" + s.message + "\"";
}

// Leading identifier of a variable expression: `user.getName()` → `user`.
inline std::string base_identifier(const std::string& expr) {
    size_t i = 0;
    while (i < expr.size() &&
           (std::isalnum(static_cast<unsigned char>(expr[i])) || expr[i] == '_' ||
            expr[i] == '$'))
        i++;
    return expr.substr(0, i);
}

inline bool mentions_identifier(const std::string& text, const std::string& name) {
    if (name.empty()) return false;
    size_t pos = 0;
    while ((pos = text.find(name, pos)) != std::string::npos) {
        bool left_ok = pos == 0 || !(std::isalnum(static_cast<unsigned char>(text[pos - 1])) ||
                                     text[pos - 1] == '_' || text[pos - 1] == '$');
        size_t after = pos + name.size();
        bool right_ok = after >= text.size() ||
                        !(std::isalnum(static_cast<unsigned char>(text[after])) ||
                          text[after] == '_' || text[after] == '$');
        if (left_ok && right_ok) return true;
        pos += name.size();
    }
    return false;
}

// CFG node whose span covers `line`, preferring an exact single-line match.
inline int node_at(const analysis::Cfg& cfg, int line) {
    int best = -1, best_span = 0;
    for (const auto& n : cfg.nodes) {
        if (n.is_entry || n.is_exit || n.line == 0) continue;
        if (line < n.line || line > n.end_line) continue;
        int span = n.end_line - n.line;
        if (best < 0 || span < best_span) {
            best = n.id;
            best_span = span;
        }
    }
    return best;
}

// Whether `line` lies in the try region of some try statement of `method`,
// and if so whether any of that statement's catch arms prints its parameter.
struct CatchScan {
    bool caught = false;
    bool printed = false;
};

inline bool arm_prints_param(const java::CodeModel& model, const java::MethodUnit& method,
                             const java::Arm& arm) {
    if (arm.param.empty()) return false;
    const java::ClassInfo* cls = model.class_of(method.class_id);
    bool found = false;
    java::visit_statements(method.body, [&](const java::Statement& st) {
        if (found || st.start_line < arm.start_line || st.end_line > arm.end_line) return;
        if (!mentions_identifier(st.text, arm.param)) return;
        if (java::match_log_statement(st, cls) != nullptr ||
            st.text.find("printStackTrace") != std::string::npos ||
            st.text.find("System.out.print") != std::string::npos ||
            st.text.find("System.err.print") != std::string::npos)
            found = true;
    });
    return found;
}

inline CatchScan enclosing_catches(const java::CodeModel& model, const java::MethodUnit& method,
                                   int line) {
    CatchScan scan;
    java::visit_statements(method.body, [&](const java::Statement& st) {
        if (st.kind != java::StmtKind::Try) return;
        bool in_try = false;
        for (const auto& arm : st.arm_info)
            if (arm.label == "try" && line >= arm.start_line && line <= arm.end_line)
                in_try = true;
        if (!in_try) return;
        for (const auto& arm : st.arm_info) {
            if (arm.label != "catch") continue;
            scan.caught = true;
            if (arm_prints_param(model, method, arm)) scan.printed = true;
        }
    });
    return scan;
}

// Message template conveyed by a throw statement, traced to literal origins.
// Unresolvable origins yield nullopt, which keeps the log (conservative).
inline std::optional<std::string> throw_message(const java::CodeModel& model,
                                                const std::vector<const java::MethodUnit*>& bundle,
                                                const java::MethodUnit& method,
                                                const java::Statement& th,
                                                const analysis::MethodPdg& pdg) {
    const java::CallSite* ctor = nullptr;
    for (const auto& c : th.calls)
        if (c.is_constructor) {
            ctor = &c;
            break;
        }
    if (!ctor || ctor->arg_texts.empty()) return std::nullopt;

    auto fold_literal = [](const std::string& expr) -> std::optional<std::string> {
        auto parts = java::detail::split_concat(expr);
        bool any_literal = false;
        std::string tmpl;
        for (const auto& p : parts) {
            if (java::detail::is_string_literal(p)) {
                tmpl += java::detail::unquote(p);
                any_literal = true;
            } else if (!p.empty()) {
                tmpl += "{}";
            }
        }
        if (!any_literal) return std::nullopt;
        return tmpl;
    };

    const std::string& arg = trim(ctor->arg_texts[0]);
    if (auto folded = fold_literal(arg)) return folded;

    // A bare identifier: chase its definitions.
    std::string name = base_identifier(arg);
    if (name.empty() || name != arg) return std::nullopt;

    // Local definition reaching the throw, unique and literal-valued.
    int throw_node = node_at(pdg.cfg, th.start_line);
    if (throw_node >= 0) {
        std::optional<std::string> resolved;
        bool ambiguous = false;
        for (const auto& e : pdg.edges) {
            if (e.from != throw_node || e.kind != "data" || e.var != name) continue;
            const auto& def_node = pdg.cfg.nodes[static_cast<size_t>(e.to)];
            if (def_node.is_entry) continue;  // parameter: handled below
            std::optional<std::string> lit;
            if (def_node.stmt) {
                const std::string& text = def_node.stmt->text;
                auto eq = text.find('=');
                if (eq != std::string::npos) {
                    std::string rhs = trim(text.substr(eq + 1));
                    if (!rhs.empty() && rhs.back() == ';') rhs.pop_back();
                    lit = fold_literal(rhs);
                }
            }
            if (!lit) return std::nullopt;  // non-literal definition reaches the throw
            if (resolved && *resolved != *lit) ambiguous = true;
            resolved = lit;
        }
        if (resolved && !ambiguous) return resolved;
        if (resolved && ambiguous) return std::nullopt;
    }

    // A parameter of the throwing method: all in-bundle call sites must pass
    // the same literal.
    bool is_param = false;
    size_t param_pos = 0;
    for (size_t i = 0; i < method.params.size(); i++)
        if (method.params[i].name == name) {
            is_param = true;
            param_pos = i;
        }
    if (!is_param) return std::nullopt;

    std::optional<std::string> resolved;
    for (const auto* caller : bundle) {
        bool miss = false;
        java::visit_statements(caller->body, [&](const java::Statement& st) {
            for (const auto& c : st.calls) {
                if (c.name != method.name ||
                    c.arity != static_cast<int>(method.params.size()))
                    continue;
                if (param_pos >= c.arg_texts.size()) continue;
                auto lit = fold_literal(trim(c.arg_texts[param_pos]));
                if (!lit) {
                    miss = true;
                } else if (resolved && *resolved != *lit) {
                    miss = true;
                } else {
                    resolved = lit;
                }
            }
        });
        if (miss) return std::nullopt;
    }
    return resolved;
}

}  // namespace detail

// Applies the five redundancy rules, in fixed order, to every Code Context
// Bundle (target method plus 1-hop callers and callees). Only predicted logs
// are ever removed; developer logs act as context. One pass reaches the
// fixpoint: a removed log cannot make another pair fire again.
inline DedupOutcome deduplicate(const java::CodeModel& model,
                                const std::vector<java::LogStatement>& predicted,
                                const DedupOptions& opts = {}) {
    DedupOutcome out;

    // --- collect every log site in the augmented source ---
    std::vector<detail::LogSite> sites;
    std::map<std::string, std::vector<size_t>> sites_by_method;
    std::map<std::string, int> predicted_at;  // "file:line" → predicted index
    for (size_t i = 0; i < predicted.size(); i++)
        predicted_at[predicted[i].file + ":" + std::to_string(predicted[i].line)] =
            static_cast<int>(i);

    for (const auto& method : model.methods) {
        const java::ClassInfo* cls = model.class_of(method.class_id);
        java::visit_statements(method.body, [&](const java::Statement& st) {
            const java::CallSite* call = java::match_log_statement(st, cls);
            if (!call) return;
            detail::LogSite site;
            site.method = &method;
            site.file = method.file;
            site.line = st.start_line;
            auto hit = predicted_at.find(site.file + ":" + std::to_string(st.start_line));
            if (hit != predicted_at.end()) {
                const auto& p = predicted[static_cast<size_t>(hit->second)];
                site.predicted = true;
                site.predicted_index = hit->second;
                site.level = p.level;
                site.message = p.message;
                site.variables = p.variables;
            } else {
                java::LogStatement derived;
                site.level = java::canonical_level(call->name);
                java::fold_log_arguments(*call, derived);
                site.message = derived.message;
                site.variables = derived.variables;
            }
            sites_by_method[method.id].push_back(sites.size());
            sites.push_back(std::move(site));
        });
    }
    for (size_t i = 0; i < predicted.size(); i++) {
        bool found = false;
        for (const auto& s : sites)
            if (s.predicted_index == static_cast<int>(i)) found = true;
        if (!found)
            diag(out.diagnostics, "dedup",
                 "predicted log not found in augmented source: " + predicted[i].file + ":" +
                     std::to_string(predicted[i].line));
    }

    analysis::CallGraph graph = analysis::build_call_graph(model);
    std::map<std::string, analysis::MethodPdg> pdg_cache;
    auto pdg_of = [&](const java::MethodUnit& m) -> const analysis::MethodPdg& {
        auto it = pdg_cache.find(m.id);
        if (it == pdg_cache.end())
            it = pdg_cache.emplace(m.id, analysis::build_method_pdg(m)).first;
        return it->second;
    };

    auto equivalent = [&](const detail::LogSite& a, const detail::LogSite& b) {
        return message_equivalent(a.message, b.message, opts.jaccard_threshold);
    };
    auto shares_variable = [&](const detail::LogSite& a, const detail::LogSite& b) {
        for (const auto& va : a.variables)
            for (const auto& vb : b.variables)
                if (remove_whitespace(va) == remove_whitespace(vb)) return true;
        return false;
    };
    auto remove_site = [&](detail::LogSite& loser, const std::string& rule,
                           const std::string& counterpart) {
        loser.removed = true;
        DedupEntry entry;
        entry.removed_log = predicted[static_cast<size_t>(loser.predicted_index)];
        entry.rule = rule;
        entry.counterpart = counterpart;
        out.report.push_back(std::move(entry));
    };

    // --- bundles, in deterministic method order ---
    std::vector<std::string> targets;
    for (const auto& [method_id, indices] : sites_by_method) {
        for (size_t idx : indices)
            if (sites[idx].predicted) {
                targets.push_back(method_id);
                break;
            }
    }

    for (const auto& target_id : targets) {
        const java::MethodUnit* target = model.method(target_id);
        if (!target) continue;

        std::vector<const java::MethodUnit*> bundle{target};
        std::set<std::string> bundle_ids{target_id};
        for (const auto* e : graph.calls_from(target_id))
            if (bundle_ids.insert(e->callee).second)
                if (const auto* m = model.method(e->callee)) bundle.push_back(m);
        for (const auto* e : graph.calls_to(target_id))
            if (bundle_ids.insert(e->caller).second)
                if (const auto* m = model.method(e->caller)) bundle.push_back(m);

        // Live sites of the bundle, target-method sites first by line.
        auto bundle_site_indices = [&]() {
            std::vector<size_t> indices;
            for (const auto* m : bundle) {
                auto it = sites_by_method.find(m->id);
                if (it == sites_by_method.end()) continue;
                for (size_t idx : it->second)
                    if (!sites[idx].removed) indices.push_back(idx);
            }
            std::sort(indices.begin(), indices.end(), [&](size_t x, size_t y) {
                if (sites[x].file != sites[y].file) return sites[x].file < sites[y].file;
                return sites[x].line < sites[y].line;
            });
            return indices;
        };

        // -- rule 1: throw --
        {
            struct ThrowInfo {
                const java::MethodUnit* method;
                const java::Statement* stmt;
                std::string message;
            };
            std::vector<ThrowInfo> throws_seen;
            for (const auto* m : bundle) {
                java::visit_statements(m->body, [&](const java::Statement& st) {
                    if (st.kind != java::StmtKind::Throw) return;
                    auto msg = detail::throw_message(model, bundle, *m, st, pdg_of(*m));
                    if (msg) throws_seen.push_back({m, &st, *msg});
                });
            }
            auto it = sites_by_method.find(target_id);
            if (it != sites_by_method.end()) {
                for (size_t idx : it->second) {
                    auto& site = sites[idx];
                    if (site.removed || !site.predicted) continue;
                    for (const auto& th : throws_seen) {
                        if (!message_equivalent(site.message, th.message,
                                                opts.jaccard_threshold))
                            continue;
                        detail::CatchScan local =
                            detail::enclosing_catches(model, *th.method, th.stmt->start_line);
                        bool printed = local.printed;
                        bool escapes = false;
                        if (!local.caught) {
                            // Uncaught locally: the exception escapes unless every
                            // in-bundle call site sits inside a try with a catch.
                            bool any_site = false, any_uncaught = false;
                            for (const auto* e : graph.calls_to(th.method->id)) {
                                if (!bundle_ids.count(e->caller)) continue;
                                const auto* caller = model.method(e->caller);
                                if (!caller) continue;
                                any_site = true;
                                detail::CatchScan up =
                                    detail::enclosing_catches(model, *caller, e->line);
                                if (!up.caught) any_uncaught = true;
                                if (up.printed) printed = true;
                            }
                            escapes = !any_site || any_uncaught;
                        }
                        if (printed || escapes) {
                            remove_site(site, "throw",
                                        th.method->file + ":" +
                                            std::to_string(th.stmt->start_line) + " " +
                                            trim(th.stmt->text));
                            break;
                        }
                    }
                }
            }
        }

        // Pair scans share this shape: ordered live pairs with the rule's
        // preconditions, earliest pair first.
        auto for_pairs = [&](auto&& qualifies, auto&& fire) {
            auto indices = bundle_site_indices();
            for (size_t i = 0; i < indices.size(); i++) {
                for (size_t j = i + 1; j < indices.size(); j++) {
                    auto& a = sites[indices[i]];
                    auto& b = sites[indices[j]];
                    if (a.removed || b.removed) continue;
                    if (!a.predicted && !b.predicted) continue;
                    if (a.method->id != target_id && b.method->id != target_id) continue;
                    if (qualifies(a, b)) fire(a, b);
                }
            }
        };

        // -- rule 2: if-else --
        for_pairs(
            [&](const detail::LogSite& a, const detail::LogSite& b) {
                if (a.method != b.method || !equivalent(a, b)) return false;
                bool opposite = false;
                java::visit_statements(a.method->body, [&](const java::Statement& st) {
                    if (opposite || st.kind != java::StmtKind::If) return;
                    const java::Arm* then_arm = nullptr;
                    const java::Arm* else_arm = nullptr;
                    for (const auto& arm : st.arm_info) {
                        if (arm.label == "then") then_arm = &arm;
                        if (arm.label == "else") else_arm = &arm;
                    }
                    if (!then_arm || !else_arm) return;
                    auto in = [](const java::Arm& arm, int line) {
                        return line >= arm.start_line && line <= arm.end_line;
                    };
                    if ((in(*then_arm, a.line) && in(*else_arm, b.line)) ||
                        (in(*then_arm, b.line) && in(*else_arm, a.line)))
                        opposite = true;
                });
                return opposite;
            },
            [&](detail::LogSite& a, detail::LogSite& b) {
                // a is the then-arm log (it precedes the else arm textually).
                int ra = java::level_rank(a.level), rb = java::level_rank(b.level);
                detail::LogSite& loser = ra > rb ? b : a;  // tie keeps the else arm (b)
                detail::LogSite& kept = (&loser == &a) ? b : a;
                if (loser.predicted && loser.method->id == target_id)
                    remove_site(loser, "if-else", detail::describe(kept));
            });

        // -- rule 3: start-end --
        {
            auto marker_hit = [](const std::set<std::string>& tokens,
                                 const std::vector<std::string>& markers) {
                for (const auto& m : markers)
                    if (tokens.count(m)) return true;
                return false;
            };
            for_pairs(
                [&](const detail::LogSite& a, const detail::LogSite& b) {
                    if (a.method != b.method) return false;
                    if (a.level == "trace" || b.level == "trace") return false;
                    auto ta = message_tokens(a.message);
                    auto tb = message_tokens(b.message);
                    bool a_starts = marker_hit(ta, opts.start_markers);
                    bool b_ends = marker_hit(tb, opts.end_markers);
                    if (!a_starts || !b_ends) return false;
                    auto stem = [&](std::set<std::string> t) {
                        for (const auto& m : opts.start_markers) t.erase(m);
                        for (const auto& m : opts.end_markers) t.erase(m);
                        return t;
                    };
                    if (stem(ta) != stem(tb)) return false;
                    const auto& pdg = pdg_of(*a.method);
                    int na = detail::node_at(pdg.cfg, a.line);
                    int nb = detail::node_at(pdg.cfg, b.line);
                    if (na < 0 || nb < 0) return false;
                    return pdg.postdom.postdominates(nb, na);
                },
                [&](detail::LogSite& a, detail::LogSite& b) {
                    if (a.predicted && a.method->id == target_id)
                        remove_site(a, "start-end", detail::describe(b));
                });
        }

        // -- rule 4: shared-var --
        for_pairs(
            [&](const detail::LogSite& a, const detail::LogSite& b) {
                return a.method == b.method && equivalent(a, b) && shares_variable(a, b);
            },
            [&](detail::LogSite& a, detail::LogSite& b) {
                const auto& pdg = pdg_of(*a.method);
                int nb = detail::node_at(pdg.cfg, b.line);
                bool reassigned = false;
                if (nb >= 0) {
                    for (const auto& va : a.variables) {
                        std::string name = detail::base_identifier(trim(va));
                        bool shared = false;
                        for (const auto& vb : b.variables)
                            if (remove_whitespace(va) == remove_whitespace(vb)) shared = true;
                        if (!shared || name.empty()) continue;
                        for (const auto& e : pdg.edges) {
                            if (e.from != nb || e.kind != "data" || e.var != name) continue;
                            const auto& def = pdg.cfg.nodes[static_cast<size_t>(e.to)];
                            if (!def.is_entry && def.line > a.line && def.line < b.line)
                                reassigned = true;
                        }
                    }
                }
                detail::LogSite& loser = reassigned ? a : b;
                detail::LogSite& kept = (&loser == &a) ? b : a;
                if (loser.predicted && loser.method->id == target_id)
                    remove_site(loser, "shared-var", detail::describe(kept));
            });

        // -- rule 5: proximity --
        {
            auto distance_to_meaningful = [&](const detail::LogSite& s) {
                int best = 1 << 20;
                const java::ClassInfo* cls = model.class_of(s.method->class_id);
                java::visit_statements(s.method->body, [&](const java::Statement& st) {
                    bool meaningful =
                        st.kind == java::StmtKind::Throw ||
                        st.kind == java::StmtKind::CatchHeader ||
                        (!st.calls.empty() && java::match_log_statement(st, cls) == nullptr);
                    if (!meaningful) return;
                    best = std::min(best, std::abs(st.start_line - s.line));
                });
                return best;
            };
            for_pairs(
                [&](const detail::LogSite& a, const detail::LogSite& b) {
                    return equivalent(a, b) && !shares_variable(a, b);
                },
                [&](detail::LogSite& a, detail::LogSite& b) {
                    int da = distance_to_meaningful(a);
                    int db = distance_to_meaningful(b);
                    detail::LogSite& loser = da <= db ? b : a;  // tie keeps the earlier log
                    detail::LogSite& kept = (&loser == &a) ? b : a;
                    if (loser.predicted && loser.method->id == target_id)
                        remove_site(loser, "proximity", detail::describe(kept));
                });
        }
    }

    // --- apply removals to the source and shift surviving line numbers ---
    std::map<std::string, std::vector<int>> removed_lines;
    for (const auto& s : sites)
        if (s.removed) removed_lines[s.file].push_back(s.line);

    for (const auto& unit : model.files) {
        auto it = removed_lines.find(unit.path);
        if (it == removed_lines.end()) {
            out.files[unit.path] = unit.text;
            continue;
        }
        LineBuffer buf = LineBuffer::from_text(unit.text);
        std::vector<int> lines = it->second;
        std::sort(lines.begin(), lines.end());
        for (auto rit = lines.rbegin(); rit != lines.rend(); ++rit)
            if (*rit >= 1 && *rit <= static_cast<int>(buf.lines.size()))
                buf.lines.erase(buf.lines.begin() + (*rit - 1));
        out.files[unit.path] = buf.to_text();
    }

    std::vector<std::pair<java::LogStatement, int>> kept_logs;
    for (const auto& s : sites) {
        if (!s.predicted || s.removed) continue;
        java::LogStatement kept = predicted[static_cast<size_t>(s.predicted_index)];
        auto it = removed_lines.find(s.file);
        if (it != removed_lines.end()) {
            int shift = 0;
            for (int r : it->second)
                if (r < s.line) shift++;
            kept.line -= shift;
        }
        kept_logs.emplace_back(std::move(kept), s.predicted_index);
    }
    std::stable_sort(kept_logs.begin(), kept_logs.end(),
                     [](const auto& a, const auto& b) {
                         if (a.first.file != b.first.file) return a.first.file < b.first.file;
                         return a.first.line < b.first.line;
                     });
    for (auto& [log, index] : kept_logs) {
        out.surviving.push_back(std::move(log));
        out.surviving_index.push_back(index);
    }
    return out;
}

}  // namespace logsmith::refine
