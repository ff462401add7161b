#pragma once

#include <set>

#include "logsmith/java/model.hpp"

namespace logsmith::analysis {

using java::CallSite;
using java::CodeModel;
using java::MethodUnit;

// Rough type class of a literal argument, for overload discrimination.
enum class LitKind { Unknown, String, Char, Integral, Floating, Boolean, Null };

inline LitKind literal_kind(const std::string& raw) {
    std::string s = trim(raw);
    if (s.empty()) return LitKind::Unknown;
    if (s.front() == '"') return LitKind::String;
    if (s.front() == '\'') return LitKind::Char;
    if (s == "true" || s == "false") return LitKind::Boolean;
    if (s == "null") return LitKind::Null;
    size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
        bool fp = s.find('.') != std::string::npos || s.find('e') != std::string::npos ||
                  s.find('E') != std::string::npos || ends_with(s, "f") || ends_with(s, "F") ||
                  ends_with(s, "d") || ends_with(s, "D");
        for (size_t k = i; k < s.size(); k++) {
            char ch = s[k];
            if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '.' && ch != '_')
                return LitKind::Unknown;  // arithmetic expression, not a literal
        }
        return fp ? LitKind::Floating : LitKind::Integral;
    }
    return LitKind::Unknown;
}

inline bool literal_matches_param(LitKind lit, const std::string& param_type) {
    std::string t = param_type;
    auto lt = t.find('<');
    if (lt != std::string::npos) t = t.substr(0, lt);
    size_t dot = t.rfind('.');
    if (dot != std::string::npos) t = t.substr(dot + 1);
    switch (lit) {
        case LitKind::String: return t == "String" || t == "CharSequence" || t == "Object";
        case LitKind::Char: return t == "char" || t == "Character" || t == "Object";
        case LitKind::Integral:
            return t == "int" || t == "long" || t == "short" || t == "byte" || t == "Integer" ||
                   t == "Long" || t == "double" || t == "float" || t == "Object";
        case LitKind::Floating: return t == "double" || t == "float" || t == "Double" ||
                                       t == "Float" || t == "Object";
        case LitKind::Boolean: return t == "boolean" || t == "Boolean" || t == "Object";
        case LitKind::Null: return t != "int" && t != "long" && t != "short" && t != "byte" &&
                                   t != "char" && t != "boolean" && t != "double" && t != "float";
        case LitKind::Unknown: return true;
    }
    return true;
}

struct CallEdge {
    std::string caller;  // method id
    std::string callee;  // method id
    int line = 0;        // call site line in the caller's file
};

struct CallGraph {
    std::vector<CallEdge> edges;
    std::multimap<std::string, size_t> by_caller;
    std::multimap<std::string, size_t> by_callee;

    std::vector<const CallEdge*> calls_from(const std::string& caller) const {
        std::vector<const CallEdge*> out;
        auto [a, b] = by_caller.equal_range(caller);
        for (auto it = a; it != b; ++it) out.push_back(&edges[it->second]);
        return out;
    }
    std::vector<const CallEdge*> calls_to(const std::string& callee) const {
        std::vector<const CallEdge*> out;
        auto [a, b] = by_callee.equal_range(callee);
        for (auto it = a; it != b; ++it) out.push_back(&edges[it->second]);
        return out;
    }
};

// Resolves one call site to project method ids: simple name + arity first,
// then literal-argument types to discriminate overloads. Unresolvable calls
// (library methods) yield an empty list.
inline std::vector<std::string> resolve_call(const CodeModel& model, const CallSite& call) {
    std::vector<const MethodUnit*> candidates;
    if (call.is_constructor) {
        for (const auto& m : model.methods) {
            const auto* cls = model.class_of(m.class_id);
            if (cls && cls->name == call.name && m.name == call.name &&
                static_cast<int>(m.params.size()) == call.arity)
                candidates.push_back(&m);
        }
    } else {
        auto [a, b] = model.methods_by_name.equal_range(call.name);
        for (auto it = a; it != b; ++it) {
            const auto& m = model.methods[it->second];
            if (static_cast<int>(m.params.size()) == call.arity) candidates.push_back(&m);
        }
    }
    if (candidates.size() > 1) {
        std::vector<const MethodUnit*> narrowed;
        for (const auto* m : candidates) {
            bool ok = true;
            for (size_t i = 0; i < call.arg_texts.size() && i < m->params.size(); i++) {
                LitKind k = literal_kind(call.arg_texts[i]);
                if (k != LitKind::Unknown && !literal_matches_param(k, m->params[i].type)) {
                    ok = false;
                    break;
                }
            }
            if (ok) narrowed.push_back(m);
        }
        if (!narrowed.empty()) candidates = narrowed;
    }
    std::vector<std::string> ids;
    for (const auto* m : candidates) ids.push_back(m->id);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

inline CallGraph build_call_graph(const CodeModel& model) {
    CallGraph g;
    std::set<std::tuple<std::string, std::string, int>> seen;
    for (const auto& m : model.methods) {
        java::visit_statements(m.body, [&](const java::Statement& st) {
            for (const auto& call : st.calls) {
                for (const auto& callee : resolve_call(model, call)) {
                    if (callee == m.id) continue;  // self-recursion adds nothing to slices
                    if (seen.insert({m.id, callee, call.line}).second)
                        g.edges.push_back({m.id, callee, call.line});
                }
            }
        });
    }
    for (size_t i = 0; i < g.edges.size(); i++) {
        g.by_caller.insert({g.edges[i].caller, i});
        g.by_callee.insert({g.edges[i].callee, i});
    }
    return g;
}

}  // namespace logsmith::analysis
