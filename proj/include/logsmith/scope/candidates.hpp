#pragma once
// Candidate logging-variable extraction. For a target method we gather the
// identifiers a log statement could plausibly reference: five variable sets
// (parameters, locals, class members, statics, inherited fields) and five
// function sets (member methods, inherited methods, interface default
// methods, lambda/function-typed locals, statically imported methods).
// Superclass and interface traversal is best-effort: it stops at types
// without in-project source and records a diagnostic instead of failing.
#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "logsmith/java/model.hpp"

namespace logsmith::scope {

struct CandidateEntry {
    std::string name;       // simple identifier
    std::string scope;      // declaring class/method id, or import qualifier
    std::string type;       // variable type / function return type (may be empty)
    std::string signature;  // functions only: rendered declaration
    std::string summary;    // functions only: first doc-comment line
    int line = -1;          // declaration line when the source is in-project
    bool unresolved = false;
};

struct CandidateSet {
    std::string method_id;
    // five variable sets and five function sets, in prompt order
    std::vector<CandidateEntry> v_p, v_m, v_c, v_s, v_i;
    std::vector<CandidateEntry> f_m, f_i, f_d, f_l, f_s;
    std::vector<std::string> diagnostics;

    bool empty() const {
        return v_p.empty() && v_m.empty() && v_c.empty() && v_s.empty() && v_i.empty() &&
               f_m.empty() && f_i.empty() && f_d.empty() && f_l.empty() && f_s.empty();
    }
};

namespace detail {

inline bool entry_less(const CandidateEntry& a, const CandidateEntry& b) {
    if (a.name != b.name) return a.name < b.name;
    if (a.signature != b.signature) return a.signature < b.signature;
    return a.scope < b.scope;
}

inline void sort_entries(std::vector<CandidateEntry>& v) {
    std::sort(v.begin(), v.end(), entry_less);
    v.erase(std::unique(v.begin(), v.end(),
                        [](const CandidateEntry& a, const CandidateEntry& b) {
                            return a.name == b.name && a.signature == b.signature &&
                                   a.scope == b.scope;
                        }),
            v.end());
}

inline CandidateEntry function_entry(const java::MethodUnit& m) {
    CandidateEntry e;
    e.name = m.name;
    e.scope = m.class_id;
    e.type = m.return_type;
    e.signature = m.signature;
    e.summary = m.summary;
    e.line = m.decl_line;
    return e;
}

inline std::string type_base(const std::string& type_text) {
    size_t lt = type_text.find('<');
    std::string base = lt == std::string::npos ? type_text : type_text.substr(0, lt);
    size_t dot = base.rfind('.');
    if (dot != std::string::npos) base = base.substr(dot + 1);
    while (!base.empty() && (base.back() == '[' || base.back() == ']')) base.pop_back();
    return base;
}

inline bool functional_interface_type(const std::string& type_text) {
    static const std::set<std::string> kKnown = {
        "Runnable",       "Callable",  "Supplier",    "Consumer",      "BiConsumer",
        "Function",       "BiFunction", "Predicate",  "BiPredicate",   "UnaryOperator",
        "BinaryOperator", "Comparator", "IntFunction", "ToIntFunction", "BooleanSupplier"};
    return kKnown.count(type_base(type_text)) > 0;
}

// does the statement's initializer contain a lambda or a method reference?
inline bool lambda_initializer(const std::string& stmt_text) {
    size_t eq = stmt_text.find('=');
    if (eq == std::string::npos) return false;
    std::string rhs = stmt_text.substr(eq + 1);
    return rhs.find("->") != std::string::npos || rhs.find("::") != std::string::npos;
}

inline bool is_constructor(const java::CodeModel& model, const java::MethodUnit& m) {
    const java::ClassInfo* c = model.class_of(m.class_id);
    return c != nullptr && m.name == c->name;
}

// walk the extends chain from `cls`, calling fn(ancestor) for each
// in-project superclass; unresolved names produce a diagnostic
template <typename Fn>
inline void for_each_ancestor(const java::CodeModel& model, const java::ClassInfo& cls,
                              std::vector<std::string>& diagnostics, Fn&& fn) {
    std::set<std::string> seen = {cls.id};
    const java::ClassInfo* cur = &cls;
    while (cur != nullptr && !cur->extends_name.empty()) {
        const java::ClassInfo* up = model.resolve_class(cur->extends_name, cur);
        if (up == nullptr) {
            diagnostics.push_back("supertype '" + cur->extends_name + "' of " + cur->id +
                                  " not in project; inherited members incomplete");
            break;
        }
        if (!seen.insert(up->id).second) break;  // defensive: cyclic extends
        fn(*up);
        cur = up;
    }
}

// all interfaces transitively implemented by `cls` (plus its ancestors'),
// restricted to in-project sources
inline std::vector<const java::ClassInfo*> implemented_interfaces(
    const java::CodeModel& model, const java::ClassInfo& cls,
    std::vector<std::string>& diagnostics) {
    std::vector<const java::ClassInfo*> out;
    std::set<std::string> seen;
    std::vector<const java::ClassInfo*> work;

    auto push_names = [&](const java::ClassInfo& from) {
        for (const auto& raw : from.implements) {
            const java::ClassInfo* ifc = model.resolve_class(raw, &from);
            if (ifc == nullptr) {
                diagnostics.push_back("interface '" + raw + "' of " + from.id +
                                      " not in project; default methods unavailable");
                continue;
            }
            if (seen.insert(ifc->id).second) work.push_back(ifc);
        }
    };

    push_names(cls);
    // the supertype-missing diagnostic is already reported by the field/method
    // walk; don't repeat it here
    std::vector<std::string> scratch;
    for_each_ancestor(model, cls, scratch,
                      [&](const java::ClassInfo& up) { push_names(up); });
    while (!work.empty()) {
        const java::ClassInfo* ifc = work.back();
        work.pop_back();
        out.push_back(ifc);
        push_names(*ifc);
    }
    return out;
}

}  // namespace detail

inline CandidateSet collect_candidates(const java::CodeModel& model,
                                       const java::MethodUnit& method) {
    CandidateSet cs;
    cs.method_id = method.id;

    // parameters — exactly the signature parameter list
    for (const auto& p : method.params) {
        CandidateEntry e;
        e.name = p.name;
        e.scope = method.id;
        e.type = p.type;
        e.line = method.decl_line;
        cs.v_p.push_back(e);
    }

    // locals, catch parameters, and lambda/function-typed variables
    java::visit_statements(method.body, [&](const java::Statement& st) {
        bool declares = st.kind == java::StmtKind::LocalDecl ||
                        st.kind == java::StmtKind::For || st.kind == java::StmtKind::ForEach;
        if (declares && !st.decl_type.empty()) {
            for (const auto& name : st.defs) {
                CandidateEntry e;
                e.name = name;
                e.scope = method.id;
                e.type = st.decl_type;
                e.line = st.start_line;
                cs.v_m.push_back(e);
                if (detail::functional_interface_type(st.decl_type) ||
                    (st.kind == java::StmtKind::LocalDecl && detail::lambda_initializer(st.text)))
                    cs.f_l.push_back(e);
            }
        }
        for (const auto& arm : st.arm_info) {
            if (arm.param.empty()) continue;
            CandidateEntry e;
            e.name = arm.param;
            e.scope = method.id;
            e.type = arm.param_type;
            e.line = arm.start_line;
            cs.v_m.push_back(e);
        }
    });

    const java::ClassInfo* cls = model.class_of(method.class_id);
    if (cls != nullptr) {
        // shadowing/override bookkeeping: the nearest declaration wins, so
        // names already claimed by the current class (or a closer ancestor)
        // suppress entries from further up the chain
        std::set<std::string> field_names;
        std::set<std::string> method_keys;
        auto method_key = [](const java::MethodUnit& m) {
            std::string k = m.name + "(";
            for (size_t i = 0; i < m.params.size(); ++i)
                k += (i ? "," : "") + m.params[i].type;
            return k + ")";
        };

        for (const auto& f : cls->fields) {
            CandidateEntry e;
            e.name = f.name;
            e.scope = cls->id;
            e.type = f.type;
            e.line = f.line;
            (f.is_static ? cs.v_s : cs.v_c).push_back(e);
            field_names.insert(f.name);
        }
        for (size_t idx : cls->method_indices) {
            const java::MethodUnit& m = model.methods[idx];
            method_keys.insert(method_key(m));
            if (detail::is_constructor(model, m) || m.id == method.id) continue;
            cs.f_m.push_back(detail::function_entry(m));
        }

        detail::for_each_ancestor(model, *cls, cs.diagnostics, [&](const java::ClassInfo& up) {
            for (const auto& f : up.fields) {
                if (!field_names.insert(f.name).second) continue;  // shadowed
                CandidateEntry e;
                e.name = f.name;
                e.scope = up.id;
                e.type = f.type;
                e.line = f.line;
                (f.is_static ? cs.v_s : cs.v_i).push_back(e);
            }
            for (size_t idx : up.method_indices) {
                const java::MethodUnit& m = model.methods[idx];
                if (detail::is_constructor(model, m)) continue;
                if (!method_keys.insert(method_key(m)).second) continue;  // overridden
                cs.f_i.push_back(detail::function_entry(m));
            }
        });

        for (const java::ClassInfo* ifc :
             detail::implemented_interfaces(model, *cls, cs.diagnostics)) {
            for (size_t idx : ifc->method_indices) {
                const java::MethodUnit& m = model.methods[idx];
                if (!m.is_default) continue;
                if (!method_keys.insert(method_key(m)).second) continue;  // overridden
                cs.f_d.push_back(detail::function_entry(m));
            }
        }
    }

    // statically imported methods from this file's imports
    auto imp_it = model.imports_by_file.find(method.file);
    if (imp_it != model.imports_by_file.end()) {
        for (const auto& imp : imp_it->second) {
            if (!imp.is_static) continue;
            if (imp.wildcard) {
                const java::ClassInfo* host = model.class_of(imp.path);
                if (host == nullptr) {
                    cs.diagnostics.push_back("static wildcard import '" + imp.path +
                                             "' not in project; members unknown");
                    continue;
                }
                for (size_t idx : host->method_indices) {
                    const java::MethodUnit& m = model.methods[idx];
                    if (m.is_static && !detail::is_constructor(model, m))
                        cs.f_s.push_back(detail::function_entry(m));
                }
                continue;
            }
            size_t dot = imp.path.rfind('.');
            std::string member = dot == std::string::npos ? imp.path : imp.path.substr(dot + 1);
            std::string holder = dot == std::string::npos ? "" : imp.path.substr(0, dot);
            bool found = false;
            if (const java::ClassInfo* host = model.class_of(holder)) {
                for (size_t idx : host->method_indices) {
                    const java::MethodUnit& m = model.methods[idx];
                    if (m.name == member && m.is_static) {
                        cs.f_s.push_back(detail::function_entry(m));
                        found = true;
                    }
                }
            }
            if (!found) {
                CandidateEntry e;
                e.name = member;
                e.scope = holder;
                e.signature = member + "(...)";
                e.unresolved = true;
                cs.f_s.push_back(e);
            }
        }
    }

    for (auto* set : {&cs.v_p, &cs.v_m, &cs.v_c, &cs.v_s, &cs.v_i, &cs.f_m, &cs.f_i, &cs.f_d,
                      &cs.f_l, &cs.f_s}) {
        if (set == &cs.v_p) continue;  // parameters keep signature order
        detail::sort_entries(*set);
    }
    return cs;
}

namespace detail {

inline void render_variable(std::string& out, const char* label, const CandidateEntry& e,
                            bool show_origin) {
    out += label;
    out += ": ";
    if (!e.type.empty()) {
        out += e.type;
        out += ' ';
    }
    out += e.name;
    if (show_origin && !e.scope.empty()) out += " (from " + e.scope + ")";
    if (e.unresolved) out += " [unresolved]";
    out += '\n';
}

inline void render_function(std::string& out, const char* label, const CandidateEntry& e,
                            bool show_origin) {
    out += label;
    out += ": ";
    out += e.signature.empty() ? e.name : e.signature;
    if (show_origin && !e.scope.empty()) out += " (from " + e.scope + ")";
    if (e.unresolved) out += " [unresolved]";
    if (!e.summary.empty()) out += " -- " + e.summary;
    out += '\n';
}

}  // namespace detail

// deterministic prompt block: set order v_p..f_s, alphabetical within set
inline std::string render_candidates(const CandidateSet& cs) {
    if (cs.empty()) return "no candidates\n";
    std::string out;
    for (const auto& e : cs.v_p) detail::render_variable(out, "parameter", e, false);
    for (const auto& e : cs.v_m) detail::render_variable(out, "local variable", e, false);
    for (const auto& e : cs.v_c) detail::render_variable(out, "class member", e, false);
    for (const auto& e : cs.v_s) detail::render_variable(out, "static variable", e, true);
    for (const auto& e : cs.v_i) detail::render_variable(out, "inherited variable", e, true);
    for (const auto& e : cs.f_m) detail::render_function(out, "member method", e, false);
    for (const auto& e : cs.f_i) detail::render_function(out, "inherited method", e, true);
    for (const auto& e : cs.f_d)
        detail::render_function(out, "interface default method", e, true);
    for (const auto& e : cs.f_l)
        detail::render_variable(out, "lambda or function variable", e, false);
    for (const auto& e : cs.f_s)
        detail::render_function(out, "statically imported method", e, true);
    return out;
}

inline nlohmann::json candidates_to_json(const CandidateSet& cs) {
    auto entries = [](const std::vector<CandidateEntry>& v) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& e : v) {
            nlohmann::json o{{"name", e.name}, {"scope", e.scope}};
            if (!e.type.empty()) o["type"] = e.type;
            if (!e.signature.empty()) o["signature"] = e.signature;
            if (!e.summary.empty()) o["summary"] = e.summary;
            if (e.line >= 0) o["line"] = e.line;
            if (e.unresolved) o["unresolved"] = true;
            arr.push_back(std::move(o));
        }
        return arr;
    };
    return nlohmann::json{{"method", cs.method_id},
                          {"v_p", entries(cs.v_p)},
                          {"v_m", entries(cs.v_m)},
                          {"v_c", entries(cs.v_c)},
                          {"v_s", entries(cs.v_s)},
                          {"v_i", entries(cs.v_i)},
                          {"f_m", entries(cs.f_m)},
                          {"f_i", entries(cs.f_i)},
                          {"f_d", entries(cs.f_d)},
                          {"f_l", entries(cs.f_l)},
                          {"f_s", entries(cs.f_s)},
                          {"diagnostics", cs.diagnostics}};
}

}  // namespace logsmith::scope
