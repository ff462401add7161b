#pragma once

#include <random>
#include <regex>

#include <nlohmann/json.hpp>

#include "logsmith/java/blocks.hpp"
#include "logsmith/java/model.hpp"

namespace logsmith::java {

inline const std::vector<std::string>& log_levels() {
    static const std::vector<std::string> levels = {"trace", "debug", "info", "warn", "error"};
    return levels;
}

inline int level_rank(const std::string& level) {
    const auto& ls = log_levels();
    for (size_t i = 0; i < ls.size(); i++)
        if (ls[i] == level) return static_cast<int>(i);
    return -1;
}

// Maps a logger method name to a canonical level; empty when not a level call.
inline std::string canonical_level(const std::string& name) {
    std::string n = to_lower(name);
    if (n == "fatal") return "error";
    if (level_rank(n) >= 0) return n;
    return "";
}

// A logger receiver is either conventionally named (log / logger / LOG, …) or
// a field whose declared type mentions Logger.
inline bool is_logger_receiver(const std::string& receiver, const ClassInfo* cls) {
    if (receiver.empty()) return false;
    size_t dot = receiver.rfind('.');
    std::string base = dot == std::string::npos ? receiver : receiver.substr(dot + 1);
    std::string lowered = to_lower(base);
    if (lowered == "log" || lowered == "logger") return true;
    if (cls) {
        for (const auto& f : cls->fields)
            if (f.name == base && f.type.find("Logger") != std::string::npos) return true;
    }
    return false;
}

// One log call, positioned by the line it should follow ("anchor"). For
// extracted ground truth the anchor is expressed in stripped-file coordinates
// and `raw` holds the original source lines for byte-exact restoration.
struct LogStatement {
    std::string file;
    std::string method_id;
    int line = 0;  // anchor: the log sits directly after this line
    std::string level;
    std::string message;  // template text with {} placeholders
    std::vector<std::string> variables;
    bool non_literal = false;  // message was not derivable from string literals
    std::string block;         // innermost block label at the original site
    std::vector<std::string> raw;  // original lines, byte-exact, no terminators
    std::string indent;
    std::string explanation;  // generated logs only: one-sentence semantics note
};

inline void to_json(nlohmann::json& j, const LogStatement& s) {
    j = nlohmann::json{{"file", s.file},       {"method", s.method_id},
                       {"line", s.line},       {"level", s.level},
                       {"message", s.message}, {"variables", s.variables},
                       {"block", s.block},     {"raw", s.raw},
                       {"indent", s.indent}};
    if (s.non_literal) j["non_literal"] = true;
    if (!s.explanation.empty()) j["explanation"] = s.explanation;
}

inline void from_json(const nlohmann::json& j, LogStatement& s) {
    s.file = j.value("file", "");
    s.method_id = j.value("method", "");
    s.line = j.value("line", 0);
    s.level = j.value("level", "");
    s.message = j.value("message", "");
    s.variables = j.value("variables", std::vector<std::string>{});
    s.non_literal = j.value("non_literal", false);
    s.block = j.value("block", "");
    s.raw = j.value("raw", std::vector<std::string>{});
    s.indent = j.value("indent", "");
    s.explanation = j.value("explanation", "");
}

namespace detail {

// Splits an expression at top-level '+' (outside quotes and brackets).
inline std::vector<std::string> split_concat(const std::string& expr) {
    std::vector<std::string> parts;
    int depth = 0;
    bool in_str = false, in_chr = false;
    std::string cur;
    for (size_t i = 0; i < expr.size(); i++) {
        char ch = expr[i];
        if (in_str) {
            cur += ch;
            if (ch == '\\') {
                if (i + 1 < expr.size()) cur += expr[++i];
            } else if (ch == '"') {
                in_str = false;
            }
            continue;
        }
        if (in_chr) {
            cur += ch;
            if (ch == '\\') {
                if (i + 1 < expr.size()) cur += expr[++i];
            } else if (ch == '\'') {
                in_chr = false;
            }
            continue;
        }
        switch (ch) {
            case '"': in_str = true; cur += ch; continue;
            case '\'': in_chr = true; cur += ch; continue;
            case '(': case '[': case '{': depth++; cur += ch; continue;
            case ')': case ']': case '}': depth--; cur += ch; continue;
            case '+':
                if (depth == 0) {
                    parts.push_back(trim(cur));
                    cur.clear();
                    continue;
                }
                cur += ch;
                continue;
            default: cur += ch;
        }
    }
    parts.push_back(trim(cur));
    return parts;
}

inline bool is_string_literal(const std::string& s) {
    return s.size() >= 2 && s.front() == '"' && s.back() == '"';
}

inline std::string unquote(const std::string& s) {
    std::string body = s.substr(1, s.size() - 2);
    std::string out;
    for (size_t i = 0; i < body.size(); i++) {
        if (body[i] == '\\' && i + 1 < body.size() && (body[i + 1] == '"' || body[i + 1] == '\\')) {
            out += body[i + 1];
            i++;
        } else {
            out += body[i];
        }
    }
    return out;
}

}  // namespace detail

// Folds a logger call's arguments into a {}-template plus ordered variables.
// String concatenation in the first argument becomes placeholders; remaining
// arguments are appended as variables.
inline void fold_log_arguments(const CallSite& call, LogStatement& out) {
    if (call.arg_texts.empty()) {
        out.non_literal = true;
        return;
    }
    const std::string& first = call.arg_texts[0];
    auto parts = detail::split_concat(first);
    bool any_literal = false;
    std::string tmpl;
    std::vector<std::string> vars;
    for (const auto& p : parts) {
        if (detail::is_string_literal(p)) {
            tmpl += detail::unquote(p);
            any_literal = true;
        } else if (!p.empty()) {
            tmpl += "{}";
            vars.push_back(p);
        }
    }
    if (!any_literal) {
        out.non_literal = true;
        out.message = trim(first);
        vars.clear();
    } else {
        out.message = tmpl;
    }
    for (size_t i = 1; i < call.arg_texts.size(); i++) vars.push_back(trim(call.arg_texts[i]));
    out.variables = std::move(vars);
}

// Returns the logger call when `st` is a plain logging statement.
inline const CallSite* match_log_statement(const Statement& st, const ClassInfo* cls) {
    if (st.kind != StmtKind::Expr || st.calls.empty()) return nullptr;
    const CallSite& call = st.calls[0];
    if (call.is_constructor) return nullptr;
    if (canonical_level(call.name).empty()) return nullptr;
    if (!is_logger_receiver(call.receiver, cls)) return nullptr;
    // the logger call must be the whole statement, not an argument of one
    if (!starts_with(trim(st.text), call.receiver + ".")) return nullptr;
    return &call;
}

struct StrippedProject {
    std::map<std::string, std::string> files;  // path → stripped text
    std::vector<LogStatement> logs;            // anchors in stripped coordinates
    int total_found = 0;
};

// Removes developer log statements from every parsed file. mode "all" strips
// every recognized log; "one_random" removes exactly one, chosen by `seed`.
// Extracted entries carry everything needed to restore the original bytes.
inline StrippedProject strip_logs(const CodeModel& model, const std::string& mode,
                                  unsigned seed = 0) {
    if (mode != "all" && mode != "one_random")
        throw Error("bad_mode", "strip mode must be 'all' or 'one_random', got '" + mode + "'");

    struct Site {
        const SourceUnit* unit;
        const MethodUnit* method;
        const Statement* stmt;
        const CallSite* call;
        std::string block;
    };
    std::vector<Site> sites;
    for (const auto& unit : model.files) {
        for (const auto& method : model.methods) {
            if (method.file != unit.path || method.body_end_line == 0) continue;
            auto blocks = extract_blocks(method);
            const ClassInfo* cls = model.class_of(method.class_id);
            visit_statements(method.body, [&](const Statement& st) {
                if (const CallSite* call = match_log_statement(st, cls)) {
                    const Block* blk = innermost_block(blocks, st.start_line);
                    sites.push_back({&unit, &method, &st, call, blk ? blk->label() : ""});
                }
            });
        }
    }
    std::stable_sort(sites.begin(), sites.end(), [](const Site& a, const Site& b) {
        if (a.unit->path != b.unit->path) return a.unit->path < b.unit->path;
        return a.stmt->start_line < b.stmt->start_line;
    });

    StrippedProject out;
    out.total_found = static_cast<int>(sites.size());
    std::vector<bool> selected(sites.size(), true);
    if (mode == "one_random") {
        selected.assign(sites.size(), false);
        if (!sites.empty()) {
            std::mt19937 rng(seed);
            selected[rng() % sites.size()] = true;
        }
    }

    for (const auto& unit : model.files) {
        LineBuffer buf = LineBuffer::from_text(unit.text);
        std::vector<bool> removed(buf.lines.size() + 1, false);
        std::vector<size_t> file_sites;
        for (size_t i = 0; i < sites.size(); i++) {
            if (!selected[i] || sites[i].unit != &unit) continue;
            file_sites.push_back(i);
            for (int ln = sites[i].stmt->start_line; ln <= sites[i].stmt->end_line; ln++)
                removed[static_cast<size_t>(ln)] = true;
        }
        for (size_t idx : file_sites) {
            const Site& site = sites[idx];
            LogStatement entry;
            entry.file = unit.path;
            entry.method_id = site.method->id;
            entry.level = canonical_level(site.call->name);
            fold_log_arguments(*site.call, entry);
            entry.block = site.block;
            int anchor = 0;
            for (int ln = 1; ln < site.stmt->start_line; ln++)
                if (!removed[static_cast<size_t>(ln)]) anchor++;
            entry.line = anchor;
            for (int ln = site.stmt->start_line; ln <= site.stmt->end_line; ln++)
                entry.raw.push_back(buf.lines[static_cast<size_t>(ln) - 1]);
            entry.indent = leading_indent(entry.raw.front());
            out.logs.push_back(std::move(entry));
        }
        LineBuffer stripped;
        stripped.trailing_newline = buf.trailing_newline;
        for (size_t i = 0; i < buf.lines.size(); i++)
            if (!removed[i + 1]) stripped.lines.push_back(buf.lines[i]);
        out.files[unit.path] = stripped.to_text();
    }
    std::stable_sort(out.logs.begin(), out.logs.end(),
                     [](const LogStatement& a, const LogStatement& b) {
                         if (a.file != b.file) return a.file < b.file;
                         return a.line < b.line;
                     });
    return out;
}

// Reinserts stripped logs into a stripped file; inverse of strip_logs for the
// entries of that file (given in extraction order).
inline std::string restore_logs(const std::string& stripped_text,
                                const std::vector<LogStatement>& logs) {
    LineBuffer buf = LineBuffer::from_text(stripped_text);
    for (auto it = logs.rbegin(); it != logs.rend(); ++it) {
        size_t at = static_cast<size_t>(it->line);
        if (at > buf.lines.size()) at = buf.lines.size();
        buf.lines.insert(buf.lines.begin() + static_cast<long>(at), it->raw.begin(), it->raw.end());
    }
    return buf.to_text();
}

// Renders one logging call line.
inline std::string render_log_line(const std::string& indent, const std::string& logger,
                                   const std::string& level, const std::string& message,
                                   const std::vector<std::string>& variables) {
    std::string quoted;
    for (char ch : message) {
        if (ch == '"' || ch == '\\') quoted += '\\';
        quoted += ch;
    }
    std::string line = indent + logger + "." + level + "(\"" + quoted + "\"";
    for (const auto& v : variables) line += ", " + v;
    line += ");";
    return line;
}

}  // namespace logsmith::java
