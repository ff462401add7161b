#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "logsmith/common.hpp"
#include "logsmith/java/logging.hpp"
#include "logsmith/java/model.hpp"
#include "logsmith/java/parser.hpp"

namespace logsmith::pipeline {

// One log that made it into the augmented source.
struct InsertedLog {
    java::LogStatement log;  // line = final line number of the log in the augmented file
    int anchor = 0;          // effective anchor in original file coordinates
    int input_index = -1;    // position of this log in the insert_logs argument
    std::string rendered;    // the exact line that was inserted
};

struct InsertOutcome {
    std::map<std::string, std::string> files;             // every file, augmented or copied
    std::vector<InsertedLog> inserted;                    // sorted by (file, line)
    std::map<std::string, std::vector<int>> added_lines;  // all new line numbers per file
    Diagnostics diagnostics;
    int skipped = 0;
};

namespace detail {

// The innermost statement whose span covers `line`, or nullptr when the line
// sits on block punctuation (closing braces, `else`, blanks) only.
inline const java::Statement* statement_at(const java::MethodUnit& method, int line) {
    const java::Statement* best = nullptr;
    java::visit_statements(method.body, [&](const java::Statement& st) {
        if (line < st.start_line || line > st.end_line) return;
        if (!best || (st.end_line - st.start_line) < (best->end_line - best->start_line) ||
            ((st.end_line - st.start_line) == (best->end_line - best->start_line) &&
             st.start_line > best->start_line))
            best = &st;
    });
    return best;
}

// Innermost method whose body could receive a statement after `line`.
inline const java::MethodUnit* method_covering(const java::CodeModel& model,
                                               const std::string& file, int line) {
    const java::MethodUnit* best = nullptr;
    for (const auto& m : model.methods) {
        if (m.file != file || m.body_end_line == 0) continue;
        if (line < m.decl_line || line > m.body_end_line) continue;
        if (!best || m.decl_line > best->decl_line) best = &m;
    }
    return best;
}

// Resolves where a log anchored at `anchor` actually lands: a statement that
// spans several lines moves the insertion past its syntactic termination
// point, so the new line never splits an expression.
inline int effective_anchor(const java::MethodUnit& method, int anchor) {
    const java::Statement* st = statement_at(method, anchor);
    if (st && anchor <= st->header_end_line) return st->header_end_line;
    return anchor;
}

struct LoggerPlan {
    std::string name;  // receiver to call
    bool needs_field = false;
    bool needs_logger_import = false;
    bool needs_factory_import = false;
};

// Picks the logger receiver for a class: an existing Logger-typed or
// conventionally named field when present, otherwise a fresh field name.
inline LoggerPlan plan_logger(const java::CodeModel& model, const java::ClassInfo& cls) {
    for (const auto& f : cls.fields)
        if (f.type.find("Logger") != std::string::npos) return {f.name, false, false};
    for (const auto& f : cls.fields) {
        std::string lowered = to_lower(f.name);
        if (lowered == "log" || lowered == "logger") return {f.name, false, false};
    }
    auto taken = [&](const std::string& name) {
        for (const auto& f : cls.fields)
            if (f.name == name) return true;
        return false;
    };
    LoggerPlan plan;
    plan.name = !taken("log") ? "log" : (!taken("logger") ? "logger" : "logsmithLog");
    plan.needs_field = true;
    plan.needs_logger_import = true;
    plan.needs_factory_import = true;
    auto it = model.imports_by_file.find(cls.file);
    if (it != model.imports_by_file.end()) {
        for (const auto& imp : it->second) {
            if (imp.path == "org.slf4j.Logger" || (imp.wildcard && imp.path == "org.slf4j"))
                plan.needs_logger_import = false;
            if (imp.path == "org.slf4j.LoggerFactory" || (imp.wildcard && imp.path == "org.slf4j"))
                plan.needs_factory_import = false;
        }
    }
    return plan;
}

// Indentation for a synthesized member: match the first declared member.
inline std::string member_indent(const java::CodeModel& model, const java::ClassInfo& cls) {
    const java::SourceUnit* unit = model.file(cls.file);
    if (!unit) return "    ";
    int first_member = 0;
    for (const auto& f : cls.fields)
        if (f.line > 0 && (first_member == 0 || f.line < first_member)) first_member = f.line;
    for (size_t idx : cls.method_indices) {
        int line = model.methods[idx].decl_line;
        if (line > 0 && (first_member == 0 || line < first_member)) first_member = line;
    }
    if (first_member > 0) return leading_indent(unit->line_text(first_member));
    return leading_indent(unit->line_text(cls.start_line)) + "    ";
}

// Where plumbing lines (imports) go: after the last import, else after the
// package declaration, else at the top of the file.
inline int import_anchor(const java::CodeModel& model, const java::SourceUnit& unit) {
    int last_import = 0;
    auto it = model.imports_by_file.find(unit.path);
    if (it != model.imports_by_file.end())
        for (const auto& imp : it->second) last_import = std::max(last_import, imp.line);
    if (last_import > 0) return last_import;
    for (int ln = 1; ln <= unit.line_count(); ln++)
        if (starts_with(trim(unit.line_text(ln)), "package ")) return ln;
    return 0;
}

}  // namespace detail

// Applies predicted logs to the project source. Every insertion is a whole
// new line placed after its (termination-resolved) anchor, so untouched
// lines survive byte-identical. Logs whose anchor cannot legally receive a
// statement are skipped with a diagnostic, as is the second log of a pair
// that resolves to the same anchor line.
inline InsertOutcome insert_logs(const java::CodeModel& model,
                                 const std::vector<java::LogStatement>& logs) {
    InsertOutcome out;

    struct Pending {
        int after_line;
        std::string text;
        int log_index;  // -1 for plumbing (imports, logger fields)
    };
    std::map<std::string, std::vector<Pending>> pending;  // file → additions
    std::map<std::string, std::string> logger_for_class;  // class id → receiver
    std::set<std::string> used_anchor;  // "file:line" anchors already taken

    auto skip = [&](const java::LogStatement& log, const std::string& why) {
        diag(out.diagnostics, "insert", why, log.line);
        out.skipped++;
    };

    for (size_t log_index = 0; log_index < logs.size(); log_index++) {
        const java::LogStatement& log = logs[log_index];
        const java::SourceUnit* unit = model.file(log.file);
        if (!unit) {
            skip(log, "unknown file '" + log.file + "'");
            continue;
        }
        if (log.line < 1 || log.line > unit->line_count()) {
            skip(log, "anchor line " + std::to_string(log.line) + " outside " + log.file);
            continue;
        }
        const java::MethodUnit* method = nullptr;
        if (!log.method_id.empty()) {
            method = model.method(log.method_id);
            if (method && method->file != log.file) method = nullptr;
        }
        if (!method) method = detail::method_covering(model, log.file, log.line);
        if (!method) {
            skip(log, "anchor line " + std::to_string(log.line) +
                          " is not inside any method body (" + log.file + ")");
            continue;
        }
        int anchor = detail::effective_anchor(*method, log.line);
        if (anchor < method->body_start_line || anchor >= method->body_end_line) {
            skip(log, "no legal statement position after line " + std::to_string(log.line) +
                          " in " + method->id);
            continue;
        }
        if (!used_anchor.insert(log.file + ":" + std::to_string(anchor)).second) {
            skip(log, "anchor line " + std::to_string(anchor) + " in " + log.file +
                          " already received a log; keeping the first");
            continue;
        }

        const java::ClassInfo* cls = model.class_of(method->class_id);
        std::string receiver;
        if (cls) {
            auto known = logger_for_class.find(cls->id);
            if (known != logger_for_class.end()) {
                receiver = known->second;
            } else {
                detail::LoggerPlan plan = detail::plan_logger(model, *cls);
                receiver = plan.name;
                logger_for_class[cls->id] = plan.name;
                if (plan.needs_field) {
                    std::string indent = detail::member_indent(model, *cls);
                    pending[log.file].push_back(
                        {cls->body_start_line,
                         indent + "private static final Logger " + plan.name +
                             " = LoggerFactory.getLogger(" + cls->name + ".class);",
                         -1});
                    int at = detail::import_anchor(model, *unit);
                    if (plan.needs_logger_import)
                        pending[log.file].push_back({at, "import org.slf4j.Logger;", -1});
                    if (plan.needs_factory_import)
                        pending[log.file].push_back({at, "import org.slf4j.LoggerFactory;", -1});
                }
            }
        } else {
            receiver = "log";
        }

        const java::Statement* anchor_stmt = detail::statement_at(*method, log.line);
        std::string indent = anchor_stmt && anchor_stmt->start_line <= unit->line_count()
                                 ? leading_indent(unit->line_text(anchor_stmt->start_line))
                                 : leading_indent(unit->line_text(log.line));
        std::string rendered =
            java::render_log_line(indent, receiver, log.level, log.message, log.variables);

        java::LogStatement placed = log;
        placed.indent = indent;
        placed.raw = {rendered};
        pending[log.file].push_back({anchor, rendered, static_cast<int>(out.inserted.size())});
        InsertedLog entry;
        entry.log = placed;
        entry.anchor = anchor;
        entry.input_index = static_cast<int>(log_index);
        entry.rendered = rendered;
        out.inserted.push_back(std::move(entry));
    }

    // Compose each file in one pass: additions land directly after their
    // original anchor line, which is exactly what applying them in descending
    // anchor order produces.
    for (const auto& unit : model.files) {
        auto pit = pending.find(unit.path);
        if (pit == pending.end()) {
            out.files[unit.path] = unit.text;
            continue;
        }
        LineBuffer original = LineBuffer::from_text(unit.text);
        const int real_lines = static_cast<int>(original.lines.size());
        std::vector<std::vector<Pending>> at_line(static_cast<size_t>(real_lines) + 1);
        for (const auto& p : pit->second)
            at_line[static_cast<size_t>(std::clamp(p.after_line, 0, real_lines))].push_back(p);

        LineBuffer composed;
        composed.trailing_newline = original.trailing_newline;
        std::vector<int> tags;  // parallel to composed.lines; log index or -1
        for (int ln = 0; ln <= real_lines; ln++) {
            if (ln > 0) {
                composed.lines.push_back(original.lines[static_cast<size_t>(ln) - 1]);
                tags.push_back(-2);  // untouched
            }
            for (const auto& p : at_line[static_cast<size_t>(ln)]) {
                composed.lines.push_back(p.text);
                tags.push_back(p.log_index >= 0 ? p.log_index : -1);
            }
        }
        for (size_t i = 0; i < composed.lines.size(); i++) {
            if (tags[i] == -2) continue;
            out.added_lines[unit.path].push_back(static_cast<int>(i) + 1);
            // Tags index out.inserted, which is still in acceptance order here.
            if (tags[i] >= 0) out.inserted[static_cast<size_t>(tags[i])].log.line =
                static_cast<int>(i) + 1;
        }
        out.files[unit.path] = composed.to_text();

        // The augmented file must still parse; a failure is a bug worth
        // surfacing to the caller rather than crashing the run.
        try {
            java::CodeModel scratch;
            java::parse_source(scratch, unit.path, out.files[unit.path]);
        } catch (const Error& e) {
            diag(out.diagnostics, "insert",
                 "augmented " + unit.path + " no longer parses: " + e.what());
        }
    }

    std::stable_sort(out.inserted.begin(), out.inserted.end(),
                     [](const InsertedLog& a, const InsertedLog& b) {
                         if (a.log.file != b.log.file) return a.log.file < b.log.file;
                         return a.log.line < b.log.line;
                     });
    return out;
}

// Deletes the given (1-indexed) lines from `text`; the inverse of the
// insertions recorded in InsertOutcome::added_lines.
inline std::string remove_lines(const std::string& text, std::vector<int> lines) {
    LineBuffer buf = LineBuffer::from_text(text);
    std::sort(lines.begin(), lines.end());
    for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
        if (*it >= 1 && *it <= static_cast<int>(buf.lines.size()))
            buf.lines.erase(buf.lines.begin() + (*it - 1));
    }
    return buf.to_text();
}

}  // namespace logsmith::pipeline
