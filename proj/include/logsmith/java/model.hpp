#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "logsmith/common.hpp"

namespace logsmith::java {

// One parsed file. line_starts is 1-indexed (line_starts[1] == 0).
struct SourceUnit {
    std::string path;  // relative to the project root
    std::string text;
    std::vector<size_t> line_starts;

    static std::vector<size_t> index_lines(std::string_view text) {
        std::vector<size_t> starts;
        starts.push_back(0);  // unused slot so lines are 1-indexed
        starts.push_back(0);
        for (size_t i = 0; i < text.size(); i++)
            if (text[i] == '\n') starts.push_back(i + 1);
        return starts;
    }

    int line_count() const { return static_cast<int>(line_starts.size()) - 1; }

    std::string line_text(int line) const {
        if (line < 1 || line > line_count()) return "";
        size_t a = line_starts[static_cast<size_t>(line)];
        size_t b = line + 1 <= line_count() ? line_starts[static_cast<size_t>(line) + 1] : text.size();
        while (b > a && (text[b - 1] == '\n' || text[b - 1] == '\r')) b--;
        return text.substr(a, b - a);
    }
};

enum class StmtKind {
    Expr, LocalDecl, If, While, DoWhile, For, ForEach, Try, Switch, Return,
    Throw, Break, Continue, Assert, Block, Synchronized, Empty, CatchHeader
};

inline const char* stmt_kind_name(StmtKind k) {
    switch (k) {
        case StmtKind::Expr: return "expr";
        case StmtKind::LocalDecl: return "decl";
        case StmtKind::If: return "if";
        case StmtKind::While: return "while";
        case StmtKind::DoWhile: return "do";
        case StmtKind::For: return "for";
        case StmtKind::ForEach: return "foreach";
        case StmtKind::Try: return "try";
        case StmtKind::Switch: return "switch";
        case StmtKind::Return: return "return";
        case StmtKind::Throw: return "throw";
        case StmtKind::Break: return "break";
        case StmtKind::Continue: return "continue";
        case StmtKind::Assert: return "assert";
        case StmtKind::Block: return "block";
        case StmtKind::Synchronized: return "synchronized";
        case StmtKind::Empty: return "empty";
        case StmtKind::CatchHeader: return "catch";
    }
    return "?";
}

struct CallSite {
    std::string receiver;  // dotted receiver text, may be empty
    std::string name;      // method simple name (class name for constructor calls)
    int arity = 0;
    int line = 0;
    bool is_constructor = false;
    std::vector<std::string> arg_texts;
};

// One structured child region of a composite statement.
struct Arm {
    std::string label;  // then / else / body / try / catch / finally
    int start_line = 0;
    int end_line = 0;
    std::string param;       // catch parameter name
    std::string param_type;  // catch parameter type text
};

struct Statement {
    StmtKind kind = StmtKind::Empty;
    int start_line = 0;
    int end_line = 0;
    int header_end_line = 0;  // line where the header/expression syntactically ends
    std::string text;         // leaf: whole statement; composite: header text
    bool else_if_child = false;  // an `if` hanging off an else keyword
    std::vector<std::string> defs;
    std::vector<std::string> uses;
    std::vector<CallSite> calls;
    std::vector<Arm> arm_info;               // parallel to arms
    std::vector<std::vector<Statement>> arms;
    std::string decl_type;  // LocalDecl: declared type text
};

struct Param {
    std::string type;
    std::string name;
};

struct MethodUnit {
    std::string id;  // pkg.Cls.name(type,type)
    std::string name;
    std::string class_id;
    std::string file;
    std::string return_type;
    std::vector<Param> params;
    bool is_static = false;
    bool is_abstract = false;  // or interface method without body
    bool is_default = false;   // interface default method
    int decl_line = 0;         // first line of the declaration
    int body_start_line = 0;   // line of the opening brace
    int body_end_line = 0;     // line of the closing brace
    std::string signature;     // one-line rendering, e.g. "long getSize()"
    std::string summary;       // first line of the doc comment, if any
    std::vector<Statement> body;

    std::pair<int, int> body_span() const { return {decl_line, body_end_line}; }
};

struct FieldInfo {
    std::string name;
    std::string type;
    bool is_static = false;
    int line = 0;
    std::string init_text;
};

struct ImportInfo {
    std::string path;      // a.b.C or a.b.C.member
    bool is_static = false;
    bool wildcard = false;
    int line = 0;
};

struct ClassInfo {
    std::string id;    // pkg.Outer.Inner
    std::string name;  // simple name
    std::string kind;  // class / interface / enum / record
    std::string file;
    std::string package_name;
    std::string extends_name;              // raw name as written, may be empty
    std::vector<std::string> implements;   // raw names
    std::vector<FieldInfo> fields;
    std::vector<size_t> method_indices;    // into CodeModel::methods
    int start_line = 0;
    int end_line = 0;
    int body_start_line = 0;  // line of the opening brace
};

struct CodeModel {
    std::vector<SourceUnit> files;
    std::vector<ClassInfo> classes;
    std::vector<MethodUnit> methods;
    std::vector<ImportInfo> imports;              // all files pooled
    std::map<std::string, std::vector<ImportInfo>> imports_by_file;
    Diagnostics diagnostics;

    std::map<std::string, size_t> class_by_id;
    std::map<std::string, size_t> file_by_path;
    std::map<std::string, size_t> method_by_id;
    std::multimap<std::string, size_t> methods_by_name;  // simple name -> index

    const SourceUnit* file(const std::string& path) const {
        auto it = file_by_path.find(path);
        return it == file_by_path.end() ? nullptr : &files[it->second];
    }

    const ClassInfo* class_of(const std::string& id) const {
        auto it = class_by_id.find(id);
        return it == class_by_id.end() ? nullptr : &classes[it->second];
    }

    const MethodUnit* method(const std::string& id) const {
        auto it = method_by_id.find(id);
        return it == method_by_id.end() ? nullptr : &methods[it->second];
    }

    // Resolves a raw type name written inside `from` to an in-project class id.
    const ClassInfo* resolve_class(const std::string& raw_name, const ClassInfo* from) const {
        if (raw_name.empty()) return nullptr;
        std::string base = raw_name;
        auto lt = base.find('<');
        if (lt != std::string::npos) base = trim(base.substr(0, lt));
        if (class_by_id.count(base)) return &classes[class_by_id.at(base)];
        if (from) {
            std::string qualified = from->package_name.empty() ? base : from->package_name + "." + base;
            if (class_by_id.count(qualified)) return &classes[class_by_id.at(qualified)];
            std::string nested = from->id + "." + base;
            if (class_by_id.count(nested)) return &classes[class_by_id.at(nested)];
        }
        // single match on simple name anywhere in the project
        const ClassInfo* found = nullptr;
        for (const auto& c : classes) {
            if (c.name == base) {
                if (found) return nullptr;  // ambiguous
                found = &c;
            }
        }
        return found;
    }

    void rebuild_indexes() {
        class_by_id.clear();
        file_by_path.clear();
        method_by_id.clear();
        methods_by_name.clear();
        for (size_t i = 0; i < classes.size(); i++) class_by_id[classes[i].id] = i;
        for (size_t i = 0; i < files.size(); i++) file_by_path[files[i].path] = i;
        for (size_t i = 0; i < methods.size(); i++) {
            method_by_id[methods[i].id] = i;
            methods_by_name.insert({methods[i].name, i});
        }
    }
};

// Walks every statement in a list depth-first, in source order.
template <typename Fn>
void visit_statements(const std::vector<Statement>& stmts, Fn&& fn) {
    for (const auto& s : stmts) {
        fn(s);
        for (const auto& arm : s.arms) visit_statements(arm, fn);
    }
}

}  // namespace logsmith::java
