#pragma once

#include <filesystem>
#include <set>

#include "logsmith/common.hpp"
#include "logsmith/java/lexer.hpp"
#include "logsmith/java/model.hpp"

namespace logsmith::java {

namespace detail {

// Internal parse abort for one file; parse_project records it and moves on.
struct ParseFail {
    std::string message;
    int line;
};

inline bool is_primitive(const std::string& s) {
    static const std::set<std::string> prims = {"boolean", "byte", "char", "short",
                                                "int", "long", "float", "double"};
    return prims.count(s) > 0;
}

inline bool is_modifier(const std::string& s) {
    static const std::set<std::string> mods = {
        "public", "private", "protected", "static", "final", "abstract", "default",
        "native", "synchronized", "transient", "volatile", "strictfp", "sealed"};
    return mods.count(s) > 0;
}

struct Cursor {
    const std::vector<Token>* toks;
    size_t pos = 0;
    std::string_view src;

    const Token& at(size_t i) const {
        return i < toks->size() ? (*toks)[i] : toks->back();
    }
    const Token& cur() const { return at(pos); }
    const Token& peek(size_t n = 1) const { return at(pos + n); }
    bool done() const { return cur().kind == TokKind::End; }
    bool is(const char* text) const { return cur().text == text; }
    bool is_kw(const char* text) const { return cur().kind == TokKind::Keyword && cur().text == text; }
    void advance() { if (!done()) pos++; }

    void expect(const char* text) {
        if (!is(text)) throw ParseFail{std::string("expected '") + text + "', got '" + cur().text + "'", cur().line};
        advance();
    }

    std::string slice(size_t a, size_t b) const {  // token index range [a,b)
        if (a >= b) return "";
        size_t lo = at(a).offset;
        size_t hi = at(b - 1).end;
        return std::string(src.substr(lo, hi - lo));
    }

    // Skips a balanced (...) / [...] / {...} group; pos must be on the opener.
    void skip_balanced() {
        int depth = 0;
        do {
            const std::string& t = cur().text;
            if (t == "(" || t == "[" || t == "{") depth++;
            else if (t == ")" || t == "]" || t == "}") depth--;
            advance();
            if (done() && depth > 0) throw ParseFail{"unbalanced brackets", cur().line};
        } while (depth > 0);
    }

    // Skips <...> treating >>, >>> as multiple closers; pos must be on '<'.
    void skip_generics() {
        int depth = 0;
        while (!done()) {
            const std::string& t = cur().text;
            if (t == "<") depth++;
            else if (t == ">") depth--;
            else if (t == ">>") depth -= 2;
            else if (t == ">>>") depth -= 3;
            else if (t == ";" || t == "{") throw ParseFail{"unterminated type arguments", cur().line};
            advance();
            if (depth <= 0) return;
        }
        throw ParseFail{"unterminated type arguments", cur().line};
    }

    void skip_annotation() {  // pos on '@'
        advance();
        while (cur().kind == TokKind::Ident || cur().kind == TokKind::Keyword) {
            advance();
            if (is(".")) advance();
            else break;
        }
        if (is("(")) skip_balanced();
    }
};

// ---- expression scanning: uses / defs / calls ----

struct ExprScan {
    std::vector<std::string> uses;
    std::vector<std::string> defs;
    std::vector<CallSite> calls;
};

inline void add_unique(std::vector<std::string>& v, const std::string& s) {
    if (s.empty()) return;
    for (const auto& x : v)
        if (x == s) return;
    v.push_back(s);
}

inline void add_use_prefixes(ExprScan& out, const std::string& chain) {
    size_t pos = 0;
    while (true) {
        size_t dot = chain.find('.', pos);
        if (dot == std::string::npos) break;
        add_unique(out.uses, chain.substr(0, dot));
        pos = dot + 1;
    }
    add_unique(out.uses, chain);
}

inline bool is_chain_start(const Token& t) {
    return t.kind == TokKind::Ident ||
           (t.kind == TokKind::Keyword && (t.text == "this" || t.text == "super"));
}

inline bool is_operand_start(const Token& t) {
    if (t.kind == TokKind::Ident || t.kind == TokKind::Number || t.kind == TokKind::String ||
        t.kind == TokKind::Char)
        return true;
    if (t.kind == TokKind::Keyword)
        return t.text == "new" || t.text == "this" || t.text == "super" || t.text == "true" ||
               t.text == "false" || t.text == "null";
    return t.text == "(" || t.text == "!" || t.text == "~";
}

inline bool looks_like_type(const std::string& chain) {
    size_t dot = chain.rfind('.');
    std::string last = dot == std::string::npos ? chain : chain.substr(dot + 1);
    return !last.empty() && std::isupper(static_cast<unsigned char>(last[0]));
}

// Splits the token range of a balanced (...) group into top-level argument
// ranges. `open` is the index of '('; returns the index just past ')'.
inline size_t split_args(const Cursor& c, size_t open, std::vector<std::pair<size_t, size_t>>& args) {
    int depth = 0;
    size_t i = open;
    size_t arg_start = open + 1;
    bool any = false;
    for (;; i++) {
        const Token& t = c.at(i);
        if (t.kind == TokKind::End) throw ParseFail{"unterminated call", t.line};
        const std::string& x = t.text;
        if (x == "(" || x == "[" || x == "{") depth++;
        else if (x == ")" || x == "]" || x == "}") {
            depth--;
            if (depth == 0) break;
        } else if (x == "," && depth == 1) {
            args.push_back({arg_start, i});
            arg_start = i + 1;
            any = true;
        } else if (depth >= 1) {
            any = true;
        }
    }
    if (any || i > open + 1) args.push_back({arg_start, i});
    // drop an empty trailing range from "()"
    if (!args.empty() && args.back().first >= args.back().second) args.pop_back();
    return i + 1;
}

inline void scan_expr_range(const Cursor& c, size_t a, size_t b, ExprScan& out);

inline void record_call(const Cursor& c, size_t open, const std::string& receiver,
                        const std::string& name, bool ctor, ExprScan& out) {
    std::vector<std::pair<size_t, size_t>> args;
    split_args(c, open, args);
    CallSite call;
    call.receiver = receiver;
    call.name = name;
    call.arity = static_cast<int>(args.size());
    call.line = c.at(open).line;
    call.is_constructor = ctor;
    for (auto& [s, e] : args) call.arg_texts.push_back(trim(c.slice(s, e)));
    out.calls.push_back(std::move(call));
}

inline void scan_expr_range(const Cursor& c, size_t a, size_t b, ExprScan& out) {
    size_t i = a;
    while (i < b) {
        const Token& t = c.at(i);
        if (t.kind == TokKind::Keyword) {
            if (t.text == "new") {
                size_t j = i + 1;
                std::string type_chain;
                while (is_chain_start(c.at(j)) || c.at(j).kind == TokKind::Keyword) {
                    if (!(c.at(j).kind == TokKind::Ident)) break;
                    if (!type_chain.empty()) type_chain += ".";
                    type_chain += c.at(j).text;
                    j++;
                    if (c.at(j).text == "." && c.at(j + 1).kind == TokKind::Ident) j++;
                    else break;
                }
                Cursor tmp = c;
                tmp.pos = j;
                if (tmp.is("<")) {
                    tmp.skip_generics();
                    j = tmp.pos;
                }
                if (c.at(j).text == "(" && !type_chain.empty()) {
                    size_t dot = type_chain.rfind('.');
                    std::string simple = dot == std::string::npos ? type_chain : type_chain.substr(dot + 1);
                    record_call(c, j, "", simple, true, out);
                    i = j + 1;  // scan constructor arguments
                    continue;
                }
                i = j;
                continue;
            }
            if (t.text == "instanceof") {
                i++;
                while (c.at(i).kind == TokKind::Ident) {
                    i++;
                    if (c.at(i).text == "." && c.at(i + 1).kind == TokKind::Ident) i++;
                    else break;
                }
                if (c.at(i).text == "<") {
                    Cursor tmp = c;
                    tmp.pos = i;
                    tmp.skip_generics();
                    i = tmp.pos;
                }
                continue;
            }
            if (is_primitive(t.text) && i > a && c.at(i - 1).text == "(" && c.at(i + 1).text == ")") {
                i += 2;  // primitive cast
                continue;
            }
            if (t.text != "this" && t.text != "super") {
                i++;
                continue;
            }
        }
        if (is_chain_start(t)) {
            if (i > a && c.at(i - 1).text == ".") {
                i++;  // member of a computed value; base already recorded
                continue;
            }
            size_t j = i;
            std::string chain = c.at(j).text;
            j++;
            while (c.at(j).text == "." &&
                   (c.at(j + 1).kind == TokKind::Ident ||
                    (c.at(j + 1).kind == TokKind::Keyword && c.at(j + 1).text == "class"))) {
                chain += "." + c.at(j + 1).text;
                j += 2;
            }
            const std::string& next = c.at(j).text;
            bool class_literal = ends_with(chain, ".class");
            // cast: (Type) operand — Type may carry generics / array brackets
            if (i > a && c.at(i - 1).text == "(" && looks_like_type(chain)) {
                size_t k = j;
                if (c.at(k).text == "<") {  // non-throwing balanced <...> scan
                    int depth = 0;
                    size_t g = k;
                    for (; g < b && g < k + 64; g++) {
                        const std::string& x = c.at(g).text;
                        if (x == "<") depth++;
                        else if (x == ">") depth--;
                        else if (x == ">>") depth -= 2;
                        else if (x == ">>>") depth -= 3;
                        else if (x == ";" || x == "{" || x == "}") break;
                        if (depth <= 0) {
                            g++;
                            break;
                        }
                    }
                    if (depth <= 0 && g > k) k = g;
                }
                while (c.at(k).text == "[" && c.at(k + 1).text == "]") k += 2;
                if (c.at(k).text == ")" && k + 1 < b && is_operand_start(c.at(k + 1))) {
                    i = k + 1;
                    continue;
                }
            }
            if (next == "(") {
                size_t dot = chain.rfind('.');
                std::string name = dot == std::string::npos ? chain : chain.substr(dot + 1);
                std::string receiver = dot == std::string::npos ? "" : chain.substr(0, dot);
                record_call(c, j, receiver, name, false, out);
                if (!receiver.empty() && receiver != "this" && receiver != "super")
                    add_use_prefixes(out, receiver);
                i = j + 1;  // scan arguments
                continue;
            }
            if (next == "::") {
                if (!class_literal && !looks_like_type(chain)) add_use_prefixes(out, chain);
                i = j + 2;  // skip the method name
                continue;
            }
            bool prefix_incdec = i > a && (c.at(i - 1).text == "++" || c.at(i - 1).text == "--");
            if (next == "=" || prefix_incdec) {
                add_unique(out.defs, chain);
                if (chain.find('.') != std::string::npos)
                    add_use_prefixes(out, chain.substr(0, chain.rfind('.')));
                if (prefix_incdec) add_use_prefixes(out, chain);
            } else if (next == "++" || next == "--") {
                add_unique(out.defs, chain);
                add_use_prefixes(out, chain);
            } else if (next == "+=" || next == "-=" || next == "*=" || next == "/=" ||
                       next == "%=" || next == "&=" || next == "|=" || next == "^=" ||
                       next == "<<=" || next == ">>=" || next == ">>>=") {
                add_unique(out.defs, chain);
                add_use_prefixes(out, chain);
            } else if (!class_literal) {
                add_use_prefixes(out, chain);
            }
            i = j;
            continue;
        }
        if (t.text == "@") {
            Cursor tmp = c;
            tmp.pos = i;
            tmp.skip_annotation();
            i = tmp.pos;
            continue;
        }
        i++;
    }
}

// ---- statement parsing ----

struct TypeRef {
    std::string text;
    bool ok = false;
};

// Parses a type reference at c.pos: qualified name or primitive, optional
// generics and array brackets. Leaves pos after the type on success.
inline TypeRef parse_type_ref(Cursor& c) {
    TypeRef tr;
    size_t start = c.pos;
    if (c.is_kw("void") || (c.cur().kind == TokKind::Keyword && is_primitive(c.cur().text))) {
        tr.text = c.cur().text;
        c.advance();
    } else if (c.cur().kind == TokKind::Ident) {
        tr.text = c.cur().text;
        c.advance();
        while (c.is(".") && c.peek().kind == TokKind::Ident) {
            tr.text += "." + c.peek().text;
            c.advance();
            c.advance();
        }
        if (c.is("<")) {
            size_t gstart = c.pos;
            try {
                c.skip_generics();
                tr.text += c.slice(gstart, c.pos);
            } catch (const ParseFail&) {
                c.pos = start;
                return tr;
            }
        }
    } else {
        return tr;
    }
    while (c.is("[") && c.peek().text == "]") {
        tr.text += "[]";
        c.advance();
        c.advance();
    }
    if (c.is("...")) {
        tr.text += "...";
        c.advance();
    }
    tr.ok = true;
    return tr;
}

inline std::vector<Statement> parse_statements(Cursor& c, Diagnostics& diags);

inline void finish_leaf(Statement& st, Cursor& c, size_t first, size_t last) {
    st.start_line = c.at(first).line;
    st.end_line = c.at(last).line;
    st.header_end_line = st.end_line;
    st.text = c.slice(first, last + 1);
}

// Parses one statement at c.pos.
inline Statement parse_statement(Cursor& c, Diagnostics& diags) {
    while (c.is("@")) c.skip_annotation();
    // labeled statement: drop the label ('::' is lexed as one token, so a
    // bare ':' after an identifier can only be a label here)
    if (c.cur().kind == TokKind::Ident && c.peek().kind == TokKind::Punct && c.peek().text == ":") {
        c.advance();
        c.advance();
        return parse_statement(c, diags);
    }
    Statement st;
    size_t first = c.pos;
    const Token& t = c.cur();

    auto scan_into = [&](size_t a, size_t b) {
        ExprScan es;
        scan_expr_range(c, a, b, es);
        for (auto& u : es.uses) add_unique(st.uses, u);
        for (auto& d : es.defs) add_unique(st.defs, d);
        for (auto& cl : es.calls) st.calls.push_back(cl);
    };

    // scans from current pos to ';' at depth 0, inclusive; returns [a, semi]
    auto scan_to_semi = [&]() -> std::pair<size_t, size_t> {
        size_t a = c.pos;
        int depth = 0;
        while (!c.done()) {
            const std::string& x = c.cur().text;
            if (x == "(" || x == "[" || x == "{") depth++;
            else if (x == ")" || x == "]" || x == "}") {
                if (depth == 0) throw ParseFail{"unexpected '" + x + "'", c.cur().line};
                depth--;
            } else if (x == ";" && depth == 0) {
                size_t semi = c.pos;
                c.advance();
                return {a, semi};
            }
            c.advance();
        }
        throw ParseFail{"missing ';'", c.cur().line};
    };

    // parses a sub-statement and records it as one arm
    auto parse_arm = [&](const std::string& label) {
        Arm arm;
        arm.label = label;
        std::vector<Statement> body;
        if (c.is("{")) {
            arm.start_line = c.cur().line;
            c.advance();
            body = parse_statements(c, diags);
            arm.end_line = c.cur().line;
            c.expect("}");
        } else {
            Statement inner = parse_statement(c, diags);
            arm.start_line = inner.start_line;
            arm.end_line = inner.end_line;
            body.push_back(std::move(inner));
        }
        st.arm_info.push_back(arm);
        st.arms.push_back(std::move(body));
    };

    if (t.text == ";") {
        st.kind = StmtKind::Empty;
        finish_leaf(st, c, first, first);
        c.advance();
        return st;
    }
    if (t.text == "{") {
        st.kind = StmtKind::Block;
        Arm arm;
        arm.label = "body";
        arm.start_line = t.line;
        c.advance();
        auto body = parse_statements(c, diags);
        arm.end_line = c.cur().line;
        st.start_line = arm.start_line;
        st.end_line = arm.end_line;
        st.header_end_line = arm.start_line;
        c.expect("}");
        st.arm_info.push_back(arm);
        st.arms.push_back(std::move(body));
        return st;
    }

    if (t.kind == TokKind::Keyword) {
        const std::string& kw = t.text;
        if (kw == "if") {
            st.kind = StmtKind::If;
            st.start_line = t.line;
            c.advance();
            size_t open = c.pos;
            if (!c.is("(")) throw ParseFail{"expected '(' after if", c.cur().line};
            c.skip_balanced();
            size_t close = c.pos - 1;
            scan_into(open + 1, close);
            st.text = "if " + c.slice(open, close + 1);
            st.header_end_line = c.is("{") ? c.cur().line : c.at(close).line;
            parse_arm("then");
            if (c.is_kw("else")) {
                c.advance();
                if (c.is_kw("if")) {
                    Arm arm;
                    arm.label = "else";
                    Statement nested = parse_statement(c, diags);
                    nested.else_if_child = true;
                    arm.start_line = nested.start_line;
                    arm.end_line = nested.end_line;
                    st.arm_info.push_back(arm);
                    st.arms.push_back({std::move(nested)});
                } else {
                    parse_arm("else");
                }
            }
            st.end_line = st.arm_info.back().end_line;
            return st;
        }
        if (kw == "while") {
            st.kind = StmtKind::While;
            st.start_line = t.line;
            c.advance();
            size_t open = c.pos;
            if (!c.is("(")) throw ParseFail{"expected '(' after while", c.cur().line};
            c.skip_balanced();
            scan_into(open + 1, c.pos - 1);
            st.text = "while " + c.slice(open, c.pos);
            st.header_end_line = c.is("{") ? c.cur().line : c.at(c.pos - 1).line;
            parse_arm("body");
            st.end_line = st.arm_info.back().end_line;
            return st;
        }
        if (kw == "do") {
            st.kind = StmtKind::DoWhile;
            st.start_line = t.line;
            c.advance();
            parse_arm("body");
            if (!c.is_kw("while")) throw ParseFail{"expected while after do body", c.cur().line};
            int cond_line = c.cur().line;
            c.advance();
            size_t open = c.pos;
            if (!c.is("(")) throw ParseFail{"expected '(' after do..while", c.cur().line};
            c.skip_balanced();
            scan_into(open + 1, c.pos - 1);
            st.text = "do..while " + c.slice(open, c.pos);
            c.expect(";");
            st.header_end_line = cond_line;
            st.end_line = cond_line;
            return st;
        }
        if (kw == "for") {
            st.start_line = t.line;
            c.advance();
            if (!c.is("(")) throw ParseFail{"expected '(' after for", c.cur().line};
            size_t open = c.pos;
            c.skip_balanced();
            size_t close = c.pos - 1;
            // decide enhanced-for: ':' at paren depth 1 before any ';'
            bool foreach_form = false;
            {
                int depth = 0;
                for (size_t i = open; i <= close; i++) {
                    const std::string& x = c.at(i).text;
                    if (x == "(" || x == "[") depth++;
                    else if (x == ")" || x == "]") depth--;
                    else if (x == ";" && depth == 1) break;
                    else if (x == ":" && depth == 1) {
                        foreach_form = true;
                        break;
                    }
                }
            }
            if (foreach_form) {
                st.kind = StmtKind::ForEach;
                // ( [final] Type name : expr )
                Cursor hc = c;
                hc.pos = open + 1;
                while (hc.is_kw("final") || hc.is("@")) {
                    if (hc.is("@")) hc.skip_annotation();
                    else hc.advance();
                }
                TypeRef tr = parse_type_ref(hc);
                if (tr.ok && hc.cur().kind == TokKind::Ident) {
                    add_unique(st.defs, hc.cur().text);
                    st.decl_type = tr.text;
                    hc.advance();
                }
                if (hc.is(":")) scan_into(hc.pos + 1, close);
            } else {
                st.kind = StmtKind::For;
                // init ; cond ; update — init may be a declaration
                std::vector<size_t> semis;
                int depth = 0;
                for (size_t i = open; i <= close; i++) {
                    const std::string& x = c.at(i).text;
                    if (x == "(" || x == "[" || x == "{") depth++;
                    else if (x == ")" || x == "]" || x == "}") depth--;
                    else if (x == ";" && depth == 1) semis.push_back(i);
                }
                size_t init_a = open + 1, init_b = semis.size() > 0 ? semis[0] : close;
                size_t cond_a = semis.size() > 0 ? semis[0] + 1 : close;
                size_t cond_b = semis.size() > 1 ? semis[1] : close;
                size_t upd_a = semis.size() > 1 ? semis[1] + 1 : close;
                // init: try declaration form
                Cursor ic = c;
                ic.pos = init_a;
                while (ic.is_kw("final")) ic.advance();
                TypeRef tr = parse_type_ref(ic);
                if (tr.ok && ic.cur().kind == TokKind::Ident && ic.pos < init_b) {
                    st.decl_type = tr.text;
                    while (ic.cur().kind == TokKind::Ident && ic.pos < init_b) {
                        add_unique(st.defs, ic.cur().text);
                        ic.advance();
                        if (ic.is("=")) {
                            size_t e = ic.pos + 1;
                            int d2 = 0;
                            while (e < init_b) {
                                const std::string& x = c.at(e).text;
                                if (x == "(" || x == "[" || x == "{") d2++;
                                else if (x == ")" || x == "]" || x == "}") d2--;
                                else if (x == "," && d2 == 0) break;
                                e++;
                            }
                            scan_into(ic.pos + 1, e);
                            ic.pos = e;
                        }
                        if (ic.is(",")) ic.advance();
                        else break;
                    }
                } else {
                    scan_into(init_a, init_b);
                }
                scan_into(cond_a, cond_b);
                scan_into(upd_a, close);
            }
            st.text = "for " + c.slice(open, close + 1);
            st.header_end_line = c.is("{") ? c.cur().line : c.at(close).line;
            parse_arm("body");
            st.end_line = st.arm_info.back().end_line;
            return st;
        }
        if (kw == "try") {
            st.kind = StmtKind::Try;
            st.start_line = t.line;
            st.text = "try";
            c.advance();
            if (c.is("(")) {  // try-with-resources
                size_t open = c.pos;
                c.skip_balanced();
                size_t close = c.pos - 1;
                Cursor rc = c;
                rc.pos = open + 1;
                while (rc.pos < close) {
                    while (rc.is_kw("final") || rc.is("@")) {
                        if (rc.is("@")) rc.skip_annotation();
                        else rc.advance();
                    }
                    TypeRef tr = parse_type_ref(rc);
                    if (tr.ok && rc.cur().kind == TokKind::Ident) {
                        add_unique(st.defs, rc.cur().text);
                        rc.advance();
                    }
                    if (rc.is("=")) {
                        size_t e = rc.pos + 1;
                        int d2 = 0;
                        while (e < close) {
                            const std::string& x = c.at(e).text;
                            if (x == "(" || x == "[" || x == "{") d2++;
                            else if (x == ")" || x == "]" || x == "}") d2--;
                            else if (x == ";" && d2 == 0) break;
                            e++;
                        }
                        scan_into(rc.pos + 1, e);
                        rc.pos = e;
                    }
                    if (rc.is(";")) rc.advance();
                    else break;
                }
            }
            st.header_end_line = c.is("{") ? c.cur().line : st.start_line;
            if (!c.is("{")) throw ParseFail{"expected '{' after try", c.cur().line};
            parse_arm("try");
            while (c.is_kw("catch")) {
                int catch_line = c.cur().line;
                c.advance();
                if (!c.is("(")) throw ParseFail{"expected '(' after catch", c.cur().line};
                size_t open = c.pos;
                c.skip_balanced();
                size_t close = c.pos - 1;
                // ( [final] Type (| Type)* name )
                Cursor pc = c;
                pc.pos = open + 1;
                while (pc.is_kw("final")) pc.advance();
                std::string type_text;
                TypeRef tr = parse_type_ref(pc);
                if (tr.ok) type_text = tr.text;
                while (pc.is("|")) {
                    pc.advance();
                    TypeRef more = parse_type_ref(pc);
                    if (more.ok) type_text += "|" + more.text;
                }
                std::string param;
                if (pc.cur().kind == TokKind::Ident && pc.pos < close) param = pc.cur().text;
                if (!c.is("{")) throw ParseFail{"expected '{' after catch header", c.cur().line};
                size_t arm_index = st.arms.size();
                parse_arm("catch");
                st.arm_info[arm_index].param = param;
                st.arm_info[arm_index].param_type = type_text;
                // the parameter definition node sits on the catch header line
                Statement header;
                header.kind = StmtKind::CatchHeader;
                header.start_line = catch_line;
                header.end_line = catch_line;
                header.header_end_line = catch_line;
                header.text = "catch (" + type_text + (param.empty() ? "" : " " + param) + ")";
                if (!param.empty()) header.defs.push_back(param);
                st.arms[arm_index].insert(st.arms[arm_index].begin(), std::move(header));
            }
            if (c.is_kw("finally")) {
                c.advance();
                if (!c.is("{")) throw ParseFail{"expected '{' after finally", c.cur().line};
                parse_arm("finally");
            }
            st.end_line = st.arm_info.back().end_line;
            return st;
        }
        if (kw == "switch") {
            st.kind = StmtKind::Switch;
            st.start_line = t.line;
            c.advance();
            size_t open = c.pos;
            if (!c.is("(")) throw ParseFail{"expected '(' after switch", c.cur().line};
            c.skip_balanced();
            scan_into(open + 1, c.pos - 1);
            if (!c.is("{")) throw ParseFail{"expected '{' after switch selector", c.cur().line};
            size_t body_open = c.pos;
            c.skip_balanced();
            // opaque body: harvest uses/defs/calls without statement structure
            scan_into(body_open + 1, c.pos - 1);
            finish_leaf(st, c, first, c.pos - 1);
            st.start_line = t.line;
            return st;
        }
        if (kw == "synchronized") {
            st.kind = StmtKind::Synchronized;
            st.start_line = t.line;
            c.advance();
            if (c.is("(")) {
                size_t open = c.pos;
                c.skip_balanced();
                scan_into(open + 1, c.pos - 1);
                st.text = "synchronized " + c.slice(open, c.pos);
            }
            st.header_end_line = c.is("{") ? c.cur().line : st.start_line;
            parse_arm("body");
            st.end_line = st.arm_info.back().end_line;
            return st;
        }
        if (kw == "return" || kw == "throw" || kw == "assert") {
            st.kind = kw == "return" ? StmtKind::Return
                      : kw == "throw" ? StmtKind::Throw
                                      : StmtKind::Assert;
            c.advance();
            auto [a, semi] = scan_to_semi();
            scan_into(a, semi);
            finish_leaf(st, c, first, semi);
            return st;
        }
        if (kw == "break" || kw == "continue") {
            st.kind = kw == "break" ? StmtKind::Break : StmtKind::Continue;
            c.advance();
            if (c.cur().kind == TokKind::Ident) c.advance();  // label
            size_t semi = c.pos;
            c.expect(";");
            finish_leaf(st, c, first, semi);
            return st;
        }
        if (kw == "class" || kw == "interface" || kw == "enum") {
            // local class: skip wholesale
            while (!c.done() && !c.is("{")) c.advance();
            if (c.is("{")) c.skip_balanced();
            st.kind = StmtKind::Empty;
            finish_leaf(st, c, first, c.pos > first ? c.pos - 1 : first);
            return st;
        }
    }

    // declaration or expression statement
    auto [a, semi] = scan_to_semi();
    // try declaration: [final] Type name (= ...)? (, name (= ...)?)* ;
    Cursor dc = c;
    dc.pos = a;
    while (dc.is_kw("final") || dc.is("@")) {
        if (dc.is("@")) dc.skip_annotation();
        else dc.advance();
    }
    TypeRef tr = parse_type_ref(dc);
    bool is_decl = false;
    if (tr.ok && dc.cur().kind == TokKind::Ident && dc.pos < semi) {
        size_t after_name = dc.pos + 1;
        const std::string& nx = c.at(after_name).text;
        if (after_name >= semi || nx == "=" || nx == "," || nx == "[") is_decl = true;
    }
    if (is_decl) {
        st.kind = StmtKind::LocalDecl;
        st.decl_type = tr.text;
        while (dc.cur().kind == TokKind::Ident && dc.pos < semi) {
            add_unique(st.defs, dc.cur().text);
            dc.advance();
            while (dc.is("[") && dc.peek().text == "]") {
                dc.advance();
                dc.advance();
            }
            if (dc.is("=")) {
                size_t e = dc.pos + 1;
                int d2 = 0;
                while (e < semi) {
                    const std::string& x = c.at(e).text;
                    if (x == "(" || x == "[" || x == "{") d2++;
                    else if (x == ")" || x == "]" || x == "}") d2--;
                    else if (x == "," && d2 == 0) break;
                    e++;
                }
                scan_into(dc.pos + 1, e);
                dc.pos = e;
            }
            if (dc.is(",")) dc.advance();
            else break;
        }
    } else {
        st.kind = StmtKind::Expr;
        scan_into(a, semi);
    }
    finish_leaf(st, c, first, semi);
    return st;
}

inline std::vector<Statement> parse_statements(Cursor& c, Diagnostics& diags) {
    std::vector<Statement> out;
    while (!c.done() && !c.is("}")) {
        out.push_back(parse_statement(c, diags));
    }
    return out;
}

// ---- compilation-unit parsing ----

struct UnitContext {
    CodeModel* model;
    const LexResult* lexed;
    std::string file;
    std::string package_name;
};

// First line of the doc/line comment that ends directly above `line`, if any.
inline std::string doc_summary_above(const LexResult& lexed, int line) {
    for (auto it = lexed.comments.rbegin(); it != lexed.comments.rend(); ++it) {
        if (it->end_line == line - 1) {
            std::string text = it->text;
            // strip comment markers from the first content line
            for (auto& ln : split(text, '\n')) {
                std::string s = trim(ln);
                while (!s.empty() && (s[0] == '/' || s[0] == '*')) s = trim(s.substr(1));
                if (!s.empty()) return s;
            }
            return "";
        }
        if (it->end_line < line - 1) break;
    }
    return "";
}

inline std::string simple_type_name(const std::string& type_text) {
    std::string base = type_text;
    size_t lt = base.find('<');
    if (lt != std::string::npos) base = base.substr(0, lt);
    size_t arr = base.find('[');
    if (arr != std::string::npos) base = base.substr(0, arr);
    size_t dots = base.find("...");
    if (dots != std::string::npos) base = base.substr(0, dots);
    size_t dot = base.rfind('.');
    if (dot != std::string::npos) base = base.substr(dot + 1);
    return trim(base);
}

// Like simple_type_name but keeps the package qualifier, so out-of-project
// supertypes stay recognizable in diagnostics (e.g. "com.vendor.Widget").
inline std::string qualified_type_name(const std::string& type_text) {
    std::string base = type_text;
    size_t lt = base.find('<');
    if (lt != std::string::npos) base = base.substr(0, lt);
    size_t arr = base.find('[');
    if (arr != std::string::npos) base = base.substr(0, arr);
    size_t dots = base.find("...");
    if (dots != std::string::npos) base = base.substr(0, dots);
    return trim(base);
}

inline void parse_type_decl(Cursor& c, UnitContext& ctx, const std::string& outer_id,
                            Diagnostics& diags);

// Parses one member given pre-consumed modifiers; cursor sits on the return
// type / name token.
inline void parse_member(Cursor& c, UnitContext& ctx, ClassInfo& cls,
                         const std::set<std::string>& mods, int decl_line, Diagnostics& diags) {
    bool ctor = c.cur().kind == TokKind::Ident && c.cur().text == cls.name && c.peek().text == "(";
    std::string return_type;
    if (!ctor) {
        TypeRef tr = parse_type_ref(c);
        if (!tr.ok) throw ParseFail{"expected member type, got '" + c.cur().text + "'", c.cur().line};
        return_type = tr.text;
    }
    if (!ctor && c.cur().kind != TokKind::Ident)
        throw ParseFail{"expected member name, got '" + c.cur().text + "'", c.cur().line};
    std::string name = c.cur().text;
    c.advance();

    if (c.is("(")) {
        MethodUnit m;
        m.name = name;
        m.class_id = cls.id;
        m.file = ctx.file;
        m.return_type = ctor ? "" : return_type;
        m.is_static = mods.count("static") > 0;
        m.is_default = mods.count("default") > 0;
        m.is_abstract = mods.count("abstract") > 0;
        m.decl_line = decl_line;
        size_t open = c.pos;
        c.skip_balanced();
        size_t close = c.pos - 1;
        // parameters
        Cursor pc = c;
        pc.pos = open + 1;
        while (pc.pos < close) {
            while (pc.is_kw("final") || pc.is("@")) {
                if (pc.is("@")) pc.skip_annotation();
                else pc.advance();
            }
            TypeRef tr = parse_type_ref(pc);
            if (!tr.ok) break;
            Param p;
            p.type = tr.text;
            if (pc.cur().kind == TokKind::Ident) {
                p.name = pc.cur().text;
                pc.advance();
            }
            while (pc.is("[") && pc.peek().text == "]") {
                p.type += "[]";
                pc.advance();
                pc.advance();
            }
            m.params.push_back(p);
            if (pc.is(",")) pc.advance();
            else break;
        }
        if (c.is_kw("throws")) {
            c.advance();
            while (c.cur().kind == TokKind::Ident) {
                parse_type_ref(c);
                if (c.is(",")) c.advance();
                else break;
            }
        }
        // identity: pkg.Cls.name(T1,T2)
        std::string param_sig;
        for (size_t i = 0; i < m.params.size(); i++) {
            if (i) param_sig += ",";
            param_sig += simple_type_name(m.params[i].type);
        }
        m.id = cls.id + "." + m.name + "(" + param_sig + ")";
        {
            std::string sig;
            if (!m.return_type.empty()) sig += m.return_type + " ";
            sig += m.name + "(";
            for (size_t i = 0; i < m.params.size(); i++) {
                if (i) sig += ", ";
                sig += m.params[i].type + " " + m.params[i].name;
            }
            sig += ")";
            m.signature = sig;
        }
        m.summary = doc_summary_above(*ctx.lexed, decl_line);
        if (c.is(";")) {  // abstract / interface method without body
            m.body_start_line = 0;
            m.body_end_line = 0;
            if (!m.is_abstract && cls.kind == "interface" && !m.is_default && !m.is_static)
                m.is_abstract = true;
            c.advance();
        } else if (c.is("{")) {
            m.body_start_line = c.cur().line;
            c.advance();
            m.body = parse_statements(c, diags);
            m.body_end_line = c.cur().line;
            c.expect("}");
        } else {
            throw ParseFail{"expected method body or ';'", c.cur().line};
        }
        cls.method_indices.push_back(ctx.model->methods.size());
        ctx.model->methods.push_back(std::move(m));
        return;
    }

    // field declaration(s)
    if (ctor) throw ParseFail{"expected '(' after constructor name", c.cur().line};
    while (true) {
        FieldInfo f;
        f.name = name;
        f.type = return_type;
        f.is_static = mods.count("static") > 0;
        f.line = decl_line;
        while (c.is("[") && c.peek().text == "]") {
            f.type += "[]";
            c.advance();
            c.advance();
        }
        if (c.is("=")) {
            c.advance();
            size_t a = c.pos;
            int depth = 0;
            while (!c.done()) {
                const std::string& x = c.cur().text;
                if (x == "(" || x == "[" || x == "{") depth++;
                else if (x == ")" || x == "]" || x == "}") depth--;
                else if ((x == ";" || x == ",") && depth == 0) break;
                c.advance();
            }
            f.init_text = trim(c.slice(a, c.pos));
        }
        cls.fields.push_back(std::move(f));
        if (c.is(",")) {
            c.advance();
            if (c.cur().kind != TokKind::Ident)
                throw ParseFail{"expected field name after ','", c.cur().line};
            name = c.cur().text;
            c.advance();
            continue;
        }
        c.expect(";");
        break;
    }
}

inline void parse_type_decl(Cursor& c, UnitContext& ctx, const std::string& outer_id,
                            Diagnostics& diags) {
    int start_line = c.cur().line;
    std::string kind = c.cur().text;  // class | interface | enum | record
    c.advance();
    if (c.cur().kind != TokKind::Ident) throw ParseFail{"expected type name", c.cur().line};
    ClassInfo cls;
    cls.kind = kind;
    cls.name = c.cur().text;
    cls.file = ctx.file;
    cls.package_name = ctx.package_name;
    cls.id = outer_id.empty()
                 ? (ctx.package_name.empty() ? cls.name : ctx.package_name + "." + cls.name)
                 : outer_id + "." + cls.name;
    cls.start_line = start_line;
    c.advance();
    if (c.is("<")) c.skip_generics();
    if (kind == "record" && c.is("(")) {
        size_t open = c.pos;
        c.skip_balanced();
        size_t close = c.pos - 1;
        Cursor pc = c;
        pc.pos = open + 1;
        while (pc.pos < close) {
            TypeRef tr = parse_type_ref(pc);
            if (!tr.ok) break;
            FieldInfo f;
            f.type = tr.text;
            if (pc.cur().kind == TokKind::Ident) {
                f.name = pc.cur().text;
                pc.advance();
            }
            f.line = start_line;
            cls.fields.push_back(f);
            if (pc.is(",")) pc.advance();
            else break;
        }
    }
    if (c.is_kw("extends")) {
        c.advance();
        TypeRef tr = parse_type_ref(c);
        if (!tr.ok) throw ParseFail{"expected supertype after extends", c.cur().line};
        if (kind == "interface") {
            // interfaces may extend several; default methods flow through all
            cls.implements.push_back(qualified_type_name(tr.text));
            while (c.is(",")) {
                c.advance();
                TypeRef more = parse_type_ref(c);
                if (more.ok) cls.implements.push_back(qualified_type_name(more.text));
            }
        } else {
            cls.extends_name = qualified_type_name(tr.text);
        }
    }
    if (c.is_kw("implements")) {
        c.advance();
        while (true) {
            TypeRef tr = parse_type_ref(c);
            if (!tr.ok) break;
            cls.implements.push_back(qualified_type_name(tr.text));
            if (c.is(",")) c.advance();
            else break;
        }
    }
    if (c.cur().kind == TokKind::Ident && c.cur().text == "permits") {
        c.advance();
        while (true) {
            TypeRef tr = parse_type_ref(c);
            if (!tr.ok) break;
            if (c.is(",")) c.advance();
            else break;
        }
    }
    if (!c.is("{")) throw ParseFail{"expected '{' in type declaration", c.cur().line};
    cls.body_start_line = c.cur().line;
    c.advance();

    size_t cls_index = ctx.model->classes.size();
    ctx.model->classes.push_back(cls);

    if (kind == "enum") {
        // enum constants: NAME [(args)] [{ body }] (, ...)* until ';' or '}'
        while (!c.done() && !c.is("}") && !c.is(";")) {
            while (c.is("@")) c.skip_annotation();
            if (c.cur().kind != TokKind::Ident) break;
            FieldInfo f;
            f.name = c.cur().text;
            f.type = cls.name;
            f.is_static = true;
            f.line = c.cur().line;
            ctx.model->classes[cls_index].fields.push_back(f);
            c.advance();
            if (c.is("(")) c.skip_balanced();
            if (c.is("{")) c.skip_balanced();
            if (c.is(",")) c.advance();
            else break;
        }
        if (c.is(";")) c.advance();
    }

    while (!c.done() && !c.is("}")) {
        while (c.is("@")) c.skip_annotation();
        if (c.is("}")) break;
        if (c.is(";")) {
            c.advance();
            continue;
        }
        int member_line = c.cur().line;
        std::set<std::string> mods;
        while (c.cur().kind == TokKind::Keyword && is_modifier(c.cur().text)) {
            mods.insert(c.cur().text);
            c.advance();
            while (c.is("@")) c.skip_annotation();
        }
        if (c.is("{")) {  // initializer block (static or instance)
            c.skip_balanced();
            continue;
        }
        if (c.is_kw("class") || c.is_kw("interface") || c.is_kw("enum") ||
            (c.cur().kind == TokKind::Ident && c.cur().text == "record" &&
             c.peek().kind == TokKind::Ident)) {
            parse_type_decl(c, ctx, ctx.model->classes[cls_index].id, diags);
            continue;
        }
        if (c.is("<")) c.skip_generics();  // generic method type parameters
        parse_member(c, ctx, ctx.model->classes[cls_index], mods, member_line, diags);
    }
    ctx.model->classes[cls_index].end_line = c.cur().line;
    c.expect("}");
}

}  // namespace detail

// Parses one source file into `model`. Throws common Error("parse_error") on
// unrecoverable structural problems; lexer issues become diagnostics.
inline void parse_source(CodeModel& model, const std::string& path, const std::string& text) {
    SourceUnit unit;
    unit.path = path;
    unit.text = text;
    unit.line_starts = SourceUnit::index_lines(text);

    LexResult lexed = lex_java(text);
    for (auto& d : lexed.diagnostics) model.diagnostics.push_back(d);

    detail::Cursor c;
    c.toks = &lexed.tokens;
    c.src = text;

    detail::UnitContext ctx;
    ctx.model = &model;
    ctx.lexed = &lexed;
    ctx.file = path;

    Diagnostics diags;
    try {
        while (c.is("@")) c.skip_annotation();
        if (c.is_kw("package")) {
            c.advance();
            std::string pkg;
            while (c.cur().kind == TokKind::Ident) {
                pkg += c.cur().text;
                c.advance();
                if (c.is(".")) {
                    pkg += ".";
                    c.advance();
                } else {
                    break;
                }
            }
            ctx.package_name = pkg;
            c.expect(";");
        }
        while (c.is_kw("import")) {
            ImportInfo imp;
            imp.line = c.cur().line;
            c.advance();
            if (c.is_kw("static")) {
                imp.is_static = true;
                c.advance();
            }
            std::string path_text;
            while (c.cur().kind == TokKind::Ident || c.is("*")) {
                if (c.is("*")) {
                    imp.wildcard = true;
                    c.advance();
                    break;
                }
                path_text += c.cur().text;
                c.advance();
                if (c.is(".")) {
                    path_text += ".";
                    c.advance();
                } else {
                    break;
                }
            }
            if (ends_with(path_text, ".")) path_text.pop_back();
            imp.path = path_text;
            c.expect(";");
            model.imports.push_back(imp);
            model.imports_by_file[path].push_back(imp);
        }
        bool any_type = false;
        while (!c.done()) {
            while (c.is("@")) c.skip_annotation();
            if (c.is(";")) {
                c.advance();
                continue;
            }
            while (c.cur().kind == TokKind::Keyword && detail::is_modifier(c.cur().text)) {
                c.advance();
                while (c.is("@")) c.skip_annotation();
            }
            if (c.done()) break;
            if (c.is_kw("class") || c.is_kw("interface") || c.is_kw("enum") ||
                (c.cur().kind == TokKind::Ident && c.cur().text == "record" &&
                 c.peek().kind == TokKind::Ident)) {
                detail::parse_type_decl(c, ctx, "", diags);
                any_type = true;
                continue;
            }
            throw detail::ParseFail{"unexpected token '" + c.cur().text + "' at top level",
                                    c.cur().line};
        }
        if (!any_type) throw detail::ParseFail{"no type declaration in file", 1};
    } catch (const detail::ParseFail& pf) {
        throw Error("parse_error", path + ":" + std::to_string(pf.line) + ": " + pf.message);
    }

    for (auto& d : diags) model.diagnostics.push_back(d);
    model.files.push_back(std::move(unit));
}

// Loads every .java file under `root` (sorted by relative path) into a code
// model. Files that fail to parse are skipped with a diagnostic; if nothing
// parses, throws Error("no_parseable_sources").
inline CodeModel parse_project(const std::string& root) {
    namespace fs = std::filesystem;
    CodeModel model;
    std::vector<std::string> paths;
    std::error_code ec;
    for (fs::recursive_directory_iterator it(root, ec), end; !ec && it != end; it.increment(ec)) {
        if (it->is_regular_file() && it->path().extension() == ".java")
            paths.push_back(it->path().string());
    }
    std::sort(paths.begin(), paths.end());
    for (const auto& p : paths) {
        std::string text;
        try {
            text = read_file(p);
        } catch (const Error& e) {
            model.diagnostics.push_back({"parser", std::string("unreadable file: ") + e.what(), 0});
            continue;
        }
        try {
            parse_source(model, p, text);
        } catch (const Error& e) {
            model.diagnostics.push_back({"parser", e.what(), 0});
        }
    }
    if (model.files.empty())
        throw Error("no_parseable_sources", "no parseable .java sources under '" + root + "'");
    model.rebuild_indexes();
    return model;
}

}  // namespace logsmith::java
