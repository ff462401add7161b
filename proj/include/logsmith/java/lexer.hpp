#pragma once

#include <cstring>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "logsmith/common.hpp"

namespace logsmith::java {

enum class TokKind { Ident, Keyword, Number, String, Char, Punct, End };

struct Token {
    TokKind kind = TokKind::End;
    std::string text;
    int line = 0;       // 1-indexed
    size_t offset = 0;  // byte offset of first char
    size_t end = 0;     // byte offset one past last char
};

struct Comment {
    int start_line = 0;
    int end_line = 0;
    std::string text;  // without the comment markers
};

inline const std::unordered_set<std::string>& java_keywords() {
    static const std::unordered_set<std::string> kw = {
        "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char",
        "class", "const", "continue", "default", "do", "double", "else", "enum",
        "extends", "final", "finally", "float", "for", "goto", "if", "implements",
        "import", "instanceof", "int", "interface", "long", "native", "new",
        "package", "private", "protected", "public", "return", "short", "static",
        "strictfp", "super", "switch", "synchronized", "this", "throw", "throws",
        "transient", "try", "void", "volatile", "while"};
    return kw;
}

inline bool is_ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}
inline bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

struct LexResult {
    std::vector<Token> tokens;   // terminated by an End token
    std::vector<Comment> comments;
    Diagnostics diagnostics;
};

// Tokenizes Java source. Comments are collected separately (the parser uses
// them for candidate-function summaries); malformed literals produce a
// diagnostic and lexing continues at the next line.
inline LexResult lex_java(std::string_view src, const std::string& file = "") {
    LexResult res;
    static const char* multi_ops[] = {
        ">>>=", "<<=", ">>=", ">>>", "...", "->", "::", "==", "!=", "<=", ">=",
        "&&",  "||", "++",  "--",  "+=", "-=", "*=", "/=", "%=", "&=", "|=",
        "^=",  "<<", ">>"};

    size_t i = 0;
    int line = 1;
    auto push = [&](TokKind kind, size_t start, size_t end) {
        res.tokens.push_back(Token{kind, std::string(src.substr(start, end - start)), line, start, end});
    };

    while (i < src.size()) {
        char c = src[i];
        if (c == '\n') {
            line++;
            i++;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            i++;
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            size_t start = i + 2;
            while (i < src.size() && src[i] != '\n') i++;
            res.comments.push_back(Comment{line, line, trim(src.substr(start, i - start))});
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
            int start_line = line;
            size_t start = i + 2;
            i += 2;
            while (i + 1 < src.size() && !(src[i] == '*' && src[i + 1] == '/')) {
                if (src[i] == '\n') line++;
                i++;
            }
            size_t end = std::min(i, src.size());
            if (i + 1 < src.size()) i += 2;
            else i = src.size();
            res.comments.push_back(Comment{start_line, line, trim(src.substr(start, end - start))});
            continue;
        }
        if (c == '"') {
            // text block or ordinary string
            size_t start = i;
            if (i + 2 < src.size() && src[i + 1] == '"' && src[i + 2] == '"') {
                i += 3;
                while (i + 2 < src.size() && !(src[i] == '"' && src[i + 1] == '"' && src[i + 2] == '"')) {
                    if (src[i] == '\n') line++;
                    i++;
                }
                if (i + 2 >= src.size()) {
                    diag(res.diagnostics, file, "unterminated text block", line);
                    i = src.size();
                } else {
                    i += 3;
                }
                push(TokKind::String, start, i);
                continue;
            }
            i++;
            bool closed = false;
            while (i < src.size()) {
                if (src[i] == '\\' && i + 1 < src.size()) {
                    i += 2;
                    continue;
                }
                if (src[i] == '"') {
                    closed = true;
                    i++;
                    break;
                }
                if (src[i] == '\n') break;
                i++;
            }
            if (!closed) diag(res.diagnostics, file, "unterminated string literal", line);
            push(TokKind::String, start, i);
            continue;
        }
        if (c == '\'') {
            size_t start = i;
            i++;
            while (i < src.size()) {
                if (src[i] == '\\' && i + 1 < src.size()) {
                    i += 2;
                    continue;
                }
                if (src[i] == '\'') {
                    i++;
                    break;
                }
                if (src[i] == '\n') {
                    diag(res.diagnostics, file, "unterminated char literal", line);
                    break;
                }
                i++;
            }
            push(TokKind::Char, start, i);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
            size_t start = i;
            i++;
            while (i < src.size()) {
                char d = src[i];
                if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '.') {
                    i++;
                } else if ((d == '+' || d == '-') && (src[i - 1] == 'e' || src[i - 1] == 'E')) {
                    i++;  // exponent sign
                } else {
                    break;
                }
            }
            push(TokKind::Number, start, i);
            continue;
        }
        if (is_ident_start(c)) {
            size_t start = i;
            while (i < src.size() && is_ident_char(src[i])) i++;
            std::string text(src.substr(start, i - start));
            push(java_keywords().count(text) ? TokKind::Keyword : TokKind::Ident, start, i);
            continue;
        }
        // punctuation: longest match first
        bool matched = false;
        for (const char* op : multi_ops) {
            size_t n = std::strlen(op);
            if (src.compare(i, n, op) == 0) {
                push(TokKind::Punct, i, i + n);
                i += n;
                matched = true;
                break;
            }
        }
        if (matched) continue;
        push(TokKind::Punct, i, i + 1);
        i++;
    }
    res.tokens.push_back(Token{TokKind::End, "", line, src.size(), src.size()});
    return res;
}

}  // namespace logsmith::java
