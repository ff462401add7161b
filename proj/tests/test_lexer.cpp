#include <gtest/gtest.h>

#include "logsmith/java/lexer.hpp"

using namespace logsmith;
using namespace logsmith::java;

namespace {

std::vector<std::string> token_texts(const std::string& src) {
    auto res = lex_java(src);
    std::vector<std::string> out;
    for (auto& t : res.tokens)
        if (t.kind != TokKind::End) out.push_back(t.text);
    return out;
}

}  // namespace

TEST(Lexer, basic_tokens_and_lines) {
    auto res = lex_java("int x = 42;\nString s = \"hi\";\n");
    ASSERT_GE(res.tokens.size(), 10u);
    EXPECT_EQ(res.tokens[0].kind, TokKind::Keyword);
    EXPECT_EQ(res.tokens[0].text, "int");
    EXPECT_EQ(res.tokens[0].line, 1);
    EXPECT_EQ(res.tokens[3].kind, TokKind::Number);
    auto& str_tok = res.tokens[8];
    EXPECT_EQ(str_tok.kind, TokKind::String);
    EXPECT_EQ(str_tok.line, 2);
}

TEST(Lexer, multi_char_operators_longest_match) {
    auto texts = token_texts("a >>>= b; c -> d; e :: f; g >= h; i == j;");
    EXPECT_NE(std::find(texts.begin(), texts.end(), ">>>="), texts.end());
    EXPECT_NE(std::find(texts.begin(), texts.end(), "->"), texts.end());
    EXPECT_NE(std::find(texts.begin(), texts.end(), "::"), texts.end());
    EXPECT_NE(std::find(texts.begin(), texts.end(), ">="), texts.end());
    EXPECT_NE(std::find(texts.begin(), texts.end(), "=="), texts.end());
}

TEST(Lexer, comments_collected_not_tokenized) {
    auto res = lex_java("// line one\n/* block\nspans */ int x;\n");
    ASSERT_EQ(res.comments.size(), 2u);
    EXPECT_EQ(res.comments[0].start_line, 1);
    EXPECT_EQ(res.comments[1].start_line, 2);
    EXPECT_EQ(res.comments[1].end_line, 3);
    EXPECT_EQ(res.tokens[0].text, "int");
}

TEST(Lexer, string_escapes_and_chars) {
    auto res = lex_java("String s = \"a\\\"b\\\\\"; char c = '\\'';");
    int strings = 0, chars = 0;
    for (auto& t : res.tokens) {
        if (t.kind == TokKind::String) strings++;
        if (t.kind == TokKind::Char) chars++;
    }
    EXPECT_EQ(strings, 1);
    EXPECT_EQ(chars, 1);
    EXPECT_TRUE(res.diagnostics.empty());
}

TEST(Lexer, text_block) {
    auto res = lex_java("String s = \"\"\"\n  hello \"quoted\"\n  \"\"\";\n");
    int strings = 0;
    for (auto& t : res.tokens)
        if (t.kind == TokKind::String) strings++;
    EXPECT_EQ(strings, 1);
    EXPECT_TRUE(res.diagnostics.empty());
}

TEST(Lexer, numbers) {
    auto texts = token_texts("0x1F 1_000 3.14f 1e9 0b1010 42L");
    EXPECT_EQ(texts.size(), 6u);
}

TEST(Lexer, unterminated_string_reports_diagnostic) {
    auto res = lex_java("String s = \"oops;\n");
    EXPECT_FALSE(res.diagnostics.empty());
}

TEST(Lexer, contextual_keywords_stay_identifiers) {
    auto res = lex_java("var record = yield;");
    EXPECT_EQ(res.tokens[0].kind, TokKind::Ident);
    EXPECT_EQ(res.tokens[1].kind, TokKind::Ident);
    EXPECT_EQ(res.tokens[3].kind, TokKind::Ident);
}

TEST(Lexer, byte_offsets_reconstruct_source) {
    std::string src = "int foo = bar + 1;";
    auto res = lex_java(src);
    for (auto& t : res.tokens) {
        if (t.kind == TokKind::End) continue;
        EXPECT_EQ(src.substr(t.offset, t.end - t.offset), t.text);
    }
}
