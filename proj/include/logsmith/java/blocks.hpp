#pragma once

#include <map>

#include "logsmith/java/model.hpp"

namespace logsmith::java {

enum class BlockKind { Branch, TryCatch, Loop, MethodDef };

inline const char* block_kind_token(BlockKind k) {
    switch (k) {
        case BlockKind::Branch: return "BRANCH";
        case BlockKind::TryCatch: return "TRYCATCH";
        case BlockKind::Loop: return "LOOP";
        case BlockKind::MethodDef: return "METHOD";
    }
    return "?";
}

inline bool block_kind_from_token(const std::string& token, BlockKind& out) {
    if (token == "BRANCH") out = BlockKind::Branch;
    else if (token == "TRYCATCH") out = BlockKind::TryCatch;
    else if (token == "LOOP") out = BlockKind::Loop;
    else if (token == "METHOD") out = BlockKind::MethodDef;
    else return false;
    return true;
}

struct SubSpan {
    std::string label;  // then / else if / else / try / catch / body
    int start_line = 0;
    int end_line = 0;
};

struct Block {
    BlockKind kind = BlockKind::MethodDef;
    int id = 0;  // 1-based, per kind, in source order within the method
    int start_line = 0;
    int end_line = 0;
    std::vector<SubSpan> sub_spans;

    bool contains(int line) const { return line >= start_line && line <= end_line; }
    int span_lines() const { return end_line - start_line + 1; }
    std::string label() const {
        return std::string(block_kind_token(kind)) + "#" + std::to_string(id);
    }
};

namespace detail {

inline void collect_blocks(const std::vector<Statement>& stmts, std::vector<Block>& out) {
    for (const auto& st : stmts) {
        if (st.kind == StmtKind::If && !st.else_if_child) {
            // one block per whole if / else-if / else chain
            Block b;
            b.kind = BlockKind::Branch;
            b.start_line = st.start_line;
            const Statement* cur = &st;
            b.sub_spans.push_back({"then", cur->arm_info[0].start_line, cur->arm_info[0].end_line});
            while (cur->arms.size() >= 2) {
                const auto& else_arm = cur->arms[1];
                if (else_arm.size() == 1 && else_arm[0].kind == StmtKind::If &&
                    else_arm[0].else_if_child) {
                    cur = &else_arm[0];
                    b.sub_spans.push_back(
                        {"else if", cur->arm_info[0].start_line, cur->arm_info[0].end_line});
                } else {
                    b.sub_spans.push_back(
                        {"else", cur->arm_info[1].start_line, cur->arm_info[1].end_line});
                    break;
                }
            }
            b.end_line = b.sub_spans.back().end_line;
            out.push_back(b);
        } else if (st.kind == StmtKind::Try) {
            Block b;
            b.kind = BlockKind::TryCatch;
            b.start_line = st.start_line;
            b.end_line = st.end_line;
            for (size_t i = 0; i < st.arm_info.size(); i++) {
                const auto& arm = st.arm_info[i];
                if (arm.label == "try" || arm.label == "catch")
                    b.sub_spans.push_back({arm.label, arm.start_line, arm.end_line});
            }
            out.push_back(b);
        } else if (st.kind == StmtKind::While || st.kind == StmtKind::DoWhile ||
                   st.kind == StmtKind::For || st.kind == StmtKind::ForEach) {
            Block b;
            b.kind = BlockKind::Loop;
            b.start_line = st.start_line;
            b.end_line = st.end_line;
            if (!st.arm_info.empty())
                b.sub_spans.push_back({"body", st.arm_info[0].start_line, st.arm_info[0].end_line});
            out.push_back(b);
        }
        for (const auto& arm : st.arms) collect_blocks(arm, out);
    }
}

}  // namespace detail

// Structural blocks of one method: the method itself plus every branch chain,
// loop, and try/catch, each numbered per kind in source order.
inline std::vector<Block> extract_blocks(const MethodUnit& method) {
    std::vector<Block> blocks;
    if (method.body_end_line > 0) {
        Block m;
        m.kind = BlockKind::MethodDef;
        m.start_line = method.decl_line;
        m.end_line = method.body_end_line;
        m.sub_spans.push_back({"body", method.body_start_line, method.body_end_line});
        blocks.push_back(m);
    }
    detail::collect_blocks(method.body, blocks);
    std::stable_sort(blocks.begin(), blocks.end(), [](const Block& a, const Block& b) {
        if (a.start_line != b.start_line) return a.start_line < b.start_line;
        return a.end_line > b.end_line;  // outer first
    });
    std::map<BlockKind, int> next_id;
    for (auto& b : blocks) b.id = ++next_id[b.kind];
    return blocks;
}

// Smallest block whose span contains `line`; null when outside the method.
inline const Block* innermost_block(const std::vector<Block>& blocks, int line) {
    const Block* best = nullptr;
    for (const auto& b : blocks) {
        if (!b.contains(line)) continue;
        if (!best || b.span_lines() < best->span_lines() ||
            (b.span_lines() == best->span_lines() && b.start_line > best->start_line))
            best = &b;
    }
    return best;
}

// Smallest enclosing region for `line`: the tightest block sub-span (arm) or
// block span containing it. Used to size the code region around a log site.
inline std::pair<int, int> innermost_region(const std::vector<Block>& blocks, int line) {
    int lo = 0, hi = 0;
    auto consider = [&](int s, int e) {
        if (line < s || line > e) return;
        if (lo == 0 || e - s < hi - lo) {
            lo = s;
            hi = e;
        }
    };
    for (const auto& b : blocks) {
        consider(b.start_line, b.end_line);
        for (const auto& ss : b.sub_spans) consider(ss.start_line, ss.end_line);
    }
    return {lo, hi};
}

// Finds a block by its marker label ("BRANCH#2"); null when absent.
inline const Block* find_block(const std::vector<Block>& blocks, BlockKind kind, int id) {
    for (const auto& b : blocks)
        if (b.kind == kind && b.id == id) return &b;
    return nullptr;
}

// Renders the method with every original line prefixed by its line number and
// block boundary markers inserted as bare comment lines. Line numbers refer to
// the file the method was parsed from, so positions picked off this rendering
// need no coordinate translation.
inline std::string annotate_method(const SourceUnit& unit, const MethodUnit& method,
                                   const std::vector<Block>& blocks) {
    std::map<int, std::vector<std::string>> before, after;
    // outer blocks open first and close last
    std::vector<const Block*> by_size;
    for (const auto& b : blocks) by_size.push_back(&b);
    std::sort(by_size.begin(), by_size.end(), [](const Block* a, const Block* b) {
        if (a->span_lines() != b->span_lines()) return a->span_lines() > b->span_lines();
        return a->start_line < b->start_line;
    });
    for (const Block* b : by_size) {
        before[b->start_line].push_back("// " + b->label() + " START");
        after[b->end_line].push_back("// " + b->label() + " END");
    }
    for (auto& [line, v] : after) std::reverse(v.begin(), v.end());

    std::string out;
    int first = method.decl_line;
    int last = method.body_end_line > 0 ? method.body_end_line : method.decl_line;
    for (int line = first; line <= last; line++) {
        if (auto it = before.find(line); it != before.end())
            for (auto& m : it->second) out += m + "\n";
        out += std::to_string(line) + ": " + unit.line_text(line) + "\n";
        if (auto it = after.find(line); it != after.end())
            for (auto& m : it->second) out += m + "\n";
    }
    return out;
}

}  // namespace logsmith::java
