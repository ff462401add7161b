#pragma once
// Prompt bundle construction for the three pipeline phases, plus the strict
// parsers that turn LLM responses back into structured results. Builders are
// deterministic given (model, seed); parsers validate everything they accept
// and report what they drop.
#include <algorithm>
#include <optional>
#include <random>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include "logsmith/analysis/callgraph.hpp"
#include "logsmith/java/blocks.hpp"
#include "logsmith/java/logging.hpp"
#include "logsmith/prompt/templates.hpp"

namespace logsmith::prompt {

enum class Phase { Position, Generation, LevelRefine };

inline const char* phase_name(Phase p) {
    switch (p) {
        case Phase::Position: return "position";
        case Phase::Generation: return "generation";
        case Phase::LevelRefine: return "level_refine";
    }
    return "?";
}

struct PromptBundle {
    Phase phase = Phase::Position;
    std::optional<java::BlockKind> block_kind;
    std::string system_text;
    std::string user_text;
    std::string expected_schema;  // response grammar id
};

// ---------------------------------------------------------------------------
// inter-procedural context
// ---------------------------------------------------------------------------

struct InterprocContext {
    std::string code_slice;              // target method + selected neighbors
    std::vector<std::string> log_slice;  // log statements in execution order
    std::vector<std::string> neighbor_ids;
};

namespace detail {

inline std::string method_source(const java::CodeModel& model, const java::MethodUnit& m) {
    const java::SourceUnit* unit = model.file(m.file);
    if (unit == nullptr) return {};
    std::string out;
    int last = m.body_end_line > 0 ? m.body_end_line : m.decl_line;
    for (int ln = m.decl_line; ln <= last; ++ln) {
        out += unit->line_text(ln);
        out += '\n';
    }
    return out;
}

inline void collect_log_lines(const java::CodeModel& model, const java::MethodUnit& m,
                              std::vector<std::string>& out) {
    const java::ClassInfo* cls = model.class_of(m.class_id);
    java::visit_statements(m.body, [&](const java::Statement& st) {
        if (java::match_log_statement(st, cls) != nullptr) out.push_back(trim(st.text));
    });
}

// deterministic k-sample: shuffle a copy with the seeded engine, take first k
inline std::vector<std::string> sample_ids(std::vector<std::string> ids, size_t k,
                                           std::mt19937& rng) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    if (ids.size() > k) {
        std::shuffle(ids.begin(), ids.end(), rng);
        ids.resize(k);
        std::sort(ids.begin(), ids.end());
    }
    return ids;
}

}  // namespace detail

// Target method plus up to k randomly selected callers/callees per direction
// per hop level (two hop levels), with the log statements they contain listed
// in execution order: target first, then neighbors in inclusion order.
inline InterprocContext build_interproc_context(const java::CodeModel& model,
                                                const analysis::CallGraph& graph,
                                                const java::MethodUnit& method, uint64_t seed,
                                                int k_per_direction = 3) {
    InterprocContext ctx;
    std::mt19937 rng(static_cast<uint32_t>(seed));
    size_t k = k_per_direction < 0 ? 0 : static_cast<size_t>(k_per_direction);

    std::set<std::string> included = {method.id};
    struct Pick {
        std::string id;
        std::string relation;  // "caller" | "callee"
        int hop;
    };
    std::vector<Pick> picks;

    auto neighbors = [&](const std::vector<std::string>& from, bool callers) {
        std::vector<std::string> ids;
        for (const auto& mid : from) {
            for (const auto* e : callers ? graph.calls_to(mid) : graph.calls_from(mid)) {
                const std::string& other = callers ? e->caller : e->callee;
                if (!included.count(other) && model.method(other) != nullptr &&
                    model.method(other)->body_end_line > 0)
                    ids.push_back(other);
            }
        }
        return ids;
    };

    std::vector<std::string> caller_frontier = {method.id};
    std::vector<std::string> callee_frontier = {method.id};
    for (int hop = 1; hop <= 2; ++hop) {
        std::vector<std::string> next_callers =
            detail::sample_ids(neighbors(caller_frontier, true), k, rng);
        std::vector<std::string> next_callees =
            detail::sample_ids(neighbors(callee_frontier, false), k, rng);
        for (const auto& id : next_callers) {
            included.insert(id);
            picks.push_back({id, "caller", hop});
        }
        for (const auto& id : next_callees) {
            included.insert(id);
            picks.push_back({id, "callee", hop});
        }
        caller_frontier = next_callers;
        callee_frontier = next_callees;
    }

    ctx.code_slice = "// target method: " + method.id + "\n" +
                     detail::method_source(model, method);
    detail::collect_log_lines(model, method, ctx.log_slice);
    for (const auto& p : picks) {
        const java::MethodUnit* m = model.method(p.id);
        if (m == nullptr) continue;
        ctx.code_slice += "\n// " + p.relation + " (hop " + std::to_string(p.hop) +
                          "): " + p.id + "\n" + detail::method_source(model, *m);
        detail::collect_log_lines(model, *m, ctx.log_slice);
        ctx.neighbor_ids.push_back(p.id);
    }
    return ctx;
}

// ---------------------------------------------------------------------------
// bundle builders
// ---------------------------------------------------------------------------

namespace detail {

inline std::string log_slice_text(const InterprocContext& ctx) {
    return ctx.log_slice.empty() ? std::string("(none)") : join(ctx.log_slice, "\n");
}

}  // namespace detail

inline PromptBundle build_position_prompt(const std::string& annotated_method,
                                          java::BlockKind kind, const InterprocContext& ctx,
                                          const TemplateSet& templates = TemplateSet{}) {
    if (annotated_method.empty())
        throw Error("empty_annotation", "no annotated text for requested block kind");
    PromptBundle b;
    b.phase = Phase::Position;
    b.block_kind = kind;
    b.system_text = builtin::kPositionSystem;
    b.expected_schema = "position_pairs";
    b.user_text = render_template(templates.position_for(kind),
                                  {{"annotated_method", annotated_method},
                                   {"code_slice", ctx.code_slice},
                                   {"log_slice", detail::log_slice_text(ctx)}});
    return b;
}

// Table 1 rule sentences, reused inside the generation prompt
inline std::string block_rule_text(java::BlockKind kind) {
    switch (kind) {
        case java::BlockKind::Branch:
            return "Add logs after events that directly affect program behavior and "
                   "outcomes, such as exception handling.";
        case java::BlockKind::TryCatch:
            return "For cases with multiple catch blocks, evaluate each catch block "
                   "individually to determine whether a log should be generated.";
        case java::BlockKind::Loop:
            return "Avoid printing logs that remain unchanged across multiple iterations "
                   "of the loop.";
        case java::BlockKind::MethodDef:
            return "Insert logs into methods that are responsible for recording "
                   "time-related information.";
    }
    throw Error("bad_block_kind", "unknown block kind");
}

struct GenerationInputs {
    std::string method_with_position;  // numbered source with the anchor marked
    std::string slice_text;            // hop-labelled dependency lines
    bool degenerate = false;           // no usable slice entry
    std::string candidates_text;       // rendered candidate list
    java::BlockKind kind = java::BlockKind::MethodDef;
};

inline PromptBundle build_generation_prompt(const GenerationInputs& in,
                                            const TemplateSet& templates = TemplateSet{}) {
    PromptBundle b;
    b.phase = Phase::Generation;
    b.block_kind = in.kind;
    b.system_text = builtin::kGenerationSystem;
    b.expected_schema = "log_line";
    std::string slice = in.degenerate || in.slice_text.empty()
                            ? std::string("(context limited: no dependency slice is "
                                          "available for this position)")
                            : in.slice_text;
    b.user_text = render_template(templates.generation,
                                  {{"block_rule", block_rule_text(in.kind)},
                                   {"method_with_position", in.method_with_position},
                                   {"slice", slice},
                                   {"candidates", in.candidates_text}});
    return b;
}

struct RefineInputs {
    std::string current_level;
    std::string message;
    std::string method_source;
    std::string explanation;  // falls back to a restatement of the message
    std::string block_role;
    int block_lines = 0;
};

inline PromptBundle build_level_refine_prompt(const RefineInputs& in,
                                              const TemplateSet& templates = TemplateSet{}) {
    PromptBundle b;
    b.phase = Phase::LevelRefine;
    b.system_text = builtin::kRefineSystem;
    b.expected_schema = "keep_or_adjust";
    std::string explanation = in.explanation.empty()
                                  ? "This log records: " + in.message
                                  : in.explanation;
    b.user_text = render_template(templates.level_refine,
                                  {{"current_level", in.current_level},
                                   {"message", in.message},
                                   {"method_source", in.method_source},
                                   {"explanation", explanation},
                                   {"block_role", in.block_role},
                                   {"block_lines", std::to_string(in.block_lines)}});
    return b;
}

// human-readable role of the region a log sits in, for refine factor (4)
inline std::string block_role_text(const java::Block* block) {
    if (block == nullptr) return "straight-line code";
    switch (block->kind) {
        case java::BlockKind::Branch: return "a conditional branch (if/else) block";
        case java::BlockKind::TryCatch: return "a try-catch exception handling block";
        case java::BlockKind::Loop: return "a loop block";
        case java::BlockKind::MethodDef: return "the method body";
    }
    return "straight-line code";
}

// ---------------------------------------------------------------------------
// response parsers
// ---------------------------------------------------------------------------

struct PositionPrediction {
    java::BlockKind kind = java::BlockKind::MethodDef;
    int block_id = 0;
    int line = 0;

    bool operator<(const PositionPrediction& o) const {
        if (line != o.line) return line < o.line;
        if (kind != o.kind) return static_cast<int>(kind) < static_cast<int>(o.kind);
        return block_id < o.block_id;
    }
    bool operator==(const PositionPrediction& o) const {
        return kind == o.kind && block_id == o.block_id && line == o.line;
    }
};

// Extracts validated (block, line) pairs. Primary grammar `KIND#id ... line`;
// bare `(id, line)` pairs are accepted as a fallback when a default kind is
// given. Pairs naming unknown blocks or lines outside the block span are
// dropped with a diagnostic.
inline std::vector<PositionPrediction> parse_position_response(
    const std::string& text, const std::vector<java::Block>& blocks,
    std::optional<java::BlockKind> default_kind = std::nullopt,
    Diagnostics* diagnostics = nullptr) {
    std::vector<PositionPrediction> out;
    auto drop = [&](const std::string& why) {
        if (diagnostics) diag(*diagnostics, "parse_position_response", why);
    };
    auto accept = [&](java::BlockKind kind, int id, int line) {
        const java::Block* b = java::find_block(blocks, kind, id);
        if (b == nullptr) {
            drop("unknown block " + std::string(java::block_kind_token(kind)) + "#" +
                 std::to_string(id));
            return;
        }
        if (!b->contains(line)) {
            drop("line " + std::to_string(line) + " outside span of " + b->label());
            return;
        }
        out.push_back({kind, id, line});
    };

    static const std::regex kPair(R"(([A-Z]+)\s*#\s*(\d+)\D+?(\d+))");
    static const std::regex kBare(R"(\(?\s*(\d+)\s*,\s*(\d+)\s*\)?)");
    bool any_primary = false;
    for (const auto& line_text : split(text, '\n')) {
        auto begin = std::sregex_iterator(line_text.begin(), line_text.end(), kPair);
        for (auto it = begin; it != std::sregex_iterator(); ++it) {
            java::BlockKind kind;
            if (!java::block_kind_from_token((*it)[1].str(), kind)) {
                drop("unknown block kind token '" + (*it)[1].str() + "'");
                continue;
            }
            any_primary = true;
            accept(kind, std::stoi((*it)[2].str()), std::stoi((*it)[3].str()));
        }
    }
    if (!any_primary && default_kind) {
        for (const auto& line_text : split(text, '\n')) {
            std::string trimmed = trim(line_text);
            std::smatch m;
            if (std::regex_match(trimmed, m, kBare))
                accept(*default_kind, std::stoi(m[1].str()), std::stoi(m[2].str()));
        }
    }
    if (out.empty() && !any_primary)
        drop("no positions parsed from response (treated as: no log needed)");

    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

struct ParsedLog {
    std::string level;
    std::string message;
    std::vector<std::string> variables;
    std::string explanation;
};

namespace detail {

// split on '|' at top level: outside quotes, parens, brackets
inline std::vector<std::string> split_pipes(const std::string& s) {
    std::vector<std::string> parts;
    std::string cur;
    int depth = 0;
    bool in_str = false, in_chr = false;
    for (size_t i = 0; i < s.size(); ++i) {
        char ch = s[i];
        if (in_str) {
            cur += ch;
            if (ch == '\\' && i + 1 < s.size()) cur += s[++i];
            else if (ch == '"') in_str = false;
            continue;
        }
        if (in_chr) {
            cur += ch;
            if (ch == '\\' && i + 1 < s.size()) cur += s[++i];
            else if (ch == '\'') in_chr = false;
            continue;
        }
        switch (ch) {
            case '"': in_str = true; cur += ch; break;
            case '\'': in_chr = true; cur += ch; break;
            case '(': case '[': case '{': depth++; cur += ch; break;
            case ')': case ']': case '}': depth--; cur += ch; break;
            case '|':
                if (depth == 0) {
                    parts.push_back(cur);
                    cur.clear();
                } else {
                    cur += ch;
                }
                break;
            default: cur += ch;
        }
    }
    parts.push_back(cur);
    return parts;
}

// split on ',' at top level (parentheses/bracket nesting respected)
inline std::vector<std::string> split_variables(const std::string& s) {
    std::vector<std::string> vars;
    std::string cur;
    int depth = 0;
    bool in_str = false;
    for (size_t i = 0; i < s.size(); ++i) {
        char ch = s[i];
        if (in_str) {
            cur += ch;
            if (ch == '\\' && i + 1 < s.size()) cur += s[++i];
            else if (ch == '"') in_str = false;
            continue;
        }
        if (ch == '"') { in_str = true; cur += ch; continue; }
        if (ch == '(' || ch == '[' || ch == '<') depth++;
        if (ch == ')' || ch == ']' || ch == '>') depth--;
        if (ch == ',' && depth == 0) {
            vars.push_back(trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!trim(cur).empty()) vars.push_back(trim(cur));
    vars.erase(std::remove_if(vars.begin(), vars.end(),
                              [](const std::string& v) {
                                  return v.empty() || to_lower(v) == "none";
                              }),
               vars.end());
    return vars;
}

inline size_t count_placeholders(const std::string& message) {
    size_t n = 0;
    for (size_t i = 0; i + 1 < message.size(); ++i)
        if (message[i] == '{' && message[i + 1] == '}') {
            n++;
            i++;
        }
    return n;
}

}  // namespace detail

// Parses the `LEVEL | "message" | vars [| explanation]` response line.
// Malformed level, missing message, or a placeholder/variable count mismatch
// is an error (`malformed_response`); the caller owns the retry policy.
inline ParsedLog parse_log_response(const std::string& text) {
    for (const auto& raw_line : split(text, '\n')) {
        std::string line = trim(raw_line);
        if (line.find('|') == std::string::npos) continue;
        std::vector<std::string> parts = detail::split_pipes(line);
        if (parts.size() < 2) continue;
        std::string level = java::canonical_level(trim(parts[0]));
        if (level.empty()) continue;

        ParsedLog log;
        log.level = level;
        std::string msg = trim(parts[1]);
        if (msg.size() >= 2 && msg.front() == '"' && msg.back() == '"')
            msg = java::detail::unquote(msg);
        log.message = msg;
        if (parts.size() >= 3) log.variables = detail::split_variables(parts[2]);
        if (parts.size() >= 4) log.explanation = trim(parts[3]);

        size_t placeholders = detail::count_placeholders(log.message);
        if (placeholders != log.variables.size())
            throw Error("malformed_response",
                        "placeholder count " + std::to_string(placeholders) +
                            " does not match variable count " +
                            std::to_string(log.variables.size()) + " in: " + line);
        return log;
    }
    throw Error("malformed_response", "no `LEVEL | \"message\" | vars` line found");
}

// canonical single-line rendering; parse_log_response(render) round-trips
inline std::string render_log_response(const ParsedLog& log) {
    std::string out = log.level;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    out += " | \"" + log.message + "\" | " + join(log.variables, ", ");
    if (!log.explanation.empty()) out += " | " + log.explanation;
    return out;
}

struct RefineDecision {
    bool adjust = false;
    std::string level;  // canonical, set when adjust
};

// Parses the keep-or-adjust response. Unknown levels and unrecognizable
// text are `malformed_response`; the caller keeps the original level then.
inline RefineDecision parse_refine_response(const std::string& text) {
    std::string lowered = to_lower(trim(text));
    if (lowered.empty()) throw Error("malformed_response", "empty refine response");
    if (starts_with(lowered, "keep")) return {};
    for (const auto& raw_line : split(text, '\n')) {
        std::string line = to_lower(trim(raw_line));
        if (line.empty()) continue;
        if (starts_with(line, "keep")) return {};
        std::string token = line;
        size_t colon = line.find(':');
        if (colon != std::string::npos) token = trim(line.substr(colon + 1));
        else if (starts_with(line, "adjust")) token = trim(line.substr(6));
        std::string level = java::canonical_level(token);
        if (!level.empty()) return {true, level};
    }
    throw Error("malformed_response", "refine response is neither keep nor adjust: " +
                                          trim(text).substr(0, 80));
}

}  // namespace logsmith::prompt
