#pragma once
// Prompt templates and the {{placeholder}} substitution engine. Templates
// are data: the built-in texts below are also shipped as editable files under
// templates/, and load_templates() prefers the files when a directory is
// given. A sync test keeps the shipped files identical to the built-ins.
//
// Placeholder inventory:
//   position_*.txt   {{annotated_method}} {{code_slice}} {{log_slice}}
//   generation.txt   {{block_rule}} {{method_with_position}} {{slice}}
//                    {{candidates}}
//   level_refine.txt {{current_level}} {{message}} {{method_source}}
//                    {{explanation}} {{block_role}} {{block_lines}}
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "logsmith/common.hpp"
#include "logsmith/java/blocks.hpp"

namespace logsmith::prompt {

// ---------------------------------------------------------------------------
// built-in template texts
// ---------------------------------------------------------------------------

namespace builtin {

inline constexpr const char* kPositionSystem =
    "You are an expert Java developer who decides where log statements belong. "
    "Answer strictly in the requested format with no extra commentary.";

inline constexpr const char* kGenerationSystem =
    "You are an expert Java developer who writes high-quality log statements. "
    "Answer strictly in the requested format with no extra commentary.";

inline constexpr const char* kRefineSystem =
    "You are an expert Java developer who reviews log levels. "
    "Answer strictly in the requested format with no extra commentary.";

inline constexpr const char* kPositionBranch =
    R"(Decide where log statements should be added inside the BRANCH blocks of the method below.

Guideline for branch blocks: Add logs after events that directly affect program behavior and outcomes, such as exception handling.

Each line of the method is prefixed with its original line number. Every branch block is delimited by `// BRANCH#<id> START` and `// BRANCH#<id> END` marker comments.

Annotated method:
{{annotated_method}}

Related methods (callers and callees within two hops):
{{code_slice}}

Log statements already present in the related code, in execution order:
{{log_slice}}

For every position where a log statement should be added, answer with one line of the form:
BRANCH#<block_id>: line <line_number>
where <line_number> is the original line number the log should follow. If no log is needed in any branch block, answer exactly:
no log needed
)";

inline constexpr const char* kPositionTryCatch =
    R"(Decide where log statements should be added inside the TRYCATCH blocks of the method below.

Guideline for try-catch blocks: For cases with multiple catch blocks, evaluate each catch block individually to determine whether a log should be generated.

Each line of the method is prefixed with its original line number. Every try-catch block is delimited by `// TRYCATCH#<id> START` and `// TRYCATCH#<id> END` marker comments.

Annotated method:
{{annotated_method}}

Related methods (callers and callees within two hops):
{{code_slice}}

Log statements already present in the related code, in execution order:
{{log_slice}}

For every position where a log statement should be added, answer with one line of the form:
TRYCATCH#<block_id>: line <line_number>
where <line_number> is the original line number the log should follow. If no log is needed in any try-catch block, answer exactly:
no log needed
)";

inline constexpr const char* kPositionLoop =
    R"(Decide where log statements should be added inside the LOOP blocks of the method below.

Guideline for loop blocks: Avoid printing logs that remain unchanged across multiple iterations of the loop.

Each line of the method is prefixed with its original line number. Every loop block is delimited by `// LOOP#<id> START` and `// LOOP#<id> END` marker comments.

Annotated method:
{{annotated_method}}

Related methods (callers and callees within two hops):
{{code_slice}}

Log statements already present in the related code, in execution order:
{{log_slice}}

For every position where a log statement should be added, answer with one line of the form:
LOOP#<block_id>: line <line_number>
where <line_number> is the original line number the log should follow. If no log is needed in any loop block, answer exactly:
no log needed
)";

inline constexpr const char* kPositionMethodDef =
    R"(Decide where log statements should be added at the METHOD level of the method below.

Guideline for method definition blocks: Insert logs into methods that are responsible for recording time-related information.

Each line of the method is prefixed with its original line number. The method body is delimited by `// METHOD#<id> START` and `// METHOD#<id> END` marker comments.

Annotated method:
{{annotated_method}}

Related methods (callers and callees within two hops):
{{code_slice}}

Log statements already present in the related code, in execution order:
{{log_slice}}

For every position where a log statement should be added, answer with one line of the form:
METHOD#<block_id>: line <line_number>
where <line_number> is the original line number the log should follow. If no log is needed at the method level, answer exactly:
no log needed
)";

inline constexpr const char* kGeneration =
    R"(Write one log statement for the marked position in the Java method below.

Block guideline: {{block_rule}}

Target method (each line prefixed with its original line number; the insertion point is marked):
{{method_with_position}}

Statements the marked position depends on, ordered by dependency distance (hop 1 is the closest):
{{slice}}

Candidate variables and functions that may appear in the log (choose only from this list; literals are always allowed):
{{candidates}}

Think step by step: first determine what event the log should record at this position, then select the variables that identify that event, then choose the severity, and finally compose a concise message.

Answer with exactly one line in this format (no markdown, no extra lines):
LEVEL | "message text with one {} placeholder per variable" | variable1, variable2 | one-sentence explanation of what the log records

LEVEL is one of TRACE, DEBUG, INFO, WARN, ERROR. The number of {} placeholders in the message must equal the number of variables. If the log needs no variables, leave the variable field empty.
)";

inline constexpr const char* kLevelRefine =
    R"(Review the severity level of one log statement.

The log currently uses level: {{current_level}}

Consider the following five factors:
1. The content of the log message: {{message}}
2. The method in which the log resides:
{{method_source}}
3. The semantic explanation of the log message: {{explanation}}
4. The function of the block containing the log: {{block_role}}
5. The total number of lines in that block: {{block_lines}}

Decide whether the current level is appropriate. Answer with exactly one line:
keep
if the level should stay unchanged, or:
adjust: LEVEL
with LEVEL one of TRACE, DEBUG, INFO, WARN, ERROR, if it should change.
)";

}  // namespace builtin

// ---------------------------------------------------------------------------
// engine
// ---------------------------------------------------------------------------

// substitute every {{name}}; placeholders without a value are an error
inline std::string render_template(const std::string& tpl,
                                   const std::map<std::string, std::string>& values) {
    std::string out;
    out.reserve(tpl.size());
    size_t pos = 0;
    while (pos < tpl.size()) {
        size_t open = tpl.find("{{", pos);
        if (open == std::string::npos) {
            out.append(tpl, pos, std::string::npos);
            break;
        }
        size_t close = tpl.find("}}", open + 2);
        if (close == std::string::npos) {
            out.append(tpl, pos, std::string::npos);
            break;
        }
        out.append(tpl, pos, open - pos);
        std::string name = tpl.substr(open + 2, close - open - 2);
        auto it = values.find(name);
        if (it == values.end())
            throw Error("unknown_placeholder", "no value for placeholder '" + name + "'");
        out += it->second;
        pos = close + 2;
    }
    return out;
}

struct TemplateSet {
    std::string position_branch = builtin::kPositionBranch;
    std::string position_trycatch = builtin::kPositionTryCatch;
    std::string position_loop = builtin::kPositionLoop;
    std::string position_methoddef = builtin::kPositionMethodDef;
    std::string generation = builtin::kGeneration;
    std::string level_refine = builtin::kLevelRefine;

    const std::string& position_for(java::BlockKind kind) const {
        switch (kind) {
            case java::BlockKind::Branch: return position_branch;
            case java::BlockKind::TryCatch: return position_trycatch;
            case java::BlockKind::Loop: return position_loop;
            case java::BlockKind::MethodDef: return position_methoddef;
        }
        throw Error("bad_block_kind", "unknown block kind");
    }
};

namespace detail {

inline const std::map<std::string, std::string*> template_files(TemplateSet& t) {
    return {{"position_branch.txt", &t.position_branch},
            {"position_trycatch.txt", &t.position_trycatch},
            {"position_loop.txt", &t.position_loop},
            {"position_methoddef.txt", &t.position_methoddef},
            {"generation.txt", &t.generation},
            {"level_refine.txt", &t.level_refine}};
}

}  // namespace detail

// built-in texts, no file I/O
inline TemplateSet default_templates() { return TemplateSet{}; }

// read all six templates from `dir`; a missing or unreadable file is an error
inline TemplateSet load_templates(const std::string& dir) {
    TemplateSet t;
    for (auto& [name, slot] : detail::template_files(t)) {
        std::ifstream in(dir + "/" + name, std::ios::binary);
        if (!in) throw Error("missing_template", "cannot read template file '" + dir + "/" + name + "'");
        std::ostringstream body;
        body << in.rdbuf();
        *slot = body.str();
    }
    return t;
}

// write the built-in texts into `dir` (used to (re)generate the shipped files)
inline void write_default_templates(const std::string& dir) {
    TemplateSet t;
    for (auto& [name, slot] : detail::template_files(t)) {
        std::ofstream out(dir + "/" + name, std::ios::binary);
        if (!out) throw Error("io_error", "cannot write template file '" + dir + "/" + name + "'");
        out << *slot;
    }
}

}  // namespace logsmith::prompt
