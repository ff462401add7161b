#pragma once

#include <functional>
#include <string>

#include "logsmith/common.hpp"
#include "logsmith/java/blocks.hpp"
#include "logsmith/java/logging.hpp"
#include "logsmith/java/model.hpp"
#include "logsmith/prompt/prompts.hpp"

namespace logsmith::refine {

// Completion callback so refinement stays decoupled from transport; the
// pipeline binds it to a gateway, tests to canned responses.
using CompleteFn = std::function<std::string(const prompt::PromptBundle&)>;

struct LevelOutcome {
    java::LogStatement log;
    bool adjusted = false;
    Diagnostics diagnostics;
};

// Asks whether the generated level fits its context and applies the answer.
// Only the level may change; message, variables, and position are never
// touched. Malformed responses keep the original level with a diagnostic.
inline LevelOutcome refine_level(const java::CodeModel& model, const java::LogStatement& log,
                                 const prompt::TemplateSet& templates,
                                 const CompleteFn& complete) {
    LevelOutcome out;
    out.log = log;

    const java::MethodUnit* method = model.method(log.method_id);
    if (!method) {
        diag(out.diagnostics, "level-refine",
             "log references unknown method '" + log.method_id + "'; level kept", log.line);
        return out;
    }

    auto blocks = java::extract_blocks(*method);
    const java::Block* block = java::innermost_block(blocks, log.line);
    auto region = java::innermost_region(blocks, log.line);

    prompt::RefineInputs in;
    in.current_level = log.level;
    in.message = log.message;
    in.method_source = prompt::detail::method_source(model, *method);
    in.explanation = log.explanation;
    in.block_role = prompt::block_role_text(block);
    in.block_lines = region.second - region.first + 1;

    std::string response = complete(prompt::build_level_refine_prompt(in, templates));
    try {
        prompt::RefineDecision decision = prompt::parse_refine_response(response);
        if (decision.adjust && decision.level != log.level) {
            out.log.level = decision.level;
            out.adjusted = true;
        }
    } catch (const Error& e) {
        diag(out.diagnostics, "level-refine",
             "unusable refine response for log at line " + std::to_string(log.line) + " (" +
                 e.what() + "); level kept",
             log.line);
    }
    return out;
}

}  // namespace logsmith::refine
