#pragma once

#include <atomic>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "logsmith/analysis/callgraph.hpp"
#include "logsmith/analysis/slice.hpp"
#include "logsmith/common.hpp"
#include "logsmith/java/blocks.hpp"
#include "logsmith/java/parser.hpp"
#include "logsmith/llm/gateway.hpp"
#include "logsmith/pipeline/insert.hpp"
#include "logsmith/prompt/prompts.hpp"
#include "logsmith/refine/dedup.hpp"
#include "logsmith/refine/level.hpp"
#include "logsmith/scope/candidates.hpp"

namespace logsmith::pipeline {

struct PipelineConfig {
    uint64_t seed = 0;
    int slice_hops = 7;
    int k_per_direction = 3;
    bool skip_dedup = false;
    bool skip_level_refine = false;
    prompt::TemplateSet templates;
    refine::DedupOptions dedup;
};

struct GeneratedLog {
    java::LogStatement log;
    std::vector<std::string> notes;  // per-log phase diagnostics for the report
};

struct PipelineResult {
    std::map<std::string, std::string> files;  // final augmented project
    std::vector<java::LogStatement> logs;      // surviving logs, final line numbers
    std::vector<nlohmann::json> report;        // one object per surviving log
    std::vector<refine::DedupEntry> dedup_report;
    Diagnostics diagnostics;
};

namespace detail {

// Errors that must abort the run instead of skipping one query: a bad key or
// an unreachable/unscripted provider fails every later query the same way.
inline bool fatal_gateway_error(const std::string& code) {
    return code == "auth_error" || code == "provider_unavailable" || code == "mock_miss";
}

inline uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// Numbered method source with the anchor called out for the generation prompt.
inline std::string mark_position(const java::SourceUnit& unit, const java::MethodUnit& m,
                                 int anchor) {
    std::string out;
    int last = m.body_end_line > 0 ? m.body_end_line : m.decl_line;
    for (int line = m.decl_line; line <= last; line++) {
        out += std::to_string(line) + ": " + unit.line_text(line) + "\n";
        if (line == anchor)
            out += "// ^ the new log statement goes immediately after line " +
                   std::to_string(anchor) + "\n";
    }
    return out;
}

// Innermost if statement whose else arm contains `line`, or null.
inline const java::Statement* enclosing_if_with_else(const java::MethodUnit& m, int line) {
    const java::Statement* best = nullptr;
    java::visit_statements(m.body, [&](const java::Statement& st) {
        if (st.kind != java::StmtKind::If) return;
        for (const auto& arm : st.arm_info) {
            if (arm.label != "else" || line < arm.start_line || line > arm.end_line) continue;
            if (!best || st.start_line > best->start_line) best = &st;
        }
    });
    return best;
}

inline bool literal_expression(const std::string& expr) {
    std::string t = trim(expr);
    if (t.empty()) return false;
    if (java::detail::is_string_literal(t)) return true;
    if (t.size() >= 2 && t.front() == '\'' && t.back() == '\'') return true;
    if (t == "true" || t == "false" || t == "null") return true;
    char c = t[0];
    if (std::isdigit(static_cast<unsigned char>(c))) return true;
    return (c == '-' || c == '+') && t.size() > 1 &&
           std::isdigit(static_cast<unsigned char>(t[1]));
}

inline std::set<std::string> candidate_names(const scope::CandidateSet& cs) {
    std::set<std::string> names;
    auto add = [&](const std::vector<scope::CandidateEntry>& v) {
        for (const auto& e : v) names.insert(e.name);
    };
    add(cs.v_p);
    add(cs.v_m);
    add(cs.v_c);
    add(cs.v_s);
    add(cs.v_i);
    add(cs.f_m);
    add(cs.f_i);
    add(cs.f_d);
    add(cs.f_l);
    add(cs.f_s);
    return names;
}

}  // namespace detail

// One position query per block kind that has blocks, each validated against
// the block table; the union is deduplicated so every line appears once and
// returned in ascending line order.
inline std::vector<prompt::PositionPrediction> predict_positions(
    const java::CodeModel& model, const java::MethodUnit& method,
    const std::vector<java::Block>& blocks, const prompt::InterprocContext& ctx,
    llm::Gateway& gateway, const prompt::TemplateSet& templates, Diagnostics& diagnostics) {
    const java::SourceUnit* unit = model.file(method.file);
    if (unit == nullptr) return {};

    std::vector<prompt::PositionPrediction> positions;
    bool queried = false;
    for (java::BlockKind kind :
         {java::BlockKind::MethodDef, java::BlockKind::Branch, java::BlockKind::Loop,
          java::BlockKind::TryCatch}) {
        std::vector<java::Block> of_kind;
        for (const auto& b : blocks)
            if (b.kind == kind) of_kind.push_back(b);
        if (of_kind.empty()) continue;  // kind absent: skip the query

        try {
            std::string annotated = java::annotate_method(*unit, method, of_kind);
            prompt::PromptBundle bundle =
                prompt::build_position_prompt(annotated, kind, ctx, templates);
            std::string response = gateway.complete(bundle);
            queried = true;
            auto parsed =
                prompt::parse_position_response(response, blocks, kind, &diagnostics);
            positions.insert(positions.end(), parsed.begin(), parsed.end());
        } catch (const Error& e) {
            if (detail::fatal_gateway_error(e.code())) throw;
            diag(diagnostics, "predict_positions",
                 std::string(java::block_kind_token(kind)) + " query failed for " + method.id +
                     ": " + e.what());
        }
    }

    std::sort(positions.begin(), positions.end());
    positions.erase(std::unique(positions.begin(), positions.end()), positions.end());
    positions.erase(std::unique(positions.begin(), positions.end(),
                                [](const prompt::PositionPrediction& a,
                                   const prompt::PositionPrediction& b) {
                                    return a.line == b.line;
                                }),
                    positions.end());
    if (positions.empty() && queried)
        diag(diagnostics, "predict_positions", "no positions predicted for " + method.id);
    return positions;
}

// One generation query per predicted position: 7-hop backward slice plus the
// candidate identifier sets. A malformed response is retried once, then the
// position is skipped. Variables outside candidates ∪ literals are flagged.
inline std::vector<GeneratedLog> generate_logs(const java::CodeModel& model,
                                               const analysis::ProjectPdg& pdg,
                                               const java::MethodUnit& method,
                                               const std::vector<prompt::PositionPrediction>&
                                                   positions,
                                               const std::vector<java::Block>& blocks,
                                               llm::Gateway& gateway, const PipelineConfig& cfg,
                                               Diagnostics& diagnostics) {
    std::vector<GeneratedLog> out;
    if (positions.empty()) return out;
    const java::SourceUnit* unit = model.file(method.file);
    if (unit == nullptr) return out;

    scope::CandidateSet cs = scope::collect_candidates(model, method);
    std::set<std::string> names = detail::candidate_names(cs);
    std::string candidates_text = scope::render_candidates(cs);

    for (const auto& pos : positions) {
        std::vector<std::string> notes;
        prompt::GenerationInputs in;
        in.kind = pos.kind;
        in.method_with_position = detail::mark_position(*unit, method, pos.line);
        in.candidates_text = candidates_text;
        try {
            bool degenerate = false;
            analysis::NodeKey entry =
                analysis::select_slice_entry(pdg, method.file, pos.line, &degenerate);
            analysis::Slice slice = analysis::backward_slice(pdg, entry, cfg.slice_hops);
            if (slice.degenerate) {
                // An empty-handed seed inside an else arm falls back to the
                // if condition so generation still sees the governing test.
                const java::Statement* branch =
                    detail::enclosing_if_with_else(method, pos.line);
                if (branch != nullptr) {
                    entry = analysis::select_slice_entry(pdg, method.file, branch->start_line,
                                                         &degenerate);
                    slice = analysis::backward_slice(pdg, entry, cfg.slice_hops);
                    notes.push_back("slice entry fell back to the if condition on line " +
                                    std::to_string(branch->start_line));
                }
            }
            in.degenerate = slice.degenerate;
            in.slice_text = slice.degenerate ? "" : analysis::render_slice(pdg, slice);
        } catch (const Error& e) {
            diag(diagnostics, "generate_logs",
                 "no slice for " + method.file + ":" + std::to_string(pos.line) + ": " +
                     e.what());
            in.degenerate = true;
        }

        prompt::PromptBundle bundle = prompt::build_generation_prompt(in, cfg.templates);
        std::optional<prompt::ParsedLog> parsed;
        for (int attempt = 0; attempt < 2 && !parsed; attempt++) {
            try {
                parsed = prompt::parse_log_response(gateway.complete(bundle));
            } catch (const Error& e) {
                if (detail::fatal_gateway_error(e.code())) throw;
                if (attempt == 1)
                    diag(diagnostics, "generate_logs",
                         "skipping " + method.file + ":" + std::to_string(pos.line) +
                             " after two malformed responses: " + e.what(),
                         pos.line);
            }
        }
        if (!parsed) continue;

        GeneratedLog gen;
        gen.log.file = method.file;
        gen.log.method_id = method.id;
        gen.log.line = pos.line;
        gen.log.level = parsed->level;
        gen.log.message = parsed->message;
        gen.log.variables = parsed->variables;
        gen.log.explanation = parsed->explanation;
        if (const java::Block* b = java::find_block(blocks, pos.kind, pos.block_id))
            gen.log.block = b->label();
        for (const auto& v : parsed->variables) {
            if (detail::literal_expression(v)) continue;
            if (names.count(refine::detail::base_identifier(trim(v)))) continue;
            notes.push_back("variable '" + v + "' is not among the candidate expressions");
        }
        gen.notes = std::move(notes);
        out.push_back(std::move(gen));
    }
    return out;
}

// predict → generate → level-refine → insert → deduplicate. Prediction and
// generation run concurrently across methods, bounded by the gateway's slot
// gate; everything after the join is single-threaded.
inline PipelineResult run_pipeline(const java::CodeModel& model, const PipelineConfig& cfg,
                                   llm::Gateway& gateway) {
    PipelineResult out;
    for (const auto& unit : model.files) out.files[unit.path] = unit.text;

    std::vector<const java::MethodUnit*> methods;
    for (const auto& m : model.methods)
        if (m.body_end_line > 0) methods.push_back(&m);
    std::sort(methods.begin(), methods.end(),
              [](const java::MethodUnit* a, const java::MethodUnit* b) { return a->id < b->id; });
    if (methods.empty()) return out;

    analysis::CallGraph graph = analysis::build_call_graph(model);
    analysis::ProjectPdg pdg = analysis::build_project_pdg(model);

    // --- phase A: predict + generate, concurrent across methods ---
    struct MethodWork {
        std::vector<GeneratedLog> logs;
        Diagnostics diagnostics;
    };
    std::vector<MethodWork> work(methods.size());
    std::atomic<size_t> cursor{0};
    std::atomic<bool> stop{false};
    std::mutex fatal_mutex;
    std::optional<Error> fatal;

    auto worker = [&]() {
        while (!stop.load()) {
            size_t i = cursor.fetch_add(1);
            if (i >= methods.size()) return;
            const java::MethodUnit& method = *methods[i];
            MethodWork& w = work[i];
            try {
                std::vector<java::Block> blocks = java::extract_blocks(method);
                prompt::InterprocContext ctx = prompt::build_interproc_context(
                    model, graph, method, cfg.seed ^ detail::fnv1a(method.id),
                    cfg.k_per_direction);
                auto positions = predict_positions(model, method, blocks, ctx, gateway,
                                                   cfg.templates, w.diagnostics);
                w.logs = generate_logs(model, pdg, method, positions, blocks, gateway, cfg,
                                       w.diagnostics);
            } catch (const Error& e) {
                if (detail::fatal_gateway_error(e.code())) {
                    std::lock_guard<std::mutex> hold(fatal_mutex);
                    if (!fatal) fatal = e;
                    stop.store(true);
                } else {
                    diag(w.diagnostics, "pipeline",
                         "method " + method.id + " skipped: " + e.what());
                }
            }
        }
    };
    size_t n_workers = std::min<size_t>(
        methods.size(), static_cast<size_t>(std::max(1, gateway.config().concurrency)));
    std::vector<std::thread> pool;
    for (size_t i = 0; i < n_workers; i++) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (fatal) throw *fatal;

    std::vector<GeneratedLog> generated;
    for (size_t i = 0; i < methods.size(); i++) {
        for (auto& d : work[i].diagnostics) out.diagnostics.push_back(std::move(d));
        for (auto& g : work[i].logs) generated.push_back(std::move(g));
    }

    // --- phase B: refine levels, insert, deduplicate (single-threaded) ---
    if (!cfg.skip_level_refine) {
        std::optional<Error> refine_fatal;
        auto complete = [&](const prompt::PromptBundle& b) -> std::string {
            try {
                return gateway.complete(b);
            } catch (const Error& e) {
                if (detail::fatal_gateway_error(e.code()) && !refine_fatal) refine_fatal = e;
                throw;
            }
        };
        for (auto& gen : generated) {
            refine::LevelOutcome refined =
                refine::refine_level(model, gen.log, cfg.templates, complete);
            if (refine_fatal) throw *refine_fatal;
            if (refined.adjusted) {
                gen.notes.push_back("level adjusted from " + gen.log.level + " to " +
                                    refined.log.level);
                gen.log.level = refined.log.level;
            }
            for (const auto& d : refined.diagnostics) gen.notes.push_back(d.message);
        }
    }

    std::vector<java::LogStatement> to_insert;
    to_insert.reserve(generated.size());
    for (const auto& gen : generated) to_insert.push_back(gen.log);
    InsertOutcome placed = insert_logs(model, to_insert);
    for (auto& d : placed.diagnostics) out.diagnostics.push_back(std::move(d));
    out.files = placed.files;

    auto notes_of = [&](int input_index) -> const std::vector<std::string>& {
        static const std::vector<std::string> none;
        if (input_index < 0 || input_index >= static_cast<int>(generated.size())) return none;
        return generated[static_cast<size_t>(input_index)].notes;
    };
    auto report_line = [&](const java::LogStatement& log, int input_index) {
        nlohmann::json j = log;
        j["phase_diagnostics"] = notes_of(input_index);
        out.logs.push_back(log);
        out.report.push_back(std::move(j));
    };

    if (cfg.skip_dedup || placed.inserted.empty()) {
        for (const auto& ins : placed.inserted) report_line(ins.log, ins.input_index);
        return out;
    }

    try {
        java::CodeModel augmented;
        for (const auto& [path, text] : placed.files) java::parse_source(augmented, path, text);
        augmented.rebuild_indexes();

        std::vector<java::LogStatement> predicted;
        predicted.reserve(placed.inserted.size());
        for (const auto& ins : placed.inserted) predicted.push_back(ins.log);
        refine::DedupOutcome deduped = refine::deduplicate(augmented, predicted, cfg.dedup);

        out.files = deduped.files;
        out.dedup_report = std::move(deduped.report);
        for (auto& d : deduped.diagnostics) out.diagnostics.push_back(std::move(d));
        for (size_t i = 0; i < deduped.surviving.size(); i++)
            report_line(deduped.surviving[i],
                        placed.inserted[static_cast<size_t>(deduped.surviving_index[i])]
                            .input_index);
    } catch (const Error& e) {
        diag(out.diagnostics, "pipeline",
             std::string("deduplication skipped: ") + e.what());
        for (const auto& ins : placed.inserted) report_line(ins.log, ins.input_index);
    }
    return out;
}

}  // namespace logsmith::pipeline
