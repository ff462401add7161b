#include <gtest/gtest.h>

#include "logsmith/java/parser.hpp"
#include "logsmith/refine/dedup.hpp"
#include "logsmith/refine/level.hpp"

using namespace logsmith;
using namespace logsmith::java;
using namespace logsmith::refine;

namespace {

CodeModel parse_one(const std::string& text, const std::string& path) {
    CodeModel model;
    parse_source(model, path, text);
    model.rebuild_indexes();
    return model;
}

LogStatement at(const std::string& file, const std::string& method_id, int line,
                const std::string& level, const std::string& message,
                std::vector<std::string> vars = {}) {
    LogStatement log;
    log.file = file;
    log.method_id = method_id;
    log.line = line;
    log.level = level;
    log.message = message;
    log.variables = std::move(vars);
    return log;
}

// Re-parsing the deduplicated files and running dedup again must be a no-op.
void expect_idempotent(const DedupOutcome& out, const std::string& path) {
    CodeModel again = parse_one(out.files.at(path), path);
    DedupOutcome second = deduplicate(again, out.surviving);
    EXPECT_TRUE(second.report.empty());
    ASSERT_EQ(second.surviving.size(), out.surviving.size());
    for (size_t i = 0; i < second.surviving.size(); i++)
        EXPECT_EQ(second.surviving[i].line, out.surviving[i].line);
    EXPECT_EQ(second.files.at(path), out.files.at(path));
}

// ---------------------------------------------------------------------------
// message equivalence
// ---------------------------------------------------------------------------

TEST(MessageEquivalence, JaccardOnTokenSets) {
    // 3 shared tokens {failed, push, data} over a union of 5.
    EXPECT_NEAR(token_jaccard(message_tokens("Failed to push data: {}"),
                              message_tokens("Push of data failed: {}")),
                0.6, 1e-9);
    EXPECT_FALSE(message_equivalent("Failed to push data: {}", "Push of data failed: {}"));
    EXPECT_TRUE(message_equivalent("user {} not found", "User not found: {}"));
    EXPECT_TRUE(message_equivalent("retry", "Retry!"));
}

TEST(MessageEquivalence, PlaceholdersAndPunctuationAreStripped) {
    EXPECT_EQ(message_tokens("Got {} of {}: done."),
              (std::set<std::string>{"got", "of", "done"}));
    EXPECT_TRUE(message_equivalent("", ""));
    EXPECT_TRUE(message_equivalent("{} {}", "..."));  // both token sets empty
    EXPECT_FALSE(message_equivalent("queue empty", ""));
}

// ---------------------------------------------------------------------------
// level refinement
// ---------------------------------------------------------------------------

const std::string kSvc =
    "package app;\n"                                                            // 1
    "import org.slf4j.Logger;\n"                                                // 2
    "import org.slf4j.LoggerFactory;\n"                                         // 3
    "public class Svc {\n"                                                      // 4
    "    private static final Logger log = LoggerFactory.getLogger(Svc.class);\n"  // 5
    "    void send(String payload) {\n"                                         // 6
    "        try {\n"                                                           // 7
    "            push(payload);\n"                                              // 8
    "        } catch (Exception e) {\n"                                         // 9
    "            log.debug(\"push failed for {}\", payload);\n"                 // 10
    "        }\n"                                                               // 11
    "    }\n"                                                                   // 12
    "    void push(String p) { }\n"                                             // 13
    "}\n";                                                                      // 14

LogStatement svc_log() {
    LogStatement log = at("Svc.java", "app.Svc.send(String)", 10, "debug",
                          "push failed for {}", {"payload"});
    log.explanation = "records the delivery failure";
    return log;
}

TEST(LevelRefine, KeepLeavesLogUntouched) {
    CodeModel model = parse_one(kSvc, "Svc.java");
    LevelOutcome out = refine_level(model, svc_log(), prompt::TemplateSet{},
                                    [](const prompt::PromptBundle&) { return "keep"; });
    EXPECT_FALSE(out.adjusted);
    EXPECT_EQ(out.log.level, "debug");
    EXPECT_TRUE(out.diagnostics.empty());
}

TEST(LevelRefine, AdjustChangesOnlyTheLevel) {
    CodeModel model = parse_one(kSvc, "Svc.java");
    LevelOutcome out = refine_level(model, svc_log(), prompt::TemplateSet{},
                                    [](const prompt::PromptBundle&) { return "adjust: ERROR"; });
    EXPECT_TRUE(out.adjusted);
    EXPECT_EQ(out.log.level, "error");
    EXPECT_EQ(out.log.message, "push failed for {}");
    EXPECT_EQ(out.log.variables, (std::vector<std::string>{"payload"}));
    EXPECT_EQ(out.log.line, 10);
    EXPECT_TRUE(out.diagnostics.empty());
}

TEST(LevelRefine, AdjustToSameLevelIsNotAnAdjustment) {
    CodeModel model = parse_one(kSvc, "Svc.java");
    LevelOutcome out = refine_level(model, svc_log(), prompt::TemplateSet{},
                                    [](const prompt::PromptBundle&) { return "adjust: DEBUG"; });
    EXPECT_FALSE(out.adjusted);
    EXPECT_EQ(out.log.level, "debug");
}

TEST(LevelRefine, InvalidLevelKeepsAndDiagnoses) {
    CodeModel model = parse_one(kSvc, "Svc.java");
    LevelOutcome out =
        refine_level(model, svc_log(), prompt::TemplateSet{},
                     [](const prompt::PromptBundle&) { return "adjust: CRITICAL"; });
    EXPECT_FALSE(out.adjusted);
    EXPECT_EQ(out.log.level, "debug");
    ASSERT_EQ(out.diagnostics.size(), 1u);
    EXPECT_NE(out.diagnostics[0].message.find("kept"), std::string::npos);
}

TEST(LevelRefine, UnknownMethodKeepsAndDiagnoses) {
    CodeModel model = parse_one(kSvc, "Svc.java");
    LogStatement log = svc_log();
    log.method_id = "app.Svc.missing()";
    bool called = false;
    LevelOutcome out = refine_level(model, log, prompt::TemplateSet{},
                                    [&](const prompt::PromptBundle&) {
                                        called = true;
                                        return "keep";
                                    });
    EXPECT_FALSE(called);
    EXPECT_FALSE(out.adjusted);
    ASSERT_EQ(out.diagnostics.size(), 1u);
}

TEST(LevelRefine, PromptCarriesAllFiveFactors) {
    CodeModel model = parse_one(kSvc, "Svc.java");
    prompt::PromptBundle seen;
    refine_level(model, svc_log(), prompt::TemplateSet{},
                 [&](const prompt::PromptBundle& b) {
                     seen = b;
                     return "keep";
                 });
    EXPECT_EQ(seen.phase, prompt::Phase::LevelRefine);
    EXPECT_EQ(seen.user_text.find("{{"), std::string::npos);  // fully substituted
    EXPECT_NE(seen.user_text.find("debug"), std::string::npos);
    EXPECT_NE(seen.user_text.find("push failed for {}"), std::string::npos);
    EXPECT_NE(seen.user_text.find("push(payload);"), std::string::npos);
    EXPECT_NE(seen.user_text.find("records the delivery failure"), std::string::npos);
    EXPECT_NE(seen.user_text.find("try-catch exception handling"), std::string::npos);
}

// ---------------------------------------------------------------------------
// dedup rule 1: throw
// ---------------------------------------------------------------------------

TEST(DedupThrow, RemovesLogMatchingEscapingThrow) {
    const std::string src =
        "package app;\n"                                                            // 1
        "public class T1 {\n"                                                       // 2
        "    private static final Logger log = LoggerFactory.getLogger(T1.class);\n"  // 3
        "    void act(int id) {\n"                                                  // 4
        "        if (id < 0) {\n"                                                   // 5
        "            log.error(\"invalid id value {}\", id);\n"                     // 6
        "            throw new IllegalArgumentException(\"invalid id value\");\n"   // 7
        "        }\n"                                                               // 8
        "    }\n"                                                                   // 9
        "}\n";
    CodeModel model = parse_one(src, "T1.java");
    std::vector<LogStatement> predicted = {
        at("T1.java", "app.T1.act(int)", 6, "error", "invalid id value {}", {"id"})};
    DedupOutcome out = deduplicate(model, predicted);
    ASSERT_EQ(out.report.size(), 1u);
    EXPECT_EQ(out.report[0].rule, "throw");
    EXPECT_EQ(out.report[0].removed_log.line, 6);
    EXPECT_NE(out.report[0].counterpart.find("IllegalArgumentException"), std::string::npos);
    EXPECT_TRUE(out.surviving.empty());
    // the line is gone from the source
    EXPECT_EQ(out.files.at("T1.java").find("log.error"), std::string::npos);
    expect_idempotent(out, "T1.java");
}

TEST(DedupThrow, RemovesLogWhenCallerCatchesAndPrints) {
    const std::string src =
        "package app;\n"                                                            // 1
        "public class T2 {\n"                                                       // 2
        "    private static final Logger log = LoggerFactory.getLogger(T2.class);\n"  // 3
        "    void outer() {\n"                                                      // 4
        "        try {\n"                                                           // 5
        "            inner(7);\n"                                                   // 6
        "        } catch (RuntimeException e) {\n"                                  // 7
        "            System.err.println(\"boom \" + e.getMessage());\n"             // 8
        "        }\n"                                                               // 9
        "    }\n"                                                                   // 10
        "    void inner(int n) {\n"                                                 // 11
        "        log.warn(\"bad state found\");\n"                                  // 12
        "        throw new IllegalStateException(\"bad state found\");\n"           // 13
        "    }\n"                                                                   // 14
        "}\n";
    CodeModel model = parse_one(src, "T2.java");
    std::vector<LogStatement> predicted = {
        at("T2.java", "app.T2.inner(int)", 12, "warn", "bad state found")};
    DedupOutcome out = deduplicate(model, predicted);
    ASSERT_EQ(out.report.size(), 1u);
    EXPECT_EQ(out.report[0].rule, "throw");
    EXPECT_TRUE(out.surviving.empty());
}

TEST(DedupThrow, KeepsLogWhenExceptionIsSwallowedSilently) {
    const std::string src =
        "package app;\n"                                                            // 1
        "public class T3 {\n"                                                       // 2
        "    private static final Logger log = LoggerFactory.getLogger(T3.class);\n"  // 3
        "    void outer() {\n"                                                      // 4
        "        try {\n"                                                           // 5
        "            inner(7);\n"                                                   // 6
        "        } catch (RuntimeException e) {\n"                                  // 7
        "            recover();\n"                                                  // 8
        "        }\n"                                                               // 9
        "    }\n"                                                                   // 10
        "    void inner(int n) {\n"                                                 // 11
        "        log.warn(\"bad state found\");\n"                                  // 12
        "        throw new IllegalStateException(\"bad state found\");\n"           // 13
        "    }\n"                                                                   // 14
        "    void recover() { }\n"                                                  // 15
        "}\n";
    CodeModel model = parse_one(src, "T3.java");
    std::vector<LogStatement> predicted = {
        at("T3.java", "app.T3.inner(int)", 12, "warn", "bad state found")};
    DedupOutcome out = deduplicate(model, predicted);
    EXPECT_TRUE(out.report.empty());
    ASSERT_EQ(out.surviving.size(), 1u);
    EXPECT_EQ(out.surviving[0].line, 12);
}

TEST(DedupThrow, KeepsLogWhenThrowMessageIsUntraceable) {
    const std::string src =
        "package app;\n"                                                            // 1
        "public class T4 {\n"                                                       // 2
        "    private static final Logger log = LoggerFactory.getLogger(T4.class);\n"  // 3
        "    void act() {\n"                                                        // 4
        "        log.error(\"processing halted\");\n"                               // 5
        "        throw new IllegalStateException(describe());\n"                    // 6
        "    }\n"                                                                   // 7
        "    String describe() { return \"x\"; }\n"                                 // 8
        "}\n";
    CodeModel model = parse_one(src, "T4.java");
    std::vector<LogStatement> predicted = {
        at("T4.java", "app.T4.act()", 5, "error", "processing halted")};
    DedupOutcome out = deduplicate(model, predicted);
    EXPECT_TRUE(out.report.empty());
    EXPECT_EQ(out.surviving.size(), 1u);
}

TEST(DedupThrow, TracesThrowMessageThroughLocalVariable) {
    const std::string src =
        "package app;\n"                                                            // 1
        "public class T5 {\n"                                                       // 2
        "    private static final Logger log = LoggerFactory.getLogger(T5.class);\n"  // 3
        "    void act(int id) {\n"                                                  // 4
        "        String reason = \"quota exceeded for tenant\";\n"                  // 5
        "        log.error(\"quota exceeded for tenant\");\n"                       // 6
        "        throw new IllegalStateException(reason);\n"                        // 7
        "    }\n"                                                                   // 8
        "}\n";
    CodeModel model = parse_one(src, "T5.java");
    std::vector<LogStatement> predicted = {
        at("T5.java", "app.T5.act(int)", 6, "error", "quota exceeded for tenant")};
    DedupOutcome out = deduplicate(model, predicted);
    ASSERT_EQ(out.report.size(), 1u);
    EXPECT_EQ(out.report[0].rule, "throw");
}

// ---------------------------------------------------------------------------
// dedup rule 2: if-else
// ---------------------------------------------------------------------------

const std::string kBranchSrc =
    "package app;\n"                                                            // 1
    "public class B1 {\n"                                                       // 2
    "    private static final Logger log = LoggerFactory.getLogger(B1.class);\n"  // 3
    "    void check(int v) {\n"                                                 // 4
    "        if (v > 0) {\n"                                                    // 5
    "            log.info(\"validation outcome for {}\", v);\n"                 // 6
    "        } else {\n"                                                        // 7
    "            log.warn(\"validation outcome for {}\", v);\n"                 // 8
    "        }\n"                                                               // 9
    "    }\n"                                                                   // 10
    "}\n";

TEST(DedupIfElse, HigherSeveritySurvives) {
    CodeModel model = parse_one(kBranchSrc, "B1.java");
    std::vector<LogStatement> predicted = {
        at("B1.java", "app.B1.check(int)", 6, "info", "validation outcome for {}", {"v"}),
        at("B1.java", "app.B1.check(int)", 8, "warn", "validation outcome for {}", {"v"})};
    DedupOutcome out = deduplicate(model, predicted);
    ASSERT_EQ(out.report.size(), 1u);
    EXPECT_EQ(out.report[0].rule, "if-else");
    EXPECT_EQ(out.report[0].removed_log.line, 6);  // the info one
    ASSERT_EQ(out.surviving.size(), 1u);
    EXPECT_EQ(out.surviving[0].level, "warn");
    EXPECT_EQ(out.surviving[0].line, 7);  // shifted up by the removal
    expect_idempotent(out, "B1.java");
}

TEST(DedupIfElse, TieKeepsTheElseArm) {
    CodeModel model = parse_one(kBranchSrc, "B1.java");
    std::vector<LogStatement> predicted = {
        at("B1.java", "app.B1.check(int)", 6, "info", "validation outcome for {}", {"v"}),
        at("B1.java", "app.B1.check(int)", 8, "info", "validation outcome for {}", {"v"})};
    DedupOutcome out = deduplicate(model, predicted);
    ASSERT_EQ(out.report.size(), 1u);
    EXPECT_EQ(out.report[0].removed_log.line, 6);
    ASSERT_EQ(out.surviving.size(), 1u);
    EXPECT_EQ(out.surviving[0].line, 7);
}

TEST(DedupIfElse, DifferentMessagesAreLeftAlone) {
    CodeModel model = parse_one(kBranchSrc, "B1.java");
    std::vector<LogStatement> predicted = {
        at("B1.java", "app.B1.check(int)", 6, "info", "value accepted", {"v"}),
        at("B1.java", "app.B1.check(int)", 8, "warn", "resetting the counter", {"v"})};
    DedupOutcome out = deduplicate(model, predicted);
    EXPECT_TRUE(out.report.empty());
    EXPECT_EQ(out.surviving.size(), 2u);
}

// ---------------------------------------------------------------------------
// dedup rule 3: start-end
// ---------------------------------------------------------------------------

TEST(DedupStartEnd, EndPostdominatingStartRemovesStart) {
    const std::string src =
        "package app;\n"                                                            // 1
        "public class S1 {\n"                                                       // 2
        "    private static final Logger log = LoggerFactory.getLogger(S1.class);\n"  // 3
        "    void sync(int n) {\n"                                                  // 4
        "        log.info(\"Starting sync\");\n"                                    // 5
        "        step();\n"                                                         // 6
        "        log.info(\"Finished sync\");\n"                                    // 7
        "    }\n"                                                                   // 8
        "    void step() { }\n"                                                     // 9
        "}\n";
    CodeModel model = parse_one(src, "S1.java");
    std::vector<LogStatement> predicted = {
        at("S1.java", "app.S1.sync(int)", 5, "info", "Starting sync"),
        at("S1.java", "app.S1.sync(int)", 7, "info", "Finished sync")};
    DedupOutcome out = deduplicate(model, predicted);
    ASSERT_EQ(out.report.size(), 1u);
    EXPECT_EQ(out.report[0].rule, "start-end");
    EXPECT_EQ(out.report[0].removed_log.message, "Starting sync");
    ASSERT_EQ(out.surviving.size(), 1u);
    EXPECT_EQ(out.surviving[0].message, "Finished sync");
    EXPECT_EQ(out.surviving[0].line, 6);
    expect_idempotent(out, "S1.java");
}

TEST(DedupStartEnd, EndInsideBranchKeepsBoth) {
    const std::string src =
        "package app;\n"                                                            // 1
        "public class S2 {\n"                                                       // 2
        "    private static final Logger log = LoggerFactory.getLogger(S2.class);\n"  // 3
        "    void sync(int n) {\n"                                                  // 4
        "        log.info(\"Starting sync\");\n"                                    // 5
        "        if (n > 0) {\n"                                                    // 6
        "            log.info(\"Finished sync\");\n"                                // 7
        "        }\n"                                                               // 8
        "    }\n"                                                                   // 9
        "}\n";
    CodeModel model = parse_one(src, "S2.java");
    std::vector<LogStatement> predicted = {
        at("S2.java", "app.S2.sync(int)", 5, "info", "Starting sync"),
        at("S2.java", "app.S2.sync(int)", 7, "info", "Finished sync")};
    DedupOutcome out = deduplicate(model, predicted);
    EXPECT_TRUE(out.report.empty());
    EXPECT_EQ(out.surviving.size(), 2u);
}

TEST(DedupStartEnd, TraceLevelPairsAreExempt) {
    const std::string src =
        "package app;\n"                                                            // 1
        "public class S3 {\n"                                                       // 2
        "    private static final Logger log = LoggerFactory.getLogger(S3.class);\n"  // 3
        "    void sync(int n) {\n"                                                  // 4
        "        log.trace(\"Starting sync\");\n"                                   // 5
        "        step();\n"                                                         // 6
        "        log.trace(\"Finished sync\");\n"                                   // 7
        "    }\n"                                                                   // 8
        "    void step() { }\n"                                                     // 9
        "}\n";
    CodeModel model = parse_one(src, "S3.java");
    std::vector<LogStatement> predicted = {
        at("S3.java", "app.S3.sync(int)", 5, "trace", "Starting sync"),
        at("S3.java", "app.S3.sync(int)", 7, "trace", "Finished sync")};
    DedupOutcome out = deduplicate(model, predicted);
    EXPECT_TRUE(out.report.empty());
    EXPECT_EQ(out.surviving.size(), 2u);
}

TEST(DedupStartEnd, DifferentStemsAreLeftAlone) {
    const std::string src =
        "package app;\n"                                                            // 1
        "public class S4 {\n"                                                       // 2
        "    private static final Logger log = LoggerFactory.getLogger(S4.class);\n"  // 3
        "    void sync(int n) {\n"                                                  // 4
        "        log.info(\"Starting backup\");\n"                                  // 5
        "        step();\n"                                                         // 6
        "        log.info(\"Finished restore\");\n"                                 // 7
        "    }\n"                                                                   // 8
        "    void step() { }\n"                                                     // 9
        "}\n";
    CodeModel model = parse_one(src, "S4.java");
    std::vector<LogStatement> predicted = {
        at("S4.java", "app.S4.sync(int)", 5, "info", "Starting backup"),
        at("S4.java", "app.S4.sync(int)", 7, "info", "Finished restore")};
    DedupOutcome out = deduplicate(model, predicted);
    EXPECT_TRUE(out.report.empty());
}

// ---------------------------------------------------------------------------
// dedup rule 4: shared-var
// ---------------------------------------------------------------------------

TEST(DedupSharedVar, ReassignmentBetweenLogsRemovesTheEarlier) {
    const std::string src =
        "package app;\n"                                                            // 1
        "public class V1 {\n"                                                       // 2
        "    private static final Logger log = LoggerFactory.getLogger(V1.class);\n"  // 3
        "    void grow(int seed) {\n"                                               // 4
        "        int count = seed;\n"                                               // 5
        "        log.debug(\"count now {}\", count);\n"                             // 6
        "        count = count + 1;\n"                                              // 7
        "        log.debug(\"count now {}\", count);\n"                             // 8
        "    }\n"                                                                   // 9
        "}\n";
    CodeModel model = parse_one(src, "V1.java");
    std::vector<LogStatement> predicted = {
        at("V1.java", "app.V1.grow(int)", 6, "debug", "count now {}", {"count"}),
        at("V1.java", "app.V1.grow(int)", 8, "debug", "count now {}", {"count"})};
    DedupOutcome out = deduplicate(model, predicted);
    ASSERT_EQ(out.report.size(), 1u);
    EXPECT_EQ(out.report[0].rule, "shared-var");
    EXPECT_EQ(out.report[0].removed_log.line, 6);
    ASSERT_EQ(out.surviving.size(), 1u);
    EXPECT_EQ(out.surviving[0].line, 7);
    expect_idempotent(out, "V1.java");
}

TEST(DedupSharedVar, NoReassignmentRemovesTheLater) {
    const std::string src =
        "package app;\n"                                                            // 1
        "public class V2 {\n"                                                       // 2
        "    private static final Logger log = LoggerFactory.getLogger(V2.class);\n"  // 3
        "    void grow(int seed) {\n"                                               // 4
        "        int count = seed;\n"                                               // 5
        "        log.debug(\"count now {}\", count);\n"                             // 6
        "        step();\n"                                                         // 7
        "        log.debug(\"count now {}\", count);\n"                             // 8
        "    }\n"                                                                   // 9
        "    void step() { }\n"                                                     // 10
        "}\n";
    CodeModel model = parse_one(src, "V2.java");
    std::vector<LogStatement> predicted = {
        at("V2.java", "app.V2.grow(int)", 6, "debug", "count now {}", {"count"}),
        at("V2.java", "app.V2.grow(int)", 8, "debug", "count now {}", {"count"})};
    DedupOutcome out = deduplicate(model, predicted);
    ASSERT_EQ(out.report.size(), 1u);
    EXPECT_EQ(out.report[0].rule, "shared-var");
    EXPECT_EQ(out.report[0].removed_log.line, 8);
    ASSERT_EQ(out.surviving.size(), 1u);
    EXPECT_EQ(out.surviving[0].line, 6);
}

// ---------------------------------------------------------------------------
// dedup rule 5: proximity
// ---------------------------------------------------------------------------

TEST(DedupProximity, LogCloserToMeaningfulCodeSurvives) {
    const std::string src =
        "package app;\n"                                                            // 1
        "public class P1 {\n"                                                       // 2
        "    private static final Logger log = LoggerFactory.getLogger(P1.class);\n"  // 3
        "    void relay(int a, int b) {\n"                                          // 4
        "        log.info(\"relay step complete\");\n"                              // 5
        "        int x = a + b;\n"                                                  // 6
        "        dispatch(x);\n"                                                    // 7
        "        log.info(\"relay step complete\");\n"                              // 8
        "    }\n"                                                                   // 9
        "    void dispatch(int x) { }\n"                                            // 10
        "}\n";
    CodeModel model = parse_one(src, "P1.java");
    std::vector<LogStatement> predicted = {
        at("P1.java", "app.P1.relay(int,int)", 5, "info", "relay step complete"),
        at("P1.java", "app.P1.relay(int,int)", 8, "info", "relay step complete")};
    DedupOutcome out = deduplicate(model, predicted);
    ASSERT_EQ(out.report.size(), 1u);
    EXPECT_EQ(out.report[0].rule, "proximity");
    EXPECT_EQ(out.report[0].removed_log.line, 5);  // two lines from dispatch(); loser
    ASSERT_EQ(out.surviving.size(), 1u);
    EXPECT_EQ(out.surviving[0].line, 7);
    expect_idempotent(out, "P1.java");
}

TEST(DedupProximity, TieKeepsTheEarlierLog) {
    const std::string src =
        "package app;\n"                                                            // 1
        "public class P2 {\n"                                                       // 2
        "    private static final Logger log = LoggerFactory.getLogger(P2.class);\n"  // 3
        "    void relay(int a) {\n"                                                 // 4
        "        log.info(\"relay step complete\");\n"                              // 5
        "        dispatch(a);\n"                                                    // 6
        "        log.info(\"relay step complete\");\n"                              // 7
        "    }\n"                                                                   // 8
        "    void dispatch(int x) { }\n"                                            // 9
        "}\n";
    CodeModel model = parse_one(src, "P2.java");
    std::vector<LogStatement> predicted = {
        at("P2.java", "app.P2.relay(int)", 5, "info", "relay step complete"),
        at("P2.java", "app.P2.relay(int)", 7, "info", "relay step complete")};
    DedupOutcome out = deduplicate(model, predicted);
    ASSERT_EQ(out.report.size(), 1u);
    EXPECT_EQ(out.report[0].removed_log.line, 7);
    ASSERT_EQ(out.surviving.size(), 1u);
    EXPECT_EQ(out.surviving[0].line, 5);
}

TEST(DedupProximity, SharedVariablePairsAreNotItsBusiness) {
    // Equivalent messages sharing a variable belong to the shared-var rule; the
    // proximity rule must not double-fire after it resolved the pair.
    const std::string src =
        "package app;\n"                                                            // 1
        "public class P3 {\n"                                                       // 2
        "    private static final Logger log = LoggerFactory.getLogger(P3.class);\n"  // 3
        "    void relay(int a) {\n"                                                 // 4
        "        log.info(\"value is {}\", a);\n"                                   // 5
        "        dispatch(a);\n"                                                    // 6
        "        log.info(\"value is {}\", a);\n"                                   // 7
        "    }\n"                                                                   // 8
        "    void dispatch(int x) { }\n"                                            // 9
        "}\n";
    CodeModel model = parse_one(src, "P3.java");
    std::vector<LogStatement> predicted = {
        at("P3.java", "app.P3.relay(int)", 5, "info", "value is {}", {"a"}),
        at("P3.java", "app.P3.relay(int)", 7, "info", "value is {}", {"a"})};
    DedupOutcome out = deduplicate(model, predicted);
    ASSERT_EQ(out.report.size(), 1u);
    EXPECT_EQ(out.report[0].rule, "shared-var");
}

// ---------------------------------------------------------------------------
// cross-cutting invariants
// ---------------------------------------------------------------------------

TEST(DedupInvariants, UniqueLogsWithNoCounterpartAreNeverRemoved) {
    const std::string src =
        "package app;\n"                                                            // 1
        "public class U1 {\n"                                                       // 2
        "    private static final Logger log = LoggerFactory.getLogger(U1.class);\n"  // 3
        "    void act(int v) {\n"                                                   // 4
        "        log.info(\"cache warmed with {} entries\", v);\n"                  // 5
        "        log.debug(\"eviction pass scheduled\");\n"                         // 6
        "        step();\n"                                                         // 7
        "    }\n"                                                                   // 8
        "    void step() { }\n"                                                     // 9
        "}\n";
    CodeModel model = parse_one(src, "U1.java");
    std::vector<LogStatement> predicted = {
        at("U1.java", "app.U1.act(int)", 5, "info", "cache warmed with {} entries", {"v"}),
        at("U1.java", "app.U1.act(int)", 6, "debug", "eviction pass scheduled")};
    DedupOutcome out = deduplicate(model, predicted);
    EXPECT_TRUE(out.report.empty());
    EXPECT_EQ(out.surviving.size(), 2u);
    EXPECT_EQ(out.files.at("U1.java"), src);
}

TEST(DedupInvariants, DeveloperLogsAreNeverRemoved) {
    // The reassignment points at the developer log as the redundancy loser;
    // since only predicted logs may be removed, the pair is left alone.
    const std::string src =
        "package app;\n"                                                            // 1
        "public class D1 {\n"                                                       // 2
        "    private static final Logger log = LoggerFactory.getLogger(D1.class);\n"  // 3
        "    void grow(int seed) {\n"                                               // 4
        "        int count = seed;\n"                                               // 5
        "        log.debug(\"count now {}\", count);\n"                             // 6  developer
        "        count = count + 1;\n"                                              // 7
        "        log.debug(\"count now {}\", count);\n"                             // 8  predicted
        "    }\n"                                                                   // 9
        "}\n";
    CodeModel model = parse_one(src, "D1.java");
    std::vector<LogStatement> predicted = {
        at("D1.java", "app.D1.grow(int)", 8, "debug", "count now {}", {"count"})};
    DedupOutcome out = deduplicate(model, predicted);
    EXPECT_TRUE(out.report.empty());
    ASSERT_EQ(out.surviving.size(), 1u);
    EXPECT_EQ(out.surviving[0].line, 8);
    EXPECT_EQ(out.files.at("D1.java"), src);
}

TEST(DedupInvariants, DeveloperLogCanStillOutrankAPredictedOne) {
    // Same shape but without the reassignment: the later log is the loser, and
    // the later log is the predicted one, so the developer log wins the pair.
    const std::string src =
        "package app;\n"                                                            // 1
        "public class D2 {\n"                                                       // 2
        "    private static final Logger log = LoggerFactory.getLogger(D2.class);\n"  // 3
        "    void grow(int seed) {\n"                                               // 4
        "        int count = seed;\n"                                               // 5
        "        log.debug(\"count now {}\", count);\n"                             // 6  developer
        "        step();\n"                                                         // 7
        "        log.debug(\"count now {}\", count);\n"                             // 8  predicted
        "    }\n"                                                                   // 9
        "    void step() { }\n"                                                     // 10
        "}\n";
    CodeModel model = parse_one(src, "D2.java");
    std::vector<LogStatement> predicted = {
        at("D2.java", "app.D2.grow(int)", 8, "debug", "count now {}", {"count"})};
    DedupOutcome out = deduplicate(model, predicted);
    ASSERT_EQ(out.report.size(), 1u);
    EXPECT_EQ(out.report[0].rule, "shared-var");
    EXPECT_EQ(out.report[0].removed_log.line, 8);
    EXPECT_TRUE(out.surviving.empty());
    // the developer log is still in the source
    EXPECT_NE(out.files.at("D2.java").find("log.debug"), std::string::npos);
}

TEST(DedupInvariants, RuleOrderIfElseBeatsSharedVar) {
    // Logs in opposite arms that also share a variable: the if-else rule runs
    // first and resolves the pair by severity, not by definition flow.
    CodeModel model = parse_one(kBranchSrc, "B1.java");
    std::vector<LogStatement> predicted = {
        at("B1.java", "app.B1.check(int)", 6, "error", "validation outcome for {}", {"v"}),
        at("B1.java", "app.B1.check(int)", 8, "info", "validation outcome for {}", {"v"})};
    DedupOutcome out = deduplicate(model, predicted);
    ASSERT_EQ(out.report.size(), 1u);
    EXPECT_EQ(out.report[0].rule, "if-else");
    EXPECT_EQ(out.report[0].removed_log.line, 8);  // error in the then arm survives
    ASSERT_EQ(out.surviving.size(), 1u);
    EXPECT_EQ(out.surviving[0].level, "error");
}

TEST(DedupInvariants, ReportEntrySchema) {
    CodeModel model = parse_one(kBranchSrc, "B1.java");
    std::vector<LogStatement> predicted = {
        at("B1.java", "app.B1.check(int)", 6, "info", "validation outcome for {}", {"v"}),
        at("B1.java", "app.B1.check(int)", 8, "warn", "validation outcome for {}", {"v"})};
    DedupOutcome out = deduplicate(model, predicted);
    ASSERT_EQ(out.report.size(), 1u);
    nlohmann::json j = out.report[0].to_json();
    ASSERT_TRUE(j.contains("removed_log"));
    ASSERT_TRUE(j.contains("rule"));
    ASSERT_TRUE(j.contains("counterpart"));
    LogStatement round = j["removed_log"].get<LogStatement>();
    EXPECT_EQ(round.message, "validation outcome for {}");
    EXPECT_EQ(round.line, 6);
    EXPECT_FALSE(j["counterpart"].get<std::string>().empty());
}

TEST(DedupInvariants, DeterministicAcrossRepeatedRuns) {
    CodeModel model = parse_one(kBranchSrc, "B1.java");
    std::vector<LogStatement> predicted = {
        at("B1.java", "app.B1.check(int)", 6, "info", "validation outcome for {}", {"v"}),
        at("B1.java", "app.B1.check(int)", 8, "warn", "validation outcome for {}", {"v"})};
    DedupOutcome first = deduplicate(model, predicted);
    for (int i = 0; i < 3; i++) {
        DedupOutcome next = deduplicate(model, predicted);
        ASSERT_EQ(next.report.size(), first.report.size());
        EXPECT_EQ(next.files.at("B1.java"), first.files.at("B1.java"));
        ASSERT_EQ(next.surviving.size(), first.surviving.size());
    }
}

TEST(DedupInvariants, MissingPredictedSiteIsDiagnosed) {
    CodeModel model = parse_one(kBranchSrc, "B1.java");
    std::vector<LogStatement> predicted = {
        at("B1.java", "app.B1.check(int)", 9, "info", "phantom", {})};  // line 9 is `}`
    DedupOutcome out = deduplicate(model, predicted);
    EXPECT_TRUE(out.report.empty());
    ASSERT_EQ(out.diagnostics.size(), 1u);
    EXPECT_NE(out.diagnostics[0].message.find("not found"), std::string::npos);
}

}  // namespace
