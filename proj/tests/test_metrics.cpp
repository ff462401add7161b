#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <unordered_map>

#include "logsmith/java/parser.hpp"
#include "logsmith/metrics/metrics.hpp"

using namespace logsmith;
using metrics::EvaluationReport;
using metrics::LogPair;
using metrics::MethodLogs;
using metrics::Setting;

namespace {

java::LogStatement make_log(int line, const std::string& level = "info",
                            const std::string& message = "",
                            const std::vector<std::string>& variables = {}) {
    java::LogStatement log;
    log.file = "App.java";
    log.method_id = "app.App.run()";
    log.line = line;
    log.level = level;
    log.message = message;
    log.variables = variables;
    return log;
}

java::Block make_block(java::BlockKind kind, int id, int start, int end) {
    java::Block b;
    b.kind = kind;
    b.id = id;
    b.start_line = start;
    b.end_line = end;
    return b;
}

LogPair pair_of(const java::LogStatement& predicted, const java::LogStatement& truth) {
    return {&predicted, &truth};
}

// ---------------------------------------------------------------------------
// Independent reference implementations of the text metrics, written against
// the same definitions but with a different representation (joined-string
// n-gram keys, product-form BLEU, rolling-array LCS). Library and reference
// must agree to 1e-6 on random inputs.
namespace ref {

std::vector<std::string> tokens(const std::string& message) {
    std::string text;
    for (size_t i = 0; i < message.size(); i++) {
        if (i + 1 < message.size() && message[i] == '{' && message[i + 1] == '}') {
            text += ' ';
            i++;
        } else {
            text += static_cast<char>(std::tolower(static_cast<unsigned char>(message[i])));
        }
    }
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

std::unordered_map<std::string, int> grams(const std::vector<std::string>& toks, int n) {
    std::unordered_map<std::string, int> out;
    for (int i = 0; i + n <= static_cast<int>(toks.size()); i++) {
        std::string key;
        for (int k = 0; k < n; k++) key += toks[i + k] + "\x1f";
        out[key]++;
    }
    return out;
}

long overlap(const std::unordered_map<std::string, int>& a,
             const std::unordered_map<std::string, int>& b) {
    long total = 0;
    for (const auto& [key, count] : a) {
        auto it = b.find(key);
        if (it != b.end()) total += std::min(count, it->second);
    }
    return total;
}

double bleu(const std::vector<std::string>& cand, const std::vector<std::string>& refr, int K) {
    if (cand.empty() || refr.empty()) return 0.0;
    double product = 1.0;
    for (int n = 1; n <= K; n++) {
        double total = static_cast<double>(std::max<long>(0, cand.size() - n + 1));
        product *= (overlap(grams(cand, n), grams(refr, n)) + 1.0) / (total + 1.0);
    }
    double bp = cand.size() >= refr.size()
                    ? 1.0
                    : std::exp(1.0 - static_cast<double>(refr.size()) / cand.size());
    return bp * std::pow(product, 1.0 / K);
}

double f1(double p, double r) { return p + r == 0.0 ? 0.0 : 2 * p * r / (p + r); }

double rouge1(const std::vector<std::string>& cand, const std::vector<std::string>& refr) {
    if (cand.empty() || refr.empty()) return 0.0;
    double ov = static_cast<double>(overlap(grams(cand, 1), grams(refr, 1)));
    return f1(ov / cand.size(), ov / refr.size());
}

double rougeL(const std::vector<std::string>& cand, const std::vector<std::string>& refr) {
    if (cand.empty() || refr.empty()) return 0.0;
    std::vector<long> row(refr.size() + 1, 0);
    for (const auto& c : cand) {
        long diag = 0;
        for (size_t j = 1; j <= refr.size(); j++) {
            long tmp = row[j];
            row[j] = c == refr[j - 1] ? diag + 1 : std::max(row[j], row[j - 1]);
            diag = tmp;
        }
    }
    double lcs = static_cast<double>(row.back());
    return f1(lcs / cand.size(), lcs / refr.size());
}

}  // namespace ref
}  // namespace

// ---------------------------------------------------------------- position

TEST(PositionAccuracy, ExactLineInSameBlockMatches) {
    std::vector<java::Block> blocks = {make_block(java::BlockKind::MethodDef, 1, 30, 40),
                                       make_block(java::BlockKind::Branch, 1, 34, 38)};
    EXPECT_EQ(metrics::position_accuracy(35, 35, blocks), 1);
}

TEST(PositionAccuracy, OneLineOffInSameBranchBlockMatches) {
    std::vector<java::Block> blocks = {make_block(java::BlockKind::MethodDef, 1, 30, 40),
                                       make_block(java::BlockKind::Branch, 1, 34, 38)};
    EXPECT_EQ(metrics::position_accuracy(36, 35, blocks), 1);
}

TEST(PositionAccuracy, MoreThanOneLineOffMisses) {
    std::vector<java::Block> blocks = {make_block(java::BlockKind::MethodDef, 1, 30, 40)};
    EXPECT_EQ(metrics::position_accuracy(37, 35, blocks), 0);
    EXPECT_EQ(metrics::position_accuracy(33, 35, blocks), 0);
}

TEST(PositionAccuracy, AdjacentLineInEnclosingBlockOnlyMisses) {
    std::vector<java::Block> blocks = {make_block(java::BlockKind::MethodDef, 1, 30, 40),
                                       make_block(java::BlockKind::Branch, 1, 35, 38)};
    // 34 sits in the method block only while 35 opens the branch block
    EXPECT_EQ(metrics::position_accuracy(34, 35, blocks), 0);
}

TEST(PositionAccuracy, NoBlockDataFallsBackToLineDistance) {
    EXPECT_EQ(metrics::position_accuracy(12, 11, {}), 1);
    EXPECT_EQ(metrics::position_accuracy(13, 11, {}), 0);
}

TEST(PositionAccuracy, ParsedFixtureSeparatesBranchFromMethodBody) {
    const std::string source =
        "package app;\n"
        "\n"
        "public class M {\n"
        "    int f(int x) {\n"
        "        int a = x + 1;\n"
        "        if (a > 0) {\n"
        "            a = a - 1;\n"
        "            a = a + 2;\n"
        "        }\n"
        "        return a;\n"
        "    }\n"
        "}\n";
    java::CodeModel model;
    java::parse_source(model, "M.java", source);
    ASSERT_EQ(model.methods.size(), 1u);
    auto blocks = java::extract_blocks(model.methods[0]);
    EXPECT_EQ(metrics::position_accuracy(7, 8, blocks), 1);  // both inside the branch
    EXPECT_EQ(metrics::position_accuracy(5, 6, blocks), 0);  // body line vs branch line
}

// ---------------------------------------------------------------- matching

TEST(MatchLogs, SevenPredictionsAgainstTwoTruthsMatchExactlyTwo) {
    std::vector<java::LogStatement> truth = {make_log(10), make_log(20)};
    std::vector<java::LogStatement> predicted = {make_log(9),  make_log(10), make_log(11),
                                                 make_log(12), make_log(13), make_log(19),
                                                 make_log(25)};
    auto pairs = metrics::match_logs(predicted, truth, {});
    ASSERT_EQ(pairs.size(), 2u);
    EXPECT_EQ(predicted[pairs[0].predicted_index].line, 9);
    EXPECT_EQ(truth[pairs[0].truth_index].line, 10);
    EXPECT_EQ(predicted[pairs[1].predicted_index].line, 19);
    EXPECT_EQ(truth[pairs[1].truth_index].line, 20);
}

TEST(MatchLogs, IdenticalListsMatchCompletely) {
    std::vector<java::LogStatement> logs = {make_log(4), make_log(9), make_log(15)};
    auto pairs = metrics::match_logs(logs, logs, {});
    ASSERT_EQ(pairs.size(), 3u);
    for (const auto& p : pairs) EXPECT_EQ(p.predicted_index, p.truth_index);
}

TEST(MatchLogs, DisjointLinesMatchNothing) {
    std::vector<java::LogStatement> truth = {make_log(10), make_log(20)};
    std::vector<java::LogStatement> predicted = {make_log(50), make_log(60)};
    EXPECT_TRUE(metrics::match_logs(predicted, truth, {}).empty());
}

TEST(MatchLogs, InputOrderDoesNotChangeTheMatching) {
    std::vector<java::LogStatement> truth = {make_log(20), make_log(10)};
    std::vector<java::LogStatement> ascending = {make_log(9), make_log(19)};
    std::vector<java::LogStatement> descending = {make_log(19), make_log(9)};
    auto a = metrics::match_logs(ascending, truth, {});
    auto d = metrics::match_logs(descending, truth, {});
    ASSERT_EQ(a.size(), 2u);
    ASSERT_EQ(d.size(), 2u);
    for (size_t i = 0; i < a.size(); i++) {
        EXPECT_EQ(ascending[a[i].predicted_index].line, descending[d[i].predicted_index].line);
        EXPECT_EQ(a[i].truth_index, d[i].truth_index);
    }
}

TEST(MatchLogs, NeverMatchesOneTruthTwice) {
    std::mt19937 rng(20260818u);
    std::uniform_int_distribution<int> count(0, 8);
    std::uniform_int_distribution<int> line(1, 25);
    for (int round = 0; round < 50; round++) {
        std::vector<java::LogStatement> predicted, truth;
        for (int i = count(rng); i > 0; i--) predicted.push_back(make_log(line(rng)));
        for (int i = count(rng); i > 0; i--) truth.push_back(make_log(line(rng)));
        auto pairs = metrics::match_logs(predicted, truth, {});
        std::set<int> seen_truth, seen_pred;
        for (const auto& p : pairs) {
            EXPECT_TRUE(seen_truth.insert(p.truth_index).second);
            EXPECT_TRUE(seen_pred.insert(p.predicted_index).second);
            EXPECT_EQ(metrics::position_accuracy(predicted[p.predicted_index].line,
                                                 truth[p.truth_index].line, {}),
                      1);
        }
    }
}

// ------------------------------------------------------------------ levels

TEST(LevelMetrics, WarnPredictedForErrorScoresThreeQuarters) {
    auto truth = make_log(5, "error");
    auto predicted = make_log(5, "warn");
    auto scores = metrics::level_metrics({pair_of(predicted, truth)});
    ASSERT_TRUE(scores.l_acc.has_value());
    ASSERT_TRUE(scores.aod.has_value());
    EXPECT_DOUBLE_EQ(*scores.l_acc, 0.0);
    EXPECT_DOUBLE_EQ(*scores.aod, 0.75);
}

TEST(LevelMetrics, TracePredictedForInfoScoresZero) {
    auto truth = make_log(5, "info");
    auto predicted = make_log(5, "trace");
    auto scores = metrics::level_metrics({pair_of(predicted, truth)});
    EXPECT_DOUBLE_EQ(*scores.aod, 0.0);
}

TEST(LevelMetrics, ExactMatchesScoreOneOnBoth) {
    auto t1 = make_log(5, "debug");
    auto p1 = make_log(5, "debug");
    auto t2 = make_log(9, "error");
    auto p2 = make_log(9, "error");
    auto scores = metrics::level_metrics({pair_of(p1, t1), pair_of(p2, t2)});
    EXPECT_DOUBLE_EQ(*scores.l_acc, 1.0);
    EXPECT_DOUBLE_EQ(*scores.aod, 1.0);
}

TEST(LevelMetrics, MixedPairsAverage) {
    auto t1 = make_log(5, "error");
    auto p1 = make_log(5, "error");
    auto t2 = make_log(9, "error");
    auto p2 = make_log(9, "warn");
    auto scores = metrics::level_metrics({pair_of(p1, t1), pair_of(p2, t2)});
    EXPECT_DOUBLE_EQ(*scores.l_acc, 0.5);
    EXPECT_DOUBLE_EQ(*scores.aod, 0.875);
}

TEST(LevelMetrics, EmptyMatchSetIsUndefined) {
    auto scores = metrics::level_metrics({});
    EXPECT_FALSE(scores.l_acc.has_value());
    EXPECT_FALSE(scores.aod.has_value());
}

TEST(LevelMetrics, AodNeverFallsBelowLevelAccuracy) {
    const std::vector<std::string> levels = {"trace", "debug", "info", "warn", "error"};
    std::mt19937 rng(77u);
    std::uniform_int_distribution<int> pick(0, 4);
    for (int round = 0; round < 20; round++) {
        std::vector<java::LogStatement> owned;
        owned.reserve(80);
        std::vector<LogPair> pairs;
        for (int i = 0; i < 40; i++) {
            owned.push_back(make_log(i, levels[pick(rng)]));
            owned.push_back(make_log(i, levels[pick(rng)]));
            pairs.push_back(pair_of(owned[owned.size() - 2], owned[owned.size() - 1]));
        }
        auto scores = metrics::level_metrics(pairs);
        EXPECT_GE(*scores.aod, *scores.l_acc);
    }
}

// --------------------------------------------------------------- variables

TEST(VariableMetrics, PartialOverlapScoresHalf) {
    auto predicted = make_log(5, "info", "", {"a", "b"});
    auto truth = make_log(5, "info", "", {"b", "c"});
    auto scores = metrics::variable_metrics({pair_of(predicted, truth)});
    EXPECT_DOUBLE_EQ(*scores.precision, 0.5);
    EXPECT_DOUBLE_EQ(*scores.recall, 0.5);
    EXPECT_DOUBLE_EQ(*scores.f1, 0.5);
}

TEST(VariableMetrics, MemberFunctionDifferenceDoesNotMatch) {
    auto predicted = make_log(5, "info", "", {"x.getSize()"});
    auto truth = make_log(5, "info", "", {"x.size"});
    auto scores = metrics::variable_metrics({pair_of(predicted, truth)});
    EXPECT_DOUBLE_EQ(*scores.precision, 0.0);
    EXPECT_DOUBLE_EQ(*scores.recall, 0.0);
    EXPECT_DOUBLE_EQ(*scores.f1, 0.0);
}

TEST(VariableMetrics, IdenticalSetsScoreOne) {
    auto predicted = make_log(5, "info", "", {"user.getId()", "count"});
    auto truth = make_log(5, "info", "", {"count", "user.getId()"});
    auto scores = metrics::variable_metrics({pair_of(predicted, truth)});
    EXPECT_DOUBLE_EQ(*scores.precision, 1.0);
    EXPECT_DOUBLE_EQ(*scores.recall, 1.0);
    EXPECT_DOUBLE_EQ(*scores.f1, 1.0);
}

TEST(VariableMetrics, WhitespaceDifferencesAreNormalizedAway) {
    auto predicted = make_log(5, "info", "", {"user . getId( )"});
    auto truth = make_log(5, "info", "", {"user.getId()"});
    auto scores = metrics::variable_metrics({pair_of(predicted, truth)});
    EXPECT_DOUBLE_EQ(*scores.precision, 1.0);
    EXPECT_DOUBLE_EQ(*scores.recall, 1.0);
}

TEST(VariableMetrics, EmptyPredictionSideIsExcludedFromPrecision) {
    auto p1 = make_log(5, "info", "", {});
    auto t1 = make_log(5, "info", "", {"a"});
    auto p2 = make_log(9, "info", "", {"a"});
    auto t2 = make_log(9, "info", "", {"a"});
    auto scores = metrics::variable_metrics({pair_of(p1, t1), pair_of(p2, t2)});
    // precision pools only the second pair; recall pools both
    EXPECT_DOUBLE_EQ(*scores.precision, 1.0);
    EXPECT_DOUBLE_EQ(*scores.recall, 0.5);
}

TEST(VariableMetrics, MacroFlagAveragesPerPairScores) {
    auto p1 = make_log(5, "info", "", {"a", "b"});
    auto t1 = make_log(5, "info", "", {"a"});
    auto p2 = make_log(9, "info", "", {"c"});
    auto t2 = make_log(9, "info", "", {"c", "d"});
    auto micro = metrics::variable_metrics({pair_of(p1, t1), pair_of(p2, t2)}, false);
    auto macro = metrics::variable_metrics({pair_of(p1, t1), pair_of(p2, t2)}, true);
    EXPECT_DOUBLE_EQ(*micro.precision, 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(*micro.recall, 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(*macro.precision, 0.75);  // mean of 1/2 and 1/1
    EXPECT_DOUBLE_EQ(*macro.recall, 0.75);     // mean of 1/1 and 1/2
    EXPECT_DOUBLE_EQ(*macro.f1, 2.0 / 3.0);    // each pair's f1 is 2/3
}

TEST(VariableMetrics, NoMeasurablePairsLeaveScoresUnset) {
    auto predicted = make_log(5, "info", "", {});
    auto truth = make_log(5, "info", "", {});
    auto scores = metrics::variable_metrics({pair_of(predicted, truth)});
    EXPECT_FALSE(scores.precision.has_value());
    EXPECT_FALSE(scores.recall.has_value());
    EXPECT_FALSE(scores.f1.has_value());
}

// ------------------------------------------------------------------- texts

TEST(TextMetrics, IdenticalMessagesScoreOneEverywhere) {
    auto predicted = make_log(5, "info", "failed to push data for {}");
    auto truth = make_log(5, "info", "failed to push data for {}");
    auto scores = metrics::text_metrics({pair_of(predicted, truth)});
    EXPECT_DOUBLE_EQ(*scores.bleu1, 1.0);
    EXPECT_DOUBLE_EQ(*scores.bleu4, 1.0);
    EXPECT_DOUBLE_EQ(*scores.rouge1, 1.0);
    EXPECT_DOUBLE_EQ(*scores.rougeL, 1.0);
}

TEST(TextMetrics, HandCountedUnigramOverlap) {
    auto predicted = make_log(5, "info", "failed to process data");
    auto truth = make_log(5, "info", "failed to parse data");
    auto scores = metrics::text_metrics({pair_of(predicted, truth)});
    EXPECT_NEAR(*scores.rouge1, 0.75, 1e-12);
    EXPECT_NEAR(*scores.rougeL, 0.75, 1e-12);
    EXPECT_NEAR(*scores.bleu1, 0.8, 1e-12);
    EXPECT_NEAR(*scores.bleu4, 0.508132748155, 1e-9);
}

TEST(TextMetrics, FrozenPartialOverlapValues) {
    auto predicted = make_log(5, "info", "connection retry count exceeded for host");
    auto truth = make_log(5, "info", "retry count exceeded");
    auto scores = metrics::text_metrics({pair_of(predicted, truth)});
    EXPECT_NEAR(*scores.bleu1, 0.571428571429, 1e-9);
    EXPECT_NEAR(*scores.bleu4, 0.411133616901, 1e-9);
    EXPECT_NEAR(*scores.rouge1, 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(*scores.rougeL, 2.0 / 3.0, 1e-12);
}

TEST(TextMetrics, ShortCandidateStaysStrictlyBetweenZeroAndOne) {
    auto predicted = make_log(5, "info", "work done");
    auto truth = make_log(5, "info", "all work done");
    auto scores = metrics::text_metrics({pair_of(predicted, truth)});
    EXPECT_GT(*scores.bleu4, 0.0);
    EXPECT_LT(*scores.bleu4, 1.0);
    EXPECT_NEAR(*scores.bleu4, 0.606530659713, 1e-9);
}

TEST(TextMetrics, PlaceholdersAreStrippedBeforeComparison) {
    auto predicted = make_log(5, "info", "failed to push {}");
    auto truth = make_log(5, "info", "failed to push");
    auto scores = metrics::text_metrics({pair_of(predicted, truth)});
    EXPECT_DOUBLE_EQ(*scores.bleu4, 1.0);
    EXPECT_DOUBLE_EQ(*scores.rougeL, 1.0);
}

TEST(TextMetrics, EmptyMessagePairScoresZero) {
    auto p1 = make_log(5, "info", "{}");
    auto t1 = make_log(5, "info", "something happened");
    auto p2 = make_log(9, "info", "all good");
    auto t2 = make_log(9, "info", "all good");
    auto scores = metrics::text_metrics({pair_of(p1, t1), pair_of(p2, t2)});
    EXPECT_DOUBLE_EQ(*scores.bleu1, 0.5);
    EXPECT_DOUBLE_EQ(*scores.rouge1, 0.5);
}

TEST(TextMetrics, EmptyMatchSetLeavesScoresUnset) {
    auto scores = metrics::text_metrics({});
    EXPECT_FALSE(scores.bleu1.has_value());
    EXPECT_FALSE(scores.bleu4.has_value());
    EXPECT_FALSE(scores.rouge1.has_value());
    EXPECT_FALSE(scores.rougeL.has_value());
}

TEST(TextMetrics, AgreesWithIndependentReferenceImplementation) {
    const std::vector<std::string> vocab = {"failed", "to",   "push", "data", "retry",
                                            "count",  "host", "for",  "{}",   "error"};
    std::mt19937 rng(20260818u);
    std::uniform_int_distribution<int> length(0, 9);
    std::uniform_int_distribution<int> word(0, static_cast<int>(vocab.size()) - 1);
    auto sentence = [&]() {
        std::string s;
        for (int i = length(rng); i > 0; i--) {
            if (!s.empty()) s += ' ';
            s += vocab[word(rng)];
        }
        return s;
    };
    for (int round = 0; round < 50; round++) {
        auto predicted = make_log(5, "info", sentence());
        auto truth = make_log(5, "info", sentence());
        auto scores = metrics::text_metrics({pair_of(predicted, truth)});
        auto cand = ref::tokens(predicted.message);
        auto refr = ref::tokens(truth.message);
        EXPECT_NEAR(*scores.bleu1, ref::bleu(cand, refr, 1), 1e-6) << predicted.message;
        EXPECT_NEAR(*scores.bleu4, ref::bleu(cand, refr, 4), 1e-6) << predicted.message;
        EXPECT_NEAR(*scores.rouge1, ref::rouge1(cand, refr), 1e-6) << predicted.message;
        EXPECT_NEAR(*scores.rougeL, ref::rougeL(cand, refr), 1e-6) << predicted.message;
    }
}

// ------------------------------------------------------------------ report

TEST(EvaluationReport, IdenticalDataScoresOneEverywhere) {
    MethodLogs m;
    m.ground_truth = {make_log(10, "warn", "retry {} failed", {"attempt"})};
    m.predicted = m.ground_truth;
    MethodLogs m2;
    m2.ground_truth = {make_log(20, "info", "request completed", {"id", "elapsed"})};
    m2.predicted = m2.ground_truth;
    auto report = metrics::evaluate({m, m2}, Setting::Single);
    EXPECT_DOUBLE_EQ(*report.pa, 1.0);
    EXPECT_DOUBLE_EQ(*report.levels.l_acc, 1.0);
    EXPECT_DOUBLE_EQ(*report.levels.aod, 1.0);
    EXPECT_DOUBLE_EQ(*report.variables.precision, 1.0);
    EXPECT_DOUBLE_EQ(*report.variables.recall, 1.0);
    EXPECT_DOUBLE_EQ(*report.variables.f1, 1.0);
    EXPECT_DOUBLE_EQ(*report.texts.bleu1, 1.0);
    EXPECT_DOUBLE_EQ(*report.texts.bleu4, 1.0);
    EXPECT_DOUBLE_EQ(*report.texts.rouge1, 1.0);
    EXPECT_DOUBLE_EQ(*report.texts.rougeL, 1.0);
    EXPECT_EQ(report.matched, 2);
    EXPECT_EQ(report.predicted_count, 2);
    EXPECT_EQ(report.truth_count, 2);
}

TEST(EvaluationReport, MultiSettingReportsMatchPrecisionAndRecall) {
    MethodLogs m;
    m.ground_truth = {make_log(10), make_log(20)};
    m.predicted = {make_log(9),  make_log(10), make_log(11), make_log(12),
                   make_log(13), make_log(19), make_log(25)};
    auto report = metrics::evaluate({m}, Setting::Multi);
    EXPECT_NEAR(*report.position.precision, 2.0 / 7.0, 1e-12);
    EXPECT_NEAR(*report.position.precision, 0.286, 1e-3);
    EXPECT_DOUBLE_EQ(*report.position.recall, 1.0);
    EXPECT_NEAR(*report.position.f1, 2.0 * (2.0 / 7.0) / (2.0 / 7.0 + 1.0), 1e-12);
    EXPECT_EQ(report.matched, 2);
}

TEST(EvaluationReport, DisjointLinesYieldZeroNotNull) {
    MethodLogs m;
    m.ground_truth = {make_log(10), make_log(20)};
    m.predicted = {make_log(50), make_log(60)};
    auto report = metrics::evaluate({m}, Setting::Multi);
    EXPECT_DOUBLE_EQ(*report.position.precision, 0.0);
    EXPECT_DOUBLE_EQ(*report.position.recall, 0.0);
    EXPECT_DOUBLE_EQ(*report.position.f1, 0.0);  // zero by convention, not null
    EXPECT_FALSE(report.levels.l_acc.has_value());
    EXPECT_FALSE(report.variables.precision.has_value());
    EXPECT_FALSE(report.texts.bleu1.has_value());
}

TEST(EvaluationReport, EmptyDatasetReportsGuardedPositionAndNullQuality) {
    auto report = metrics::evaluate({}, Setting::Single);
    ASSERT_TRUE(report.pa.has_value());  // position ratios guard 0/0 to 0
    EXPECT_DOUBLE_EQ(*report.pa, 0.0);
    auto j = metrics::to_json(report);
    EXPECT_EQ(j["position"]["pa"], 0.0);
    EXPECT_TRUE(j["levels"]["l_acc"].is_null());
    EXPECT_TRUE(j["levels"]["aod"].is_null());
    EXPECT_TRUE(j["variables"]["precision"].is_null());
    EXPECT_TRUE(j["texts"]["bleu1"].is_null());
    EXPECT_EQ(j["counts"]["matched"], 0);
    EXPECT_EQ(j["counts"]["predicted"], 0);
    EXPECT_EQ(j["counts"]["ground_truth"], 0);
}

TEST(EvaluationReport, JsonCarriesSettingAndSectionKeys) {
    MethodLogs m;
    m.ground_truth = {make_log(10, "warn", "retry failed", {"attempt"})};
    m.predicted = m.ground_truth;
    auto single = metrics::to_json(metrics::evaluate({m}, Setting::Single));
    EXPECT_EQ(single["setting"], "single");
    EXPECT_TRUE(single["position"].contains("pa"));
    EXPECT_FALSE(single["position"].contains("precision"));
    auto multi = metrics::to_json(metrics::evaluate({m}, Setting::Multi));
    EXPECT_EQ(multi["setting"], "multi");
    EXPECT_TRUE(multi["position"].contains("precision"));
    EXPECT_TRUE(multi["position"].contains("recall"));
    EXPECT_TRUE(multi["position"].contains("f1"));
    for (const char* key : {"l_acc", "aod"}) EXPECT_TRUE(multi["levels"].contains(key));
    for (const char* key : {"bleu1", "bleu4", "rouge1", "rougeL"})
        EXPECT_TRUE(multi["texts"].contains(key));
}

TEST(EvaluationReport, AllEmittedScoresStayWithinUnitInterval) {
    const std::vector<std::string> levels = {"trace", "debug", "info", "warn", "error"};
    const std::vector<std::string> vocab = {"failed", "push", "data", "retry", "count", "{}"};
    std::mt19937 rng(424242u);
    std::uniform_int_distribution<int> count(0, 6);
    std::uniform_int_distribution<int> line(1, 30);
    std::uniform_int_distribution<int> pick_level(0, 4);
    std::uniform_int_distribution<int> pick_word(0, static_cast<int>(vocab.size()) - 1);
    auto random_log = [&]() {
        std::string message;
        for (int i = count(rng); i > 0; i--) {
            if (!message.empty()) message += ' ';
            message += vocab[pick_word(rng)];
        }
        std::vector<std::string> vars;
        for (int i = count(rng) / 2; i > 0; i--) vars.push_back(vocab[pick_word(rng)]);
        return make_log(line(rng), levels[pick_level(rng)], message, vars);
    };
    std::function<void(const nlohmann::json&)> check = [&](const nlohmann::json& node) {
        if (node.is_number()) {
            EXPECT_GE(node.get<double>(), 0.0);
            EXPECT_LE(node.get<double>(), 1.0);
        } else if (node.is_object()) {
            for (const auto& [key, value] : node.items())
                if (key != "counts") check(value);
        }
    };
    for (int round = 0; round < 25; round++) {
        std::vector<MethodLogs> methods(2);
        for (auto& m : methods) {
            for (int i = count(rng); i > 0; i--) m.predicted.push_back(random_log());
            for (int i = count(rng); i > 0; i--) m.ground_truth.push_back(random_log());
        }
        auto setting = round % 2 == 0 ? Setting::Single : Setting::Multi;
        auto j = metrics::to_json(metrics::evaluate(methods, setting, round % 3 == 0));
        check(j);
    }
}
