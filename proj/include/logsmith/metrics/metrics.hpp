#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "logsmith/common.hpp"
#include "logsmith/java/blocks.hpp"
#include "logsmith/java/logging.hpp"
#include "logsmith/java/model.hpp"

// Evaluation metrics for generated log statements: position accuracy and
// prediction/ground-truth matching, level agreement (exact and ordinal),
// variable-set overlap, and message text overlap (BLEU / ROUGE).
namespace logsmith::metrics {

// ---------------------------------------------------------------- position

// 1 iff `pred_line` deviates from `true_line` by at most one line and both
// lines fall inside the same innermost structural block; 0 otherwise. With no
// block data both lookups are null and only the line distance decides.
inline int position_accuracy(int pred_line, int true_line,
                             const std::vector<java::Block>& blocks) {
    if (std::abs(pred_line - true_line) > 1) return 0;
    const java::Block* bp = java::innermost_block(blocks, pred_line);
    const java::Block* bt = java::innermost_block(blocks, true_line);
    if (bp == bt) return 1;
    if (bp == nullptr || bt == nullptr) return 0;
    return (bp->kind == bt->kind && bp->id == bt->id) ? 1 : 0;
}

// One matched prediction/ground-truth pair, as indices into the input lists.
struct MatchedPair {
    int predicted_index = -1;
    int truth_index = -1;
};

// Greedy matching in ascending line order: predictions are visited by line,
// and each takes the first still-unmatched ground-truth log it position-
// matches (position_accuracy = 1). Every ground-truth log is matched at most
// once; predictions left over are false positives. Both lists must belong to
// the same method, since block identity is part of the position test.
inline std::vector<MatchedPair> match_logs(const std::vector<java::LogStatement>& predicted,
                                           const std::vector<java::LogStatement>& truth,
                                           const std::vector<java::Block>& blocks) {
    auto order_by_line = [](const std::vector<java::LogStatement>& logs) {
        std::vector<int> idx(logs.size());
        for (size_t i = 0; i < idx.size(); i++) idx[i] = static_cast<int>(i);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](int a, int b) { return logs[a].line < logs[b].line; });
        return idx;
    };
    std::vector<MatchedPair> pairs;
    std::vector<bool> taken(truth.size(), false);
    for (int pi : order_by_line(predicted)) {
        for (int ti : order_by_line(truth)) {
            if (taken[ti]) continue;
            if (position_accuracy(predicted[pi].line, truth[ti].line, blocks) != 1) continue;
            taken[ti] = true;
            pairs.push_back({pi, ti});
            break;
        }
    }
    return pairs;
}

// A matched pair by reference, the unit all downstream metrics consume.
struct LogPair {
    const java::LogStatement* predicted = nullptr;
    const java::LogStatement* truth = nullptr;
};

// ------------------------------------------------------------------ levels

struct LevelScores {
    std::optional<double> l_acc;  // exact-match fraction
    std::optional<double> aod;    // mean of 1 - |a-p| / max(a, 4-a)
};

// Levels live on the ordered scale trace=0 .. error=4. L-ACC is the fraction
// of exact matches; AOD discounts each pair by its ordinal distance relative
// to the worst possible distance from the true level. A level outside the
// scale scores 0 on both. Empty input leaves both scores unset.
inline LevelScores level_metrics(const std::vector<LogPair>& pairs) {
    if (pairs.empty()) return {};
    double exact = 0.0;
    double ordinal = 0.0;
    for (const auto& pair : pairs) {
        int a = java::level_rank(pair.truth->level);
        int p = java::level_rank(pair.predicted->level);
        if (a < 0 || p < 0) continue;
        if (a == p) exact += 1.0;
        int max_dis = std::max(a, 4 - a);
        ordinal += 1.0 - static_cast<double>(std::abs(a - p)) / max_dis;
    }
    double n = static_cast<double>(pairs.size());
    return {exact / n, ordinal / n};
}

// --------------------------------------------------------------- variables

struct PrfScores {
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
};

inline std::optional<double> f1_of(const std::optional<double>& p,
                                   const std::optional<double>& r) {
    if (!p.has_value() || !r.has_value()) return std::nullopt;
    if (*p + *r == 0.0) return 0.0;
    return 2.0 * *p * *r / (*p + *r);
}

namespace detail {

inline std::set<std::string> variable_set(const java::LogStatement& log) {
    std::set<std::string> out;
    for (const auto& v : log.variables) {
        std::string norm = remove_whitespace(v);
        if (!norm.empty()) out.insert(norm);
    }
    return out;
}

inline int intersection_size(const std::set<std::string>& a, const std::set<std::string>& b) {
    int n = 0;
    for (const auto& x : a) n += b.count(x) ? 1 : 0;
    return n;
}

}  // namespace detail

// Set overlap of the variable expressions in each matched pair. Expressions
// compare by full text after whitespace removal, so a same-named variable
// with a different member access does not match. Micro-averaging pools hits
// and set sizes across pairs; the macro flag averages per-pair scores
// instead. A pair with an empty set on one side has no defined score on that
// side and is excluded from it.
inline PrfScores variable_metrics(const std::vector<LogPair>& pairs, bool macro_average = false) {
    long hits = 0, pred_total = 0, truth_total = 0;
    std::vector<double> pair_p, pair_r, pair_f;
    for (const auto& pair : pairs) {
        auto sp = detail::variable_set(*pair.predicted);
        auto sg = detail::variable_set(*pair.truth);
        int inter = detail::intersection_size(sp, sg);
        hits += inter;
        pred_total += static_cast<long>(sp.size());
        truth_total += static_cast<long>(sg.size());
        std::optional<double> p, r;
        if (!sp.empty()) pair_p.push_back(*(p = inter / static_cast<double>(sp.size())));
        if (!sg.empty()) pair_r.push_back(*(r = inter / static_cast<double>(sg.size())));
        if (auto f = f1_of(p, r); f.has_value()) pair_f.push_back(*f);
    }
    auto mean = [](const std::vector<double>& xs) -> std::optional<double> {
        if (xs.empty()) return std::nullopt;
        double sum = 0.0;
        for (double x : xs) sum += x;
        return sum / static_cast<double>(xs.size());
    };
    if (macro_average) return {mean(pair_p), mean(pair_r), mean(pair_f)};
    PrfScores out;
    if (pred_total > 0) out.precision = hits / static_cast<double>(pred_total);
    if (truth_total > 0) out.recall = hits / static_cast<double>(truth_total);
    out.f1 = f1_of(out.precision, out.recall);
    return out;
}

// ------------------------------------------------------------------- texts

struct TextScores {
    std::optional<double> bleu1;
    std::optional<double> bleu4;
    std::optional<double> rouge1;
    std::optional<double> rougeL;
};

namespace detail {

// Message tokens: lowercase, drop "{}" placeholders, split on whitespace.
inline std::vector<std::string> message_tokens(const std::string& message) {
    std::string text = to_lower(message);
    for (size_t pos; (pos = text.find("{}")) != std::string::npos;) text.replace(pos, 2, " ");
    std::vector<std::string> out;
    std::string word;
    for (char c : text + " ") {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!word.empty()) out.push_back(word);
            word.clear();
        } else {
            word += c;
        }
    }
    return out;
}

inline std::map<std::vector<std::string>, int> ngram_counts(const std::vector<std::string>& tokens,
                                                            int n) {
    std::map<std::vector<std::string>, int> counts;
    for (size_t i = 0; i + n <= tokens.size(); i++)
        counts[std::vector<std::string>(tokens.begin() + i, tokens.begin() + i + n)]++;
    return counts;
}

// Clipped n-gram matches: each candidate n-gram counts at most as often as it
// appears in the reference.
inline long clipped_matches(const std::map<std::vector<std::string>, int>& cand,
                            const std::map<std::vector<std::string>, int>& ref) {
    long matched = 0;
    for (const auto& [gram, count] : cand) {
        auto it = ref.find(gram);
        if (it != ref.end()) matched += std::min(count, it->second);
    }
    return matched;
}

// Sentence BLEU-K with add-one smoothing on every modified precision
// (numerator and denominator both +1, so a perfect candidate still scores 1)
// and the standard brevity penalty.
inline double sentence_bleu(const std::vector<std::string>& candidate,
                            const std::vector<std::string>& reference, int max_n) {
    if (candidate.empty() || reference.empty()) return 0.0;
    double log_sum = 0.0;
    for (int n = 1; n <= max_n; n++) {
        auto cand = ngram_counts(candidate, n);
        auto ref = ngram_counts(reference, n);
        long total = std::max<long>(0, static_cast<long>(candidate.size()) - n + 1);
        double p = (clipped_matches(cand, ref) + 1.0) / (total + 1.0);
        log_sum += std::log(p);
    }
    double bp = candidate.size() >= reference.size()
                    ? 1.0
                    : std::exp(1.0 - static_cast<double>(reference.size()) / candidate.size());
    return bp * std::exp(log_sum / max_n);
}

inline double harmonic_f1(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

// Sentence ROUGE-1 F1: clipped unigram overlap over each side's length.
inline double sentence_rouge1(const std::vector<std::string>& candidate,
                              const std::vector<std::string>& reference) {
    if (candidate.empty() || reference.empty()) return 0.0;
    long overlap = clipped_matches(ngram_counts(candidate, 1), ngram_counts(reference, 1));
    return harmonic_f1(overlap / static_cast<double>(candidate.size()),
                       overlap / static_cast<double>(reference.size()));
}

inline long lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<std::vector<long>> dp(a.size() + 1, std::vector<long>(b.size() + 1, 0));
    for (size_t i = 1; i <= a.size(); i++)
        for (size_t j = 1; j <= b.size(); j++)
            dp[i][j] = a[i - 1] == b[j - 1] ? dp[i - 1][j - 1] + 1
                                            : std::max(dp[i - 1][j], dp[i][j - 1]);
    return dp[a.size()][b.size()];
}

// Sentence ROUGE-L F1: longest common subsequence over each side's length.
inline double sentence_rougeL(const std::vector<std::string>& candidate,
                              const std::vector<std::string>& reference) {
    if (candidate.empty() || reference.empty()) return 0.0;
    long lcs = lcs_length(candidate, reference);
    return harmonic_f1(lcs / static_cast<double>(candidate.size()),
                       lcs / static_cast<double>(reference.size()));
}

}  // namespace detail

// Corpus text scores: the mean of sentence-level BLEU-1/BLEU-4 and
// ROUGE-1/ROUGE-L F1 over all matched pairs. A pair whose message tokenizes
// to nothing on either side scores 0 on all four. Empty input leaves all
// four unset.
inline TextScores text_metrics(const std::vector<LogPair>& pairs) {
    if (pairs.empty()) return {};
    double b1 = 0.0, b4 = 0.0, r1 = 0.0, rl = 0.0;
    for (const auto& pair : pairs) {
        auto cand = detail::message_tokens(pair.predicted->message);
        auto ref = detail::message_tokens(pair.truth->message);
        b1 += detail::sentence_bleu(cand, ref, 1);
        b4 += detail::sentence_bleu(cand, ref, 4);
        r1 += detail::sentence_rouge1(cand, ref);
        rl += detail::sentence_rougeL(cand, ref);
    }
    double n = static_cast<double>(pairs.size());
    return {b1 / n, b4 / n, r1 / n, rl / n};
}

// ------------------------------------------------------------------ report

enum class Setting { Single, Multi };

// One method's contribution to an evaluation: its predicted logs, its
// ground-truth logs, and the structural blocks used by the position test.
struct MethodLogs {
    std::vector<java::LogStatement> predicted;
    std::vector<java::LogStatement> ground_truth;
    std::vector<java::Block> blocks;
};

struct EvaluationReport {
    Setting setting = Setting::Single;
    std::optional<double> pa;  // single-log setting
    PrfScores position;        // multi-log setting
    LevelScores levels;
    PrfScores variables;
    TextScores texts;
    int matched = 0;
    int predicted_count = 0;
    int truth_count = 0;
};

// Matches each method's predictions to its ground truth and aggregates every
// metric family over the pooled matched pairs. The single-log setting reports
// position accuracy as the fraction of ground-truth logs matched; the
// multi-log setting reports precision/recall/F1 of the matching. Position
// scores are always numeric — an empty side guards the ratio to 0 — while the
// quality sections stay unset when no pairs matched.
inline EvaluationReport evaluate(const std::vector<MethodLogs>& methods, Setting setting,
                                 bool macro_average = false) {
    EvaluationReport report;
    report.setting = setting;
    std::vector<LogPair> pairs;
    for (const auto& m : methods) {
        report.predicted_count += static_cast<int>(m.predicted.size());
        report.truth_count += static_cast<int>(m.ground_truth.size());
        for (const auto& match : match_logs(m.predicted, m.ground_truth, m.blocks)) {
            report.matched++;
            pairs.push_back({&m.predicted[match.predicted_index],
                             &m.ground_truth[match.truth_index]});
        }
    }
    auto ratio = [](int num, int den) { return den > 0 ? num / static_cast<double>(den) : 0.0; };
    if (setting == Setting::Single) {
        report.pa = ratio(report.matched, report.truth_count);
    } else {
        report.position.precision = ratio(report.matched, report.predicted_count);
        report.position.recall = ratio(report.matched, report.truth_count);
        report.position.f1 = f1_of(report.position.precision, report.position.recall);
    }
    report.levels = level_metrics(pairs);
    report.variables = variable_metrics(pairs, macro_average);
    report.texts = text_metrics(pairs);
    return report;
}

inline nlohmann::json to_json(const EvaluationReport& report) {
    auto opt = [](const std::optional<double>& v) {
        return v.has_value() ? nlohmann::json(*v) : nlohmann::json(nullptr);
    };
    nlohmann::json position;
    if (report.setting == Setting::Single) {
        position = {{"pa", opt(report.pa)}};
    } else {
        position = {{"precision", opt(report.position.precision)},
                    {"recall", opt(report.position.recall)},
                    {"f1", opt(report.position.f1)}};
    }
    return nlohmann::json{
        {"setting", report.setting == Setting::Single ? "single" : "multi"},
        {"position", position},
        {"levels", {{"l_acc", opt(report.levels.l_acc)}, {"aod", opt(report.levels.aod)}}},
        {"variables",
         {{"precision", opt(report.variables.precision)},
          {"recall", opt(report.variables.recall)},
          {"f1", opt(report.variables.f1)}}},
        {"texts",
         {{"bleu1", opt(report.texts.bleu1)},
          {"bleu4", opt(report.texts.bleu4)},
          {"rouge1", opt(report.texts.rouge1)},
          {"rougeL", opt(report.texts.rougeL)}}},
        {"counts",
         {{"matched", report.matched},
          {"predicted", report.predicted_count},
          {"ground_truth", report.truth_count}}}};
}

}  // namespace logsmith::metrics
