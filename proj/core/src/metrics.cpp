#include "courtsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "util.hpp"

namespace courtsim {

LatencyStats latency_stats(const std::vector<double>& latencies_ms) {
    if (latencies_ms.empty()) throw EmptyInput("latency_stats: empty input");
    for (double v : latencies_ms) {
        if (!std::isfinite(v) || v < 0.0) {
            throw std::invalid_argument("latency_stats: latencies must be finite and >= 0");
        }
    }

    std::vector<double> sorted = latencies_ms;
    std::sort(sorted.begin(), sorted.end());

    LatencyStats stats;
    stats.count = sorted.size();
    stats.min_ms = sorted.front();
    stats.max_ms = sorted.back();

    double sum = 0.0;
    for (double v : sorted) sum += v;
    stats.mean_ms = sum / static_cast<double>(sorted.size());

    std::size_t mid = sorted.size() / 2;
    stats.median_ms = (sorted.size() % 2 == 1)
                          ? sorted[mid]
                          : (sorted[mid - 1] + sorted[mid]) / 2.0;
    return stats;
}

namespace {

bool word_boundary_contains(const std::string& text_lower, const std::string& keyword_lower) {
    if (keyword_lower.empty()) return false;
    std::size_t pos = 0;
    while ((pos = text_lower.find(keyword_lower, pos)) != std::string::npos) {
        bool left_ok = pos == 0 || !util::is_word_char(
            static_cast<unsigned char>(text_lower[pos - 1]));
        std::size_t end = pos + keyword_lower.size();
        bool right_ok = end == text_lower.size() || !util::is_word_char(
            static_cast<unsigned char>(text_lower[end]));
        if (left_ok && right_ok) return true;
        ++pos;
    }
    return false;
}

}  // namespace

double grounding_score(const std::string& statement_text,
                       const std::vector<std::string>& keywords) {
    if (keywords.empty()) throw std::invalid_argument("grounding_score: no keywords");
    std::string text_lower = util::to_lower(statement_text);
    std::size_t present = 0;
    for (const auto& keyword : keywords) {
        if (word_boundary_contains(text_lower, keyword)) ++present;
    }
    return static_cast<double>(present) / static_cast<double>(keywords.size());
}

bool is_meaningful(const AgentStatement& statement, const std::vector<std::string>& keywords) {
    if (util::split_words(statement.justification).size() < 30) return false;
    if (grounding_score(statement.justification, keywords) > 0.0) return true;
    for (bool valid : statement.citation_validity) {
        if (valid) return true;
    }
    return false;
}

double participation_rate(const std::vector<AgentStatement>& round_statements,
                          int num_adjudicators) {
    if (num_adjudicators < 1) {
        throw std::invalid_argument("participation_rate: num_adjudicators must be >= 1");
    }
    std::set<std::string> contributors;
    for (const auto& s : round_statements) {
        if (!util::trim(s.justification).empty()) contributors.insert(s.agent_id);
    }
    return static_cast<double>(contributors.size()) / static_cast<double>(num_adjudicators);
}

MetricsSummary summarize(const DeliberationTranscript& transcript,
                         const std::vector<CallRecord>& call_log,
                         const std::vector<std::string>& keywords_normalized,
                         const SimulationConfig& config, const Verdict& verdict) {
    if (transcript.rounds.empty()) throw EmptyInput("summarize: transcript has no rounds");

    MetricsSummary summary;

    std::vector<double> latencies;
    latencies.reserve(call_log.size());
    for (const auto& record : call_log) latencies.push_back(record.latency_ms);
    if (!latencies.empty()) summary.latency = latency_stats(latencies);

    double grounding_sum = 0.0;
    for (const auto& round : transcript.rounds) {
        summary.participation_rate_per_round.push_back(
            participation_rate(round, config.num_adjudicators));
        for (const auto& s : round) {
            ++summary.total_statements;
            if (is_meaningful(s, keywords_normalized)) ++summary.meaningful_statements;
            grounding_sum += grounding_score(s.justification, keywords_normalized);
        }
    }
    summary.avg_meaningful_per_adjudicator =
        static_cast<double>(summary.meaningful_statements) /
        static_cast<double>(config.num_adjudicators);
    summary.avg_grounding_score =
        summary.total_statements == 0
            ? 0.0
            : grounding_sum / static_cast<double>(summary.total_statements);
    summary.final_agreement_ratio = verdict.final_agreement_ratio;
    return summary;
}

ConsistencySummary consistency(const std::vector<std::string>& verdict_labels) {
    if (verdict_labels.empty()) throw EmptyInput("consistency: no verdicts");

    ConsistencySummary summary;
    summary.runs = verdict_labels.size();
    for (const auto& label : verdict_labels) summary.verdict_distribution[label] += 1;

    std::size_t modal = 0;
    for (const auto& [label, count] : summary.verdict_distribution) {
        modal = std::max(modal, count);
    }
    summary.consistency_rate =
        static_cast<double>(modal) / static_cast<double>(summary.runs);

    if (summary.consistency_rate == 1.0) summary.label = "Very High";
    else if (summary.consistency_rate >= 0.8) summary.label = "High";
    else if (summary.consistency_rate >= 0.6) summary.label = "Medium";
    else summary.label = "Low";
    return summary;
}

}  // namespace courtsim
