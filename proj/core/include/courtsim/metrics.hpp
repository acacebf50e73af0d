#pragma once

#include <map>
#include <string>
#include <vector>

#include "courtsim/deliberation.hpp"
#include "courtsim/llm_gateway.hpp"

namespace courtsim {

class EmptyInput : public std::invalid_argument {
public:
    explicit EmptyInput(const std::string& message) : std::invalid_argument(message) {}
};

struct LatencyStats {
    double mean_ms = 0.0;
    double median_ms = 0.0;
    double min_ms = 0.0;
    double max_ms = 0.0;
    std::size_t count = 0;
};

struct MetricsSummary {
    LatencyStats latency;
    std::vector<double> participation_rate_per_round;
    std::size_t total_statements = 0;       // adjudicator statements
    std::size_t meaningful_statements = 0;
    double avg_meaningful_per_adjudicator = 0.0;
    double avg_grounding_score = 0.0;
    double final_agreement_ratio = 0.0;
};

struct ConsistencySummary {
    std::size_t runs = 0;
    std::map<std::string, std::size_t> verdict_distribution;  // outcome label -> count
    double consistency_rate = 0.0;  // modal verdict count / runs
    std::string label;              // Very High | High | Medium | Low
};

/// Exact mean/median/min/max over a non-empty list of latencies (ms). An even
/// count takes the mean of the two middle values. Throws EmptyInput.
LatencyStats latency_stats(const std::vector<double>& latencies_ms);

/// Fraction of distinct keywords present in the text, matched
/// case-insensitively on word boundaries. Keywords must be pre-normalized
/// (lower-cased, trimmed) and non-empty.
double grounding_score(const std::string& statement_text,
                       const std::vector<std::string>& keywords);

/// A statement is meaningful iff its justification has >= 30 words and it is
/// grounded (keyword score > 0) or carries at least one valid citation.
bool is_meaningful(const AgentStatement& statement, const std::vector<std::string>& keywords);

/// Distinct contributing adjudicators over panel size; empty justifications
/// do not count as contributing.
double participation_rate(const std::vector<AgentStatement>& round_statements,
                          int num_adjudicators);

/// Aggregate the run metrics from completed-run artifacts. Throws EmptyInput
/// on an empty transcript.
MetricsSummary summarize(const DeliberationTranscript& transcript,
                         const std::vector<CallRecord>& call_log,
                         const std::vector<std::string>& keywords_normalized,
                         const SimulationConfig& config, const Verdict& verdict);

/// Verdict distribution across replicate runs of one case. Label mapping:
/// rate == 1.0 -> Very High; >= 0.8 -> High; >= 0.6 -> Medium; else Low.
ConsistencySummary consistency(const std::vector<std::string>& verdict_labels);

}  // namespace courtsim
