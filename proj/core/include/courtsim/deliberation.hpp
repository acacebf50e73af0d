#pragma once

#include <optional>
#include <string>
#include <vector>

#include "courtsim/agents.hpp"

namespace courtsim {

enum class ThresholdRule { Greater, GreaterOrEqual };

std::string to_string(ThresholdRule rule);
std::optional<ThresholdRule> threshold_rule_from_string(const std::string& s);

struct SimulationConfig {
    int num_adjudicators = 5;
    double consensus_threshold = 0.80;
    ThresholdRule threshold_rule = ThresholdRule::GreaterOrEqual;
    int max_rounds = 5;
    bool rag_judge = false;
    bool rag_counsel = false;
    std::string model_id = "default-model";
    double temperature = 0.2;
    int max_tokens = 1024;
    std::size_t retrieval_k = 5;
    std::optional<int> seed;
    std::string backend = "mock";  // echoed into reports
    // Off: adjudicators see prior rounds only (order-independent within a
    // round). On: each adjudicator also sees the statements already made
    // earlier in the current round.
    bool sequential_same_round = false;

    bool operator==(const SimulationConfig&) const = default;
};

/// Full deliberation history: round-0 preparation statements (judge,
/// prosecution, defense, in that order) plus one statement list per round,
/// ordered by agent id.
struct DeliberationTranscript {
    std::vector<AgentStatement> preparation;
    std::vector<std::vector<AgentStatement>> rounds;  // rounds[i] is round i+1
};

enum class Outcome { Guilty, NotGuilty, Hung };

std::string to_string(Outcome outcome);
std::optional<Outcome> outcome_from_string(const std::string& s);

struct Verdict {
    Outcome outcome = Outcome::Hung;
    double final_agreement_ratio = 0.0;
    int rounds_used = 1;
};

struct ConsensusCheck {
    double agreement_ratio = 0.0;
    std::optional<Leaning> modal;  // nullopt when the modal leaning is tied
    bool consensus = false;
};

/// Agreement ratio is the modal leaning count over all adjudicators, with
/// Undecided countable as modal. Consensus holds iff the modal leaning is
/// unique, is not Undecided, and the ratio satisfies the rule against the
/// threshold.
ConsensusCheck check_consensus(const std::vector<AgentStatement>& round_statements,
                               double threshold, ThresholdRule rule);

/// Terminal verdict after max_rounds without consensus. Precondition: the
/// transcript holds exactly config.max_rounds rounds and the last round did
/// not reach consensus; violation throws std::logic_error.
Verdict declare_hung(const DeliberationTranscript& transcript, const SimulationConfig& config);

}  // namespace courtsim
