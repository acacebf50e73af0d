#include "courtsim/deliberation.hpp"

#include <array>
#include <stdexcept>

namespace courtsim {

std::string to_string(ThresholdRule rule) {
    return rule == ThresholdRule::Greater ? "greater" : "greater_or_equal";
}

std::optional<ThresholdRule> threshold_rule_from_string(const std::string& s) {
    if (s == "greater") return ThresholdRule::Greater;
    if (s == "greater_or_equal") return ThresholdRule::GreaterOrEqual;
    return std::nullopt;
}

std::string to_string(Outcome outcome) {
    switch (outcome) {
        case Outcome::Guilty: return "Guilty";
        case Outcome::NotGuilty: return "Not Guilty";
        case Outcome::Hung: return "Hung";
    }
    return "Hung";
}

std::optional<Outcome> outcome_from_string(const std::string& s) {
    if (s == "Guilty") return Outcome::Guilty;
    if (s == "Not Guilty") return Outcome::NotGuilty;
    if (s == "Hung") return Outcome::Hung;
    return std::nullopt;
}

ConsensusCheck check_consensus(const std::vector<AgentStatement>& round_statements,
                               double threshold, ThresholdRule rule) {
    if (round_statements.empty()) {
        throw std::invalid_argument("check_consensus: no statements");
    }

    std::array<int, 3> counts{0, 0, 0};
    for (const auto& s : round_statements) {
        Leaning leaning = s.leaning.value_or(Leaning::Undecided);
        counts[static_cast<std::size_t>(leaning)] += 1;
    }

    int modal_count = 0;
    for (int c : counts) modal_count = std::max(modal_count, c);
    int modal_candidates = 0;
    std::size_t modal_index = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] == modal_count) {
            ++modal_candidates;
            modal_index = i;
        }
    }

    ConsensusCheck result;
    result.agreement_ratio =
        static_cast<double>(modal_count) / static_cast<double>(round_statements.size());
    if (modal_candidates == 1) result.modal = static_cast<Leaning>(modal_index);

    bool meets_threshold = rule == ThresholdRule::Greater
                               ? result.agreement_ratio > threshold
                               : result.agreement_ratio >= threshold;
    result.consensus = result.modal.has_value() && *result.modal != Leaning::Undecided &&
                       meets_threshold;
    return result;
}

Verdict declare_hung(const DeliberationTranscript& transcript, const SimulationConfig& config) {
    if (static_cast<int>(transcript.rounds.size()) != config.max_rounds) {
        throw std::logic_error("declare_hung called before max_rounds completed");
    }
    ConsensusCheck last =
        check_consensus(transcript.rounds.back(), config.consensus_threshold,
                        config.threshold_rule);
    if (last.consensus) {
        throw std::logic_error("declare_hung called although consensus was reached");
    }
    Verdict verdict;
    verdict.outcome = Outcome::Hung;
    verdict.final_agreement_ratio = last.agreement_ratio;
    verdict.rounds_used = config.max_rounds;
    return verdict;
}

}  // namespace courtsim
