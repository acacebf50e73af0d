#include "courtsim/orchestrator.hpp"

#include "courtsim/agents.hpp"
#include "util.hpp"

namespace courtsim {

namespace {

void validate_config(const SimulationConfig& config) {
    if (config.num_adjudicators < 1) {
        throw std::invalid_argument("num_adjudicators must be >= 1");
    }
    if (config.consensus_threshold <= 0.0 || config.consensus_threshold > 1.0) {
        throw std::invalid_argument("consensus_threshold must be in (0, 1]");
    }
    if (config.max_rounds < 1) {
        throw std::invalid_argument("max_rounds must be >= 1");
    }
    if (config.retrieval_k == 0) {
        throw std::invalid_argument("retrieval_k must be >= 1");
    }
}

}  // namespace

SimulationReport run_simulation(const SimulationConfig& config, const CaseFile& c,
                                const VectorStore* kb, LlmGateway& gateway,
                                const PromptTemplateSet& templates) {
    validate_config(config);
    if ((config.rag_judge || config.rag_counsel) && kb == nullptr) {
        throw std::invalid_argument("RAG enabled but no knowledge base supplied");
    }

    SimulationReport report;
    report.case_id = c.case_id;
    report.keywords = c.keywords;
    report.keywords_normalized = c.keywords_normalized;
    report.config = config;
    report.started_at = util::now_iso8601_utc();

    // The gateway may be shared across runs; only this run's calls belong in
    // the report.
    const std::size_t log_start = gateway.call_log().size();

    DeliberationTranscript& transcript = report.transcript;

    // Trial preparation: Judge, then Prosecution, then Defense.
    try {
        transcript.preparation.push_back(
            judge_instructions(c, kb, gateway, config, templates));
        transcript.preparation.push_back(
            counsel_argument(Role::Prosecution, c, kb, gateway, config, templates));
        transcript.preparation.push_back(
            counsel_argument(Role::Defense, c, kb, gateway, config, templates));
    } catch (const std::exception& e) {
        throw RunAborted("preparation", e.what(), transcript);
    }

    const AgentStatement& instructions = transcript.preparation[0];
    const AgentStatement& prosecution = transcript.preparation[1];
    const AgentStatement& defense = transcript.preparation[2];

    bool reached_consensus = false;
    for (int round = 1; round <= config.max_rounds && !reached_consensus; ++round) {
        std::vector<AgentStatement> statements;
        statements.reserve(static_cast<std::size_t>(config.num_adjudicators));
        try {
            for (int i = 1; i <= config.num_adjudicators; ++i) {
                statements.push_back(adjudicator_statement(
                    std::to_string(i), round, c, instructions, prosecution, defense,
                    transcript.rounds, gateway, config, templates,
                    config.sequential_same_round ? statements
                                                 : std::vector<AgentStatement>{}));
            }
        } catch (const std::exception& e) {
            throw RunAborted("deliberation round " + std::to_string(round), e.what(),
                             transcript);
        }
        transcript.rounds.push_back(std::move(statements));

        ConsensusCheck check = check_consensus(
            transcript.rounds.back(), config.consensus_threshold, config.threshold_rule);
        if (check.consensus) {
            reached_consensus = true;
            report.verdict.outcome = *check.modal == Leaning::Guilty ? Outcome::Guilty
                                                                     : Outcome::NotGuilty;
            report.verdict.final_agreement_ratio = check.agreement_ratio;
            report.verdict.rounds_used = round;
        }
    }

    if (!reached_consensus) {
        report.verdict = declare_hung(transcript, config);
    }

    auto full_log = gateway.call_log();
    report.call_log.assign(full_log.begin() + static_cast<std::ptrdiff_t>(log_start),
                           full_log.end());
    report.metrics = summarize(transcript, report.call_log, c.keywords_normalized, config,
                               report.verdict);
    report.finished_at = util::now_iso8601_utc();
    return report;
}

}  // namespace courtsim
