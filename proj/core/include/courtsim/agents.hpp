#pragma once

#include <optional>
#include <string>
#include <vector>

#include "courtsim/case_model.hpp"
#include "courtsim/knowledge_base.hpp"
#include "courtsim/llm_gateway.hpp"
#include "courtsim/prompt_templates.hpp"

namespace courtsim {

struct SimulationConfig;  // deliberation.hpp

enum class Leaning { Guilty, NotGuilty, Undecided };

std::string to_string(Leaning leaning);
std::optional<Leaning> leaning_from_string(const std::string& s);

enum class Role { Judge, Prosecution, Defense, Adjudicator };

std::string to_string(Role role);
std::optional<Role> role_from_string(const std::string& s);

struct Citation {
    std::string source_document;
    std::int64_t chunk_id = 0;

    bool operator==(const Citation&) const = default;
};

/// One agent utterance. Adjudicator statements carry a leaning; judge and
/// counsel statements do not. citation_validity[i] is true iff citations[i]
/// referred to a chunk actually offered to the agent as context.
struct AgentStatement {
    std::string agent_id;
    Role role = Role::Adjudicator;
    int round = 0;  // 0 = preparation phase
    std::optional<Leaning> leaning;
    std::string justification;
    std::vector<Citation> citations;
    std::vector<bool> citation_validity;
    double latency_ms = 0.0;
    bool parse_warning = false;
};

// Role-fixed round-0 specializations.
using JudgeInstructions = AgentStatement;
using CounselArgument = AgentStatement;

/// First line matching `LEANING: <value>` (case-insensitive) decides the
/// leaning; "not guilty" is tested before "guilty". No matching line yields
/// (Undecided, warning=true). Total: never throws.
std::pair<Leaning, bool> parse_leaning(const std::string& text);

/// Every occurrence of `[Source: <doc>, chunk <int>]`, duplicates preserved
/// in order. The validity flag is true iff (doc, id) appears in the offered
/// context.
std::pair<std::vector<Citation>, std::vector<bool>> extract_citations(
    const std::string& text, const std::vector<RetrievalResult>& offered_context);

/// Deterministic retrieval query for a RAG-enabled role: the charges joined
/// with the head of the law explanation (judge) or of that side's evidence
/// items (counsel).
std::string build_rag_query(Role role, const CaseFile& c);

AgentStatement judge_instructions(const CaseFile& c, const VectorStore* kb, LlmGateway& gateway,
                                  const SimulationConfig& config,
                                  const PromptTemplateSet& templates);

AgentStatement counsel_argument(Role side, const CaseFile& c, const VectorStore* kb,
                                LlmGateway& gateway, const SimulationConfig& config,
                                const PromptTemplateSet& templates);

/// same_round_peers is empty unless the sequential same-round mode is active,
/// in which case it holds the statements already made this round.
AgentStatement adjudicator_statement(const std::string& agent_id, int round, const CaseFile& c,
                                     const AgentStatement& instructions,
                                     const AgentStatement& prosecution_argument,
                                     const AgentStatement& defense_argument,
                                     const std::vector<std::vector<AgentStatement>>& prior_rounds,
                                     LlmGateway& gateway, const SimulationConfig& config,
                                     const PromptTemplateSet& templates,
                                     const std::vector<AgentStatement>& same_round_peers = {});

}  // namespace courtsim
