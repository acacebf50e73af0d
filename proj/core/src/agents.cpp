#include "courtsim/agents.hpp"

#include <cctype>

#include "courtsim/deliberation.hpp"
#include "util.hpp"

namespace courtsim {

namespace {

constexpr std::size_t kLawHeadChars = 240;
constexpr std::size_t kEvidenceHeadChars = 120;

const char* kJudgeSystemPrompt =
    "You are an impartial judge in a structured courtroom simulation. "
    "Be precise, neutral, and grounded in the material you are given.";
const char* kCounselSystemPrompt =
    "You are trial counsel in a structured courtroom simulation. "
    "Argue your side persuasively but stay grounded in the material you are given.";
const char* kAdjudicatorSystemPrompt =
    "You are one member of a deliberating judicial panel in a structured "
    "courtroom simulation. Reason carefully from the case material and follow "
    "the requested output format exactly.";

std::string lower_ascii(std::string_view s) { return util::to_lower(s); }

// Case-insensitive search for needle in haystack (both ASCII).
bool contains_ci(const std::string& haystack_lower, const char* needle) {
    return haystack_lower.find(needle) != std::string::npos;
}

std::string charges_line(const CaseFile& c) { return util::join(c.charges, "; "); }

std::string evidence_block(const std::vector<std::string>& items) {
    if (items.empty()) return "(none)";
    std::string out;
    for (const auto& item : items) {
        out += "- " + item + "\n";
    }
    if (!out.empty() && out.back() == '\n') out.pop_back();
    return out;
}

std::string format_peer_statements(const std::vector<std::vector<AgentStatement>>& prior_rounds,
                                   const std::vector<AgentStatement>& same_round_peers) {
    std::string out;
    auto append = [&out](const AgentStatement& s) {
        out += "[Round " + std::to_string(s.round) + "] Adjudicator " + s.agent_id +
               " — leaning " + (s.leaning ? to_string(*s.leaning) : "None") + ":\n" +
               s.justification + "\n\n";
    };
    for (const auto& round : prior_rounds) {
        for (const auto& s : round) append(s);
    }
    for (const auto& s : same_round_peers) append(s);
    if (out.empty()) return "(no prior statements)";
    while (!out.empty() && out.back() == '\n') out.pop_back();
    return out;
}

struct RagContext {
    std::vector<RetrievalResult> results;
    std::string text = "NO CONTEXT RETRIEVED";
};

RagContext retrieve_context(Role role, const CaseFile& c, const VectorStore* kb,
                            LlmGateway& gateway, const SimulationConfig& config) {
    RagContext ctx;
    if (kb == nullptr) return ctx;
    auto embedder = make_embedder_for_identity(kb->manifest().embedder_id, &gateway);
    ctx.results = query(*kb, build_rag_query(role, c), config.retrieval_k, *embedder);
    ctx.text = format_context(ctx.results);
    return ctx;
}

AgentStatement run_preparation_call(Role role, const std::string& agent_id,
                                    const std::string& system_prompt,
                                    const std::string& user_prompt,
                                    const std::vector<RetrievalResult>& offered,
                                    LlmGateway& gateway, const SimulationConfig& config) {
    GenerationRequest request;
    request.system_prompt = system_prompt;
    request.user_prompt = user_prompt;
    request.model_id = config.model_id;
    request.temperature = config.temperature;
    request.max_tokens = config.max_tokens;
    request.seed = config.seed;
    request.role = to_string(role);
    request.agent_id = agent_id;
    request.round = 0;

    GenerationResponse response = gateway.generate(request);

    AgentStatement statement;
    statement.agent_id = agent_id;
    statement.role = role;
    statement.round = 0;
    statement.justification = response.text;
    std::tie(statement.citations, statement.citation_validity) =
        extract_citations(response.text, offered);
    statement.latency_ms = response.latency_ms;
    return statement;
}

}  // namespace

std::string to_string(Leaning leaning) {
    switch (leaning) {
        case Leaning::Guilty: return "Guilty";
        case Leaning::NotGuilty: return "Not Guilty";
        case Leaning::Undecided: return "Undecided";
    }
    return "Undecided";
}

std::optional<Leaning> leaning_from_string(const std::string& s) {
    std::string v = lower_ascii(util::trim(s));
    if (v == "guilty") return Leaning::Guilty;
    if (v == "not guilty") return Leaning::NotGuilty;
    if (v == "undecided") return Leaning::Undecided;
    return std::nullopt;
}

std::string to_string(Role role) {
    switch (role) {
        case Role::Judge: return "judge";
        case Role::Prosecution: return "prosecution";
        case Role::Defense: return "defense";
        case Role::Adjudicator: return "adjudicator";
    }
    return "adjudicator";
}

std::optional<Role> role_from_string(const std::string& s) {
    if (s == "judge") return Role::Judge;
    if (s == "prosecution") return Role::Prosecution;
    if (s == "defense") return Role::Defense;
    if (s == "adjudicator") return Role::Adjudicator;
    return std::nullopt;
}

std::pair<Leaning, bool> parse_leaning(const std::string& text) {
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        std::string line = lower_ascii(util::trim(text.substr(pos, eol - pos)));
        pos = eol + 1;

        std::size_t label = line.find("leaning");
        if (label != 0) continue;
        std::size_t colon = line.find(':', label);
        if (colon == std::string::npos) continue;
        std::string value = line.substr(colon + 1);
        // "not guilty" must win over its "guilty" substring.
        if (contains_ci(value, "not guilty")) return {Leaning::NotGuilty, false};
        if (contains_ci(value, "guilty")) return {Leaning::Guilty, false};
        if (contains_ci(value, "undecided")) return {Leaning::Undecided, false};
    }
    return {Leaning::Undecided, true};
}

std::pair<std::vector<Citation>, std::vector<bool>> extract_citations(
    const std::string& text, const std::vector<RetrievalResult>& offered_context) {
    std::vector<Citation> citations;
    std::vector<bool> validity;

    const std::string open = "[Source:";
    std::size_t pos = 0;
    while ((pos = text.find(open, pos)) != std::string::npos) {
        std::size_t close = text.find(']', pos);
        if (close == std::string::npos) break;
        std::string inner = text.substr(pos + open.size(), close - pos - open.size());
        pos = close + 1;

        std::size_t comma = inner.rfind(',');
        if (comma == std::string::npos) continue;
        std::string doc = util::trim(inner.substr(0, comma));
        std::string rest = util::trim(inner.substr(comma + 1));
        if (doc.empty()) continue;

        const std::string chunk_label = "chunk";
        if (lower_ascii(rest).rfind(chunk_label, 0) != 0) continue;
        std::string digits = util::trim(rest.substr(chunk_label.size()));
        // 18 digits keeps stoll well inside int64 range.
        if (digits.empty() || digits.size() > 18 ||
            !std::all_of(digits.begin(), digits.end(),
                         [](unsigned char ch) { return std::isdigit(ch) != 0; })) {
            continue;
        }

        Citation citation;
        citation.source_document = doc;
        citation.chunk_id = std::stoll(digits);

        bool valid = false;
        for (const auto& r : offered_context) {
            if (r.chunk.source_document == citation.source_document &&
                r.chunk.chunk_id == citation.chunk_id) {
                valid = true;
                break;
            }
        }
        citations.push_back(std::move(citation));
        validity.push_back(valid);
    }
    return {std::move(citations), std::move(validity)};
}

std::string build_rag_query(Role role, const CaseFile& c) {
    std::string q = charges_line(c);
    q += "\n";
    switch (role) {
        case Role::Judge:
            q += util::utf8_head(c.law_explanation, kLawHeadChars);
            break;
        case Role::Prosecution: {
            std::vector<std::string> heads;
            for (const auto& item : c.prosecution_evidence) {
                heads.push_back(util::utf8_head(item, kEvidenceHeadChars));
            }
            q += util::join(heads, "; ");
            break;
        }
        case Role::Defense: {
            std::vector<std::string> heads;
            for (const auto& item : c.defense_evidence) {
                heads.push_back(util::utf8_head(item, kEvidenceHeadChars));
            }
            q += util::join(heads, "; ");
            break;
        }
        case Role::Adjudicator:
            q += util::utf8_head(c.summary, kLawHeadChars);
            break;
    }
    return q;
}

AgentStatement judge_instructions(const CaseFile& c, const VectorStore* kb, LlmGateway& gateway,
                                  const SimulationConfig& config,
                                  const PromptTemplateSet& templates) {
    RagContext ctx;
    if (config.rag_judge) {
        if (kb == nullptr) throw std::invalid_argument("rag_judge set but no knowledge base given");
        ctx = retrieve_context(Role::Judge, c, kb, gateway, config);
    }
    std::string prompt = render_template(templates.judge(), {
        {"summary", c.summary},
        {"charges", charges_line(c)},
        {"law_explanation", c.law_explanation},
        {"context", ctx.text},
    });
    return run_preparation_call(Role::Judge, "judge", kJudgeSystemPrompt, prompt, ctx.results,
                                gateway, config);
}

AgentStatement counsel_argument(Role side, const CaseFile& c, const VectorStore* kb,
                                LlmGateway& gateway, const SimulationConfig& config,
                                const PromptTemplateSet& templates) {
    if (side != Role::Prosecution && side != Role::Defense) {
        throw std::invalid_argument("counsel_argument: side must be prosecution or defense");
    }
    RagContext ctx;
    if (config.rag_counsel) {
        if (kb == nullptr) throw std::invalid_argument("rag_counsel set but no knowledge base given");
        ctx = retrieve_context(side, c, kb, gateway, config);
    }
    const bool is_prosecution = (side == Role::Prosecution);
    std::string prompt = render_template(
        is_prosecution ? templates.prosecution() : templates.defense(), {
        {"summary", c.summary},
        {"charges", charges_line(c)},
        {"law_explanation", c.law_explanation},
        {"evidence", evidence_block(is_prosecution ? c.prosecution_evidence : c.defense_evidence)},
        {"context", ctx.text},
    });
    return run_preparation_call(side, to_string(side), kCounselSystemPrompt, prompt, ctx.results,
                                gateway, config);
}

AgentStatement adjudicator_statement(const std::string& agent_id, int round, const CaseFile& c,
                                     const AgentStatement& instructions,
                                     const AgentStatement& prosecution_argument,
                                     const AgentStatement& defense_argument,
                                     const std::vector<std::vector<AgentStatement>>& prior_rounds,
                                     LlmGateway& gateway, const SimulationConfig& config,
                                     const PromptTemplateSet& templates,
                                     const std::vector<AgentStatement>& same_round_peers) {
    if (round < 1) throw std::invalid_argument("adjudicator rounds start at 1");
    for (const auto& prior : prior_rounds) {
        for (const auto& s : prior) {
            if (s.round >= round) {
                throw std::invalid_argument("prior_rounds may only contain earlier rounds");
            }
        }
    }
    if (!same_round_peers.empty() && !config.sequential_same_round) {
        throw std::invalid_argument("same-round peers require sequential_same_round");
    }

    std::string prompt = render_template(templates.adjudicator(), {
        {"agent_id", agent_id},
        {"num_adjudicators", std::to_string(config.num_adjudicators)},
        {"round", std::to_string(round)},
        {"summary", c.summary},
        {"charges", charges_line(c)},
        {"instructions", instructions.justification},
        {"prosecution_argument", prosecution_argument.justification},
        {"defense_argument", defense_argument.justification},
        {"peer_statements", format_peer_statements(prior_rounds, same_round_peers)},
    });

    GenerationRequest request;
    request.system_prompt = kAdjudicatorSystemPrompt;
    request.user_prompt = prompt;
    request.model_id = config.model_id;
    request.temperature = config.temperature;
    request.max_tokens = config.max_tokens;
    request.seed = config.seed;
    request.role = to_string(Role::Adjudicator);
    request.agent_id = agent_id;
    request.round = round;

    GenerationResponse response = gateway.generate(request);

    AgentStatement statement;
    statement.agent_id = agent_id;
    statement.role = Role::Adjudicator;
    statement.round = round;
    auto [leaning, warning] = parse_leaning(response.text);
    statement.leaning = leaning;
    statement.parse_warning = warning;

    // Keep the reasoning after the JUSTIFICATION label when present; fall
    // back to the whole response otherwise.
    std::string lower = lower_ascii(response.text);
    std::size_t label = lower.find("justification");
    if (label != std::string::npos) {
        std::size_t colon = response.text.find(':', label);
        if (colon != std::string::npos) {
            statement.justification = util::trim(response.text.substr(colon + 1));
        }
    }
    if (statement.justification.empty()) statement.justification = util::trim(response.text);

    std::tie(statement.citations, statement.citation_validity) =
        extract_citations(response.text, {});
    statement.latency_ms = response.latency_ms;
    return statement;
}

}  // namespace courtsim
