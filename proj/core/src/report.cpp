#include <cstdio>

#include <nlohmann/json.hpp>

#include "courtsim/orchestrator.hpp"
#include "util.hpp"

namespace courtsim {

namespace {

using nlohmann::json;

std::string fixed2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

json statement_to_json(const AgentStatement& s) {
    json j;
    j["agent_id"] = s.agent_id;
    j["role"] = to_string(s.role);
    j["round"] = s.round;
    if (s.leaning) j["leaning"] = to_string(*s.leaning);
    j["justification"] = s.justification;
    j["citations"] = json::array();
    for (const auto& c : s.citations) {
        j["citations"].push_back({{"source_document", c.source_document},
                                  {"chunk_id", c.chunk_id}});
    }
    j["citation_validity"] = s.citation_validity;
    j["parse_warning"] = s.parse_warning;
    return j;
}

AgentStatement statement_from_json(const json& j) {
    AgentStatement s;
    s.agent_id = j.at("agent_id").get<std::string>();
    auto role = role_from_string(j.at("role").get<std::string>());
    if (!role) throw std::runtime_error("unknown role in report statement");
    s.role = *role;
    s.round = j.at("round").get<int>();
    if (j.contains("leaning") && !j.at("leaning").is_null()) {
        auto leaning = leaning_from_string(j.at("leaning").get<std::string>());
        if (!leaning) throw std::runtime_error("unknown leaning in report statement");
        s.leaning = *leaning;
    }
    s.justification = j.at("justification").get<std::string>();
    for (const auto& c : j.at("citations")) {
        s.citations.push_back({c.at("source_document").get<std::string>(),
                               c.at("chunk_id").get<std::int64_t>()});
    }
    s.citation_validity = j.at("citation_validity").get<std::vector<bool>>();
    s.parse_warning = j.at("parse_warning").get<bool>();
    return s;
}

json config_to_json(const SimulationConfig& c) {
    json j;
    j["num_adjudicators"] = c.num_adjudicators;
    j["consensus_threshold"] = c.consensus_threshold;
    j["threshold_rule"] = to_string(c.threshold_rule);
    j["max_rounds"] = c.max_rounds;
    j["rag_judge"] = c.rag_judge;
    j["rag_counsel"] = c.rag_counsel;
    j["model_id"] = c.model_id;
    j["temperature"] = c.temperature;
    j["max_tokens"] = c.max_tokens;
    j["retrieval_k"] = c.retrieval_k;
    if (c.seed) j["seed"] = *c.seed; else j["seed"] = nullptr;
    j["backend"] = c.backend;
    j["sequential_same_round"] = c.sequential_same_round;
    return j;
}

SimulationConfig config_from_json(const json& j) {
    SimulationConfig c;
    c.num_adjudicators = j.at("num_adjudicators").get<int>();
    c.consensus_threshold = j.at("consensus_threshold").get<double>();
    auto rule = threshold_rule_from_string(j.at("threshold_rule").get<std::string>());
    if (!rule) throw std::runtime_error("unknown threshold_rule in report config");
    c.threshold_rule = *rule;
    c.max_rounds = j.at("max_rounds").get<int>();
    c.rag_judge = j.at("rag_judge").get<bool>();
    c.rag_counsel = j.at("rag_counsel").get<bool>();
    c.model_id = j.at("model_id").get<std::string>();
    c.temperature = j.at("temperature").get<double>();
    c.max_tokens = j.at("max_tokens").get<int>();
    c.retrieval_k = j.at("retrieval_k").get<std::size_t>();
    if (!j.at("seed").is_null()) c.seed = j.at("seed").get<int>();
    c.backend = j.at("backend").get<std::string>();
    c.sequential_same_round = j.value("sequential_same_round", false);
    return c;
}

json call_record_to_json(const CallRecord& r) {
    json j;
    j["seq"] = r.seq;
    j["kind"] = r.kind;
    j["role"] = r.role;
    j["agent_id"] = r.agent_id;
    j["round"] = r.round;
    j["model_id"] = r.model_id;
    j["latency_ms"] = r.latency_ms;
    j["prompt_chars"] = r.prompt_chars;
    j["response_chars"] = r.response_chars;
    j["attempts"] = r.attempts;
    j["ok"] = r.ok;
    j["error"] = r.error;
    j["backend_id"] = r.backend_id;
    return j;
}

CallRecord call_record_from_json(const json& j) {
    CallRecord r;
    r.seq = j.at("seq").get<std::uint64_t>();
    r.kind = j.at("kind").get<std::string>();
    r.role = j.at("role").get<std::string>();
    r.agent_id = j.at("agent_id").get<std::string>();
    r.round = j.at("round").get<int>();
    r.model_id = j.at("model_id").get<std::string>();
    r.latency_ms = j.at("latency_ms").get<double>();
    r.prompt_chars = j.at("prompt_chars").get<std::size_t>();
    r.response_chars = j.at("response_chars").get<std::size_t>();
    r.attempts = j.at("attempts").get<int>();
    r.ok = j.at("ok").get<bool>();
    r.error = j.at("error").get<std::string>();
    r.backend_id = j.at("backend_id").get<std::string>();
    return r;
}

}  // namespace

std::string transcript_to_json(const DeliberationTranscript& transcript) {
    json prep = json::array();
    for (const auto& s : transcript.preparation) prep.push_back(statement_to_json(s));
    json rounds = json::array();
    for (const auto& round : transcript.rounds) {
        json r = json::array();
        for (const auto& s : round) r.push_back(statement_to_json(s));
        rounds.push_back(std::move(r));
    }
    json j = {{"preparation", std::move(prep)}, {"rounds", std::move(rounds)}};
    return j.dump(2) + "\n";
}

std::string report_to_json(const SimulationReport& report) {
    json j;
    j["schema_version"] = 1;
    j["case"] = {{"case_id", report.case_id},
                 {"keywords", report.keywords},
                 {"keywords_normalized", report.keywords_normalized}};
    j["config"] = config_to_json(report.config);
    j["verdict"] = {{"outcome", to_string(report.verdict.outcome)},
                    {"final_agreement_ratio", report.verdict.final_agreement_ratio},
                    {"rounds_used", report.verdict.rounds_used}};

    json prep = json::array();
    for (const auto& s : report.transcript.preparation) prep.push_back(statement_to_json(s));
    json rounds = json::array();
    for (const auto& round : report.transcript.rounds) {
        json r = json::array();
        for (const auto& s : round) r.push_back(statement_to_json(s));
        rounds.push_back(std::move(r));
    }
    j["transcript"] = {{"preparation", std::move(prep)}, {"rounds", std::move(rounds)}};

    // All volatile values (timestamps, latencies) are confined to "timing" so
    // that the rest of the document is reproducible byte for byte.
    j["metrics"] = {
        {"participation_rate_per_round", report.metrics.participation_rate_per_round},
        {"total_statements", report.metrics.total_statements},
        {"meaningful_statements", report.metrics.meaningful_statements},
        {"avg_meaningful_per_adjudicator", report.metrics.avg_meaningful_per_adjudicator},
        {"avg_grounding_score", report.metrics.avg_grounding_score},
        {"final_agreement_ratio", report.metrics.final_agreement_ratio},
    };

    json call_log = json::array();
    for (const auto& r : report.call_log) call_log.push_back(call_record_to_json(r));
    j["timing"] = {
        {"started_at", report.started_at},
        {"finished_at", report.finished_at},
        {"latency", {{"mean_ms", report.metrics.latency.mean_ms},
                     {"median_ms", report.metrics.latency.median_ms},
                     {"min_ms", report.metrics.latency.min_ms},
                     {"max_ms", report.metrics.latency.max_ms},
                     {"count", report.metrics.latency.count}}},
        {"call_log", std::move(call_log)},
    };
    return j.dump(2) + "\n";
}

SimulationReport report_from_json(const std::string& json_text) {
    json j = json::parse(json_text);

    SimulationReport report;
    report.case_id = j.at("case").at("case_id").get<std::string>();
    report.keywords = j.at("case").at("keywords").get<std::vector<std::string>>();
    report.keywords_normalized =
        j.at("case").at("keywords_normalized").get<std::vector<std::string>>();
    report.config = config_from_json(j.at("config"));

    auto outcome = outcome_from_string(j.at("verdict").at("outcome").get<std::string>());
    if (!outcome) throw std::runtime_error("unknown verdict outcome");
    report.verdict.outcome = *outcome;
    report.verdict.final_agreement_ratio =
        j.at("verdict").at("final_agreement_ratio").get<double>();
    report.verdict.rounds_used = j.at("verdict").at("rounds_used").get<int>();

    for (const auto& s : j.at("transcript").at("preparation")) {
        report.transcript.preparation.push_back(statement_from_json(s));
    }
    for (const auto& round : j.at("transcript").at("rounds")) {
        std::vector<AgentStatement> statements;
        for (const auto& s : round) statements.push_back(statement_from_json(s));
        report.transcript.rounds.push_back(std::move(statements));
    }

    const auto& m = j.at("metrics");
    report.metrics.participation_rate_per_round =
        m.at("participation_rate_per_round").get<std::vector<double>>();
    report.metrics.total_statements = m.at("total_statements").get<std::size_t>();
    report.metrics.meaningful_statements = m.at("meaningful_statements").get<std::size_t>();
    report.metrics.avg_meaningful_per_adjudicator =
        m.at("avg_meaningful_per_adjudicator").get<double>();
    report.metrics.avg_grounding_score = m.at("avg_grounding_score").get<double>();
    report.metrics.final_agreement_ratio = m.at("final_agreement_ratio").get<double>();

    const auto& t = j.at("timing");
    report.started_at = t.at("started_at").get<std::string>();
    report.finished_at = t.at("finished_at").get<std::string>();
    report.metrics.latency.mean_ms = t.at("latency").at("mean_ms").get<double>();
    report.metrics.latency.median_ms = t.at("latency").at("median_ms").get<double>();
    report.metrics.latency.min_ms = t.at("latency").at("min_ms").get<double>();
    report.metrics.latency.max_ms = t.at("latency").at("max_ms").get<double>();
    report.metrics.latency.count = t.at("latency").at("count").get<std::size_t>();
    for (const auto& r : t.at("call_log")) {
        report.call_log.push_back(call_record_from_json(r));
    }
    return report;
}

std::string render_report_markdown(const SimulationReport& report) {
    double participation_mean = 0.0;
    for (double p : report.metrics.participation_rate_per_round) participation_mean += p;
    if (!report.metrics.participation_rate_per_round.empty()) {
        participation_mean /=
            static_cast<double>(report.metrics.participation_rate_per_round.size());
    }

    std::string md;
    md += "# Simulation Report: " + report.case_id + "\n\n";
    md += "- Backend: " + report.config.backend + "\n";
    md += "- Model: " + report.config.model_id + "\n";
    md += "- Started: " + report.started_at + "\n";
    md += "- Finished: " + report.finished_at + "\n\n";

    md += "## Metrics\n\n";
    md += "| Metric | Value |\n";
    md += "| --- | --- |\n";
    md += "| No. of Adjudicators | " + std::to_string(report.config.num_adjudicators) + " |\n";
    md += "| RAG enabled (Judge) | " + std::string(report.config.rag_judge ? "True" : "False") +
          " |\n";
    md += "| RAG enabled (Counsel) | " +
          std::string(report.config.rag_counsel ? "True" : "False") + " |\n";
    md += "| Final Verdict | " + to_string(report.verdict.outcome) + " |\n";
    md += "| Deliberation Rounds | " + std::to_string(report.verdict.rounds_used) + " |\n";
    md += "| Final Agreement Ratio | " + fixed2(report.verdict.final_agreement_ratio) + " |\n";
    md += "| Adjudicator Participation Rate | " + fixed2(participation_mean) + " |\n";
    md += "| Avg. Meaningful Statements per Adjudicator | " +
          fixed2(report.metrics.avg_meaningful_per_adjudicator) + " |\n";
    md += "| Avg. Argument Grounding Score | " + fixed2(report.metrics.avg_grounding_score) +
          " |\n\n";

    md += "## Latency (ms)\n\n";
    md += "| Mean | Median | Min | Max | Calls |\n";
    md += "| --- | --- | --- | --- | --- |\n";
    md += "| " + fixed2(report.metrics.latency.mean_ms) + " | " +
          fixed2(report.metrics.latency.median_ms) + " | " +
          fixed2(report.metrics.latency.min_ms) + " | " +
          fixed2(report.metrics.latency.max_ms) + " | " +
          std::to_string(report.metrics.latency.count) + " |\n\n";

    md += "## Transcript\n\n";
    md += "### Preparation\n\n";
    for (const auto& s : report.transcript.preparation) {
        md += "**" + to_string(s.role) + "**";
        if (!s.citations.empty()) {
            md += " (citations: " + std::to_string(s.citations.size()) + ")";
        }
        md += "\n\n" + s.justification + "\n\n";
    }
    for (std::size_t i = 0; i < report.transcript.rounds.size(); ++i) {
        md += "### Round " + std::to_string(i + 1) + "\n\n";
        for (const auto& s : report.transcript.rounds[i]) {
            md += "**Adjudicator " + s.agent_id + "** — Leaning: " +
                  (s.leaning ? to_string(*s.leaning) : "None");
            if (s.parse_warning) md += " (parse warning)";
            md += "\n\n" + s.justification + "\n\n";
        }
    }
    return md;
}

std::vector<std::string> validate_report_json(const std::string& json_text) {
    std::vector<std::string> problems;
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        problems.push_back(std::string("not valid JSON: ") + e.what());
        return problems;
    }

    auto require = [&](const json& node, const char* key, const char* where) -> const json* {
        if (!node.contains(key)) {
            problems.push_back(std::string("missing ") + where + "." + key);
            return nullptr;
        }
        return &node.at(key);
    };

    for (const char* key : {"case", "config", "verdict", "transcript", "metrics", "timing"}) {
        require(j, key, "report");
    }
    if (!problems.empty()) return problems;

    for (const char* key : {"case_id", "keywords", "keywords_normalized"}) {
        require(j["case"], key, "case");
    }
    for (const char* key :
         {"num_adjudicators", "consensus_threshold", "threshold_rule", "max_rounds",
          "rag_judge", "rag_counsel", "model_id", "temperature", "max_tokens", "retrieval_k",
          "seed", "backend"}) {
        require(j["config"], key, "config");
    }
    for (const char* key : {"outcome", "final_agreement_ratio", "rounds_used"}) {
        require(j["verdict"], key, "verdict");
    }
    for (const char* key : {"preparation", "rounds"}) {
        require(j["transcript"], key, "transcript");
    }
    for (const char* key :
         {"participation_rate_per_round", "total_statements", "meaningful_statements",
          "avg_meaningful_per_adjudicator", "avg_grounding_score", "final_agreement_ratio"}) {
        require(j["metrics"], key, "metrics");
    }
    for (const char* key : {"started_at", "finished_at", "latency", "call_log"}) {
        require(j["timing"], key, "timing");
    }
    if (!problems.empty()) return problems;

    if (j["verdict"]["outcome"].is_string()) {
        if (!outcome_from_string(j["verdict"]["outcome"].get<std::string>())) {
            problems.push_back("verdict.outcome is not one of Guilty / Not Guilty / Hung");
        }
    } else {
        problems.push_back("verdict.outcome is not a string");
    }

    auto check_statements = [&](const json& list, const std::string& where) {
        if (!list.is_array()) {
            problems.push_back(where + " is not an array");
            return;
        }
        for (const auto& s : list) {
            for (const char* key : {"agent_id", "role", "round", "justification", "citations",
                                    "citation_validity", "parse_warning"}) {
                if (!s.contains(key)) {
                    problems.push_back("statement in " + where + " missing " + key);
                    return;
                }
            }
            if (s["citations"].size() != s["citation_validity"].size()) {
                problems.push_back("statement in " + where +
                                   " has mismatched citations/citation_validity lengths");
            }
            if (s["role"] == "adjudicator" && !s.contains("leaning")) {
                problems.push_back("adjudicator statement in " + where + " has no leaning");
            }
        }
    };
    check_statements(j["transcript"]["preparation"], "transcript.preparation");
    if (j["transcript"]["rounds"].is_array()) {
        for (std::size_t i = 0; i < j["transcript"]["rounds"].size(); ++i) {
            check_statements(j["transcript"]["rounds"][i],
                             "transcript.rounds[" + std::to_string(i) + "]");
        }
    } else {
        problems.push_back("transcript.rounds is not an array");
    }
    return problems;
}

ReportPaths write_report_files(const SimulationReport& report,
                               const std::filesystem::path& out_dir, int run_index) {
    std::filesystem::create_directories(out_dir);
    std::string stem = report.case_id + "_" + std::to_string(run_index) + "_" +
                       util::now_file_timestamp_utc();
    ReportPaths paths;
    paths.json_path = out_dir / (stem + ".report.json");
    paths.markdown_path = out_dir / (stem + ".report.md");
    util::write_text_file(paths.json_path, report_to_json(report));
    util::write_text_file(paths.markdown_path, render_report_markdown(report));
    return paths;
}

}  // namespace courtsim
