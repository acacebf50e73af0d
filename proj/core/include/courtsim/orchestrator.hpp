#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "courtsim/case_model.hpp"
#include "courtsim/deliberation.hpp"
#include "courtsim/knowledge_base.hpp"
#include "courtsim/llm_gateway.hpp"
#include "courtsim/metrics.hpp"
#include "courtsim/prompt_templates.hpp"

namespace courtsim {

/// Self-contained run record: everything needed to re-render the metric block
/// without any other artifact. Timestamps and call latencies live only in the
/// timing section of the serialized form.
struct SimulationReport {
    std::string case_id;
    std::vector<std::string> keywords;             // case echo, original casing
    std::vector<std::string> keywords_normalized;
    SimulationConfig config;
    Verdict verdict;
    DeliberationTranscript transcript;
    MetricsSummary metrics;
    std::vector<CallRecord> call_log;
    std::string started_at;   // ISO 8601 UTC
    std::string finished_at;
};

class RunAborted : public std::runtime_error {
public:
    RunAborted(std::string phase, const std::string& cause, DeliberationTranscript partial)
        : std::runtime_error("run aborted during " + phase + ": " + cause),
          phase_(std::move(phase)), cause_(cause), partial_(std::move(partial)) {}

    const std::string& phase() const { return phase_; }
    const std::string& cause() const { return cause_; }
    const DeliberationTranscript& partial_transcript() const { return partial_; }

private:
    std::string phase_;
    std::string cause_;
    DeliberationTranscript partial_;
};

/// Drive the full lifecycle: judge instructions, both counsel arguments
/// (round 0, in that order), then deliberation rounds with a consensus check
/// after each, stopping at the first consensus or declaring a hung panel
/// after max_rounds. Throws RunAborted (with the partial transcript) on an
/// unrecoverable gateway or knowledge-base failure.
SimulationReport run_simulation(const SimulationConfig& config, const CaseFile& c,
                                const VectorStore* kb, LlmGateway& gateway,
                                const PromptTemplateSet& templates);

// --- report serialization -------------------------------------------------

std::string report_to_json(const SimulationReport& report);
SimulationReport report_from_json(const std::string& json_text);

/// Transcript alone, in the same statement schema the report uses (used for
/// partial transcripts of aborted runs).
std::string transcript_to_json(const DeliberationTranscript& transcript);

/// Human-readable rendering with a metric block holding the nine standard
/// row labels.
std::string render_report_markdown(const SimulationReport& report);

/// Structural schema check on a serialized report; returns one message per
/// problem, empty when the document is a valid report.
std::vector<std::string> validate_report_json(const std::string& json_text);

struct ReportPaths {
    std::filesystem::path json_path;
    std::filesystem::path markdown_path;
};

/// Write {case_id}_{run_index}_{timestamp}.report.{json,md} under out_dir.
ReportPaths write_report_files(const SimulationReport& report,
                               const std::filesystem::path& out_dir, int run_index);

}  // namespace courtsim
