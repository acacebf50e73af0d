#include "courtsim/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "courtsim/case_model.hpp"
#include "courtsim/knowledge_base.hpp"
#include "courtsim/orchestrator.hpp"
#include "util.hpp"

namespace courtsim::cli {

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitRunFailure = 1;
constexpr int kExitUsage = 2;

std::string env_or(const char* name, const std::string& fallback = "") {
    const char* v = std::getenv(name);
    return v != nullptr ? std::string(v) : fallback;
}

std::string fixed2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

// Flag values as given on the command line; unset means "fall through to
// config file, then environment, then defaults".
struct SubFlags {
    std::optional<std::string> case_path;
    std::optional<std::string> store;
    std::optional<std::string> config_file;
    std::optional<std::string> out_dir;
    std::optional<std::string> backend;
    std::optional<std::string> mock_script;
    std::optional<std::string> templates;
    std::optional<std::string> base_url;
    std::optional<std::string> api_key;
    std::optional<std::string> model;
    std::optional<std::string> threshold_rule;
    std::optional<int> adjudicators;
    std::optional<int> max_rounds;
    std::optional<int> max_tokens;
    std::optional<int> seed;
    std::optional<int> runs;
    std::optional<int> jobs;
    std::optional<double> threshold;
    std::optional<double> temperature;
    std::optional<std::size_t> k;
    std::optional<bool> rag_judge;
    std::optional<bool> rag_counsel;
    std::optional<bool> sequential_same_round;
};

// Same knobs sourced from the JSON config file.
struct FileOverlay {
    std::optional<std::string> backend, mock_script, templates, base_url, api_key,
        embed_model, model, threshold_rule, out_dir;
    std::optional<int> adjudicators, max_rounds, max_tokens, seed, retry_attempts,
        retry_backoff_ms, jobs;
    std::optional<double> threshold, temperature;
    std::optional<std::size_t> k;
    std::optional<bool> rag_judge, rag_counsel, sequential_same_round;
};

FileOverlay load_config_file(const std::string& path) {
    FileOverlay o;
    json doc = json::parse(util::read_text_file(path));
    if (!doc.is_object()) throw std::runtime_error("config file must be a JSON object");

    auto get_str = [&](const char* key, std::optional<std::string>& out) {
        if (doc.contains(key)) out = doc.at(key).get<std::string>();
    };
    auto get_int = [&](const char* key, std::optional<int>& out) {
        if (doc.contains(key)) out = doc.at(key).get<int>();
    };
    auto get_double = [&](const char* key, std::optional<double>& out) {
        if (doc.contains(key)) out = doc.at(key).get<double>();
    };
    auto get_bool = [&](const char* key, std::optional<bool>& out) {
        if (doc.contains(key)) out = doc.at(key).get<bool>();
    };

    get_str("backend", o.backend);
    get_str("mock_script", o.mock_script);
    get_str("templates", o.templates);
    get_str("base_url", o.base_url);
    get_str("api_key", o.api_key);
    get_str("embed_model", o.embed_model);
    get_str("model", o.model);
    get_str("threshold_rule", o.threshold_rule);
    get_str("out_dir", o.out_dir);
    get_int("adjudicators", o.adjudicators);
    get_int("max_rounds", o.max_rounds);
    get_int("max_tokens", o.max_tokens);
    get_int("seed", o.seed);
    get_int("retry_attempts", o.retry_attempts);
    get_int("retry_backoff_ms", o.retry_backoff_ms);
    get_int("jobs", o.jobs);
    get_double("threshold", o.threshold);
    get_double("temperature", o.temperature);
    get_bool("rag_judge", o.rag_judge);
    get_bool("rag_counsel", o.rag_counsel);
    get_bool("sequential_same_round", o.sequential_same_round);
    if (doc.contains("k")) o.k = doc.at("k").get<std::size_t>();
    return o;
}

/// Fully resolved options for one command invocation.
struct Effective {
    SimulationConfig sim;
    std::string case_path;
    std::string store;
    std::string out_dir = "runs";
    std::string mock_script;
    std::string templates_dir;
    std::string base_url;
    std::string api_key;
    std::string embed_model;
    RetryPolicy retry;
    int runs = 0;
    int jobs = 1;
};

template <typename T>
T pick(const std::optional<T>& flag, const std::optional<T>& file, T fallback) {
    if (flag) return *flag;
    if (file) return *file;
    return fallback;
}

Effective resolve_options(const SubFlags& flags) {
    FileOverlay file;
    if (flags.config_file) file = load_config_file(*flags.config_file);

    Effective e;
    e.case_path = pick(flags.case_path, std::optional<std::string>{}, std::string{});
    e.store = pick(flags.store, std::optional<std::string>{}, std::string{});
    e.out_dir = pick(flags.out_dir, file.out_dir, std::string("runs"));
    e.mock_script = pick(flags.mock_script, file.mock_script, std::string{});
    e.templates_dir = pick(flags.templates, file.templates, std::string{});
    e.base_url = pick(flags.base_url, file.base_url, env_or("LLM_BASE_URL"));
    e.api_key = pick(flags.api_key, file.api_key, env_or("LLM_API_KEY"));
    e.embed_model = pick(std::optional<std::string>{}, file.embed_model,
                         env_or("EMBED_MODEL_ID"));

    e.sim.backend = pick(flags.backend, file.backend, std::string("mock"));
    e.sim.model_id = pick(flags.model, file.model,
                          std::string(e.sim.backend == "mock" ? "mock-model" : "default-model"));
    e.sim.num_adjudicators = pick(flags.adjudicators, file.adjudicators, 5);
    e.sim.consensus_threshold = pick(flags.threshold, file.threshold, 0.80);
    std::string rule = pick(flags.threshold_rule, file.threshold_rule,
                            std::string("greater_or_equal"));
    auto parsed_rule = threshold_rule_from_string(rule);
    if (!parsed_rule) throw std::runtime_error("unknown threshold rule: " + rule);
    e.sim.threshold_rule = *parsed_rule;
    e.sim.max_rounds = pick(flags.max_rounds, file.max_rounds, 5);
    e.sim.max_tokens = pick(flags.max_tokens, file.max_tokens, 1024);
    e.sim.temperature = pick(flags.temperature, file.temperature, 0.2);
    e.sim.retrieval_k = pick(flags.k, file.k, std::size_t{5});
    e.sim.rag_judge = pick(flags.rag_judge, file.rag_judge, false);
    e.sim.rag_counsel = pick(flags.rag_counsel, file.rag_counsel, false);
    e.sim.sequential_same_round =
        pick(flags.sequential_same_round, file.sequential_same_round, false);
    if (flags.seed) e.sim.seed = *flags.seed;
    else if (file.seed) e.sim.seed = *file.seed;

    if (file.retry_attempts) e.retry.max_attempts = *file.retry_attempts;
    if (file.retry_backoff_ms) e.retry.initial_backoff_ms = *file.retry_backoff_ms;

    e.runs = pick(flags.runs, std::optional<int>{}, 0);
    e.jobs = pick(flags.jobs, file.jobs, 1);
    return e;
}

void add_backend_flags(CLI::App* sub, SubFlags& f) {
    sub->add_option("--config", f.config_file, "JSON config file (flags override it)");
    sub->add_option("--backend", f.backend, "LLM backend: mock or http")
        ->check(CLI::IsMember({"mock", "http"}));
    sub->add_option("--mock-script", f.mock_script, "scripted responses for the mock backend");
    sub->add_option("--base-url", f.base_url,
                    "OpenAI-compatible endpoint (default: $LLM_BASE_URL)");
    sub->add_option("--model", f.model, "model identifier sent to the backend");
}

void add_sim_flags(CLI::App* sub, SubFlags& f) {
    sub->add_option("--case", f.case_path, "case file (JSON)")->required();
    sub->add_option("--store", f.store, "vector store directory");
    sub->add_option("--adjudicators", f.adjudicators, "panel size (default 5)");
    sub->add_option("--threshold", f.threshold, "consensus threshold in (0,1] (default 0.80)");
    sub->add_option("--threshold-rule", f.threshold_rule,
                    "greater or greater_or_equal (default greater_or_equal)")
        ->check(CLI::IsMember({"greater", "greater_or_equal"}));
    sub->add_option("--max-rounds", f.max_rounds, "deliberation round limit (default 5)");
    sub->add_flag_callback("--rag-judge", [&f] { f.rag_judge = true; },
                           "retrieve context for the judge");
    sub->add_flag_callback("--no-rag-judge", [&f] { f.rag_judge = false; },
                           "disable judge retrieval");
    sub->add_flag_callback("--rag-counsel", [&f] { f.rag_counsel = true; },
                           "retrieve context for both counsels");
    sub->add_flag_callback("--no-rag-counsel", [&f] { f.rag_counsel = false; },
                           "disable counsel retrieval");
    sub->add_flag_callback("--sequential-same-round",
                           [&f] { f.sequential_same_round = true; },
                           "adjudicators also see earlier statements of the current round");
    sub->add_option("--temperature", f.temperature, "sampling temperature (default 0.2)");
    sub->add_option("--max-tokens", f.max_tokens, "completion token cap (default 1024)");
    sub->add_option("--k", f.k, "retrieved chunks per RAG call (default 5)");
    sub->add_option("--seed", f.seed, "sampling seed passed to the backend");
    sub->add_option("--templates", f.templates, "prompt template directory");
    sub->add_option("--out-dir", f.out_dir, "output directory (default runs)");
    add_backend_flags(sub, f);
}

std::unique_ptr<Backend> make_backend(const Effective& e) {
    if (e.sim.backend == "mock") {
        if (e.mock_script.empty()) {
            throw std::runtime_error("mock backend requires --mock-script");
        }
        return MockBackend::from_file(e.mock_script);
    }
    if (e.sim.backend == "http") {
        if (e.base_url.empty()) {
            throw std::runtime_error("http backend requires --base-url or $LLM_BASE_URL");
        }
        return std::make_unique<HttpBackend>(e.base_url, e.api_key);
    }
    throw std::runtime_error("unknown backend: " + e.sim.backend);
}

PromptTemplateSet load_templates(const Effective& e) {
    if (e.templates_dir.empty()) return PromptTemplateSet::builtin();
    return PromptTemplateSet::load_dir(e.templates_dir);
}

// Shared setup for run/replicate: case, optional store, templates.
struct RunContext {
    CaseFile case_file;
    std::optional<VectorStore> store;
    PromptTemplateSet templates;
};

RunContext prepare_run(const Effective& e) {
    RunContext ctx{CaseFile{}, std::nullopt, PromptTemplateSet::builtin()};

    std::vector<std::string> warnings;
    ctx.case_file = load_case(e.case_path, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";

    if ((e.sim.rag_judge || e.sim.rag_counsel) && e.store.empty()) {
        throw std::runtime_error("RAG flags set but no --store given");
    }
    if (!e.store.empty()) ctx.store = load_store(e.store);
    ctx.templates = load_templates(e);
    return ctx;
}

void write_partial_transcript(const Effective& e, const std::string& case_id,
                              const RunAborted& aborted) {
    std::filesystem::create_directories(e.out_dir);
    json j;
    j["case_id"] = case_id;
    j["phase"] = aborted.phase();
    j["cause"] = aborted.cause();
    j["transcript"] = json::parse(transcript_to_json(aborted.partial_transcript()));
    auto path = std::filesystem::path(e.out_dir) /
                (case_id + "_partial_" + util::now_file_timestamp_utc() + ".json");
    util::write_text_file(path, j.dump(2) + "\n");
    std::cerr << "partial transcript saved to " << path.string() << "\n";
}

int cmd_ingest(const std::string& corpus_dir, const std::string& store_dir,
               std::size_t chunk_size, std::size_t overlap, const std::string& embedder_kind,
               std::size_t dim, bool force, const Effective& e) {
    namespace fs = std::filesystem;

    if (!fs::is_directory(corpus_dir)) {
        std::cerr << "error: corpus directory not found: " << corpus_dir << "\n";
        return kExitUsage;
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(corpus_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        std::cerr << "error: no .txt files in " << corpus_dir << "\n";
        return kExitUsage;
    }
    if (fs::exists(fs::path(store_dir) / "manifest.json") && !force) {
        std::cerr << "error: store already exists at " << store_dir
                  << " (use --force to overwrite)\n";
        return kExitUsage;
    }

    std::vector<std::pair<std::string, std::string>> documents;
    for (const auto& f : files) {
        documents.emplace_back(f.stem().string(), util::read_text_file(f));
    }

    try {
        std::unique_ptr<LlmGateway> gateway;
        std::unique_ptr<Embedder> embedder;
        if (embedder_kind == "hash") {
            embedder = std::make_unique<HashingEmbedder>(dim);
        } else if (embedder_kind == "http") {
            if (e.base_url.empty() || e.embed_model.empty()) {
                std::cerr << "error: http embedder requires $LLM_BASE_URL and $EMBED_MODEL_ID\n";
                return kExitUsage;
            }
            gateway = std::make_unique<LlmGateway>(
                std::make_unique<HttpBackend>(e.base_url, e.api_key), e.retry);
            std::size_t remote_dim =
                gateway->embed("dimension probe", e.embed_model).dimension();
            embedder = std::make_unique<GatewayEmbedder>(*gateway, e.embed_model, remote_dim);
        } else {
            std::cerr << "error: unknown embedder kind: " << embedder_kind << "\n";
            return kExitUsage;
        }

        VectorStore store = build_store(documents, chunk_size, overlap, *embedder);
        persist_store(store, store_dir);

        for (const auto& source : store.manifest().sources) {
            std::size_t count = 0;
            for (const auto& c : store.chunks()) {
                if (c.source_document == source) ++count;
            }
            std::cout << source << ": " << count << " chunks\n";
        }
        std::cout << "store written to " << store_dir << " (" << store.size() << " chunks, d="
                  << store.manifest().dimension << ")\n";
        return kExitOk;
    } catch (const std::exception& ex) {
        std::cerr << "error: ingestion failed: " << ex.what() << "\n";
        return kExitUsage;
    }
}

int cmd_run(const Effective& e) {
    RunContext ctx;
    try {
        ctx = prepare_run(e);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitUsage;
    }

    try {
        LlmGateway gateway(make_backend(e), e.retry);
        SimulationReport report =
            run_simulation(e.sim, ctx.case_file, ctx.store ? &*ctx.store : nullptr, gateway,
                           ctx.templates);
        ReportPaths paths = write_report_files(report, e.out_dir, 1);
        std::cout << "verdict: " << to_string(report.verdict.outcome)
                  << " (rounds=" << report.verdict.rounds_used
                  << ", agreement=" << fixed2(report.verdict.final_agreement_ratio) << ")\n";
        std::cout << "report: " << paths.json_path.string() << "\n";
        return kExitOk;
    } catch (const RunAborted& aborted) {
        std::cerr << "error: " << aborted.what() << "\n";
        write_partial_transcript(e, ctx.case_file.case_id, aborted);
        return kExitRunFailure;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitUsage;
    }
}

struct RunOutcome {
    std::string label = "Aborted";
    std::optional<SimulationReport> report;
};

RunOutcome one_replicate_run(const Effective& e, const RunContext& ctx, LlmGateway& gateway,
                             int run_index) {
    RunOutcome outcome;
    try {
        SimulationReport report =
            run_simulation(e.sim, ctx.case_file, ctx.store ? &*ctx.store : nullptr, gateway,
                           ctx.templates);
        write_report_files(report, e.out_dir, run_index);
        outcome.label = to_string(report.verdict.outcome);
        outcome.report = std::move(report);
    } catch (const RunAborted& aborted) {
        std::cerr << "run " << run_index << " aborted: " << aborted.what() << "\n";
    }
    return outcome;
}

int cmd_replicate(const Effective& e) {
    if (e.runs < 2) {
        std::cerr << "error: replicate requires --runs >= 2\n";
        return kExitUsage;
    }

    RunContext ctx;
    try {
        ctx = prepare_run(e);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitUsage;
    }

    std::vector<RunOutcome> outcomes(static_cast<std::size_t>(e.runs));
    try {
        if (e.jobs <= 1) {
            // One backend across the whole replication: scripted response
            // sequences advance from run to run.
            LlmGateway gateway(make_backend(e), e.retry);
            for (int i = 0; i < e.runs; ++i) {
                outcomes[static_cast<std::size_t>(i)] =
                    one_replicate_run(e, ctx, gateway, i + 1);
            }
        } else {
            std::atomic<int> next{0};
            std::vector<std::thread> workers;
            int worker_count = std::min(e.jobs, e.runs);
            for (int w = 0; w < worker_count; ++w) {
                workers.emplace_back([&] {
                    for (;;) {
                        int i = next.fetch_add(1);
                        if (i >= e.runs) return;
                        LlmGateway gateway(make_backend(e), e.retry);
                        outcomes[static_cast<std::size_t>(i)] =
                            one_replicate_run(e, ctx, gateway, i + 1);
                    }
                });
            }
            for (auto& t : workers) t.join();
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitUsage;
    }

    std::vector<std::string> labels;
    labels.reserve(outcomes.size());
    std::size_t completed = 0;
    for (const auto& o : outcomes) {
        labels.push_back(o.label);
        if (o.report) ++completed;
    }
    ConsistencySummary summary = consistency(labels);

    json dist = json::object();
    for (const auto& [label, count] : summary.verdict_distribution) dist[label] = count;
    json j;
    j["case_id"] = ctx.case_file.case_id;
    j["runs"] = summary.runs;
    j["verdict_distribution"] = dist;
    j["consistency_rate"] = summary.consistency_rate;
    j["label"] = summary.label;
    std::filesystem::create_directories(e.out_dir);
    util::write_text_file(std::filesystem::path(e.out_dir) / "consistency.json",
                          j.dump(2) + "\n");

    std::cout << "consistency: rate=" << fixed2(summary.consistency_rate)
              << " label=" << summary.label << " runs=" << summary.runs << "\n";
    return completed > 0 ? kExitOk : kExitRunFailure;
}

struct AblationCell {
    std::string model;
    bool rag_judge = false;
    bool rag_counsel = false;
    double agreement = 0.0;
    double ground_score = 0.0;
    double avg_statements = 0.0;
    double consistency_rate = 0.0;
    std::string consistency_label;
    std::string error;  // non-empty marks the whole cell failed
};

std::string sanitize_for_path(const std::string& s) {
    std::string out = s;
    for (char& c : out) {
        if (c == '/' || c == '\\' || c == ':' || c == ' ') c = '_';
    }
    return out;
}

AblationCell run_ablation_cell(const Effective& base, const RunContext& ctx,
                               const std::string& model, bool rag_judge, bool rag_counsel,
                               int runs_per_cell, const std::string& scripts_dir) {
    AblationCell cell;
    cell.model = model;
    cell.rag_judge = rag_judge;
    cell.rag_counsel = rag_counsel;

    Effective e = base;
    e.sim.model_id = model;
    e.sim.rag_judge = rag_judge;
    e.sim.rag_counsel = rag_counsel;
    std::string variant = (rag_judge || rag_counsel) ? "rag" : "norag";
    e.out_dir = (std::filesystem::path(base.out_dir) /
                 (sanitize_for_path(model) + "_" + variant)).string();
    if (e.sim.backend == "mock" && !scripts_dir.empty()) {
        e.mock_script = (std::filesystem::path(scripts_dir) / sanitize_for_path(model) /
                         (variant + ".json")).string();
    }

    try {
        if ((rag_judge || rag_counsel) && !ctx.store) {
            throw std::runtime_error("cell has RAG enabled but no store was given");
        }
        LlmGateway gateway(make_backend(e), e.retry);

        std::vector<std::string> labels;
        double agreement_sum = 0.0;
        double grounding_sum = 0.0;
        double statements_sum = 0.0;
        std::size_t completed = 0;
        for (int i = 0; i < runs_per_cell; ++i) {
            RunOutcome outcome = one_replicate_run(e, ctx, gateway, i + 1);
            labels.push_back(outcome.label);
            if (outcome.report) {
                ++completed;
                agreement_sum += outcome.report->verdict.final_agreement_ratio;
                grounding_sum += outcome.report->metrics.avg_grounding_score;
                statements_sum += outcome.report->metrics.avg_meaningful_per_adjudicator;
            }
        }
        if (completed == 0) {
            cell.error = "all runs aborted";
            return cell;
        }
        ConsistencySummary summary = consistency(labels);
        cell.agreement = agreement_sum / static_cast<double>(completed);
        cell.ground_score = grounding_sum / static_cast<double>(completed);
        cell.avg_statements = statements_sum / static_cast<double>(completed);
        cell.consistency_rate = summary.consistency_rate;
        cell.consistency_label = summary.label;
    } catch (const std::exception& ex) {
        cell.error = ex.what();
    }
    return cell;
}

std::string render_ablation_markdown(const std::vector<AblationCell>& cells) {
    std::string md;
    md += "| Model | RAG (Judge) | RAG (Counsel) | Agreement | Ground Score | Avg. Stmts. | "
          "Consistency |\n";
    md += "| --- | --- | --- | --- | --- | --- | --- |\n";
    for (const auto& cell : cells) {
        md += "| " + cell.model + " | " + (cell.rag_judge ? "Yes" : "No") + " | " +
              (cell.rag_counsel ? "Yes" : "No") + " | ";
        if (!cell.error.empty()) {
            md += "ERROR | ERROR | ERROR | ERROR |\n";
        } else {
            md += fixed2(cell.agreement) + " | " + fixed2(cell.ground_score) + " | " +
                  fixed2(cell.avg_statements) + " | " + cell.consistency_label + " |\n";
        }
    }
    return md;
}

int cmd_ablate(const Effective& base, const std::string& models_csv,
               const std::string& rag_pairs_csv, int runs_per_cell,
               const std::string& scripts_dir) {
    auto split_csv = [](const std::string& csv) {
        std::vector<std::string> out;
        std::size_t pos = 0;
        while (pos <= csv.size()) {
            std::size_t comma = csv.find(',', pos);
            if (comma == std::string::npos) comma = csv.size();
            std::string item = util::trim(csv.substr(pos, comma - pos));
            if (!item.empty()) out.push_back(item);
            pos = comma + 1;
        }
        return out;
    };

    std::vector<std::string> models = split_csv(models_csv);
    if (models.empty()) {
        std::cerr << "error: ablate requires at least one model (--models)\n";
        return kExitUsage;
    }
    if (runs_per_cell < 1) {
        std::cerr << "error: --runs must be >= 1\n";
        return kExitUsage;
    }

    auto parse_flag = [](const std::string& s) -> std::optional<bool> {
        if (s == "on" || s == "yes" || s == "true") return true;
        if (s == "off" || s == "no" || s == "false") return false;
        return std::nullopt;
    };
    std::vector<std::pair<bool, bool>> pairs;
    for (const auto& token : split_csv(rag_pairs_csv)) {
        std::size_t colon = token.find(':');
        if (colon == std::string::npos) {
            std::cerr << "error: bad --rag-pairs token (want judge:counsel): " << token << "\n";
            return kExitUsage;
        }
        auto judge = parse_flag(util::trim(token.substr(0, colon)));
        auto counsel = parse_flag(util::trim(token.substr(colon + 1)));
        if (!judge || !counsel) {
            std::cerr << "error: bad --rag-pairs token (want on/off): " << token << "\n";
            return kExitUsage;
        }
        pairs.emplace_back(*judge, *counsel);
    }
    if (pairs.empty()) {
        std::cerr << "error: ablate requires at least one RAG pair\n";
        return kExitUsage;
    }

    bool any_rag = false;
    for (const auto& [j, c] : pairs) any_rag = any_rag || j || c;

    Effective e = base;
    e.sim.rag_judge = false;
    e.sim.rag_counsel = false;
    if (any_rag && e.store.empty()) {
        std::cerr << "error: RAG cells requested but no --store given\n";
        return kExitUsage;
    }

    RunContext ctx;
    try {
        // Store must load even for cells that end up RAG-off; the RAG cells
        // check it per cell.
        std::vector<std::string> warnings;
        ctx.case_file = load_case(e.case_path, &warnings);
        for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
        if (!e.store.empty()) ctx.store = load_store(e.store);
        ctx.templates = load_templates(e);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitUsage;
    }

    struct CellSpec {
        std::string model;
        bool rag_judge;
        bool rag_counsel;
    };
    std::vector<CellSpec> specs;
    for (const auto& model : models) {
        for (const auto& [j, c] : pairs) specs.push_back({model, j, c});
    }

    std::vector<AblationCell> cells(specs.size());
    int worker_count = std::max(1, std::min(e.jobs, static_cast<int>(specs.size())));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (int w = 0; w < worker_count; ++w) {
        workers.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= specs.size()) return;
                cells[i] = run_ablation_cell(e, ctx, specs[i].model, specs[i].rag_judge,
                                             specs[i].rag_counsel, runs_per_cell, scripts_dir);
            }
        });
    }
    for (auto& t : workers) t.join();

    std::string table = render_ablation_markdown(cells);
    std::cout << table;

    json cells_json = json::array();
    std::size_t succeeded = 0;
    for (const auto& cell : cells) {
        json c;
        c["model"] = cell.model;
        c["rag_judge"] = cell.rag_judge;
        c["rag_counsel"] = cell.rag_counsel;
        if (cell.error.empty()) {
            ++succeeded;
            c["agreement"] = cell.agreement;
            c["ground_score"] = cell.ground_score;
            c["avg_statements"] = cell.avg_statements;
            c["consistency_rate"] = cell.consistency_rate;
            c["consistency_label"] = cell.consistency_label;
            c["error"] = nullptr;
        } else {
            c["error"] = cell.error;
        }
        cells_json.push_back(std::move(c));
    }
    json out;
    out["case_id"] = ctx.case_file.case_id;
    out["runs_per_cell"] = runs_per_cell;
    out["cells"] = std::move(cells_json);

    std::filesystem::create_directories(base.out_dir);
    util::write_text_file(std::filesystem::path(base.out_dir) / "ablation.md", table);
    util::write_text_file(std::filesystem::path(base.out_dir) / "ablation.json",
                          out.dump(2) + "\n");

    if (succeeded == 0) {
        std::cerr << "error: every ablation cell failed\n";
        return kExitRunFailure;
    }
    return kExitOk;
}

int cmd_report(const std::string& json_path, const std::string& out_path) {
    std::string text;
    try {
        text = util::read_text_file(json_path);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitUsage;
    }
    std::vector<std::string> problems = validate_report_json(text);
    if (!problems.empty()) {
        for (const auto& p : problems) std::cerr << "error: " << p << "\n";
        return kExitUsage;
    }
    std::string md = render_report_markdown(report_from_json(text));
    if (out_path.empty()) {
        std::cout << md;
    } else {
        util::write_text_file(out_path, md);
        std::cout << "wrote " << out_path << "\n";
    }
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"courtsim — multi-agent judicial deliberation simulator"};
    app.require_subcommand(1);

    int rc = kExitOk;

    // ingest
    auto* ingest = app.add_subcommand("ingest", "chunk + embed a corpus into a vector store");
    SubFlags ingest_flags;
    std::string corpus_dir;
    std::string ingest_store;
    std::size_t chunk_size = 1000;
    std::size_t overlap = 150;
    std::string embedder_kind = "hash";
    std::size_t dim = 256;
    bool force = false;
    ingest->add_option("corpus", corpus_dir, "directory of UTF-8 .txt files")->required();
    ingest->add_option("--store", ingest_store, "output store directory")->required();
    ingest->add_option("--chunk-size", chunk_size, "chunk size in characters (default 1000)");
    ingest->add_option("--overlap", overlap, "chunk overlap in characters (default 150)");
    ingest->add_option("--embedder", embedder_kind, "hash (offline) or http (remote)")
        ->check(CLI::IsMember({"hash", "http"}));
    ingest->add_option("--dim", dim, "hash embedder dimension (default 256)");
    ingest->add_flag("--force", force, "overwrite an existing store");
    ingest->add_option("--config", ingest_flags.config_file, "JSON config file");
    ingest->add_option("--base-url", ingest_flags.base_url, "embedding endpoint for --embedder http");
    ingest->callback([&] {
        Effective e = resolve_options(ingest_flags);
        rc = cmd_ingest(corpus_dir, ingest_store, chunk_size, overlap, embedder_kind, dim,
                        force, e);
    });

    // run
    auto* run = app.add_subcommand("run", "run one simulation and write report.json/.md");
    SubFlags run_flags;
    add_sim_flags(run, run_flags);
    run->callback([&] {
        Effective e = resolve_options(run_flags);
        e.case_path = run_flags.case_path.value_or("");
        e.store = run_flags.store.value_or("");
        rc = cmd_run(e);
    });

    // replicate
    auto* replicate = app.add_subcommand("replicate", "run the same case N times and report verdict consistency");
    SubFlags replicate_flags;
    add_sim_flags(replicate, replicate_flags);
    replicate->add_option("--runs", replicate_flags.runs, "number of runs (>= 2)")->required();
    replicate->add_option("--jobs", replicate_flags.jobs, "parallel runs (default 1, sequential)");
    replicate->callback([&] {
        Effective e = resolve_options(replicate_flags);
        e.case_path = replicate_flags.case_path.value_or("");
        e.store = replicate_flags.store.value_or("");
        rc = cmd_replicate(e);
    });

    // ablate
    auto* ablate = app.add_subcommand("ablate", "run a model x RAG ablation matrix");
    SubFlags ablate_flags;
    std::string models_csv;
    std::string rag_pairs_csv = "on:on,off:off";
    std::string scripts_dir;
    int runs_per_cell = 1;
    ablate->add_option("--case", ablate_flags.case_path, "case file (JSON)")->required();
    ablate->add_option("--store", ablate_flags.store, "vector store directory (for RAG cells)");
    ablate->add_option("--models", models_csv, "comma-separated model ids")->required();
    ablate->add_option("--rag-pairs", rag_pairs_csv,
                       "comma-separated judge:counsel pairs (default on:on,off:off)");
    ablate->add_option("--runs", runs_per_cell, "runs per cell (default 1)");
    ablate->add_option("--scripts-dir", scripts_dir,
                       "mock scripts at {dir}/{model}/{rag|norag}.json");
    ablate->add_option("--jobs", ablate_flags.jobs, "parallel cells (default 1)");
    ablate->add_option("--adjudicators", ablate_flags.adjudicators, "panel size");
    ablate->add_option("--threshold", ablate_flags.threshold, "consensus threshold");
    ablate->add_option("--threshold-rule", ablate_flags.threshold_rule, "consensus rule")
        ->check(CLI::IsMember({"greater", "greater_or_equal"}));
    ablate->add_option("--max-rounds", ablate_flags.max_rounds, "deliberation round limit");
    ablate->add_option("--temperature", ablate_flags.temperature, "sampling temperature");
    ablate->add_option("--max-tokens", ablate_flags.max_tokens, "completion token cap");
    ablate->add_option("--k", ablate_flags.k, "retrieved chunks per RAG call");
    ablate->add_option("--seed", ablate_flags.seed, "sampling seed");
    ablate->add_option("--templates", ablate_flags.templates, "prompt template directory");
    ablate->add_option("--out-dir", ablate_flags.out_dir, "output directory");
    add_backend_flags(ablate, ablate_flags);
    ablate->callback([&] {
        Effective e = resolve_options(ablate_flags);
        e.case_path = ablate_flags.case_path.value_or("");
        e.store = ablate_flags.store.value_or("");
        rc = cmd_ablate(e, models_csv, rag_pairs_csv, runs_per_cell, scripts_dir);
    });

    // report
    auto* report = app.add_subcommand("report", "re-render markdown from a report.json");
    std::string report_json_path;
    std::string report_out;
    report->add_option("json", report_json_path, "report.json file")->required();
    report->add_option("--out", report_out, "markdown output path (default stdout)");
    report->callback([&] { rc = cmd_report(report_json_path, report_out); });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int cli_rc = app.exit(e);
        return cli_rc == 0 ? kExitOk : kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return rc;
}

int run_cli(int argc, const char* const* argv) {
    std::vector<std::string> args;
    args.reserve(argc > 0 ? static_cast<std::size_t>(argc - 1) : 0);
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args);
}

}  // namespace courtsim::cli
