#include "factprobe/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "factprobe/analysis.hpp"
#include "factprobe/corpus.hpp"
#include "factprobe/embedding.hpp"
#include "factprobe/errors.hpp"
#include "factprobe/io.hpp"
#include "factprobe/logging.hpp"
#include "factprobe/scorer.hpp"
#include "factprobe/util.hpp"

namespace fs = std::filesystem;

namespace factprobe::cli {

namespace {

std::string resolve_path(const std::string& base_dir, const std::string& path) {
    if (path.empty()) return path;
    fs::path p(path);
    if (p.is_absolute()) return path;
    return (fs::path(base_dir) / p).lexically_normal().string();
}

void require_exists(const std::string& path, const std::string& what) {
    if (!io::file_exists(path)) {
        throw SchemaViolationError("config: " + what + " '" + path + "' does not exist");
    }
}

std::vector<std::string> string_list(const nlohmann::json& node, const std::string& key) {
    std::vector<std::string> out;
    if (!node.contains(key)) return out;
    if (!node[key].is_array()) {
        throw SchemaViolationError("config: '" + key + "' must be an array of strings");
    }
    for (const nlohmann::json& entry : node[key]) {
        if (!entry.is_string()) {
            throw SchemaViolationError("config: '" + key + "' must be an array of strings");
        }
        out.push_back(entry.get<std::string>());
    }
    return out;
}

} // namespace

RunConfig load_run_config(const std::string& path) {
    require_exists(path, "run configuration");
    nlohmann::json doc = nlohmann::json::parse(io::read_file(path), nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw SchemaViolationError("config '" + path + "' is not a JSON object");
    }
    const std::string base_dir = fs::path(path).parent_path().string();

    RunConfig config;
    if (doc.contains("corpus")) {
        const nlohmann::json& corpus_node = doc["corpus"];
        config.document_paths = string_list(corpus_node, "documents");
        config.summary_paths = string_list(corpus_node, "summaries");
        config.perturbed_paths = string_list(corpus_node, "perturbed");
        for (std::string& p : config.document_paths) p = resolve_path(base_dir, p);
        for (std::string& p : config.summary_paths) p = resolve_path(base_dir, p);
        for (std::string& p : config.perturbed_paths) p = resolve_path(base_dir, p);
    }
    if (config.document_paths.empty()) {
        throw SchemaViolationError("config: corpus.documents is required");
    }
    if (config.summary_paths.empty()) {
        throw SchemaViolationError("config: corpus.summaries is required");
    }
    for (const std::string& p : config.document_paths) require_exists(p, "document file");
    for (const std::string& p : config.summary_paths) require_exists(p, "summary file");

    if (doc.contains("embedding")) {
        const nlohmann::json& node = doc["embedding"];
        config.embedding.provider = node.value("provider", config.embedding.provider);
        config.embedding.model_id = node.value("model_id", config.embedding.model_id);
        config.embedding.dimension = node.value("dimension", config.embedding.dimension);
        config.embedding.endpoint = node.value("endpoint", config.embedding.endpoint);
        config.embedding.api_key_env = node.value("api_key_env", config.embedding.api_key_env);
        config.embedding.batch_size = node.value("batch_size", config.embedding.batch_size);
    }
    config.embedding_cache_path =
        resolve_path(base_dir, doc.value("embedding_cache_path", std::string()));

    if (doc.contains("generation")) {
        const nlohmann::json& node = doc["generation"];
        config.generation.provider = node.value("provider", config.generation.provider);
        config.generation.stub_fixture =
            resolve_path(base_dir, node.value("stub_fixture", std::string()));
        config.generation.endpoint = node.value("endpoint", config.generation.endpoint);
        config.generation.api_key_env = node.value("api_key_env", config.generation.api_key_env);
        config.generation.cache_path =
            resolve_path(base_dir, node.value("cache_path", std::string()));
        config.generation.params.model_id =
            node.value("model_id", config.generation.params.model_id);
        config.generation.params.temperature =
            node.value("temperature", config.generation.params.temperature);
        config.generation.params.top_p = node.value("top_p", config.generation.params.top_p);
        config.generation.params.max_document_chars =
            node.value("max_document_chars", config.generation.params.max_document_chars);
        if (config.generation.params.temperature < 0.0) {
            throw SchemaViolationError("config: generation.temperature must be >= 0");
        }
        if (config.generation.params.top_p <= 0.0 || config.generation.params.top_p > 1.0) {
            throw SchemaViolationError("config: generation.top_p must be in (0, 1]");
        }
        if (!config.generation.stub_fixture.empty()) {
            require_exists(config.generation.stub_fixture, "stub fixture");
        }
    }

    if (doc.contains("metrics")) {
        if (!doc["metrics"].is_array()) {
            throw SchemaViolationError("config: 'metrics' must be an array");
        }
        for (const nlohmann::json& node : doc["metrics"]) {
            metrics::AdapterConfig adapter;
            if (!node.is_object() || !node.contains("name") || !node["name"].is_string()) {
                throw SchemaViolationError("config: each metric needs a string 'name'");
            }
            adapter.name = node["name"].get<std::string>();
            if (node.contains("evidence_mode")) {
                adapter.evidence_mode =
                    metrics::evidence_mode_from_string(node["evidence_mode"].get<std::string>());
            }
            adapter.endpoint = node.value("endpoint", std::string());
            adapter.fixture_path = resolve_path(base_dir, node.value("fixture_path", std::string()));
            adapter.api_key_env = node.value("api_key_env", std::string());
            adapter.timeout_s = node.value("timeout_s", adapter.timeout_s);
            adapter.batch_size = node.value("batch_size", adapter.batch_size);
            adapter.max_concurrency = node.value("max_concurrency", adapter.max_concurrency);
            if (!adapter.fixture_path.empty()) require_exists(adapter.fixture_path, "fixture");
            config.metric_configs.push_back(std::move(adapter));
        }
    }
    if (config.metric_configs.empty()) {
        config.metric_configs.push_back({.name = "mock_overlap"});
    }

    if (doc.contains("retrieval")) {
        config.retrieval.top_k = doc["retrieval"].value("top_k", config.retrieval.top_k);
        config.retrieval.window = doc["retrieval"].value("window", config.retrieval.window);
    }
    if (config.retrieval.top_k == 0) {
        throw SchemaViolationError("config: retrieval.top_k must be >= 1");
    }

    if (doc.contains("analysis")) {
        config.analysis.bin_count = doc["analysis"].value("bin_count", config.analysis.bin_count);
        if (doc["analysis"].contains("w_values")) {
            config.analysis.w_values =
                doc["analysis"]["w_values"].get<std::vector<std::size_t>>();
        }
    }
    if (config.analysis.bin_count == 0) {
        throw SchemaViolationError("config: analysis.bin_count must be >= 1");
    }
    if (config.analysis.w_values.empty()) {
        throw SchemaViolationError("config: analysis.w_values must be non-empty");
    }

    config.output_dir = resolve_path(base_dir, doc.value("output_dir", config.output_dir));
    config.seed = doc.value("seed", config.seed);
    config.workers = doc.value("workers", config.workers);
    if (config.workers == 0) config.workers = 1;
    return config;
}

namespace {

// ---------------------------------------------------------------------------
// Shared construction helpers
// ---------------------------------------------------------------------------

std::string default_cache_path(const RunConfig& config, const std::string& name) {
    return config.output_dir + "/cache/" + name;
}

std::unique_ptr<embedding::CachingEmbeddingProvider> make_embedding_provider(
    const RunConfig& config) {
    std::shared_ptr<embedding::EmbeddingProvider> inner;
    if (config.embedding.provider == "mock") {
        inner = std::make_shared<embedding::MockEmbeddingProvider>(config.embedding.dimension);
    } else if (config.embedding.provider == "http") {
        embedding::HttpEmbeddingConfig http_config;
        http_config.endpoint = config.embedding.endpoint;
        http_config.model_id = config.embedding.model_id;
        http_config.dimension = config.embedding.dimension;
        http_config.api_key_env = config.embedding.api_key_env;
        http_config.batch_size = config.embedding.batch_size;
        inner = std::make_shared<embedding::HttpEmbeddingProvider>(std::move(http_config));
    } else {
        throw SchemaViolationError("config: unknown embedding provider '" +
                                   config.embedding.provider + "'");
    }
    std::string cache_path = config.embedding_cache_path.empty()
                                 ? default_cache_path(config, "embeddings.jsonl")
                                 : config.embedding_cache_path;
    return std::make_unique<embedding::CachingEmbeddingProvider>(std::move(inner), cache_path);
}

std::unique_ptr<perturb::GenerationProvider> make_generation_provider(
    const RunConfig& config, const std::string& stub_override,
    const std::string& provider_override) {
    std::string provider = provider_override.empty() ? config.generation.provider
                                                     : provider_override;
    if (!stub_override.empty()) provider = "stub";
    if (provider == "stub") {
        std::string fixture = stub_override.empty() ? config.generation.stub_fixture
                                                    : stub_override;
        if (fixture.empty()) return std::make_unique<perturb::StubGenerationProvider>();
        require_exists(fixture, "stub fixture");
        return std::make_unique<perturb::StubGenerationProvider>(fixture);
    }
    if (provider == "openai") {
        perturb::HttpGenerationConfig http_config;
        http_config.endpoint = config.generation.endpoint;
        http_config.api_key_env = config.generation.api_key_env;
        return std::make_unique<perturb::HttpGenerationProvider>(std::move(http_config));
    }
    throw SchemaViolationError("config: unknown generation provider '" + provider + "'");
}

std::vector<std::unique_ptr<metrics::MetricAdapter>> make_adapters(const RunConfig& config) {
    std::vector<std::unique_ptr<metrics::MetricAdapter>> adapters;
    for (const metrics::AdapterConfig& adapter_config : config.metric_configs) {
        adapters.push_back(metrics::builtin_registry().create(adapter_config));
    }
    return adapters;
}

std::string perturbed_output_path(const RunConfig& config) {
    return config.output_dir + "/perturbed.jsonl";
}

std::string scores_output_path(const RunConfig& config) {
    return config.output_dir + "/scores.jsonl";
}

std::string report_dir(const RunConfig& config) {
    return config.output_dir + "/report";
}

// Base corpus plus any perturbed files that already exist.
corpus::Corpus load_scoring_corpus(const RunConfig& config) {
    std::vector<std::string> summary_paths = config.summary_paths;
    for (const std::string& path : config.perturbed_paths) {
        require_exists(path, "perturbed file");
        summary_paths.push_back(path);
    }
    std::string generated = perturbed_output_path(config);
    if (io::file_exists(generated) &&
        std::find(summary_paths.begin(), summary_paths.end(), generated) ==
            summary_paths.end()) {
        summary_paths.push_back(generated);
    }
    return corpus::load_corpus_files(config.document_paths, summary_paths);
}

std::vector<perturb::Kind> parse_kinds(const std::string& kinds) {
    std::vector<perturb::Kind> out;
    if (kinds == "all" || kinds.empty()) {
        for (const perturb::PromptTemplate& tmpl : perturb::prompt_templates()) {
            out.push_back(tmpl.kind);
        }
        return out;
    }
    for (const std::string& name : util::split(kinds, ',')) {
        std::string trimmed = util::trim(name);
        if (trimmed.empty()) continue;
        corpus::SummaryVariant kind = corpus::variant_from_string(trimmed);
        if (kind == corpus::SummaryVariant::original) {
            throw SchemaViolationError("--kinds: 'original' is not a perturbation kind");
        }
        out.push_back(kind);
    }
    if (out.empty()) throw SchemaViolationError("--kinds: no kinds selected");
    return out;
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

int cmd_ingest(const RunConfig& config) {
    corpus::Corpus corpus = corpus::load_corpus_files(config.document_paths,
                                                      config.summary_paths);
    std::size_t sentence_count = 0;
    for (const auto& [id, doc] : corpus.documents) sentence_count += doc.sentences.size();
    log_event(LogLevel::info, "ingest.ok",
              {{"documents", std::to_string(corpus.documents.size())},
               {"summaries", std::to_string(corpus.summaries.size())},
               {"document_sentences", std::to_string(sentence_count)}});
    std::cout << "ingest: " << corpus.documents.size() << " documents, "
              << corpus.summaries.size() << " summaries, " << sentence_count
              << " document sentences; validation passed\n";
    return 0;
}

int cmd_perturb(const RunConfig& config, const std::string& kinds_arg,
                const std::string& stub_override, const std::string& provider_override) {
    // Provider construction first: configuration errors must fire before work.
    std::unique_ptr<perturb::GenerationProvider> provider =
        make_generation_provider(config, stub_override, provider_override);
    std::vector<perturb::Kind> kinds = parse_kinds(kinds_arg);

    corpus::Corpus corpus = corpus::load_corpus_files(config.document_paths,
                                                      config.summary_paths);
    std::string cache_path = config.generation.cache_path.empty()
                                 ? default_cache_path(config, "generations.jsonl")
                                 : config.generation.cache_path;
    perturb::GenerationCache cache(cache_path);

    std::string content;
    std::vector<perturb::PerturbError> errors;
    std::size_t record_count = 0;
    for (const auto& [id, summary] : corpus.summaries) {
        if (summary.variant != corpus::SummaryVariant::original) continue;
        const corpus::SourceDocument& doc = corpus.document(summary.doc_ref);
        for (perturb::Kind kind : kinds) {
            try {
                perturb::PerturbationResult result = perturb::generate_perturbation(
                    summary, doc, kind, *provider, config.generation.params, &cache);
                content += perturb::perturbation_to_jsonl_line(result);
                content += '\n';
                ++record_count;
            } catch (const std::exception& e) {
                errors.push_back({summary.summary_id, kind, e.what()});
            }
        }
    }
    io::write_file_if_changed(perturbed_output_path(config), content);

    log_event(LogLevel::info, "perturb.done",
              {{"records", std::to_string(record_count)},
               {"errors", std::to_string(errors.size())},
               {"provider_calls", std::to_string(provider->calls())},
               {"output", perturbed_output_path(config)}});
    for (const perturb::PerturbError& error : errors) {
        log_event(LogLevel::error, "perturb.failed",
                  {{"summary_id", error.summary_id},
                   {"kind", corpus::to_string(error.kind)},
                   {"message", error.message}});
    }
    std::cout << "perturb: wrote " << record_count << " records ("
              << provider->calls() << " provider calls, " << errors.size() << " errors)\n";
    return errors.empty() ? 0 : 1;
}

int cmd_score(const RunConfig& config, const retrieval::RetrievalConfig& retrieval_config) {
    corpus::Corpus corpus = load_scoring_corpus(config);
    std::unique_ptr<embedding::CachingEmbeddingProvider> provider =
        make_embedding_provider(config);
    std::vector<std::unique_ptr<metrics::MetricAdapter>> adapters = make_adapters(config);
    std::vector<metrics::MetricAdapter*> adapter_ptrs;
    for (const auto& adapter : adapters) adapter_ptrs.push_back(adapter.get());

    scorer::CorpusScores result = scorer::score_corpus(corpus, adapter_ptrs, retrieval_config,
                                                       *provider, config.workers);
    scorer::write_scores_jsonl(result.scores, scores_output_path(config));

    std::string ledger;
    for (const scorer::ScoreError& error : result.errors) {
        nlohmann::ordered_json entry;
        entry["summary_id"] = error.summary_id;
        entry["metric"] = error.metric_name;
        entry["message"] = error.message;
        ledger += entry.dump();
        ledger += '\n';
        log_event(LogLevel::error, "score.failed",
                  {{"summary_id", error.summary_id},
                   {"metric", error.metric_name},
                   {"message", error.message}});
    }
    io::write_file_if_changed(config.output_dir + "/score_errors.jsonl", ledger);

    embedding::CacheStats stats = provider->stats();
    log_event(LogLevel::info, "score.done",
              {{"scores", std::to_string(result.scores.size())},
               {"errors", std::to_string(result.errors.size())},
               {"cache_hits", std::to_string(stats.hits)},
               {"cache_misses", std::to_string(stats.misses)}});
    std::cout << "score: " << result.scores.size() << " summary scores, "
              << result.errors.size() << " errors -> " << scores_output_path(config) << "\n";
    return result.errors.empty() ? 0 : 1;
}

int cmd_sweep(const RunConfig& config, std::size_t top_k, const std::string& variants) {
    corpus::Corpus corpus = load_scoring_corpus(config);
    if (variants != "all") {
        std::vector<std::string> keep = util::split(variants, ',');
        corpus::Corpus filtered;
        filtered.documents = corpus.documents;
        for (const auto& [id, summary] : corpus.summaries) {
            std::string name = corpus::to_string(summary.variant);
            if (std::find(keep.begin(), keep.end(), name) != keep.end()) {
                filtered.summaries.emplace(id, summary);
            }
        }
        if (filtered.summaries.empty()) {
            throw EmptyInputError("sweep: no summaries left after variant filter '" + variants +
                                  "'");
        }
        corpus = std::move(filtered);
    }

    std::unique_ptr<embedding::CachingEmbeddingProvider> provider =
        make_embedding_provider(config);
    std::vector<std::unique_ptr<metrics::MetricAdapter>> adapters = make_adapters(config);

    std::vector<scorer::SweepCell> cells;
    std::vector<scorer::ScoreError> errors;
    for (const auto& adapter : adapters) {
        scorer::SweepResult result = scorer::window_sweep(corpus, *adapter, top_k,
                                                          config.analysis.w_values, *provider,
                                                          config.workers);
        cells.insert(cells.end(), result.cells.begin(), result.cells.end());
        errors.insert(errors.end(), result.errors.begin(), result.errors.end());
    }
    std::sort(cells.begin(), cells.end(),
              [](const scorer::SweepCell& a, const scorer::SweepCell& b) {
                  return std::tie(a.metric, a.dataset, a.window) <
                         std::tie(b.metric, b.dataset, b.window);
              });

    io::ensure_dir(report_dir(config));
    io::write_file_if_changed(report_dir(config) + "/sweep.csv", analysis::sweep_to_csv(cells));
    for (const scorer::ScoreError& error : errors) {
        log_event(LogLevel::error, "sweep.failed",
                  {{"summary_id", error.summary_id},
                   {"metric", error.metric_name},
                   {"message", error.message}});
    }
    log_event(LogLevel::info, "sweep.done",
              {{"cells", std::to_string(cells.size())},
               {"errors", std::to_string(errors.size())}});
    std::cout << "sweep: " << cells.size() << " cells -> " << report_dir(config)
              << "/sweep.csv\n";
    return errors.empty() ? 0 : 1;
}

// Claim similarities for every scored sentence, computed once per
// (summary, sentence) and shared across metrics.
std::vector<analysis::DensityGroup> compute_density_groups(
    const RunConfig& config, const corpus::Corpus& corpus,
    std::vector<scorer::SummaryScore>& scores, embedding::EmbeddingProvider& provider) {
    std::map<std::pair<std::string, std::size_t>, double> memo;
    for (scorer::SummaryScore& score : scores) {
        const corpus::SummaryRecord& summary = corpus.summary(score.summary_id);
        const corpus::SourceDocument& doc = corpus.document(summary.doc_ref);
        for (scorer::SentenceScore& sentence : score.sentence_scores) {
            if (sentence.sentence_index >= summary.sentences.size()) {
                throw SchemaViolationError("scores reference sentence " +
                                           std::to_string(sentence.sentence_index) +
                                           " beyond summary '" + score.summary_id + "'");
            }
            auto key = std::make_pair(score.summary_id, sentence.sentence_index);
            auto it = memo.find(key);
            if (it == memo.end()) {
                double similarity = analysis::claim_similarity(
                    summary.sentences[sentence.sentence_index], doc, provider);
                it = memo.emplace(key, similarity).first;
            }
            sentence.claim_similarity = it->second;
        }
    }

    std::map<std::pair<std::string, std::string>, std::vector<scorer::SentenceScore>> grouped;
    for (const scorer::SummaryScore& score : scores) {
        for (const scorer::SentenceScore& sentence : score.sentence_scores) {
            grouped[{score.dataset, score.metric_name}].push_back(sentence);
        }
    }
    std::vector<analysis::DensityGroup> groups;
    for (const auto& [key, sentences] : grouped) {
        groups.push_back({key.first, key.second,
                          analysis::bin_claims(sentences, config.analysis.bin_count)});
    }
    return groups;
}

int cmd_density(const RunConfig& config) {
    corpus::Corpus corpus = load_scoring_corpus(config);
    std::vector<scorer::SummaryScore> scores =
        scorer::load_scores_jsonl(scores_output_path(config), corpus);
    if (scores.empty()) {
        throw EmptyInputError("density: no scores in " + scores_output_path(config));
    }
    std::unique_ptr<embedding::CachingEmbeddingProvider> provider =
        make_embedding_provider(config);
    std::vector<analysis::DensityGroup> groups =
        compute_density_groups(config, corpus, scores, *provider);

    io::ensure_dir(report_dir(config));
    io::write_file_if_changed(report_dir(config) + "/density.csv",
                              analysis::density_to_csv(groups));
    std::size_t claim_count = 0;
    for (const analysis::DensityGroup& group : groups) {
        for (const analysis::DensityBin& bin : group.bins) claim_count += bin.claim_count;
    }
    log_event(LogLevel::info, "density.done",
              {{"groups", std::to_string(groups.size())},
               {"claims", std::to_string(claim_count)}});
    std::cout << "density: " << groups.size() << " (dataset, metric) groups -> "
              << report_dir(config) << "/density.csv\n";
    return 0;
}

std::vector<scorer::SweepCell> parse_sweep_csv(const std::string& path) {
    std::vector<scorer::SweepCell> cells;
    if (!io::file_exists(path)) return cells;
    std::vector<std::string> lines = util::split(io::read_file(path), '\n');
    for (std::size_t i = 1; i < lines.size(); ++i) { // skip header
        if (util::is_blank(lines[i])) continue;
        std::vector<std::string> fields = util::split(lines[i], ',');
        if (fields.size() != 4) continue;
        scorer::SweepCell cell;
        cell.metric = fields[0];
        cell.dataset = fields[1];
        cell.window = static_cast<std::size_t>(std::stoul(fields[2]));
        cell.mean_score = std::stod(fields[3]);
        cells.push_back(std::move(cell));
    }
    return cells;
}

int cmd_report(const RunConfig& config, bool plots) {
    corpus::Corpus corpus = load_scoring_corpus(config);
    std::vector<scorer::SummaryScore> scores =
        scorer::load_scores_jsonl(scores_output_path(config), corpus);

    std::vector<scorer::SummaryScore> originals;
    std::vector<scorer::SummaryScore> perturbed;
    for (scorer::SummaryScore& score : scores) {
        if (score.variant == corpus::SummaryVariant::original) {
            originals.push_back(score);
        } else {
            perturbed.push_back(score);
        }
    }

    analysis::ReportInputs inputs;
    inputs.diffs = analysis::diff_stats(originals, perturbed);
    if (!scores.empty()) {
        std::unique_ptr<embedding::CachingEmbeddingProvider> provider =
            make_embedding_provider(config);
        inputs.density = compute_density_groups(config, corpus, scores, *provider);
    }
    inputs.scores = std::move(scores);
    inputs.sweep = parse_sweep_csv(report_dir(config) + "/sweep.csv");

    analysis::ReportBundle bundle =
        analysis::emit_report(inputs, {report_dir(config), plots});
    log_event(LogLevel::info, "report.done",
              {{"files", std::to_string(bundle.files_written.size())},
               {"status", bundle.has_data ? "ok" : "no_data"}});
    std::cout << "report: wrote " << bundle.files_written.size() << " files under "
              << report_dir(config) << (bundle.has_data ? "" : " (no diff data)") << "\n";
    return bundle.has_data ? 0 : 1;
}

} // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"Stress-tests reference-free factuality metrics on long-document "
                 "summarization: retrieval-based scoring, meaning-preserving perturbations, "
                 "window sweeps and claim-density analysis."};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_override;
    std::size_t workers_override = 0;
    std::string stub_override;
    app.add_option("--config", config_path, "Run configuration JSON file")->required();
    app.add_option("--output", output_override, "Override the configured output directory");
    app.add_option("--workers", workers_override, "Override the configured worker count");
    app.add_option("--stub", stub_override,
                   "Force the stub generation provider with this fixture file");

    CLI::App* ingest_cmd = app.add_subcommand("ingest", "Validate the corpus files");
    CLI::App* perturb_cmd =
        app.add_subcommand("perturb", "Generate perturbed summary variants");
    std::string kinds = "all";
    std::string provider_override;
    perturb_cmd->add_option("--kinds", kinds, "all or a comma-separated list of kinds");
    perturb_cmd->add_option("--provider", provider_override, "Generation provider id");

    CLI::App* score_cmd = app.add_subcommand("score", "Score summaries against their sources");
    long long top_k_flag = -1;
    long long window_flag = -1;
    score_cmd->add_option("--top-k", top_k_flag, "Retrieved centers per claim");
    score_cmd->add_option("--window", window_flag, "Context window size w");

    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "Corpus means over the configured window sizes");
    long long sweep_top_k_flag = -1;
    std::string variants = "original";
    sweep_cmd->add_option("--top-k", sweep_top_k_flag, "Retrieved centers per claim");
    sweep_cmd->add_option("--variants", variants, "all or a comma-separated variant filter");

    CLI::App* density_cmd =
        app.add_subcommand("density", "Claim-similarity bins over existing scores");
    CLI::App* report_cmd = app.add_subcommand("report", "Emit the report bundle");
    bool plots = false;
    report_cmd->add_flag("--plots", plots, "Also render SVG plots");

    std::vector<const char*> argv;
    argv.push_back("factprobe");
    for (const std::string& arg : args) argv.push_back(arg.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        RunConfig config = load_run_config(config_path);
        if (!output_override.empty()) config.output_dir = output_override;
        if (workers_override > 0) config.workers = workers_override;
        io::ensure_dir(config.output_dir);

        if (ingest_cmd->parsed()) return cmd_ingest(config);
        if (perturb_cmd->parsed()) {
            return cmd_perturb(config, kinds, stub_override, provider_override);
        }
        if (score_cmd->parsed()) {
            retrieval::RetrievalConfig retrieval_config = config.retrieval;
            if (top_k_flag >= 0) retrieval_config.top_k = static_cast<std::size_t>(top_k_flag);
            if (window_flag >= 0) retrieval_config.window = static_cast<std::size_t>(window_flag);
            if (retrieval_config.top_k == 0) {
                throw SchemaViolationError("--top-k must be >= 1");
            }
            return cmd_score(config, retrieval_config);
        }
        if (sweep_cmd->parsed()) {
            std::size_t top_k = sweep_top_k_flag >= 0
                                    ? static_cast<std::size_t>(sweep_top_k_flag)
                                    : config.retrieval.top_k;
            return cmd_sweep(config, top_k, variants);
        }
        if (density_cmd->parsed()) return cmd_density(config);
        if (report_cmd->parsed()) return cmd_report(config, plots);
        return 1;
    } catch (const Error& e) {
        log_event(LogLevel::error, "command.failed", {{"message", e.what()}});
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        log_event(LogLevel::error, "command.failed", {{"message", e.what()}});
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace factprobe::cli
