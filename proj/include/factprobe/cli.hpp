#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "factprobe/metrics.hpp"
#include "factprobe/perturb.hpp"
#include "factprobe/retrieval.hpp"

namespace factprobe::cli {

struct EmbeddingConfig {
    std::string provider = "mock"; // mock | http
    std::string model_id = "bert-base-nli-mean-tokens";
    std::size_t dimension = 4096;
    std::string endpoint;
    std::string api_key_env;
    std::size_t batch_size = 32;
};

struct GenerationConfig {
    std::string provider = "stub"; // stub | openai
    std::string stub_fixture;
    std::string endpoint = "https://api.openai.com/v1/chat/completions";
    std::string api_key_env = "OPENAI_API_KEY";
    perturb::GenerationParams params;
    std::string cache_path;
};

struct AnalysisConfig {
    std::size_t bin_count = 10;
    std::vector<std::size_t> w_values = {0, 1, 2};
};

// One declarative run-configuration file drives every command; runs span
// datasets x metrics x variants x windows, so flag chains do not scale.
// Secrets never live here, only environment variable names.
struct RunConfig {
    std::vector<std::string> document_paths;
    std::vector<std::string> summary_paths;
    std::vector<std::string> perturbed_paths; // optional explicit extras
    EmbeddingConfig embedding;
    std::string embedding_cache_path;
    GenerationConfig generation;
    std::vector<metrics::AdapterConfig> metric_configs;
    retrieval::RetrievalConfig retrieval;
    AnalysisConfig analysis;
    std::string output_dir = "out";
    std::int64_t seed = 0;
    std::size_t workers = 1;
};

RunConfig load_run_config(const std::string& path); // throws SchemaViolationError / IoError

// Entry point behind the binary: args excludes the program name.
// Returns the process exit status (0 iff the error ledger stayed empty).
int run(const std::vector<std::string>& args);

} // namespace factprobe::cli
