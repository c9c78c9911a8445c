#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "factprobe/corpus.hpp"

namespace factprobe::perturb {

using Kind = corpus::SummaryVariant;

// Prompt pair driving one perturbation kind. The user template carries a
// <summary> placeholder; the added_source_text template also carries
// <document>.
struct PromptTemplate {
    Kind kind = Kind::paraphrased;
    std::string system_prompt;
    std::string user_prompt_template;
};

// The seven templates in fixed registry order (paraphrased, less_diverse,
// negated, simplified, summarized, synonym_replaced, added_source_text).
const std::vector<PromptTemplate>& prompt_templates();
const PromptTemplate& template_for(Kind kind); // throws SchemaViolationError for original

struct GenerationParams {
    double temperature = 0.0;
    double top_p = 0.5;
    std::string model_id = "gpt-4o";
    // Longest document text inlined into an added_source_text prompt;
    // 0 disables truncation. Truncated records are flagged.
    std::size_t max_document_chars = 0;
};

struct RenderedPrompt {
    std::string system;
    std::string user;
};

// Substitutes the placeholders. Throws MissingDocumentError when
// added_source_text lacks a document and UnexpectedDocumentError when any
// other kind receives one.
RenderedPrompt render_prompt(const PromptTemplate& tmpl, const std::string& summary_text,
                             const std::optional<std::string>& document_text);

class GenerationProvider {
public:
    virtual ~GenerationProvider() = default;

    virtual const std::string& provider_id() const = 0;
    virtual std::string generate(const std::string& system_prompt, const std::string& user_prompt,
                                 const GenerationParams& params) = 0;

    // Number of backend invocations; cache hits do not count.
    virtual std::uint64_t calls() const = 0;
};

// Deterministic offline provider. Without a fixture it echoes the summary
// text extracted from the user prompt. A fixture file (JSONL of
// {"kind", "summary"?, "output"}) supplies canned outputs, matched by the
// rendered prompts alone: kind via the system prompt, summary via the user
// prompt.
class StubGenerationProvider : public GenerationProvider {
public:
    StubGenerationProvider();
    explicit StubGenerationProvider(const std::string& fixture_path);

    const std::string& provider_id() const override { return provider_id_; }
    std::string generate(const std::string& system_prompt, const std::string& user_prompt,
                         const GenerationParams& params) override;
    std::uint64_t calls() const override { return calls_; }

private:
    struct FixtureEntry {
        Kind kind;
        std::optional<std::string> summary; // exact match; nullopt = any
        std::string output;
    };

    std::string provider_id_ = "stub";
    std::vector<FixtureEntry> entries_;
    std::uint64_t calls_ = 0;
};

// Chat-completions provider for a hosted model API. The bearer token comes
// from the environment variable named in the config; construction fails
// before any work when it is unset.
struct HttpGenerationConfig {
    std::string endpoint = "https://api.openai.com/v1/chat/completions";
    std::string api_key_env = "OPENAI_API_KEY";
    int timeout_s = 120;
};

class HttpGenerationProvider : public GenerationProvider {
public:
    explicit HttpGenerationProvider(HttpGenerationConfig config); // throws ProviderFailureError

    const std::string& provider_id() const override { return provider_id_; }
    std::string generate(const std::string& system_prompt, const std::string& user_prompt,
                         const GenerationParams& params) override;
    std::uint64_t calls() const override { return calls_; }

private:
    std::string provider_id_ = "openai";
    HttpGenerationConfig config_;
    std::string api_key_;
    std::uint64_t calls_ = 0;
};

// Raw generations keyed by (model_id, kind, summary hash, document hash),
// persisted append-only so reruns skip the provider entirely.
class GenerationCache {
public:
    explicit GenerationCache(std::string cache_path = "");

    std::optional<std::string> lookup(const std::string& key) const;
    void store(const std::string& key, const std::string& raw_output);

    static std::string make_key(const std::string& model_id, Kind kind,
                                const std::string& summary_text, const std::string& document_text);

private:
    void load_cache_file();

    std::string cache_path_;
    mutable std::mutex mutex_;
    std::unordered_map<std::string, std::string> entries_;
};

struct PerturbationResult {
    corpus::SummaryRecord record;
    std::string raw_output;
    std::string model_id;
    GenerationParams params;
    std::vector<std::string> flags; // validation warnings; never fatal
};

// Drives one perturbation of an original summary. The provider output is
// kept raw and re-segmented into the new record. Blank generations get one
// retry, then EmptyGenerationError.
PerturbationResult generate_perturbation(const corpus::SummaryRecord& summary,
                                         const corpus::SourceDocument& doc, Kind kind,
                                         GenerationProvider& provider,
                                         const GenerationParams& params,
                                         GenerationCache* cache = nullptr);

struct PerturbError {
    std::string summary_id;
    Kind kind;
    std::string message;
};

struct GenerateAllResult {
    std::vector<PerturbationResult> results; // one per kind that succeeded
    std::vector<PerturbError> errors;
};

// All seven kinds for one original; per-kind failures are collected and the
// remaining kinds still run.
GenerateAllResult generate_all(const corpus::SummaryRecord& summary,
                               const corpus::SourceDocument& doc, GenerationProvider& provider,
                               const GenerationParams& params, GenerationCache* cache = nullptr);

// Perturbed-summary JSONL line: the corpus summary schema plus raw_output,
// model_id, params and flags.
std::string perturbation_to_jsonl_line(const PerturbationResult& result);

} // namespace factprobe::perturb
