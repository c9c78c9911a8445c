#include "factprobe/perturb.hpp"

#include <cstdlib>
#include <fstream>

#include <nlohmann/json.hpp>

#include "factprobe/errors.hpp"
#include "factprobe/http.hpp"
#include "factprobe/io.hpp"
#include "factprobe/logging.hpp"
#include "factprobe/util.hpp"

namespace factprobe::perturb {

namespace {

// Shared instruction tail of the first six templates.
const char* kStrictTail =
    "\n\nYou are strictly prohibited from omitting any information or altering its original "
    "meaning. Do not include explanations, reasoning, or commentary in your output.";

std::string replace_all(std::string text, const std::string& placeholder,
                        const std::string& value) {
    std::size_t pos = 0;
    while ((pos = text.find(placeholder, pos)) != std::string::npos) {
        text.replace(pos, placeholder.size(), value);
        pos += value.size();
    }
    return text;
}

} // namespace

const std::vector<PromptTemplate>& prompt_templates() {
    static const std::vector<PromptTemplate> kTemplates = {
        {Kind::paraphrased,
         std::string("Provide the paraphrased version of the text.") + kStrictTail,
         "Text: <summary>"},
        {Kind::less_diverse,
         std::string("Rewrite the following text using less diverse vocabulary.") + kStrictTail,
         "Text: <summary>"},
        {Kind::negated,
         std::string("Rewrite the following text by introducing logically equivalent negations "
                     "while preserving its original meaning.") +
             kStrictTail,
         "Text: <summary>"},
        {Kind::simplified,
         std::string("Rewrite the following text by making complex sentences simpler.") +
             kStrictTail,
         "Text: <summary>"},
        {Kind::summarized,
         std::string("Rewrite the text to make it more concise.") + kStrictTail,
         "Text: <summary>"},
        {Kind::synonym_replaced,
         std::string("Revise the text using synonyms for some common words.") + kStrictTail,
         "Text: <summary>"},
        {Kind::added_source_text,
         "Insert a source sentence into the summary that does not relate to its main ideas.\n\n"
         "Do not include explanations, reasoning, or commentary in your output.",
         "Text: <summary> \n\n Source: <document>"},
    };
    return kTemplates;
}

const PromptTemplate& template_for(Kind kind) {
    for (const PromptTemplate& tmpl : prompt_templates()) {
        if (tmpl.kind == kind) return tmpl;
    }
    throw SchemaViolationError(std::string("no prompt template for variant '") +
                               corpus::to_string(kind) + "'");
}

RenderedPrompt render_prompt(const PromptTemplate& tmpl, const std::string& summary_text,
                             const std::optional<std::string>& document_text) {
    if (util::is_blank(summary_text)) {
        throw EmptyInputError("render_prompt: summary text is empty");
    }
    const bool wants_document = tmpl.kind == Kind::added_source_text;
    if (wants_document && !document_text) {
        throw MissingDocumentError("added_source_text requires the source document");
    }
    if (!wants_document && document_text) {
        throw UnexpectedDocumentError(std::string("variant '") + corpus::to_string(tmpl.kind) +
                                      "' takes no document");
    }
    RenderedPrompt rendered;
    rendered.system = tmpl.system_prompt;
    rendered.user = replace_all(tmpl.user_prompt_template, "<summary>", summary_text);
    if (wants_document) {
        rendered.user = replace_all(rendered.user, "<document>", *document_text);
    }
    return rendered;
}

// ---------------------------------------------------------------------------
// Providers
// ---------------------------------------------------------------------------

namespace {

// Pulls the summary text back out of a rendered user prompt.
std::string summary_from_user_prompt(const std::string& user_prompt) {
    const std::string prefix = "Text: ";
    std::string text = user_prompt;
    if (text.rfind(prefix, 0) == 0) text = text.substr(prefix.size());
    const std::string source_marker = " \n\n Source: ";
    std::size_t marker = text.find(source_marker);
    if (marker != std::string::npos) text = text.substr(0, marker);
    return text;
}

std::optional<Kind> kind_from_system_prompt(const std::string& system_prompt) {
    for (const PromptTemplate& tmpl : prompt_templates()) {
        if (tmpl.system_prompt == system_prompt) return tmpl.kind;
    }
    return std::nullopt;
}

} // namespace

StubGenerationProvider::StubGenerationProvider() = default;

StubGenerationProvider::StubGenerationProvider(const std::string& fixture_path) {
    for (const auto& [number, line] : io::read_jsonl_lines(fixture_path)) {
        nlohmann::json entry = nlohmann::json::parse(line, nullptr, false);
        if (entry.is_discarded() || !entry.contains("kind") || !entry.contains("output")) {
            throw IoError("stub fixture '" + fixture_path + "' line " + std::to_string(number) +
                          " is malformed (need 'kind' and 'output')");
        }
        FixtureEntry fixture;
        fixture.kind = corpus::variant_from_string(entry["kind"].get<std::string>());
        if (entry.contains("summary")) fixture.summary = entry["summary"].get<std::string>();
        fixture.output = entry["output"].get<std::string>();
        entries_.push_back(std::move(fixture));
    }
}

std::string StubGenerationProvider::generate(const std::string& system_prompt,
                                             const std::string& user_prompt,
                                             const GenerationParams& params) {
    (void)params;
    ++calls_;
    if (entries_.empty()) {
        return summary_from_user_prompt(user_prompt); // echo stub
    }
    std::optional<Kind> kind = kind_from_system_prompt(system_prompt);
    if (!kind) {
        throw ProviderFailureError("stub provider received an unknown system prompt");
    }
    std::string summary = summary_from_user_prompt(user_prompt);
    const FixtureEntry* kind_only = nullptr;
    for (const FixtureEntry& entry : entries_) {
        if (entry.kind != *kind) continue;
        if (entry.summary && *entry.summary == summary) return entry.output;
        if (!entry.summary && kind_only == nullptr) kind_only = &entry;
    }
    if (kind_only != nullptr) return kind_only->output;
    throw ProviderFailureError(std::string("stub fixture has no entry for kind '") +
                               corpus::to_string(*kind) + "'");
}

HttpGenerationProvider::HttpGenerationProvider(HttpGenerationConfig config)
    : config_(std::move(config)) {
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
        throw ProviderFailureError("environment variable '" + config_.api_key_env +
                                   "' is not set");
    }
    api_key_ = key;
}

std::string HttpGenerationProvider::generate(const std::string& system_prompt,
                                             const std::string& user_prompt,
                                             const GenerationParams& params) {
    ++calls_;
    nlohmann::ordered_json request;
    request["model"] = params.model_id;
    request["messages"] = nlohmann::ordered_json::array(
        {{{"role", "system"}, {"content", system_prompt}},
         {{"role", "user"}, {"content", user_prompt}}});
    request["temperature"] = params.temperature;
    request["top_p"] = params.top_p;

    http::Result response = http::post_json(
        config_.endpoint, request.dump(), {{"Authorization", "Bearer " + api_key_}},
        config_.timeout_s);
    if (!response.ok) throw ProviderFailureError(response.error);
    if (response.status != 200) {
        throw ProviderFailureError("generation endpoint returned HTTP " +
                                   std::to_string(response.status));
    }
    nlohmann::json body = nlohmann::json::parse(response.body, nullptr, false);
    if (body.is_discarded()) {
        throw ProviderFailureError("generation endpoint returned invalid JSON");
    }
    try {
        return body.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception&) {
        throw ProviderFailureError("generation endpoint response missing choices[0].message");
    }
}

// ---------------------------------------------------------------------------
// Cache
// ---------------------------------------------------------------------------

GenerationCache::GenerationCache(std::string cache_path) : cache_path_(std::move(cache_path)) {
    if (!cache_path_.empty() && io::file_exists(cache_path_)) {
        load_cache_file();
    }
}

void GenerationCache::load_cache_file() {
    for (const auto& [number, line] : io::read_jsonl_lines(cache_path_)) {
        nlohmann::json entry = nlohmann::json::parse(line, nullptr, false);
        if (entry.is_discarded() || !entry.contains("key") || !entry.contains("raw_output")) {
            throw IoError("generation cache '" + cache_path_ + "' line " +
                          std::to_string(number) + " is malformed");
        }
        entries_[entry["key"].get<std::string>()] = entry["raw_output"].get<std::string>();
    }
}

std::optional<std::string> GenerationCache::lookup(const std::string& key) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void GenerationCache::store(const std::string& key, const std::string& raw_output) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (!entries_.emplace(key, raw_output).second) return;
    if (cache_path_.empty()) return;
    io::ensure_parent_dir(cache_path_);
    std::ofstream out(cache_path_, std::ios::binary | std::ios::app);
    if (!out) throw IoError("cannot open generation cache '" + cache_path_ + "' for append");
    nlohmann::ordered_json entry;
    entry["key"] = key;
    entry["raw_output"] = raw_output;
    out << entry.dump() << '\n';
}

std::string GenerationCache::make_key(const std::string& model_id, Kind kind,
                                      const std::string& summary_text,
                                      const std::string& document_text) {
    return model_id + ":" + corpus::to_string(kind) + ":" + util::sha256_hex(summary_text) + ":" +
           util::sha256_hex(document_text);
}

// ---------------------------------------------------------------------------
// Generation driver
// ---------------------------------------------------------------------------

PerturbationResult generate_perturbation(const corpus::SummaryRecord& summary,
                                         const corpus::SourceDocument& doc, Kind kind,
                                         GenerationProvider& provider,
                                         const GenerationParams& params, GenerationCache* cache) {
    if (summary.variant != corpus::SummaryVariant::original) {
        throw SchemaViolationError("perturbation source '" + summary.summary_id +
                                   "' must be an original summary");
    }
    const PromptTemplate& tmpl = template_for(kind);
    const std::string summary_text = summary.text();
    const std::string doc_text = doc.text();

    PerturbationResult result;
    result.model_id = params.model_id;
    result.params = params;

    std::optional<std::string> document_text;
    if (kind == Kind::added_source_text) {
        document_text = doc_text;
        if (params.max_document_chars > 0 && document_text->size() > params.max_document_chars) {
            document_text->resize(params.max_document_chars);
            result.flags.push_back("document_truncated");
            log_event(LogLevel::warning, "perturb.document_truncated",
                      {{"summary_id", summary.summary_id}});
        }
    }

    const std::string cache_key = GenerationCache::make_key(params.model_id, kind, summary_text,
                                                            doc_text);
    std::optional<std::string> raw = cache ? cache->lookup(cache_key) : std::nullopt;
    if (!raw) {
        RenderedPrompt prompt = render_prompt(tmpl, summary_text, document_text);
        std::string output = provider.generate(prompt.system, prompt.user, params);
        if (util::is_blank(output)) {
            // One retry on a blank generation, then hard failure.
            output = provider.generate(prompt.system, prompt.user, params);
        }
        if (util::is_blank(output)) {
            throw EmptyGenerationError("provider '" + provider.provider_id() +
                                       "' produced a blank output for '" + summary.summary_id +
                                       "' (" + corpus::to_string(kind) + ")");
        }
        raw = std::move(output);
        if (cache) cache->store(cache_key, *raw);
    }
    result.raw_output = *raw;

    if (kind == Kind::added_source_text) {
        if (util::trim(result.raw_output).size() < summary_text.size()) {
            result.flags.push_back("output_shorter_than_input");
            log_event(LogLevel::warning, "perturb.output_shorter_than_input",
                      {{"summary_id", summary.summary_id}});
        }
    } else if (util::trim(result.raw_output) == summary_text) {
        result.flags.push_back("identical_output");
        log_event(LogLevel::warning, "perturb.identical_output",
                  {{"summary_id", summary.summary_id},
                   {"kind", corpus::to_string(kind)}});
    }

    result.record.summary_id = summary.summary_id + "__" + corpus::to_string(kind);
    result.record.doc_ref = summary.doc_ref;
    result.record.variant = kind;
    result.record.parent_id = summary.summary_id;
    result.record.sentences = corpus::segment_text(result.raw_output);
    return result;
}

GenerateAllResult generate_all(const corpus::SummaryRecord& summary,
                               const corpus::SourceDocument& doc, GenerationProvider& provider,
                               const GenerationParams& params, GenerationCache* cache) {
    GenerateAllResult out;
    for (const PromptTemplate& tmpl : prompt_templates()) {
        try {
            out.results.push_back(
                generate_perturbation(summary, doc, tmpl.kind, provider, params, cache));
        } catch (const std::exception& e) {
            out.errors.push_back({summary.summary_id, tmpl.kind, e.what()});
        }
    }
    return out;
}

std::string perturbation_to_jsonl_line(const PerturbationResult& result) {
    nlohmann::ordered_json record = corpus::summary_to_json(result.record);
    record["raw_output"] = result.raw_output;
    record["model_id"] = result.model_id;
    record["params"] = {{"temperature", result.params.temperature},
                        {"top_p", result.params.top_p},
                        {"max_document_chars", result.params.max_document_chars}};
    record["flags"] = result.flags;
    return record.dump();
}

} // namespace factprobe::perturb
