#include "factprobe/embedding.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include <cstdlib>

#include "factprobe/errors.hpp"
#include "factprobe/http.hpp"
#include "factprobe/io.hpp"
#include "factprobe/util.hpp"

namespace factprobe::embedding {

std::vector<EmbeddingVector> embed_batch(EmbeddingProvider& provider,
                                         const std::vector<std::string>& texts) {
    if (texts.empty()) {
        throw EmptyInputError("embed_batch: empty text list");
    }
    for (const std::string& text : texts) {
        if (util::is_blank(text)) {
            throw EmptyInputError("embed_batch: texts must be non-empty");
        }
    }
    std::vector<EmbeddingVector> vectors = provider.embed_batch(texts);
    if (vectors.size() != texts.size()) {
        throw ProviderFailureError("provider '" + provider.model_id() + "' returned " +
                                   std::to_string(vectors.size()) + " vectors for " +
                                   std::to_string(texts.size()) + " texts");
    }
    for (const EmbeddingVector& vec : vectors) {
        if (vec.dimension() != provider.dimension()) {
            throw ProviderFailureError("provider '" + provider.model_id() +
                                       "' returned a vector of wrong dimension");
        }
        for (double v : vec.values) {
            if (!std::isfinite(v)) {
                throw ProviderFailureError("provider '" + provider.model_id() +
                                           "' returned a non-finite component");
            }
        }
    }
    return vectors;
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.model_id != b.model_id) {
        throw DimensionMismatchError("cosine: model_id mismatch ('" + a.model_id + "' vs '" +
                                     b.model_id + "')");
    }
    if (a.dimension() != b.dimension()) {
        throw DimensionMismatchError("cosine: dimension mismatch (" +
                                     std::to_string(a.dimension()) + " vs " +
                                     std::to_string(b.dimension()) + ")");
    }
    double dot = 0.0;
    double norm_a = 0.0;
    double norm_b = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        dot += a.values[i] * b.values[i];
        norm_a += a.values[i] * a.values[i];
        norm_b += b.values[i] * b.values[i];
    }
    if (norm_a == 0.0 || norm_b == 0.0) {
        throw ZeroVectorError("cosine: zero vector indicates a provider failure");
    }
    return dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
}

EmbeddingVector mock_embed(const std::string& text, std::size_t dimension) {
    if (util::is_blank(text)) {
        throw EmptyInputError("mock_embed: text is empty");
    }
    if (dimension == 0) {
        throw DimensionMismatchError("mock_embed: dimension must be positive");
    }
    EmbeddingVector vec;
    vec.model_id = "mock-bow-" + std::to_string(dimension);
    vec.values.assign(dimension, 0.0);
    for (const std::string& token : util::whitespace_tokens(text)) {
        vec.values[util::fnv1a64(token) % dimension] += 1.0;
    }
    return vec;
}

MockEmbeddingProvider::MockEmbeddingProvider(std::size_t dimension)
    : dimension_(dimension), model_id_("mock-bow-" + std::to_string(dimension)) {}

std::vector<EmbeddingVector> MockEmbeddingProvider::embed_batch(
    const std::vector<std::string>& texts) {
    std::vector<EmbeddingVector> vectors;
    vectors.reserve(texts.size());
    for (const std::string& text : texts) {
        vectors.push_back(mock_embed(text, dimension_));
    }
    return vectors;
}

// ---------------------------------------------------------------------------
// Cache
// ---------------------------------------------------------------------------

CachingEmbeddingProvider::CachingEmbeddingProvider(std::shared_ptr<EmbeddingProvider> inner,
                                                   std::string cache_path)
    : inner_(std::move(inner)), cache_path_(std::move(cache_path)) {
    if (!cache_path_.empty() && io::file_exists(cache_path_)) {
        load_cache_file();
    }
}

void CachingEmbeddingProvider::load_cache_file() {
    for (const auto& [number, line] : io::read_jsonl_lines(cache_path_)) {
        nlohmann::json entry = nlohmann::json::parse(line, nullptr, false);
        if (entry.is_discarded() || !entry.contains("model_id") || !entry.contains("sha256") ||
            !entry.contains("values")) {
            throw IoError("embedding cache '" + cache_path_ + "' line " + std::to_string(number) +
                          " is malformed");
        }
        if (entry["model_id"].get<std::string>() != inner_->model_id()) continue;
        EmbeddingVector vec;
        vec.model_id = inner_->model_id();
        vec.values = entry["values"].get<std::vector<double>>();
        entries_.emplace(entry["sha256"].get<std::string>(), std::move(vec));
    }
}

void CachingEmbeddingProvider::append_cache_file(const std::string& key,
                                                 const EmbeddingVector& vec) {
    io::ensure_parent_dir(cache_path_);
    std::ofstream out(cache_path_, std::ios::binary | std::ios::app);
    if (!out) throw IoError("cannot open embedding cache '" + cache_path_ + "' for append");
    nlohmann::ordered_json entry;
    entry["model_id"] = vec.model_id;
    entry["sha256"] = key;
    entry["values"] = vec.values;
    out << entry.dump() << '\n';
}

std::vector<EmbeddingVector> CachingEmbeddingProvider::embed_batch(
    const std::vector<std::string>& texts) {
    std::vector<EmbeddingVector> out(texts.size());
    std::vector<std::size_t> missing;
    std::vector<std::string> missing_texts;
    std::vector<std::string> keys(texts.size());

    {
        std::lock_guard<std::mutex> lock(mutex_);
        for (std::size_t i = 0; i < texts.size(); ++i) {
            keys[i] = util::sha256_hex(texts[i]);
            auto it = entries_.find(keys[i]);
            if (it != entries_.end()) {
                out[i] = it->second;
                ++stats_.hits;
            } else {
                missing.push_back(i);
                missing_texts.push_back(texts[i]);
                ++stats_.misses;
            }
        }
    }

    if (!missing.empty()) {
        std::vector<EmbeddingVector> fresh = inner_->embed_batch(missing_texts);
        if (fresh.size() != missing_texts.size()) {
            throw ProviderFailureError("provider '" + inner_->model_id() +
                                       "' returned a misaligned batch");
        }
        std::lock_guard<std::mutex> lock(mutex_);
        ++backend_calls_;
        for (std::size_t j = 0; j < missing.size(); ++j) {
            const std::string& key = keys[missing[j]];
            out[missing[j]] = fresh[j];
            if (entries_.emplace(key, fresh[j]).second && !cache_path_.empty()) {
                append_cache_file(key, fresh[j]);
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// HTTP provider
// ---------------------------------------------------------------------------

HttpEmbeddingProvider::HttpEmbeddingProvider(HttpEmbeddingConfig config)
    : config_(std::move(config)) {
    if (config_.endpoint.empty()) {
        throw ProviderFailureError("embedding provider requires an endpoint");
    }
    if (config_.dimension == 0) {
        throw ProviderFailureError("embedding provider requires a positive dimension");
    }
    if (!config_.api_key_env.empty()) {
        const char* key = std::getenv(config_.api_key_env.c_str());
        if (key == nullptr || *key == '\0') {
            throw ProviderFailureError("environment variable '" + config_.api_key_env +
                                       "' is not set");
        }
        api_key_ = key;
    }
}

std::vector<EmbeddingVector> HttpEmbeddingProvider::embed_batch(
    const std::vector<std::string>& texts) {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    std::vector<std::pair<std::string, std::string>> headers;
    if (!api_key_.empty()) headers.emplace_back("Authorization", "Bearer " + api_key_);

    for (std::size_t offset = 0; offset < texts.size(); offset += config_.batch_size) {
        std::size_t end = std::min(texts.size(), offset + config_.batch_size);
        nlohmann::ordered_json request;
        request["model_id"] = config_.model_id;
        request["texts"] =
            std::vector<std::string>(texts.begin() + offset, texts.begin() + end);

        http::Result response =
            http::post_json(config_.endpoint, request.dump(), headers, config_.timeout_s);
        if (!response.ok) throw ProviderFailureError(response.error);
        if (response.status != 200) {
            throw ProviderFailureError("embedding endpoint returned HTTP " +
                                       std::to_string(response.status));
        }
        nlohmann::json body = nlohmann::json::parse(response.body, nullptr, false);
        if (body.is_discarded() || !body.contains("vectors") || !body["vectors"].is_array()) {
            throw ProviderFailureError("embedding endpoint returned a malformed body");
        }
        for (const nlohmann::json& row : body["vectors"]) {
            EmbeddingVector vec;
            vec.model_id = config_.model_id;
            vec.values = row.get<std::vector<double>>();
            out.push_back(std::move(vec));
        }
    }
    return out;
}

CacheStats CachingEmbeddingProvider::stats() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return stats_;
}

std::uint64_t CachingEmbeddingProvider::backend_calls() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return backend_calls_;
}

} // namespace factprobe::embedding
