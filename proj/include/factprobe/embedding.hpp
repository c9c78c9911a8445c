#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace factprobe::embedding {

struct EmbeddingVector {
    std::vector<double> values;
    std::string model_id;

    std::size_t dimension() const { return values.size(); }

    bool operator==(const EmbeddingVector&) const = default;
};

// A sentence-encoder backend. Implementations must be deterministic for a
// fixed (model_id, text) pair. Backends that cannot serve overlapping calls
// declare single_flight; the scoring pipeline then serializes access.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;

    virtual const std::string& model_id() const = 0;
    virtual std::size_t dimension() const = 0;
    virtual bool single_flight() const { return false; }

    // One vector per text, order-aligned. Input validation lives in the free
    // embed_batch() below; implementations may assume non-empty texts.
    virtual std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) = 0;
};

// Validated entry point: rejects empty batches and empty texts, checks that
// the provider returned one finite vector per text.
std::vector<EmbeddingVector> embed_batch(EmbeddingProvider& provider,
                                         const std::vector<std::string>& texts);

// Standard cosine similarity. Throws DimensionMismatchError on model or
// length disagreement and ZeroVectorError when either vector is all zeros.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

// Deterministic bag-of-tokens test vector: lowercase whitespace tokens hashed
// into `dimension` buckets with FNV-1a; token counts as components.
EmbeddingVector mock_embed(const std::string& text, std::size_t dimension);

class MockEmbeddingProvider : public EmbeddingProvider {
public:
    explicit MockEmbeddingProvider(std::size_t dimension = 4096);

    const std::string& model_id() const override { return model_id_; }
    std::size_t dimension() const override { return dimension_; }
    std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) override;

private:
    std::size_t dimension_;
    std::string model_id_;
};

struct CacheStats {
    std::uint64_t hits = 0;
    std::uint64_t misses = 0;
};

// Memoizes per-text vectors keyed by (model_id, SHA-256 of text). When given
// a path, the cache persists as an append-only JSONL store shared across
// runs. Reads and writes are guarded; safe for concurrent embed_batch calls.
class CachingEmbeddingProvider : public EmbeddingProvider {
public:
    CachingEmbeddingProvider(std::shared_ptr<EmbeddingProvider> inner,
                             std::string cache_path = "");

    const std::string& model_id() const override { return inner_->model_id(); }
    std::size_t dimension() const override { return inner_->dimension(); }
    bool single_flight() const override { return inner_->single_flight(); }
    std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) override;

    CacheStats stats() const;
    std::uint64_t backend_calls() const;

private:
    void load_cache_file();
    void append_cache_file(const std::string& key, const EmbeddingVector& vec);

    std::shared_ptr<EmbeddingProvider> inner_;
    std::string cache_path_;
    mutable std::mutex mutex_;
    std::unordered_map<std::string, EmbeddingVector> entries_;
    CacheStats stats_;
    std::uint64_t backend_calls_ = 0;
};

// Remote encoder reached over HTTP: POST {"model_id", "texts"} to the
// endpoint, expecting {"vectors": [[...], ...]}. A bearer token is read from
// the environment variable named in the config, never from the config file.
struct HttpEmbeddingConfig {
    std::string endpoint;
    std::string model_id;
    std::size_t dimension = 0;
    std::string api_key_env;
    std::size_t batch_size = 32;
    int timeout_s = 60;
};

class HttpEmbeddingProvider : public EmbeddingProvider {
public:
    explicit HttpEmbeddingProvider(HttpEmbeddingConfig config); // throws ProviderFailureError

    const std::string& model_id() const override { return config_.model_id; }
    std::size_t dimension() const override { return config_.dimension; }
    std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) override;

private:
    HttpEmbeddingConfig config_;
    std::string api_key_;
};

// Wraps a single-flight provider so concurrent workers take turns.
class SerializedEmbeddingProvider : public EmbeddingProvider {
public:
    explicit SerializedEmbeddingProvider(EmbeddingProvider& inner) : inner_(inner) {}

    const std::string& model_id() const override { return inner_.model_id(); }
    std::size_t dimension() const override { return inner_.dimension(); }
    bool single_flight() const override { return false; }
    std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) override {
        std::lock_guard<std::mutex> lock(mutex_);
        return inner_.embed_batch(texts);
    }

private:
    EmbeddingProvider& inner_;
    std::mutex mutex_;
};

} // namespace factprobe::embedding
