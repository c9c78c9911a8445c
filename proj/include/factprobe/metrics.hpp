#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace factprobe::metrics {

struct ScoreValue {
    double value = 0.0; // always within [0, 1]
    std::string metric_name;

    bool operator==(const ScoreValue&) const = default;
};

enum class EvidenceMode { snippet, full_document };

const char* to_string(EvidenceMode mode);
EvidenceMode evidence_mode_from_string(const std::string& name);

// Uniform contract over factuality scorers: map a (claim, evidence) pair to
// a unit-interval score. Concrete adapters wrap deterministic local logic,
// recorded fixtures, or out-of-process model backends.
class MetricAdapter {
public:
    virtual ~MetricAdapter() = default;

    virtual const std::string& name() const = 0;
    virtual EvidenceMode evidence_mode() const { return EvidenceMode::snippet; }

    // 0 means unlimited; the scorer never runs more invocations in parallel.
    virtual std::size_t max_concurrency() const { return 0; }

    // Raw adapter output, already normalized into [0, 1].
    virtual double score_pair(const std::string& claim, const std::string& evidence) = 0;
};

// Validated scoring entry point: rejects empty claim/evidence and raises
// ScoreOutOfRangeError if an adapter's output leaves [0, 1].
ScoreValue score(MetricAdapter& adapter, const std::string& claim, const std::string& evidence);

// exp() of a log-likelihood, mapping (-inf, 0] onto (0, 1]. Positive inputs
// (possible from length-normalized backends) are clamped to 0 and logged.
// Throws NonFiniteInputError.
double normalize_bartscore(double log_likelihood);

// Test-oracle metric: unique-token recall of the claim against the evidence,
// lowercased, punctuation stripped before tokenizing.
double mock_overlap_score(const std::string& claim, const std::string& evidence);

class MockOverlapMetric : public MetricAdapter {
public:
    const std::string& name() const override { return name_; }
    double score_pair(const std::string& claim, const std::string& evidence) override;

private:
    std::string name_ = "mock_overlap";
};

// Configuration block for resolving an adapter by name. Exactly one backend
// transport applies to the six model-backed metrics: an HTTP endpoint or a
// recorded-fixture file (JSONL of {"claim","evidence","raw"}).
struct AdapterConfig {
    std::string name;
    std::optional<EvidenceMode> evidence_mode; // override for ablations
    std::string endpoint;                      // e.g. http://localhost:8400/score
    std::string fixture_path;                  // recorded raw backend outputs
    std::string api_key_env;                   // env var holding a bearer token
    int timeout_s = 30;
    std::size_t batch_size = 8;
    std::size_t max_concurrency = 1;
};

using AdapterFactory = std::function<std::unique_ptr<MetricAdapter>(const AdapterConfig&)>;

class AdapterRegistry {
public:
    void register_adapter(const std::string& name, AdapterFactory factory); // DuplicateNameError
    std::unique_ptr<MetricAdapter> create(const AdapterConfig& config) const; // UnknownAdapterError
    std::vector<std::string> list_adapters() const;

private:
    std::map<std::string, AdapterFactory> factories_;
};

// Registry preloaded with the built-in adapter names: bartscore, summac_conv,
// summac_zs, alignscore, unieval, minicheck, mock_overlap.
const AdapterRegistry& builtin_registry();

// Names of the six model-backed metrics, in reporting order.
const std::vector<std::string>& backend_metric_names();

} // namespace factprobe::metrics
