#include "factprobe/metrics.hpp"

#include <cmath>
#include <cstdlib>
#include <mutex>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "factprobe/errors.hpp"
#include "factprobe/http.hpp"
#include "factprobe/io.hpp"
#include "factprobe/logging.hpp"
#include "factprobe/util.hpp"

namespace factprobe::metrics {

const char* to_string(EvidenceMode mode) {
    return mode == EvidenceMode::full_document ? "full_document" : "snippet";
}

EvidenceMode evidence_mode_from_string(const std::string& name) {
    if (name == "snippet") return EvidenceMode::snippet;
    if (name == "full_document") return EvidenceMode::full_document;
    throw SchemaViolationError("unknown evidence_mode '" + name + "'");
}

ScoreValue score(MetricAdapter& adapter, const std::string& claim, const std::string& evidence) {
    if (util::is_blank(claim)) {
        throw EmptyInputError("score: claim is empty");
    }
    if (util::is_blank(evidence)) {
        throw EmptyInputError("score: evidence is empty");
    }
    double value = adapter.score_pair(claim, evidence);
    if (!std::isfinite(value) || value < 0.0 || value > 1.0) {
        throw ScoreOutOfRangeError("adapter '" + adapter.name() + "' returned " +
                                   std::to_string(value) + " outside [0, 1]");
    }
    return ScoreValue{value, adapter.name()};
}

double normalize_bartscore(double log_likelihood) {
    if (!std::isfinite(log_likelihood)) {
        throw NonFiniteInputError("normalize_bartscore: input is not finite");
    }
    if (log_likelihood > 0.0) {
        // Length-normalized backends can exceed 0; clamp so exp stays <= 1.
        log_event(LogLevel::warning, "metrics.bartscore_clamped",
                  {{"log_likelihood", std::to_string(log_likelihood)}});
        log_likelihood = 0.0;
    }
    return std::exp(log_likelihood);
}

double mock_overlap_score(const std::string& claim, const std::string& evidence) {
    std::vector<std::string> claim_tokens = util::content_tokens(claim);
    if (claim_tokens.empty()) {
        throw EmptyInputError("mock_overlap_score: claim has no tokens");
    }
    std::unordered_set<std::string> claim_set(claim_tokens.begin(), claim_tokens.end());
    std::unordered_set<std::string> evidence_set;
    for (std::string& token : util::content_tokens(evidence)) {
        evidence_set.insert(std::move(token));
    }
    std::size_t covered = 0;
    for (const std::string& token : claim_set) {
        if (evidence_set.count(token) > 0) ++covered;
    }
    return static_cast<double>(covered) / static_cast<double>(claim_set.size());
}

double MockOverlapMetric::score_pair(const std::string& claim, const std::string& evidence) {
    return mock_overlap_score(claim, evidence);
}

// ---------------------------------------------------------------------------
// Backend transports
// ---------------------------------------------------------------------------

namespace {

// Raw (pre-normalization) score source behind a model-backed adapter.
class ScoreBackend {
public:
    virtual ~ScoreBackend() = default;
    virtual double raw_score(const std::string& claim, const std::string& evidence) = 0;
};

std::string pair_key(const std::string& claim, const std::string& evidence) {
    return util::sha256_hex(claim) + ":" + util::sha256_hex(evidence);
}

// Replays recorded backend outputs from JSONL {"claim","evidence","raw"}.
class RecordedBackend : public ScoreBackend {
public:
    RecordedBackend(const std::string& metric_name, const std::string& fixture_path)
        : metric_name_(metric_name), fixture_path_(fixture_path) {
        for (const auto& [number, line] : io::read_jsonl_lines(fixture_path)) {
            nlohmann::json entry = nlohmann::json::parse(line, nullptr, false);
            if (entry.is_discarded() || !entry.contains("claim") || !entry.contains("evidence") ||
                !entry.contains("raw") || !entry["raw"].is_number()) {
                throw IoError("recorded fixture '" + fixture_path + "' line " +
                              std::to_string(number) + " is malformed");
            }
            entries_[pair_key(entry["claim"].get<std::string>(),
                              entry["evidence"].get<std::string>())] =
                entry["raw"].get<double>();
        }
    }

    double raw_score(const std::string& claim, const std::string& evidence) override {
        auto it = entries_.find(pair_key(claim, evidence));
        if (it == entries_.end()) {
            throw BackendFailureError("metric '" + metric_name_ + "': no recorded response in '" +
                                      fixture_path_ + "' for the requested pair");
        }
        return it->second;
    }

private:
    std::string metric_name_;
    std::string fixture_path_;
    std::unordered_map<std::string, double> entries_;
};

// POSTs {"metric","claim","evidence"[,"dimension"]} and expects {"score": x}.
class HttpBackend : public ScoreBackend {
public:
    HttpBackend(const std::string& metric_name, const AdapterConfig& config,
                std::string dimension)
        : metric_name_(metric_name),
          endpoint_(config.endpoint),
          timeout_s_(config.timeout_s),
          dimension_(std::move(dimension)) {
        if (!config.api_key_env.empty()) {
            const char* key = std::getenv(config.api_key_env.c_str());
            if (key == nullptr || *key == '\0') {
                throw BackendFailureError("environment variable '" + config.api_key_env +
                                          "' is not set");
            }
            api_key_ = key;
        }
    }

    double raw_score(const std::string& claim, const std::string& evidence) override {
        nlohmann::ordered_json request;
        request["metric"] = metric_name_;
        if (!dimension_.empty()) request["dimension"] = dimension_;
        request["claim"] = claim;
        request["evidence"] = evidence;

        std::vector<std::pair<std::string, std::string>> headers;
        if (!api_key_.empty()) headers.emplace_back("Authorization", "Bearer " + api_key_);

        http::Result response = http::post_json(endpoint_, request.dump(), headers, timeout_s_);
        if (!response.ok) {
            throw BackendFailureError("metric '" + metric_name_ + "': " + response.error);
        }
        if (response.status != 200) {
            throw BackendFailureError("metric '" + metric_name_ + "': endpoint returned HTTP " +
                                      std::to_string(response.status));
        }
        nlohmann::json body = nlohmann::json::parse(response.body, nullptr, false);
        if (body.is_discarded() || !body.contains("score") || !body["score"].is_number()) {
            throw BackendFailureError("metric '" + metric_name_ +
                                      "': endpoint returned a malformed body");
        }
        return body["score"].get<double>();
    }

private:
    std::string metric_name_;
    std::string endpoint_;
    int timeout_s_;
    std::string dimension_;
    std::string api_key_;
};

enum class Postprocess { identity, exp_log_likelihood };

class BackendMetricAdapter : public MetricAdapter {
public:
    BackendMetricAdapter(std::string name, EvidenceMode mode, Postprocess postprocess,
                         std::size_t max_concurrency, std::unique_ptr<ScoreBackend> backend)
        : name_(std::move(name)),
          mode_(mode),
          postprocess_(postprocess),
          max_concurrency_(max_concurrency),
          backend_(std::move(backend)) {}

    const std::string& name() const override { return name_; }
    EvidenceMode evidence_mode() const override { return mode_; }
    std::size_t max_concurrency() const override { return max_concurrency_; }

    double score_pair(const std::string& claim, const std::string& evidence) override {
        double raw = backend_->raw_score(claim, evidence);
        if (postprocess_ == Postprocess::exp_log_likelihood) {
            return normalize_bartscore(raw);
        }
        return raw;
    }

private:
    std::string name_;
    EvidenceMode mode_;
    Postprocess postprocess_;
    std::size_t max_concurrency_;
    std::unique_ptr<ScoreBackend> backend_;
};

struct BackendSpec {
    EvidenceMode default_mode;
    Postprocess postprocess;
    std::string dimension; // extra request field, e.g. unieval's consistency
};

std::unique_ptr<ScoreBackend> make_backend(const std::string& name, const AdapterConfig& config,
                                           const BackendSpec& spec) {
    if (!config.fixture_path.empty()) {
        return std::make_unique<RecordedBackend>(name, config.fixture_path);
    }
    if (!config.endpoint.empty()) {
        return std::make_unique<HttpBackend>(name, config, spec.dimension);
    }
    throw SchemaViolationError("adapter '" + name +
                               "' requires an 'endpoint' or a 'fixture_path'");
}

AdapterFactory backend_factory(const std::string& name, const BackendSpec& spec) {
    return [name, spec](const AdapterConfig& config) -> std::unique_ptr<MetricAdapter> {
        EvidenceMode mode = config.evidence_mode.value_or(spec.default_mode);
        return std::make_unique<BackendMetricAdapter>(name, mode, spec.postprocess,
                                                      config.max_concurrency,
                                                      make_backend(name, config, spec));
    };
}

} // namespace

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

void AdapterRegistry::register_adapter(const std::string& name, AdapterFactory factory) {
    if (factories_.count(name) > 0) {
        throw DuplicateNameError("adapter '" + name + "' is already registered");
    }
    factories_.emplace(name, std::move(factory));
}

std::unique_ptr<MetricAdapter> AdapterRegistry::create(const AdapterConfig& config) const {
    auto it = factories_.find(config.name);
    if (it == factories_.end()) {
        throw UnknownAdapterError("no adapter named '" + config.name + "'");
    }
    return it->second(config);
}

std::vector<std::string> AdapterRegistry::list_adapters() const {
    std::vector<std::string> names;
    names.reserve(factories_.size());
    for (const auto& [name, factory] : factories_) names.push_back(name);
    return names;
}

const AdapterRegistry& builtin_registry() {
    static const AdapterRegistry registry = [] {
        AdapterRegistry r;
        r.register_adapter("mock_overlap", [](const AdapterConfig&) {
            return std::make_unique<MockOverlapMetric>();
        });
        // The backend score is a mean token log-likelihood; exponentiation
        // maps it into (0, 1] so values are comparable across metrics.
        r.register_adapter(
            "bartscore",
            backend_factory("bartscore",
                            {EvidenceMode::snippet, Postprocess::exp_log_likelihood, ""}));
        r.register_adapter(
            "summac_conv",
            backend_factory("summac_conv", {EvidenceMode::snippet, Postprocess::identity, ""}));
        r.register_adapter(
            "summac_zs",
            backend_factory("summac_zs", {EvidenceMode::snippet, Postprocess::identity, ""}));
        r.register_adapter(
            "alignscore",
            backend_factory("alignscore", {EvidenceMode::snippet, Postprocess::identity, ""}));
        // Only the consistency dimension is exposed as the score.
        r.register_adapter(
            "unieval", backend_factory(
                           "unieval", {EvidenceMode::snippet, Postprocess::identity,
                                       "consistency"}));
        // Long-context checker: defaults to whole-document evidence.
        r.register_adapter(
            "minicheck",
            backend_factory("minicheck", {EvidenceMode::full_document, Postprocess::identity, ""}));
        return r;
    }();
    return registry;
}

const std::vector<std::string>& backend_metric_names() {
    static const std::vector<std::string> names = {"bartscore",  "minicheck", "summac_conv",
                                                   "summac_zs",  "alignscore", "unieval"};
    return names;
}

} // namespace factprobe::metrics
