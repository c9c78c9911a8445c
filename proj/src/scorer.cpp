#include "factprobe/scorer.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "factprobe/errors.hpp"
#include "factprobe/io.hpp"

namespace factprobe::scorer {

namespace {

// Counting gate honoring an adapter's declared max concurrent invocations.
class ConcurrencyGate {
public:
    explicit ConcurrencyGate(std::size_t limit) : limit_(limit) {}

    void acquire() {
        if (limit_ == 0) return;
        std::unique_lock<std::mutex> lock(mutex_);
        cv_.wait(lock, [&] { return in_flight_ < limit_; });
        ++in_flight_;
    }

    void release() {
        if (limit_ == 0) return;
        {
            std::lock_guard<std::mutex> lock(mutex_);
            --in_flight_;
        }
        cv_.notify_one();
    }

private:
    std::size_t limit_;
    std::size_t in_flight_ = 0;
    std::mutex mutex_;
    std::condition_variable cv_;
};

} // namespace

SentenceScore score_sentence(const corpus::Sentence& claim, const corpus::SourceDocument& doc,
                             metrics::MetricAdapter& adapter, const retrieval::RetrievalConfig& cfg,
                             embedding::EmbeddingProvider& provider) {
    SentenceScore result;
    result.sentence_index = claim.index;
    result.metric_name = adapter.name();

    if (adapter.evidence_mode() == metrics::EvidenceMode::full_document) {
        // The whole document is the evidence; retrieval is skipped, but the
        // claim/document similarity is still needed for density analysis.
        result.value = metrics::score(adapter, claim.text, doc.text()).value;
        result.best_snippet = retrieval::expand_window(doc, 0, doc.sentences.size() - 1);
        result.claim_similarity = retrieval::mean_cosine_to_document(claim, doc, provider);
        return result;
    }

    std::vector<retrieval::EvidenceSnippet> snippets =
        retrieval::retrieve_evidence(claim, doc, cfg, provider);
    bool first = true;
    for (retrieval::EvidenceSnippet& snippet : snippets) {
        // Any failing snippet aborts the sentence; no partial max.
        double value;
        try {
            value = metrics::score(adapter, claim.text, snippet.text).value;
        } catch (const Error& e) {
            throw BackendFailureError("metric '" + adapter.name() + "' failed on snippet " +
                                      std::to_string(snippet.center_index) + ": " + e.message());
        }
        if (first || value > result.value) {
            result.value = value;
            result.best_snippet = std::move(snippet);
            first = false;
        }
    }
    return result;
}

SummaryScore score_summary(const corpus::SummaryRecord& summary,
                           const corpus::SourceDocument& doc, metrics::MetricAdapter& adapter,
                           const retrieval::RetrievalConfig& cfg,
                           embedding::EmbeddingProvider& provider) {
    if (summary.sentences.empty()) {
        throw EmptyInputError("score_summary: summary '" + summary.summary_id +
                              "' has no sentences");
    }
    SummaryScore result;
    result.summary_id = summary.summary_id;
    result.metric_name = adapter.name();
    result.config = cfg;
    result.variant = summary.variant;
    result.dataset = doc.dataset;
    result.parent_id = summary.parent_id;

    double sum = 0.0;
    for (const corpus::Sentence& claim : summary.sentences) {
        SentenceScore sentence = score_sentence(claim, doc, adapter, cfg, provider);
        sentence.summary_id = summary.summary_id;
        sum += sentence.value;
        result.sentence_scores.push_back(std::move(sentence));
    }
    result.value = sum / static_cast<double>(summary.sentences.size());
    return result;
}

CorpusScores score_corpus(const corpus::Corpus& corpus,
                          const std::vector<metrics::MetricAdapter*>& adapters,
                          const retrieval::RetrievalConfig& cfg,
                          embedding::EmbeddingProvider& provider, std::size_t workers) {
    struct WorkItem {
        const corpus::SummaryRecord* summary;
        metrics::MetricAdapter* adapter;
    };
    std::vector<WorkItem> items;
    for (const auto& [id, summary] : corpus.summaries) {
        for (metrics::MetricAdapter* adapter : adapters) {
            items.push_back({&summary, adapter});
        }
    }

    // Single-flight providers get serialized access under parallel scoring.
    embedding::SerializedEmbeddingProvider serialized(provider);
    embedding::EmbeddingProvider& shared =
        (workers > 1 && provider.single_flight())
            ? static_cast<embedding::EmbeddingProvider&>(serialized)
            : provider;

    std::map<metrics::MetricAdapter*, std::unique_ptr<ConcurrencyGate>> gates;
    for (metrics::MetricAdapter* adapter : adapters) {
        if (gates.count(adapter) == 0) {
            gates.emplace(adapter, std::make_unique<ConcurrencyGate>(adapter->max_concurrency()));
        }
    }

    CorpusScores out;
    std::mutex out_mutex;
    std::atomic<std::size_t> next{0};

    auto run_item = [&](const WorkItem& item) {
        ConcurrencyGate& gate = *gates.at(item.adapter);
        try {
            const corpus::SourceDocument& doc = corpus.document(item.summary->doc_ref);
            gate.acquire();
            SummaryScore scorev;
            try {
                scorev = score_summary(*item.summary, doc, *item.adapter, cfg, shared);
            } catch (...) {
                gate.release();
                throw;
            }
            gate.release();
            std::lock_guard<std::mutex> lock(out_mutex);
            out.scores.push_back(std::move(scorev));
        } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lock(out_mutex);
            out.errors.push_back({item.summary->summary_id, item.adapter->name(), e.what()});
        }
    };

    if (workers <= 1) {
        for (const WorkItem& item : items) run_item(item);
    } else {
        std::vector<std::thread> pool;
        std::size_t thread_count = std::min(workers, items.size());
        for (std::size_t t = 0; t < thread_count; ++t) {
            pool.emplace_back([&] {
                while (true) {
                    std::size_t index = next.fetch_add(1);
                    if (index >= items.size()) break;
                    run_item(items[index]);
                }
            });
        }
        for (std::thread& thread : pool) thread.join();
    }

    // Output order is fixed regardless of execution order.
    std::sort(out.scores.begin(), out.scores.end(), [](const SummaryScore& a, const SummaryScore& b) {
        return std::tie(a.summary_id, a.metric_name) < std::tie(b.summary_id, b.metric_name);
    });
    std::sort(out.errors.begin(), out.errors.end(), [](const ScoreError& a, const ScoreError& b) {
        return std::tie(a.summary_id, a.metric_name, a.message) <
               std::tie(b.summary_id, b.metric_name, b.message);
    });
    return out;
}

SweepResult window_sweep(const corpus::Corpus& corpus, metrics::MetricAdapter& adapter,
                         std::size_t top_k, const std::vector<std::size_t>& w_values,
                         embedding::EmbeddingProvider& provider, std::size_t workers) {
    if (w_values.empty()) {
        throw EmptyInputError("window_sweep: w_values is empty");
    }
    SweepResult result;
    for (std::size_t w : w_values) {
        retrieval::RetrievalConfig cfg{top_k, w};
        CorpusScores scores = score_corpus(corpus, {&adapter}, cfg, provider, workers);

        std::map<std::string, std::pair<double, std::size_t>> by_dataset; // sum, count
        for (const SummaryScore& score : scores.scores) {
            auto& [sum, count] = by_dataset[score.dataset];
            sum += score.value;
            ++count;
        }
        for (const auto& [dataset, acc] : by_dataset) {
            result.cells.push_back(
                {adapter.name(), dataset, w, acc.first / static_cast<double>(acc.second),
                 acc.second});
        }
        for (ScoreError& error : scores.errors) {
            error.message += " (w=" + std::to_string(w) + ")";
            result.errors.push_back(std::move(error));
        }
    }
    std::sort(result.cells.begin(), result.cells.end(), [](const SweepCell& a, const SweepCell& b) {
        return std::tie(a.metric, a.dataset, a.window) < std::tie(b.metric, b.dataset, b.window);
    });
    return result;
}

// ---------------------------------------------------------------------------
// Score artifacts
// ---------------------------------------------------------------------------

std::string score_to_jsonl_line(const SummaryScore& score) {
    nlohmann::ordered_json record;
    record["summary_id"] = score.summary_id;
    record["metric"] = score.metric_name;
    record["variant"] = corpus::to_string(score.variant);
    record["k"] = score.config.top_k;
    record["w"] = score.config.window;
    record["score"] = score.value;
    nlohmann::ordered_json sentences = nlohmann::ordered_json::array();
    for (const SentenceScore& sentence : score.sentence_scores) {
        nlohmann::ordered_json entry;
        entry["j"] = sentence.sentence_index;
        entry["score"] = sentence.value;
        entry["center_index"] = sentence.best_snippet.center_index;
        entry["window_indices"] = sentence.best_snippet.sentence_indices;
        sentences.push_back(std::move(entry));
    }
    record["sentence_scores"] = std::move(sentences);
    return record.dump();
}

void write_scores_jsonl(const std::vector<SummaryScore>& scores, const std::string& path) {
    std::string content;
    for (const SummaryScore& score : scores) {
        content += score_to_jsonl_line(score);
        content += '\n';
    }
    io::write_file_if_changed(path, content);
}

std::vector<SummaryScore> load_scores_jsonl(const std::string& path,
                                            const corpus::Corpus& corpus) {
    std::vector<SummaryScore> scores;
    for (const auto& [number, line] : io::read_jsonl_lines(path)) {
        nlohmann::json record = nlohmann::json::parse(line, nullptr, false);
        if (record.is_discarded()) {
            throw SchemaViolationError(path + " line " + std::to_string(number) +
                                       ": invalid JSON");
        }
        try {
            SummaryScore score;
            score.summary_id = record.at("summary_id").get<std::string>();
            score.metric_name = record.at("metric").get<std::string>();
            score.variant = corpus::variant_from_string(record.at("variant").get<std::string>());
            score.config.top_k = record.at("k").get<std::size_t>();
            score.config.window = record.at("w").get<std::size_t>();
            score.value = record.at("score").get<double>();
            for (const nlohmann::json& entry : record.at("sentence_scores")) {
                SentenceScore sentence;
                sentence.summary_id = score.summary_id;
                sentence.metric_name = score.metric_name;
                sentence.sentence_index = entry.at("j").get<std::size_t>();
                sentence.value = entry.at("score").get<double>();
                sentence.best_snippet.center_index = entry.at("center_index").get<std::size_t>();
                sentence.best_snippet.sentence_indices =
                    entry.at("window_indices").get<std::vector<std::size_t>>();
                sentence.best_snippet.window = score.config.window;
                // Snippet text is not persisted in the artifact.
                score.sentence_scores.push_back(std::move(sentence));
            }
            const corpus::SummaryRecord& summary = corpus.summary(score.summary_id);
            score.dataset = corpus.document(summary.doc_ref).dataset;
            score.parent_id = summary.parent_id;
            scores.push_back(std::move(score));
        } catch (const nlohmann::json::exception& e) {
            throw SchemaViolationError(path + " line " + std::to_string(number) + ": " + e.what());
        }
    }
    return scores;
}

} // namespace factprobe::scorer
