#pragma once

#include <optional>
#include <string>
#include <vector>

#include "factprobe/corpus.hpp"
#include "factprobe/embedding.hpp"
#include "factprobe/metrics.hpp"
#include "factprobe/retrieval.hpp"

namespace factprobe::scorer {

// Score of one summary sentence: the maximum adapter score over its
// evaluated evidence snippets (or over the whole document in full-document
// mode). `claim_similarity` is filled by the density analysis.
struct SentenceScore {
    std::string summary_id;
    std::size_t sentence_index = 0;
    std::string metric_name;
    double value = 0.0;
    retrieval::EvidenceSnippet best_snippet;
    std::optional<double> claim_similarity;

    bool operator==(const SentenceScore&) const = default;
};

// Arithmetic mean of the per-sentence scores, with the sentence detail kept
// for downstream analysis. `variant`, `dataset` and `parent_id` are carried
// from the corpus for reporting.
struct SummaryScore {
    std::string summary_id;
    std::string metric_name;
    double value = 0.0;
    std::vector<SentenceScore> sentence_scores;
    retrieval::RetrievalConfig config;
    corpus::SummaryVariant variant = corpus::SummaryVariant::original;
    std::string dataset;
    std::optional<std::string> parent_id;

    bool operator==(const SummaryScore&) const = default;
};

SentenceScore score_sentence(const corpus::Sentence& claim, const corpus::SourceDocument& doc,
                             metrics::MetricAdapter& adapter, const retrieval::RetrievalConfig& cfg,
                             embedding::EmbeddingProvider& provider);

SummaryScore score_summary(const corpus::SummaryRecord& summary,
                           const corpus::SourceDocument& doc, metrics::MetricAdapter& adapter,
                           const retrieval::RetrievalConfig& cfg,
                           embedding::EmbeddingProvider& provider);

struct ScoreError {
    std::string summary_id;
    std::string metric_name;
    std::string message;

    bool operator==(const ScoreError&) const = default;
};

struct CorpusScores {
    std::vector<SummaryScore> scores; // sorted by (summary_id, metric_name)
    std::vector<ScoreError> errors;   // failed items; excluded from scores
};

// Scores every (summary, adapter) pair. Work items may run on `workers`
// threads; output order and values are independent of the execution order.
// Per-item failures land in the error ledger and the run continues.
CorpusScores score_corpus(const corpus::Corpus& corpus,
                          const std::vector<metrics::MetricAdapter*>& adapters,
                          const retrieval::RetrievalConfig& cfg,
                          embedding::EmbeddingProvider& provider, std::size_t workers = 1);

struct SweepCell {
    std::string metric;
    std::string dataset;
    std::size_t window = 0;
    double mean_score = 0.0;
    std::size_t summary_count = 0;

    bool operator==(const SweepCell&) const = default;
};

struct SweepResult {
    std::vector<SweepCell> cells; // sorted by (metric, dataset, window)
    std::vector<ScoreError> errors;
};

// Corpus-mean score per window size, grouped by dataset. Embeddings are
// window-independent, so a caching provider serves every pass after the
// first from cache.
SweepResult window_sweep(const corpus::Corpus& corpus, metrics::MetricAdapter& adapter,
                         std::size_t top_k, const std::vector<std::size_t>& w_values,
                         embedding::EmbeddingProvider& provider, std::size_t workers = 1);

// Score artifact JSONL: one object per SummaryScore.
std::string score_to_jsonl_line(const SummaryScore& score);
std::vector<SummaryScore> load_scores_jsonl(const std::string& path, const corpus::Corpus& corpus);
void write_scores_jsonl(const std::vector<SummaryScore>& scores, const std::string& path);

} // namespace factprobe::scorer
