#include "factprobe/retrieval.hpp"

#include <algorithm>
#include <numeric>

#include "factprobe/errors.hpp"

namespace factprobe::retrieval {

std::vector<std::size_t> top_k_indices(const embedding::EmbeddingVector& claim_vec,
                                       const std::vector<embedding::EmbeddingVector>& doc_vecs,
                                       std::size_t k) {
    if (doc_vecs.empty()) {
        throw EmptyInputError("top_k_indices: no document vectors");
    }
    if (k == 0) {
        throw EmptyInputError("top_k_indices: k must be >= 1");
    }
    std::vector<double> similarities(doc_vecs.size());
    for (std::size_t i = 0; i < doc_vecs.size(); ++i) {
        similarities[i] = embedding::cosine(claim_vec, doc_vecs[i]);
    }
    std::vector<std::size_t> order(doc_vecs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (similarities[a] != similarities[b]) return similarities[a] > similarities[b];
        return a < b; // exact ties by ascending index, for reproducible runs
    });
    order.resize(std::min(k, order.size()));
    return order;
}

EvidenceSnippet expand_window(const corpus::SourceDocument& doc, std::size_t k, std::size_t w,
                              double similarity) {
    const std::size_t n = doc.sentences.size();
    if (k >= n) {
        throw IndexOutOfRangeError("expand_window: center " + std::to_string(k) +
                                   " outside document of " + std::to_string(n) + " sentences");
    }
    EvidenceSnippet snippet;
    snippet.center_index = k;
    snippet.window = w;
    snippet.similarity = similarity;
    const std::size_t lo = k >= w ? k - w : 0;
    const std::size_t hi = std::min(n - 1, k + w);
    for (std::size_t i = lo; i <= hi; ++i) {
        snippet.sentence_indices.push_back(i);
        if (!snippet.text.empty()) snippet.text += ' ';
        snippet.text += doc.sentences[i].text;
    }
    return snippet;
}

std::vector<EvidenceSnippet> retrieve_evidence(const corpus::Sentence& claim,
                                               const corpus::SourceDocument& doc,
                                               const RetrievalConfig& cfg,
                                               embedding::EmbeddingProvider& provider) {
    if (doc.sentences.empty()) {
        throw EmptyInputError("retrieve_evidence: document has no sentences");
    }
    // One batch: claim first, then the document sentences in order.
    std::vector<std::string> texts;
    texts.reserve(doc.sentences.size() + 1);
    texts.push_back(claim.text);
    for (const corpus::Sentence& sentence : doc.sentences) {
        texts.push_back(sentence.text);
    }
    std::vector<embedding::EmbeddingVector> vectors = embedding::embed_batch(provider, texts);
    embedding::EmbeddingVector claim_vec = std::move(vectors.front());
    std::vector<embedding::EmbeddingVector> doc_vecs(
        std::make_move_iterator(vectors.begin() + 1), std::make_move_iterator(vectors.end()));

    std::vector<EvidenceSnippet> snippets;
    for (std::size_t center : top_k_indices(claim_vec, doc_vecs, cfg.top_k)) {
        double similarity = embedding::cosine(claim_vec, doc_vecs[center]);
        snippets.push_back(expand_window(doc, center, cfg.window, similarity));
    }
    return snippets;
}

double mean_cosine_to_document(const corpus::Sentence& claim, const corpus::SourceDocument& doc,
                               embedding::EmbeddingProvider& provider) {
    if (doc.sentences.empty()) {
        throw EmptyInputError("mean_cosine_to_document: document has no sentences");
    }
    std::vector<std::string> texts;
    texts.reserve(doc.sentences.size() + 1);
    texts.push_back(claim.text);
    for (const corpus::Sentence& sentence : doc.sentences) {
        texts.push_back(sentence.text);
    }
    std::vector<embedding::EmbeddingVector> vectors = embedding::embed_batch(provider, texts);
    double sum = 0.0;
    for (std::size_t i = 1; i < vectors.size(); ++i) {
        sum += embedding::cosine(vectors[0], vectors[i]);
    }
    return sum / static_cast<double>(doc.sentences.size());
}

} // namespace factprobe::retrieval
