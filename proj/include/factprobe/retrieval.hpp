#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "factprobe/corpus.hpp"
#include "factprobe/embedding.hpp"

namespace factprobe::retrieval {

// A retrieved source sentence expanded by a symmetric context window, clamped
// at document edges. `similarity` is the cosine of the claim against the
// center sentence.
struct EvidenceSnippet {
    std::size_t center_index = 0;
    std::size_t window = 0;
    std::vector<std::size_t> sentence_indices; // ascending, contiguous
    std::string text;                          // covered sentences joined by single spaces
    double similarity = 0.0;

    bool operator==(const EvidenceSnippet&) const = default;
};

struct RetrievalConfig {
    std::size_t top_k = 3;
    std::size_t window = 1;

    bool operator==(const RetrievalConfig&) const = default;
};

// Indices of the min(k, n) highest-cosine document sentences, sorted by
// descending similarity; exact ties broken by ascending index.
std::vector<std::size_t> top_k_indices(const embedding::EmbeddingVector& claim_vec,
                                       const std::vector<embedding::EmbeddingVector>& doc_vecs,
                                       std::size_t k);

// Snippet covering indices max(0, k-w) .. min(n-1, k+w).
EvidenceSnippet expand_window(const corpus::SourceDocument& doc, std::size_t k, std::size_t w,
                              double similarity = 0.0);

// Embeds the claim and all document sentences, then expands each top-K
// center by the configured window. Snippets may overlap; they are never
// merged or deduplicated.
std::vector<EvidenceSnippet> retrieve_evidence(const corpus::Sentence& claim,
                                               const corpus::SourceDocument& doc,
                                               const RetrievalConfig& cfg,
                                               embedding::EmbeddingProvider& provider);

// Mean cosine between the claim and every document sentence. Shared by the
// density analysis and full-document scoring.
double mean_cosine_to_document(const corpus::Sentence& claim, const corpus::SourceDocument& doc,
                               embedding::EmbeddingProvider& provider);

} // namespace factprobe::retrieval
