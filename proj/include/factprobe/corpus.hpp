#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace factprobe::corpus {

// One sentence of a document or summary. `index` is the position in the
// parent sequence; `source_doc_id` keeps provenance after multi-document
// flattening.
struct Sentence {
    std::size_t index = 0;
    std::string text;
    std::optional<std::string> source_doc_id;

    bool operator==(const Sentence&) const = default;
};

enum class SummaryVariant {
    original,
    paraphrased,
    simplified,
    synonym_replaced,
    less_diverse,
    negated,
    summarized,
    added_source_text,
};

// The seven perturbation kinds (every variant except original).
inline constexpr std::array<SummaryVariant, 7> kPerturbationKinds = {
    SummaryVariant::paraphrased,      SummaryVariant::simplified,
    SummaryVariant::synonym_replaced, SummaryVariant::less_diverse,
    SummaryVariant::negated,          SummaryVariant::summarized,
    SummaryVariant::added_source_text,
};

const char* to_string(SummaryVariant variant);
SummaryVariant variant_from_string(const std::string& name); // throws SchemaViolationError

struct SourceDocument {
    std::string doc_id;
    std::string dataset;
    std::vector<Sentence> sentences; // indices contiguous 0..n-1
    std::optional<std::uint64_t> token_count;

    // All sentence texts joined by single spaces.
    std::string text() const;

    bool operator==(const SourceDocument&) const = default;
};

struct SummaryRecord {
    std::string summary_id;
    std::string doc_ref;
    SummaryVariant variant = SummaryVariant::original;
    std::vector<Sentence> sentences;
    std::optional<std::string> parent_id; // set for perturbed variants

    std::string text() const;

    bool operator==(const SummaryRecord&) const = default;
};

struct Corpus {
    std::map<std::string, SourceDocument> documents;
    std::map<std::string, SummaryRecord> summaries;

    const SourceDocument& document(const std::string& doc_id) const; // throws DanglingReferenceError
    const SummaryRecord& summary(const std::string& summary_id) const;

    bool operator==(const Corpus&) const = default;
};

// Deterministic sentence segmentation: splits on terminal punctuation with a
// fixed abbreviation rule set, never dropping non-whitespace characters.
// Throws EmptyInputError when the text has no non-whitespace characters.
std::vector<Sentence> segment_text(const std::string& text);

// Loads and validates a corpus from line-delimited JSON streams.
// Document records: {"doc_id", "dataset", "text"} or {..., "sentences": [...]}.
// Summary records:  {"summary_id", "doc_ref", "variant", "text"|"sentences",
//                    "parent_id"?}. Raw text is segmented; sentence lists are
// accepted verbatim (empty entries dropped with a warning).
Corpus load_corpus(std::istream& document_stream, std::istream& summary_stream);
Corpus load_corpus_files(const std::vector<std::string>& document_paths,
                         const std::vector<std::string>& summary_paths);

// Concatenates several documents into one, renumbering sentence indices and
// stamping per-sentence provenance. Throws EmptyInputError on an empty list.
SourceDocument flatten_multidoc(const std::vector<SourceDocument>& documents,
                                const std::string& group_id);

SourceDocument document_from_json(const nlohmann::json& record);
SummaryRecord summary_from_json(const nlohmann::json& record);
nlohmann::ordered_json document_to_json(const SourceDocument& doc);
nlohmann::ordered_json summary_to_json(const SummaryRecord& summary);

// JSONL serialization; reloading the two streams yields an equal Corpus.
void write_corpus(const Corpus& corpus, std::ostream& document_stream,
                  std::ostream& summary_stream);

} // namespace factprobe::corpus
