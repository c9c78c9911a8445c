#include "factprobe/corpus.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "factprobe/errors.hpp"
#include "factprobe/io.hpp"
#include "factprobe/logging.hpp"
#include "factprobe/util.hpp"

namespace factprobe::corpus {

namespace {

// ---------------------------------------------------------------------------
// Sentence segmentation
//
// Rule-based equivalent of an unsupervised punctuation-and-abbreviation
// segmenter: sentences end at '.', '!' or '?' (plus trailing closers) that
// are followed by whitespace, except when a '.' belongs to an abbreviation,
// an initial, or an acronym with internal periods. Splits happen only at
// whitespace, so the non-whitespace characters of the input survive
// unchanged and in order.
// ---------------------------------------------------------------------------

const std::unordered_set<std::string>& abbreviation_set() {
    static const std::unordered_set<std::string> kAbbreviations = {
        // titles and honorifics
        "mr", "mrs", "ms", "dr", "prof", "rev", "hon", "st", "sr", "jr", "mt",
        "capt", "col", "gen", "lt", "sgt", "cmdr", "gov", "sen", "rep", "pres",
        // latinisms and common truncations
        "etc", "vs", "cf", "al", "ca", "approx", "est",
        "inc", "ltd", "co", "corp", "dept", "univ", "assn", "bros",
        "ave", "blvd", "rd",
        // calendar
        "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept", "oct",
        "nov", "dec", "mon", "tue", "tues", "wed", "thu", "thur", "thurs",
        "fri", "sat", "sun",
    };
    return kAbbreviations;
}

// Abbreviations that only suppress a boundary when a number follows
// ("no. 5", "fig. 2", "p. 12").
const std::unordered_set<std::string>& numeric_abbreviation_set() {
    static const std::unordered_set<std::string> kNumericAbbreviations = {
        "no", "nos", "p", "pp", "fig", "figs", "eq", "eqs", "sec", "secs",
        "ch", "vol", "vols", "art",
    };
    return kNumericAbbreviations;
}

bool is_ws(char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

bool is_terminal(char c) {
    return c == '.' || c == '!' || c == '?';
}

// Closing quotes/brackets that stay attached to the sentence they end.
// Returns the byte length of the closer at `pos`, or 0.
std::size_t closer_length(const std::string& text, std::size_t pos) {
    if (pos >= text.size()) return 0;
    char c = text[pos];
    if (c == '"' || c == '\'' || c == ')' || c == ']' || c == '}') return 1;
    // UTF-8: ” (e2 80 9d), ’ (e2 80 99), » (c2 bb)
    if (pos + 2 < text.size() && static_cast<unsigned char>(c) == 0xe2 &&
        static_cast<unsigned char>(text[pos + 1]) == 0x80) {
        unsigned char third = static_cast<unsigned char>(text[pos + 2]);
        if (third == 0x9d || third == 0x99) return 3;
    }
    if (pos + 1 < text.size() && static_cast<unsigned char>(c) == 0xc2 &&
        static_cast<unsigned char>(text[pos + 1]) == 0xbb) {
        return 2;
    }
    return 0;
}

// Word immediately preceding position `pos` (exclusive), lowercased, with
// leading openers stripped. Empty when `pos` starts a word boundary.
std::string preceding_token(const std::string& text, std::size_t pos) {
    std::size_t end = pos;
    std::size_t begin = end;
    while (begin > 0 && !is_ws(text[begin - 1])) --begin;
    while (begin < end) {
        char c = text[begin];
        if (c == '(' || c == '[' || c == '{' || c == '"' || c == '\'') {
            ++begin;
        } else {
            break;
        }
    }
    return util::to_lower(std::string_view(text).substr(begin, end - begin));
}

std::size_t next_non_ws(const std::string& text, std::size_t pos) {
    while (pos < text.size() && is_ws(text[pos])) ++pos;
    return pos;
}

bool token_is_alpha(const std::string& token) {
    if (token.empty()) return false;
    for (char c : token) {
        if (std::isalpha(static_cast<unsigned char>(c)) == 0) return false;
    }
    return true;
}

// Decides whether the '.' ending `token` is an abbreviation period rather
// than a sentence terminal. `after` is the first non-whitespace position
// following the period run.
bool is_abbreviation(const std::string& token, const std::string& text, std::size_t after) {
    if (token.empty()) return false;
    if (abbreviation_set().count(token) > 0) return true;
    if (numeric_abbreviation_set().count(token) > 0) {
        return after < text.size() && std::isdigit(static_cast<unsigned char>(text[after])) != 0;
    }
    if (token.size() == 1 && token_is_alpha(token)) return true; // initials: "J. Smith"
    if (token.find('.') != std::string::npos) return true;       // "e.g", "u.s", "ph.d"
    return false;
}

} // namespace

std::vector<Sentence> segment_text(const std::string& text) {
    if (util::is_blank(text)) {
        throw EmptyInputError("segment_text: text contains no non-whitespace characters");
    }

    std::vector<std::pair<std::size_t, std::size_t>> spans; // [begin, end)
    std::size_t start = next_non_ws(text, 0);
    std::size_t pos = start;
    while (pos < text.size()) {
        char c = text[pos];
        if (!is_terminal(c)) {
            ++pos;
            continue;
        }

        // Absorb the whole terminal run ("...", "?!") and trailing closers.
        std::size_t run_begin = pos;
        std::size_t run_end = pos;
        bool exclaim_or_question = false;
        std::size_t dot_count = 0;
        while (run_end < text.size() && is_terminal(text[run_end])) {
            if (text[run_end] == '.') ++dot_count;
            else exclaim_or_question = true;
            ++run_end;
        }
        while (true) {
            std::size_t len = closer_length(text, run_end);
            if (len == 0) break;
            run_end += len;
        }

        if (run_end >= text.size()) {
            spans.emplace_back(start, text.size());
            start = text.size();
            break;
        }
        if (!is_ws(text[run_end])) {
            // Inside a token ("3.14", "e.g.,"): keep scanning.
            pos = run_end;
            continue;
        }

        bool boundary;
        if (exclaim_or_question) {
            boundary = true;
        } else if (dot_count == 1) {
            std::string token = preceding_token(text, run_begin);
            boundary = !is_abbreviation(token, text, next_non_ws(text, run_end));
        } else {
            // Ellipsis: split only before an upper-case or quoted restart.
            std::size_t nxt = next_non_ws(text, run_end);
            char n = nxt < text.size() ? text[nxt] : '\0';
            boundary = std::isupper(static_cast<unsigned char>(n)) != 0 ||
                       std::isdigit(static_cast<unsigned char>(n)) != 0 || n == '"' || n == '\'';
        }

        if (boundary) {
            spans.emplace_back(start, run_end);
            start = next_non_ws(text, run_end);
            pos = start;
        } else {
            pos = run_end;
        }
    }
    if (start < text.size()) spans.emplace_back(start, text.size());

    std::vector<Sentence> sentences;
    for (const auto& [begin, end] : spans) {
        std::string piece = util::trim(std::string_view(text).substr(begin, end - begin));
        if (piece.empty()) {
            log_event(LogLevel::warning, "corpus.empty_segment_dropped");
            continue;
        }
        sentences.push_back(Sentence{sentences.size(), std::move(piece), std::nullopt});
    }
    return sentences;
}

// ---------------------------------------------------------------------------
// Data model
// ---------------------------------------------------------------------------

const char* to_string(SummaryVariant variant) {
    switch (variant) {
    case SummaryVariant::original: return "original";
    case SummaryVariant::paraphrased: return "paraphrased";
    case SummaryVariant::simplified: return "simplified";
    case SummaryVariant::synonym_replaced: return "synonym_replaced";
    case SummaryVariant::less_diverse: return "less_diverse";
    case SummaryVariant::negated: return "negated";
    case SummaryVariant::summarized: return "summarized";
    case SummaryVariant::added_source_text: return "added_source_text";
    }
    return "original";
}

SummaryVariant variant_from_string(const std::string& name) {
    if (name == "original") return SummaryVariant::original;
    for (SummaryVariant kind : kPerturbationKinds) {
        if (name == to_string(kind)) return kind;
    }
    throw SchemaViolationError("unknown summary variant '" + name + "'");
}

namespace {

std::string joined_text(const std::vector<Sentence>& sentences) {
    std::string out;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        if (i > 0) out += ' ';
        out += sentences[i].text;
    }
    return out;
}

} // namespace

std::string SourceDocument::text() const {
    return joined_text(sentences);
}

std::string SummaryRecord::text() const {
    return joined_text(sentences);
}

const SourceDocument& Corpus::document(const std::string& doc_id) const {
    auto it = documents.find(doc_id);
    if (it == documents.end()) {
        throw DanglingReferenceError("unknown doc_id '" + doc_id + "'");
    }
    return it->second;
}

const SummaryRecord& Corpus::summary(const std::string& summary_id) const {
    auto it = summaries.find(summary_id);
    if (it == summaries.end()) {
        throw DanglingReferenceError("unknown summary_id '" + summary_id + "'");
    }
    return it->second;
}

// ---------------------------------------------------------------------------
// JSONL parsing
// ---------------------------------------------------------------------------

namespace {

using nlohmann::json;

std::string require_string(const json& record, const char* field) {
    if (!record.contains(field)) {
        throw SchemaViolationError(std::string("missing field '") + field + "'");
    }
    if (!record[field].is_string()) {
        throw SchemaViolationError(std::string("field '") + field + "' must be a string");
    }
    std::string value = record[field].get<std::string>();
    if (value.empty()) {
        throw SchemaViolationError(std::string("field '") + field + "' must be non-empty");
    }
    return value;
}

// Sentence lists are accepted verbatim; entries that trim to nothing are
// dropped with a warning because real corpora contain artifacts.
std::vector<Sentence> sentences_from_json(const json& record, const char* owner_id) {
    const json& array = record["sentences"];
    if (!array.is_array()) throw SchemaViolationError("field 'sentences' must be an array");
    std::vector<Sentence> sentences;
    for (const json& entry : array) {
        std::string text;
        std::optional<std::string> provenance;
        if (entry.is_string()) {
            text = entry.get<std::string>();
        } else if (entry.is_object()) {
            if (!entry.contains("text") || !entry["text"].is_string()) {
                throw SchemaViolationError("sentence object requires a string 'text'");
            }
            text = entry["text"].get<std::string>();
            if (entry.contains("source_doc_id")) {
                if (!entry["source_doc_id"].is_string()) {
                    throw SchemaViolationError("'source_doc_id' must be a string");
                }
                provenance = entry["source_doc_id"].get<std::string>();
            }
        } else {
            throw SchemaViolationError("sentence entries must be strings or objects");
        }
        if (util::is_blank(text)) {
            log_event(LogLevel::warning, "corpus.empty_sentence_dropped", {{"id", owner_id}});
            continue;
        }
        sentences.push_back(Sentence{sentences.size(), std::move(text), std::move(provenance)});
    }
    return sentences;
}

std::vector<Sentence> text_or_sentences(const json& record, const std::string& owner_id) {
    bool has_text = record.contains("text");
    bool has_sentences = record.contains("sentences");
    if (has_text == has_sentences) {
        throw SchemaViolationError("record requires exactly one of 'text' or 'sentences'");
    }
    if (has_sentences) {
        std::vector<Sentence> sentences = sentences_from_json(record, owner_id.c_str());
        if (sentences.empty()) {
            throw SchemaViolationError("'sentences' contains no non-empty entries");
        }
        return sentences;
    }
    if (!record["text"].is_string()) throw SchemaViolationError("field 'text' must be a string");
    std::string text = record["text"].get<std::string>();
    if (util::is_blank(text)) throw SchemaViolationError("field 'text' is empty");
    return segment_text(text);
}

} // namespace

SourceDocument document_from_json(const nlohmann::json& record) {
    if (!record.is_object()) throw SchemaViolationError("document record must be a JSON object");
    SourceDocument doc;
    doc.doc_id = require_string(record, "doc_id");
    doc.dataset = require_string(record, "dataset");
    doc.sentences = text_or_sentences(record, doc.doc_id);
    if (record.contains("token_count")) {
        if (!record["token_count"].is_number_unsigned()) {
            throw SchemaViolationError("'token_count' must be a nonnegative integer");
        }
        doc.token_count = record["token_count"].get<std::uint64_t>();
    }
    return doc;
}

SummaryRecord summary_from_json(const nlohmann::json& record) {
    if (!record.is_object()) throw SchemaViolationError("summary record must be a JSON object");
    SummaryRecord summary;
    summary.summary_id = require_string(record, "summary_id");
    summary.doc_ref = require_string(record, "doc_ref");
    summary.variant = variant_from_string(require_string(record, "variant"));
    summary.sentences = text_or_sentences(record, summary.summary_id);
    if (record.contains("parent_id")) {
        if (!record["parent_id"].is_string()) {
            throw SchemaViolationError("'parent_id' must be a string");
        }
        summary.parent_id = record["parent_id"].get<std::string>();
    }
    if (summary.variant == SummaryVariant::original && summary.parent_id) {
        throw SchemaViolationError("original summary '" + summary.summary_id +
                                   "' must not set parent_id");
    }
    if (summary.variant != SummaryVariant::original && !summary.parent_id) {
        throw SchemaViolationError("perturbed summary '" + summary.summary_id +
                                   "' requires parent_id");
    }
    return summary;
}

namespace {

json parse_json_line(const std::string& line, const std::string& location) {
    json parsed = json::parse(line, nullptr, false);
    if (parsed.is_discarded()) {
        throw SchemaViolationError(location + ": invalid JSON");
    }
    return parsed;
}

std::vector<std::pair<std::size_t, std::string>> stream_lines(std::istream& stream) {
    std::vector<std::pair<std::size_t, std::string>> lines;
    std::string line;
    std::size_t number = 0;
    while (std::getline(stream, line)) {
        ++number;
        if (!util::is_blank(line)) lines.emplace_back(number, line);
    }
    return lines;
}

Corpus load_corpus_lines(const std::vector<std::pair<std::size_t, std::string>>& document_lines,
                         const std::vector<std::pair<std::size_t, std::string>>& summary_lines,
                         const std::string& document_label, const std::string& summary_label) {
    if (document_lines.empty()) {
        throw EmptyInputError(document_label + ": no document records");
    }
    if (summary_lines.empty()) {
        throw EmptyInputError(summary_label + ": no summary records");
    }

    Corpus corpus;
    for (const auto& [number, line] : document_lines) {
        std::string location = document_label + " line " + std::to_string(number);
        json parsed = parse_json_line(line, location);
        SourceDocument doc;
        try {
            doc = document_from_json(parsed);
        } catch (const Error& e) {
            throw SchemaViolationError(location + ": " + e.message());
        }
        if (corpus.documents.count(doc.doc_id) > 0) {
            throw DuplicateIdError(location + ": duplicate doc_id '" + doc.doc_id + "'");
        }
        corpus.documents.emplace(doc.doc_id, std::move(doc));
    }

    std::unordered_map<std::string, std::size_t> summary_line_of;
    for (const auto& [number, line] : summary_lines) {
        std::string location = summary_label + " line " + std::to_string(number);
        json parsed = parse_json_line(line, location);
        SummaryRecord summary;
        try {
            summary = summary_from_json(parsed);
        } catch (const Error& e) {
            throw SchemaViolationError(location + ": " + e.message());
        }
        if (corpus.summaries.count(summary.summary_id) > 0) {
            throw DuplicateIdError(location + ": duplicate summary_id '" + summary.summary_id +
                                   "'");
        }
        summary_line_of[summary.summary_id] = number;
        corpus.summaries.emplace(summary.summary_id, std::move(summary));
    }

    // Referential integrity across the whole corpus.
    for (const auto& [id, summary] : corpus.summaries) {
        std::string location = summary_label + " line " + std::to_string(summary_line_of[id]);
        if (corpus.documents.count(summary.doc_ref) == 0) {
            throw DanglingReferenceError(location + ": summary '" + id +
                                         "' references unknown doc_id '" + summary.doc_ref + "'");
        }
        if (summary.parent_id) {
            auto parent = corpus.summaries.find(*summary.parent_id);
            if (parent == corpus.summaries.end()) {
                throw DanglingReferenceError(location + ": summary '" + id +
                                             "' references unknown parent_id '" +
                                             *summary.parent_id + "'");
            }
            if (parent->second.variant != SummaryVariant::original) {
                throw SchemaViolationError(location + ": parent of perturbed summary '" + id +
                                           "' must be an original summary");
            }
        }
    }
    return corpus;
}

} // namespace

Corpus load_corpus(std::istream& document_stream, std::istream& summary_stream) {
    return load_corpus_lines(stream_lines(document_stream), stream_lines(summary_stream),
                             "documents", "summaries");
}

Corpus load_corpus_files(const std::vector<std::string>& document_paths,
                         const std::vector<std::string>& summary_paths) {
    std::vector<std::pair<std::size_t, std::string>> document_lines;
    std::vector<std::pair<std::size_t, std::string>> summary_lines;
    // Line numbers restart per file; single-file loads keep the path in messages.
    std::string doc_label = document_paths.size() == 1 ? document_paths.front() : "documents";
    std::string sum_label = summary_paths.size() == 1 ? summary_paths.front() : "summaries";

    for (const std::string& path : document_paths) {
        for (auto& [number, line] : io::read_jsonl_lines(path)) {
            document_lines.emplace_back(number, line);
        }
    }
    for (const std::string& path : summary_paths) {
        for (auto& [number, line] : io::read_jsonl_lines(path)) {
            summary_lines.emplace_back(number, line);
        }
    }
    return load_corpus_lines(document_lines, summary_lines, doc_label, sum_label);
}

SourceDocument flatten_multidoc(const std::vector<SourceDocument>& documents,
                                const std::string& group_id) {
    if (documents.empty()) {
        throw EmptyInputError("flatten_multidoc: document list is empty");
    }
    SourceDocument flat;
    flat.doc_id = group_id;
    flat.dataset = documents.front().dataset;
    bool have_all_counts = true;
    std::uint64_t total_tokens = 0;
    for (const SourceDocument& doc : documents) {
        for (const Sentence& sentence : doc.sentences) {
            Sentence copy = sentence;
            copy.index = flat.sentences.size();
            if (!copy.source_doc_id) copy.source_doc_id = doc.doc_id;
            flat.sentences.push_back(std::move(copy));
        }
        if (doc.token_count) {
            total_tokens += *doc.token_count;
        } else {
            have_all_counts = false;
        }
    }
    if (have_all_counts) flat.token_count = total_tokens;
    return flat;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

nlohmann::ordered_json sentences_to_json(const std::vector<Sentence>& sentences) {
    nlohmann::ordered_json array = nlohmann::ordered_json::array();
    for (const Sentence& sentence : sentences) {
        if (sentence.source_doc_id) {
            array.push_back({{"text", sentence.text}, {"source_doc_id", *sentence.source_doc_id}});
        } else {
            array.push_back(sentence.text);
        }
    }
    return array;
}

} // namespace

nlohmann::ordered_json document_to_json(const SourceDocument& doc) {
    nlohmann::ordered_json record;
    record["doc_id"] = doc.doc_id;
    record["dataset"] = doc.dataset;
    record["sentences"] = sentences_to_json(doc.sentences);
    if (doc.token_count) record["token_count"] = *doc.token_count;
    return record;
}

nlohmann::ordered_json summary_to_json(const SummaryRecord& summary) {
    nlohmann::ordered_json record;
    record["summary_id"] = summary.summary_id;
    record["doc_ref"] = summary.doc_ref;
    record["variant"] = to_string(summary.variant);
    record["sentences"] = sentences_to_json(summary.sentences);
    if (summary.parent_id) record["parent_id"] = *summary.parent_id;
    return record;
}

void write_corpus(const Corpus& corpus, std::ostream& document_stream,
                  std::ostream& summary_stream) {
    for (const auto& [id, doc] : corpus.documents) {
        document_stream << document_to_json(doc).dump() << '\n';
    }
    for (const auto& [id, summary] : corpus.summaries) {
        summary_stream << summary_to_json(summary).dump() << '\n';
    }
}

} // namespace factprobe::corpus
