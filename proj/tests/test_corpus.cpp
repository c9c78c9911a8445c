#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "factprobe/corpus.hpp"
#include "factprobe/errors.hpp"
#include "support.hpp"

using namespace factprobe;
using namespace factprobe::corpus;

namespace {

std::vector<std::string> texts_of(const std::vector<Sentence>& sentences) {
    std::vector<std::string> out;
    for (const Sentence& s : sentences) out.push_back(s.text);
    return out;
}

std::string strip_whitespace(const std::string& text) {
    std::string out;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c)) == 0) out.push_back(c);
    }
    return out;
}

Corpus corpus_from_strings(const std::string& docs, const std::string& sums) {
    std::istringstream doc_stream(docs);
    std::istringstream sum_stream(sums);
    return load_corpus(doc_stream, sum_stream);
}

} // namespace

TEST_CASE("segment_text splits on unambiguous terminals") {
    auto sentences = segment_text("It rained. We left.");
    CHECK(texts_of(sentences) == std::vector<std::string>{"It rained.", "We left."});
}

TEST_CASE("segment_text keeps unterminated text as one segment") {
    auto sentences = segment_text("Hello world");
    CHECK(texts_of(sentences) == std::vector<std::string>{"Hello world"});
}

TEST_CASE("segment_text does not split after title abbreviations") {
    // Matches the reference tokenizer's handling of "Dr." as an abbreviation.
    auto sentences = segment_text("Dr. Smith arrived. He left.");
    REQUIRE(sentences.size() == 2);
    CHECK(sentences[0].text == "Dr. Smith arrived.");
    CHECK(sentences[1].text == "He left.");
}

TEST_CASE("segment_text handles initials, acronyms and numbers") {
    CHECK(segment_text("J. Smith spoke first. The vote passed.").size() == 2);
    CHECK(segment_text("The U.S. team arrived late.").size() == 1);
    CHECK(segment_text("He earned a Ph.D. in 1999. Then he moved away.").size() == 2);
    CHECK(segment_text("Pi is roughly 3.14 in this context.").size() == 1);
    CHECK(segment_text("See fig. 4 for details. The trend holds.").size() == 2);
    CHECK(segment_text("Really?! That seems wrong.").size() == 2);
    CHECK(segment_text("He said \"Stop.\" Then he left.").size() == 2);
}

TEST_CASE("segment_text rejects blank input") {
    CHECK_THROWS_AS(segment_text(""), EmptyInputError);
    CHECK_THROWS_AS(segment_text("   \t\n "), EmptyInputError);
}

TEST_CASE("segment_text is deterministic") {
    const std::string text = "Dr. Adams met Ms. Reyes at 4 p.m. today. They signed. All done!";
    auto first = segment_text(text);
    auto second = segment_text(text);
    CHECK(first == second);
}

TEST_CASE("segment_text preserves non-whitespace characters in order") {
    std::vector<std::string> samples = {
        "It rained. We left.",
        "Dr. Smith arrived. He left.",
        "Wait... what happened? Nothing!",
        "Mr. Lee (cf. the memo) agreed. \"Fine.\" He signed on Jan. 3.",
        "Totals: 12.5, 3.14159, and no. 7 were flagged. End of list.",
        "One\nline\nwith breaks. And a tail",
    };
    std::mt19937 rng(20240817);
    for (int i = 0; i < 100; ++i) {
        std::string text = testsupport::random_sentence(rng);
        for (int j = std::uniform_int_distribution<int>(0, 4)(rng); j > 0; --j) {
            text += " ";
            text += testsupport::random_sentence(rng, 3, 7);
        }
        samples.push_back(text);
    }
    for (const std::string& sample : samples) {
        CAPTURE(sample);
        auto sentences = segment_text(sample);
        std::string joined;
        for (std::size_t i = 0; i < sentences.size(); ++i) {
            if (i > 0) joined += ' ';
            joined += sentences[i].text;
        }
        CHECK(strip_whitespace(joined) == strip_whitespace(sample));
        for (std::size_t i = 0; i < sentences.size(); ++i) {
            CHECK(sentences[i].index == i);
        }
    }
}

// ---------------------------------------------------------------------------
// load_corpus
// ---------------------------------------------------------------------------

namespace {

const char* kDocLine = R"({"doc_id": "d1", "dataset": "demo", "text": "One fact. Two facts."})";
const char* kSummaryLine =
    R"({"summary_id": "s1", "doc_ref": "d1", "variant": "original", "text": "One fact."})";

} // namespace

TEST_CASE("load_corpus accepts a minimal document/summary pair") {
    Corpus corpus = corpus_from_strings(std::string(kDocLine) + "\n",
                                        std::string(kSummaryLine) + "\n");
    CHECK(corpus.documents.size() == 1);
    CHECK(corpus.summaries.size() == 1);
    CHECK(corpus.document("d1").sentences.size() == 2);
    CHECK(corpus.summary("s1").variant == SummaryVariant::original);
}

TEST_CASE("load_corpus accepts pre-segmented sentences verbatim") {
    const std::string doc =
        R"({"doc_id": "d1", "dataset": "demo", "sentences": ["kept  as-is", "  ", "second"]})";
    testsupport::LogCapture capture;
    Corpus corpus = corpus_from_strings(doc + "\n", std::string(kSummaryLine) + "\n");
    const SourceDocument& loaded = corpus.document("d1");
    REQUIRE(loaded.sentences.size() == 2); // blank entry dropped with a warning
    CHECK(loaded.sentences[0].text == "kept  as-is");
    CHECK(loaded.sentences[1].text == "second");
    CHECK(capture.contains("empty_sentence_dropped"));
}

TEST_CASE("load_corpus rejects dangling doc_ref") {
    const std::string summary =
        R"({"summary_id": "s1", "doc_ref": "nope", "variant": "original", "text": "X."})";
    CHECK_THROWS_AS(corpus_from_strings(std::string(kDocLine) + "\n", summary + "\n"),
                    DanglingReferenceError);
}

TEST_CASE("load_corpus rejects duplicate ids") {
    std::string docs = std::string(kDocLine) + "\n" + kDocLine + "\n";
    CHECK_THROWS_AS(corpus_from_strings(docs, std::string(kSummaryLine) + "\n"),
                    DuplicateIdError);

    std::string sums = std::string(kSummaryLine) + "\n" + kSummaryLine + "\n";
    CHECK_THROWS_AS(corpus_from_strings(std::string(kDocLine) + "\n", sums), DuplicateIdError);
}

TEST_CASE("load_corpus reports schema violations with line numbers") {
    std::string docs = std::string(kDocLine) + "\n" + "{not json}\n";
    try {
        corpus_from_strings(docs, std::string(kSummaryLine) + "\n");
        FAIL("expected SchemaViolationError");
    } catch (const SchemaViolationError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("load_corpus schema checks") {
    // Missing field.
    CHECK_THROWS_AS(corpus_from_strings(R"({"dataset": "demo", "text": "X."})" "\n",
                                        std::string(kSummaryLine) + "\n"),
                    SchemaViolationError);
    // Both text and sentences.
    CHECK_THROWS_AS(
        corpus_from_strings(
            R"({"doc_id": "d1", "dataset": "demo", "text": "X.", "sentences": ["X."]})" "\n",
            std::string(kSummaryLine) + "\n"),
        SchemaViolationError);
    // Unknown variant.
    CHECK_THROWS_AS(
        corpus_from_strings(std::string(kDocLine) + "\n",
                            R"({"summary_id": "s1", "doc_ref": "d1", "variant": "odd", "text": "X."})"
                            "\n"),
        SchemaViolationError);
    // Perturbed without parent_id.
    CHECK_THROWS_AS(
        corpus_from_strings(std::string(kDocLine) + "\n",
                            R"({"summary_id": "s1", "doc_ref": "d1", "variant": "negated", "text": "X."})"
                            "\n"),
        SchemaViolationError);
    // Empty streams.
    CHECK_THROWS_AS(corpus_from_strings("", std::string(kSummaryLine) + "\n"), EmptyInputError);
    CHECK_THROWS_AS(corpus_from_strings(std::string(kDocLine) + "\n", "\n"), EmptyInputError);
}

TEST_CASE("load_corpus validates perturbed parent links") {
    std::string sums = std::string(kSummaryLine) + "\n" +
                       R"({"summary_id": "p1", "doc_ref": "d1", "variant": "negated", )"
                       R"("text": "Not one fact is missing.", "parent_id": "s1"})" "\n";
    Corpus corpus = corpus_from_strings(std::string(kDocLine) + "\n", sums);
    CHECK(corpus.summary("p1").parent_id == "s1");

    // Parent must exist.
    std::string dangling = std::string(kSummaryLine) + "\n" +
                           R"({"summary_id": "p1", "doc_ref": "d1", "variant": "negated", )"
                           R"("text": "X.", "parent_id": "ghost"})" "\n";
    CHECK_THROWS_AS(corpus_from_strings(std::string(kDocLine) + "\n", dangling),
                    DanglingReferenceError);

    // Parent must be an original.
    std::string chained = sums +
                          R"({"summary_id": "p2", "doc_ref": "d1", "variant": "simplified", )"
                          R"("text": "X.", "parent_id": "p1"})" "\n";
    CHECK_THROWS_AS(corpus_from_strings(std::string(kDocLine) + "\n", chained),
                    SchemaViolationError);
}

// ---------------------------------------------------------------------------
// flatten_multidoc
// ---------------------------------------------------------------------------

TEST_CASE("flatten_multidoc concatenates and renumbers") {
    std::mt19937 rng(7);
    SourceDocument a = testsupport::random_document(rng, "a", "demo", 3);
    SourceDocument b = testsupport::random_document(rng, "b", "demo", 2);
    SourceDocument flat = flatten_multidoc({a, b}, "group");
    REQUIRE(flat.sentences.size() == 5);
    CHECK(flat.doc_id == "group");
    for (std::size_t i = 0; i < 5; ++i) CHECK(flat.sentences[i].index == i);
    CHECK(flat.sentences[3].source_doc_id == "b"); // provenance of the second doc
    CHECK(flat.sentences[0].source_doc_id == "a");
    // Relative order within each source document is preserved.
    CHECK(flat.sentences[0].text == a.sentences[0].text);
    CHECK(flat.sentences[2].text == a.sentences[2].text);
    CHECK(flat.sentences[4].text == b.sentences[1].text);
}

TEST_CASE("flatten_multidoc identity case stamps provenance") {
    std::mt19937 rng(8);
    SourceDocument a = testsupport::random_document(rng, "solo", "demo", 4);
    SourceDocument flat = flatten_multidoc({a}, "group");
    CHECK(texts_of(flat.sentences) == texts_of(a.sentences));
    for (const Sentence& s : flat.sentences) CHECK(s.source_doc_id == "solo");
}

TEST_CASE("flatten_multidoc rejects an empty list") {
    CHECK_THROWS_AS(flatten_multidoc({}, "group"), EmptyInputError);
}

TEST_CASE("flatten_multidoc sums token counts only when all are present") {
    SourceDocument a{"a", "demo", {{0, "One.", std::nullopt}}, 10};
    SourceDocument b{"b", "demo", {{0, "Two.", std::nullopt}}, 5};
    CHECK(flatten_multidoc({a, b}, "g").token_count == 15);
    b.token_count.reset();
    CHECK_FALSE(flatten_multidoc({a, b}, "g").token_count.has_value());
}

// ---------------------------------------------------------------------------
// Round trip
// ---------------------------------------------------------------------------

TEST_CASE("corpus serialization round-trips field-for-field") {
    std::mt19937 rng(99);
    SourceDocument a = testsupport::random_document(rng, "a", "set-one", 4);
    a.token_count = 123;
    SourceDocument b = testsupport::random_document(rng, "b", "set-two", 3);
    SourceDocument flat = flatten_multidoc({a, b}, "ab"); // provenance-bearing sentences

    Corpus corpus;
    corpus.documents = {{a.doc_id, a}, {b.doc_id, b}, {flat.doc_id, flat}};
    SummaryRecord original = testsupport::random_summary(rng, "s1", a, 2);
    SummaryRecord perturbed = original;
    perturbed.summary_id = "s1__negated";
    perturbed.variant = SummaryVariant::negated;
    perturbed.parent_id = "s1";
    corpus.summaries = {{original.summary_id, original}, {perturbed.summary_id, perturbed}};

    std::ostringstream docs_out;
    std::ostringstream sums_out;
    write_corpus(corpus, docs_out, sums_out);
    Corpus reloaded = corpus_from_strings(docs_out.str(), sums_out.str());
    CHECK(reloaded == corpus);
}
