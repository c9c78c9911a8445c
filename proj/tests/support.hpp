// Shared test helpers: temp workspaces, log capture, fixture builders.
#pragma once

#include <atomic>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "factprobe/corpus.hpp"
#include "factprobe/logging.hpp"

namespace testsupport {

// Unique scratch directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        path_ = (std::filesystem::temp_directory_path() /
                 ("factprobe-" + tag + "-" + std::to_string(::getpid()) + "-" +
                  std::to_string(counter.fetch_add(1))))
                    .string();
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::string& path() const { return path_; }
    std::string file(const std::string& name) const { return path_ + "/" + name; }

private:
    std::string path_;
};

inline void write_file(const std::string& path, const std::string& content) {
    std::filesystem::create_directories(std::filesystem::path(path).parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// Captures JSON log events for the lifetime of the object.
class LogCapture {
public:
    LogCapture() {
        previous_ = factprobe::set_log_sink([this](const std::string& line) {
            std::lock_guard<std::mutex> lock(mutex_);
            lines_.push_back(line);
        });
    }
    ~LogCapture() { factprobe::set_log_sink(previous_); }

    std::vector<std::string> lines() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return lines_;
    }
    bool contains(const std::string& needle) const {
        std::lock_guard<std::mutex> lock(mutex_);
        for (const std::string& line : lines_) {
            if (line.find(needle) != std::string::npos) return true;
        }
        return false;
    }

private:
    factprobe::LogSink previous_;
    mutable std::mutex mutex_;
    mutable std::vector<std::string> lines_;
};

// ---------------------------------------------------------------------------
// Random corpora (fixed vocabulary keeps overlap scores interesting).
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& vocabulary() {
    static const std::vector<std::string> kWords = {
        "river",  "stone",   "harbor", "signal", "engine",  "forest", "copper", "window",
        "margin", "anchor",  "silver", "meadow", "lantern", "thread", "hollow", "summit",
        "cinder", "harvest", "motor",  "basin",  "ledger",  "canyon", "beacon", "timber",
        "vessel", "garden",  "mirror", "tunnel", "saddle",  "quarry", "marble", "docket",
        "prairie", "gantry", "furnace", "sluice", "paddock", "trellis", "culvert", "bobbin",
    };
    return kWords;
}

inline std::string random_sentence(std::mt19937& rng, std::size_t min_words = 4,
                                   std::size_t max_words = 9) {
    std::uniform_int_distribution<std::size_t> length(min_words, max_words);
    std::uniform_int_distribution<std::size_t> pick(0, vocabulary().size() - 1);
    std::size_t words = length(rng);
    std::string sentence;
    for (std::size_t i = 0; i < words; ++i) {
        if (i > 0) sentence += ' ';
        sentence += vocabulary()[pick(rng)];
    }
    sentence += '.';
    sentence[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(sentence[0])));
    return sentence;
}

inline factprobe::corpus::SourceDocument random_document(std::mt19937& rng,
                                                         const std::string& doc_id,
                                                         const std::string& dataset,
                                                         std::size_t sentence_count) {
    factprobe::corpus::SourceDocument doc;
    doc.doc_id = doc_id;
    doc.dataset = dataset;
    for (std::size_t i = 0; i < sentence_count; ++i) {
        doc.sentences.push_back({i, random_sentence(rng), std::nullopt});
    }
    return doc;
}

// Summary sentences either copy a document sentence or remix vocabulary, so
// per-sentence scores spread over (0, 1].
inline factprobe::corpus::SummaryRecord random_summary(std::mt19937& rng,
                                                       const std::string& summary_id,
                                                       const factprobe::corpus::SourceDocument& doc,
                                                       std::size_t sentence_count) {
    factprobe::corpus::SummaryRecord summary;
    summary.summary_id = summary_id;
    summary.doc_ref = doc.doc_id;
    summary.variant = factprobe::corpus::SummaryVariant::original;
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_int_distribution<std::size_t> pick_sentence(0, doc.sentences.size() - 1);
    for (std::size_t j = 0; j < sentence_count; ++j) {
        std::string text = coin(rng) == 0 ? doc.sentences[pick_sentence(rng)].text
                                          : random_sentence(rng);
        summary.sentences.push_back({j, std::move(text), std::nullopt});
    }
    return summary;
}

} // namespace testsupport
