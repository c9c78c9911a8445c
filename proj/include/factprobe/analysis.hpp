#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "factprobe/corpus.hpp"
#include "factprobe/embedding.hpp"
#include "factprobe/scorer.hpp"

namespace factprobe::analysis {

// Mean pairwise cosine between a claim and every source sentence. High
// values mark information-dense claims whose evidence is spread across the
// document.
double claim_similarity(const corpus::Sentence& claim, const corpus::SourceDocument& doc,
                        embedding::EmbeddingProvider& provider);

struct DensityBin {
    std::size_t bin_index = 0;
    double lo = 0.0;
    double hi = 0.0; // top bin is closed on both ends
    std::size_t claim_count = 0;
    std::optional<double> mean_score; // absent for empty bins
};

// Equal-width bins over the observed similarity range with per-bin mean
// scores. Every record must carry claim_similarity. A degenerate range (all
// similarities equal) collapses to a single bin holding everything.
std::vector<DensityBin> bin_claims(const std::vector<scorer::SentenceScore>& scores,
                                   std::size_t bin_count);

struct DiffKey {
    std::string metric;
    std::string variant;
    std::string dataset;

    auto operator<=>(const DiffKey&) const = default;
};

struct DiffRecord {
    DiffKey key;
    std::vector<std::pair<double, double>> pairs; // (original, perturbed)
    std::vector<double> diffs;                    // perturbed - original
};

struct DiffStats {
    DiffKey key;
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::size_t count = 0;
};

struct DiffResult {
    std::vector<DiffRecord> records; // sorted by key
    std::vector<DiffStats> stats;
};

// Pairs each perturbed score with its parent's original score under the same
// (metric, K, w) configuration and aggregates perturbed-minus-original
// differences per (metric, variant, dataset). Throws UnpairedRecordError
// when a perturbed score has no matching original.
DiffResult diff_stats(const std::vector<scorer::SummaryScore>& original_scores,
                      const std::vector<scorer::SummaryScore>& perturbed_scores);

// Rows of the density.csv table: bins per (dataset, metric).
struct DensityGroup {
    std::string dataset;
    std::string metric;
    std::vector<DensityBin> bins;
};

struct ReportInputs {
    std::vector<scorer::SummaryScore> scores;
    DiffResult diffs;
    std::vector<DensityGroup> density;  // optional
    std::vector<scorer::SweepCell> sweep; // optional
};

struct ReportOptions {
    std::string out_dir;
    bool plots = false;
};

struct ReportBundle {
    std::vector<std::string> files_written;
    bool has_data = false;
};

// Writes the report bundle: diffs.csv (rows = (dataset, metric), data
// columns = original + the seven variants), summary.json with the full diff
// statistics, plus sweep.csv / density.csv / plots when inputs are present.
// With no diff data the bundle still materializes, carrying explicit
// no-data markers, and has_data stays false.
ReportBundle emit_report(const ReportInputs& inputs, const ReportOptions& options);

std::string sweep_to_csv(const std::vector<scorer::SweepCell>& cells);
std::string density_to_csv(const std::vector<DensityGroup>& groups);
std::string diffs_to_csv(const std::vector<scorer::SummaryScore>& scores);

} // namespace factprobe::analysis
