#include "factprobe/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <nlohmann/json.hpp>

#include "factprobe/errors.hpp"
#include "factprobe/io.hpp"
#include "factprobe/logging.hpp"
#include "factprobe/retrieval.hpp"
#include "factprobe/util.hpp"

namespace factprobe::analysis {

double claim_similarity(const corpus::Sentence& claim, const corpus::SourceDocument& doc,
                        embedding::EmbeddingProvider& provider) {
    return retrieval::mean_cosine_to_document(claim, doc, provider);
}

std::vector<DensityBin> bin_claims(const std::vector<scorer::SentenceScore>& scores,
                                   std::size_t bin_count) {
    if (scores.empty()) {
        throw EmptyInputError("bin_claims: no claims");
    }
    if (bin_count == 0) {
        throw EmptyInputError("bin_claims: bin_count must be >= 1");
    }
    double lo = 0.0;
    double hi = 0.0;
    bool first = true;
    for (const scorer::SentenceScore& score : scores) {
        if (!score.claim_similarity) {
            throw SchemaViolationError("bin_claims: claim " + score.summary_id + "#" +
                                       std::to_string(score.sentence_index) +
                                       " lacks claim_similarity");
        }
        double s = *score.claim_similarity;
        if (first) {
            lo = hi = s;
            first = false;
        } else {
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
    }

    // Degenerate range: every similarity equal -> one bin holding everything.
    const std::size_t bins = (hi == lo) ? 1 : bin_count;
    const double width = (hi - lo) / static_cast<double>(bins);

    std::vector<DensityBin> out(bins);
    std::vector<double> sums(bins, 0.0);
    for (std::size_t i = 0; i < bins; ++i) {
        out[i].bin_index = i;
        out[i].lo = lo + width * static_cast<double>(i);
        out[i].hi = (i + 1 == bins) ? hi : lo + width * static_cast<double>(i + 1);
    }
    for (const scorer::SentenceScore& score : scores) {
        std::size_t index = 0;
        if (bins > 1) {
            index = static_cast<std::size_t>((*score.claim_similarity - lo) / width);
            if (index >= bins) index = bins - 1; // top bin is closed on both ends
        }
        out[index].claim_count += 1;
        sums[index] += score.value;
    }
    for (std::size_t i = 0; i < bins; ++i) {
        if (out[i].claim_count > 0) {
            out[i].mean_score = sums[i] / static_cast<double>(out[i].claim_count);
        }
    }
    return out;
}

DiffResult diff_stats(const std::vector<scorer::SummaryScore>& original_scores,
                      const std::vector<scorer::SummaryScore>& perturbed_scores) {
    struct OriginalKey {
        std::string summary_id;
        std::string metric;
        std::size_t top_k;
        std::size_t window;
        auto operator<=>(const OriginalKey&) const = default;
    };
    std::map<OriginalKey, double> originals;
    for (const scorer::SummaryScore& score : original_scores) {
        originals[{score.summary_id, score.metric_name, score.config.top_k,
                   score.config.window}] = score.value;
    }

    // Deterministic pairing order.
    std::vector<const scorer::SummaryScore*> perturbed;
    perturbed.reserve(perturbed_scores.size());
    for (const scorer::SummaryScore& score : perturbed_scores) perturbed.push_back(&score);
    std::sort(perturbed.begin(), perturbed.end(),
              [](const scorer::SummaryScore* a, const scorer::SummaryScore* b) {
                  return std::tie(a->summary_id, a->metric_name, a->config.top_k,
                                  a->config.window) < std::tie(b->summary_id, b->metric_name,
                                                               b->config.top_k, b->config.window);
              });

    std::map<DiffKey, DiffRecord> grouped;
    for (const scorer::SummaryScore* score : perturbed) {
        if (!score->parent_id) {
            throw UnpairedRecordError("perturbed score for '" + score->summary_id +
                                      "' carries no parent_id");
        }
        auto it = originals.find({*score->parent_id, score->metric_name, score->config.top_k,
                                  score->config.window});
        if (it == originals.end()) {
            throw UnpairedRecordError("no original score for '" + *score->parent_id +
                                      "' under metric '" + score->metric_name +
                                      "' with the same configuration");
        }
        DiffKey key{score->metric_name, corpus::to_string(score->variant), score->dataset};
        DiffRecord& record = grouped[key];
        record.key = key;
        record.pairs.emplace_back(it->second, score->value);
        record.diffs.push_back(score->value - it->second);
    }

    DiffResult result;
    for (auto& [key, record] : grouped) {
        DiffStats stats;
        stats.key = key;
        stats.count = record.diffs.size();
        double sum = 0.0;
        stats.min = record.diffs.front();
        stats.max = record.diffs.front();
        for (double diff : record.diffs) {
            sum += diff;
            stats.min = std::min(stats.min, diff);
            stats.max = std::max(stats.max, diff);
        }
        stats.mean = sum / static_cast<double>(stats.count);
        result.stats.push_back(stats);
        result.records.push_back(std::move(record));
    }
    return result;
}

// ---------------------------------------------------------------------------
// CSV tables
// ---------------------------------------------------------------------------

namespace {

// Column order of the per-variant means table.
const std::vector<corpus::SummaryVariant>& report_variant_order() {
    static const std::vector<corpus::SummaryVariant> kOrder = {
        corpus::SummaryVariant::original,         corpus::SummaryVariant::synonym_replaced,
        corpus::SummaryVariant::summarized,       corpus::SummaryVariant::simplified,
        corpus::SummaryVariant::paraphrased,      corpus::SummaryVariant::negated,
        corpus::SummaryVariant::less_diverse,     corpus::SummaryVariant::added_source_text,
    };
    return kOrder;
}

} // namespace

std::string sweep_to_csv(const std::vector<scorer::SweepCell>& cells) {
    std::string csv = "metric,dataset,w,mean_score\n";
    for (const scorer::SweepCell& cell : cells) {
        csv += cell.metric + "," + cell.dataset + "," + std::to_string(cell.window) + "," +
               util::format_fixed(cell.mean_score, 4) + "\n";
    }
    return csv;
}

std::string density_to_csv(const std::vector<DensityGroup>& groups) {
    std::string csv = "dataset,metric,bin_index,lo,hi,claim_count,mean_score\n";
    for (const DensityGroup& group : groups) {
        for (const DensityBin& bin : group.bins) {
            csv += group.dataset + "," + group.metric + "," + std::to_string(bin.bin_index) +
                   "," + util::format_fixed(bin.lo, 4) + "," + util::format_fixed(bin.hi, 4) +
                   "," + std::to_string(bin.claim_count) + ",";
            if (bin.mean_score) csv += util::format_fixed(*bin.mean_score, 4);
            csv += "\n";
        }
    }
    return csv;
}

std::string diffs_to_csv(const std::vector<scorer::SummaryScore>& scores) {
    std::string csv = "dataset,metric";
    for (corpus::SummaryVariant variant : report_variant_order()) {
        csv += std::string(",") + corpus::to_string(variant);
    }
    csv += "\n";

    // (dataset, metric) -> variant -> (sum, count)
    std::map<std::pair<std::string, std::string>,
             std::map<corpus::SummaryVariant, std::pair<double, std::size_t>>>
        table;
    for (const scorer::SummaryScore& score : scores) {
        auto& cell = table[{score.dataset, score.metric_name}][score.variant];
        cell.first += score.value;
        cell.second += 1;
    }
    for (const auto& [key, row] : table) {
        csv += key.first + "," + key.second;
        for (corpus::SummaryVariant variant : report_variant_order()) {
            csv += ",";
            auto it = row.find(variant);
            if (it != row.end()) {
                csv += util::format_fixed(it->second.first /
                                              static_cast<double>(it->second.second),
                                          4);
            }
        }
        csv += "\n";
    }
    return csv;
}

// ---------------------------------------------------------------------------
// SVG plots
// ---------------------------------------------------------------------------

namespace {

const std::vector<std::string>& plot_palette() {
    static const std::vector<std::string> kPalette = {"#1f77b4", "#ff7f0e", "#2ca02c",
                                                      "#d62728", "#9467bd", "#8c564b",
                                                      "#e377c2", "#7f7f7f"};
    return kPalette;
}

std::string svg_header(int width, int height) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
           "\" height=\"" + std::to_string(height) + "\">\n"
           "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

std::string svg_text(double x, double y, const std::string& text, int size,
                     const std::string& anchor = "middle") {
    return "<text x=\"" + util::format_fixed(x, 1) + "\" y=\"" + util::format_fixed(y, 1) +
           "\" font-size=\"" + std::to_string(size) + "\" font-family=\"sans-serif\" "
           "text-anchor=\"" + anchor + "\">" + text + "</text>\n";
}

std::string svg_line(double x1, double y1, double x2, double y2, const std::string& stroke,
                     double width = 1.0) {
    return "<line x1=\"" + util::format_fixed(x1, 1) + "\" y1=\"" + util::format_fixed(y1, 1) +
           "\" x2=\"" + util::format_fixed(x2, 1) + "\" y2=\"" + util::format_fixed(y2, 1) +
           "\" stroke=\"" + stroke + "\" stroke-width=\"" + util::format_fixed(width, 1) +
           "\"/>\n";
}

std::string svg_circle(double x, double y, double r, const std::string& fill) {
    return "<circle cx=\"" + util::format_fixed(x, 1) + "\" cy=\"" + util::format_fixed(y, 1) +
           "\" r=\"" + util::format_fixed(r, 1) + "\" fill=\"" + fill + "\"/>\n";
}

// Mean dot with min/max whiskers per (metric, variant) group.
std::string render_diff_plot(const std::string& dataset, const std::vector<DiffStats>& stats) {
    std::vector<std::string> metrics;
    std::vector<std::string> variants;
    for (const DiffStats& entry : stats) {
        if (entry.key.dataset != dataset) continue;
        if (std::find(metrics.begin(), metrics.end(), entry.key.metric) == metrics.end()) {
            metrics.push_back(entry.key.metric);
        }
        if (std::find(variants.begin(), variants.end(), entry.key.variant) == variants.end()) {
            variants.push_back(entry.key.variant);
        }
    }
    const int width = 900;
    const int height = 420;
    const double left = 70.0, right = 30.0, top = 40.0, bottom = 80.0;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;
    auto y_of = [&](double value) { return top + (1.0 - value) / 2.0 * plot_h; }; // [-1, 1]

    std::string svg = svg_header(width, height);
    svg += svg_text(width / 2.0, 22.0, "score difference (perturbed - original): " + dataset, 14);
    for (double grid : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
        svg += svg_line(left, y_of(grid), width - right, y_of(grid),
                        grid == 0.0 ? "#888888" : "#dddddd");
        svg += svg_text(left - 8.0, y_of(grid) + 4.0, util::format_fixed(grid, 1), 11, "end");
    }
    const double group_w = plot_w / std::max<std::size_t>(1, variants.size());
    for (std::size_t v = 0; v < variants.size(); ++v) {
        double x0 = left + group_w * static_cast<double>(v);
        svg += svg_text(x0 + group_w / 2.0, height - bottom + 30.0, variants[v], 10);
        for (std::size_t m = 0; m < metrics.size(); ++m) {
            const DiffStats* cell = nullptr;
            for (const DiffStats& entry : stats) {
                if (entry.key.dataset == dataset && entry.key.metric == metrics[m] &&
                    entry.key.variant == variants[v]) {
                    cell = &entry;
                    break;
                }
            }
            if (cell == nullptr) continue;
            double x = x0 + group_w * (static_cast<double>(m) + 1.0) /
                                (static_cast<double>(metrics.size()) + 1.0);
            const std::string& color = plot_palette()[m % plot_palette().size()];
            svg += svg_line(x, y_of(cell->min), x, y_of(cell->max), color, 1.5);
            svg += svg_circle(x, y_of(cell->mean), 3.0, color);
        }
    }
    for (std::size_t m = 0; m < metrics.size(); ++m) {
        double x = left + 10.0 + 130.0 * static_cast<double>(m);
        const std::string& color = plot_palette()[m % plot_palette().size()];
        svg += svg_circle(x, height - 18.0, 4.0, color);
        svg += svg_text(x + 8.0, height - 14.0, metrics[m], 11, "start");
    }
    svg += "</svg>\n";
    return svg;
}

// Mean score per similarity bin, one polyline per metric.
std::string render_density_plot(const std::string& dataset,
                                const std::vector<DensityGroup>& groups) {
    const int width = 900;
    const int height = 420;
    const double left = 70.0, right = 30.0, top = 40.0, bottom = 60.0;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    double lo = 0.0, hi = 1.0;
    bool first = true;
    for (const DensityGroup& group : groups) {
        if (group.dataset != dataset || group.bins.empty()) continue;
        double g_lo = group.bins.front().lo;
        double g_hi = group.bins.back().hi;
        if (first) {
            lo = g_lo;
            hi = g_hi;
            first = false;
        } else {
            lo = std::min(lo, g_lo);
            hi = std::max(hi, g_hi);
        }
    }
    if (hi == lo) hi = lo + 1.0;
    auto x_of = [&](double s) { return left + (s - lo) / (hi - lo) * plot_w; };
    auto y_of = [&](double score) { return top + (1.0 - score) * plot_h; }; // [0, 1]

    std::string svg = svg_header(width, height);
    svg += svg_text(width / 2.0, 22.0, "mean score by claim similarity bin: " + dataset, 14);
    for (double grid : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        svg += svg_line(left, y_of(grid), width - right, y_of(grid), "#dddddd");
        svg += svg_text(left - 8.0, y_of(grid) + 4.0, util::format_fixed(grid, 2), 11, "end");
    }
    svg += svg_text(width / 2.0, height - 10.0, "claim similarity", 12);

    std::size_t color_index = 0;
    for (const DensityGroup& group : groups) {
        if (group.dataset != dataset) continue;
        const std::string& color = plot_palette()[color_index % plot_palette().size()];
        std::string points;
        for (const DensityBin& bin : group.bins) {
            if (!bin.mean_score) continue;
            double cx = x_of((bin.lo + bin.hi) / 2.0);
            double cy = y_of(*bin.mean_score);
            if (!points.empty()) points += ' ';
            points += util::format_fixed(cx, 1) + "," + util::format_fixed(cy, 1);
            svg += svg_circle(cx, cy, 2.5, color);
        }
        if (!points.empty()) {
            svg += "<polyline points=\"" + points + "\" fill=\"none\" stroke=\"" + color +
                   "\" stroke-width=\"1.5\"/>\n";
        }
        svg += svg_text(left + 10.0 + 130.0 * static_cast<double>(color_index), 34.0,
                        group.metric, 11, "start");
        ++color_index;
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace

ReportBundle emit_report(const ReportInputs& inputs, const ReportOptions& options) {
    if (options.out_dir.empty()) {
        throw IoError("emit_report: output directory is empty");
    }
    io::ensure_dir(options.out_dir);

    ReportBundle bundle;
    bundle.has_data = !inputs.diffs.stats.empty();

    auto emit = [&](const std::string& name, const std::string& content) {
        io::write_file_if_changed(options.out_dir + "/" + name, content);
        bundle.files_written.push_back(name);
    };

    emit("diffs.csv", diffs_to_csv(inputs.scores));
    if (!inputs.sweep.empty()) emit("sweep.csv", sweep_to_csv(inputs.sweep));
    if (!inputs.density.empty()) emit("density.csv", density_to_csv(inputs.density));

    nlohmann::ordered_json summary;
    summary["status"] = bundle.has_data ? "ok" : "no_data";
    summary["score_count"] = inputs.scores.size();
    {
        std::vector<std::string> datasets;
        std::vector<std::string> metric_names;
        for (const scorer::SummaryScore& score : inputs.scores) {
            if (std::find(datasets.begin(), datasets.end(), score.dataset) == datasets.end()) {
                datasets.push_back(score.dataset);
            }
            if (std::find(metric_names.begin(), metric_names.end(), score.metric_name) ==
                metric_names.end()) {
                metric_names.push_back(score.metric_name);
            }
        }
        std::sort(datasets.begin(), datasets.end());
        std::sort(metric_names.begin(), metric_names.end());
        summary["datasets"] = datasets;
        summary["metrics"] = metric_names;
    }
    nlohmann::ordered_json stats_json = nlohmann::ordered_json::array();
    for (const DiffStats& stats : inputs.diffs.stats) {
        stats_json.push_back({{"metric", stats.key.metric},
                              {"variant", stats.key.variant},
                              {"dataset", stats.key.dataset},
                              {"mean_diff", stats.mean},
                              {"min_diff", stats.min},
                              {"max_diff", stats.max},
                              {"count", stats.count}});
    }
    if (stats_json.empty()) {
        summary["diff_stats"] = "no data";
    } else {
        summary["diff_stats"] = std::move(stats_json);
    }

    if (options.plots) {
        io::ensure_dir(options.out_dir + "/plots");
        std::vector<std::string> datasets;
        for (const DiffStats& stats : inputs.diffs.stats) {
            if (std::find(datasets.begin(), datasets.end(), stats.key.dataset) ==
                datasets.end()) {
                datasets.push_back(stats.key.dataset);
            }
        }
        std::sort(datasets.begin(), datasets.end());
        for (const std::string& dataset : datasets) {
            emit("plots/diffs_" + dataset + ".svg",
                 render_diff_plot(dataset, inputs.diffs.stats));
        }
        std::vector<std::string> density_datasets;
        for (const DensityGroup& group : inputs.density) {
            if (std::find(density_datasets.begin(), density_datasets.end(), group.dataset) ==
                density_datasets.end()) {
                density_datasets.push_back(group.dataset);
            }
        }
        std::sort(density_datasets.begin(), density_datasets.end());
        for (const std::string& dataset : density_datasets) {
            emit("plots/density_" + dataset + ".svg",
                 render_density_plot(dataset, inputs.density));
        }
    }

    summary["files"] = bundle.files_written; // summary.json itself excluded
    emit("summary.json", summary.dump(2) + "\n");

    if (!bundle.has_data) {
        log_event(LogLevel::error, "report.no_data",
                  {{"out_dir", options.out_dir}});
    }
    return bundle;
}

} // namespace factprobe::analysis
