#include "ferbench/report/figures.hpp"

#include <algorithm>
#include <cmath>

#include "ferbench/common.hpp"
#include "ferbench/io/files.hpp"

namespace ferbench {

namespace {

// Just enough SVG to make the shipped figures readable; the test surface is
// the sibling CSVs, not the drawings.

constexpr int kPlotW = 720;
constexpr int kPlotH = 380;
constexpr int kMarginLeft = 70;
constexpr int kMarginBottom = 90;
constexpr int kMarginTop = 30;
constexpr int kMarginRight = 20;

const char* kPalette[] = {"#4878d0", "#ee854a", "#6acc64", "#d65f5f",
                          "#956cb4", "#8c613c", "#dc7ec0"};

std::string svg_header(const std::string& title) {
    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    std::to_string(kPlotW) + "\" height=\"" + std::to_string(kPlotH) +
                    "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    s += "<text x=\"" + std::to_string(kPlotW / 2) + "\" y=\"18\" text-anchor=\"middle\" "
         "font-size=\"14\">" + title + "</text>\n";
    return s;
}

std::string svg_rect(double x, double y, double w, double h, const std::string& fill) {
    return "<rect x=\"" + format_fixed(x, 1) + "\" y=\"" + format_fixed(y, 1) +
           "\" width=\"" + format_fixed(std::max(w, 0.0), 1) + "\" height=\"" +
           format_fixed(std::max(h, 0.0), 1) + "\" fill=\"" + fill + "\"/>\n";
}

std::string svg_label(double x, double y, const std::string& text, bool rotate) {
    std::string s = "<text x=\"" + format_fixed(x, 1) + "\" y=\"" + format_fixed(y, 1) +
                    "\" text-anchor=\"" + (rotate ? "end" : "middle") + "\"";
    if (rotate)
        s += " transform=\"rotate(-45 " + format_fixed(x, 1) + " " + format_fixed(y, 1) + ")\"";
    s += ">" + text + "</text>\n";
    return s;
}

// Simple bar chart; log10 axis when requested (counts figure).
std::string bar_chart_svg(const std::string& title,
                          const std::vector<std::pair<std::string, double>>& bars,
                          bool log_axis) {
    std::string s = svg_header(title + (log_axis ? " (log scale)" : ""));
    double vmax = 1e-9;
    for (const auto& [name, v] : bars)
        vmax = std::max(vmax, log_axis ? std::log10(std::max(v, 1.0)) : v);
    const double plot_w = kPlotW - kMarginLeft - kMarginRight;
    const double plot_h = kPlotH - kMarginTop - kMarginBottom;
    const double band = plot_w / std::max<std::size_t>(bars.size(), 1);
    for (std::size_t i = 0; i < bars.size(); ++i) {
        const double v = log_axis ? std::log10(std::max(bars[i].second, 1.0)) : bars[i].second;
        const double h = plot_h * v / vmax;
        const double x = kMarginLeft + band * i + band * 0.125;
        s += svg_rect(x, kMarginTop + plot_h - h, band * 0.75, h, kPalette[0]);
        s += svg_label(kMarginLeft + band * i + band * 0.5, kMarginTop + plot_h + 14,
                       bars[i].first, bars.size() > 8);
    }
    s += "</svg>\n";
    return s;
}

// Stacked fractions per dataset row (gender / age group / class figures).
std::string stacked_bar_svg(const std::string& title,
                            const std::vector<std::string>& categories,
                            const std::vector<std::pair<std::string, std::vector<double>>>& rows) {
    std::string s = svg_header(title);
    const double plot_w = kPlotW - kMarginLeft - kMarginRight;
    const double plot_h = kPlotH - kMarginTop - kMarginBottom;
    const double band = plot_w / std::max<std::size_t>(rows.size(), 1);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        double y = kMarginTop + plot_h;
        for (std::size_t c = 0; c < rows[i].second.size(); ++c) {
            const double h = plot_h * rows[i].second[c];
            y -= h;
            s += svg_rect(kMarginLeft + band * i + band * 0.125, y, band * 0.75, h,
                          kPalette[c % 7]);
        }
        s += svg_label(kMarginLeft + band * i + band * 0.5, kMarginTop + plot_h + 14,
                       rows[i].first, rows.size() > 8);
    }
    for (std::size_t c = 0; c < categories.size(); ++c) {
        const double x = kMarginLeft + 90.0 * static_cast<double>(c);
        s += svg_rect(x, kPlotH - 16, 10, 10, kPalette[c % 7]);
        s += "<text x=\"" + format_fixed(x + 14, 1) + "\" y=\"" +
             std::to_string(kPlotH - 7) + "\">" + categories[c] + "</text>\n";
    }
    s += "</svg>\n";
    return s;
}

// Grouped bars per dataset, one series per model (LS / GS by network).
std::string grouped_bar_svg(const std::string& title,
                            const std::vector<std::string>& models,
                            const std::vector<std::pair<std::string, std::vector<double>>>& rows) {
    std::string s = svg_header(title);
    const double plot_w = kPlotW - kMarginLeft - kMarginRight;
    const double plot_h = kPlotH - kMarginTop - kMarginBottom;
    const double band = plot_w / std::max<std::size_t>(rows.size(), 1);
    const double sub = band * 0.75 / std::max<std::size_t>(models.size(), 1);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t m = 0; m < rows[i].second.size(); ++m) {
            const double h = plot_h * std::clamp(rows[i].second[m], 0.0, 1.5) / 1.0;
            s += svg_rect(kMarginLeft + band * i + band * 0.125 + sub * m,
                          kMarginTop + plot_h - std::min(h, plot_h), sub * 0.9,
                          std::min(h, plot_h), kPalette[m % 7]);
        }
        s += svg_label(kMarginLeft + band * i + band * 0.5, kMarginTop + plot_h + 14,
                       rows[i].first, rows.size() > 8);
    }
    for (std::size_t m = 0; m < models.size(); ++m) {
        const double x = kMarginLeft + 120.0 * static_cast<double>(m);
        s += svg_rect(x, kPlotH - 16, 10, 10, kPalette[m % 7]);
        s += "<text x=\"" + format_fixed(x + 14, 1) + "\" y=\"" +
             std::to_string(kPlotH - 7) + "\">" + models[m] + "</text>\n";
    }
    s += "</svg>\n";
    return s;
}

// Heatmap, rows = training dataset, columns = testing dataset.
std::string heatmap_svg(const std::string& title,
                        const std::vector<std::string>& datasets,
                        const std::vector<std::vector<std::optional<double>>>& values) {
    std::string s = svg_header(title);
    const double plot_w = kPlotW - kMarginLeft - kMarginRight;
    const double plot_h = kPlotH - kMarginTop - kMarginBottom;
    const std::size_t n = datasets.size();
    const double cw = plot_w / std::max<std::size_t>(n, 1);
    const double ch = plot_h / std::max<std::size_t>(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            std::string fill = "#cccccc";  // undefined cells stay gray
            if (values[i][j]) {
                const double v = std::clamp(*values[i][j], 0.0, 1.25) / 1.25;
                const int r = static_cast<int>(255 * (1.0 - v));
                const int g = static_cast<int>(80 + 140 * v);
                const int b = static_cast<int>(255 * v * 0.6 + 60);
                char buf[8];
                std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
                fill = buf;
            }
            s += svg_rect(kMarginLeft + cw * j, kMarginTop + ch * i, cw - 1, ch - 1, fill);
        }
        s += svg_label(kMarginLeft - 6, kMarginTop + ch * i + ch * 0.6, datasets[i], true);
        s += svg_label(kMarginLeft + cw * i + cw * 0.5, kMarginTop + plot_h + 14,
                       datasets[i], n > 8);
    }
    s += "</svg>\n";
    return s;
}

}  // namespace

FigureOutput render_figures(const StatisticsBundle* stats,
                            const SimilarityReport* report,
                            const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    FigureOutput out;

    auto emit = [&](const std::string& stem, const std::string& svg,
                    const std::string& csv) {
        io::atomic_write(out_dir / (stem + ".svg"), svg);
        io::atomic_write(out_dir / (stem + ".csv"), csv);
        out.written.push_back(stem + ".svg");
        out.written.push_back(stem + ".csv");
    };
    auto skip = [&](const std::string& stem, const std::string& why) {
        out.notices.push_back("skipped " + stem + ": " + why);
    };

    if (stats) {
        {
            std::vector<std::pair<std::string, double>> bars;
            std::string csv = io::csv_row({"dataset", "image_count"});
            for (const auto& [name, count] : stats->image_count_per_dataset) {
                bars.emplace_back(name, static_cast<double>(count));
                csv += io::csv_row({name, std::to_string(count)});
            }
            emit("image_counts", bar_chart_svg("Images per dataset", bars, true), csv);
        }
        if (stats->user_count_per_dataset.empty()) {
            skip("user_counts", "no dataset carries user ids");
            skip("images_per_user", "no dataset carries user ids");
        } else {
            std::vector<std::pair<std::string, double>> bars;
            std::string csv = io::csv_row({"dataset", "user_count"});
            for (const auto& [name, count] : stats->user_count_per_dataset) {
                bars.emplace_back(name, static_cast<double>(count));
                csv += io::csv_row({name, std::to_string(count)});
            }
            emit("user_counts", bar_chart_svg("Users per dataset", bars, false), csv);

            std::vector<std::pair<std::string, double>> ipu;
            std::string csv2 = io::csv_row({"dataset", "images_per_user"});
            for (const auto& [name, v] : stats->images_per_user) {
                ipu.emplace_back(name, v);
                csv2 += io::csv_row({name, format_double(v)});
            }
            emit("images_per_user", bar_chart_svg("Images per user", ipu, false), csv2);
        }
        if (stats->age_histogram.empty()) {
            skip("age_histogram", "no age annotations present");
        } else {
            std::vector<std::pair<std::string, double>> bars;
            std::string csv = io::csv_row({"age_years", "count"});
            for (const auto& [age, count] : stats->age_histogram) {
                bars.emplace_back(std::to_string(age), static_cast<double>(count));
                csv += io::csv_row({std::to_string(age), std::to_string(count)});
            }
            emit("age_histogram", bar_chart_svg("Age histogram (all datasets)", bars, false),
                 csv);
        }

        auto emit_distribution = [&](const std::string& stem, const std::string& title,
                                     const auto& map, const auto& categories) {
            if (map.empty()) {
                skip(stem, "statistic empty");
                return;
            }
            std::vector<std::string> names;
            for (const auto& c : categories) names.push_back(to_string(c));
            std::vector<std::pair<std::string, std::vector<double>>> rows;
            std::vector<std::string> header = {"dataset"};
            header.insert(header.end(), names.begin(), names.end());
            std::string csv = io::csv_row(header);
            for (const auto& [dataset, dist] : map) {
                std::vector<double> vals;
                std::vector<std::string> cells = {dataset};
                for (const auto& c : categories) {
                    auto it = dist.find(c);
                    const double v = it == dist.end() ? 0.0 : it->second;
                    vals.push_back(v);
                    cells.push_back(format_double(v));
                }
                rows.emplace_back(dataset, vals);
                csv += io::csv_row(cells);
            }
            emit(stem, stacked_bar_svg(title, names, rows), csv);
        };

        emit_distribution("gender_distribution", "Gender distribution",
                          stats->gender_distribution,
                          std::vector<Gender>{Gender::male, Gender::female});
        emit_distribution("age_group_distribution", "Age-group distribution",
                          stats->age_group_distribution,
                          std::vector<AgeGroup>{AgeGroup::child, AgeGroup::adult,
                                                AgeGroup::elderly});
        emit_distribution("class_distribution", "Class distribution",
                          stats->class_distribution,
                          std::vector<ExpressionLabel>(all_expression_labels().begin(),
                                                       all_expression_labels().end()));
    } else {
        skip("dataset_statistics", "no statistics bundle supplied");
    }

    if (report) {
        auto per_model_figure = [&](const std::string& stem, const std::string& title,
                                    auto accessor) {
            std::vector<std::pair<std::string, std::vector<double>>> rows;
            std::vector<std::string> header = {"dataset"};
            header.insert(header.end(), report->models.begin(), report->models.end());
            std::string csv = io::csv_row(header);
            for (std::size_t i = 0; i < report->datasets.size(); ++i) {
                std::vector<double> vals;
                std::vector<std::string> cells = {report->datasets[i]};
                for (const auto& m : report->models) {
                    const auto& v = accessor(report->per_model.at(m), i);
                    vals.push_back(v.value_or(0.0));
                    cells.push_back(v ? format_fixed(*v, 4) : std::string());
                }
                rows.emplace_back(report->datasets[i], vals);
                csv += io::csv_row(cells);
            }
            emit(stem, grouped_bar_svg(title, report->models, rows), csv);
        };
        per_model_figure("local_similarity_by_model", "Local similarity per network",
                         [](const SimilarityTable& t, std::size_t i) { return t.ls[i]; });
        per_model_figure("global_similarity_by_model", "Global similarity per network",
                         [](const SimilarityTable& t, std::size_t i) { return t.gs[i]; });

        {
            std::vector<std::string> header = {"train_dataset"};
            header.insert(header.end(), report->datasets.begin(), report->datasets.end());
            std::string csv = io::csv_row(header);
            for (std::size_t i = 0; i < report->datasets.size(); ++i) {
                std::vector<std::string> cells = {report->datasets[i]};
                for (std::size_t j = 0; j < report->datasets.size(); ++j) {
                    const auto& v = report->aggregate.ps[i][j];
                    cells.push_back(v ? format_fixed(*v, 4) : std::string());
                }
                csv += io::csv_row(cells);
            }
            emit("paired_similarity_heatmap",
                 heatmap_svg("Paired similarity (rows = train, columns = test)",
                             report->datasets, report->aggregate.ps),
                 csv);
        }
    } else {
        skip("similarity_figures", "no similarity report supplied");
    }

    return out;
}

}  // namespace ferbench
