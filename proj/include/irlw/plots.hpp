/* SPDX-FileCopyrightText: Copyright (c) 2026 the irlw authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <irlw/io.hpp>
#include <irlw/solver.hpp>

namespace irlw {

struct PlotSeries {
  std::string title;
  std::vector<double> xs;
  std::vector<double> ys;
};

namespace detail {

inline std::string format_coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace detail

/**
 * Minimal deterministic line plot.  The axis ranges cover the series
 * extrema and are exposed as data-{x,y}-{min,max} attributes on the root
 * element; output bytes depend only on the series values.
 */
inline void write_line_plot_svg(const std::filesystem::path& path,
                                const PlotSeries& series) {
  if (series.xs.size() != series.ys.size() || series.xs.empty())
    throw ParameterError("write_line_plot_svg: empty or ragged series");
  double xmin = series.xs[0], xmax = series.xs[0];
  double ymin = series.ys[0], ymax = series.ys[0];
  for (double x : series.xs) {
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
  }
  for (double y : series.ys) {
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  }
  if (xmax == xmin) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (ymax == ymin) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  // plot area: x in [60, 620], y in [40, 440] (SVG y grows downward)
  const auto px = [&](double x) {
    return 60.0 + (x - xmin) / (xmax - xmin) * 560.0;
  };
  const auto py = [&](double y) {
    return 440.0 - (y - ymin) / (ymax - ymin) * 400.0;
  };

  std::ofstream out(path);
  if (!out) throw IoError("cannot write plot " + path.string());
  using detail::format_coord;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" "
         "height=\"480\" viewBox=\"0 0 640 480\""
      << " data-x-min=\"" << format_double(xmin) << "\""
      << " data-x-max=\"" << format_double(xmax) << "\""
      << " data-y-min=\"" << format_double(ymin) << "\""
      << " data-y-max=\"" << format_double(ymax) << "\">\n";
  out << "  <rect x=\"0\" y=\"0\" width=\"640\" height=\"480\" "
         "fill=\"white\"/>\n";
  out << "  <text x=\"320\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">"
      << series.title << "</text>\n";
  out << "  <line x1=\"60\" y1=\"440\" x2=\"620\" y2=\"440\" "
         "stroke=\"black\"/>\n";
  out << "  <line x1=\"60\" y1=\"40\" x2=\"60\" y2=\"440\" "
         "stroke=\"black\"/>\n";
  out << "  <text x=\"60\" y=\"458\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"12\">"
      << format_coord(xmin) << "</text>\n";
  out << "  <text x=\"620\" y=\"458\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"12\">"
      << format_coord(xmax) << "</text>\n";
  out << "  <text x=\"54\" y=\"444\" text-anchor=\"end\" "
         "font-family=\"sans-serif\" font-size=\"12\">"
      << format_coord(ymin) << "</text>\n";
  out << "  <text x=\"54\" y=\"44\" text-anchor=\"end\" "
         "font-family=\"sans-serif\" font-size=\"12\">"
      << format_coord(ymax) << "</text>\n";
  if (series.xs.size() == 1) {
    out << "  <circle cx=\"" << format_coord(px(series.xs[0])) << "\" cy=\""
        << format_coord(py(series.ys[0])) << "\" r=\"3\" fill=\"#1f77b4\"/>\n";
  } else {
    out << "  <polyline fill=\"none\" stroke=\"#1f77b4\" "
           "stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < series.xs.size(); ++i) {
      if (i) out << " ";
      out << format_coord(px(series.xs[i])) << ","
          << format_coord(py(series.ys[i]));
    }
    out << "\"/>\n";
  }
  out << "</svg>\n";
  if (!out) throw IoError("failed writing plot " + path.string());
}

struct PlotReport {
  std::vector<std::filesystem::path> written;
  std::vector<std::string> skipped;  // plot name + reason
};

/**
 * Emit the standard diagnostic plots of a trace: residual per step, the
 * lambda_k values, the residual ratios |F(u_k)-y| / |A u_k - y| and
 * |F(u_k)-y| / (lambda_k |A u_k - y|), plus a grayscale heatmap of the
 * reconstruction.  Series a trace does not carry (no damping operator, no
 * final iterate) are skipped and noted in the report.
 */
inline PlotReport emit_plots(const IterationTrace& trace,
                             const std::filesystem::path& dir) {
  if (trace.records.empty())
    throw ParameterError("emit_plots: trace has no records");
  std::filesystem::create_directories(dir);
  PlotReport report;

  const auto emit = [&](const std::string& name, const PlotSeries& series) {
    const auto path = dir / name;
    write_line_plot_svg(path, series);
    report.written.push_back(path);
  };

  PlotSeries residual{"residual per iteration", {}, {}};
  PlotSeries lambda{"lambda_k per iteration", {}, {}};
  PlotSeries ratio{"residual_F / residual_A", {}, {}};
  PlotSeries ratio_weighted{"residual_F / (lambda_k * residual_A)", {}, {}};
  for (const auto& rec : trace.records) {
    const double k = static_cast<double>(rec.k);
    residual.xs.push_back(k);
    residual.ys.push_back(rec.residual_F);
    if (rec.lambda_k) {
      lambda.xs.push_back(k);
      lambda.ys.push_back(*rec.lambda_k);
    }
    if (rec.residual_A && *rec.residual_A != 0.0) {
      ratio.xs.push_back(k);
      ratio.ys.push_back(rec.residual_F / *rec.residual_A);
      if (rec.lambda_k && *rec.lambda_k != 0.0) {
        ratio_weighted.xs.push_back(k);
        ratio_weighted.ys.push_back(rec.residual_F /
                                    (*rec.lambda_k * *rec.residual_A));
      }
    }
  }

  emit("residual.svg", residual);
  if (!lambda.xs.empty())
    emit("lambda.svg", lambda);
  else
    report.skipped.emplace_back("lambda.svg: trace has no lambda_k");
  if (!ratio.xs.empty())
    emit("residual_ratio.svg", ratio);
  else
    report.skipped.emplace_back("residual_ratio.svg: trace has no residual_A");
  if (!ratio_weighted.xs.empty())
    emit("residual_ratio_weighted.svg", ratio_weighted);
  else
    report.skipped.emplace_back(
        "residual_ratio_weighted.svg: trace has no lambda-weighted ratio");
  if (!trace.final_iterate.empty()) {
    const auto path = dir / "reconstruction_heatmap.pgm";
    write_pgm_normalized(path, trace.final_iterate);
    report.written.push_back(path);
  } else {
    report.skipped.emplace_back(
        "reconstruction_heatmap.pgm: trace carries no final iterate");
  }
  return report;
}

}  // namespace irlw
