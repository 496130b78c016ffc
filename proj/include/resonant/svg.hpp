#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "resonant/experiments.hpp"

namespace resonant {

struct LineSeries {
    std::string label;
    Eigen::VectorXd x;
    Eigen::VectorXd y;
    std::string color = "#1f77b4";
};

struct PlotOptions {
    std::string title;
    std::string x_label;
    std::string y_label;
    /// Plot log10|y|; zero values are dropped.
    bool log_y = false;
    int width = 760;
    int height = 440;
};

/// Static polyline chart. Output depends only on the arguments.
std::string line_plot(const std::vector<LineSeries>& series, const PlotOptions& options);

/// Raster of log10 NMSE per cell (frequency across, amplitude up) with a
/// color bar. Masked cells are drawn in a fixed blue.
std::string heatmap_svg(const HeatmapResult& result, const std::string& title);

/// Plots built from a prediction CSV: truth columns x, p and/or forecast
/// columns x_pred, p_pred, indexed by t or k when present.
enum class PlotKind { trajectory, residual, phase };
PlotKind parse_plot_kind(const std::string& name);
std::string prediction_plot(const Series& prediction, PlotKind kind);

}  // namespace resonant
