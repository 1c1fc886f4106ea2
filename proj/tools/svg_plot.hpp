#ifndef RINGKIT_TOOLS_SVG_PLOT_HPP
#define RINGKIT_TOOLS_SVG_PLOT_HPP

#include <filesystem>
#include <string>
#include <vector>

namespace ringkit::svg
{

struct Series
{
    std::string label;
    std::string color = "#1f77b4";
    std::vector<double> x;
    std::vector<double> y;
    bool markers = false; // circles instead of a polyline
};

struct Plot
{
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    int width = 900;
    int height = 500;
};

// Deterministic SVG text (fixed-precision coordinates).
std::string render(const Plot &plot);

struct Heatmap
{
    std::string title;
    std::string x_label;
    std::string y_label;
    int x_first = 0; // index label of the first column
    int y_first = 0;
    int columns = 0;
    int rows = 0;
    std::vector<double> values; // row-major
    bool log_scale = true;
};

std::string render(const Heatmap &map);

void save(const std::filesystem::path &path, const std::string &svg);

// Min/max envelope per bucket so dense sweeps stay small and keep narrow dips visible.
Series envelope(const std::vector<double> &x, const std::vector<double> &y, std::size_t buckets);

} // namespace ringkit::svg

#endif // RINGKIT_TOOLS_SVG_PLOT_HPP
