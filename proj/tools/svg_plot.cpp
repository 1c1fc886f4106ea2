#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "ringkit/errors.hpp"

namespace ringkit::svg
{

namespace
{

constexpr int kMarginLeft = 80;
constexpr int kMarginRight = 30;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 60;

std::string num(double v, int precision = 2)
{
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
    return buf;
}

std::string tick_label(double v)
{
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

std::string escape(const std::string &s)
{
    std::string out;
    for (const char c : s)
    {
        switch (c)
        {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Range
{
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v)
    {
        if (std::isfinite(v))
        {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    void finish()
    {
        if (!std::isfinite(lo))
        {
            lo = 0.0;
            hi = 1.0;
        }
        if (hi - lo <= 0.0)
        {
            const double pad = lo == 0.0 ? 1.0 : 0.05 * std::abs(lo);
            lo -= pad;
            hi += pad;
        }
        else
        {
            const double pad = 0.04 * (hi - lo);
            lo -= pad;
            hi += pad;
        }
    }
};

std::vector<double> ticks(const Range &r, int target = 6)
{
    const double span = r.hi - r.lo;
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (const double m : {1.0, 2.0, 5.0, 10.0})
    {
        step = m * mag;
        if (step >= raw)
        {
            break;
        }
    }
    std::vector<double> out;
    for (double t = std::ceil(r.lo / step) * step; t <= r.hi + 1e-9 * step; t += step)
    {
        out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
    }
    return out;
}

void header(std::ostringstream &os, int width, int height, const std::string &title)
{
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
       << "</text>\n";
}

void axis_labels(std::ostringstream &os, int width, int height, const std::string &x_label,
                 const std::string &y_label)
{
    os << "<text x=\"" << (kMarginLeft + width - kMarginRight) / 2 << "\" y=\"" << height - 15
       << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n";
    os << "<text x=\"18\" y=\"" << (kMarginTop + height - kMarginBottom) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
       << (kMarginTop + height - kMarginBottom) / 2 << ")\">" << escape(y_label) << "</text>\n";
}

} // namespace

std::string render(const Plot &plot)
{
    Range xr;
    Range yr;
    for (const auto &s : plot.series)
    {
        for (const double v : s.x) xr.add(v);
        for (const double v : s.y) yr.add(v);
    }
    xr.finish();
    yr.finish();

    const double pw = plot.width - kMarginLeft - kMarginRight;
    const double ph = plot.height - kMarginTop - kMarginBottom;
    const auto px = [&](double x) { return kMarginLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
    const auto py = [&](double y) { return kMarginTop + (1.0 - (y - yr.lo) / (yr.hi - yr.lo)) * ph; };

    std::ostringstream os;
    header(os, plot.width, plot.height, plot.title);
    os << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\"" << num(pw) << "\" height=\""
       << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (const double t : ticks(xr))
    {
        os << "<line x1=\"" << num(px(t)) << "\" y1=\"" << num(kMarginTop + ph) << "\" x2=\"" << num(px(t))
           << "\" y2=\"" << num(kMarginTop + ph + 5) << "\" stroke=\"black\"/>";
        os << "<text x=\"" << num(px(t)) << "\" y=\"" << num(kMarginTop + ph + 18) << "\" text-anchor=\"middle\">"
           << tick_label(t) << "</text>\n";
    }
    for (const double t : ticks(yr))
    {
        os << "<line x1=\"" << kMarginLeft - 5 << "\" y1=\"" << num(py(t)) << "\" x2=\"" << kMarginLeft << "\" y2=\""
           << num(py(t)) << "\" stroke=\"black\"/>";
        os << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << num(py(t) + 4) << "\" text-anchor=\"end\">"
           << tick_label(t) << "</text>\n";
    }
    axis_labels(os, plot.width, plot.height, plot.x_label, plot.y_label);

    int legend_row = 0;
    for (const auto &s : plot.series)
    {
        const std::size_t n = std::min(s.x.size(), s.y.size());
        if (s.markers)
        {
            os << "<g fill=\"" << s.color << "\">\n";
            for (std::size_t i = 0; i < n; ++i)
            {
                if (std::isfinite(s.x[i]) && std::isfinite(s.y[i]))
                {
                    os << "<circle cx=\"" << num(px(s.x[i])) << "\" cy=\"" << num(py(s.y[i])) << "\" r=\"3\"/>\n";
                }
            }
            os << "</g>\n";
        }
        else if (n > 0)
        {
            os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1\" points=\"";
            for (std::size_t i = 0; i < n; ++i)
            {
                if (std::isfinite(s.x[i]) && std::isfinite(s.y[i]))
                {
                    os << num(px(s.x[i])) << ',' << num(py(s.y[i])) << ' ';
                }
            }
            os << "\"/>\n";
        }
        if (!s.label.empty())
        {
            const int y = kMarginTop + 16 + 16 * legend_row++;
            os << "<rect x=\"" << plot.width - kMarginRight - 150 << "\" y=\"" << y - 9 << "\" width=\"10\" height=\"10\" fill=\""
               << s.color << "\"/><text x=\"" << plot.width - kMarginRight - 135 << "\" y=\"" << y << "\">"
               << escape(s.label) << "</text>\n";
        }
    }
    os << "</svg>\n";
    return os.str();
}

std::string render(const Heatmap &map)
{
    const int width = 700;
    const int height = 700;
    const double pw = width - kMarginLeft - kMarginRight;
    const double ph = height - kMarginTop - kMarginBottom;
    const double cw = map.columns > 0 ? pw / map.columns : pw;
    const double ch = map.rows > 0 ? ph / map.rows : ph;

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const double v : map.values)
    {
        const double t = map.log_scale ? std::log10(std::max(v, 1e-300)) : v;
        if (map.log_scale && !(v > 0.0))
        {
            continue;
        }
        lo = std::min(lo, t);
        hi = std::max(hi, t);
    }
    if (!std::isfinite(lo))
    {
        lo = 0.0;
        hi = 1.0;
    }
    if (hi <= lo)
    {
        hi = lo + 1.0;
    }

    std::ostringstream os;
    header(os, width, height, map.title);
    for (int r = 0; r < map.rows; ++r)
    {
        for (int c = 0; c < map.columns; ++c)
        {
            const double v = map.values[static_cast<std::size_t>(r) * static_cast<std::size_t>(map.columns) +
                                        static_cast<std::size_t>(c)];
            double t = 0.0;
            if (!map.log_scale || v > 0.0)
            {
                t = ((map.log_scale ? std::log10(v) : v) - lo) / (hi - lo);
            }
            t = std::clamp(t, 0.0, 1.0);
            const int shade = static_cast<int>(std::lround(255.0 * (1.0 - t)));
            char color[16];
            std::snprintf(color, sizeof(color), "#%02x%02xff", shade, shade);
            // Row 0 is drawn at the bottom.
            os << "<rect x=\"" << num(kMarginLeft + c * cw) << "\" y=\"" << num(kMarginTop + (map.rows - 1 - r) * ch)
               << "\" width=\"" << num(cw) << "\" height=\"" << num(ch) << "\" fill=\"" << color << "\"/>\n";
        }
    }
    os << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\"" << num(pw) << "\" height=\""
       << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
    const int step = std::max(1, map.columns / 8);
    for (int c = 0; c < map.columns; c += step)
    {
        os << "<text x=\"" << num(kMarginLeft + (c + 0.5) * cw) << "\" y=\"" << num(kMarginTop + ph + 18)
           << "\" text-anchor=\"middle\">" << map.x_first + c << "</text>\n";
    }
    for (int r = 0; r < map.rows; r += step)
    {
        os << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << num(kMarginTop + (map.rows - 0.5 - r) * ch + 4)
           << "\" text-anchor=\"end\">" << map.y_first + r << "</text>\n";
    }
    axis_labels(os, width, height, map.x_label, map.y_label);
    os << "</svg>\n";
    return os.str();
}

void save(const std::filesystem::path &path, const std::string &svg)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
    {
        throw Error(ErrorKind::Validation, "cannot write " + path.string());
    }
    out << svg;
}

Series envelope(const std::vector<double> &x, const std::vector<double> &y, std::size_t buckets)
{
    Series s;
    const std::size_t n = std::min(x.size(), y.size());
    if (n <= 2 * buckets || buckets == 0)
    {
        s.x.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n));
        s.y.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n));
        return s;
    }
    for (std::size_t b = 0; b < buckets; ++b)
    {
        const std::size_t lo = b * n / buckets;
        const std::size_t hi = (b + 1) * n / buckets;
        std::size_t imin = lo;
        std::size_t imax = lo;
        for (std::size_t i = lo; i < hi; ++i)
        {
            if (y[i] < y[imin]) imin = i;
            if (y[i] > y[imax]) imax = i;
        }
        const std::size_t first = std::min(imin, imax);
        const std::size_t second = std::max(imin, imax);
        s.x.push_back(x[first]);
        s.y.push_back(y[first]);
        if (second != first)
        {
            s.x.push_back(x[second]);
            s.y.push_back(y[second]);
        }
    }
    return s;
}

} // namespace ringkit::svg
