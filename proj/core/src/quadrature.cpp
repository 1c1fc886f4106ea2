#include "ringkit/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>

#include "ringkit/errors.hpp"

namespace ringkit::quad
{

namespace
{

// Kronrod abscissae (descending, last is the center) and weights; Gauss
// points are the odd-indexed abscissae.
constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGaussWeights = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                                 0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

enum class Map
{
    Identity,
    RightTail, // x = origin + scale (1 - t) / t
    LeftTail,  // x = origin - scale (1 - t) / t
};

struct Piece
{
    double a;
    double b;
    double value;
    double error;
};

struct Mapped
{
    const Integrand &f;
    Map map;
    double origin;
    double scale;

    double operator()(double t) const
    {
        switch (map)
        {
        case Map::Identity:
            return f(t);
        case Map::RightTail:
        {
            const double s = (1.0 - t) / t;
            return f(origin + scale * s) * scale / (t * t);
        }
        case Map::LeftTail:
        {
            const double s = (1.0 - t) / t;
            return f(origin - scale * s) * scale / (t * t);
        }
        }
        return 0.0;
    }
};

Piece kronrod15(const Mapped &g, double a, double b)
{
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = g(center);
    double kronrod = fc * kKronrodWeights[7];
    double gauss = fc * kGaussWeights[3];
    for (std::size_t j = 0; j < 7; ++j)
    {
        const double dx = half * kKronrodNodes[j];
        const double sum = g(center - dx) + g(center + dx);
        kronrod += kKronrodWeights[j] * sum;
        if (j % 2 == 1)
        {
            gauss += kGaussWeights[j / 2] * sum;
        }
    }
    return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

struct Segment
{
    Mapped g;
    double a;
    double b;
};

QuadratureResult run(std::vector<Segment> segments, const QuadratureOptions &options)
{
    struct Item
    {
        Piece piece;
        std::size_t segment;
        bool operator<(const Item &o) const { return piece.error < o.piece.error; }
    };
    std::priority_queue<Item> heap;
    double total = 0.0;
    double error = 0.0;
    for (std::size_t s = 0; s < segments.size(); ++s)
    {
        const auto p = kronrod15(segments[s].g, segments[s].a, segments[s].b);
        total += p.value;
        error += p.error;
        heap.push({p, s});
    }

    auto target = [&] { return std::max(options.absolute_tolerance, options.relative_tolerance * std::abs(total)); };
    int intervals = static_cast<int>(segments.size());
    while (error > target() && intervals < options.max_intervals)
    {
        const Item worst = heap.top();
        heap.pop();
        const auto &seg = segments[worst.segment];
        const double mid = 0.5 * (worst.piece.a + worst.piece.b);
        if (!(mid > worst.piece.a && mid < worst.piece.b))
        {
            heap.push(worst);
            break; // interval cannot be split further in floating point
        }
        const auto left = kronrod15(seg.g, worst.piece.a, mid);
        const auto right = kronrod15(seg.g, mid, worst.piece.b);
        total += left.value + right.value - worst.piece.value;
        error += left.error + right.error - worst.piece.error;
        heap.push({left, worst.segment});
        heap.push({right, worst.segment});
        ++intervals;
    }

    // Re-sum to shed accumulated update round-off.
    double value = 0.0;
    double err = 0.0;
    while (!heap.empty())
    {
        value += heap.top().piece.value;
        err += heap.top().piece.error;
        heap.pop();
    }
    const double goal = std::max(options.absolute_tolerance, options.relative_tolerance * std::abs(value));
    if (!(err <= goal) || !std::isfinite(value))
    {
        const double achieved = value != 0.0 ? err / std::abs(value) : err;
        throw IntegrationError(achieved, options.relative_tolerance);
    }
    return {value, err, intervals};
}

} // namespace

QuadratureResult integrate(const Integrand &f, double a, double b, const QuadratureOptions &options)
{
    if (a == b)
    {
        return {};
    }
    if (a > b)
    {
        auto r = integrate(f, b, a, options);
        r.value = -r.value;
        return r;
    }
    return run({Segment{Mapped{f, Map::Identity, 0.0, 1.0}, a, b}}, options);
}

QuadratureResult integrate_real_line(const Integrand &f, std::vector<double> breakpoints, double tail_scale,
                                     const QuadratureOptions &options)
{
    if (breakpoints.empty() || !(tail_scale > 0.0))
    {
        throw Error(ErrorKind::Parameter, "real-line quadrature needs breakpoints and a positive tail scale");
    }
    std::sort(breakpoints.begin(), breakpoints.end());
    breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());

    std::vector<Segment> segments;
    segments.push_back({Mapped{f, Map::LeftTail, breakpoints.front(), tail_scale}, 0.0, 1.0});
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
    {
        segments.push_back({Mapped{f, Map::Identity, 0.0, 1.0}, breakpoints[i], breakpoints[i + 1]});
    }
    segments.push_back({Mapped{f, Map::RightTail, breakpoints.back(), tail_scale}, 0.0, 1.0});
    return run(std::move(segments), options);
}

} // namespace ringkit::quad
