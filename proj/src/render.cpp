#include "nodalforms/render.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <utility>
#include <vector>

namespace nodalforms {

namespace {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

double cross(const Point& o, const Point& a, const Point& b)
{
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Andrew's monotone chain.
std::vector<Point> convex_hull(std::vector<Point> pts)
{
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    if (pts.size() < 3) {
        return pts;
    }
    std::vector<Point> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) {
            --k;
        }
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) {
            --k;
        }
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

std::string escape_xml(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

// Blue-white-red for t in [-1, 1].
std::string diverging(double t)
{
    t = std::clamp(t, -1.0, 1.0);
    int r = 255, g = 255, b = 255;
    if (t > 0) {
        g = b = static_cast<int>(std::lround(255.0 * (1.0 - t)));
    } else {
        r = g = static_cast<int>(std::lround(255.0 * (1.0 + t)));
    }
    std::ostringstream ss;
    ss << "rgb(" << r << "," << g << "," << b << ")";
    return ss.str();
}

void header(std::ostringstream& out, int width, int height, const std::string& title)
{
    out << std::fixed << std::setprecision(2);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"10\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">" << escape_xml(title) << "</text>\n";
}

} // namespace

std::string render_graph_svg(const WeightedGraph& g, std::span<const double> f,
                             const NodalDecomposition& nd, const std::string& title)
{
    constexpr int size = 480;
    const double cx = size / 2.0, cy = size / 2.0 + 10.0, radius = size / 2.0 - 50.0;
    std::vector<Point> pos(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(g.size());
        pos[i] = g.size() == 1 ? Point{cx, cy} : Point{cx + radius * std::cos(angle), cy + radius * std::sin(angle)};
    }

    std::ostringstream out;
    header(out, size, size + 20, title);
    auto hull = [&](const VertexSubset& d, const char* color) {
        std::vector<Point> pts;
        for (auto x : d.indices()) {
            pts.push_back(pos[x]);
        }
        const auto h = convex_hull(pts);
        if (h.size() >= 3) {
            out << "<polygon fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\"" << color
                << "\" stroke-opacity=\"0.5\" stroke-width=\"14\" stroke-linejoin=\"round\" points=\"";
            for (const auto& p : h) {
                out << p.x << "," << p.y << " ";
            }
            out << "\"/>\n";
        } else if (h.size() == 2) {
            out << "<line x1=\"" << h[0].x << "\" y1=\"" << h[0].y << "\" x2=\"" << h[1].x << "\" y2=\"" << h[1].y
                << "\" stroke=\"" << color << "\" stroke-opacity=\"0.25\" stroke-width=\"28\" stroke-linecap=\"round\"/>\n";
        } else if (h.size() == 1) {
            out << "<circle cx=\"" << h[0].x << "\" cy=\"" << h[0].y << "\" r=\"16\" fill=\"" << color
                << "\" fill-opacity=\"0.2\"/>\n";
        }
    };
    for (const auto& d : nd.positive_domains) {
        hull(d, "#d62728");
    }
    for (const auto& d : nd.negative_domains) {
        hull(d, "#1f77b4");
    }
    for (const auto& e : g.edges()) {
        out << "<line x1=\"" << pos[e.u].x << "\" y1=\"" << pos[e.u].y << "\" x2=\"" << pos[e.v].x << "\" y2=\""
            << pos[e.v].y << "\" stroke=\"#555\" stroke-width=\"1\"/>\n";
    }
    for (std::size_t x = 0; x < g.size(); ++x) {
        const char* fill = nd.sign_pattern.positive.contains(x)   ? "#d62728"
                           : nd.sign_pattern.negative.contains(x) ? "#1f77b4"
                                                                  : "#aaaaaa";
        out << "<circle cx=\"" << pos[x].x << "\" cy=\"" << pos[x].y << "\" r=\"7\" fill=\"" << fill
            << "\" stroke=\"black\"><title>" << escape_xml(g.label(x)) << " = " << std::setprecision(6) << f[x]
            << std::setprecision(2) << "</title></circle>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::string render_grid_svg(const GridSpec& spec, std::span<const double> f, const std::string& title)
{
    const auto cells = grid_vertex_cells(spec);
    std::vector<double> value(spec.cells(), 0.0);
    for (std::size_t v = 0; v < cells.size() && v < f.size(); ++v) {
        value[spec.cell(cells[v].first, cells[v].second)] = f[v];
    }
    double scale = 0.0;
    for (double v : value) {
        scale = std::max(scale, std::abs(v));
    }
    if (scale == 0.0) {
        scale = 1.0;
    }

    const double px = std::max(4.0, std::min(480.0 / static_cast<double>(spec.nx), spec.dims == 1 ? 480.0 : 480.0 / static_cast<double>(spec.ny)));
    const double cell_h = spec.dims == 1 ? 60.0 : px;
    const double top = 30.0;
    const int width = static_cast<int>(std::ceil(px * static_cast<double>(spec.nx))) + 20;
    const int height = static_cast<int>(std::ceil(cell_h * static_cast<double>(spec.ny) + top)) + 10;
    // Row j = 0 is drawn at the bottom.
    auto sx = [&](double i) { return 10.0 + px * i; };
    auto sy = [&](double j) { return top + cell_h * (static_cast<double>(spec.ny) - j); };

    std::ostringstream out;
    header(out, width, height, title);
    for (std::size_t j = 0; j < spec.ny; ++j) {
        for (std::size_t i = 0; i < spec.nx; ++i) {
            const bool inside = spec.inside(i, j);
            out << "<rect x=\"" << sx(static_cast<double>(i)) << "\" y=\"" << sy(static_cast<double>(j + 1))
                << "\" width=\"" << px << "\" height=\"" << cell_h << "\" fill=\""
                << (inside ? diverging(value[spec.cell(i, j)] / scale) : std::string("#333333")) << "\"/>\n";
        }
    }

    // Marching squares over the dual grid of cell centers; a cell center sits at (i + 0.5, j + 0.5).
    out << "<path fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" d=\"";
    auto lerp = [](double a, double b) { return a / (a - b); };
    if (spec.dims == 1) {
        for (std::size_t i = 0; i + 1 < spec.nx; ++i) {
            const double a = value[i], b = value[i + 1];
            if ((a > 0) != (b > 0)) {
                const double x = sx(static_cast<double>(i) + 0.5 + lerp(a, b));
                out << "M" << x << "," << sy(1.0) << "V" << sy(0.0) << " ";
            }
        }
    } else {
        for (std::size_t j = 0; j + 1 < spec.ny; ++j) {
            for (std::size_t i = 0; i + 1 < spec.nx; ++i) {
                const double v[4] = {value[spec.cell(i, j)], value[spec.cell(i + 1, j)],
                                     value[spec.cell(i + 1, j + 1)], value[spec.cell(i, j + 1)]};
                const Point corner[4] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
                std::vector<Point> crossings;
                for (int e = 0; e < 4; ++e) {
                    const int a = e, b = (e + 1) % 4;
                    if ((v[a] > 0) != (v[b] > 0)) {
                        const double t = lerp(v[a], v[b]);
                        crossings.push_back({corner[a].x + t * (corner[b].x - corner[a].x),
                                             corner[a].y + t * (corner[b].y - corner[a].y)});
                    }
                }
                for (std::size_t k = 0; k + 1 < crossings.size(); k += 2) {
                    const double bx = static_cast<double>(i) + 0.5, by = static_cast<double>(j) + 0.5;
                    out << "M" << sx(bx + crossings[k].x) << "," << sy(by + crossings[k].y) << "L"
                        << sx(bx + crossings[k + 1].x) << "," << sy(by + crossings[k + 1].y) << " ";
                }
            }
        }
    }
    out << "\"/>\n</svg>\n";
    return out.str();
}

} // namespace nodalforms
