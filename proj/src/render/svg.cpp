#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "flashot/render.hpp"

namespace flashot::render {

namespace {

// Two decimals at most, so output bytes do not depend on float noise.
std::string num(double v) {
    std::string s = fmt::format("{:.2f}", v);
    s.erase(s.find_last_not_of('0') + 1);
    if (s.back() == '.') s.pop_back();
    if (s == "-0") s = "0";
    return s;
}

std::string escape(const std::string& in) {
    std::string out;
    out.reserve(in.size());
    for (char ch : in) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += ch;
        }
    }
    return out;
}

std::string points(const std::vector<Point>& pts) {
    std::string s;
    for (const auto& p : pts) {
        if (!s.empty()) s += ' ';
        s += num(p.x) + "," + num(p.y);
    }
    return s;
}

void centered_label(std::string& out, const Glyph& g, int size) {
    out += fmt::format("  <text x=\"{}\" y=\"{}\" font-size=\"{}\" text-anchor=\"middle\">{}</text>\n",
                       num(g.x + g.w / 2), num(g.y + g.h / 2 + size * 0.35), size, escape(g.label));
}

}  // namespace

std::string render_svg(const Layout& l, const RenderOptions& opts) {
    opts.validate();
    const bool arrows =
        std::any_of(l.glyphs.begin(), l.glyphs.end(), [](const Glyph& g) { return g.kind == GlyphKind::arrow; });

    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0}\" height=\"{1}\" "
        "viewBox=\"0 0 {0} {1}\" font-family=\"Helvetica, Arial, sans-serif\">\n",
        num(l.width), num(l.height));
    if (arrows)
        out +=
            "  <defs>\n"
            "    <marker id=\"head\" markerWidth=\"8\" markerHeight=\"8\" refX=\"7\" refY=\"4\" orient=\"auto\">\n"
            "      <path d=\"M0,0 L8,4 L0,8 z\" fill=\"#222\"/>\n"
            "    </marker>\n"
            "  </defs>\n";
    out += fmt::format("  <rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#fff\"/>\n", num(l.width),
                       num(l.height));
    if (l.rows > 0)
        for (double x : {l.left_panel, l.right_panel})
            out += fmt::format(
                "  <line x1=\"{0}\" y1=\"48\" x2=\"{0}\" y2=\"{1}\" stroke=\"#ccc\" stroke-dasharray=\"2 4\"/>\n",
                num(x), num(l.height - 8));

    // connectors first so shapes sit on top of them
    for (const auto& g : l.glyphs) {
        if (g.kind == GlyphKind::arrow) {
            out += fmt::format(
                "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#222\" stroke-width=\"1.5\" "
                "marker-end=\"url(#head)\"/>\n",
                num(g.points[0].x), num(g.points[0].y), num(g.points[1].x), num(g.points[1].y));
        } else if (g.kind == GlyphKind::line) {
            out += fmt::format("  <polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"{}/>\n",
                               points(g.points), g.dotted ? "#777" : "#222",
                               g.dotted ? " stroke-dasharray=\"3 3\"" : "");
        }
    }

    const int small = std::max(1, opts.font_size - 1);
    for (const auto& g : l.glyphs) {
        switch (g.kind) {
            case GlyphKind::rect: {
                const bool strong = g.bold && opts.highlight_proceeds;
                out += fmt::format(
                    "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" stroke=\"#222\" "
                    "stroke-width=\"{}\"/>\n",
                    num(g.x), num(g.y), num(g.w), num(g.h), strong ? "#fff6d5" : "#fff", strong ? 3 : 1);
                centered_label(out, g, opts.font_size);
                break;
            }
            case GlyphKind::ellipse:
                out += fmt::format(
                    "  <ellipse cx=\"{}\" cy=\"{}\" rx=\"{}\" ry=\"{}\" fill=\"#e8eefc\" stroke=\"#222\"/>\n",
                    num(g.x + g.w / 2), num(g.y + g.h / 2), num(g.w / 2), num(g.h / 2));
                centered_label(out, g, opts.font_size);
                break;
            case GlyphKind::rounded_rect:
                out += fmt::format(
                    "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" rx=\"8\" ry=\"8\" fill=\"#f4f4f4\" "
                    "stroke=\"#555\"/>\n",
                    num(g.x), num(g.y), num(g.w), num(g.h));
                centered_label(out, g, small);
                break;
            case GlyphKind::text:
                out += fmt::format("  <text x=\"{}\" y=\"{}\" font-size=\"{}\"{}>{}</text>\n", num(g.x),
                                   num(g.y + g.h), num(g.h), g.row < 0 && g.panel == Panel::asset ? " font-weight=\"bold\"" : "",
                                   escape(g.label));
                break;
            case GlyphKind::arrow:
            case GlyphKind::line:
                break;
        }
    }
    out += "</svg>\n";
    return out;
}

}  // namespace flashot::render
