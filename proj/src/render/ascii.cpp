#include <algorithm>
#include <map>

#include <fmt/format.h>

#include "flashot/render.hpp"

namespace flashot::render {

namespace {

class Canvas {
public:
    void put(std::size_t line, std::size_t x, const std::string& s) {
        auto& row = at(line);
        if (row.size() < x + s.size()) row.resize(x + s.size(), ' ');
        row.replace(x, s.size(), s);
    }
    // Only paints blank cells, so shapes already drawn survive.
    void fill(std::size_t line, std::size_t from, std::size_t to, char ch) {
        auto& row = at(line);
        if (row.size() < to) row.resize(to, ' ');
        for (std::size_t x = from; x < to; ++x)
            if (row[x] == ' ') row[x] = ch;
    }
    std::string str() const {
        std::string out;
        for (auto row : lines_) {
            row.erase(row.find_last_not_of(' ') + 1);
            out += row + '\n';
        }
        return out;
    }

private:
    std::string& at(std::size_t line) {
        if (lines_.size() <= line) lines_.resize(line + 1);
        return lines_[line];
    }
    std::vector<std::string> lines_;
};

void must_fit(const std::string& drawn, std::size_t room, int cell_width) {
    if (drawn.size() > room)
        throw DomainError(fmt::format("ascii render: '{}' needs {} characters but a cell of width {} leaves {}; "
                                      "use a larger cell width",
                                      drawn, drawn.size(), cell_width, room));
}

}  // namespace

std::string render_ascii(const Layout& l, const RenderOptions& opts) {
    opts.validate();
    const std::size_t cw = static_cast<std::size_t>(opts.cell_width);
    // gaps widen to hold contract names; cells stay at the requested width
    std::size_t gap = cw;
    for (const auto& g : l.glyphs)
        if (g.kind == GlyphKind::rounded_rect) gap = std::max(gap, g.label.size() + 5);
    const std::size_t pool_area = cw + 2;  // ':' links at 0, pools from 1

    std::vector<std::size_t> col_start;
    std::size_t x = pool_area;
    for (int lanes : l.lanes) {
        col_start.push_back(x + gap);
        x += gap + static_cast<std::size_t>(lanes) * (cw + 1) - 1;
    }
    const std::size_t grid_end = x + 1;

    auto content = [](int row) { return static_cast<std::size_t>(3 + 2 * row); };
    auto above = [](int row) { return static_cast<std::size_t>(2 + 2 * row); };

    Canvas c;
    std::map<int, std::size_t> pool_end;  // row -> first column after the pool label
    std::map<double, int> pool_rows;      // pool midline -> row
    std::map<int, std::vector<std::pair<std::size_t, std::size_t>>> cells;  // row -> drawn [begin, end)
    for (const auto& g : l.glyphs) {
        if (g.kind == GlyphKind::rect) {
            const std::string s = "[" + g.label + "]" + (g.bold && opts.highlight_proceeds ? "*" : "");
            must_fit(s, cw, opts.cell_width);
            const std::size_t at = col_start[g.col] + static_cast<std::size_t>(g.lane) * (cw + 1);
            c.put(content(g.row), at, s);
            cells[g.row].emplace_back(at, at + s.size());
        } else if (g.kind == GlyphKind::ellipse) {
            const std::string s = "(" + g.label + ")";
            must_fit(s, cw, opts.cell_width);
            c.put(content(g.row), 1, s);
            pool_end[g.row] = 1 + s.size();
            pool_rows[g.y + g.h / 2] = g.row;
        }
    }

    for (const auto& g : l.glyphs) {
        if (g.kind == GlyphKind::arrow && g.vertical()) {
            c.put(above(g.row), col_start[g.col] + static_cast<std::size_t>(g.lane) * (cw + 1) + cw / 2, "v");
        } else if (g.kind == GlyphKind::arrow) {
            const std::size_t line = content(g.row);
            const std::size_t into = col_start[g.col];
            const bool leftward = g.points[1].x < g.points[0].x;
            const bool from_pool = !leftward && pool_end.count(g.row) && g.points[0].x < l.left_panel;
            if (leftward) {
                const std::size_t tip = pool_end.at(g.row) + 1;
                c.put(line, tip, "<");
                c.fill(line, tip + 1, into - 1, '-');
            } else {
                const std::size_t from = from_pool ? pool_end.at(g.row) + 1 : into - gap;
                c.fill(line, from, into - 1, '-');
                c.put(line, into - 1, ">");
                // a transform with several outputs: join them along the row
                if (!from_pool) {
                    auto spans = cells[g.row];
                    std::sort(spans.begin(), spans.end());
                    for (std::size_t k = 1; k < spans.size(); ++k)
                        c.fill(line, spans[k - 1].second + 1, spans[k].first - 1, '-');
                }
            }
        } else if (g.kind == GlyphKind::line && g.dotted) {
            const int a = pool_rows.at(g.points.front().y);
            const int b = pool_rows.at(g.points.back().y);
            for (std::size_t line = content(a) + 1; line < content(b); ++line) c.fill(line, 0, 1, ':');
        }
    }

    // contracts last, so their names sit on top of the arrows through them
    for (const auto& g : l.glyphs)
        if (g.kind == GlyphKind::rounded_rect) {
            const std::string s = "{" + g.label + "}";
            must_fit(s, gap - 3, opts.cell_width);
            c.put(content(g.row), col_start[g.col] - gap + (gap - s.size()) / 2, s);
        }

    std::size_t ratio_line = 2;
    for (const auto& g : l.glyphs) {
        if (g.kind != GlyphKind::text) continue;
        if (g.panel == Panel::ratio)
            c.put(ratio_line++, l.rows > 0 ? grid_end + 2 : 0, g.label);
        else
            c.put(0, 0, g.label);
    }
    if (l.rows == 0 && ratio_line == 2) c.put(0, 0, "");
    std::string out = c.str();
    if (out.empty()) out = "\n";
    return out;
}

}  // namespace flashot::render
