#include <algorithm>
#include <cmath>
#include <map>

#include "flashot/render.hpp"

namespace flashot::render {

namespace {

constexpr double kTitleBand = 56;
constexpr double kRowGap = 24;
constexpr double kLaneGap = 16;
constexpr double kMinColGap = 140;
constexpr double kMinWidth = 960;
constexpr double kRatioLine = 22;
constexpr double kMargin = 24;
constexpr double kSidePanelShare = 0.2;

std::string summary(const dsl::ValidationReport& r) {
    std::string msg = "diagram has validation errors:";
    for (const auto& f : r.findings)
        if (f.severity == dsl::Severity::error) msg += " " + f.code;
    return msg;
}

Glyph make(GlyphKind k, Panel p) {
    Glyph g;
    g.kind = k;
    g.panel = p;
    return g;
}

struct Placed {
    std::size_t glyph;  // index of the asset rect
    int col;
    int lane;
};

class Builder {
public:
    Builder(const dsl::Diagram& d, const RenderOptions& o) : d_(d), o_(o) {}

    Layout run() {
        l_.title = d_.title;
        columns();
        geometry();
        title();
        int row = 0;
        for (std::size_t i = 0; i < d_.statements.size(); ++i) {
            const auto& s = d_.statements[i];
            if (const auto* p = std::get_if<dsl::Proceed>(&s.body)) {
                Glyph& g = l_.glyphs[placed_.at(p->instance).glyph];
                g.bold = true;
                g.statements.push_back(i);
                continue;
            }
            statement(i, row++);
        }
        pool_links();
        ratios();
        return std::move(l_);
    }

private:
    // ---- grid ----

    int column_of(const std::string& ticker) const {
        return static_cast<int>(std::find(l_.columns.begin(), l_.columns.end(), ticker) - l_.columns.begin());
    }

    void columns() {
        for (const auto& s : d_.statements) {
            if (std::holds_alternative<dsl::Proceed>(s.body)) continue;
            ++l_.rows;
            std::map<std::string, int> per_ticker;
            for (const auto* a : dsl::produced_instances(s)) {
                if (std::find(l_.columns.begin(), l_.columns.end(), a->ticker) == l_.columns.end()) {
                    l_.columns.push_back(a->ticker);
                    l_.lanes.push_back(1);
                }
                const int c = column_of(a->ticker);
                l_.lanes[c] = std::max(l_.lanes[c], ++per_ticker[a->ticker]);
            }
        }
        // declared but never used still get an (empty) column
        for (const auto& a : d_.assets)
            if (std::find(l_.columns.begin(), l_.columns.end(), a.ticker) == l_.columns.end()) {
                l_.columns.push_back(a.ticker);
                l_.lanes.push_back(1);
            }
    }

    double char_w() const { return 0.6 * o_.font_size; }

    void geometry() {
        // cells and gaps grow to hold their longest label
        std::size_t longest_asset = 0;
        for (const auto& s : d_.statements)
            for (const auto* a : dsl::produced_instances(s)) longest_asset = std::max(longest_asset, asset_label(*a).size());
        cell_w_ = std::max<double>(o_.cell_width, std::ceil(char_w() * static_cast<double>(longest_asset) + 16));
        cell_h_ = o_.cell_height;
        std::size_t longest = 0;
        for (const auto& c : d_.contracts) longest = std::max(longest, c.name.size());
        col_gap_ = std::max(kMinColGap, std::ceil(char_w() * static_cast<double>(longest) + 24));

        double middle = col_gap_;
        for (int lanes : l_.lanes) middle += lanes * cell_w_ + (lanes - 1) * kLaneGap + col_gap_;
        std::size_t ratio_chars = std::string("Ratios").size();
        for (const auto& r : d_.ratios)
            ratio_chars = std::max(ratio_chars, r.label.size() + 3 + format_amount(r.value).size());
        const double side = std::ceil(char_w() * static_cast<double>(ratio_chars) + 2 * 12);
        const double title_w = std::ceil(0.6 * (o_.font_size + 4) * static_cast<double>(d_.title.size())) + 2 * kMargin;
        l_.width = std::max({kMinWidth, std::ceil(middle / (1 - 2 * kSidePanelShare)),
                             d_.ratios.empty() ? 0.0 : std::ceil(side / kSidePanelShare), title_w});
        l_.left_panel = std::round(kSidePanelShare * l_.width);
        l_.right_panel = l_.width - l_.left_panel;

        double x = l_.left_panel + std::floor((l_.right_panel - l_.left_panel - middle) / 2) + col_gap_;
        for (int lanes : l_.lanes) {
            col_x_.push_back(x);
            x += lanes * cell_w_ + (lanes - 1) * kLaneGap + col_gap_;
        }

        const double rows_end = row_top(l_.rows) + (l_.rows ? kMargin - kRowGap : 0);
        const double ratios_end =
            d_.ratios.empty() ? 0 : kTitleBand + kRowGap + (static_cast<double>(d_.ratios.size()) + 1) * kRatioLine + kMargin;
        l_.height = std::max({kTitleBand, rows_end, ratios_end});

        ellipse_w_ = std::round(l_.left_panel * 0.7);
        ellipse_x_ = l_.left_panel - ellipse_w_ - 12;
    }

    double row_top(int r) const { return kTitleBand + kRowGap + r * (cell_h_ + kRowGap); }
    double mid(int r) const { return row_top(r) + cell_h_ / 2; }
    double bus(int r) const { return row_top(r) - kRowGap / 2; }
    double lane_x(int c, int lane) const { return col_x_[c] + lane * (cell_w_ + kLaneGap); }

    // ---- glyph helpers ----

    Glyph& add(Glyph g) {
        l_.glyphs.push_back(std::move(g));
        return l_.glyphs.back();
    }

    Glyph text(Panel p, double x, double y, double size, std::string label) const {
        Glyph g = make(GlyphKind::text, p);
        g.x = x;
        g.y = y;
        g.h = size;
        g.w = std::ceil(0.6 * size * static_cast<double>(label.size()));
        g.label = std::move(label);
        return g;
    }

    Glyph& connector(GlyphKind k, Panel p, std::vector<Point> pts, std::size_t stmt, int row, int group = -1) {
        Glyph g = make(k, p);
        g.points = std::move(pts);
        g.statements = {stmt};
        g.row = row;
        g.group = group;
        return add(std::move(g));
    }

    // Arrows remember the column (and lane) they lead into, for the ASCII grid.
    void arrow(std::vector<Point> pts, std::size_t stmt, int row, int col, int lane = 0, int group = -1) {
        Glyph& g = connector(GlyphKind::arrow, Panel::asset, std::move(pts), stmt, row, group);
        g.col = col;
        g.lane = lane;
    }

    const Glyph& rect_of(const std::string& id) const { return l_.glyphs[placed_.at(id).glyph]; }
    Point bottom_of(const std::string& id) const {
        const Glyph& g = rect_of(id);
        return {g.x + g.w / 2, g.y + g.h};
    }

    void asset(const dsl::AssetInstance& a, std::size_t stmt, int row, int lane) {
        const int c = column_of(a.ticker);
        Glyph g = make(GlyphKind::rect, Panel::asset);
        g.x = lane_x(c, lane);
        g.y = row_top(row);
        g.w = cell_w_;
        g.h = cell_h_;
        g.label = asset_label(a);
        g.statements = {stmt};
        g.row = row;
        g.col = c;
        g.lane = lane;
        placed_[a.id] = {l_.glyphs.size(), c, lane};
        add(std::move(g));
    }

    // Returns the right edge of the ellipse.
    double pool(const std::string& id, std::size_t stmt, int row) {
        Glyph g = make(GlyphKind::ellipse, Panel::pool);
        g.x = ellipse_x_;
        g.y = row_top(row);
        g.w = ellipse_w_;
        g.h = cell_h_;
        g.label = pool_name(id);
        g.statements = {stmt};
        g.row = row;
        stages_[id].push_back(l_.glyphs.size());
        if (std::find(pool_order_.begin(), pool_order_.end(), id) == pool_order_.end()) pool_order_.push_back(id);
        add(std::move(g));
        return ellipse_x_ + ellipse_w_;
    }

    // Contract box in the gap left of column c.
    void contract(const std::string& id, int c, std::size_t stmt, int row) {
        Glyph g = make(GlyphKind::rounded_rect, Panel::asset);
        g.h = std::min(26.0, cell_h_);
        g.w = col_gap_ - 20;
        g.x = col_x_[c] - col_gap_ + 10;
        g.y = mid(row) - g.h / 2;
        g.label = contract_name(id);
        g.statements = {stmt};
        g.row = row;
        g.col = c;
        add(std::move(g));
    }

    std::string pool_name(const std::string& id) const {
        for (const auto& p : d_.pools)
            if (p.id == id) return p.name.empty() ? id : p.name;
        return id;
    }
    std::string contract_name(const std::string& id) const {
        for (const auto& c : d_.contracts)
            if (c.id == id) return c.name.empty() ? id : c.name;
        return id;
    }

    // Routes an earlier instance down to row r and across to x, ending at the row's midline.
    void feed(const std::string& id, double x, std::size_t stmt, int row) {
        const Point b = bottom_of(id);
        connector(GlyphKind::line, Panel::asset, {b, {b.x, bus(row)}, {x, bus(row)}, {x, mid(row)}}, stmt, row);
    }

    // ---- statements ----

    void statement(std::size_t i, int row) {
        const auto& body = d_.statements[i].body;
        if (const auto* l = std::get_if<dsl::Loan>(&body)) {
            const double from = pool(l->pool, i, row);
            asset(l->out, i, row, 0);
            const int c = column_of(l->out.ticker);
            contract(l->via, c, i, row);
            arrow({{from, mid(row)}, {col_x_[c], mid(row)}}, i, row, c);
        } else if (const auto* t = std::get_if<dsl::Transform>(&body)) {
            transform(*t, i, row);
        } else if (const auto* s = std::get_if<dsl::Split>(&body)) {
            const Point top = bottom_of(s->input);
            std::vector<double> xs{top.x};
            for (std::size_t k = 0; k < s->outputs.size(); ++k) {
                asset(s->outputs[k], i, row, static_cast<int>(k));
                const Glyph& g = rect_of(s->outputs[k].id);
                xs.push_back(g.x + g.w / 2);
            }
            connector(GlyphKind::line, Panel::asset, {top, {top.x, bus(row)}}, i, row);
            bus_line(xs, i, row);
            const int c = placed_.at(s->input).col;
            for (std::size_t k = 1; k < xs.size(); ++k)
                arrow({{xs[k], bus(row)}, {xs[k], row_top(row)}}, i, row, c, static_cast<int>(k - 1),
                      static_cast<int>(i));
        } else if (const auto* m = std::get_if<dsl::Merge>(&body)) {
            std::vector<double> xs;
            for (const auto& in : m->inputs) {
                const Point b = bottom_of(in);
                xs.push_back(b.x);
                connector(GlyphKind::line, Panel::asset, {b, {b.x, bus(row)}}, i, row);
            }
            asset(m->output, i, row, 0);
            const Glyph& g = rect_of(m->output.id);
            xs.push_back(g.x + g.w / 2);
            bus_line(xs, i, row);
            arrow({{xs.back(), bus(row)}, {xs.back(), row_top(row)}}, i, row, placed_.at(m->output.id).col, 0,
                  static_cast<int>(i));
        } else if (const auto* r = std::get_if<dsl::Repay>(&body)) {
            const int c = placed_.at(r->input).col;
            const double to = pool(r->pool, i, row);
            contract(r->via, c, i, row);
            feed(r->input, col_x_[c], i, row);
            arrow({{col_x_[c], mid(row)}, {to, mid(row)}}, i, row, c);
        }
    }

    void bus_line(std::vector<double> xs, std::size_t stmt, int row) {
        const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
        if (*hi > *lo) connector(GlyphKind::line, Panel::asset, {{*lo, bus(row)}, {*hi, bus(row)}}, stmt, row);
    }

    void transform(const dsl::Transform& t, std::size_t i, int row) {
        std::map<std::string, int> lane;
        for (const auto& o : t.outputs) asset(o, i, row, lane[o.ticker]++);
        if (t.pool) pool(*t.pool, i, row);

        struct Cell {
            double x, w;
            int col;
        };
        std::vector<Cell> outs;
        for (const auto& o : t.outputs) {
            const Glyph& g = rect_of(o.id);
            outs.push_back({g.x, g.w, g.col});
        }
        std::sort(outs.begin(), outs.end(), [](const Cell& a, const Cell& b) { return a.x < b.x; });
        const int c = outs.front().col;
        const double start = col_x_[c] - col_gap_ + 2;
        contract(t.via, c, i, row);
        for (const auto& in : t.inputs) feed(in, start, i, row);
        arrow({{start, mid(row)}, {outs.front().x, mid(row)}}, i, row, c);
        // further outputs hang off the first along the row
        for (std::size_t k = 1; k < outs.size(); ++k)
            connector(GlyphKind::line, Panel::asset, {{outs[k - 1].x + outs[k - 1].w, mid(row)}, {outs[k].x, mid(row)}},
                      i, row);
    }

    void pool_links() {
        for (std::size_t p = 0; p < pool_order_.size(); ++p) {
            const auto& stages = stages_[pool_order_[p]];
            const double bx = std::max(4.0, ellipse_x_ - 8 - 6 * static_cast<double>(p));
            for (std::size_t k = 1; k < stages.size(); ++k) {
                const Glyph& a = l_.glyphs[stages[k - 1]];
                const Glyph& b = l_.glyphs[stages[k]];
                Glyph g = make(GlyphKind::line, Panel::pool);
                const double ya = a.y + a.h / 2;
                const double yb = b.y + b.h / 2;
                g.points = {{a.x, ya}, {bx, ya}, {bx, yb}, {b.x, yb}};
                g.dotted = true;
                g.statements = {a.statements.front(), b.statements.front()};
                add(std::move(g));
            }
        }
    }

    void title() {
        const double size = o_.font_size + 4;
        Glyph g = text(Panel::asset, 0, 18, size, d_.title);
        g.x = std::floor((l_.width - g.w) / 2);
        add(std::move(g));
    }

    void ratios() {
        if (d_.ratios.empty()) return;
        const double x = l_.right_panel + 12;
        double y = kTitleBand + kRowGap;
        add(text(Panel::ratio, x, y, o_.font_size, "Ratios"));
        for (const auto& r : d_.ratios) {
            y += kRatioLine;
            add(text(Panel::ratio, x, y, o_.font_size, r.label + " = " + format_amount(r.value)));
        }
    }

    const dsl::Diagram& d_;
    const RenderOptions& o_;
    Layout l_;
    double cell_w_ = 0, cell_h_ = 0, col_gap_ = 0, ellipse_w_ = 0, ellipse_x_ = 0;
    std::vector<double> col_x_;
    std::map<std::string, Placed> placed_;
    std::map<std::string, std::vector<std::size_t>> stages_;
    std::vector<std::string> pool_order_;
};

}  // namespace

RenderOptions RenderOptions::for_format(Format f) {
    RenderOptions o;
    o.format = f;
    if (f == Format::ascii) {
        o.cell_width = 24;
        o.cell_height = 1;
    }
    return o;
}

void RenderOptions::validate() const {
    if (cell_width <= 0 || cell_height <= 0) throw DomainError("render options: cell size must be positive");
    if (font_size <= 0) throw DomainError("render options: font size must be positive");
}

bool Glyph::horizontal() const { return points.size() == 2 && points[0].y == points[1].y && points[0].x != points[1].x; }
bool Glyph::vertical() const { return points.size() == 2 && points[0].x == points[1].x && points[0].y != points[1].y; }

void Glyph::bounds(double& x0, double& y0, double& x1, double& y1) const {
    if (points.empty()) {
        x0 = x;
        y0 = y;
        x1 = x + w;
        y1 = y + h;
        return;
    }
    x0 = x1 = points[0].x;
    y0 = y1 = points[0].y;
    for (const auto& p : points) {
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
    }
}

InvalidDiagram::InvalidDiagram(dsl::ValidationReport report)
    : DomainError(summary(report)), report_(std::move(report)) {}

Layout layout(const dsl::Diagram& d, const RenderOptions& opts) {
    opts.validate();
    auto report = dsl::validate(d);
    if (!report.ok()) throw InvalidDiagram(std::move(report));
    // ASCII cells are measured in characters; geometry always uses pixel defaults then
    if (opts.format == Format::ascii) {
        RenderOptions px = RenderOptions::for_format(Format::svg);
        px.font_size = opts.font_size;
        return Builder(d, px).run();
    }
    return Builder(d, opts).run();
}

}  // namespace flashot::render
