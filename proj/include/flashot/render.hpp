#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flashot/diagram.hpp"
#include "flashot/errors.hpp"
#include "flashot/validator.hpp"

namespace flashot::render {

enum class Format { svg, ascii };

struct RenderOptions {
    Format format = Format::svg;
    int cell_width = 160;  // pixels for SVG, characters for ASCII
    int cell_height = 48;  // pixels for SVG; ASCII rows are one line
    int font_size = 12;
    bool highlight_proceeds = true;

    /// Defaults sized for the format: 160x48 px cells, or 24-character cells.
    static RenderOptions for_format(Format f);
    void validate() const;
};

// Connectors (arrow, line) may cross other glyphs; all other kinds never overlap.
enum class GlyphKind { rect, ellipse, rounded_rect, arrow, line, text };
enum class Panel { pool, asset, ratio };

struct Point {
    double x;
    double y;
};

struct Glyph {
    GlyphKind kind = GlyphKind::rect;
    Panel panel = Panel::asset;
    double x = 0, y = 0, w = 0, h = 0;  // box for shapes and text (text: baseline-left at y + h)
    std::vector<Point> points;          // polyline for arrows and lines; arrows have two points
    std::string label;
    bool bold = false;    // proceeds
    bool dotted = false;  // link between stages of the same pool
    std::vector<std::size_t> statements;  // statements this glyph depicts
    // grid coordinates used by the ASCII renderer
    int row = -1;   // statement row, -1 for title and ratios
    int col = -1;   // asset column, -1 outside the middle panel
    int lane = 0;   // position among same-column cells of one row
    int group = -1;  // split/merge arrows share the statement index

    bool is_connector() const { return kind == GlyphKind::arrow || kind == GlyphKind::line; }
    bool horizontal() const;
    bool vertical() const;
    /// Axis-aligned bounds (polyline extent for connectors).
    void bounds(double& x0, double& y0, double& x1, double& y1) const;
};

struct Layout {
    std::string title;
    std::vector<std::string> columns;  // tickers, first appearance first
    std::vector<int> lanes;            // cells per column
    int rows = 0;
    std::vector<Glyph> glyphs;
    double width = 0;
    double height = 0;
    double left_panel = 0;   // x where the middle panel starts
    double right_panel = 0;  // x where the ratio panel starts
};

/// Raised when asked to lay out a diagram that has validation errors.
class InvalidDiagram : public DomainError {
public:
    explicit InvalidDiagram(dsl::ValidationReport report);
    const dsl::ValidationReport& report() const { return report_; }

private:
    dsl::ValidationReport report_;
};

/// Thousands separators, at most six fractional digits, no trailing zeros.
std::string format_amount(double v);
/// "46,000,000 DAI"; debt instances show a leading minus.
std::string asset_label(const dsl::AssetInstance& a);

Layout layout(const dsl::Diagram& d, const RenderOptions& opts = {});

std::string render_svg(const Layout& l, const RenderOptions& opts = {});
/// Throws DomainError when a label does not fit the character cell.
std::string render_ascii(const Layout& l, const RenderOptions& opts = RenderOptions::for_format(Format::ascii));

}  // namespace flashot::render
