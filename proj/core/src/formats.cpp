#include "uncertain_eval/formats.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string_view>
#include <vector>

#include "uncertain_eval/error.hpp"

namespace ueval {

namespace {

std::string where(const std::string& source, std::size_t line) {
    return source + ":" + std::to_string(line) + ": ";
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
        const std::size_t start = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

template <class T>
bool parse_uint(std::string_view s, T& out) {
    s = trim(s);
    if (s.empty()) return false;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

std::size_t header_uint(std::string_view tok, const std::string& what, const std::string& at) {
    std::size_t v = 0;
    if (!parse_uint(tok, v)) throw ValidationError(at + "bad " + what + " '" + std::string(tok) + "'");
    return v;
}

bool parse_real(std::string_view s, double& out) {
    s = trim(s);
    if (s.empty()) return false;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

bool blank(std::string_view line) { return trim(line).empty(); }

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path.string() + "'");
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    return out;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

// ---------------------------------------------------------------- label map

PixelLabelMap read_label_map(std::istream& in, const std::string& source) {
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw ValidationError(source + ": empty label file");
    ++lineno;
    const auto head = split_ws(line);
    if (head.size() != 5 || head[0] != "LBL")
        throw ValidationError(where(source, lineno) + "expected 'LBL <width> <height> <nclasses> <ngrades>'");
    const std::string at = where(source, lineno);
    const std::size_t width = header_uint(head[1], "width", at);
    const std::size_t height = header_uint(head[2], "height", at);
    const std::size_t nclasses = header_uint(head[3], "class count", at);
    const std::size_t ngrades = header_uint(head[4], "grade count", at);
    if (width == 0 || height == 0) throw ValidationError(at + "zero image extent");
    if (nclasses < 2) throw ValidationError(at + "need at least two classes");
    if (ngrades < 1) throw ValidationError(at + "need at least one grade");

    std::vector<PixelLabelMap::Cell> cells;
    cells.reserve(width * height);
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank(line)) continue;
        if (rows == height) throw ValidationError(where(source, lineno) + "more than " + std::to_string(height) + " rows");
        const auto toks = split_ws(line);
        if (toks.size() != width)
            throw ValidationError(where(source, lineno) + "row has " + std::to_string(toks.size()) +
                                  " tokens, expected " + std::to_string(width));
        for (const auto tok : toks) {
            if (tok == "-") {
                cells.emplace_back();
                continue;
            }
            const auto colon = tok.find(':');
            ClassId c = 0;
            GradeId g = 0;
            if (colon == std::string_view::npos || !parse_uint(tok.substr(0, colon), c) ||
                !parse_uint(tok.substr(colon + 1), g))
                throw ValidationError(where(source, lineno) + "bad token '" + std::string(tok) + "'");
            if (c >= nclasses)
                throw ValidationError(where(source, lineno) + "class id " + std::to_string(c) + " out of range (" +
                                      std::to_string(nclasses) + " classes)");
            if (g >= ngrades)
                throw ValidationError(where(source, lineno) + "grade id " + std::to_string(g) + " out of range (" +
                                      std::to_string(ngrades) + " grades)");
            cells.push_back(PixelLabel{c, g});
        }
        ++rows;
    }
    if (rows != height)
        throw ValidationError(source + ": found " + std::to_string(rows) + " rows, expected " + std::to_string(height));
    return PixelLabelMap(width, height, nclasses, ngrades, std::move(cells));
}

PixelLabelMap parse_label_map(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_label_map(in, path.string());
}

void write_label_map(std::ostream& out, const PixelLabelMap& map) {
    out << "LBL " << map.width() << ' ' << map.height() << ' ' << map.num_classes() << ' ' << map.num_grades()
        << '\n';
    for (std::size_t y = 0; y < map.height(); ++y) {
        for (std::size_t x = 0; x < map.width(); ++x) {
            if (x) out << ' ';
            const auto& c = map.at(x, y);
            if (c) out << c->class_id << ':' << c->grade;
            else out << '-';
        }
        out << '\n';
    }
}

void save_label_map(const std::filesystem::path& path, const PixelLabelMap& map) {
    auto out = open_out(path);
    write_label_map(out, map);
}

// ----------------------------------------------------------------- boundary

ReferenceBoundary read_boundary(std::istream& in, const std::string& source) {
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw ValidationError(source + ": empty boundary file");
    ++lineno;
    const auto head = split_ws(line);
    if (head.size() != 4 || head[0] != "BND")
        throw ValidationError(where(source, lineno) + "expected 'BND <width> <height> <ngrades>'");
    const std::string at = where(source, lineno);
    const std::size_t width = header_uint(head[1], "width", at);
    const std::size_t height = header_uint(head[2], "height", at);
    const std::size_t ngrades = header_uint(head[3], "grade count", at);
    if (width == 0 || height == 0) throw ValidationError(at + "zero image extent");
    if (ngrades < 1) throw ValidationError(at + "need at least one grade");

    std::vector<BoundaryPixel> pixels;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank(line)) continue;
        const auto toks = split_ws(line);
        std::size_t x = 0, y = 0;
        GradeId g = 0;
        if (toks.size() != 3 || !parse_uint(toks[0], x) || !parse_uint(toks[1], y) || !parse_uint(toks[2], g))
            throw ValidationError(where(source, lineno) + "expected 'x y g'");
        if (x >= width || y >= height)
            throw BoundsError(where(source, lineno) + "pixel (" + std::to_string(x) + ", " + std::to_string(y) +
                              ") outside " + std::to_string(width) + "x" + std::to_string(height) + " image");
        if (g >= ngrades)
            throw ValidationError(where(source, lineno) + "grade id " + std::to_string(g) + " out of range");
        pixels.push_back({{static_cast<std::int64_t>(x), static_cast<std::int64_t>(y)}, g});
    }
    return ReferenceBoundary(width, height, ngrades, std::move(pixels));
}

ReferenceBoundary parse_boundary(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_boundary(in, path.string());
}

void write_boundary(std::ostream& out, const ReferenceBoundary& boundary) {
    out << "BND " << boundary.width() << ' ' << boundary.height() << ' ' << boundary.num_grades() << '\n';
    for (const auto& p : boundary.pixels()) out << p.pos.x << ' ' << p.pos.y << ' ' << p.grade << '\n';
}

void save_boundary(const std::filesystem::path& path, const ReferenceBoundary& boundary) {
    auto out = open_out(path);
    write_boundary(out, boundary);
}

// -------------------------------------------------------------- predictions

Predictions read_predictions(std::istream& in, std::size_t rows, std::size_t cols, std::size_t num_classes,
                             const std::string& source) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!blank(line)) break;
    }
    if (blank(line)) throw ValidationError(source + ": missing header row");
    const auto header = split(trim(line), ',');
    if (header.size() < 3 || trim(header[0]) != "tile_row" || trim(header[1]) != "tile_col")
        throw ValidationError(where(source, lineno) + "header must start with 'tile_row,tile_col'");
    const std::size_t arity = header.size();
    const bool hard = arity == 3 && trim(header[2]) == "class";
    if (!hard && arity != num_classes + 2)
        throw ValidationError(where(source, lineno) + "header has " + std::to_string(arity) +
                              " columns; expected 3 (hard) or " + std::to_string(num_classes + 2) + " (scores)");

    TilePrediction pred(rows, cols, num_classes);
    TileScores scores(rows, cols, num_classes);
    std::set<std::size_t> seen;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank(line)) continue;
        const auto fields = split(trim(line), ',');
        if (fields.size() != arity)
            throw ValidationError(where(source, lineno) + "row has " + std::to_string(fields.size()) +
                                  " columns, header has " + std::to_string(arity));
        std::size_t r = 0, c = 0;
        if (!parse_uint(fields[0], r) || !parse_uint(fields[1], c))
            throw ValidationError(where(source, lineno) + "non-numeric tile coordinate");
        if (r >= rows || c >= cols)
            throw BoundsError(where(source, lineno) + "tile (" + std::to_string(r) + ", " + std::to_string(c) +
                              ") outside " + std::to_string(rows) + "x" + std::to_string(cols) + " grid");
        const std::size_t t = r * cols + c;
        if (!seen.insert(t).second) throw ValidationError(where(source, lineno) + "duplicate tile");
        if (hard) {
            ClassId k = 0;
            if (!parse_uint(fields[2], k)) throw ValidationError(where(source, lineno) + "non-numeric class");
            if (k >= num_classes)
                throw ValidationError(where(source, lineno) + "class " + std::to_string(k) + " out of range");
            pred.set(t, k);
        } else {
            std::vector<double> v(num_classes);
            for (std::size_t i = 0; i < num_classes; ++i) {
                if (!parse_real(fields[i + 2], v[i]))
                    throw ValidationError(where(source, lineno) + "non-numeric score '" +
                                          std::string(trim(fields[i + 2])) + "'");
                if (!std::isfinite(v[i]) || v[i] < 0)
                    throw ValidationError(where(source, lineno) + "scores must be finite and nonnegative");
            }
            scores.set(t, std::move(v));
        }
    }
    if (hard) return pred;
    return scores;
}

Predictions parse_predictions(const std::filesystem::path& path, std::size_t rows, std::size_t cols,
                              std::size_t num_classes) {
    auto in = open_in(path);
    return read_predictions(in, rows, cols, num_classes, path.string());
}

void write_predictions(std::ostream& out, const TilePrediction& pred) {
    out << "tile_row,tile_col,class\n";
    for (std::size_t r = 0; r < pred.rows(); ++r)
        for (std::size_t c = 0; c < pred.cols(); ++c)
            if (const auto& k = pred.at(r, c)) out << r << ',' << c << ',' << *k << '\n';
}

void save_predictions(const std::filesystem::path& path, const TilePrediction& pred) {
    auto out = open_out(path);
    write_predictions(out, pred);
}

void write_scores(std::ostream& out, const TileScores& scores) {
    out << "tile_row,tile_col";
    for (std::size_t i = 0; i < scores.num_classes(); ++i) out << ",s_" << i;
    out << '\n';
    for (std::size_t t = 0; t < scores.count(); ++t) {
        const auto& s = scores.at(t);
        if (!s) continue;
        out << t / scores.cols() << ',' << t % scores.cols();
        for (double v : *s) out << ',' << format_double(v);
        out << '\n';
    }
}

void save_scores(const std::filesystem::path& path, const TileScores& scores) {
    auto out = open_out(path);
    write_scores(out, scores);
}

}  // namespace ueval
