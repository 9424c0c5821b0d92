#include "uncertain_eval/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>

#include "uncertain_eval/error.hpp"

namespace ueval {

// ---------------------------------------------------------------- ClassSet

ClassSet::ClassSet(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.size() < 2) throw ValidationError("a class set needs at least two classes");
    std::set<std::string> seen;
    for (const auto& n : names_)
        if (!seen.insert(n).second) throw ValidationError("duplicate class name '" + n + "'");
}

ClassSet ClassSet::anonymous(std::size_t n) {
    std::vector<std::string> names;
    names.reserve(n);
    for (std::size_t i = 0; i < n; ++i) names.push_back(std::to_string(i));
    return ClassSet(std::move(names));
}

const std::string& ClassSet::name(ClassId id) const {
    if (id >= names_.size()) throw BoundsError("class id " + std::to_string(id) + " out of range");
    return names_[id];
}

// ---------------------------------------------------------- CertaintyScale

CertaintyScale::CertaintyScale(std::vector<Grade> grades) : grades_(std::move(grades)) {
    if (grades_.empty()) throw ValidationError("a certainty scale needs at least one grade");
    std::set<std::string> seen;
    for (const auto& g : grades_) {
        if (!seen.insert(g.name).second) throw ValidationError("duplicate grade name '" + g.name + "'");
        if (g.weight <= 0 || g.weight > 1)
            throw ValidationError("grade '" + g.name + "' weight " + to_string(g.weight) +
                                  " outside (0, 1]");
        weights_.push_back(to_double(g.weight));
    }
}

CertaintyScale CertaintyScale::default_scale() {
    return CertaintyScale({{"sure", Rational(2, 3)},
                           {"moderately sure", Rational(1, 2)},
                           {"not sure", Rational(1, 3)}});
}

CertaintyScale CertaintyScale::uniform(std::size_t n) {
    std::vector<Rational> w(n, Rational(1));
    return from_weights(w);
}

CertaintyScale CertaintyScale::from_weights(std::span<const Rational> weights) {
    std::vector<Grade> grades;
    grades.reserve(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) grades.push_back({"g" + std::to_string(i), weights[i]});
    return CertaintyScale(std::move(grades));
}

GradeId CertaintyScale::checked(GradeId id) const {
    if (id >= grades_.size())
        throw ValidationError("grade id " + std::to_string(id) + " not in certainty scale of " +
                              std::to_string(grades_.size()) + " grades");
    return id;
}

const Grade& CertaintyScale::grade(GradeId id) const { return grades_[checked(id)]; }

// ----------------------------------------------------------- PixelLabelMap

PixelLabelMap::PixelLabelMap(std::size_t width, std::size_t height, std::size_t num_classes,
                             std::size_t num_grades)
    : PixelLabelMap(width, height, num_classes, num_grades, std::vector<Cell>(width * height)) {}

PixelLabelMap::PixelLabelMap(std::size_t width, std::size_t height, std::size_t num_classes,
                             std::size_t num_grades, std::vector<Cell> cells)
    : width_(width), height_(height), num_classes_(num_classes), num_grades_(num_grades),
      cells_(std::move(cells)) {
    if (width_ == 0 || height_ == 0) throw ValidationError("label map has zero extent");
    if (num_classes_ < 2) throw ValidationError("label map needs at least two classes");
    if (num_grades_ < 1) throw ValidationError("label map needs at least one grade");
    if (cells_.size() != width_ * height_)
        throw ValidationError("label map has " + std::to_string(cells_.size()) + " cells, expected " +
                              std::to_string(width_ * height_));
    for (const auto& c : cells_) validate(c);
}

void PixelLabelMap::validate(const Cell& cell) const {
    if (!cell) return;
    if (cell->class_id >= num_classes_)
        throw ValidationError("class id " + std::to_string(cell->class_id) + " out of range");
    if (cell->grade >= num_grades_)
        throw ValidationError("grade id " + std::to_string(cell->grade) + " out of range");
}

const PixelLabelMap::Cell& PixelLabelMap::at(std::size_t x, std::size_t y) const {
    if (x >= width_ || y >= height_) throw BoundsError("pixel outside label map");
    return cells_[y * width_ + x];
}

void PixelLabelMap::set(std::size_t x, std::size_t y, Cell cell) {
    if (x >= width_ || y >= height_) throw BoundsError("pixel outside label map");
    validate(cell);
    cells_[y * width_ + x] = cell;
}

std::size_t PixelLabelMap::labeled_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(cells_.begin(), cells_.end(),
                                                  [](const Cell& c) { return c.has_value(); }));
}

// ------------------------------------------------------- ReferenceBoundary

ReferenceBoundary::ReferenceBoundary(std::size_t width, std::size_t height, std::size_t num_grades,
                                     std::vector<BoundaryPixel> pixels)
    : width_(width), height_(height), num_grades_(num_grades), pixels_(std::move(pixels)) {
    if (width_ == 0 || height_ == 0) throw ValidationError("boundary image has zero extent");
    for (const auto& p : pixels_) {
        if (p.pos.x < 0 || p.pos.y < 0 || static_cast<std::size_t>(p.pos.x) >= width_ ||
            static_cast<std::size_t>(p.pos.y) >= height_)
            throw BoundsError("boundary pixel (" + std::to_string(p.pos.x) + ", " +
                              std::to_string(p.pos.y) + ") outside " + std::to_string(width_) + "x" +
                              std::to_string(height_) + " image");
        if (p.grade >= num_grades_)
            throw ValidationError("boundary grade id " + std::to_string(p.grade) + " out of range");
    }
    std::stable_sort(pixels_.begin(), pixels_.end(),
                     [](const BoundaryPixel& a, const BoundaryPixel& b) { return row_major_less(a.pos, b.pos); });
    pixels_.erase(std::unique(pixels_.begin(), pixels_.end(),
                              [](const BoundaryPixel& a, const BoundaryPixel& b) { return a.pos == b.pos; }),
                  pixels_.end());
}

// ---------------------------------------------------------------- TileSpec

TileSpec::TileSpec(std::size_t tile, std::size_t width, std::size_t height)
    : tile_(tile), width_(width), height_(height) {
    if (tile_ == 0) throw ValidationError("tile side must be at least 1");
    if (width_ == 0 || height_ == 0) throw ValidationError("image has zero extent");
    cols_ = (width_ + tile_ - 1) / tile_;
    rows_ = (height_ + tile_ - 1) / tile_;
}

TileIndex TileSpec::index(std::size_t row, std::size_t col) const {
    if (row >= rows_ || col >= cols_) throw BoundsError("tile outside grid");
    return row * cols_ + col;
}

TileSpec::Rect TileSpec::rect(TileIndex t) const {
    if (t >= count()) throw BoundsError("tile index out of range");
    const std::size_t x0 = col_of(t) * tile_;
    const std::size_t y0 = row_of(t) * tile_;
    return {x0, y0, std::min(x0 + tile_, width_), std::min(y0 + tile_, height_)};
}

TileIndex tile_of(Pixel pixel, const TileSpec& spec) {
    if (pixel.x < 0 || pixel.y < 0 || static_cast<std::size_t>(pixel.x) >= spec.width() ||
        static_cast<std::size_t>(pixel.y) >= spec.height())
        throw BoundsError("pixel (" + std::to_string(pixel.x) + ", " + std::to_string(pixel.y) +
                          ") outside image");
    return spec.index(static_cast<std::size_t>(pixel.y) / spec.tile(),
                      static_cast<std::size_t>(pixel.x) / spec.tile());
}

// --------------------------------------------------------- TileComposition

std::size_t TileComposition::labeled() const noexcept {
    std::size_t n = 0;
    for (const auto& e : entries) n += e.count;
    return n;
}

std::vector<TileComposition> compose_tiles(const PixelLabelMap& map, const TileSpec& spec) {
    if (map.width() != spec.width() || map.height() != spec.height())
        throw ValidationError("label map is " + std::to_string(map.width()) + "x" +
                              std::to_string(map.height()) + " but tiling expects " +
                              std::to_string(spec.width()) + "x" + std::to_string(spec.height()));
    std::vector<TileComposition> out(spec.count());
    for (TileIndex t = 0; t < spec.count(); ++t) {
        const auto r = spec.rect(t);
        std::map<std::pair<ClassId, GradeId>, std::size_t> counts;
        for (std::size_t y = r.y0; y < r.y1; ++y)
            for (std::size_t x = r.x0; x < r.x1; ++x)
                if (const auto& c = map.at(x, y)) ++counts[{c->class_id, c->grade}];
        out[t].area = r.area();
        out[t].entries.reserve(counts.size());
        for (const auto& [key, n] : counts) out[t].entries.push_back({key.first, key.second, n});
    }
    return out;
}

Homogeneity homogeneity(const TileComposition& comp) noexcept {
    if (comp.entries.empty()) return Homogeneity::Empty;
    const ClassId first = comp.entries.front().class_id;
    for (const auto& e : comp.entries)
        if (e.class_id != first) return Homogeneity::Inhomogeneous;
    return Homogeneity::Homogeneous;
}

std::optional<ClassId> majority_class(const TileComposition& comp) noexcept {
    std::map<ClassId, std::size_t> per_class;
    for (const auto& e : comp.entries) per_class[e.class_id] += e.count;
    std::optional<ClassId> best;
    std::size_t best_count = 0;
    for (const auto& [c, n] : per_class) {
        if (n > best_count) {
            best = c;
            best_count = n;
        }
    }
    return best;
}

// ---------------------------------------------------------- TilePrediction

TilePrediction::TilePrediction(std::size_t rows, std::size_t cols, std::size_t num_classes)
    : TilePrediction(rows, cols, num_classes, std::vector<std::optional<ClassId>>(rows * cols)) {}

TilePrediction::TilePrediction(std::size_t rows, std::size_t cols, std::size_t num_classes,
                               std::vector<std::optional<ClassId>> classes)
    : rows_(rows), cols_(cols), num_classes_(num_classes), classes_(std::move(classes)) {
    if (classes_.size() != rows_ * cols_) throw ValidationError("prediction grid size mismatch");
    for (const auto& c : classes_)
        if (c && *c >= num_classes_)
            throw ValidationError("predicted class " + std::to_string(*c) + " out of range");
}

const std::optional<ClassId>& TilePrediction::at(TileIndex t) const {
    if (t >= classes_.size()) throw BoundsError("tile index out of range");
    return classes_[t];
}

const std::optional<ClassId>& TilePrediction::at(std::size_t row, std::size_t col) const {
    if (row >= rows_ || col >= cols_) throw BoundsError("tile outside grid");
    return classes_[row * cols_ + col];
}

void TilePrediction::set(TileIndex t, std::optional<ClassId> c) {
    if (t >= classes_.size()) throw BoundsError("tile index out of range");
    if (c && *c >= num_classes_) throw ValidationError("predicted class " + std::to_string(*c) + " out of range");
    classes_[t] = c;
}

// -------------------------------------------------------------- TileScores

TileScores::TileScores(std::size_t rows, std::size_t cols, std::size_t num_classes)
    : rows_(rows), cols_(cols), num_classes_(num_classes), scores_(rows * cols) {
    if (num_classes_ < 2) throw ValidationError("scores need at least two classes");
}

const std::optional<std::vector<double>>& TileScores::at(TileIndex t) const {
    if (t >= scores_.size()) throw BoundsError("tile index out of range");
    return scores_[t];
}

void TileScores::set(TileIndex t, std::vector<double> values) {
    if (t >= scores_.size()) throw BoundsError("tile index out of range");
    if (values.size() != num_classes_)
        throw ValidationError("score vector has " + std::to_string(values.size()) + " values, expected " +
                              std::to_string(num_classes_));
    for (double v : values)
        if (!std::isfinite(v) || v < 0) throw ValidationError("scores must be finite and nonnegative");
    scores_[t] = std::move(values);
}

double TileScores::max_value() const noexcept {
    double m = 0;
    for (const auto& s : scores_)
        if (s)
            for (double v : *s) m = std::max(m, v);
    return m;
}

}  // namespace ueval
