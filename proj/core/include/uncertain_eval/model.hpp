#pragma once

// Domain types shared by the evaluation and fusion modules: class frames,
// certainty scales, pixel grids, tiling and tile composition.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uncertain_eval/rational.hpp"

namespace ueval {

using ClassId = std::uint32_t;
using GradeId = std::uint32_t;
using TileIndex = std::size_t;

class ClassSet {
public:
    explicit ClassSet(std::vector<std::string> names);

    /// Classes named "0".."n-1".
    static ClassSet anonymous(std::size_t n);

    std::size_t size() const noexcept { return names_.size(); }
    const std::string& name(ClassId id) const;
    const std::vector<std::string>& names() const noexcept { return names_; }

private:
    std::vector<std::string> names_;
};

struct Grade {
    std::string name;
    Rational weight;
};

/// Ordered certainty grades (e.g. sure / moderately sure / not sure), each
/// mapped to a weight in (0, 1].
class CertaintyScale {
public:
    explicit CertaintyScale(std::vector<Grade> grades);

    /// sure = 2/3, moderately sure = 1/2, not sure = 1/3.
    static CertaintyScale default_scale();
    /// `n` grades named g0.. all with weight 1.
    static CertaintyScale uniform(std::size_t n);
    /// Weights in order, grades named g0, g1, ...
    static CertaintyScale from_weights(std::span<const Rational> weights);

    std::size_t size() const noexcept { return grades_.size(); }
    const Grade& grade(GradeId id) const;
    const Rational& weight(GradeId id) const { return grade(id).weight; }
    double weight_value(GradeId id) const { return weights_[checked(id)]; }
    const std::vector<Grade>& grades() const noexcept { return grades_; }

private:
    GradeId checked(GradeId id) const;

    std::vector<Grade> grades_;
    std::vector<double> weights_;
};

struct PixelLabel {
    ClassId class_id = 0;
    GradeId grade = 0;

    friend bool operator==(const PixelLabel&, const PixelLabel&) = default;
};

/// Per-pixel expert labels; std::nullopt marks an unlabeled pixel.
class PixelLabelMap {
public:
    using Cell = std::optional<PixelLabel>;

    PixelLabelMap(std::size_t width, std::size_t height, std::size_t num_classes,
                  std::size_t num_grades);
    PixelLabelMap(std::size_t width, std::size_t height, std::size_t num_classes,
                  std::size_t num_grades, std::vector<Cell> cells);

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t num_classes() const noexcept { return num_classes_; }
    std::size_t num_grades() const noexcept { return num_grades_; }

    const Cell& at(std::size_t x, std::size_t y) const;
    void set(std::size_t x, std::size_t y, Cell cell);
    std::span<const Cell> cells() const noexcept { return cells_; }
    std::size_t labeled_count() const noexcept;

    friend bool operator==(const PixelLabelMap&, const PixelLabelMap&) = default;

private:
    void validate(const Cell& cell) const;

    std::size_t width_;
    std::size_t height_;
    std::size_t num_classes_;
    std::size_t num_grades_;
    std::vector<Cell> cells_;
};

struct Pixel {
    std::int64_t x = 0;
    std::int64_t y = 0;

    friend bool operator==(const Pixel&, const Pixel&) = default;
};

/// Row-major order, i.e. lexicographic on (y, x).
inline bool row_major_less(const Pixel& a, const Pixel& b) noexcept {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
}

struct BoundaryPixel {
    Pixel pos;
    GradeId grade = 0;

    friend bool operator==(const BoundaryPixel&, const BoundaryPixel&) = default;
};

/// Expert boundary pixels with their certainty grades. Stored sorted in
/// row-major order; duplicate coordinates keep the first grade supplied.
class ReferenceBoundary {
public:
    ReferenceBoundary(std::size_t width, std::size_t height, std::size_t num_grades,
                      std::vector<BoundaryPixel> pixels);

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t num_grades() const noexcept { return num_grades_; }
    std::span<const BoundaryPixel> pixels() const noexcept { return pixels_; }
    std::size_t size() const noexcept { return pixels_.size(); }
    bool empty() const noexcept { return pixels_.empty(); }

    friend bool operator==(const ReferenceBoundary&, const ReferenceBoundary&) = default;

private:
    std::size_t width_;
    std::size_t height_;
    std::size_t num_grades_;
    std::vector<BoundaryPixel> pixels_;
};

/// Square tiles of side `tile` laid out row-major over a width x height image.
/// Edge tiles are clipped to the image.
class TileSpec {
public:
    TileSpec(std::size_t tile, std::size_t width, std::size_t height);

    std::size_t tile() const noexcept { return tile_; }
    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t count() const noexcept { return rows_ * cols_; }

    TileIndex index(std::size_t row, std::size_t col) const;
    std::size_t row_of(TileIndex t) const noexcept { return t / cols_; }
    std::size_t col_of(TileIndex t) const noexcept { return t % cols_; }

    /// Pixel extent [x0, x1) x [y0, y1) of a tile.
    struct Rect {
        std::size_t x0, y0, x1, y1;
        std::size_t area() const noexcept { return (x1 - x0) * (y1 - y0); }
    };
    Rect rect(TileIndex t) const;

    friend bool operator==(const TileSpec&, const TileSpec&) = default;

private:
    std::size_t tile_;
    std::size_t width_;
    std::size_t height_;
    std::size_t cols_;
    std::size_t rows_;
};

/// Row-major index of the tile containing `pixel`. Throws BoundsError when
/// the pixel lies outside the image.
TileIndex tile_of(Pixel pixel, const TileSpec& spec);

struct CompositionEntry {
    ClassId class_id = 0;
    GradeId grade = 0;
    std::size_t count = 0;

    friend bool operator==(const CompositionEntry&, const CompositionEntry&) = default;
};

/// Labeled pixel counts of one tile grouped by (class, grade), sorted by
/// (class, grade). `area` is the true pixel area of the (possibly clipped) tile.
struct TileComposition {
    std::vector<CompositionEntry> entries;
    std::size_t area = 0;

    bool empty() const noexcept { return entries.empty(); }
    std::size_t labeled() const noexcept;

    friend bool operator==(const TileComposition&, const TileComposition&) = default;
};

std::vector<TileComposition> compose_tiles(const PixelLabelMap& map, const TileSpec& spec);

enum class Homogeneity { Homogeneous, Inhomogeneous, Empty };

Homogeneity homogeneity(const TileComposition& comp) noexcept;

/// Class with the largest pixel count in the tile; ties go to the smaller id.
std::optional<ClassId> majority_class(const TileComposition& comp) noexcept;

/// Hard per-tile decisions; std::nullopt marks an unclassified tile.
class TilePrediction {
public:
    TilePrediction(std::size_t rows, std::size_t cols, std::size_t num_classes);
    TilePrediction(std::size_t rows, std::size_t cols, std::size_t num_classes,
                   std::vector<std::optional<ClassId>> classes);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t count() const noexcept { return classes_.size(); }
    std::size_t num_classes() const noexcept { return num_classes_; }

    const std::optional<ClassId>& at(TileIndex t) const;
    const std::optional<ClassId>& at(std::size_t row, std::size_t col) const;
    void set(TileIndex t, std::optional<ClassId> c);
    std::span<const std::optional<ClassId>> classes() const noexcept { return classes_; }

    friend bool operator==(const TilePrediction&, const TilePrediction&) = default;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::size_t num_classes_;
    std::vector<std::optional<ClassId>> classes_;
};

/// Per-tile vector of N nonnegative values from one source (likelihoods or
/// distances). std::nullopt marks a tile the source did not score.
class TileScores {
public:
    TileScores(std::size_t rows, std::size_t cols, std::size_t num_classes);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t count() const noexcept { return scores_.size(); }
    std::size_t num_classes() const noexcept { return num_classes_; }

    const std::optional<std::vector<double>>& at(TileIndex t) const;
    void set(TileIndex t, std::vector<double> values);
    /// Largest value over all scored tiles and classes (0 when none).
    double max_value() const noexcept;

    friend bool operator==(const TileScores&, const TileScores&) = default;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::size_t num_classes_;
    std::vector<std::optional<std::vector<double>>> scores_;
};

}  // namespace ueval
