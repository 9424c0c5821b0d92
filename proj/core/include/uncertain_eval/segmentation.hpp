#pragma once

// Boundary measures between the segmentation implied by tiled predictions and
// certainty-weighted expert boundaries.
//
// For each found pixel f, e is its nearest reference pixel (Euclidean, ties to
// the smallest (y, x)), d_fe the distance, W_e the grade weight of e and n_ef
// the number of found pixels sharing that e.
//
//   DC_f  = exp(-(d_fe W_e)^2) W_e
//   WDC   = clamp(sum_f (DC_f / n_ef) / (max_f(DC_f / n_ef) sum_e W_e), 0, 1)^a
//   FDC_f = 1 - DC_f / W_e
//   FD    = 1 - exp(-sum_f (FDC_f n_ef) / (max_f(FDC_f n_ef) sum_e W_e))
//
// sum_e runs over every reference pixel, matched or not.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "uncertain_eval/model.hpp"

namespace ueval {

inline constexpr double kDefaultExponent = 1.0 / 6.0;

/// Found boundary pixels, sorted row-major without duplicates.
class FoundBoundary {
public:
    FoundBoundary(std::size_t width, std::size_t height, std::vector<Pixel> pixels);

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::span<const Pixel> pixels() const noexcept { return pixels_; }
    std::size_t size() const noexcept { return pixels_.size(); }
    bool empty() const noexcept { return pixels_.empty(); }

    friend bool operator==(const FoundBoundary&, const FoundBoundary&) = default;

private:
    std::size_t width_;
    std::size_t height_;
    std::vector<Pixel> pixels_;
};

/// Boundary implied by a tile classification: for every pair of 4-adjacent
/// tiles with different classes, the shared edge pixels of the tile with the
/// larger row-major index. Unclassified tiles produce no boundary.
FoundBoundary boundary_from_tiles(const TilePrediction& pred, const TileSpec& spec);

struct PixelMatch {
    std::size_t reference = 0;    // index into ReferenceBoundary::pixels()
    std::int64_t squared_distance = 0;
    double distance = 0;
    double weight = 0;            // W_e
    std::size_t multiplicity = 0; // n_ef
};

struct BoundaryMatch {
    std::vector<PixelMatch> matches;  // aligned with FoundBoundary::pixels()
    double reference_weight = 0;      // sum_e W_e over all reference pixels
    std::size_t reference_size = 0;
};

/// Exact nearest reference pixel for each found pixel. Throws DomainError when
/// the reference is empty and ValidationError on mismatched image sizes.
BoundaryMatch match_boundaries(const FoundBoundary& found, const ReferenceBoundary& ref,
                               const CertaintyScale& scale);

/// DC_f for a pixel at distance `distance` from a reference pixel of weight `weight`.
double detection_criterion(double distance, double weight) noexcept;
/// FDC_f = 1 - DC_f / W_e.
double false_detection_criterion(double distance, double weight) noexcept;

/// WDC of a match; 0 when nothing was found. Throws ValidationError unless a > 0.
double well_detection(const BoundaryMatch& match, double a = kDefaultExponent);
/// FD of a match; 0 when nothing was found or every found pixel is exact.
double false_detection(const BoundaryMatch& match);

struct SegScores {
    double wdc = 0;
    double fd = 0;
    std::size_t pixel_count = 0;  // aggregation weight
};

/// WDC and FD of one image against one expert, including the empty-boundary
/// cases: empty reference scores (1, 0) when nothing was found and (0, 1)
/// otherwise.
SegScores evaluate_segmentation(const FoundBoundary& found, const ReferenceBoundary& ref,
                                const CertaintyScale& scale, double a = kDefaultExponent);

struct AggregateScores {
    double wdc = 0;
    double fd = 0;
};

/// Pixel-count weighted means across images and experts.
AggregateScores aggregate(std::span<const SegScores> scores);

}  // namespace ueval
