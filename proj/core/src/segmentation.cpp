#include "uncertain_eval/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "uncertain_eval/error.hpp"

namespace ueval {

FoundBoundary::FoundBoundary(std::size_t width, std::size_t height, std::vector<Pixel> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
    for (const auto& p : pixels_)
        if (p.x < 0 || p.y < 0 || static_cast<std::size_t>(p.x) >= width_ ||
            static_cast<std::size_t>(p.y) >= height_)
            throw BoundsError("found boundary pixel (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                              ") outside image");
    std::sort(pixels_.begin(), pixels_.end(), row_major_less);
    pixels_.erase(std::unique(pixels_.begin(), pixels_.end()), pixels_.end());
}

FoundBoundary boundary_from_tiles(const TilePrediction& pred, const TileSpec& spec) {
    if (pred.rows() != spec.rows() || pred.cols() != spec.cols())
        throw ValidationError("prediction grid does not match tiling");
    std::vector<Pixel> out;
    for (std::size_t row = 0; row < spec.rows(); ++row) {
        for (std::size_t col = 0; col < spec.cols(); ++col) {
            const TileIndex t = spec.index(row, col);
            const auto& here = pred.at(t);
            if (!here) continue;
            const auto r = spec.rect(t);
            if (col > 0) {
                const auto& left = pred.at(row, col - 1);
                if (left && *left != *here)
                    for (std::size_t y = r.y0; y < r.y1; ++y)
                        out.push_back({static_cast<std::int64_t>(r.x0), static_cast<std::int64_t>(y)});
            }
            if (row > 0) {
                const auto& above = pred.at(row - 1, col);
                if (above && *above != *here)
                    for (std::size_t x = r.x0; x < r.x1; ++x)
                        out.push_back({static_cast<std::int64_t>(x), static_cast<std::int64_t>(r.y0)});
            }
        }
    }
    return FoundBoundary(spec.width(), spec.height(), std::move(out));
}

namespace {

// Uniform bucket grid over the reference pixels. Queries scan square rings of
// buckets outward and stop once no unvisited bucket can hold a pixel at
// distance <= the best found so far, so results equal an exhaustive search.
class NearestIndex {
public:
    NearestIndex(std::span<const BoundaryPixel> pixels, std::size_t width, std::size_t height)
        : pixels_(pixels) {
        const double density = static_cast<double>(pixels.size()) / static_cast<double>(width * height);
        // Aim for a handful of pixels per bucket.
        cell_ = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::sqrt(4.0 / std::max(density, 1e-12))), 1, 64);
        cols_ = (static_cast<std::int64_t>(width) + cell_ - 1) / cell_;
        rows_ = (static_cast<std::int64_t>(height) + cell_ - 1) / cell_;
        start_.assign(static_cast<std::size_t>(cols_ * rows_ + 1), 0);
        for (const auto& p : pixels) ++start_[bucket(p.pos.x / cell_, p.pos.y / cell_) + 1];
        for (std::size_t b = 1; b < start_.size(); ++b) start_[b] += start_[b - 1];
        items_.resize(pixels.size());
        auto fill = start_;
        for (std::size_t i = 0; i < pixels.size(); ++i) {
            const auto& p = pixels[i].pos;
            items_[fill[bucket(p.x / cell_, p.y / cell_)]++] = i;
        }
    }

    // Returns (index, squared distance) of the nearest pixel; ties go to the
    // smallest index, i.e. the smallest (y, x) since pixels are row-major.
    std::pair<std::size_t, std::int64_t> nearest(Pixel q) const {
        const std::int64_t qc = q.x / cell_;
        const std::int64_t qr = q.y / cell_;
        std::size_t best = std::numeric_limits<std::size_t>::max();
        std::int64_t best_d2 = std::numeric_limits<std::int64_t>::max();
        const std::int64_t max_ring = std::max({qc, cols_ - 1 - qc, qr, rows_ - 1 - qr});
        for (std::int64_t ring = 0; ring <= max_ring; ++ring) {
            if (ring > 0 && best != std::numeric_limits<std::size_t>::max()) {
                const std::int64_t gap = (ring - 1) * cell_ + 1;
                if (gap * gap > best_d2) break;
            }
            for (std::int64_t r = qr - ring; r <= qr + ring; ++r) {
                if (r < 0 || r >= rows_) continue;
                const bool edge_row = r == qr - ring || r == qr + ring;
                for (std::int64_t c = qc - ring; c <= qc + ring; c += (edge_row ? 1 : 2 * ring)) {
                    if (c >= 0 && c < cols_) scan(bucket(c, r), q, best, best_d2);
                    if (ring == 0) break;
                }
            }
        }
        return {best, best_d2};
    }

private:
    std::size_t bucket(std::int64_t c, std::int64_t r) const { return static_cast<std::size_t>(r * cols_ + c); }

    void scan(std::size_t b, Pixel q, std::size_t& best, std::int64_t& best_d2) const {
        for (std::size_t k = start_[b]; k < start_[b + 1]; ++k) {
            const std::size_t i = items_[k];
            const std::int64_t dx = pixels_[i].pos.x - q.x;
            const std::int64_t dy = pixels_[i].pos.y - q.y;
            const std::int64_t d2 = dx * dx + dy * dy;
            if (d2 < best_d2 || (d2 == best_d2 && i < best)) {
                best = i;
                best_d2 = d2;
            }
        }
    }

    std::span<const BoundaryPixel> pixels_;
    std::int64_t cell_ = 1;
    std::int64_t cols_ = 0;
    std::int64_t rows_ = 0;
    std::vector<std::size_t> start_;
    std::vector<std::size_t> items_;
};

}  // namespace

BoundaryMatch match_boundaries(const FoundBoundary& found, const ReferenceBoundary& ref,
                               const CertaintyScale& scale) {
    if (ref.empty()) throw DomainError("cannot match against an empty reference boundary");
    if (found.width() != ref.width() || found.height() != ref.height())
        throw ValidationError("found and reference boundaries come from images of different sizes");

    BoundaryMatch out;
    out.reference_size = ref.size();
    for (const auto& e : ref.pixels()) out.reference_weight += scale.weight_value(e.grade);

    const NearestIndex index(ref.pixels(), ref.width(), ref.height());
    std::vector<std::size_t> hits(ref.size(), 0);
    out.matches.reserve(found.size());
    for (const auto& f : found.pixels()) {
        const auto [e, d2] = index.nearest(f);
        PixelMatch m;
        m.reference = e;
        m.squared_distance = d2;
        m.distance = std::sqrt(static_cast<double>(d2));
        m.weight = scale.weight_value(ref.pixels()[e].grade);
        out.matches.push_back(m);
        ++hits[e];
    }
    for (auto& m : out.matches) m.multiplicity = hits[m.reference];
    return out;
}

double detection_criterion(double distance, double weight) noexcept {
    const double dw = distance * weight;
    return std::exp(-dw * dw) * weight;
}

double false_detection_criterion(double distance, double weight) noexcept {
    const double dw = distance * weight;
    return -std::expm1(-dw * dw);
}

double well_detection(const BoundaryMatch& match, double a) {
    if (!(a > 0) || !std::isfinite(a)) throw ValidationError("exponent a must be positive");
    if (match.matches.empty()) return 0.0;
    double sum = 0;
    double peak = 0;
    for (const auto& m : match.matches) {
        const double v = detection_criterion(m.distance, m.weight) / static_cast<double>(m.multiplicity);
        sum += v;
        peak = std::max(peak, v);
    }
    if (peak <= 0 || match.reference_weight <= 0) return 0.0;
    const double ratio = std::clamp(sum / (peak * match.reference_weight), 0.0, 1.0);
    return std::pow(ratio, a);
}

double false_detection(const BoundaryMatch& match) {
    if (match.matches.empty()) return 0.0;
    double sum = 0;
    double peak = 0;
    for (const auto& m : match.matches) {
        const double v = false_detection_criterion(m.distance, m.weight) * static_cast<double>(m.multiplicity);
        sum += v;
        peak = std::max(peak, v);
    }
    if (peak <= 0 || match.reference_weight <= 0) return 0.0;
    return std::clamp(-std::expm1(-sum / (peak * match.reference_weight)), 0.0, 1.0);
}

SegScores evaluate_segmentation(const FoundBoundary& found, const ReferenceBoundary& ref,
                                const CertaintyScale& scale, double a) {
    if (!(a > 0) || !std::isfinite(a)) throw ValidationError("exponent a must be positive");
    SegScores s;
    s.pixel_count = ref.width() * ref.height();
    if (ref.empty()) {
        s.wdc = found.empty() ? 1.0 : 0.0;
        s.fd = found.empty() ? 0.0 : 1.0;
        return s;
    }
    const auto match = match_boundaries(found, ref, scale);
    s.wdc = well_detection(match, a);
    s.fd = false_detection(match);
    return s;
}

AggregateScores aggregate(std::span<const SegScores> scores) {
    if (scores.empty()) throw ValidationError("aggregate of an empty score list");
    double total = 0;
    AggregateScores out;
    for (const auto& s : scores) {
        const auto w = static_cast<double>(s.pixel_count);
        out.wdc += w * s.wdc;
        out.fd += w * s.fd;
        total += w;
    }
    if (total <= 0) throw ValidationError("aggregate weights sum to zero");
    out.wdc /= total;
    out.fd /= total;
    return out;
}

}  // namespace ueval
