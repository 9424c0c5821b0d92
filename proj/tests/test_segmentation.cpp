#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "uncertain_eval/error.hpp"
#include "uncertain_eval/segmentation.hpp"

using namespace ueval;

namespace {

const auto kScale = CertaintyScale::default_scale();

std::vector<Pixel> sorted_unique(std::vector<Pixel> px) {
    std::sort(px.begin(), px.end(), row_major_less);
    px.erase(std::unique(px.begin(), px.end()), px.end());
    return px;
}

ReferenceBoundary line(std::size_t w, std::size_t h, std::int64_t y, std::int64_t x0, std::int64_t x1,
                       GradeId g = 0) {
    std::vector<BoundaryPixel> px;
    for (std::int64_t x = x0; x <= x1; ++x) px.push_back({{x, y}, g});
    return ReferenceBoundary(w, h, 3, px);
}

}  // namespace

TEST(BoundaryFromTiles, TwoTilesShareOneColumn) {
    const TileSpec spec(32, 64, 32);
    const TilePrediction pred(1, 2, 2, {0u, 1u});
    const auto b = boundary_from_tiles(pred, spec);
    ASSERT_EQ(b.size(), 32u);
    for (std::int64_t y = 0; y < 32; ++y) EXPECT_EQ(b.pixels()[static_cast<std::size_t>(y)], (Pixel{32, y}));
}

TEST(BoundaryFromTiles, CheckerboardDeduplicatesCorner) {
    const TileSpec spec(32, 64, 64);
    const TilePrediction pred(2, 2, 2, {0u, 1u, 1u, 0u});
    EXPECT_EQ(boundary_from_tiles(pred, spec).size(), 127u);
    const TilePrediction flat(2, 2, 2, {1u, 1u, 1u, 1u});
    EXPECT_TRUE(boundary_from_tiles(flat, spec).empty());
}

TEST(BoundaryFromTiles, MatchesPerPixelOracle) {
    std::mt19937_64 rng(4);
    for (int round = 0; round < 100; ++round) {
        std::uniform_int_distribution<std::size_t> side(1, 50), tile(1, 9);
        const TileSpec spec(tile(rng), side(rng), side(rng));
        TilePrediction pred(spec.rows(), spec.cols(), 3);
        std::uniform_int_distribution<int> cls(-1, 2);
        for (TileIndex t = 0; t < spec.count(); ++t) {
            const int c = cls(rng);
            if (c >= 0) pred.set(t, static_cast<ClassId>(c));
        }
        const auto got = boundary_from_tiles(pred, spec);
        const auto want = sorted_unique(oracle::tile_edge_pixels(pred, spec));
        ASSERT_EQ(std::vector<Pixel>(got.pixels().begin(), got.pixels().end()), want);
    }
}

TEST(MatchBoundaries, ThreeFoundPixelsShareOneReference) {
    const auto ref = line(16, 16, 5, 0, 9);
    const FoundBoundary found(16, 16, {{4, 6}, {4, 7}, {4, 8}});
    const auto m = match_boundaries(found, ref, kScale);
    ASSERT_EQ(m.matches.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(ref.pixels()[m.matches[i].reference].pos, (Pixel{4, 5}));
        EXPECT_EQ(m.matches[i].multiplicity, 3u);
        EXPECT_EQ(m.matches[i].squared_distance, static_cast<std::int64_t>((i + 1) * (i + 1)));
    }
    EXPECT_DOUBLE_EQ(m.reference_weight, 10 * 2.0 / 3.0);
}

TEST(MatchBoundaries, TiesGoToSmallestRowMajor) {
    const ReferenceBoundary ref(8, 8, 3, {{{5, 3}, 0}, {{3, 3}, 0}, {{4, 2}, 0}, {{4, 4}, 0}});
    const FoundBoundary found(8, 8, {{4, 3}});
    const auto m = match_boundaries(found, ref, kScale);
    EXPECT_EQ(ref.pixels()[m.matches[0].reference].pos, (Pixel{4, 2}));
}

TEST(MatchBoundaries, Errors) {
    const FoundBoundary found(8, 8, {{1, 1}});
    EXPECT_THROW(match_boundaries(found, ReferenceBoundary(8, 8, 3, {}), kScale), DomainError);
    EXPECT_THROW(match_boundaries(found, line(9, 8, 0, 0, 3), kScale), ValidationError);
    EXPECT_THROW(FoundBoundary(4, 4, {{4, 0}}), BoundsError);
}

TEST(MatchBoundaries, AgreesWithAllPairsOracle) {
    std::mt19937_64 rng(99);
    for (int round = 0; round < 200; ++round) {
        auto inst = oracle::random_boundaries(rng);
        const ReferenceBoundary ref(inst.width, inst.height, 3, inst.reference);
        const FoundBoundary found(inst.width, inst.height, inst.found);
        const std::vector<BoundaryPixel> ref_px(ref.pixels().begin(), ref.pixels().end());
        const std::vector<Pixel> found_px(found.pixels().begin(), found.pixels().end());
        const auto want = oracle::all_pairs_nearest(found_px, ref_px);
        const auto m = match_boundaries(found, ref, kScale);
        ASSERT_EQ(m.matches.size(), want.size());
        std::vector<std::size_t> uses(ref_px.size(), 0);
        for (std::size_t i = 0; i < want.size(); ++i) {
            EXPECT_EQ(m.matches[i].squared_distance, want[i].squared_distance);
            EXPECT_EQ(m.matches[i].reference, want[i].index);
            ++uses[want[i].index];
        }
        for (std::size_t i = 0; i < want.size(); ++i) EXPECT_EQ(m.matches[i].multiplicity, uses[want[i].index]);
        std::size_t total = 0;
        for (auto u : uses) total += u;
        EXPECT_EQ(total, found.size());
    }
}

TEST(MatchBoundaries, TranslationInvariant) {
    std::mt19937_64 rng(7);
    for (int round = 0; round < 50; ++round) {
        auto inst = oracle::random_boundaries(rng, 40, 80);
        const ReferenceBoundary ref(inst.width, inst.height, 3, inst.reference);
        const FoundBoundary found(inst.width, inst.height, inst.found);
        const std::int64_t dx = 5, dy = 9;
        auto shifted_ref = inst.reference;
        for (auto& p : shifted_ref) p.pos = {p.pos.x + dx, p.pos.y + dy};
        auto shifted_found = inst.found;
        for (auto& p : shifted_found) p = {p.x + dx, p.y + dy};
        const ReferenceBoundary ref2(inst.width + 5, inst.height + 9, 3, shifted_ref);
        const FoundBoundary found2(inst.width + 5, inst.height + 9, shifted_found);
        const auto a = match_boundaries(found, ref, kScale);
        const auto b = match_boundaries(found2, ref2, kScale);
        ASSERT_EQ(a.matches.size(), b.matches.size());
        for (std::size_t i = 0; i < a.matches.size(); ++i)
            EXPECT_EQ(a.matches[i].squared_distance, b.matches[i].squared_distance);
        EXPECT_DOUBLE_EQ(well_detection(a), well_detection(b));
        EXPECT_DOUBLE_EQ(false_detection(a), false_detection(b));
    }
}

TEST(Criteria, DetectionAndFalseDetection) {
    EXPECT_DOUBLE_EQ(detection_criterion(0, 2.0 / 3), 2.0 / 3);
    EXPECT_DOUBLE_EQ(false_detection_criterion(0, 0.5), 0.0);
    EXPECT_NEAR(false_detection_criterion(1, 1), 1 - std::exp(-1.0), 1e-15);
    double prev = detection_criterion(0, 0.5);
    for (int d = 1; d < 20; ++d) {
        const double dc = detection_criterion(d * 0.3, 0.5);
        EXPECT_LE(dc, prev);
        prev = dc;
        const double fdc = false_detection_criterion(d * 0.3, 0.5);
        EXPECT_GE(fdc, 0.0);
        EXPECT_LT(fdc, 1.0);
        EXPECT_NEAR(fdc, 1 - dc / 0.5, 1e-12);
    }
}

TEST(EvaluateSegmentation, ExactMatch) {
    const auto ref = line(16, 16, 5, 0, 9);
    const FoundBoundary found(16, 16, {{0, 5}, {1, 5}, {2, 5}, {3, 5}, {4, 5}, {5, 5}, {6, 5}, {7, 5}, {8, 5}, {9, 5}});
    const auto s = evaluate_segmentation(found, ref, kScale);
    EXPECT_NEAR(s.wdc, 1.0, 1e-12);
    EXPECT_EQ(s.fd, 0.0);
    EXPECT_EQ(s.pixel_count, 256u);
}

TEST(EvaluateSegmentation, HalfCoverageAndUnitDistance) {
    const CertaintyScale ones = CertaintyScale::uniform(3);
    const auto ref = line(16, 16, 5, 0, 9);
    const FoundBoundary half(16, 16, {{0, 5}, {1, 5}, {2, 5}, {3, 5}, {4, 5}});
    EXPECT_NEAR(evaluate_segmentation(half, ref, ones).wdc, std::pow(0.5, 1.0 / 6.0), 1e-9);
    const FoundBoundary shifted(16, 16, {{0, 6}, {1, 6}, {2, 6}, {3, 6}, {4, 6}, {5, 6}, {6, 6}, {7, 6}, {8, 6}, {9, 6}});
    EXPECT_NEAR(evaluate_segmentation(shifted, ref, ones).fd, 1 - std::exp(-1.0), 1e-9);
}

TEST(EvaluateSegmentation, MixedWeightsClampAtOne) {
    const ReferenceBoundary ref(8, 8, 3, {{{0, 0}, 0}, {{1, 0}, 2}});
    const FoundBoundary found(8, 8, {{0, 0}, {1, 0}});
    const auto m = match_boundaries(found, ref, kScale);
    // sum DC / (max DC * sum W) = 1 / (2/3 * 1) = 1.5 before clamping.
    EXPECT_DOUBLE_EQ(well_detection(m), 1.0);
    EXPECT_DOUBLE_EQ(well_detection(m, 1.0), 1.0);
}

TEST(EvaluateSegmentation, DegenerateBoundaries) {
    const ReferenceBoundary none(8, 8, 3, {});
    const FoundBoundary nothing(8, 8, {});
    const FoundBoundary some(8, 8, {{1, 1}});
    const auto both_empty = evaluate_segmentation(nothing, none, kScale);
    EXPECT_EQ(both_empty.wdc, 1.0);
    EXPECT_EQ(both_empty.fd, 0.0);
    const auto spurious = evaluate_segmentation(some, none, kScale);
    EXPECT_EQ(spurious.wdc, 0.0);
    EXPECT_EQ(spurious.fd, 1.0);
    const auto missed = evaluate_segmentation(nothing, line(8, 8, 2, 0, 3), kScale);
    EXPECT_EQ(missed.wdc, 0.0);
    EXPECT_EQ(missed.fd, 0.0);
    EXPECT_THROW(well_detection(match_boundaries(some, line(8, 8, 2, 0, 3), kScale), 0.0), ValidationError);
}

TEST(EvaluateSegmentation, ScoresStayInUnitInterval) {
    std::mt19937_64 rng(123);
    for (int round = 0; round < 500; ++round) {
        auto inst = oracle::random_boundaries(rng, 48, 120);
        const ReferenceBoundary ref(inst.width, inst.height, 3, inst.reference);
        const FoundBoundary found(inst.width, inst.height, inst.found);
        const auto s = evaluate_segmentation(found, ref, kScale);
        EXPECT_GE(s.wdc, 0.0);
        EXPECT_LE(s.wdc, 1.0);
        EXPECT_GE(s.fd, 0.0);
        EXPECT_LE(s.fd, 1.0);
    }
}

TEST(Aggregate, PixelWeightedMean) {
    const std::vector<SegScores> s{{1.0, 0.0, 100}, {0.5, 0.4, 300}};
    const auto a = aggregate(s);
    EXPECT_DOUBLE_EQ(a.fd, 0.3);
    EXPECT_DOUBLE_EQ(a.wdc, 0.625);
    const std::vector<SegScores> reversed{s[1], s[0]};
    EXPECT_DOUBLE_EQ(aggregate(reversed).wdc, a.wdc);
    const std::vector<SegScores> single{{0.7, 0.2, 5}};
    EXPECT_DOUBLE_EQ(aggregate(single).wdc, 0.7);
    EXPECT_THROW(aggregate(std::span<const SegScores>{}), ValidationError);
    const std::vector<SegScores> weightless{{0.7, 0.2, 0}};
    EXPECT_THROW(aggregate(weightless), ValidationError);
}
