#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "uncertain_eval/model.hpp"

namespace ueval {

struct SynthParams {
    std::uint64_t seed = 0;
    std::size_t width = 64;
    std::size_t height = 64;
    std::size_t num_classes = 3;
    std::size_t tile = 16;
    double noise = 0.0;            // probability of flipping a tile's predicted class
    std::size_t num_grades = 3;
    std::size_t num_regions = 0;   // Voronoi sites; 0 picks 2 * num_classes
    std::size_t jitter = 2;        // max site displacement for experts after the first
};

struct SynthImage {
    PixelLabelMap labels;
    ReferenceBoundary boundary;
    TilePrediction prediction;
};

/// Voronoi class regions with one certainty grade per region; boundary pixels
/// are region frontiers (right/down neighbour of another class); predictions
/// are the tile-majority class flipped to another class with probability
/// `noise`. Deterministic in `params`.
SynthImage synth(const SynthParams& params);

/// Labels and boundary of expert `expert` (0 is the reference labelling
/// returned by synth()). Other experts see the same sites displaced by up to
/// `jitter` pixels and re-drawn grades.
std::pair<PixelLabelMap, ReferenceBoundary> synth_expert(const SynthParams& params, std::size_t expert);

/// Per-class likelihood scores of one classifier source. The tile-majority
/// class gets a boost of 0.6 (moved to a random other class with probability
/// `noise`) on top of uniform [0, 0.4) background values.
TileScores synth_scores(const SynthParams& params, const SynthImage& image, std::size_t source);

/// Distances to one prototype per class derived from likelihood scores:
/// d_c = 1.5 - p_c, which stays in (0.5, 1.5] so no bba is categorical.
TileScores synth_distances(const TileScores& likelihoods);

struct SynthDatasetParams {
    SynthParams image;
    std::size_t images = 1;
    std::size_t experts = 1;
    std::size_t sources = 0;
};

/// Writes label, boundary, prediction and score files plus manifest.json
/// into `dir`; returns the manifest path.
std::filesystem::path write_synth_dataset(const SynthDatasetParams& params, const std::filesystem::path& dir);

}  // namespace ueval
