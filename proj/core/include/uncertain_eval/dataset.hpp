#pragma once

// Dataset manifest (JSON) and the loaded, validated dataset it describes.
//
// {
//   "classes": ["rock", "sand", ...],             optional if "num_classes" given
//   "num_classes": 3,                              optional if "classes" given
//   "grades": [{"name": "sure", "weight": "2/3"}, ...],   optional
//   "tile_size": 32,
//   "fusion": {"alpha": [[...], ...], "nu": [...]},       optional
//   "images": [{
//       "name": "img0", "width": 64, "height": 64, "tile_size": 32 (optional),
//       "experts": [{"labels": "e0.lbl", "boundary": "e0.bnd"}, ...],
//       "prediction": "pred.csv",                  optional
//       "scores": ["s0.csv", ...],                 optional, likelihoods per source
//       "distances": ["d0.csv", ...]               optional, prototype distances per source
//   }]
// }
//
// Relative paths resolve against the manifest's directory.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "uncertain_eval/belief.hpp"
#include "uncertain_eval/model.hpp"

namespace ueval {

struct ExpertFiles {
    std::filesystem::path labels;
    std::optional<std::filesystem::path> boundary;
};

struct ImageEntry {
    std::string name;
    std::size_t width = 0;
    std::size_t height = 0;
    std::size_t tile_size = 0;
    std::vector<ExpertFiles> experts;
    std::optional<std::filesystem::path> prediction;
    std::vector<std::filesystem::path> scores;
    std::vector<std::filesystem::path> distances;
};

struct DatasetManifest {
    std::vector<std::string> classes;
    std::optional<CertaintyScale> grades;
    std::vector<ImageEntry> images;
    FusionConfig fusion;
};

/// Parses and validates a manifest; every referenced file must exist.
DatasetManifest read_manifest(const std::filesystem::path& path);

struct ExpertData {
    PixelLabelMap labels;
    std::optional<ReferenceBoundary> boundary;
};

struct LoadedImage {
    std::string name;
    TileSpec spec;
    std::vector<ExpertData> experts;
    std::optional<TilePrediction> prediction;
    std::vector<TileScores> scores;
    std::vector<TileScores> distances;
};

struct Dataset {
    ClassSet classes;
    std::optional<CertaintyScale> grades;
    std::size_t num_grades = 0;  // largest grade count declared by any file
    FusionConfig fusion;
    std::vector<LoadedImage> images;

    std::size_t num_experts() const;
};

/// Reads every file named by the manifest and checks dimensions, class and
/// grade counts for consistency.
Dataset load_dataset(const DatasetManifest& manifest);
Dataset load_dataset(const std::filesystem::path& manifest_path);

}  // namespace ueval
