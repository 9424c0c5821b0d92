#pragma once

// Text file formats.
//
// Label map:
//     LBL <width> <height> <nclasses> <ngrades>
//     <height lines of <width> space-separated tokens, "c:g" or "-">
//
// Boundary:
//     BND <width> <height> <ngrades>
//     <one "x y g" line per pixel>
//
// Predictions (CSV, header row mandatory):
//     tile_row,tile_col,class                      hard decisions
//     tile_row,tile_col,s_0,...,s_{N-1}            per-class scores
//
// Parse errors are ValidationError / BoundsError messages that name the
// source and line number.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>

#include "uncertain_eval/model.hpp"

namespace ueval {

PixelLabelMap read_label_map(std::istream& in, const std::string& source = "<stream>");
PixelLabelMap parse_label_map(const std::filesystem::path& path);
void write_label_map(std::ostream& out, const PixelLabelMap& map);
void save_label_map(const std::filesystem::path& path, const PixelLabelMap& map);

ReferenceBoundary read_boundary(std::istream& in, const std::string& source = "<stream>");
ReferenceBoundary parse_boundary(const std::filesystem::path& path);
void write_boundary(std::ostream& out, const ReferenceBoundary& boundary);
void save_boundary(const std::filesystem::path& path, const ReferenceBoundary& boundary);

using Predictions = std::variant<TilePrediction, TileScores>;

/// Mode (hard or scores) follows the header's column count. Tiles missing
/// from the file stay unclassified / unscored.
Predictions read_predictions(std::istream& in, std::size_t rows, std::size_t cols, std::size_t num_classes,
                             const std::string& source = "<stream>");
Predictions parse_predictions(const std::filesystem::path& path, std::size_t rows, std::size_t cols,
                              std::size_t num_classes);
/// Unclassified tiles are omitted.
void write_predictions(std::ostream& out, const TilePrediction& pred);
void save_predictions(const std::filesystem::path& path, const TilePrediction& pred);
void write_scores(std::ostream& out, const TileScores& scores);
void save_scores(const std::filesystem::path& path, const TileScores& scores);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace ueval
