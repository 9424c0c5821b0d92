#pragma once

// Dataset-level pipelines: classification and segmentation evaluation over
// every image and expert, classifier fusion, and inter-expert conflict.
//
// Multi-expert results follow two rules: raw confusion matrices are summed
// before normalisation, and boundary scores are averaged with image pixel
// counts as weights.

#include <cstddef>
#include <span>
#include <vector>

#include "uncertain_eval/belief.hpp"
#include "uncertain_eval/dataset.hpp"
#include "uncertain_eval/report.hpp"
#include "uncertain_eval/segmentation.hpp"

namespace ueval {

struct EvalOptions {
    CertaintyScale scale = CertaintyScale::default_scale();
    bool use_certainty = true;  // false: every grade weighs 1, in both metric families
    double exponent_a = kDefaultExponent;
    bool classification = true;
    bool segmentation = true;
    std::size_t threads = 0;  // 0: UNCERTAIN_EVAL_THREADS or hardware concurrency
};

/// Worker count: `requested` if nonzero, else the UNCERTAIN_EVAL_THREADS
/// cap applied to the hardware concurrency; never more than `jobs`.
std::size_t resolve_threads(std::size_t requested, std::size_t jobs);

/// Throws ValidationError when the scale has fewer grades than the files use.
void check_scale(const Dataset& ds, const CertaintyScale& scale);

/// Evaluates `predictions` (one per image) or, when empty, each image's own
/// prediction file. Fills classification, segmentation, per_expert and fused.
EvalReport evaluate_dataset(const Dataset& ds, const EvalOptions& options,
                            std::span<const TilePrediction> predictions = {});

struct FusionOutcome {
    FusionBlock block;
    std::vector<TilePrediction> predictions;
};

/// Fuses every image's sources tile by tile and decides by maximum pignistic
/// probability. Appriou reads the "scores" files, Denoeux the "distances"
/// files. Tiles some source did not score, or with total conflict, stay
/// unclassified.
FusionOutcome fuse_dataset(const Dataset& ds, FusionModel model, std::size_t threads = 0);

/// Conflict between experts on tiles every expert labelled, and each expert's
/// auto-conflict with `repeat` copies of itself, both averaged over tiles.
ConflictStats expert_conflict(const Dataset& ds, const CertaintyScale& scale, std::size_t repeat = 3);

}  // namespace ueval
