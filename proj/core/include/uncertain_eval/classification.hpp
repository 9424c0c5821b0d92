#pragma once

// Certainty-weighted confusion matrices built from tile compositions.
//
// Rows are true classes, columns predicted classes. A tile predicted as class
// j adds, for every (class i, grade g, count) in its composition,
//
//     cm(i, j) += count / tile_area * W_g        (W_g = 1 without certainty)
//
// Entries are exact rationals; normalisation and rates are computed in double.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "uncertain_eval/model.hpp"
#include "uncertain_eval/rational.hpp"

namespace ueval {

class ConfusionAccumulator {
public:
    explicit ConfusionAccumulator(std::size_t num_classes);

    std::size_t num_classes() const noexcept { return n_; }
    /// Number of non-empty units accumulated (summed on merge).
    std::size_t units_seen() const noexcept { return units_; }

    const Rational& at(ClassId truth, ClassId predicted) const;
    /// Raw row total N_i.
    Rational row_total(ClassId truth) const;
    Rational column_total(ClassId predicted) const;
    std::vector<double> to_doubles() const;

    /// Adds `amount` to cm(truth, predicted).
    void add(ClassId truth, ClassId predicted, const Rational& amount);
    void count_units(std::size_t units = 1) noexcept { units_ += units; }

    ConfusionAccumulator& operator+=(const ConfusionAccumulator& other);
    friend bool operator==(const ConfusionAccumulator&, const ConfusionAccumulator&) = default;

private:
    std::size_t n_;
    std::size_t units_ = 0;
    std::vector<Rational> cells_;
};

/// Folds one classified unit into `acc`. An empty composition is a no-op.
/// Throws ValidationError when `predicted` or a grade id is out of range.
ConfusionAccumulator accumulate_unit(ConfusionAccumulator acc, const TileComposition& comp,
                                     ClassId predicted, const CertaintyScale& scale, bool use_certainty);

/// Entrywise sum. Throws ValidationError on an empty list or mismatched sizes.
ConfusionAccumulator merge(std::span<const ConfusionAccumulator> accs);

struct NormalizedConfusion {
    std::size_t num_classes = 0;
    std::vector<double> values;      // row-major N x N
    std::vector<double> row_totals;  // N_i
    std::vector<bool> empty_rows;    // N_i == 0

    double at(ClassId i, ClassId j) const { return values[i * num_classes + j]; }
};

NormalizedConfusion normalize(const ConfusionAccumulator& acc);

struct RateReport {
    std::vector<double> gcr;
    std::vector<double> ecr;
    /// Mean GCR over classes with data; nullopt when no row has data.
    std::optional<double> mean_gcr;
    std::vector<bool> empty_rows;

    bool empty() const noexcept { return !mean_gcr.has_value(); }
};

/// GCR_i = Ncm_ii.
/// ECR_i = 1/2 (sum_{j != i} Ncm_ij + sum_{j != i} Ncm_ji / (N - 1)).
RateReport rates(const NormalizedConfusion& ncm);

/// Accumulates every (composition, prediction) pair of one image. Tiles with
/// no prediction or an empty composition are skipped.
ConfusionAccumulator accumulate_image(std::size_t num_classes, std::span<const TileComposition> comps,
                                      const TilePrediction& predictions, const CertaintyScale& scale,
                                      bool use_certainty);

struct SplitAccumulators {
    ConfusionAccumulator homogeneous;
    ConfusionAccumulator inhomogeneous;
};

/// Same as accumulate_image but routed by homogeneity().
SplitAccumulators accumulate_split(std::size_t num_classes, std::span<const TileComposition> comps,
                                   const TilePrediction& predictions, const CertaintyScale& scale,
                                   bool use_certainty);

struct SplitRates {
    RateReport homogeneous;
    RateReport inhomogeneous;
};

SplitRates split_rates(std::size_t num_classes, std::span<const TileComposition> comps,
                       const TilePrediction& predictions, const CertaintyScale& scale, bool use_certainty = true);

}  // namespace ueval
