#pragma once

// Evaluation report and its JSON form. Top-level keys are "classification",
// "segmentation", "fusion", "per_expert" and "fused"; blocks that were not
// computed are null. Every number is written as a double rounded to 10
// significant digits, so identical inputs give byte-identical files.

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "uncertain_eval/classification.hpp"
#include "uncertain_eval/segmentation.hpp"

namespace ueval {

/// Rounds to 10 significant digits.
double report_number(double v);

struct RatesBlock {
    std::vector<double> gcr;
    std::vector<double> ecr;
    std::optional<double> mean_gcr;

    friend bool operator==(const RatesBlock&, const RatesBlock&) = default;
};

struct ClassificationBlock {
    double units = 0;
    std::vector<std::vector<double>> raw;
    std::vector<std::vector<double>> normalized;
    std::vector<double> row_totals;
    std::vector<bool> empty_rows;
    RatesBlock rates;
    RatesBlock homogeneous;
    RatesBlock inhomogeneous;

    friend bool operator==(const ClassificationBlock&, const ClassificationBlock&) = default;
};

struct SegmentationBlock {
    double wdc = 0;
    double fd = 0;
    double pixels = 0;

    friend bool operator==(const SegmentationBlock&, const SegmentationBlock&) = default;
};

struct ExpertBlock {
    double expert = 0;
    std::optional<ClassificationBlock> classification;
    std::optional<SegmentationBlock> segmentation;

    friend bool operator==(const ExpertBlock&, const ExpertBlock&) = default;
};

struct ImageFusion {
    std::string name;
    std::vector<double> decisions;  // per tile, -1 when unclassified
    double mean_conflict = 0;

    friend bool operator==(const ImageFusion&, const ImageFusion&) = default;
};

struct ConflictStats {
    double tiles = 0;
    double repeat = 0;
    double total_conflict = 0;
    std::vector<double> auto_conflict;  // per expert

    friend bool operator==(const ConflictStats&, const ConflictStats&) = default;
};

struct FusionBlock {
    std::string model;  // "appriou", "denoeux" or "experts"
    std::vector<ImageFusion> images;
    std::optional<double> mean_conflict;
    std::optional<ConflictStats> experts;

    friend bool operator==(const FusionBlock&, const FusionBlock&) = default;
};

struct Settings {
    bool use_certainty = true;
    std::vector<double> weights;
    double exponent_a = 0;

    friend bool operator==(const Settings&, const Settings&) = default;
};

struct FusedSummary {
    double experts = 0;
    double images = 0;
    std::optional<double> mean_gcr;
    std::optional<double> wdc;
    std::optional<double> fd;
    Settings settings;

    friend bool operator==(const FusedSummary&, const FusedSummary&) = default;
};

struct EvalReport {
    std::optional<ClassificationBlock> classification;
    std::optional<SegmentationBlock> segmentation;
    std::optional<FusionBlock> fusion;
    std::vector<ExpertBlock> per_expert;
    FusedSummary fused;

    friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

ClassificationBlock make_classification_block(const ConfusionAccumulator& all, const ConfusionAccumulator& homogeneous,
                                              const ConfusionAccumulator& inhomogeneous);
RatesBlock make_rates_block(const RateReport& r);

nlohmann::ordered_json to_json(const EvalReport& report);
/// Throws ValidationError when the document does not follow the schema.
EvalReport report_from_json(const nlohmann::json& doc);

/// Serialised report text (2-space indent, trailing newline).
std::string dump_report(const EvalReport& report);

}  // namespace ueval
