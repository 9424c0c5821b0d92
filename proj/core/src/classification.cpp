#include "uncertain_eval/classification.hpp"

#include "uncertain_eval/error.hpp"

namespace ueval {

ConfusionAccumulator::ConfusionAccumulator(std::size_t num_classes)
    : n_(num_classes), cells_(num_classes * num_classes) {
    if (n_ < 2) throw ValidationError("confusion matrix needs at least two classes");
}

const Rational& ConfusionAccumulator::at(ClassId truth, ClassId predicted) const {
    if (truth >= n_ || predicted >= n_) throw BoundsError("confusion index out of range");
    return cells_[truth * n_ + predicted];
}

Rational ConfusionAccumulator::row_total(ClassId truth) const {
    Rational s = 0;
    for (ClassId j = 0; j < n_; ++j) s += at(truth, j);
    return s;
}

Rational ConfusionAccumulator::column_total(ClassId predicted) const {
    Rational s = 0;
    for (ClassId i = 0; i < n_; ++i) s += at(i, predicted);
    return s;
}

std::vector<double> ConfusionAccumulator::to_doubles() const {
    std::vector<double> out;
    out.reserve(cells_.size());
    for (const auto& c : cells_) out.push_back(to_double(c));
    return out;
}

void ConfusionAccumulator::add(ClassId truth, ClassId predicted, const Rational& amount) {
    if (truth >= n_ || predicted >= n_) throw ValidationError("confusion index out of range");
    if (amount < 0) throw ValidationError("confusion increments must be nonnegative");
    cells_[truth * n_ + predicted] += amount;
}

ConfusionAccumulator& ConfusionAccumulator::operator+=(const ConfusionAccumulator& other) {
    if (other.n_ != n_)
        throw ValidationError("cannot merge " + std::to_string(n_) + "-class and " + std::to_string(other.n_) +
                              "-class confusion matrices");
    for (std::size_t k = 0; k < cells_.size(); ++k) cells_[k] += other.cells_[k];
    units_ += other.units_;
    return *this;
}

ConfusionAccumulator accumulate_unit(ConfusionAccumulator acc, const TileComposition& comp, ClassId predicted,
                                     const CertaintyScale& scale, bool use_certainty) {
    if (predicted >= acc.num_classes())
        throw ValidationError("predicted class " + std::to_string(predicted) + " out of range");
    if (comp.empty()) return acc;
    if (comp.area == 0) throw ValidationError("tile composition has zero area");
    for (const auto& e : comp.entries) {
        const Rational& weight = scale.weight(e.grade);
        Rational share(static_cast<long long>(e.count), static_cast<long long>(comp.area));
        if (use_certainty) share *= weight;
        acc.add(e.class_id, predicted, share);
    }
    acc.count_units();
    return acc;
}

ConfusionAccumulator merge(std::span<const ConfusionAccumulator> accs) {
    if (accs.empty()) throw ValidationError("merge of an empty list");
    ConfusionAccumulator out(accs.front().num_classes());
    for (const auto& a : accs) out += a;
    return out;
}

NormalizedConfusion normalize(const ConfusionAccumulator& acc) {
    const std::size_t n = acc.num_classes();
    NormalizedConfusion out;
    out.num_classes = n;
    out.values.assign(n * n, 0.0);
    out.row_totals.assign(n, 0.0);
    out.empty_rows.assign(n, false);
    for (ClassId i = 0; i < n; ++i) {
        const Rational total = acc.row_total(i);
        out.row_totals[i] = to_double(total);
        if (total == 0) {
            out.empty_rows[i] = true;
            continue;
        }
        // Divide exactly before rounding so each row sums to 1 up to one ulp per entry.
        for (ClassId j = 0; j < n; ++j) out.values[i * n + j] = to_double(Rational(acc.at(i, j) / total));
    }
    return out;
}

RateReport rates(const NormalizedConfusion& ncm) {
    const std::size_t n = ncm.num_classes;
    RateReport out;
    out.gcr.assign(n, 0.0);
    out.ecr.assign(n, 0.0);
    out.empty_rows = ncm.empty_rows;
    double gcr_sum = 0;
    std::size_t with_data = 0;
    for (ClassId i = 0; i < n; ++i) {
        out.gcr[i] = ncm.at(i, i);
        double row_err = 0;
        double col_err = 0;
        for (ClassId j = 0; j < n; ++j) {
            if (j == i) continue;
            row_err += ncm.at(i, j);
            col_err += ncm.at(j, i);
        }
        out.ecr[i] = 0.5 * (row_err + col_err / static_cast<double>(n - 1));
        if (!ncm.empty_rows[i]) {
            gcr_sum += out.gcr[i];
            ++with_data;
        }
    }
    if (with_data > 0) out.mean_gcr = gcr_sum / static_cast<double>(with_data);
    return out;
}

namespace {

void check_alignment(std::span<const TileComposition> comps, const TilePrediction& predictions) {
    if (comps.size() != predictions.count())
        throw ValidationError("got " + std::to_string(comps.size()) + " tile compositions but " +
                              std::to_string(predictions.count()) + " predictions");
}

}  // namespace

ConfusionAccumulator accumulate_image(std::size_t num_classes, std::span<const TileComposition> comps,
                                      const TilePrediction& predictions, const CertaintyScale& scale,
                                      bool use_certainty) {
    check_alignment(comps, predictions);
    ConfusionAccumulator acc(num_classes);
    for (TileIndex t = 0; t < comps.size(); ++t) {
        const auto& p = predictions.at(t);
        if (!p || comps[t].empty()) continue;
        acc = accumulate_unit(std::move(acc), comps[t], *p, scale, use_certainty);
    }
    return acc;
}

SplitAccumulators accumulate_split(std::size_t num_classes, std::span<const TileComposition> comps,
                                   const TilePrediction& predictions, const CertaintyScale& scale,
                                   bool use_certainty) {
    check_alignment(comps, predictions);
    SplitAccumulators out{ConfusionAccumulator(num_classes), ConfusionAccumulator(num_classes)};
    for (TileIndex t = 0; t < comps.size(); ++t) {
        const auto& p = predictions.at(t);
        if (!p) continue;
        switch (homogeneity(comps[t])) {
        case Homogeneity::Homogeneous:
            out.homogeneous = accumulate_unit(std::move(out.homogeneous), comps[t], *p, scale, use_certainty);
            break;
        case Homogeneity::Inhomogeneous:
            out.inhomogeneous = accumulate_unit(std::move(out.inhomogeneous), comps[t], *p, scale, use_certainty);
            break;
        case Homogeneity::Empty:
            break;
        }
    }
    return out;
}

SplitRates split_rates(std::size_t num_classes, std::span<const TileComposition> comps,
                       const TilePrediction& predictions, const CertaintyScale& scale, bool use_certainty) {
    const auto split = accumulate_split(num_classes, comps, predictions, scale, use_certainty);
    return {rates(normalize(split.homogeneous)), rates(normalize(split.inhomogeneous))};
}

}  // namespace ueval
