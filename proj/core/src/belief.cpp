#include "uncertain_eval/belief.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <string>

#include "uncertain_eval/error.hpp"

namespace ueval {

namespace {

constexpr double kSumTolerance = 1e-9;
constexpr double kPruneBelow = 1e-15;
constexpr std::size_t kDenseMaxClasses = 12;

void sort_and_merge(std::vector<FocalElement>& focal) {
    std::sort(focal.begin(), focal.end(), [](const FocalElement& a, const FocalElement& b) { return a.set < b.set; });
    std::vector<FocalElement> merged;
    merged.reserve(focal.size());
    for (const auto& f : focal) {
        if (!merged.empty() && merged.back().set == f.set) merged.back().mass += f.mass;
        else merged.push_back(f);
    }
    std::erase_if(merged, [](const FocalElement& f) { return f.mass == 0; });
    focal = std::move(merged);
}

}  // namespace

Frame::Frame(std::size_t num_classes) : n_(num_classes) {
    if (n_ < 2 || n_ > kMaxClasses)
        throw ValidationError("frame size " + std::to_string(n_) + " outside [2, " + std::to_string(kMaxClasses) + "]");
}

MassFunction::MassFunction(Frame frame, std::vector<FocalElement> focal) : frame_(frame), focal_(std::move(focal)) {
    double sum = 0;
    for (const auto& f : focal_) {
        if (!frame_.contains(f.set)) throw ValidationError("focal element outside the frame");
        if (!std::isfinite(f.mass) || f.mass < 0) throw ValidationError("masses must be finite and nonnegative");
        sum += f.mass;
    }
    if (std::abs(sum - 1.0) > kSumTolerance)
        throw ValidationError("masses sum to " + std::to_string(sum) + ", expected 1");
    sort_and_merge(focal_);
}

MassFunction::MassFunction(Trusted, Frame frame, std::vector<FocalElement> focal)
    : frame_(frame), focal_(std::move(focal)) {}

MassFunction MassFunction::vacuous(Frame frame) { return MassFunction(frame, {{frame.theta(), 1.0}}); }

MassFunction MassFunction::categorical(Frame frame, Subset set) { return MassFunction(frame, {{set, 1.0}}); }

double MassFunction::mass(Subset s) const noexcept {
    auto it = std::lower_bound(focal_.begin(), focal_.end(), s,
                               [](const FocalElement& f, Subset v) { return f.set < v; });
    return it != focal_.end() && it->set == s ? it->mass : 0.0;
}

double MassFunction::total() const noexcept {
    double s = 0;
    for (const auto& f : focal_) s += f.mass;
    return s;
}

MassFunction combine_pair(const MassFunction& a, const MassFunction& b) {
    if (!(a.frame() == b.frame())) throw ValidationError("cannot combine bbas on different frames");
    const Frame frame = a.frame();
    std::vector<FocalElement> out;
    const std::size_t cells = std::size_t{1} << frame.size();
    if (frame.size() <= kDenseMaxClasses && a.focal().size() * b.focal().size() * 8 >= cells) {
        std::vector<double> dense(cells, 0.0);
        for (const auto& x : a.focal())
            for (const auto& y : b.focal()) dense[x.set & y.set] += x.mass * y.mass;
        for (Subset s = 0; s < dense.size(); ++s)
            if (dense[s] != 0) out.push_back({s, dense[s]});
    } else {
        std::map<Subset, double> sparse;
        for (const auto& x : a.focal())
            for (const auto& y : b.focal()) sparse[x.set & y.set] += x.mass * y.mass;
        for (const auto& [s, m] : sparse) out.push_back({s, m});
    }
    std::erase_if(out, [](const FocalElement& f) { return f.mass < kPruneBelow; });
    double sum = 0;
    for (const auto& f : out) sum += f.mass;
    for (auto& f : out) f.mass /= sum;
    return MassFunction(MassFunction::Trusted{}, frame, std::move(out));
}

MassFunction combine(std::span<const MassFunction> ms) {
    if (ms.empty()) throw ValidationError("combine of an empty list");
    MassFunction acc = ms.front();
    for (std::size_t i = 1; i < ms.size(); ++i) acc = combine_pair(acc, ms[i]);
    return acc;
}

double conflict(const MassFunction& m) noexcept { return m.mass(Frame::empty_set()); }

double auto_conflict(const MassFunction& m, std::size_t k) {
    if (k == 0) throw ValidationError("auto-conflict needs at least one copy");
    MassFunction acc = m;
    for (std::size_t i = 1; i < k; ++i) acc = combine_pair(acc, m);
    return conflict(acc);
}

std::vector<double> pignistic(const MassFunction& m) {
    const double empty = conflict(m);
    if (empty >= 1.0 - 1e-15) throw DomainError("pignistic probability undefined under total conflict");
    std::vector<double> bet(m.frame().size(), 0.0);
    for (const auto& f : m.focal()) {
        if (f.set == Frame::empty_set()) continue;
        const double share = f.mass / static_cast<double>(std::popcount(f.set));
        for (Subset rest = f.set; rest != 0; rest &= rest - 1) bet[static_cast<std::size_t>(std::countr_zero(rest))] += share;
    }
    for (double& b : bet) b /= (1.0 - empty);
    return bet;
}

ClassId decide(const MassFunction& m) {
    const auto bet = pignistic(m);
    return static_cast<ClassId>(std::max_element(bet.begin(), bet.end()) - bet.begin());
}

// ------------------------------------------------------------ construction

double FusionConfig::alpha_for(std::size_t source, ClassId cls) const {
    if (alpha.empty()) return 1.0;
    return alpha.at(source).at(cls);
}

double FusionConfig::nu_for(ClassId cls) const {
    if (nu.empty()) return 1.0;
    return nu.at(cls);
}

void FusionConfig::validate(std::size_t num_sources, std::size_t num_classes) const {
    if (!alpha.empty()) {
        if (alpha.size() != num_sources) throw ValidationError("alpha needs one row per source");
        for (const auto& row : alpha) {
            if (row.size() != num_classes) throw ValidationError("alpha needs one value per class");
            for (double v : row)
                if (!(v >= 0 && v <= 1)) throw ValidationError("alpha values must lie in [0, 1]");
        }
    }
    if (!nu.empty()) {
        if (nu.size() != num_classes) throw ValidationError("nu needs one value per class");
        for (double v : nu)
            if (!(v >= 0) || !std::isfinite(v)) throw ValidationError("nu values must be finite and >= 0");
    }
    if (!normalization.empty()) {
        if (normalization.size() != num_sources) throw ValidationError("normalization needs one value per source");
        for (double v : normalization)
            if (!(v > 0) || !std::isfinite(v)) throw ValidationError("normalization R must be positive");
    }
}

double normalization_from_scores(const TileScores& scores) {
    const double peak = scores.max_value();
    if (!(peak > 0)) throw ValidationError("source has no positive likelihood; R is undefined");
    return 1.0 / peak;
}

std::vector<MassFunction> appriou_bbas(std::span<const double> likelihoods, std::span<const double> alpha,
                                       double normalization) {
    if (!(normalization > 0) || !std::isfinite(normalization))
        throw ValidationError("normalization R must be positive");
    if (alpha.size() != likelihoods.size()) throw ValidationError("alpha needs one value per class");
    const Frame frame(likelihoods.size());
    std::vector<MassFunction> out;
    out.reserve(likelihoods.size());
    for (ClassId i = 0; i < likelihoods.size(); ++i) {
        const double p = likelihoods[i];
        const double a = alpha[i];
        if (!std::isfinite(p) || p < 0) throw ValidationError("likelihoods must be finite and nonnegative");
        if (!(a >= 0 && a <= 1)) throw ValidationError("alpha values must lie in [0, 1]");
        const double rp = normalization * p;
        const Subset single = Frame::singleton(i);
        out.emplace_back(frame, std::vector<FocalElement>{{single, a * rp / (1 + rp)},
                                                          {frame.complement(single), a / (1 + rp)},
                                                          {frame.theta(), 1 - a}});
    }
    return out;
}

std::vector<MassFunction> denoeux_bbas(std::size_t num_classes, std::span<const PrototypeDistance> distances,
                                       std::span<const double> alpha, std::span<const double> nu) {
    const Frame frame(num_classes);
    if (alpha.size() != num_classes || nu.size() != num_classes)
        throw ValidationError("alpha and nu need one value per class");
    std::vector<MassFunction> out;
    out.reserve(distances.size());
    for (const auto& proto : distances) {
        if (proto.cls >= num_classes) throw ValidationError("prototype class out of range");
        if (!std::isfinite(proto.distance) || proto.distance < 0)
            throw ValidationError("distances must be finite and nonnegative");
        const double a = alpha[proto.cls];
        const double v = nu[proto.cls];
        if (!(a >= 0 && a <= 1)) throw ValidationError("alpha values must lie in [0, 1]");
        if (!(v >= 0)) throw ValidationError("nu values must be >= 0");
        const double support = a * std::exp(-v * proto.distance * proto.distance);
        out.emplace_back(frame, std::vector<FocalElement>{{Frame::singleton(proto.cls), support},
                                                          {frame.theta(), 1 - support}});
    }
    return out;
}

MassFunction fuse_sources(FusionModel model, std::span<const std::vector<double>> per_source,
                          const FusionConfig& config) {
    if (per_source.empty()) throw ValidationError("fusion needs at least one source");
    const std::size_t n = per_source.front().size();
    config.validate(per_source.size(), n);
    std::vector<MassFunction> bbas;
    for (std::size_t j = 0; j < per_source.size(); ++j) {
        const auto& values = per_source[j];
        if (values.size() != n) throw ValidationError("sources disagree on the number of classes");
        std::vector<double> alpha(n);
        for (ClassId i = 0; i < n; ++i) alpha[i] = config.alpha_for(j, i);
        std::vector<MassFunction> part;
        if (model == FusionModel::Appriou) {
            if (config.normalization.empty()) throw ValidationError("Appriou fusion needs R per source");
            part = appriou_bbas(values, alpha, config.normalization[j]);
        } else {
            std::vector<double> nu(n);
            std::vector<PrototypeDistance> protos(n);
            for (ClassId i = 0; i < n; ++i) {
                nu[i] = config.nu_for(i);
                protos[i] = {i, values[i]};
            }
            part = denoeux_bbas(n, protos, alpha, nu);
        }
        bbas.insert(bbas.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    return combine(bbas);
}

MassFunction expert_tile_bba(const TileComposition& comp, const CertaintyScale& scale, const Frame& frame) {
    if (comp.empty()) throw ValidationError("expert bba of an empty tile");
    if (comp.area == 0) throw ValidationError("tile composition has zero area");
    std::vector<double> support(frame.size(), 0.0);
    for (const auto& e : comp.entries) {
        if (e.class_id >= frame.size()) throw ValidationError("class id outside the frame");
        support[e.class_id] +=
            static_cast<double>(e.count) / static_cast<double>(comp.area) * scale.weight_value(e.grade);
    }
    std::vector<FocalElement> focal;
    double assigned = 0;
    for (ClassId i = 0; i < frame.size(); ++i) {
        if (support[i] > 0) focal.push_back({Frame::singleton(i), support[i]});
        assigned += support[i];
    }
    focal.push_back({frame.theta(), std::max(0.0, 1.0 - assigned)});
    return MassFunction(frame, std::move(focal));
}

}  // namespace ueval
