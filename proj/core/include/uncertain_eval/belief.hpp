#pragma once

// Belief functions over a finite class frame: bba construction from
// classifier outputs, non-normalised conjunctive combination, conflict and
// pignistic decision.

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "uncertain_eval/model.hpp"

namespace ueval {

/// Subset of the frame as a bit set; bit i is class i.
using Subset = std::uint32_t;

class Frame {
public:
    static constexpr std::size_t kMaxClasses = 20;

    explicit Frame(std::size_t num_classes);

    std::size_t size() const noexcept { return n_; }
    Subset theta() const noexcept { return (Subset{1} << n_) - 1; }
    static constexpr Subset empty_set() noexcept { return 0; }
    static constexpr Subset singleton(ClassId c) noexcept { return Subset{1} << c; }
    Subset complement(Subset s) const noexcept { return theta() & ~s; }
    bool contains(Subset s) const noexcept { return (s & ~theta()) == 0; }

    friend bool operator==(const Frame&, const Frame&) = default;

private:
    std::size_t n_;
};

struct FocalElement {
    Subset set = 0;
    double mass = 0;
};

/// Basic belief assignment. Focal elements are kept sorted by subset with
/// positive masses summing to 1; mass on the empty set is allowed.
class MassFunction {
public:
    /// Validates: subsets inside the frame, masses finite and >= 0, sum 1 within 1e-9.
    MassFunction(Frame frame, std::vector<FocalElement> focal);

    static MassFunction vacuous(Frame frame);
    static MassFunction categorical(Frame frame, Subset set);

    const Frame& frame() const noexcept { return frame_; }
    std::span<const FocalElement> focal() const noexcept { return focal_; }
    double mass(Subset s) const noexcept;
    double total() const noexcept;

private:
    struct Trusted {};
    MassFunction(Trusted, Frame frame, std::vector<FocalElement> focal);
    friend MassFunction combine_pair(const MassFunction&, const MassFunction&);

    Frame frame_;
    std::vector<FocalElement> focal_;
};

/// Conjunctive combination of two bbas; m(empty) is kept, not renormalised away.
MassFunction combine_pair(const MassFunction& a, const MassFunction& b);
/// Left fold of combine_pair. Throws ValidationError on an empty list or mixed frames.
MassFunction combine(std::span<const MassFunction> ms);

/// m(empty).
double conflict(const MassFunction& m) noexcept;
/// Conflict of `m` combined with itself `k` times in total (k = 1 is m alone).
double auto_conflict(const MassFunction& m, std::size_t k);

/// BetP(C) = sum_{X contains C} m(X) / (|X| (1 - m(empty))).
/// Throws DomainError when m(empty) = 1.
std::vector<double> pignistic(const MassFunction& m);
/// argmax of pignistic(m); ties go to the smallest class id.
ClassId decide(const MassFunction& m);

/// Reliability and model parameters. Empty vectors mean the defaults:
/// alpha = 1 everywhere, nu = 1 for every class.
struct FusionConfig {
    std::vector<std::vector<double>> alpha;  // [source][class], in [0, 1]
    std::vector<double> nu;                  // [class], >= 0
    std::vector<double> normalization;       // R_j per source, > 0

    double alpha_for(std::size_t source, ClassId cls) const;
    double nu_for(ClassId cls) const;
    /// Throws ValidationError on out-of-range parameters.
    void validate(std::size_t num_sources, std::size_t num_classes) const;
};

/// R_j = 1 / max over tiles and classes of the source's likelihoods.
double normalization_from_scores(const TileScores& scores);

/// One bba per class i from source likelihoods p_i:
///   m({C_i}) = alpha_i R p_i / (1 + R p_i), m({C_i}^c) = alpha_i / (1 + R p_i), m(Theta) = 1 - alpha_i.
/// `alpha` holds one coefficient per class.
std::vector<MassFunction> appriou_bbas(std::span<const double> likelihoods, std::span<const double> alpha,
                                       double normalization);

struct PrototypeDistance {
    ClassId cls = 0;
    double distance = 0;
};

/// One bba per prototype: m({C_i}) = alpha_i exp(-nu_i d^2), m(Theta) = 1 - m({C_i}).
std::vector<MassFunction> denoeux_bbas(std::size_t num_classes, std::span<const PrototypeDistance> distances,
                                       std::span<const double> alpha, std::span<const double> nu);

enum class FusionModel { Appriou, Denoeux };

/// Combines the bbas of every source for one tile. For Appriou the values are
/// likelihoods p(q_j | C_i); for Denoeux they are distances to one prototype
/// per class.
MassFunction fuse_sources(FusionModel model, std::span<const std::vector<double>> per_source,
                          const FusionConfig& config);

/// Expert opinion on a tile: m({C_i}) = sum of pixel fraction x grade weight
/// over the tile's class-i pixels, the rest on Theta.
MassFunction expert_tile_bba(const TileComposition& comp, const CertaintyScale& scale, const Frame& frame);

}  // namespace ueval
