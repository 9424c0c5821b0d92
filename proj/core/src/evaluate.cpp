#include "uncertain_eval/evaluate.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <mutex>
#include <thread>

#include "uncertain_eval/error.hpp"

namespace ueval {

namespace {

// Runs fn(i) for i in [0, jobs) on `threads` workers. Results are written by
// index, so output order never depends on scheduling. The first exception is
// rethrown after all workers finish.
template <class Fn>
void parallel_for(std::size_t jobs, std::size_t threads, Fn&& fn) {
    threads = resolve_threads(threads, jobs);
    if (threads <= 1) {
        for (std::size_t i = 0; i < jobs; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t w = 0; w < threads; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < jobs; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!error) error = std::current_exception();
                    }
                }
            });
        }
    }
    if (error) std::rethrow_exception(error);
}

struct ExpertImageResult {
    std::optional<SplitAccumulators> classification;
    std::optional<SegScores> segmentation;
};

}  // namespace

std::size_t resolve_threads(std::size_t requested, std::size_t jobs) {
    std::size_t n = requested;
    if (n == 0) {
        n = std::max<std::size_t>(1, std::thread::hardware_concurrency());
        if (const char* cap = std::getenv("UNCERTAIN_EVAL_THREADS")) {
            std::size_t v = 0;
            const auto [ptr, ec] = std::from_chars(cap, cap + std::strlen(cap), v);
            if (ec == std::errc{} && v > 0) n = std::min(n, v);
        }
    }
    return std::max<std::size_t>(1, std::min(n, jobs));
}

void check_scale(const Dataset& ds, const CertaintyScale& scale) {
    if (scale.size() < ds.num_grades)
        throw ValidationError("certainty scale has " + std::to_string(scale.size()) + " grades but the data uses " +
                              std::to_string(ds.num_grades));
}

EvalReport evaluate_dataset(const Dataset& ds, const EvalOptions& options, std::span<const TilePrediction> predictions) {
    check_scale(ds, options.scale);
    if (!(options.exponent_a > 0)) throw ValidationError("exponent a must be positive");
    if (!predictions.empty() && predictions.size() != ds.images.size())
        throw ValidationError("need one prediction per image");
    const std::size_t n = ds.classes.size();
    const CertaintyScale seg_scale = options.use_certainty ? options.scale : CertaintyScale::uniform(options.scale.size());

    auto prediction_for = [&](std::size_t i) -> const TilePrediction& {
        if (!predictions.empty()) return predictions[i];
        const auto& img = ds.images[i];
        if (!img.prediction) throw ValidationError("image '" + img.name + "' has no prediction file");
        return *img.prediction;
    };
    for (std::size_t i = 0; i < ds.images.size(); ++i) {
        const auto& p = prediction_for(i);
        if (p.rows() != ds.images[i].spec.rows() || p.cols() != ds.images[i].spec.cols())
            throw ValidationError("image '" + ds.images[i].name + "': prediction grid does not match tiling");
    }

    std::vector<std::vector<ExpertImageResult>> results(ds.images.size());
    parallel_for(ds.images.size(), options.threads, [&](std::size_t i) {
        const auto& img = ds.images[i];
        const auto& pred = prediction_for(i);
        std::optional<FoundBoundary> found;
        results[i].resize(img.experts.size());
        for (std::size_t k = 0; k < img.experts.size(); ++k) {
            const auto& expert = img.experts[k];
            if (options.classification) {
                const auto comps = compose_tiles(expert.labels, img.spec);
                results[i][k].classification = accumulate_split(n, comps, pred, options.scale, options.use_certainty);
            }
            if (options.segmentation && expert.boundary) {
                if (!found) found = boundary_from_tiles(pred, img.spec);
                results[i][k].segmentation =
                    evaluate_segmentation(*found, *expert.boundary, seg_scale, options.exponent_a);
            }
        }
    });

    EvalReport report;
    const std::size_t experts = ds.num_experts();
    ConfusionAccumulator all_h(n), all_i(n);
    std::vector<SegScores> all_seg;
    for (std::size_t k = 0; k < experts; ++k) {
        ExpertBlock block;
        block.expert = static_cast<double>(k);
        ConfusionAccumulator h(n), inh(n);
        std::vector<SegScores> seg;
        bool any_class = false;
        for (std::size_t i = 0; i < ds.images.size(); ++i) {
            if (k >= results[i].size()) continue;
            const auto& r = results[i][k];
            if (r.classification) {
                h += r.classification->homogeneous;
                inh += r.classification->inhomogeneous;
                any_class = true;
            }
            if (r.segmentation) seg.push_back(*r.segmentation);
        }
        if (any_class) {
            ConfusionAccumulator all = h;
            all += inh;
            block.classification = make_classification_block(all, h, inh);
            all_h += h;
            all_i += inh;
        }
        if (!seg.empty()) {
            const auto agg = aggregate(seg);
            double pixels = 0;
            for (const auto& s : seg) pixels += static_cast<double>(s.pixel_count);
            block.segmentation = SegmentationBlock{agg.wdc, agg.fd, pixels};
            all_seg.insert(all_seg.end(), seg.begin(), seg.end());
        }
        report.per_expert.push_back(std::move(block));
    }

    if (options.classification && experts > 0) {
        ConfusionAccumulator all = all_h;
        all += all_i;
        report.classification = make_classification_block(all, all_h, all_i);
        report.fused.mean_gcr = report.classification->rates.mean_gcr;
    }
    if (options.segmentation && !all_seg.empty()) {
        const auto agg = aggregate(all_seg);
        double pixels = 0;
        for (const auto& s : all_seg) pixels += static_cast<double>(s.pixel_count);
        report.segmentation = SegmentationBlock{agg.wdc, agg.fd, pixels};
        report.fused.wdc = agg.wdc;
        report.fused.fd = agg.fd;
    }
    report.fused.experts = static_cast<double>(experts);
    report.fused.images = static_cast<double>(ds.images.size());
    report.fused.settings.use_certainty = options.use_certainty;
    for (GradeId g = 0; g < options.scale.size(); ++g) report.fused.settings.weights.push_back(options.scale.weight_value(g));
    report.fused.settings.exponent_a = options.exponent_a;
    return report;
}

FusionOutcome fuse_dataset(const Dataset& ds, FusionModel model, std::size_t threads) {
    const bool appriou = model == FusionModel::Appriou;
    const auto& first = appriou ? ds.images.front().scores : ds.images.front().distances;
    const std::size_t sources = first.size();
    if (sources == 0)
        throw ValidationError(std::string("fusion needs ") + (appriou ? "'scores'" : "'distances'") +
                              " files for every image");
    for (const auto& img : ds.images)
        if ((appriou ? img.scores : img.distances).size() != sources)
            throw ValidationError("image '" + img.name + "' has a different number of sources");

    FusionConfig config = ds.fusion;
    if (appriou) {
        config.normalization.assign(sources, 0.0);
        for (std::size_t j = 0; j < sources; ++j) {
            double peak = 0;
            for (const auto& img : ds.images) peak = std::max(peak, img.scores[j].max_value());
            if (!(peak > 0)) throw ValidationError("source " + std::to_string(j) + " has no positive likelihood");
            config.normalization[j] = 1.0 / peak;
        }
    }
    config.validate(sources, ds.classes.size());

    FusionOutcome out;
    out.block.model = appriou ? "appriou" : "denoeux";
    out.block.images.resize(ds.images.size());
    std::vector<std::optional<TilePrediction>> preds(ds.images.size());
    std::vector<std::pair<double, std::size_t>> conflict_sums(ds.images.size());

    parallel_for(ds.images.size(), threads, [&](std::size_t i) {
        const auto& img = ds.images[i];
        const auto& inputs = appriou ? img.scores : img.distances;
        TilePrediction pred(img.spec.rows(), img.spec.cols(), ds.classes.size());
        auto& summary = out.block.images[i];
        summary.name = img.name;
        summary.decisions.assign(img.spec.count(), -1.0);
        double sum = 0;
        std::size_t fused_tiles = 0;
        std::vector<std::vector<double>> per_source(sources);
        for (TileIndex t = 0; t < img.spec.count(); ++t) {
            bool complete = true;
            for (std::size_t j = 0; j < sources && complete; ++j) {
                const auto& s = inputs[j].at(t);
                if (!s) complete = false;
                else per_source[j] = *s;
            }
            if (!complete) continue;
            const auto m = fuse_sources(model, per_source, config);
            const double c = conflict(m);
            sum += c;
            ++fused_tiles;
            if (c >= 1.0 - 1e-15) continue;
            const ClassId d = decide(m);
            pred.set(t, d);
            summary.decisions[t] = static_cast<double>(d);
        }
        summary.mean_conflict = fused_tiles ? sum / static_cast<double>(fused_tiles) : 0.0;
        conflict_sums[i] = {sum, fused_tiles};
        preds[i] = std::move(pred);
    });

    double total = 0;
    std::size_t tiles = 0;
    for (const auto& [s, k] : conflict_sums) {
        total += s;
        tiles += k;
    }
    if (tiles) out.block.mean_conflict = total / static_cast<double>(tiles);
    for (auto& p : preds) out.predictions.push_back(std::move(*p));
    return out;
}

ConflictStats expert_conflict(const Dataset& ds, const CertaintyScale& scale, std::size_t repeat) {
    check_scale(ds, scale);
    if (repeat == 0) throw ValidationError("auto-conflict repeat count must be at least 1");
    const std::size_t experts = ds.num_experts();
    if (experts == 0) throw ValidationError("conflict needs at least one expert");
    const Frame frame(ds.classes.size());

    ConflictStats stats;
    stats.repeat = static_cast<double>(repeat);
    std::vector<double> auto_sum(experts, 0.0);
    std::vector<std::size_t> auto_tiles(experts, 0);
    double total = 0;
    std::size_t shared_tiles = 0;
    for (const auto& img : ds.images) {
        std::vector<std::vector<TileComposition>> comps;
        for (const auto& e : img.experts) comps.push_back(compose_tiles(e.labels, img.spec));
        for (TileIndex t = 0; t < img.spec.count(); ++t) {
            std::vector<MassFunction> tile_bbas;
            for (std::size_t k = 0; k < comps.size(); ++k) {
                if (comps[k][t].empty()) continue;
                auto m = expert_tile_bba(comps[k][t], scale, frame);
                auto_sum[k] += auto_conflict(m, repeat);
                ++auto_tiles[k];
                tile_bbas.push_back(std::move(m));
            }
            if (tile_bbas.size() == comps.size() && comps.size() == experts) {
                total += conflict(combine(tile_bbas));
                ++shared_tiles;
            }
        }
    }
    stats.tiles = static_cast<double>(shared_tiles);
    stats.total_conflict = shared_tiles ? total / static_cast<double>(shared_tiles) : 0.0;
    for (std::size_t k = 0; k < experts; ++k)
        stats.auto_conflict.push_back(auto_tiles[k] ? auto_sum[k] / static_cast<double>(auto_tiles[k]) : 0.0);
    return stats;
}

}  // namespace ueval
