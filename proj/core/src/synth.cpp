#include "uncertain_eval/synth.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <random>

#include <nlohmann/json.hpp>

#include "uncertain_eval/error.hpp"
#include "uncertain_eval/formats.hpp"

namespace ueval {

namespace {

// Independent generator per (seed, stream, index).
std::mt19937_64 stream_rng(std::uint64_t seed, std::uint32_t stream, std::uint64_t index = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream,
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

struct Site {
    std::int64_t x, y;
    ClassId cls;
    GradeId grade;
};

void check(const SynthParams& p) {
    if (p.width == 0 || p.height == 0) throw ValidationError("synthetic image needs positive width and height");
    if (p.num_classes < 2) throw ValidationError("synthetic image needs at least two classes");
    if (p.tile == 0) throw ValidationError("tile side must be at least 1");
    if (p.num_grades == 0) throw ValidationError("synthetic image needs at least one grade");
    if (!(p.noise >= 0 && p.noise <= 1)) throw ValidationError("noise must lie in [0, 1]");
}

std::vector<Site> base_sites(const SynthParams& p) {
    auto rng = stream_rng(p.seed, 0);
    const std::size_t n = p.num_regions ? p.num_regions : 2 * p.num_classes;
    std::uniform_int_distribution<std::int64_t> ux(0, static_cast<std::int64_t>(p.width) - 1);
    std::uniform_int_distribution<std::int64_t> uy(0, static_cast<std::int64_t>(p.height) - 1);
    std::uniform_int_distribution<GradeId> ug(0, static_cast<GradeId>(p.num_grades - 1));
    std::vector<Site> sites(n);
    for (std::size_t i = 0; i < n; ++i) {
        sites[i].x = ux(rng);
        sites[i].y = uy(rng);
        sites[i].cls = static_cast<ClassId>(i % p.num_classes);
        sites[i].grade = ug(rng);
    }
    return sites;
}

std::vector<Site> expert_sites(const SynthParams& p, std::size_t expert) {
    auto sites = base_sites(p);
    if (expert == 0) return sites;
    auto rng = stream_rng(p.seed, 1, expert);
    const auto j = static_cast<std::int64_t>(p.jitter);
    std::uniform_int_distribution<std::int64_t> ud(-j, j);
    std::uniform_int_distribution<GradeId> ug(0, static_cast<GradeId>(p.num_grades - 1));
    for (auto& s : sites) {
        s.x = std::clamp<std::int64_t>(s.x + ud(rng), 0, static_cast<std::int64_t>(p.width) - 1);
        s.y = std::clamp<std::int64_t>(s.y + ud(rng), 0, static_cast<std::int64_t>(p.height) - 1);
        s.grade = ug(rng);
    }
    return sites;
}

std::pair<PixelLabelMap, ReferenceBoundary> render(const SynthParams& p, const std::vector<Site>& sites) {
    PixelLabelMap map(p.width, p.height, p.num_classes, p.num_grades);
    for (std::size_t y = 0; y < p.height; ++y) {
        for (std::size_t x = 0; x < p.width; ++x) {
            std::size_t best = 0;
            std::int64_t best_d2 = std::numeric_limits<std::int64_t>::max();
            for (std::size_t i = 0; i < sites.size(); ++i) {
                const std::int64_t dx = sites[i].x - static_cast<std::int64_t>(x);
                const std::int64_t dy = sites[i].y - static_cast<std::int64_t>(y);
                const std::int64_t d2 = dx * dx + dy * dy;
                if (d2 < best_d2) {
                    best = i;
                    best_d2 = d2;
                }
            }
            map.set(x, y, PixelLabel{sites[best].cls, sites[best].grade});
        }
    }
    std::vector<BoundaryPixel> frontier;
    for (std::size_t y = 0; y < p.height; ++y) {
        for (std::size_t x = 0; x < p.width; ++x) {
            const auto& here = *map.at(x, y);
            const bool right = x + 1 < p.width && map.at(x + 1, y)->class_id != here.class_id;
            const bool down = y + 1 < p.height && map.at(x, y + 1)->class_id != here.class_id;
            if (right || down)
                frontier.push_back({{static_cast<std::int64_t>(x), static_cast<std::int64_t>(y)}, here.grade});
        }
    }
    ReferenceBoundary boundary(p.width, p.height, p.num_grades, std::move(frontier));
    return {std::move(map), std::move(boundary)};
}

ClassId other_class(std::mt19937_64& rng, ClassId c, std::size_t n) {
    std::uniform_int_distribution<ClassId> u(0, static_cast<ClassId>(n - 2));
    const ClassId k = u(rng);
    return k >= c ? k + 1 : k;
}

}  // namespace

std::pair<PixelLabelMap, ReferenceBoundary> synth_expert(const SynthParams& params, std::size_t expert) {
    check(params);
    return render(params, expert_sites(params, expert));
}

SynthImage synth(const SynthParams& params) {
    auto [labels, boundary] = synth_expert(params, 0);
    const TileSpec spec(params.tile, params.width, params.height);
    const auto comps = compose_tiles(labels, spec);
    TilePrediction pred(spec.rows(), spec.cols(), params.num_classes);
    auto rng = stream_rng(params.seed, 2);
    std::bernoulli_distribution flip(params.noise);
    for (TileIndex t = 0; t < spec.count(); ++t) {
        const auto truth = majority_class(comps[t]);
        if (!truth) continue;
        pred.set(t, flip(rng) ? other_class(rng, *truth, params.num_classes) : *truth);
    }
    return {std::move(labels), std::move(boundary), std::move(pred)};
}

TileScores synth_scores(const SynthParams& params, const SynthImage& image, std::size_t source) {
    const TileSpec spec(params.tile, params.width, params.height);
    const auto comps = compose_tiles(image.labels, spec);
    TileScores scores(spec.rows(), spec.cols(), params.num_classes);
    auto rng = stream_rng(params.seed, 3, source);
    std::uniform_real_distribution<double> background(0.0, 0.4);
    std::bernoulli_distribution flip(params.noise);
    for (TileIndex t = 0; t < spec.count(); ++t) {
        const auto truth = majority_class(comps[t]);
        if (!truth) continue;
        std::vector<double> v(params.num_classes);
        for (double& x : v) x = background(rng);
        const ClassId boosted = flip(rng) ? other_class(rng, *truth, params.num_classes) : *truth;
        v[boosted] += 0.6;
        scores.set(t, std::move(v));
    }
    return scores;
}

TileScores synth_distances(const TileScores& likelihoods) {
    TileScores out(likelihoods.rows(), likelihoods.cols(), likelihoods.num_classes());
    for (TileIndex t = 0; t < likelihoods.count(); ++t) {
        const auto& p = likelihoods.at(t);
        if (!p) continue;
        std::vector<double> d(p->size());
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = 1.5 - (*p)[i];
        out.set(t, std::move(d));
    }
    return out;
}

std::filesystem::path write_synth_dataset(const SynthDatasetParams& params, const std::filesystem::path& dir) {
    if (params.images == 0) throw ValidationError("synthetic dataset needs at least one image");
    if (params.experts == 0) throw ValidationError("synthetic dataset needs at least one expert");
    check(params.image);
    std::filesystem::create_directories(dir);

    nlohmann::ordered_json manifest;
    std::vector<std::string> classes;
    for (std::size_t i = 0; i < params.image.num_classes; ++i) classes.push_back("class" + std::to_string(i));
    manifest["classes"] = classes;
    nlohmann::ordered_json grades = nlohmann::ordered_json::array();
    if (params.image.num_grades == 3) {
        grades.push_back({{"name", "sure"}, {"weight", "2/3"}});
        grades.push_back({{"name", "moderately sure"}, {"weight", "1/2"}});
        grades.push_back({{"name", "not sure"}, {"weight", "1/3"}});
    } else {
        for (std::size_t g = 0; g < params.image.num_grades; ++g)
            grades.push_back({{"name", "g" + std::to_string(g)}, {"weight", "1"}});
    }
    manifest["grades"] = grades;
    manifest["tile_size"] = params.image.tile;
    manifest["images"] = nlohmann::ordered_json::array();

    for (std::size_t i = 0; i < params.images; ++i) {
        SynthParams p = params.image;
        p.seed = params.image.seed + i;
        const std::string stem = "img" + std::to_string(i);
        const auto image = synth(p);

        nlohmann::ordered_json entry;
        entry["name"] = stem;
        entry["width"] = p.width;
        entry["height"] = p.height;
        entry["experts"] = nlohmann::ordered_json::array();
        for (std::size_t e = 0; e < params.experts; ++e) {
            const std::string lbl = stem + "_e" + std::to_string(e) + ".lbl";
            const std::string bnd = stem + "_e" + std::to_string(e) + ".bnd";
            if (e == 0) {
                save_label_map(dir / lbl, image.labels);
                save_boundary(dir / bnd, image.boundary);
            } else {
                const auto [labels, boundary] = synth_expert(p, e);
                save_label_map(dir / lbl, labels);
                save_boundary(dir / bnd, boundary);
            }
            entry["experts"].push_back({{"labels", lbl}, {"boundary", bnd}});
        }
        const std::string pred = stem + "_pred.csv";
        save_predictions(dir / pred, image.prediction);
        entry["prediction"] = pred;
        if (params.sources > 0) {
            entry["scores"] = nlohmann::ordered_json::array();
            entry["distances"] = nlohmann::ordered_json::array();
            for (std::size_t s = 0; s < params.sources; ++s) {
                const auto likelihoods = synth_scores(p, image, s);
                const std::string sf = stem + "_s" + std::to_string(s) + ".csv";
                const std::string df = stem + "_d" + std::to_string(s) + ".csv";
                save_scores(dir / sf, likelihoods);
                save_scores(dir / df, synth_distances(likelihoods));
                entry["scores"].push_back(sf);
                entry["distances"].push_back(df);
            }
        }
        manifest["images"].push_back(entry);
    }
    const auto path = dir / "manifest.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    out << manifest.dump(2) << '\n';
    return path;
}

}  // namespace ueval
