#include "uncertain_eval/dataset.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "uncertain_eval/error.hpp"
#include "uncertain_eval/formats.hpp"

namespace ueval {

namespace {

using nlohmann::json;

std::filesystem::path resolve(const std::filesystem::path& base, const json& v, const std::string& what) {
    if (!v.is_string()) throw ValidationError("manifest: " + what + " must be a path string");
    std::filesystem::path p = v.get<std::string>();
    if (p.is_relative()) p = base / p;
    if (!std::filesystem::exists(p)) throw ValidationError("manifest: " + what + " '" + p.string() + "' does not exist");
    return p;
}

std::size_t positive(const json& v, const std::string& what) {
    if (!v.is_number_integer() || v.get<long long>() <= 0)
        throw ValidationError("manifest: " + what + " must be a positive integer");
    return v.get<std::size_t>();
}

std::vector<double> numbers(const json& v, const std::string& what) {
    if (!v.is_array()) throw ValidationError("manifest: " + what + " must be an array");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) throw ValidationError("manifest: " + what + " must hold numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

}  // namespace

DatasetManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open manifest '" + path.string() + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError("manifest '" + path.string() + "': " + e.what());
    }
    if (!doc.is_object()) throw ValidationError("manifest: top level must be an object");
    const auto base = path.parent_path();

    DatasetManifest m;
    if (doc.contains("classes")) {
        for (const auto& c : doc.at("classes")) {
            if (!c.is_string()) throw ValidationError("manifest: class names must be strings");
            m.classes.push_back(c.get<std::string>());
        }
    } else if (doc.contains("num_classes")) {
        const auto n = positive(doc.at("num_classes"), "num_classes");
        for (std::size_t i = 0; i < n; ++i) m.classes.push_back(std::to_string(i));
    } else {
        throw ValidationError("manifest: needs 'classes' or 'num_classes'");
    }
    ClassSet(m.classes);  // validates count and uniqueness

    if (doc.contains("grades")) {
        std::vector<Grade> grades;
        for (const auto& g : doc.at("grades")) {
            if (!g.is_object() || !g.contains("weight")) throw ValidationError("manifest: each grade needs a weight");
            const auto& w = g.at("weight");
            Rational weight = w.is_string() ? parse_rational(w.get<std::string>())
                              : w.is_number() ? parse_rational(format_double(w.get<double>()))
                                              : throw ValidationError("manifest: grade weight must be a number or fraction");
            std::string name = g.contains("name") ? g.at("name").get<std::string>() : "g" + std::to_string(grades.size());
            grades.push_back({std::move(name), std::move(weight)});
        }
        m.grades = CertaintyScale(std::move(grades));
    }

    std::size_t default_tile = 0;
    if (doc.contains("tile_size")) default_tile = positive(doc.at("tile_size"), "tile_size");

    if (doc.contains("fusion")) {
        const auto& f = doc.at("fusion");
        if (f.contains("alpha"))
            for (const auto& row : f.at("alpha")) m.fusion.alpha.push_back(numbers(row, "fusion.alpha row"));
        if (f.contains("nu")) m.fusion.nu = numbers(f.at("nu"), "fusion.nu");
    }

    if (!doc.contains("images") || !doc.at("images").is_array() || doc.at("images").empty())
        throw ValidationError("manifest: needs a non-empty 'images' array");
    for (const auto& img : doc.at("images")) {
        ImageEntry e;
        e.name = img.contains("name") ? img.at("name").get<std::string>() : "image" + std::to_string(m.images.size());
        const std::string ctx = "image '" + e.name + "' ";
        if (!img.contains("width") || !img.contains("height")) throw ValidationError("manifest: " + ctx + "needs width and height");
        e.width = positive(img.at("width"), ctx + "width");
        e.height = positive(img.at("height"), ctx + "height");
        e.tile_size = img.contains("tile_size") ? positive(img.at("tile_size"), ctx + "tile_size") : default_tile;
        if (e.tile_size == 0) throw ValidationError("manifest: " + ctx + "has no tile_size");
        if (img.contains("experts")) {
            for (const auto& ex : img.at("experts")) {
                ExpertFiles files;
                files.labels = resolve(base, ex.at("labels"), ctx + "labels");
                if (ex.contains("boundary")) files.boundary = resolve(base, ex.at("boundary"), ctx + "boundary");
                e.experts.push_back(std::move(files));
            }
        }
        if (img.contains("prediction")) e.prediction = resolve(base, img.at("prediction"), ctx + "prediction");
        if (img.contains("scores"))
            for (const auto& s : img.at("scores")) e.scores.push_back(resolve(base, s, ctx + "scores"));
        if (img.contains("distances"))
            for (const auto& s : img.at("distances")) e.distances.push_back(resolve(base, s, ctx + "distances"));
        m.images.push_back(std::move(e));
    }
    return m;
}

std::size_t Dataset::num_experts() const {
    std::size_t n = 0;
    for (const auto& img : images) n = std::max(n, img.experts.size());
    return n;
}

Dataset load_dataset(const DatasetManifest& manifest) {
    Dataset ds{ClassSet(manifest.classes), manifest.grades, 0, manifest.fusion, {}};
    const std::size_t n = ds.classes.size();
    for (const auto& entry : manifest.images) {
        const std::string ctx = "image '" + entry.name + "': ";
        LoadedImage img{entry.name, TileSpec(entry.tile_size, entry.width, entry.height), {}, std::nullopt, {}, {}};
        for (const auto& files : entry.experts) {
            auto labels = parse_label_map(files.labels);
            if (labels.width() != entry.width || labels.height() != entry.height)
                throw ValidationError(ctx + files.labels.string() + " is " + std::to_string(labels.width()) + "x" +
                                      std::to_string(labels.height()) + ", manifest says " +
                                      std::to_string(entry.width) + "x" + std::to_string(entry.height));
            if (labels.num_classes() != n)
                throw ValidationError(ctx + files.labels.string() + " declares " +
                                      std::to_string(labels.num_classes()) + " classes, manifest has " +
                                      std::to_string(n));
            ds.num_grades = std::max(ds.num_grades, labels.num_grades());
            std::optional<ReferenceBoundary> boundary;
            if (files.boundary) {
                boundary = parse_boundary(*files.boundary);
                if (boundary->width() != entry.width || boundary->height() != entry.height)
                    throw ValidationError(ctx + files.boundary->string() + " has different dimensions");
                ds.num_grades = std::max(ds.num_grades, boundary->num_grades());
            }
            img.experts.push_back({std::move(labels), std::move(boundary)});
        }
        const auto& spec = img.spec;
        if (entry.prediction) {
            auto p = parse_predictions(*entry.prediction, spec.rows(), spec.cols(), n);
            if (!std::holds_alternative<TilePrediction>(p))
                throw ValidationError(ctx + entry.prediction->string() + " holds scores, expected hard predictions");
            img.prediction = std::get<TilePrediction>(std::move(p));
        }
        auto load_scores = [&](const std::vector<std::filesystem::path>& paths, std::vector<TileScores>& out) {
            for (const auto& path : paths) {
                auto p = parse_predictions(path, spec.rows(), spec.cols(), n);
                if (!std::holds_alternative<TileScores>(p))
                    throw ValidationError(ctx + path.string() + " holds hard predictions, expected scores");
                out.push_back(std::get<TileScores>(std::move(p)));
            }
        };
        load_scores(entry.scores, img.scores);
        load_scores(entry.distances, img.distances);
        ds.images.push_back(std::move(img));
    }
    return ds;
}

Dataset load_dataset(const std::filesystem::path& manifest_path) { return load_dataset(read_manifest(manifest_path)); }

}  // namespace ueval
