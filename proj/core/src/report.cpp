#include "uncertain_eval/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "uncertain_eval/error.hpp"

namespace ueval {

using nlohmann::json;
using nlohmann::ordered_json;

double report_number(double v) {
    if (v == 0) return 0.0;
    if (!std::isfinite(v)) return v;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return std::strtod(buf, nullptr);
}

namespace {

ordered_json num(double v) { return report_number(v); }

ordered_json opt_num(const std::optional<double>& v) { return v ? num(*v) : ordered_json(nullptr); }

ordered_json vec(const std::vector<double>& v) {
    ordered_json out = ordered_json::array();
    for (double x : v) out.push_back(num(x));
    return out;
}

ordered_json mat(const std::vector<std::vector<double>>& m) {
    ordered_json out = ordered_json::array();
    for (const auto& row : m) out.push_back(vec(row));
    return out;
}

ordered_json rates_json(const RatesBlock& r) {
    return {{"gcr", vec(r.gcr)}, {"ecr", vec(r.ecr)}, {"mean_gcr", opt_num(r.mean_gcr)}};
}

ordered_json classification_json(const ClassificationBlock& c) {
    ordered_json out;
    out["units"] = num(c.units);
    out["raw_confusion"] = mat(c.raw);
    out["normalized_confusion"] = mat(c.normalized);
    out["row_totals"] = vec(c.row_totals);
    out["empty_rows"] = c.empty_rows;
    out["gcr"] = vec(c.rates.gcr);
    out["ecr"] = vec(c.rates.ecr);
    out["mean_gcr"] = opt_num(c.rates.mean_gcr);
    out["homogeneous"] = rates_json(c.homogeneous);
    out["inhomogeneous"] = rates_json(c.inhomogeneous);
    return out;
}

ordered_json segmentation_json(const SegmentationBlock& s) {
    return {{"wdc", num(s.wdc)}, {"fd", num(s.fd)}, {"pixels", num(s.pixels)}};
}

template <class T, class F>
ordered_json opt_block(const std::optional<T>& v, F&& f) {
    return v ? f(*v) : ordered_json(nullptr);
}

ordered_json fusion_json(const FusionBlock& f) {
    ordered_json out;
    out["model"] = f.model;
    out["mean_conflict"] = opt_num(f.mean_conflict);
    out["images"] = ordered_json::array();
    for (const auto& img : f.images)
        out["images"].push_back(
            {{"name", img.name}, {"mean_conflict", num(img.mean_conflict)}, {"decisions", vec(img.decisions)}});
    out["experts"] = opt_block(f.experts, [](const ConflictStats& c) {
        return ordered_json{{"tiles", num(c.tiles)},
                            {"repeat", num(c.repeat)},
                            {"total_conflict", num(c.total_conflict)},
                            {"auto_conflict", vec(c.auto_conflict)}};
    });
    return out;
}

// ------------------------------------------------------------------ reading

const json& field(const json& obj, const char* key) {
    if (!obj.is_object() || !obj.contains(key)) throw ValidationError(std::string("report: missing key '") + key + "'");
    return obj.at(key);
}

double get_num(const json& v) {
    if (!v.is_number()) throw ValidationError("report: expected a number");
    return v.get<double>();
}

std::optional<double> get_opt(const json& v) {
    if (v.is_null()) return std::nullopt;
    return get_num(v);
}

std::vector<double> get_vec(const json& v) {
    if (!v.is_array()) throw ValidationError("report: expected an array");
    std::vector<double> out;
    for (const auto& x : v) out.push_back(get_num(x));
    return out;
}

std::vector<std::vector<double>> get_mat(const json& v) {
    if (!v.is_array()) throw ValidationError("report: expected a matrix");
    std::vector<std::vector<double>> out;
    for (const auto& row : v) out.push_back(get_vec(row));
    return out;
}

RatesBlock get_rates(const json& v) {
    return {get_vec(field(v, "gcr")), get_vec(field(v, "ecr")), get_opt(field(v, "mean_gcr"))};
}

ClassificationBlock get_classification(const json& v) {
    ClassificationBlock c;
    c.units = get_num(field(v, "units"));
    c.raw = get_mat(field(v, "raw_confusion"));
    c.normalized = get_mat(field(v, "normalized_confusion"));
    c.row_totals = get_vec(field(v, "row_totals"));
    for (const auto& b : field(v, "empty_rows")) {
        if (!b.is_boolean()) throw ValidationError("report: empty_rows must hold booleans");
        c.empty_rows.push_back(b.get<bool>());
    }
    c.rates = {get_vec(field(v, "gcr")), get_vec(field(v, "ecr")), get_opt(field(v, "mean_gcr"))};
    c.homogeneous = get_rates(field(v, "homogeneous"));
    c.inhomogeneous = get_rates(field(v, "inhomogeneous"));
    return c;
}

SegmentationBlock get_segmentation(const json& v) {
    return {get_num(field(v, "wdc")), get_num(field(v, "fd")), get_num(field(v, "pixels"))};
}

FusionBlock get_fusion(const json& v) {
    FusionBlock f;
    f.model = field(v, "model").get<std::string>();
    f.mean_conflict = get_opt(field(v, "mean_conflict"));
    for (const auto& img : field(v, "images"))
        f.images.push_back({field(img, "name").get<std::string>(), get_vec(field(img, "decisions")),
                            get_num(field(img, "mean_conflict"))});
    const auto& ex = field(v, "experts");
    if (!ex.is_null())
        f.experts = ConflictStats{get_num(field(ex, "tiles")), get_num(field(ex, "repeat")),
                                  get_num(field(ex, "total_conflict")), get_vec(field(ex, "auto_conflict"))};
    return f;
}

template <class T, class F>
std::optional<T> get_opt_block(const json& v, F&& f) {
    if (v.is_null()) return std::nullopt;
    return f(v);
}

}  // namespace

RatesBlock make_rates_block(const RateReport& r) { return {r.gcr, r.ecr, r.mean_gcr}; }

ClassificationBlock make_classification_block(const ConfusionAccumulator& all, const ConfusionAccumulator& homogeneous,
                                              const ConfusionAccumulator& inhomogeneous) {
    const std::size_t n = all.num_classes();
    const auto ncm = normalize(all);
    ClassificationBlock c;
    c.units = static_cast<double>(all.units_seen());
    const auto raw = all.to_doubles();
    for (std::size_t i = 0; i < n; ++i) {
        c.raw.emplace_back(raw.begin() + static_cast<std::ptrdiff_t>(i * n),
                           raw.begin() + static_cast<std::ptrdiff_t>((i + 1) * n));
        c.normalized.emplace_back(ncm.values.begin() + static_cast<std::ptrdiff_t>(i * n),
                                  ncm.values.begin() + static_cast<std::ptrdiff_t>((i + 1) * n));
    }
    c.row_totals = ncm.row_totals;
    c.empty_rows = ncm.empty_rows;
    c.rates = make_rates_block(rates(ncm));
    c.homogeneous = make_rates_block(rates(normalize(homogeneous)));
    c.inhomogeneous = make_rates_block(rates(normalize(inhomogeneous)));
    return c;
}

ordered_json to_json(const EvalReport& r) {
    ordered_json out;
    out["classification"] = opt_block(r.classification, classification_json);
    out["segmentation"] = opt_block(r.segmentation, segmentation_json);
    out["fusion"] = opt_block(r.fusion, fusion_json);
    out["per_expert"] = ordered_json::array();
    for (const auto& e : r.per_expert) {
        out["per_expert"].push_back({{"expert", num(e.expert)},
                                     {"classification", opt_block(e.classification, classification_json)},
                                     {"segmentation", opt_block(e.segmentation, segmentation_json)}});
    }
    const auto& f = r.fused;
    out["fused"] = {{"experts", num(f.experts)},
                    {"images", num(f.images)},
                    {"mean_gcr", opt_num(f.mean_gcr)},
                    {"wdc", opt_num(f.wdc)},
                    {"fd", opt_num(f.fd)},
                    {"settings",
                     {{"use_certainty", f.settings.use_certainty},
                      {"weights", vec(f.settings.weights)},
                      {"exponent_a", num(f.settings.exponent_a)}}}};
    return out;
}

EvalReport report_from_json(const json& doc) {
    EvalReport r;
    try {
        r.classification = get_opt_block<ClassificationBlock>(field(doc, "classification"), get_classification);
        r.segmentation = get_opt_block<SegmentationBlock>(field(doc, "segmentation"), get_segmentation);
        r.fusion = get_opt_block<FusionBlock>(field(doc, "fusion"), get_fusion);
        for (const auto& e : field(doc, "per_expert")) {
            r.per_expert.push_back(
                {get_num(field(e, "expert")),
                 get_opt_block<ClassificationBlock>(field(e, "classification"), get_classification),
                 get_opt_block<SegmentationBlock>(field(e, "segmentation"), get_segmentation)});
        }
        const auto& f = field(doc, "fused");
        r.fused.experts = get_num(field(f, "experts"));
        r.fused.images = get_num(field(f, "images"));
        r.fused.mean_gcr = get_opt(field(f, "mean_gcr"));
        r.fused.wdc = get_opt(field(f, "wdc"));
        r.fused.fd = get_opt(field(f, "fd"));
        const auto& s = field(f, "settings");
        r.fused.settings.use_certainty = field(s, "use_certainty").get<bool>();
        r.fused.settings.weights = get_vec(field(s, "weights"));
        r.fused.settings.exponent_a = get_num(field(s, "exponent_a"));
    } catch (const json::exception& e) {
        throw ValidationError(std::string("report: ") + e.what());
    }
    return r;
}

std::string dump_report(const EvalReport& report) { return to_json(report).dump(2) + "\n"; }

}  // namespace ueval
