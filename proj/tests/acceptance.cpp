// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "oracles.hpp"
#include "uncertain_eval/belief.hpp"
#include "uncertain_eval/classification.hpp"
#include "uncertain_eval/dataset.hpp"
#include "uncertain_eval/evaluate.hpp"
#include "uncertain_eval/segmentation.hpp"
#include "uncertain_eval/synth.hpp"

using namespace ueval;
namespace fs = std::filesystem;

namespace {

// Collects failed checks of one criterion.
class Checker {
public:
    void require(bool ok, const std::string& what) {
        ++checks_;
        if (!ok && failures_.size() < 5) failures_.push_back(what);
        if (!ok) ++failed_;
    }
    void near(double got, double want, double tol, const std::string& what) {
        require(std::abs(got - want) <= tol,
                what + ": got " + std::to_string(got) + ", want " + std::to_string(want));
    }
    bool ok() const { return failed_ == 0; }
    std::size_t checks() const { return checks_; }
    const std::vector<std::string>& failures() const { return failures_; }
    std::size_t failed() const { return failed_; }

private:
    std::size_t checks_ = 0;
    std::size_t failed_ = 0;
    std::vector<std::string> failures_;
};

std::vector<double> dense(const MassFunction& m) { return oracle::to_dense(m); }

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

double mass_sum(const MassFunction& m) {
    double s = 0;
    for (const auto& f : m.focal()) s += f.mass;
    return s;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void golden_tile(Checker& c) {
    // The tile as an expert would draw it: 50 pixels of class 0, the rest class 2.
    PixelLabelMap map(16, 16, 3, 3);
    for (std::size_t k = 0; k < 256; ++k) map.set(k % 16, k / 16, PixelLabel{k < 50 ? 0u : 2u, 0});
    const auto comps = compose_tiles(map, TileSpec(16, 16, 16));
    const auto scale = CertaintyScale::default_scale();
    const auto acc = accumulate_unit(ConfusionAccumulator(3), comps[0], 0, scale, false);
    c.require(acc.at(0, 0) == Rational(50, 256), "cm_00 == 50/256");
    c.require(acc.at(2, 0) == Rational(206, 256), "cm_20 == 206/256");
    c.require(acc.at(1, 0) == 0 && acc.at(0, 1) == 0 && acc.at(2, 2) == 0, "other cells untouched");

    const TileComposition moderate{{{0, 1, 256}}, 256};
    const auto right = accumulate_unit(ConfusionAccumulator(3), moderate, 0, scale, true);
    const auto wrong = accumulate_unit(ConfusionAccumulator(3), moderate, 1, scale, true);
    c.require(right.at(0, 0) == Rational(1, 2), "moderately sure, predicted 0: cm_00 == 1/2");
    c.require(wrong.at(0, 1) == Rational(1, 2), "moderately sure, predicted 1: cm_01 == 1/2");
}

void perfect_classifier(Checker& c) {
    std::size_t represented = 0;
    for (std::uint64_t seed = 100; seed < 120; ++seed) {
        SynthParams p;
        p.seed = seed;
        p.noise = 0.0;
        p.num_classes = 2 + seed % 4;
        const auto img = synth(p);
        const auto comps = compose_tiles(img.labels, TileSpec(p.tile, p.width, p.height));
        for (bool certainty : {true, false}) {
            const auto r = split_rates(p.num_classes, comps, img.prediction, CertaintyScale::default_scale(), certainty)
                               .homogeneous;
            for (std::size_t i = 0; i < p.num_classes; ++i) {
                if (r.empty_rows[i]) continue;
                ++represented;
                c.near(r.gcr[i], 1.0, 1e-9, "seed " + std::to_string(seed) + " GCR_" + std::to_string(i));
                c.near(r.ecr[i], 0.0, 1e-9, "seed " + std::to_string(seed) + " ECR_" + std::to_string(i));
            }
        }
    }
    c.require(represented >= 40, "enough represented classes");
}

void boundary_oracle(Checker& c) {
    std::mt19937_64 rng(2024);
    const auto scale = CertaintyScale::default_scale();
    for (int round = 0; round < 300; ++round) {
        const auto inst = oracle::random_boundaries(rng, 64, 200);
        const ReferenceBoundary ref(inst.width, inst.height, 3, inst.reference);
        const FoundBoundary found(inst.width, inst.height, inst.found);
        const std::vector<BoundaryPixel> ref_px(ref.pixels().begin(), ref.pixels().end());
        const std::vector<Pixel> found_px(found.pixels().begin(), found.pixels().end());
        const auto want = oracle::all_pairs_nearest(found_px, ref_px);
        const auto got = match_boundaries(found, ref, scale);
        const std::string tag = "instance " + std::to_string(round);
        c.require(got.matches.size() == want.size(), tag + " match count");
        if (got.matches.size() != want.size()) continue;
        std::map<std::size_t, std::size_t> n_ef;
        for (std::size_t i = 0; i < want.size(); ++i) {
            const auto& m = got.matches[i];
            c.require(m.squared_distance == want[i].squared_distance, tag + " squared distance");
            c.require(m.distance == std::sqrt(static_cast<double>(want[i].squared_distance)), tag + " distance");
            c.require(m.reference == want[i].index, tag + " tie-broken match");
            n_ef[m.reference] = m.multiplicity;
        }
        std::size_t total = 0;
        for (const auto& [e, n] : n_ef) total += n;
        c.require(total == found.size(), tag + " sum of n_ef == |F|");
    }
}

void boundary_ranges(Checker& c) {
    std::mt19937_64 rng(77);
    const auto scale = CertaintyScale::default_scale();
    for (int round = 0; round < 1200; ++round) {
        auto inst = oracle::random_boundaries(rng, 64, 200);
        if (round % 10 == 0) inst.found.clear();
        const ReferenceBoundary ref(inst.width, inst.height, 3, inst.reference);
        const FoundBoundary found(inst.width, inst.height, inst.found);
        const auto s = evaluate_segmentation(found, ref, scale);
        c.require(s.wdc >= 0 && s.wdc <= 1, "wdc in [0,1]");
        c.require(s.fd >= 0 && s.fd <= 1, "fd in [0,1]");
    }

    const auto ones = CertaintyScale::uniform(1);
    std::vector<BoundaryPixel> line;
    std::vector<Pixel> same, half, shifted;
    for (std::int64_t x = 0; x < 10; ++x) {
        line.push_back({{x, 5}, 0});
        same.push_back({x, 5});
        if (x < 5) half.push_back({x, 5});
        shifted.push_back({x, 6});
    }
    const ReferenceBoundary ref(16, 16, 1, line);
    const auto exact = evaluate_segmentation(FoundBoundary(16, 16, same), ref, ones);
    c.near(exact.wdc, 1.0, 1e-12, "exact match wdc");
    c.near(exact.fd, 0.0, 1e-12, "exact match fd");
    const auto weighted = evaluate_segmentation(FoundBoundary(16, 16, same), ReferenceBoundary(16, 16, 3, line),
                                                CertaintyScale::default_scale());
    c.near(weighted.wdc, 1.0, 1e-12, "exact match wdc with weight 2/3");
    c.near(evaluate_segmentation(FoundBoundary(16, 16, half), ref, ones).wdc, std::pow(0.5, 1.0 / 6.0), 1e-9,
           "half coverage wdc");
    c.near(evaluate_segmentation(FoundBoundary(16, 16, shifted), ref, ones).fd, 1 - std::exp(-1.0), 1e-9,
           "distance-1 fd");
}

void belief(Checker& c) {
    std::mt19937_64 rng(555);
    std::uniform_real_distribution<double> u(0.0, 1.0), big(0.0, 5.0);
    for (int round = 0; round < 500; ++round) {
        const std::size_t n = 2 + round % 4;
        std::vector<double> p(n), alpha(n), nu(n);
        std::vector<PrototypeDistance> d;
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = big(rng);
            alpha[i] = u(rng);
            nu[i] = big(rng);
            d.push_back({static_cast<ClassId>(i), big(rng)});
        }
        const double r = 1.0 / (big(rng) + 5.0);
        for (const auto& m : appriou_bbas(p, alpha, r)) c.near(mass_sum(m), 1.0, 1e-12, "Appriou bba sum");
        for (const auto& m : denoeux_bbas(n, d, alpha, nu)) c.near(mass_sum(m), 1.0, 1e-12, "Denoeux bba sum");
    }

    for (int round = 0; round < 600; ++round) {
        const std::size_t n = 2 + round % 3;
        const auto a = oracle::random_mass(rng, n), b = oracle::random_mass(rng, n), m3 = oracle::random_mass(rng, n);
        const auto ab = combine_pair(a, b);
        c.require(max_diff(dense(ab), dense(combine_pair(b, a))) <= 1e-12, "commutativity");
        c.require(max_diff(dense(combine_pair(ab, m3)), dense(combine_pair(a, combine_pair(b, m3)))) <= 1e-12,
                  "associativity");
        c.require(max_diff(dense(ab), oracle::dense_conjunctive(dense(a), dense(b))) <= 1e-12, "dense oracle");
        c.require(max_diff(dense(combine_pair(MassFunction::vacuous(Frame(n)), a)), dense(a)) <= 1e-15,
                  "vacuous identity");
        c.require(conflict(combine_pair(ab, m3)) >= conflict(ab) - 1e-15, "m(empty) non-decreasing");
        if (conflict(ab) < 1 - 1e-9) {
            double s = 0;
            for (double v : pignistic(ab)) {
                c.require(v >= 0, "BetP >= 0");
                s += v;
            }
            c.near(s, 1.0, 1e-9, "BetP sums to 1");
        }
    }

    const std::vector<MassFunction> pair{MassFunction(Frame(2), {{1, 0.6}, {3, 0.4}}),
                                         MassFunction(Frame(2), {{2, 0.5}, {3, 0.5}})};
    const auto m = combine(pair);
    c.near(conflict(m), 0.3, 1e-12, "worked example m(empty)");
    c.near(pignistic(m)[0], 0.5714, 1e-4, "worked example BetP(a)");
    c.require(decide(m) == 0, "worked example decides a");
}

void expert_merge(Checker& c) {
    // Random expert pairs on shared predictions: the merged raw matrix equals
    // the entrywise sum, which equals one accumulator fed every unit of both.
    std::mt19937_64 rng(31337);
    const auto scale = CertaintyScale::default_scale();
    for (int round = 0; round < 50; ++round) {
        std::uniform_int_distribution<std::size_t> side(4, 40), tile(2, 8);
        const std::size_t w = side(rng), h = side(rng), n = 3;
        const TileSpec spec(tile(rng), w, h);
        TilePrediction pred(spec.rows(), spec.cols(), n);
        std::uniform_int_distribution<ClassId> cls(0, n - 1);
        std::uniform_int_distribution<GradeId> grade(0, 2);
        for (TileIndex t = 0; t < spec.count(); ++t) pred.set(t, cls(rng));
        std::vector<ConfusionAccumulator> per_expert;
        ConfusionAccumulator together(n);
        for (int e = 0; e < 2; ++e) {
            PixelLabelMap map(w, h, n, 3);
            for (std::size_t y = 0; y < h; ++y)
                for (std::size_t x = 0; x < w; ++x) map.set(x, y, PixelLabel{cls(rng), grade(rng)});
            const auto comps = compose_tiles(map, spec);
            per_expert.push_back(accumulate_image(n, comps, pred, scale, true));
            for (TileIndex t = 0; t < comps.size(); ++t)
                together = accumulate_unit(std::move(together), comps[t], *pred.at(t), scale, true);
        }
        const auto merged = merge(per_expert);
        for (ClassId i = 0; i < n; ++i)
            for (ClassId j = 0; j < n; ++j) {
                c.require(merged.at(i, j) == per_expert[0].at(i, j) + per_expert[1].at(i, j), "merged == sum");
                c.require(merged.at(i, j) == together.at(i, j), "merged == joint accumulation");
            }
    }

    // Normalising before summing gives a different answer.
    ConfusionAccumulator a(2), b(2);
    a.add(0, 0, 1);
    a.add(1, 1, 1);
    b.add(0, 0, 1);
    b.add(0, 1, 3);
    b.add(1, 1, 1);
    const std::vector<ConfusionAccumulator> both{a, b};
    const auto right = normalize(merge(both));
    c.near(right.at(0, 0), 0.4, 1e-15, "normalize(A+B)_00");
    const double wrong = (normalize(a).at(0, 0) + normalize(b).at(0, 0)) / 2;
    c.require(std::abs(right.at(0, 0) - wrong) > 0.2, "mean of normalized matrices differs");

    // Same rule through the dataset pipeline.
    oracle::TempDir dir("accept_merge");
    SynthDatasetParams p;
    p.image.seed = 3;
    p.image.noise = 0.25;
    p.images = 2;
    p.experts = 3;
    const auto ds = load_dataset(write_synth_dataset(p, dir.path()));
    const auto report = evaluate_dataset(ds, EvalOptions{});
    const auto& fused = *report.classification;
    for (std::size_t i = 0; i < 3; ++i) {
        double row = 0;
        for (std::size_t j = 0; j < 3; ++j) {
            double sum = 0;
            for (const auto& e : report.per_expert) sum += e.classification->raw[i][j];
            c.near(fused.raw[i][j], sum, 1e-12, "pipeline fused raw == sum of experts");
            row += fused.raw[i][j];
        }
        for (std::size_t j = 0; j < 3; ++j)
            c.near(fused.normalized[i][j], fused.raw[i][j] / row, 1e-12, "pipeline normalizes the summed matrix");
    }
}

void cli_determinism(Checker& c) {
    oracle::TempDir dir("accept_cli");
    auto run = [](std::vector<std::string> args) {
        std::ostringstream out, err;
        return cli::run_cli(args, out, err);
    };
    for (const char* sub : {"a", "b"}) {
        const int code = run({"synth", "--seed", "2718", "--images", "3", "--experts", "2", "--sources", "2",
                              "--noise", "0.2", "--out-dir", (dir.path() / sub).string()});
        c.require(code == 0, "synth exit code");
    }
    c.require(slurp(dir.path() / "a" / "manifest.json") == slurp(dir.path() / "b" / "manifest.json"),
              "synth manifests identical");
    c.require(slurp(dir.path() / "a" / "img2_e1.lbl") == slurp(dir.path() / "b" / "img2_e1.lbl"),
              "synth label files identical");

    const auto manifest = (dir.path() / "a" / "manifest.json").string();
    const std::vector<std::vector<std::string>> commands{
        {"eval-all"}, {"eval-class"}, {"eval-seg"}, {"fuse", "--model", "appriou"}, {"fuse", "--model", "denoeux"},
        {"conflict"}};
    int k = 0;
    for (const auto& cmd : commands) {
        std::vector<std::string> texts;
        for (const char* threads : {"1", "3"}) {
            const auto out = dir.path() / ("r" + std::to_string(k++) + ".json");
            auto args = cmd;
            for (const auto& extra : {"--manifest", manifest.c_str(), "--threads", threads, "--out", out.c_str()})
                args.emplace_back(extra);
            c.require(run(args) == 0, cmd[0] + " exit code");
            texts.push_back(slurp(out));
        }
        c.require(!texts[0].empty() && texts[0] == texts[1], cmd[0] + " byte-identical report");
    }
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Checker&)>>> criteria{
        {"1 tile golden: 50/256, 206/256 and the moderate-certainty 1/2 are exact", golden_tile},
        {"2 perfect classifier: GCR=1, ECR=0 on homogeneous tiles with noise 0", perfect_classifier},
        {"3 boundary oracle: distances and matches equal all-pairs minimum, sum n_ef = |F|", boundary_oracle},
        {"4 wdc, fd in [0,1]; exact, half-coverage and distance-1 anchors", boundary_ranges},
        {"5 belief: bba sums, commutative/associative combine, dense oracle, pignistic", belief},
        {"6 expert merge: raw matrices summed exactly, normalized only afterwards", expert_merge},
        {"7 CLI determinism: byte-identical reports for identical inputs", cli_determinism},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Checker c;
        try {
            run(c);
        } catch (const std::exception& e) {
            c.require(false, std::string("exception: ") + e.what());
        }
        std::printf("%s [%s] (%zu checks)\n", c.ok() ? "PASS" : "FAIL", name.c_str(), c.checks());
        if (!c.ok()) {
            ++failed;
            std::printf("  %zu failed checks, first ones:\n", c.failed());
            for (const auto& f : c.failures()) std::printf("    %s\n", f.c_str());
        }
    }
    std::printf("%s: %d of %zu criteria failed\n", failed ? "FAILED" : "OK", failed, criteria.size());
    return failed ? 1 : 0;
}
