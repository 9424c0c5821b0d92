#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <vector>

#include <CLI11.hpp>

#include "uncertain_eval/dataset.hpp"
#include "uncertain_eval/error.hpp"
#include "uncertain_eval/evaluate.hpp"
#include "uncertain_eval/formats.hpp"
#include "uncertain_eval/report.hpp"
#include "uncertain_eval/synth.hpp"

namespace ueval::cli {

namespace {

struct CommonOptions {
    std::string manifest;
    std::string weights;
    double exponent_a = 0.1666666667;
    bool no_certainty = false;
    std::string out;
    std::size_t threads = 0;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--manifest", o.manifest, "dataset manifest (JSON)")->required();
    cmd->add_option("--weights", o.weights, "grade weights, e.g. 2/3,1/2,1/3");
    cmd->add_option("--exponent-a", o.exponent_a, "well-detection exponent a")->capture_default_str();
    cmd->add_flag("--no-certainty", o.no_certainty, "weigh every certainty grade as 1");
    cmd->add_option("--out", o.out, "report path (default: stdout)");
    cmd->add_option("--threads", o.threads, "worker threads (default: UNCERTAIN_EVAL_THREADS or all cores)");
}

CertaintyScale parse_weights(const std::string& text) {
    std::vector<Rational> weights;
    std::size_t start = 0;
    while (true) {
        const auto comma = text.find(',', start);
        weights.push_back(parse_rational(std::string_view(text).substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return CertaintyScale::from_weights(weights);
}

EvalOptions make_options(const CommonOptions& o, const Dataset& ds) {
    EvalOptions opt;
    if (!o.weights.empty()) opt.scale = parse_weights(o.weights);
    else if (ds.grades) opt.scale = *ds.grades;
    opt.use_certainty = !o.no_certainty;
    opt.exponent_a = o.exponent_a;
    opt.threads = o.threads;
    return opt;
}

void emit(const EvalReport& report, const std::string& path, std::ostream& out) {
    const std::string text = dump_report(report);
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot write report '" + path + "'");
    f << text;
}

void fill_settings(EvalReport& report, const EvalOptions& opt, std::size_t experts, std::size_t images) {
    report.fused.experts = static_cast<double>(experts);
    report.fused.images = static_cast<double>(images);
    report.fused.settings.use_certainty = opt.use_certainty;
    report.fused.settings.weights.clear();
    for (GradeId g = 0; g < opt.scale.size(); ++g) report.fused.settings.weights.push_back(opt.scale.weight_value(g));
    report.fused.settings.exponent_a = opt.exponent_a;
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Uncertainty-aware evaluation of tiled image classification and segmentation", "uncertain-eval"};
    app.require_subcommand(1);

    CommonOptions eval_class_opts, eval_seg_opts, eval_all_opts, fuse_opts, conflict_opts;
    auto* eval_class = app.add_subcommand("eval-class", "certainty-weighted confusion matrices and rates");
    add_common(eval_class, eval_class_opts);
    auto* eval_seg = app.add_subcommand("eval-seg", "well-detection and false-detection boundary measures");
    add_common(eval_seg, eval_seg_opts);
    auto* eval_all = app.add_subcommand("eval-all", "classification and segmentation evaluation");
    add_common(eval_all, eval_all_opts);

    auto* fuse = app.add_subcommand("fuse", "belief-function fusion of classifier sources");
    add_common(fuse, fuse_opts);
    std::string model = "appriou";
    std::string predictions_dir;
    fuse->add_option("--model", model, "appriou or denoeux")
        ->check(CLI::IsMember({"appriou", "denoeux"}))
        ->capture_default_str();
    fuse->add_option("--predictions-dir", predictions_dir, "write fused prediction CSVs here");

    auto* conflict_cmd = app.add_subcommand("conflict", "conflict and auto-conflict between experts");
    add_common(conflict_cmd, conflict_opts);
    std::size_t repeat = 3;
    conflict_cmd->add_option("--repeat", repeat, "copies combined for auto-conflict")->capture_default_str();

    auto* synth_cmd = app.add_subcommand("synth", "write a synthetic dataset and manifest");
    SynthDatasetParams sp;
    std::string out_dir;
    synth_cmd->add_option("--seed", sp.image.seed, "random seed")->capture_default_str();
    synth_cmd->add_option("--width", sp.image.width)->capture_default_str();
    synth_cmd->add_option("--height", sp.image.height)->capture_default_str();
    synth_cmd->add_option("--classes", sp.image.num_classes)->capture_default_str();
    synth_cmd->add_option("--tile", sp.image.tile)->capture_default_str();
    synth_cmd->add_option("--noise", sp.image.noise, "prediction flip probability")->capture_default_str();
    synth_cmd->add_option("--grades", sp.image.num_grades)->capture_default_str();
    synth_cmd->add_option("--regions", sp.image.num_regions, "Voronoi sites (0: twice the classes)")
        ->capture_default_str();
    synth_cmd->add_option("--images", sp.images)->capture_default_str();
    synth_cmd->add_option("--experts", sp.experts)->capture_default_str();
    synth_cmd->add_option("--sources", sp.sources, "classifier score files per image")->capture_default_str();
    synth_cmd->add_option("--out-dir", out_dir, "output directory")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::Success& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        if (synth_cmd->parsed()) {
            out << write_synth_dataset(sp, out_dir).string() << '\n';
            return kExitOk;
        }

        const CLI::App* cmd = app.get_subcommands().front();
        const CommonOptions& o = cmd == eval_class ? eval_class_opts
                                 : cmd == eval_seg ? eval_seg_opts
                                 : cmd == eval_all ? eval_all_opts
                                 : cmd == fuse     ? fuse_opts
                                                   : conflict_opts;
        const Dataset ds = load_dataset(std::filesystem::path(o.manifest));
        EvalOptions opt = make_options(o, ds);
        check_scale(ds, opt.scale);

        if (cmd == conflict_cmd) {
            EvalReport report;
            const auto& scale = opt.use_certainty ? opt.scale : CertaintyScale::uniform(opt.scale.size());
            FusionBlock block;
            block.model = "experts";
            block.experts = expert_conflict(ds, scale, repeat);
            block.mean_conflict = block.experts->total_conflict;
            report.fusion = std::move(block);
            fill_settings(report, opt, ds.num_experts(), ds.images.size());
            emit(report, o.out, out);
            return kExitOk;
        }

        if (cmd == fuse) {
            auto outcome = fuse_dataset(ds, model == "denoeux" ? FusionModel::Denoeux : FusionModel::Appriou, o.threads);
            EvalReport report;
            if (ds.num_experts() > 0) report = evaluate_dataset(ds, opt, outcome.predictions);
            else fill_settings(report, opt, 0, ds.images.size());
            report.fusion = std::move(outcome.block);
            if (!predictions_dir.empty()) {
                std::filesystem::create_directories(predictions_dir);
                for (std::size_t i = 0; i < ds.images.size(); ++i)
                    save_predictions(std::filesystem::path(predictions_dir) / (ds.images[i].name + "_fused.csv"),
                                     outcome.predictions[i]);
            }
            emit(report, o.out, out);
            return kExitOk;
        }

        opt.classification = cmd != eval_seg;
        opt.segmentation = cmd != eval_class;
        emit(evaluate_dataset(ds, opt), o.out, out);
        return kExitOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "fatal: " << e.what() << '\n';
        return kExitFailure;
    }
}

}  // namespace ueval::cli
