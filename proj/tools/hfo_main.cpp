// Command-line driver for the HFO classification pipeline: simulate labeled
// events, render scalograms, train/evaluate the three model families, and
// predict on stored datasets. Every command is deterministic given its flags.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hfo/io.hpp"
#include "hfo/pipeline.hpp"
#include "hfo/rng.hpp"
#include "hfo/simgen.hpp"

namespace {

struct SimulateArgs {
    std::string profile = "sim1";
    int per_class = 1000;
    double snr_db = 10.0;
    bool clean = false;
    std::uint64_t seed = 0;
    double fs = 2048.0;
    double window = 0.3;
    std::string out;
};

struct ScalogramArgs {
    std::string data;
    std::string outdir;
    int size = 64;
    double fmin = 80.0;
    double fmax = 500.0;
    int voices = 12;
};

struct TrainArgs {
    std::string model = "svm";
    std::string data;
    std::string out;
    std::string report;
    std::string roc;
    std::string history;
    std::string coding = "ova";
    std::string kernel = "rbf";
    double c = 1.0;
    double gamma = 0.0; // 0 = automatic
    double tol = 1e-3;
    double lr = 0.001;
    int batch = 128;
    int epochs = 30;
    int image_size = 64;
    int voices = 12;
    double split = 0.7;
    std::uint64_t seed = 0;
};

struct EvalArgs {
    std::string model;
    std::string data;
    int kfold = 0;
    double split = 0.0; // 0 = evaluate on the whole dataset
    std::string report;
    std::string roc;
    std::uint64_t seed = 0;
};

struct PredictArgs {
    std::string model;
    std::string data;
    std::string out;
};

hfo::pipeline::PipelineConfig config_from(const TrainArgs& a) {
    hfo::pipeline::PipelineConfig cfg;
    cfg.kind = hfo::pipeline::model_kind_from_string(a.model);
    cfg.scfg.size = a.image_size;
    cfg.scfg.voices = a.voices;
    cfg.scheme = hfo::ecoc::coding_from_string(a.coding);
    cfg.svm_cfg.kind = a.kernel == "linear" ? hfo::svm::KernelSpec::Kind::linear
                                            : hfo::svm::KernelSpec::Kind::rbf;
    if (a.kernel != "linear" && a.kernel != "rbf")
        throw CLI::ValidationError("--kernel", "must be linear or rbf");
    if (a.gamma > 0.0) cfg.svm_cfg.gamma = a.gamma;
    cfg.svm_cfg.C = a.c;
    cfg.svm_cfg.tol = a.tol;
    cfg.hyper.lr = a.lr;
    cfg.hyper.batch_size = a.batch;
    cfg.hyper.epochs = a.epochs;
    cfg.train_frac = a.split;
    cfg.seed = a.seed;
    return cfg;
}

int run_simulate(const SimulateArgs& a) {
    hfo::sim::DatasetSpec spec;
    spec.profile = a.profile;
    spec.per_class_count = a.per_class;
    spec.master_seed = a.seed;
    spec.fs_hz = a.fs;
    spec.window_s = a.window;
    if (!a.clean) spec.snr_db = a.snr_db;
    const hfo::LabeledDataset ds = hfo::sim::gen_dataset(spec);
    hfo::io::write_dataset(ds, a.out);
    std::cout << "wrote " << ds.segments.size() << " segments to " << a.out << "\n";
    return 0;
}

int run_scalogram(const ScalogramArgs& a) {
    const hfo::LabeledDataset ds = hfo::io::read_dataset(a.data);
    hfo::tfr::ScalogramConfig cfg{a.size, a.fmin, a.fmax, a.voices};
    std::filesystem::create_directories(a.outdir);
    for (const auto& seg : ds.segments) {
        const auto map = hfo::tfr::scalogram(seg, cfg);
        const std::string name = "event_" + std::to_string(seg.event_id) + "_" +
                                 hfo::to_string(seg.label) + ".pgm";
        hfo::io::write_tfmap_pgm(map, (std::filesystem::path(a.outdir) / name).string());
    }
    std::cout << "wrote " << ds.segments.size() << " scalograms to " << a.outdir << "\n";
    return 0;
}

int run_train(const TrainArgs& a) {
    const hfo::LabeledDataset ds = hfo::io::read_dataset(a.data);
    const hfo::pipeline::PipelineConfig cfg = config_from(a);
    const hfo::pipeline::TrainOutcome outcome = hfo::pipeline::train(ds, cfg);
    if (!a.out.empty()) hfo::io::save_model(outcome.model, a.out);
    if (!a.report.empty()) hfo::io::write_report_csv(outcome.report, a.report);
    if (!a.roc.empty()) hfo::io::write_roc_csv(outcome.report, a.roc);
    if (!a.history.empty()) hfo::io::write_history_csv(outcome.history, a.history);
    std::cout << "model=" << a.model << " test_macro_accuracy="
              << outcome.report.macro.accuracy << " runtime_s="
              << outcome.report.runtime_s << "\n";
    return 0;
}

int run_eval(const EvalArgs& a) {
    const hfo::LabeledDataset ds = hfo::io::read_dataset(a.data);
    hfo::pipeline::TrainedModel model = hfo::io::load_model(a.model);
    model.cfg.seed = a.seed ? a.seed : model.cfg.seed;

    if (a.kfold > 0) {
        const auto outcome = hfo::pipeline::kfold(ds, model.cfg, a.kfold);
        if (!a.report.empty())
            hfo::io::write_kfold_csv(outcome.fold_reports, outcome.pooled, a.report);
        if (!a.roc.empty()) hfo::io::write_roc_csv(outcome.pooled, a.roc);
        std::cout << "kfold=" << a.kfold
                  << " pooled_macro_accuracy=" << outcome.pooled.macro.accuracy
                  << " runtime_s=" << outcome.pooled.runtime_s << "\n";
        return 0;
    }

    hfo::eval::EvaluationReport report;
    if (a.split > 0.0) {
        const std::vector<hfo::EventClass> classes = hfo::profile_classes(ds.profile);
        std::vector<int> labels;
        for (const auto& seg : ds.segments)
            labels.push_back(hfo::class_index(classes, seg.label));
        const auto split = hfo::eval::stratified_split(
            labels, a.split, hfo::rng::mix(model.cfg.seed, 1));
        hfo::LabeledDataset test;
        test.profile = ds.profile;
        test.master_seed = ds.master_seed;
        for (std::size_t i : split.test) test.segments.push_back(ds.segments[i]);
        report = hfo::pipeline::evaluate(model, test);
    } else {
        report = hfo::pipeline::evaluate(model, ds);
    }
    if (!a.report.empty()) hfo::io::write_report_csv(report, a.report);
    if (!a.roc.empty()) hfo::io::write_roc_csv(report, a.roc);
    std::cout << "macro_accuracy=" << report.macro.accuracy
              << " runtime_s=" << report.runtime_s << "\n";
    return 0;
}

int run_predict(const PredictArgs& a) {
    const hfo::LabeledDataset ds = hfo::io::read_dataset(a.data);
    const hfo::pipeline::TrainedModel model = hfo::io::load_model(a.model);
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!a.out.empty()) {
        file.open(a.out, std::ios::binary);
        if (!file) throw std::runtime_error("cannot open for writing: " + a.out);
        out = &file;
    }
    (*out) << "event_id,true_label,predicted_label";
    for (const auto& n : model.class_names) (*out) << ",score_" << n;
    (*out) << "\n";
    for (const auto& seg : ds.segments) {
        const auto pred = hfo::pipeline::predict(model, seg);
        (*out) << seg.event_id << ',' << hfo::to_string(seg.label) << ','
               << model.class_names[pred.class_index];
        for (double s : pred.per_class_score) (*out) << ',' << hfo::io::format_double(s);
        (*out) << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"HFO multi-classification pipeline (simulate / scalogram / train / eval / predict)"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Generate a labeled synthetic dataset");
    simulate->add_option("--profile", sim.profile, "sim1 (R/FR/SR) or sim2 (R/FR/R+FR)")
        ->check(CLI::IsMember({"sim1", "sim2"}));
    simulate->add_option("--per-class", sim.per_class, "events per class")->required();
    simulate->add_option("--snr-db", sim.snr_db, "noise level (default 10 dB)");
    simulate->add_flag("--clean", sim.clean, "no noise (overrides --snr-db)");
    simulate->add_option("--seed", sim.seed, "master seed");
    simulate->add_option("--fs", sim.fs, "sampling rate in Hz");
    simulate->add_option("--window", sim.window, "window length in seconds");
    simulate->add_option("--out", sim.out, "output dataset file")->required();

    ScalogramArgs sca;
    auto* scalogram = app.add_subcommand("scalogram", "Render dataset scalograms as PGM images");
    scalogram->add_option("--data", sca.data, "dataset file")->required();
    scalogram->add_option("--outdir", sca.outdir, "output directory")->required();
    scalogram->add_option("--size", sca.size, "image size S");
    scalogram->add_option("--fmin", sca.fmin, "lowest frequency (Hz)");
    scalogram->add_option("--fmax", sca.fmax, "highest frequency (Hz)");
    scalogram->add_option("--voices", sca.voices, "scales per octave");

    TrainArgs tr;
    auto* train = app.add_subcommand("train", "Train a model and report on the held-out split");
    train->add_option("--model", tr.model, "svm | cnn | hybrid")
        ->check(CLI::IsMember({"svm", "cnn", "hybrid"}));
    train->add_option("--data", tr.data, "dataset file")->required();
    train->add_option("--out", tr.out, "model output file");
    train->add_option("--report", tr.report, "metrics CSV");
    train->add_option("--roc", tr.roc, "ROC points CSV");
    train->add_option("--history", tr.history, "training history CSV (cnn/hybrid)");
    train->add_option("--coding", tr.coding, "ova | ovo | exhaustive")
        ->check(CLI::IsMember({"ova", "ovo", "exhaustive"}));
    train->add_option("--kernel", tr.kernel, "linear | rbf")
        ->check(CLI::IsMember({"linear", "rbf"}));
    train->add_option("--c", tr.c, "SVM box constraint");
    train->add_option("--gamma", tr.gamma, "RBF gamma (0 = automatic)");
    train->add_option("--tol", tr.tol, "SMO stopping tolerance");
    train->add_option("--lr", tr.lr, "learning rate");
    train->add_option("--batch", tr.batch, "batch size");
    train->add_option("--epochs", tr.epochs, "training epochs");
    train->add_option("--image-size", tr.image_size, "scalogram size S");
    train->add_option("--voices", tr.voices, "scales per octave");
    train->add_option("--split", tr.split, "train fraction");
    train->add_option("--seed", tr.seed, "seed for split/init/shuffle");

    EvalArgs ev;
    auto* evaluate = app.add_subcommand("eval", "Evaluate a stored model");
    evaluate->add_option("--model", ev.model, "model file")->required();
    evaluate->add_option("--data", ev.data, "dataset file")->required();
    evaluate->add_option("--kfold", ev.kfold, "k-fold cross-validation (retrains per fold)");
    evaluate->add_option("--split", ev.split, "evaluate on the test side of this split");
    evaluate->add_option("--report", ev.report, "metrics CSV");
    evaluate->add_option("--roc", ev.roc, "ROC points CSV");
    evaluate->add_option("--seed", ev.seed, "override the stored seed");

    PredictArgs pr;
    auto* predict = app.add_subcommand("predict", "Predict labels for a dataset");
    predict->add_option("--model", pr.model, "model file")->required();
    predict->add_option("--data", pr.data, "dataset file")->required();
    predict->add_option("--out", pr.out, "predictions CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 2;
    }

    try {
        if (simulate->parsed()) return run_simulate(sim);
        if (scalogram->parsed()) return run_scalogram(sca);
        if (train->parsed()) return run_train(tr);
        if (evaluate->parsed()) return run_eval(ev);
        if (predict->parsed()) return run_predict(pr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
