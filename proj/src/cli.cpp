#include "sogppa/cli.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "sogppa/estimators.hpp"
#include "sogppa/generate.hpp"
#include "sogppa/golden.hpp"
#include "sogppa/kernels.hpp"
#include "sogppa/model_io.hpp"
#include "sogppa/rng.hpp"

namespace sogppa {

namespace {

namespace fs = std::filesystem;

struct GlobalOpts {
    std::string lib_path = "fixtures/techlib.lib";
    std::string out_dir = ".";
    uint64_t seed = 0;
    int jobs = 1;
    std::string kernels = "auto";
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Library load_library(const GlobalOpts& g) {
    return parse_liberty(read_file(g.lib_path));
}

void apply_kernel_choice(const std::string& choice) {
    if (choice == "auto") {
        force_kernels(nullptr);
    } else if (choice == "scalar") {
        force_kernels(&scalar_kernels());
    } else {
        throw std::runtime_error("unknown --kernels value '" + choice + "'");
    }
}

// deterministic map over manifest entries; output order is entry order
// regardless of how many worker threads ran
template <typename F>
void parallel_for(int n, int jobs, F&& body) {
    if (jobs <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> workers;
    std::exception_ptr error;
    std::mutex error_mu;
    for (int w = 0; w < std::min(jobs, n); ++w)
        workers.emplace_back([&] {
            for (int i; (i = next.fetch_add(1)) < n;) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mu);
                    if (!error) error = std::current_exception();
                }
            }
        });
    for (auto& w : workers) w.join();
    if (error) std::rethrow_exception(error);
}

int cmd_gen(const GlobalOpts& g, int count, int max_stages, int width_min, int width_max,
            int max_ops, const std::vector<double>& clock_set) {
    Manifest manifest;
    manifest.library_path = g.lib_path;

    Rng sampler(derive_seed(g.seed, 0xC0F1));
    for (int i = 0; i < count; ++i) {
        GenParams p;
        p.seed = derive_seed(g.seed, 0x1000 + static_cast<uint64_t>(i));
        p.n_stages = static_cast<int>(sampler.range(1, max_stages));
        p.width_min = width_min;
        p.width_max = static_cast<int>(sampler.range(width_min, width_max));
        p.ops_per_stage = static_cast<int>(sampler.range(2, max_ops));
        p.clock_set = {clock_set[sampler.below(clock_set.size())]};
        WordDesign d = generate_design(p);

        char name[32];
        std::snprintf(name, sizeof name, "design_%04d", i);
        d.name = name;
        const std::string rel = std::string("designs/") + name + ".json";
        write_file((fs::path(g.out_dir) / rel).string(), print_netlist(d));

        ManifestEntry entry;
        entry.design_path = rel;
        entry.name = name;
        entry.clock_period_ns = d.clock_period_ns;
        entry.seed = p.seed;
        entry.split = derive_seed(g.seed, 0x5917 + static_cast<uint64_t>(i)) % 3 == 2
                          ? "test"
                          : "train";
        manifest.entries.push_back(std::move(entry));
    }
    save_manifest(manifest, (fs::path(g.out_dir) / "manifest.json").string());
    std::cerr << "gen: wrote " << count << " designs to " << g.out_dir << "\n";
    return 0;
}

int cmd_golden(const GlobalOpts& g, const std::string& manifest_path, int64_t mc_cycles) {
    Manifest manifest = load_manifest(manifest_path);
    const Library lib = load_library(g);
    const int n = static_cast<int>(manifest.entries.size());
    parallel_for(n, g.jobs, [&](int i) {
        auto& entry = manifest.entries[i];
        PowerConfig pc;
        pc.vdd_V = lib.nom_voltage;
        pc.mc_cycles = mc_cycles;
        pc.seed = derive_seed(entry.seed, 0x90D1);
        entry.labels = golden_label(load_design(manifest, entry), lib, pc);
    });
    save_manifest(manifest, manifest_path);
    std::cerr << "golden: labeled " << n << " designs\n";
    return 0;
}

int cmd_lower(const GlobalOpts& g, const std::string& design_path, bool with_activity) {
    const WordDesign d = parse_netlist(read_file(design_path));
    const SogGraph graph = lower(d);
    std::string doc;
    if (with_activity) {
        const ActivityMap act = propagate(graph);
        doc = print_sog(graph, &act.p, &act.alpha);
    } else {
        doc = print_sog(graph);
    }
    const std::string out =
        (fs::path(g.out_dir) / (fs::path(design_path).stem().string() + ".sog.json"))
            .string();
    write_file(out, doc);
    std::cerr << "lower: " << graph.nodes.size() << " nodes -> " << out << "\n";
    return 0;
}

int cmd_sta(const GlobalOpts& g, const std::string& design_path) {
    const WordDesign d = parse_netlist(read_file(design_path));
    const Library lib = load_library(g);
    const SogGraph graph = lower(d);
    const AnnotatedGraph ann = annotate(graph, lib, TimingConfig{});
    const TimingResult timing = sta(ann, d.clock_period_ns);
    const auto paths = worst_paths(timing, ann);
    const std::string out =
        (fs::path(g.out_dir) / (fs::path(design_path).stem().string() + ".timing.json"))
            .string();
    write_file(out, print_timing_report(timing, paths, ann));
    std::cerr << "sta: wns_r " << timing.wns_r << " tns_r " << timing.tns_r << " -> " << out
              << "\n";
    return 0;
}

int cmd_train(const GlobalOpts& g, const std::string& manifest_path, const TrainParams& tp) {
    const Manifest manifest = load_manifest(manifest_path);
    const Library lib = load_library(g);
    std::cerr << "train: extracting features\n";
    const TrainingTables tables = extract_training_set(manifest, lib);
    int64_t dropped = 0;
    for (const auto& r : tables.designs) dropped += r.dropped_paths;
    std::cerr << "train: " << tables.designs.size() << " designs, "
              << tables.path_table.size() << " matched paths (" << dropped << " dropped)\n";
    TrainParams params = tp;
    params.seed = g.seed;
    params.n_jobs = g.jobs;
    ModelBundle bundle = train_all(tables, params);
    bundle.library_fingerprint = library_fingerprint(lib);
    const std::string out = (fs::path(g.out_dir) / "bundle.json").string();
    save_bundle(bundle, out);
    std::cerr << "train: bundle -> " << out << "\n";
    return 0;
}

int cmd_predict(const GlobalOpts& g, const std::string& design_path,
                const std::string& bundle_path) {
    if (!fs::exists(bundle_path)) throw std::runtime_error("bundle not found: " + bundle_path);
    const ModelBundle bundle = load_bundle(bundle_path);
    const Library lib = load_library(g);
    const WordDesign d = parse_netlist(read_file(design_path));
    const PpaPrediction p = predict_ppa(d, lib, bundle);

    std::ostringstream doc;
    doc << "{\n"
        << "  \"design\": \"" << p.design << "\",\n"
        << "  \"wns_ns\": " << fmt(p.wns_ns) << ",\n"
        << "  \"tns_ns\": " << fmt(p.tns_ns) << ",\n"
        << "  \"power_uW\": " << fmt(p.power_uW) << ",\n"
        << "  \"area\": {\"seq\": " << fmt(p.area_seq) << ", \"comb\": " << fmt(p.area_comb)
        << ", \"total\": " << fmt(p.area_total) << "},\n"
        << "  \"intermediates\": {\"wns_r\": " << fmt(p.wns_r)
        << ", \"tns_r\": " << fmt(p.tns_r) << "}\n"
        << "}\n";
    const std::string out =
        (fs::path(g.out_dir) / (fs::path(design_path).stem().string() + ".prediction.json"))
            .string();
    write_file(out, doc.str());
    std::cerr << "predict: " << p.design << " -> " << out << "\n";
    return 0;
}

int cmd_evaluate(const GlobalOpts& g, const std::string& manifest_path,
                 const std::string& bundle_path, const std::string& split) {
    if (!fs::exists(bundle_path)) throw std::runtime_error("bundle not found: " + bundle_path);
    const ModelBundle bundle = load_bundle(bundle_path);
    const Manifest manifest = load_manifest(manifest_path);
    const Library lib = load_library(g);

    std::vector<int> picked;
    for (int i = 0; i < static_cast<int>(manifest.entries.size()); ++i) {
        const auto& e = manifest.entries[i];
        if (e.split != split) continue;
        if (!e.labels) throw std::runtime_error("design " + e.name + " has no golden labels");
        picked.push_back(i);
    }
    if (picked.size() < 2) throw std::runtime_error("need >= 2 labeled designs in split");

    std::vector<PpaPrediction> preds(picked.size());
    std::vector<GoldenLabels> labels(picked.size());
    parallel_for(static_cast<int>(picked.size()), g.jobs, [&](int k) {
        const auto& e = manifest.entries[picked[k]];
        preds[k] = predict_ppa(load_design(manifest, e), lib, bundle);
        labels[k] = *e.labels;
    });

    const Evaluation ev = evaluate(preds, labels);
    auto metrics_row = [](const char* target, const TargetMetrics& m) {
        std::ostringstream row;
        row << target << ',' << (m.r_defined ? fmt(m.r) : "NA") << ',' << fmt(m.mape_percent)
            << ',' << fmt(m.rrse) << ',' << m.n_used << ',' << m.n_excluded << '\n';
        return row.str();
    };
    std::string metrics_csv = "target,r,mape_percent,rrse,n_used,n_excluded\n";
    metrics_csv += metrics_row("wns", ev.wns);
    metrics_csv += metrics_row("tns", ev.tns);
    metrics_csv += metrics_row("power", ev.power);
    metrics_csv += metrics_row("area", ev.area);
    write_file((fs::path(g.out_dir) / "metrics.csv").string(), metrics_csv);

    std::string scatter_csv = "design,target,truth,prediction\n";
    for (size_t k = 0; k < picked.size(); ++k) {
        const auto& name = manifest.entries[picked[k]].name;
        const auto& t = labels[k];
        const auto& p = preds[k];
        scatter_csv += name + ",wns," + fmt(t.wns_ns) + ',' + fmt(p.wns_ns) + '\n';
        scatter_csv += name + ",tns," + fmt(t.tns_ns) + ',' + fmt(p.tns_ns) + '\n';
        scatter_csv += name + ",power," + fmt(t.power_uW) + ',' + fmt(p.power_uW) + '\n';
        scatter_csv +=
            name + ",area," + fmt(t.area_comb + t.area_seq) + ',' + fmt(p.area_total) + '\n';
    }
    write_file((fs::path(g.out_dir) / "scatter.csv").string(), scatter_csv);

    std::cerr << "evaluate: " << picked.size() << " designs; area R "
              << (ev.area.r_defined ? fmt(ev.area.r) : "NA") << ", power R "
              << (ev.power.r_defined ? fmt(ev.power.r) : "NA") << "\n";
    return 0;
}

} // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"pre-synthesis PPA estimation toolkit"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--lib", g.lib_path, "liberty library path");
    app.add_option("--out", g.out_dir, "output directory");
    app.add_option("--seed", g.seed, "master seed");
    app.add_option("--jobs", g.jobs, "worker threads for per-design work");
    app.add_option("--kernels", g.kernels, "math kernel variant: auto|scalar");

    auto* gen = app.add_subcommand("gen", "generate a design corpus + manifest");
    int count = 150, max_stages = 6, width_min = 1, width_max = 12, max_ops = 16;
    std::vector<double> clock_set = {0.3, 0.45, 0.6, 0.8};
    gen->add_option("--count", count, "number of designs");
    gen->add_option("--stages", max_stages, "max pipeline stages");
    gen->add_option("--width-min", width_min, "min signal width");
    gen->add_option("--width-max", width_max, "max signal width");
    gen->add_option("--ops-per-stage", max_ops, "max operators per stage");
    gen->add_option("--clock-set", clock_set, "clock periods (ns) sampled per design");

    std::string manifest_path, design_path, bundle_path, split = "test";
    int64_t mc_cycles = 1024;
    bool with_activity = false;

    auto* golden = app.add_subcommand("golden", "attach reference-flow labels to a manifest");
    golden->add_option("--manifest", manifest_path, "manifest path")->required();
    golden->add_option("--mc-cycles", mc_cycles, "Monte-Carlo cycles for power");

    auto* lower_cmd = app.add_subcommand("lower", "bit-blast a design to its operator graph");
    lower_cmd->add_option("--design", design_path, "design netlist path")->required();
    lower_cmd->add_flag("--activity", with_activity, "embed propagated switching activity");

    auto* sta_cmd = app.add_subcommand("sta", "static timing analysis report");
    sta_cmd->add_option("--design", design_path, "design netlist path")->required();

    auto* train = app.add_subcommand("train", "train the full model bundle");
    TrainParams tp;
    train->add_option("--manifest", manifest_path, "manifest path")->required();
    train->add_option("--forest-trees", tp.forest.n_estimators, "path forest size");
    train->add_option("--forest-depth", tp.forest.max_depth, "path forest max depth");
    train->add_option("--gbm-trees", tp.gbm.n_estimators, "boosting stages");
    train->add_option("--gbm-depth", tp.gbm.max_depth, "boosted tree depth");
    train->add_option("--gbm-lr", tp.gbm.learning_rate, "boosting learning rate");
    train->add_option("--gcn-epochs", tp.gcn.epochs, "GCN training epochs");
    train->add_option("--gcn-lr", tp.gcn.learning_rate, "GCN learning rate");

    auto* predict = app.add_subcommand("predict", "predict PPA for one design");
    predict->add_option("--design", design_path, "design netlist path")->required();
    predict->add_option("--bundle", bundle_path, "trained model bundle")->required();

    auto* eval = app.add_subcommand("evaluate", "score a bundle against golden labels");
    eval->add_option("--manifest", manifest_path, "manifest path")->required();
    eval->add_option("--bundle", bundle_path, "trained model bundle")->required();
    eval->add_option("--split", split, "manifest split to score (train|test)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        apply_kernel_choice(g.kernels);
        if (gen->parsed())
            return cmd_gen(g, count, max_stages, width_min, width_max, max_ops, clock_set);
        if (golden->parsed()) return cmd_golden(g, manifest_path, mc_cycles);
        if (lower_cmd->parsed()) return cmd_lower(g, design_path, with_activity);
        if (sta_cmd->parsed()) return cmd_sta(g, design_path);
        if (train->parsed()) return cmd_train(g, manifest_path, tp);
        if (predict->parsed()) return cmd_predict(g, design_path, bundle_path);
        if (eval->parsed()) return cmd_evaluate(g, manifest_path, bundle_path, split);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args);
}

} // namespace sogppa
