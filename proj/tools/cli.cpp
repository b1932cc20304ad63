#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "gridsentinel/analysis.hpp"
#include "gridsentinel/dataset.hpp"
#include "gridsentinel/selection.hpp"

namespace gridsentinel {

using nlohmann::json;

namespace {

struct Options {
    std::string campaign = "single";
    int outage = 6;
    std::uint64_t seed = 42;
    NoiseConfig noise;
    WindowingConfig windowing;
    double split = 0.9;
    std::string model = "all";
    double tau = kDefaultTau;
    std::string out, data, window, case_path, dump_prefault, dump_fault;
    int index = 0;
    bool no_tune = false;
};

NetworkModel load_network(const Options& o) {
    return o.case_path.empty() ? ieee14() : load_case(read_text_file(o.case_path));
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty())
        out << text << "\n";
    else
        write_text_file(path, text + "\n");
}

json phasors_json(const Phasor3& v) {
    json j = json::array();
    for (const Complex& z : v) {
        const PolarPhasor p = to_polar(z);
        j.push_back({p.mag, p.ang});
    }
    return j;
}

// "line:d:zf:type", e.g. 3:0.5:0.001:ABG
FaultSpec parse_fault_spec(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    if (parts.size() != 4) throw ValidationError("fault spec must be line:d:zf:type");
    FaultSpec f;
    try {
        f.line = std::stoi(parts[0]);
        f.d = std::stod(parts[1]);
        f.zf = std::stod(parts[2]);
    } catch (const std::exception&) {
        throw ValidationError("bad number in fault spec '" + text + "'");
    }
    f.type = parse_fault_type(parts[3]);
    return f;
}

CampaignConfig campaign_config(const Options& o) {
    CampaignConfig c;
    c.campaign = parse_campaign(o.campaign);
    c.outage = o.outage;
    c.noise = o.noise;
    c.noise.seed = o.seed;
    c.windowing = o.windowing;
    return c;
}

int cmd_gen(const Options& o, std::ostream& out) {
    const NetworkModel net = load_network(o);
    if (!o.dump_fault.empty()) {
        const FaultSpec spec = parse_fault_spec(o.dump_fault);
        const PowerFlowSolution pf = solve_nr(net);
        const FaultStudy study = run_fault_study(net, pf, std::span<const FaultSpec>(&spec, 1));
        json buses = json::object();
        for (int b = 0; b < net.bus_count(); ++b) buses[std::to_string(b)] = phasors_json(study.solution.voltage(b));
        const Phasor3 i = fault_phase_currents(study.model, study.solution, study.fault_nodes.front());
        json doc = {{"line", spec.line},
                    {"d", spec.d},
                    {"zf", spec.zf},
                    {"ftype", to_string(spec.type)},
                    {"bus_voltages", buses},
                    {"fault_point_voltage", phasors_json(study.solution.voltage(study.fault_nodes.front()))},
                    {"fault_current", phasors_json(i)}};
        emit(doc.dump(2), o.out, out);
        return 0;
    }
    if (o.out.empty() && o.window.empty()) throw ValidationError("gen needs --out and/or --window");
    const CampaignConfig cfg = campaign_config(o);
    if (!o.window.empty()) {
        // One scenario of the campaign, exactly as it appears in the dataset.
        cfg.windowing.validate();
        cfg.noise.validate();
        const std::vector<EventScenario> scenarios = enumerate_campaign(net, cfg);
        if (o.index < 0 || o.index >= static_cast<int>(scenarios.size()))
            throw ValidationError("--index out of range (campaign has " + std::to_string(scenarios.size()) + " scenarios)");
        const EventScenario& s = scenarios[o.index];
        const GridContext ctx = GridContext::make(net, s.outage);
        write_text_file(o.window, window_to_json(synthesize_window(ctx, s, cfg.windowing, cfg.noise,
                                                                   scenario_seed(cfg.noise.seed, o.index))));
    }
    if (!o.out.empty()) {
        const Dataset d = generate_dataset(net, cfg);
        write_csv(d, o.out);
        out << json({{"out", o.out}, {"samples", d.size()}, {"features", d.feature_count()},
                     {"n_fault", d.meta.n_fault}, {"n_attack", d.meta.n_attack}, {"n_normal", d.meta.n_normal},
                     {"n_simultaneous", d.meta.n_simultaneous}, {"schema_hash", schema_hash(d.schema)}})
                   .dump()
            << "\n";
    }
    return 0;
}

Dataset require_data(const Options& o) {
    if (o.data.empty()) throw ValidationError("--data is required");
    Dataset d = read_csv(o.data);
    validate_dataset(d);
    return d;
}

json split_meta(const Dataset& d, const Options& o) {
    return {{"seed", o.seed},
            {"train_fraction", o.split},
            {"campaign", to_string(d.meta.campaign)},
            {"dataset_seed", d.meta.master_seed}};
}

int cmd_train(const Options& o, std::ostream& out) {
    if (o.out.empty()) throw ValidationError("--out is required");
    if (o.model == "all") throw ValidationError("train takes a single --model (dt|svm|knn|ann)");
    const Dataset d = require_data(o);
    const ModelKind kind = parse_model_kind(o.model);
    const Matrix raw = feature_matrix(d);
    const LabelVector y = d.labels();
    const SplitIndices s = split_indices(y, o.split, o.seed, true);
    const Matrix raw_train = take_rows(raw, s.train);
    const LabelVector y_train = take(y, s.train);
    const std::vector<ModelConfig> grid = default_grid(kind, o.seed);
    const ModelConfig cfg = o.no_tune ? grid.front() : grid_search(raw_train, y_train, grid, o.seed).best;
    const TrainedModel m = train_model(raw_train, y_train, schema_hash(d.schema), cfg, split_meta(d, o));
    save_model(m, o.out);
    out << json({{"model", o.out}, {"kind", to_string(kind)}, {"hyperparameters", config_to_json(cfg)},
                 {"train_size", s.train.size()}})
               .dump()
        << "\n";
    return 0;
}

int cmd_eval(const Options& o, std::ostream& out, bool seed_given, bool split_given) {
    if (o.model.empty() || o.model == "all") throw ValidationError("--model <path> is required");
    const TrainedModel m = load_model(o.model);
    const Dataset d = require_data(o);
    // Default to the split the model was trained on, so eval scores held-out rows only.
    const json& meta = m.train_meta;
    const std::uint64_t seed = seed_given ? o.seed : meta.value("seed", o.seed);
    const double frac = split_given ? o.split : meta.value("train_fraction", o.split);
    const Matrix raw = feature_matrix(d);
    const LabelVector y = d.labels();
    std::vector<std::size_t> rows;
    if (frac <= 0.0) {
        for (std::size_t i = 0; i < y.size(); ++i) rows.push_back(i);
    } else {
        rows = split_indices(y, frac, seed, true).validation;
    }
    const EvalReport r = evaluate(take(y, rows), m.predict(take_rows(raw, rows), schema_hash(d.schema)));
    emit(report_to_json(r).dump(2), o.out, out);
    return 0;
}

int cmd_select(const Options& o, std::ostream& out) {
    const Dataset d = require_data(o);
    SelectionOptions so;
    so.seed = o.seed;
    so.train_fraction = o.split;
    so.tune = !o.no_tune;
    if (o.model != "all") so.kinds = {parse_model_kind(o.model)};
    const SelectionResult r = run_selection(d, so);
    const json cmp = comparison_to_json(r);
    if (!o.out.empty()) {
        save_model(*r.outcomes[r.best].model, o.out);
        write_text_file(o.out + ".comparison.json", cmp.dump(2) + "\n");
    }
    out << cmp.dump(2) << "\n";
    return 0;
}

int cmd_analyze(const Options& o, std::ostream& out) {
    if (!o.dump_prefault.empty()) {
        const NetworkModel net = load_network(o);
        const PowerFlowSolution pf = solve_nr(net);
        json doc = json::object();
        for (int b = 0; b < net.bus_count(); ++b) {
            const PolarPhasor p = to_polar(pf.v[b]);
            doc[std::to_string(b)] = {{"mag", p.mag}, {"ang", p.ang}};
        }
        write_text_file(o.dump_prefault, doc.dump(2) + "\n");
        if (o.window.empty()) return 0;
    }
    if (o.window.empty()) throw ValidationError("--window is required");
    const EventWindow w = window_from_json(read_text_file(o.window));
    if (o.model.empty() || o.model == "all") {
        // Localizer only.
        const DeviationSummary s = deviation_localize(w, o.tau);
        json ranked = json::array();
        for (const BusDeviation& b : s.ranked) ranked.push_back({{"bus", b.bus}, {"max_dev", b.max_dev}});
        emit(json({{"tau", s.tau}, {"per_bus", ranked}, {"exceed", s.exceed}}).dump(2), o.out, out);
        return 0;
    }
    const std::string text = read_text_file(o.model);
    const TrainedModel m = model_from_json(text);
    emit(verdict_to_json(analyze(m, w, o.tau, model_id(m.kind(), text))).dump(2), o.out, out);
    return 0;
}

std::string render_report(const json& doc) {
    if (doc.contains("table")) {
        std::vector<ComparisonRow> rows;
        for (const json& r : doc.at("table"))
            rows.push_back({parse_model_kind(r.at("model").get<std::string>()), r.at("accuracy").get<double>(),
                            r.at("precision").get<double>(), r.at("recall").get<double>(), r.at("f1").get<double>()});
        std::string md = comparison_to_markdown(rows, "Model comparison");
        md += "\nSelected: " + doc.value("best", std::string("?")) + " (train " +
              std::to_string(doc.value("train_size", 0)) + ", validation " +
              std::to_string(doc.value("validation_size", 0)) + ")\n";
        return md;
    }
    const EvalReport r = report_from_json(doc);
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "## Evaluation\n\n| Metric | Value |\n|---|---|\n| Samples | %zu |\n| Accuracy | %.2f |\n"
                  "| Precision | %.2f |\n| Recall | %.2f |\n| F1 | %.2f |\n| F1 (harmonic) | %.2f |\n",
                  r.count, r.accuracy, r.precision, r.recall, r.f1, r.f1_harmonic);
    std::string md = buf;
    md += "\n| Class | Support | Precision | Recall | F1 |\n|---|---|---|---|---|\n";
    for (const ClassMetrics& c : r.per_class) {
        std::snprintf(buf, sizeof buf, "| %d | %ld | %.2f | %.2f | %.2f |\n", c.label, static_cast<long>(c.support),
                      c.precision, c.recall, c.f1);
        md += buf;
    }
    return md;
}

int cmd_report(const Options& o, std::ostream& out) {
    if (o.data.empty()) throw ValidationError("--data <report.json> is required");
    json doc;
    try {
        doc = json::parse(read_text_file(o.data));
    } catch (const json::exception& e) {
        throw ValidationError(std::string("report: ") + e.what());
    }
    std::string md = render_report(doc);
    if (!md.empty() && md.back() == '\n') md.pop_back();
    emit(md, o.out, out);
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Grid event and cyber-attack classification toolkit", "gridsentinel"};
    app.require_subcommand(1, 1);
    Options o;

    auto* gen = app.add_subcommand("gen", "generate a campaign dataset (CSV + .meta.json)");
    auto* train = app.add_subcommand("train", "tune and train one classifier");
    auto* eval = app.add_subcommand("eval", "evaluate a model on held-out rows");
    auto* select = app.add_subcommand("select", "tune, train and compare all classifiers");
    auto* analyze_cmd = app.add_subcommand("analyze", "classify an event window into a verdict");
    auto* report = app.add_subcommand("report", "render a report JSON as Markdown");

    for (auto* c : {gen, analyze_cmd}) c->add_option("--case", o.case_path, "case JSON (default IEEE 14-bus)");
    gen->add_option("--campaign", o.campaign, "single|n1|simultaneous")
        ->check(CLI::IsMember({"single", "n1", "simultaneous"}));
    gen->add_option("--outage", o.outage, "line out of service for the n1 campaign");
    gen->add_option("--noise-mag", o.noise.sigma_mag, "relative magnitude noise sigma");
    gen->add_option("--noise-ang", o.noise.sigma_ang, "angle noise sigma, degrees");
    gen->add_option("--noise-freq", o.noise.sigma_freq, "frequency noise sigma, Hz");
    gen->add_option("--frames-pre", o.windowing.n_pre, "frames before the trip");
    gen->add_option("--frames-fault", o.windowing.n_fault, "frames from the trip on");
    gen->add_option("--window", o.window, "also write the window of scenario --index as JSON");
    gen->add_option("--index", o.index, "scenario index for --window");
    gen->add_option("--dump-fault", o.dump_fault, "solve one fault line:d:zf:type and write it as JSON");

    CLI::Option* seed_opt = nullptr;
    CLI::Option* split_opt = nullptr;
    for (auto* c : {gen, train, eval, select}) {
        auto* so = c->add_option("--seed", o.seed, "master seed");
        if (c == eval) seed_opt = so;
    }
    for (auto* c : {train, eval, select}) {
        c->add_option("--data", o.data, "dataset CSV")->required();
        auto* sp = c->add_option("--split", o.split, "training fraction");
        if (c == eval) split_opt = sp;
    }
    for (auto* c : {train, select}) c->add_flag("--no-tune", o.no_tune, "skip grid search, use the first grid entry");
    train->add_option("--model", o.model, "dt|svm|knn|ann")->required();
    select->add_option("--model", o.model, "dt|svm|knn|ann|all");
    eval->add_option("--model", o.model, "model JSON")->required();
    analyze_cmd->add_option("--model", o.model, "model JSON (omit for the localizer only)");
    analyze_cmd->add_option("--window", o.window, "window JSON");
    analyze_cmd->add_option("--tau", o.tau, "deviation threshold, p.u.");
    analyze_cmd->add_option("--dump-prefault", o.dump_prefault, "write the power-flow solution as JSON");
    report->add_option("--data", o.data, "comparison or evaluation JSON")->required();
    for (auto* c : {gen, train, eval, select, analyze_cmd, report}) c->add_option("--out", o.out, "output path");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        out << app.help() << (app.get_subcommands().empty() ? "" : app.get_subcommands().front()->help());
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return 1;
    }

    try {
        if (gen->parsed()) return cmd_gen(o, out);
        if (train->parsed()) return cmd_train(o, out);
        if (eval->parsed()) return cmd_eval(o, out, seed_opt->count() > 0, split_opt->count() > 0);
        if (select->parsed()) return cmd_select(o, out);
        if (analyze_cmd->parsed()) return cmd_analyze(o, out);
        if (report->parsed()) return cmd_report(o, out);
    } catch (const IoError& e) {
        err << "io error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace gridsentinel
