// spn: command-line front end for the SPN, density and modularity pipelines.
//
// Exit codes: 0 ok, 2 invalid input, 3 I/O failure, 4 degenerate statistics
// under --strict.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "spn/density.hpp"
#include "spn/errors.hpp"
#include "spn/graph.hpp"
#include "spn/io.hpp"
#include "spn/modularity.hpp"
#include "spn/report.hpp"
#include "spn/spn_builder.hpp"

namespace fs = std::filesystem;
using namespace spn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitIo = 3;
constexpr int kExitDegenerate = 4;

// Raised when --strict turns a degenerate-statistics warning into a failure.
struct StrictDegenerate : Error {
    using Error::Error;
};

struct Settings {
    std::string manifest;
    double base_rate = 0.05;
    std::string correction = "fdr";
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    std::string format = "json";
    bool strict = false;
    bool absolute = false;
    bool standardize = false;
    std::string condition;
    std::string matrix;
    std::optional<double> threshold;
    std::string metric = "global_efficiency";
    std::vector<std::size_t> grid;
    std::size_t nodes = 112;
    std::size_t edges = 600;
    std::size_t replicates = 100;
    std::string topology = "random";
};

// Everything a run writes goes through here, so the log lists it.
class Run {
public:
    Run(std::string command, const Settings& s, const CLI::App& app) : command_(std::move(command)), s_(s) {
        log_ << "command: " << command_ << "\n";
        std::istringstream config(app.config_to_str(true, false));
        for (std::string line; std::getline(config, line);)
            if (!line.empty() && line.front() != '[') log_ << "  " << line << "\n";
    }

    fs::path out(const std::string& name) const { return fs::path(s_.out_dir) / name; }

    void write(const std::string& name, const std::string& text) {
        io::write_text(out(name), text);
        log_ << "wrote: " << name << "\n";
    }

    void note(const std::string& key, const std::string& value) { log_ << "effective: " << key << "=" << value << "\n"; }

    void warn(const std::string& what) {
        log_ << "warning: " << what << "\n";
        std::cerr << "warning: " << what << "\n";
        if (s_.strict) throw StrictDegenerate(what + " (--strict)");
    }

    void finish() {
        log_ << "status: ok\n";
        io::write_text(out("run.log"), log_.str());
    }

    void fail(const std::string& what) {
        log_ << "status: error: " << what << "\n";
        std::error_code ec;
        if (fs::is_directory(s_.out_dir, ec)) {
            std::ofstream f(out("run.log"), std::ios::binary | std::ios::trunc);
            f << log_.str();
        }
    }

private:
    std::string command_;
    const Settings& s_;
    std::ostringstream log_;
};

Correction parse_correction(const std::string& name) {
    if (name == "fdr") return Correction::fdr;
    if (name == "none") return Correction::none;
    throw ValidationError("unknown correction '" + name + "' (expected fdr or none)");
}

std::string extension(io::GraphFormat f) {
    switch (f) {
        case io::GraphFormat::dot: return ".dot";
        case io::GraphFormat::json: return ".json";
        case io::GraphFormat::csv: return ".csv";
    }
    return "";
}

std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

// Manifest options fill in anything not given on the command line.
struct Study {
    io::Manifest manifest;
    StudyDataset data;
    InferenceOptions inference;
    io::NegativePolicy negatives = io::NegativePolicy::reject;
    bool standardize = false;
    std::vector<std::size_t> grid;
};

Study load_study(Run& run, const Settings& s, const CLI::App& app) {
    if (s.manifest.empty()) throw ValidationError("--manifest is required");
    Study st;
    st.manifest = io::load_manifest(s.manifest);
    const auto& o = st.manifest.options;
    const auto given = [&](const char* flag) {
        const CLI::Option* opt = app.get_option_no_throw(flag);
        return opt != nullptr && opt->count() > 0;
    };
    st.inference.base_rate = given("--base-rate") ? s.base_rate : o.base_rate;
    st.inference.correction = given("--correction") ? parse_correction(s.correction) : o.correction;
    st.negatives = given("--abs") ? io::NegativePolicy::absolute : o.negatives;
    st.standardize = given("--standardize") || o.standardize;
    st.grid = given("--grid") ? s.grid : o.density_grid;
    if (!(st.inference.base_rate > 0.0 && st.inference.base_rate < 1.0))
        throw ValidationError("base rate must lie in (0, 1)");
    st.data = io::load_dataset(st.manifest);

    run.note("base_rate", io::format_number(st.inference.base_rate));
    run.note("correction", st.inference.correction == Correction::fdr ? "fdr" : "none");
    run.note("negatives", st.negatives == io::NegativePolicy::absolute ? "absolute" : "reject");
    run.note("standardize", st.standardize ? "true" : "false");
    std::string grid;
    for (std::size_t k : st.grid) grid += (grid.empty() ? "" : ",") + std::to_string(k);
    run.note("density_grid", grid.empty() ? "default" : grid);
    run.note("design", std::to_string(st.data.subjects()) + " subjects x " + std::to_string(st.data.conditions()) +
                           " conditions x " + std::to_string(st.data.node_count()) + " nodes");
    return st;
}

std::size_t condition_index(const StudyDataset& d, const std::string& label) {
    for (std::size_t c = 0; c < d.conditions(); ++c)
        if (d.condition_labels[c] == label) return c;
    throw ValidationError("unknown condition '" + label + "'");
}

void check_degenerate(Run& run, const SpnResult& r, const std::string& what) {
    if (r.degenerate_fits > 0) run.warn(what + ": " + std::to_string(r.degenerate_fits) + " degenerate fit(s)");
}

void export_spn(Run& run, const Settings& s, const SpnResult& r, const std::string& stem) {
    const io::GraphFormat f = io::parse_format(s.format);
    run.write(stem + extension(f), io::render_graph(r.network, f));
    run.write(stem + "_stats.json", dump(spn_to_json(r)));
}

void cmd_mean(Run& run, const Settings& s, const CLI::App& app) {
    const Study st = load_study(run, s, app);
    std::vector<std::size_t> conditions;
    if (!s.condition.empty()) {
        conditions.push_back(condition_index(st.data, s.condition));
    } else {
        for (std::size_t c = 0; c < st.data.conditions(); ++c) conditions.push_back(c);
    }
    for (std::size_t c : conditions) {
        const SpnResult r = mean_spn(st.data, c, st.inference);
        check_degenerate(run, r, "mean SPN " + st.data.condition_labels[c]);
        export_spn(run, s, r, "mean_" + st.data.condition_labels[c]);
        std::cout << "mean SPN " << st.data.condition_labels[c] << ": " << r.network.edge_count() << " edges\n";
    }
}

void cmd_diff(Run& run, const Settings& s, const CLI::App& app) {
    const Study st = load_study(run, s, app);
    const DifferentialSpn r = differential_spn(st.data, st.inference);
    check_degenerate(run, r.plus, "differential SPN");
    export_spn(run, s, r.plus, "spn_plus");
    export_spn(run, s, r.minus, "spn_minus");
    std::cout << "SPN+: " << r.plus.network.edge_count() << " edges, SPN-: " << r.minus.network.edge_count()
              << " edges, unsigned significant: " << r.plus.unsigned_significant.size() << "\n";
}

void cmd_node_diff(Run& run, const Settings& s, const CLI::App& app) {
    const Study st = load_study(run, s, app);
    const NodeSignalDataset signals = io::load_node_signals(st.manifest);
    const DifferentialSpn r = node_differential_spn(signals, st.inference);
    check_degenerate(run, r.plus, "node differential SPN");
    nlohmann::ordered_json doc;
    doc["plus"] = spn_to_json(r.plus);
    doc["minus"] = spn_to_json(r.minus);
    run.write("node_diff.json", dump(doc));
    std::cout << "flagged nodes: " << r.plus.flagged_nodes.size() << " rising, " << r.minus.flagged_nodes.size()
              << " falling\n";
}

WeightedGraph matrix_graph(const Settings& s) {
    if (s.matrix.empty()) throw ValidationError("--matrix is required");
    const SquareMatrix m = io::read_matrix_csv(s.matrix);
    WeightedGraph g = io::association_graph(m, default_nodes(m.size()),
                                            s.absolute ? io::NegativePolicy::absolute : io::NegativePolicy::reject);
    return s.standardize ? io::standardize_weights(g) : g;
}

nlohmann::ordered_json number_or_inf(double v) {
    if (std::isinf(v)) return "inf";
    return v;
}

void cmd_metrics(Run& run, const Settings& s) {
    const WeightedGraph g = matrix_graph(s);
    nlohmann::ordered_json doc;
    doc["nodes"] = g.node_count();
    doc["weighted_density"] = weighted_density(g);
    doc["weighted_efficiency"] = weighted_efficiency(g);
    doc["spread_condition"] = spread_condition_holds(g);
    if (s.threshold) {
        const BinaryGraph b = threshold(g.weights(), *s.threshold, g.nodes());
        nlohmann::ordered_json bin;
        bin["threshold"] = number_or_inf(*s.threshold);
        bin["edge_count"] = b.edge_count();
        bin["global_efficiency"] = global_efficiency(b);
        bin["local_efficiency"] = local_efficiency(b);
        if (b.edge_count() > 0) {
            const Partition p = greedy_modularity(b);
            bin["modules"] = p.module_count;
            bin["modularity"] = p.q;
        }
        doc["binary"] = std::move(bin);
        if (s.format != "json") {
            const io::GraphFormat f = io::parse_format(s.format);
            run.write("thresholded" + extension(f), io::render_graph(b, f));
        }
    }
    const std::string text = dump(doc);
    run.write("metrics.json", text);
    std::cout << text;
}

nlohmann::ordered_json profile_json(const DensityProfile& p) {
    nlohmann::ordered_json j;
    j["densities"] = p.densities;
    j["values"] = p.values;
    j["weights"] = p.weights;
    j["integrated"] = p.integrated;
    return j;
}

void cmd_density_profile(Run& run, const Settings& s, const CLI::App& app) {
    const Metric metric = parse_metric(s.metric);
    const MetricFn fn = metric_function(metric);
    nlohmann::ordered_json doc;
    doc["metric"] = std::string(to_string(metric));
    if (!s.matrix.empty()) {
        const DensityProfile p = density_integrated_metric(matrix_graph(s), fn, s.grid);
        doc["profile"] = profile_json(p);
        std::cout << "integrated " << s.metric << ": " << io::format_number(p.integrated) << "\n";
    } else {
        const Study st = load_study(run, s, app);
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (std::size_t subj = 0; subj < st.data.subjects(); ++subj)
            for (std::size_t c = 0; c < st.data.conditions(); ++c) {
                WeightedGraph g = io::association_graph(st.data.at(subj, c), st.data.nodes, st.negatives);
                if (st.standardize) g = io::standardize_weights(g);
                nlohmann::ordered_json row;
                row["subject"] = st.data.subject_ids[subj];
                row["condition"] = st.data.condition_labels[c];
                row["profile"] = profile_json(density_integrated_metric(g, fn, st.grid));
                rows.push_back(std::move(row));
            }
        doc["profiles"] = std::move(rows);
        std::cout << "profiles: " << doc["profiles"].size() << "\n";
    }
    run.write("density_profile.json", dump(doc));
}

std::string sweep_csv(const SweepResult& r) {
    std::ostringstream out;
    write_sweep_csv(out, r);
    return out.str();
}

void cmd_simulate_rewire(Run& run, const Settings& s) {
    std::vector<std::size_t> grid = s.grid;
    if (grid.empty())
        for (std::size_t r = 0; r <= 500; r += 50) grid.push_back(r);
    const SweepResult r = randomness_sweep(s.nodes, s.edges, grid, s.replicates, s.seed);
    const std::string csv = sweep_csv(r);
    run.write("rewire_sweep.csv", csv);
    std::cout << csv;
}

void cmd_simulate_edges(Run& run, const Settings& s) {
    Topology t;
    if (s.topology == "lattice") t = Topology::lattice;
    else if (s.topology == "random") t = Topology::random;
    else throw ValidationError("unknown topology '" + s.topology + "' (expected lattice or random)");
    std::vector<std::size_t> grid = s.grid;
    if (grid.empty()) grid = {100, 600, 1100, 1600, 2100};
    const SweepResult r = edges_sweep(s.nodes, grid, t, s.replicates, s.seed);
    const std::string csv = sweep_csv(r);
    run.write("edges_sweep_" + s.topology + ".csv", csv);
    std::cout << csv;
}

void cmd_report(Run& run, const Settings& s, const CLI::App& app) {
    const Study st = load_study(run, s, app);
    ReportOptions options;
    options.inference = st.inference;
    options.negatives = st.negatives;
    options.standardize = st.standardize;
    options.metric = parse_metric(s.metric);
    options.density_grid = st.grid;
    const auto bundle = report_pipeline(st.data, options);
    for (const auto& section : bundle["mean_spn"])
        if (section["spn"]["degenerate_fits"].get<std::size_t>() > 0)
            run.warn("mean SPN " + section["condition"].get<std::string>() + ": degenerate fits");
    if (!bundle["differential_spn"].is_null() && bundle["differential_spn"]["plus"]["degenerate_fits"].get<std::size_t>() > 0)
        run.warn("differential SPN: degenerate fits");
    run.write("report.json", dump(bundle));
    std::cout << "report: " << st.data.subjects() << " subjects, " << st.data.conditions() << " conditions, "
              << st.data.node_count() << " nodes\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Statistical parametric networks, density-integrated metrics and modularity simulations"};
    app.require_subcommand(1);
    Settings s;

    const auto add_out = [&](CLI::App* c) {
        c->add_option("--out-dir", s.out_dir, "Directory for outputs and run.log")->capture_default_str();
        c->add_flag("--strict", s.strict, "Treat degenerate statistics as errors (exit 4)");
    };
    const auto add_study = [&](CLI::App* c) {
        c->add_option("--manifest", s.manifest, "Study manifest (JSON)");
        c->add_option("--base-rate", s.base_rate, "FDR base rate")->capture_default_str();
        c->add_option("--correction", s.correction, "fdr or none")->capture_default_str();
        c->add_option("--seed", s.seed, "Master seed (recorded in the log)");
        c->add_flag("--abs", s.absolute, "Use absolute values of negative correlations");
        c->add_flag("--standardize", s.standardize, "Min-max standardize weights before metrics");
        add_out(c);
    };
    const auto add_format = [&](CLI::App* c) {
        c->add_option("--format", s.format, "Graph output format: dot, json or csv")->capture_default_str();
    };

    auto* spn_cmd = app.add_subcommand("spn", "Statistical parametric networks");
    spn_cmd->require_subcommand(1);
    auto* mean = spn_cmd->add_subcommand("mean", "Mean SPN per condition");
    add_study(mean);
    add_format(mean);
    mean->add_option("--condition", s.condition, "Only this condition label");
    auto* diff = spn_cmd->add_subcommand("diff", "Differential SPN+ and SPN-");
    add_study(diff);
    add_format(diff);
    auto* node_diff = spn_cmd->add_subcommand("node-diff", "Node-level differential analysis");
    add_study(node_diff);

    auto* metrics = app.add_subcommand("metrics", "Weighted and thresholded metrics of one matrix");
    metrics->add_option("--matrix", s.matrix, "Association matrix (CSV)")->required();
    metrics->add_option("--threshold", s.threshold, "Also report the graph kept by w > threshold");
    metrics->add_flag("--abs", s.absolute, "Use absolute values of negative correlations");
    metrics->add_flag("--standardize", s.standardize, "Min-max standardize weights first");
    add_format(metrics);
    add_out(metrics);

    auto* profile = app.add_subcommand("density-profile", "Density-integrated metric profiles");
    profile->add_option("--matrix", s.matrix, "Single matrix (CSV) instead of a manifest");
    profile->add_option("--metric", s.metric, "global_efficiency, local_efficiency, modularity_count, modularity_q")
        ->capture_default_str();
    profile->add_option("--grid", s.grid, "Edge counts k (default 1..#positive weights)")->delimiter(',');
    add_study(profile);

    auto* simulate = app.add_subcommand("simulate", "Module-count simulations");
    simulate->require_subcommand(1);
    auto* rewire_cmd = simulate->add_subcommand("rewire", "Module count against number of rewirings");
    rewire_cmd->add_option("--nodes", s.nodes)->capture_default_str();
    rewire_cmd->add_option("--edges", s.edges)->capture_default_str();
    rewire_cmd->add_option("--grid", s.grid, "Rewiring counts (default 0,50,...,500)")->delimiter(',');
    auto* edges_cmd = simulate->add_subcommand("edges", "Module count against number of edges");
    edges_cmd->add_option("--nodes", s.nodes)->capture_default_str();
    edges_cmd->add_option("--grid", s.grid, "Edge counts (default 100,600,1100,1600,2100)")->delimiter(',');
    edges_cmd->add_option("--topology", s.topology, "lattice or random")->capture_default_str();
    for (auto* c : {rewire_cmd, edges_cmd}) {
        c->add_option("--replicates", s.replicates)->capture_default_str();
        c->add_option("--seed", s.seed, "Master seed")->capture_default_str();
        add_out(c);
    }

    auto* report = app.add_subcommand("report", "Full reporting bundle");
    add_study(report);
    report->add_option("--metric", s.metric, "Metric for density profiles")->capture_default_str();
    report->add_option("--grid", s.grid, "Edge counts for density profiles")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    // Name and option set of the innermost subcommand that ran.
    const CLI::App* leaf = &app;
    std::string command = "spn";
    while (!leaf->get_subcommands().empty()) {
        leaf = leaf->get_subcommands().front();
        command += " " + leaf->get_name();
    }

    Run run(command, s, *leaf);
    try {
        std::error_code ec;
        fs::create_directories(s.out_dir, ec);
        if (ec) throw IoError("cannot create output directory " + s.out_dir + ": " + ec.message());

        if (leaf == mean) cmd_mean(run, s, *leaf);
        else if (leaf == diff) cmd_diff(run, s, *leaf);
        else if (leaf == node_diff) cmd_node_diff(run, s, *leaf);
        else if (leaf == metrics) cmd_metrics(run, s);
        else if (leaf == profile) cmd_density_profile(run, s, *leaf);
        else if (leaf == rewire_cmd) cmd_simulate_rewire(run, s);
        else if (leaf == edges_cmd) cmd_simulate_edges(run, s);
        else if (leaf == report) cmd_report(run, s, *leaf);
        run.finish();
        return kExitOk;
    } catch (const StrictDegenerate& e) {
        run.fail(e.what());
        std::cerr << "error: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const DegenerateError& e) {
        run.fail(e.what());
        std::cerr << "error: " << e.what() << "\n";
        return s.strict ? kExitDegenerate : kExitInvalid;
    } catch (const IoError& e) {
        run.fail(e.what());
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const Error& e) {
        run.fail(e.what());
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        run.fail(e.what());
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
}
