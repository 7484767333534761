#include "spn/report.hpp"

#include <cmath>

namespace spn {
namespace {

using ojson = nlohmann::ordered_json;

/// JSON has no infinity; an unbounded statistic is written as the string "inf".
ojson number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

ojson edge_list(const BinaryGraph& g) {
    ojson edges = ojson::array();
    for (const Edge& e : g.edges()) edges.push_back({g.nodes()[e.i].label, g.nodes()[e.j].label});
    return edges;
}

ojson fit_to_json(const EdgeModelFit& fit) {
    ojson j;
    j["f_statistic"] = number(fit.f_statistic);
    j["p_value"] = fit.p_value;
    j["trend_sign"] = static_cast<int>(fit.trend_sign);
    j["dof"] = {fit.dof.first, fit.dof.second};
    j["fixed_effects"] = fit.fixed_effects;
    j["residual_variance"] = fit.residual_variance;
    j["degenerate"] = fit.degenerate;
    return j;
}

WeightedGraph prepared_graph(const StudyDataset& data, std::size_t s, std::size_t c, const ReportOptions& options) {
    WeightedGraph g = io::association_graph(data.at(s, c), data.nodes, options.negatives);
    return options.standardize ? io::standardize_weights(g) : g;
}

}  // namespace

ojson spn_to_json(const SpnResult& result) {
    ojson j;
    j["kind"] = std::string(to_string(result.kind));
    j["edge_count"] = result.network.edge_count();
    j["edges"] = edge_list(result.network);
    if (!result.per_node.empty()) {
        ojson flagged = ojson::array();
        for (std::size_t v : result.flagged_nodes) flagged.push_back(result.network.nodes()[v].label);
        j["flagged_nodes"] = flagged;
    }
    j["hypotheses"] = result.correction.rejected.size();
    j["rejected"] = result.correction.rejected_count();
    j["base_rate"] = result.correction.base_rate;
    j["degenerate_fits"] = result.degenerate_fits;
    ojson flat = ojson::array();
    for (const Edge& e : result.unsigned_significant) {
        if (result.per_node.empty()) {
            flat.push_back({result.network.nodes()[e.i].label, result.network.nodes()[e.j].label});
        } else {
            flat.push_back(result.network.nodes()[e.i].label);
        }
    }
    j["unsigned_significant"] = flat;

    ojson tests = ojson::array();
    for (std::size_t h = 0; h < result.per_edge.size(); ++h) {
        const EdgeRecord& rec = result.per_edge[h];
        ojson t;
        t["edge"] = {result.network.nodes()[rec.edge.i].label, result.network.nodes()[rec.edge.j].label};
        if (const auto* z = std::get_if<TestResult>(&rec.stats)) {
            t["statistic"] = number(z->statistic);
            t["p_value"] = z->p_value;
            t["effect_sign"] = static_cast<int>(z->effect_sign);
        } else {
            t.update(fit_to_json(std::get<EdgeModelFit>(rec.stats)));
        }
        t["rejected"] = static_cast<bool>(result.correction.rejected[h]);
        tests.push_back(std::move(t));
    }
    for (std::size_t h = 0; h < result.per_node.size(); ++h) {
        ojson t;
        t["node"] = result.network.nodes()[result.per_node[h].node].label;
        t.update(fit_to_json(result.per_node[h].fit));
        t["rejected"] = static_cast<bool>(result.correction.rejected[h]);
        tests.push_back(std::move(t));
    }
    j["tests"] = tests;
    return j;
}

ojson report_pipeline(const StudyDataset& data, const ReportOptions& options) {
    data.validate();
    const std::size_t n = data.subjects();
    const std::size_t J = data.conditions();

    ojson bundle;

    ojson density_table = ojson::array();
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t c = 0; c < J; ++c) {
            ojson row;
            row["subject"] = data.subject_ids[s];
            row["condition"] = data.condition_labels[c];
            row["weighted_density"] = weighted_density(prepared_graph(data, s, c, options));
            density_table.push_back(std::move(row));
        }
    bundle["weighted_density"] = std::move(density_table);

    ojson means = ojson::array();
    for (std::size_t c = 0; c < J; ++c) {
        ojson section;
        section["condition"] = data.condition_labels[c];
        section["spn"] = spn_to_json(mean_spn(data, c, options.inference));
        means.push_back(std::move(section));
    }
    bundle["mean_spn"] = std::move(means);

    if (J >= 2) {
        const DifferentialSpn diff = differential_spn(data, options.inference);
        ojson section;
        section["plus"] = spn_to_json(diff.plus);
        section["minus"] = spn_to_json(diff.minus);
        bundle["differential_spn"] = std::move(section);
    } else {
        bundle["differential_spn"] = nullptr;
    }

    const MetricFn metric = metric_function(options.metric);
    ojson profiles = ojson::array();
    for (std::size_t c = 0; c < J; ++c) {
        ojson group;
        group["condition"] = data.condition_labels[c];
        group["metric"] = std::string(to_string(options.metric));
        ojson subjects = ojson::array();
        double total = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            const DensityProfile p = density_integrated_metric(prepared_graph(data, s, c, options), metric, options.density_grid);
            ojson row;
            row["subject"] = data.subject_ids[s];
            row["densities"] = p.densities;
            row["values"] = p.values;
            row["integrated"] = p.integrated;
            subjects.push_back(std::move(row));
            total += p.integrated;
        }
        group["mean_integrated"] = total / static_cast<double>(n);
        group["subjects"] = std::move(subjects);
        profiles.push_back(std::move(group));
    }
    bundle["density_profiles"] = std::move(profiles);
    return bundle;
}

}  // namespace spn
