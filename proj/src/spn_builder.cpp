#include "spn/spn_builder.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spn/errors.hpp"
#include "spn/kernels.hpp"

namespace spn {
namespace {

FdrDecision correct(std::span<const double> p, const InferenceOptions& options) {
    return options.correction == Correction::fdr ? bh_fdr(p, options.base_rate) : uncorrected(p, options.base_rate);
}

std::vector<Edge> upper_pairs(std::size_t n) {
    std::vector<Edge> pairs;
    pairs.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) pairs.push_back({i, j});
    return pairs;
}

void check_design(std::size_t subjects, std::size_t conditions, std::size_t cells, std::size_t nodes) {
    if (subjects == 0 || conditions == 0) throw UnsupportedDesignError("dataset has no subjects or no conditions");
    if (cells != subjects * conditions) {
        std::ostringstream msg;
        msg << "unbalanced design: expected " << subjects * conditions << " cells, found " << cells;
        throw UnsupportedDesignError(msg.str());
    }
    if (nodes < 2) throw ValidationError("dataset needs at least two nodes");
}

/// Fisher-z values grouped per edge: zvalues[e] is the subjects x conditions table.
std::vector<BalancedTable> edge_tables(const StudyDataset& data) {
    const std::size_t n = data.subjects();
    const std::size_t J = data.conditions();
    const std::size_t m = data.node_count() * (data.node_count() - 1) / 2;
    std::vector<BalancedTable> tables(m, BalancedTable(n, J));
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t c = 0; c < J; ++c) {
            const std::vector<double> z = fisher_upper_triangle(data.at(s, c));
            for (std::size_t e = 0; e < m; ++e) tables[e](s, c) = z[e];
        }
    return tables;
}

DifferentialSpn route_by_trend(std::vector<EdgeModelFit> fits, const std::vector<Node>& nodes, bool node_level,
                               const InferenceOptions& options) {
    const std::size_t count = fits.size();
    std::vector<double> p(count);
    std::size_t degenerate = 0;
    for (std::size_t h = 0; h < count; ++h) {
        p[h] = fits[h].p_value;
        if (fits[h].degenerate) ++degenerate;
    }
    const FdrDecision decision = correct(p, options);

    DifferentialSpn out;
    out.plus.kind = node_level ? SpnKind::node_differential_plus : SpnKind::differential_plus;
    out.minus.kind = node_level ? SpnKind::node_differential_minus : SpnKind::differential_minus;

    const std::vector<Edge> pairs = node_level ? std::vector<Edge>{} : upper_pairs(nodes.size());
    std::vector<Edge> up;
    std::vector<Edge> down;
    std::vector<Edge> flat;
    for (std::size_t h = 0; h < count; ++h) {
        if (!decision.rejected[h]) continue;
        const Edge key = node_level ? Edge{h, h} : pairs[h];
        const Sign trend = fits[h].trend_sign;
        if (trend == Sign::zero) {
            flat.push_back(key);
        } else if (node_level) {
            (trend == Sign::positive ? out.plus : out.minus).flagged_nodes.push_back(h);
        } else {
            (trend == Sign::positive ? up : down).push_back(key);
        }
    }
    out.plus.network = BinaryGraph(nodes, up);
    out.minus.network = BinaryGraph(nodes, down);

    for (SpnResult* r : {&out.plus, &out.minus}) {
        r->correction = decision;
        r->unsigned_significant = flat;
        r->degenerate_fits = degenerate;
    }
    if (node_level) {
        std::vector<NodeRecord> records(count);
        for (std::size_t h = 0; h < count; ++h) records[h] = {h, std::move(fits[h])};
        out.plus.per_node = records;
        out.minus.per_node = std::move(records);
    } else {
        std::vector<EdgeRecord> records(count);
        for (std::size_t h = 0; h < count; ++h) records[h] = {pairs[h], std::move(fits[h])};
        out.plus.per_edge = records;
        out.minus.per_edge = std::move(records);
    }
    return out;
}

}  // namespace

std::string_view to_string(SpnKind kind) noexcept {
    switch (kind) {
        case SpnKind::mean: return "mean";
        case SpnKind::differential_plus: return "differential_plus";
        case SpnKind::differential_minus: return "differential_minus";
        case SpnKind::node_differential_plus: return "node_differential_plus";
        case SpnKind::node_differential_minus: return "node_differential_minus";
    }
    return "unknown";
}

void StudyDataset::validate() const {
    check_design(subjects(), conditions(), correlations.size(), node_count());
    const std::size_t nv = node_count();
    for (std::size_t cell = 0; cell < correlations.size(); ++cell) {
        const SquareMatrix& m = correlations[cell];
        if (m.size() != nv) throw ValidationError("matrix dimension does not match the node table");
        for (std::size_t i = 0; i < nv; ++i) {
            if (m(i, i) != 0.0) throw ValidationError("correlation matrices must have a zero diagonal");
            for (std::size_t j = 0; j < nv; ++j) {
                const double r = m(i, j);
                if (!(r >= -1.0 && r <= 1.0)) throw ValidationError("correlation outside [-1, 1]");
                if (std::abs(r - m(j, i)) > kSymmetryTolerance) throw ValidationError("correlation matrix not symmetric");
            }
        }
    }
}

void NodeSignalDataset::validate() const {
    check_design(subjects(), conditions(), signals.size(), node_count());
    for (const auto& v : signals) {
        if (v.size() != node_count()) throw ValidationError("signal vector length does not match the node table");
        for (double x : v)
            if (!std::isfinite(x)) throw ValidationError("node signals must be finite");
    }
}

std::vector<double> fisher_upper_triangle(const SquareMatrix& r) {
    const std::size_t n = r.size();
    std::vector<double> z;
    z.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) z.push_back(fisher_z(r(i, j)));
    return z;
}

SpnResult mean_spn(const StudyDataset& data, std::size_t condition, const InferenceOptions& options) {
    data.validate();
    if (condition >= data.conditions()) throw ValidationError("condition index out of range");
    if (data.subjects() < 2) throw DomainError("mean SPN needs at least two subjects");

    const std::size_t n = data.subjects();
    const std::size_t J = data.conditions();
    const std::vector<BalancedTable> tables = edge_tables(data);
    const std::size_t m = tables.size();

    std::vector<double> pooled;
    pooled.reserve(m * n * J);
    for (const BalancedTable& t : tables) pooled.insert(pooled.end(), t.values().begin(), t.values().end());
    const double count = static_cast<double>(pooled.size());
    const double grand_mean = kernels::sum(pooled) / count;
    const double grand_sd = std::sqrt(kernels::sum_squared_deviation(pooled, grand_mean) / (count - 1.0));
    const auto [lo, hi] = std::minmax_element(pooled.begin(), pooled.end());
    const bool constant_pool = *lo == *hi;

    const std::vector<Edge> pairs = upper_pairs(data.node_count());
    SpnResult out;
    out.kind = SpnKind::mean;
    out.per_edge.resize(m);
    std::vector<double> p(m);
    std::vector<double> column(n);
    for (std::size_t e = 0; e < m; ++e) {
        for (std::size_t s = 0; s < n; ++s) column[s] = tables[e](s, condition);
        // A constant pool has no spread: nothing can exceed the grand mean.
        TestResult r;
        if (!constant_pool) {
            r = grand_mean_z_test(column, grand_mean, grand_sd);
        } else {
            r.p_value = 1.0;
            r.dof = {static_cast<double>(n) - 1.0, 0.0};
            ++out.degenerate_fits;
        }
        p[e] = r.p_value;
        out.per_edge[e] = {pairs[e], r};
    }
    out.correction = correct(p, options);

    std::vector<Edge> kept;
    for (std::size_t e = 0; e < m; ++e)
        if (out.correction.rejected[e] && std::get<TestResult>(out.per_edge[e].stats).effect_sign == Sign::positive)
            kept.push_back(pairs[e]);
    out.network = BinaryGraph(data.nodes, kept);
    return out;
}

DifferentialSpn differential_spn(const StudyDataset& data, const InferenceOptions& options) {
    data.validate();
    if (data.subjects() < 2 || data.conditions() < 2)
        throw DomainError("differential SPN needs at least two subjects and two conditions");
    const std::vector<BalancedTable> tables = edge_tables(data);
    std::vector<EdgeModelFit> fits;
    fits.reserve(tables.size());
    for (const BalancedTable& t : tables) fits.push_back(repeated_measures_fit(t));
    return route_by_trend(std::move(fits), data.nodes, false, options);
}

DifferentialSpn node_differential_spn(const NodeSignalDataset& data, const InferenceOptions& options) {
    data.validate();
    if (data.subjects() < 2 || data.conditions() < 2)
        throw DomainError("node differential SPN needs at least two subjects and two conditions");
    const std::size_t n = data.subjects();
    const std::size_t J = data.conditions();
    std::vector<EdgeModelFit> fits;
    fits.reserve(data.node_count());
    for (std::size_t v = 0; v < data.node_count(); ++v) {
        BalancedTable t(n, J);
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t c = 0; c < J; ++c) t(s, c) = data.at(s, c)[v];
        fits.push_back(repeated_measures_fit(t));
    }
    return route_by_trend(std::move(fits), data.nodes, true, options);
}

BinaryGraph mean_then_threshold(std::span<const SquareMatrix> matrices, double tau) {
    if (matrices.empty()) throw DomainError("no matrices to average");
    const std::size_t n = matrices.front().size();
    SquareMatrix mean(n);
    for (const SquareMatrix& m : matrices) {
        if (m.size() != n) throw ValidationError("matrices differ in size");
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) mean(i, j) += m(i, j);
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) mean(i, j) /= static_cast<double>(matrices.size());
    return threshold(mean, tau);
}

BinaryGraph threshold_then_majority(std::span<const SquareMatrix> matrices, double tau) {
    if (matrices.empty()) throw DomainError("no matrices to combine");
    const std::size_t n = matrices.front().size();
    std::vector<std::size_t> votes(n * n, 0);
    for (const SquareMatrix& m : matrices) {
        const BinaryGraph g = threshold(m, tau);
        for (const Edge& e : g.edges()) ++votes[e.i * n + e.j];
    }
    std::vector<Edge> kept;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (2 * votes[i * n + j] > matrices.size()) kept.push_back({i, j});
    return BinaryGraph(n, kept);
}

}  // namespace spn
