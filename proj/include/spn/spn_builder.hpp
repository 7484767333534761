#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "spn/graph.hpp"
#include "spn/stats.hpp"

namespace spn {

/// n subjects x J conditions of N_V x N_V correlation matrices. Cell
/// (subject s, condition c) lives at index s * J + c.
struct StudyDataset {
    std::vector<std::string> subject_ids;
    /// Ordered along the experimental gradient.
    std::vector<std::string> condition_labels;
    std::vector<Node> nodes;
    std::vector<SquareMatrix> correlations;

    std::size_t subjects() const noexcept { return subject_ids.size(); }
    std::size_t conditions() const noexcept { return condition_labels.size(); }
    std::size_t node_count() const noexcept { return nodes.size(); }

    const SquareMatrix& at(std::size_t subject, std::size_t condition) const {
        return correlations[subject * conditions() + condition];
    }

    /// Shape, symmetry, hollowness and range checks. Throws UnsupportedDesignError
    /// when cells are missing, ValidationError otherwise.
    void validate() const;
};

/// Time-averaged intensity per node, laid out like StudyDataset.
struct NodeSignalDataset {
    std::vector<std::string> subject_ids;
    std::vector<std::string> condition_labels;
    std::vector<Node> nodes;
    std::vector<std::vector<double>> signals;

    std::size_t subjects() const noexcept { return subject_ids.size(); }
    std::size_t conditions() const noexcept { return condition_labels.size(); }
    std::size_t node_count() const noexcept { return nodes.size(); }

    const std::vector<double>& at(std::size_t subject, std::size_t condition) const {
        return signals[subject * conditions() + condition];
    }

    void validate() const;
};

enum class SpnKind { mean, differential_plus, differential_minus, node_differential_plus, node_differential_minus };

std::string_view to_string(SpnKind kind) noexcept;

enum class Correction { fdr, none };

struct InferenceOptions {
    double base_rate = 0.05;
    Correction correction = Correction::fdr;
};

struct EdgeRecord {
    Edge edge;
    std::variant<TestResult, EdgeModelFit> stats;
};

struct NodeRecord {
    std::size_t node = 0;
    EdgeModelFit fit;
};

struct SpnResult {
    SpnKind kind = SpnKind::mean;
    BinaryGraph network;
    /// One record per hypothesis, aligned with correction.rejected. Empty for
    /// node-level analyses.
    std::vector<EdgeRecord> per_edge;
    /// One record per vertex for node-level analyses.
    std::vector<NodeRecord> per_node;
    FdrDecision correction;
    /// Flagged vertices of a node-level analysis.
    std::vector<std::size_t> flagged_nodes;
    /// Significant hypotheses with zero trend contrast; routed to neither sign.
    std::vector<Edge> unsigned_significant;
    /// Number of degenerate model fits (zero residual variance).
    std::size_t degenerate_fits = 0;
};

struct DifferentialSpn {
    SpnResult plus;
    SpnResult minus;
};

/// Mean SPN of one condition: z-test of each edge's Fisher-z mean against the
/// grand mean and SD pooled over every edge, subject and condition. Edges are
/// kept when the corrected test rejects and the effect is positive.
SpnResult mean_spn(const StudyDataset& data, std::size_t condition, const InferenceOptions& options = {});

/// Per-edge repeated-measures F-test over all conditions, one FDR family over
/// all edges, significant edges routed by the sign of the linear trend.
DifferentialSpn differential_spn(const StudyDataset& data, const InferenceOptions& options = {});

/// Same model per vertex on time-averaged signals.
DifferentialSpn node_differential_spn(const NodeSignalDataset& data, const InferenceOptions& options = {});

/// Fisher-z values of every (i < j) pair of one matrix, lexicographic.
std::vector<double> fisher_upper_triangle(const SquareMatrix& correlations);

/// Averages the matrices then thresholds at tau.
BinaryGraph mean_then_threshold(std::span<const SquareMatrix> matrices, double tau);

/// Thresholds each matrix at tau and keeps the edges present in a strict
/// majority of the thresholded graphs.
BinaryGraph threshold_then_majority(std::span<const SquareMatrix> matrices, double tau);

}  // namespace spn
