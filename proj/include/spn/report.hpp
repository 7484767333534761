#pragma once

#include <string>

#include "json.hpp"

#include "spn/density.hpp"
#include "spn/io.hpp"
#include "spn/spn_builder.hpp"

namespace spn {

struct ReportOptions {
    InferenceOptions inference;
    io::NegativePolicy negatives = io::NegativePolicy::reject;
    bool standardize = false;
    Metric metric = Metric::global_efficiency;
    std::vector<std::size_t> density_grid;
};

/// Runs the reporting sequence on one dataset and returns the bundle with its
/// sections in this order:
///   1. weighted density of every subject x condition matrix,
///   2. mean SPN of every condition,
///   3. differential SPN+ and SPN-,
///   4. density-integrated metric profiles per condition.
nlohmann::ordered_json report_pipeline(const StudyDataset& data, const ReportOptions& options);

/// Section for one SPN: edges by node label plus per-hypothesis statistics.
nlohmann::ordered_json spn_to_json(const SpnResult& result);

}  // namespace spn
