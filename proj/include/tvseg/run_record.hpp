#pragma once

#include "tvseg/certificate.hpp"
#include "tvseg/solver_exact.hpp"
#include "tvseg/solver_gd.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace tvseg {

struct RunParams {
    Index n = 0;
    double lambda = 0.0;
    double epsilon = 0.1;
    int levels = 256;
    double jump_tol = 0.0;
    Method method = Method::Exact;
    bool normalize = true;
    GdOptions gd;
};

/// One solver invocation as written by the CLI.
struct RunRecord {
    std::string signal_digest;
    RunParams params;
    SegmentationResult result;
    std::optional<CertificateReport> certificate;
    std::optional<double> duration_ms;  ///< absent with --no-meta
};

nlohmann::json to_json(const SegmentationResult& r);
nlohmann::json to_json(const CertificateReport& r);
nlohmann::json to_json(const RunRecord& r);

/// Throws InvalidInput on schema violations.
SegmentationResult result_from_json(const nlohmann::json& j);
CertificateReport certificate_from_json(const nlohmann::json& j);
RunRecord run_record_from_json(const nlohmann::json& j);

} // namespace tvseg
