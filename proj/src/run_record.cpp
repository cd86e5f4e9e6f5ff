#include "tvseg/run_record.hpp"

#include "tvseg/error.hpp"

#include <cmath>
#include <limits>

namespace tvseg {

using nlohmann::json;

namespace {

json nullable(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

double number_or_nan(const json& j) {
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    if (!j.is_number()) throw InvalidInput("expected a number in certificate band");
    return j.get<double>();
}

template <typename T>
T field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw InvalidInput(std::string("missing field \"") + key + "\"");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw InvalidInput(std::string("bad type for field \"") + key + "\"");
    }
}

json to_json(const GdOptions& o) {
    return {{"max_outer", o.max_outer}, {"max_inner", o.max_inner}, {"base_rate", o.base_rate},
            {"smoothing", o.smoothing}, {"seed", o.seed},           {"tol", o.tol},
            {"init_jitter", o.init_jitter}};
}

GdOptions gd_from_json(const json& j) {
    GdOptions o;
    o.max_outer = field<int>(j, "max_outer");
    o.max_inner = field<int>(j, "max_inner");
    o.base_rate = field<double>(j, "base_rate");
    o.smoothing = field<double>(j, "smoothing");
    o.seed = field<std::uint64_t>(j, "seed");
    o.tol = field<double>(j, "tol");
    o.init_jitter = field<double>(j, "init_jitter");
    return o;
}

json to_json(const RunParams& p) {
    return {{"n", p.n},
            {"lambda", p.lambda},
            {"epsilon", p.epsilon},
            {"levels", p.levels},
            {"jump_tol", p.jump_tol},
            {"method", std::string(to_string(p.method))},
            {"normalize", p.normalize},
            {"gd", to_json(p.gd)}};
}

RunParams params_from_json(const json& j) {
    RunParams p;
    p.n = field<Index>(j, "n");
    p.lambda = field<double>(j, "lambda");
    p.epsilon = field<double>(j, "epsilon");
    p.levels = field<int>(j, "levels");
    p.jump_tol = field<double>(j, "jump_tol");
    p.method = parse_method(field<std::string>(j, "method"));
    p.normalize = field<bool>(j, "normalize");
    p.gd = gd_from_json(field<json>(j, "gd"));
    return p;
}

SegmentationResult result_from_json(const json& j, Index n) {
    SegmentationResult r;
    const json u = field<json>(j, "u");
    r.u = BinarySegmentation(n, field<int>(u, "first_value"), field<std::vector<Index>>(u, "jumps"));
    r.c1 = field<double>(j, "c1");
    r.c2 = field<double>(j, "c2");
    r.energy = field<double>(j, "energy");
    r.level = field<double>(j, "level");
    r.method = parse_method(field<std::string>(j, "method"));
    r.candidates = field<long long>(j, "candidates");
    r.iterations = field<long long>(j, "iterations");
    if (j.contains("relaxed_energy")) r.relaxed_energy = field<double>(j, "relaxed_energy");
    return r;
}

ViolationReason parse_reason(const std::string& s) {
    if (s == "band-empty") return ViolationReason::BandEmpty;
    if (s == "anchor-miss") return ViolationReason::AnchorMiss;
    if (s == "level-miss") return ViolationReason::LevelMiss;
    throw InvalidInput("unknown violation reason '" + s + "'");
}

} // namespace

json to_json(const SegmentationResult& r) {
    json j = {{"u", {{"first_value", r.u.first_value()}, {"jumps", r.u.jumps()}}},
              {"n", r.u.size()},
              {"c1", r.c1},
              {"c2", r.c2},
              {"energy", r.energy},
              {"level", r.level},
              {"method", std::string(to_string(r.method))},
              {"candidates", r.candidates},
              {"iterations", r.iterations}};
    if (r.method == Method::Gd) j["relaxed_energy"] = r.relaxed_energy;
    return j;
}

SegmentationResult result_from_json(const json& j) {
    return result_from_json(j, field<Index>(j, "n"));
}

json to_json(const CertificateReport& r) {
    json lo = json::array();
    json hi = json::array();
    for (double v : r.z_lo) lo.push_back(nullable(v));
    for (double v : r.z_hi) hi.push_back(nullable(v));
    json anchors = json::array();
    for (const Anchor& a : r.anchors) anchors.push_back({{"boundary", a.boundary}, {"sign", a.sign}});
    json violation = nullptr;
    if (r.first_violation)
        violation = {{"boundary", r.first_violation->boundary},
                     {"reason", std::string(to_string(r.first_violation->reason))}};
    return {{"feasible", r.feasible}, {"level_check", r.level_check}, {"z_lo", lo},
            {"z_hi", hi},             {"anchors", anchors},           {"first_violation", violation}};
}

CertificateReport certificate_from_json(const json& j) {
    CertificateReport r;
    r.feasible = field<bool>(j, "feasible");
    r.level_check = field<bool>(j, "level_check");
    for (const auto& v : field<json>(j, "z_lo")) r.z_lo.push_back(number_or_nan(v));
    for (const auto& v : field<json>(j, "z_hi")) r.z_hi.push_back(number_or_nan(v));
    for (const auto& a : field<json>(j, "anchors"))
        r.anchors.push_back({field<Index>(a, "boundary"), field<int>(a, "sign")});
    const json violation = field<json>(j, "first_violation");
    if (!violation.is_null())
        r.first_violation =
            Violation{field<Index>(violation, "boundary"), parse_reason(field<std::string>(violation, "reason"))};
    return r;
}

json to_json(const RunRecord& r) {
    json j = {{"signal_digest", r.signal_digest}, {"params", to_json(r.params)}, {"result", to_json(r.result)}};
    if (r.certificate) j["certificate"] = to_json(*r.certificate);
    if (r.duration_ms) j["duration_ms"] = *r.duration_ms;
    return j;
}

RunRecord run_record_from_json(const json& j) {
    RunRecord r;
    r.signal_digest = field<std::string>(j, "signal_digest");
    r.params = params_from_json(field<json>(j, "params"));
    if (r.params.n < 1) throw InvalidInput("params.n must be positive");
    r.result = result_from_json(field<json>(j, "result"), r.params.n);
    if (j.contains("certificate") && !j["certificate"].is_null())
        r.certificate = certificate_from_json(j["certificate"]);
    if (j.contains("duration_ms")) r.duration_ms = field<double>(j, "duration_ms");
    return r;
}

} // namespace tvseg
