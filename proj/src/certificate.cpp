#include "tvseg/certificate.hpp"

#include "tvseg/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tvseg {

std::string_view to_string(ViolationReason r) {
    switch (r) {
    case ViolationReason::BandEmpty: return "band-empty";
    case ViolationReason::AnchorMiss: return "anchor-miss";
    case ViolationReason::LevelMiss: return "level-miss";
    }
    return "band-empty";
}

CertificateReport certify(const BinarySegmentation& u, double c1, double c2, const GridSignal& f,
                          const EnergyParams& p) {
    p.validate();
    const Index n = f.size();
    if (u.size() != n) throw InvalidInput("grid mismatch");

    CertificateReport report;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    report.z_lo.assign(static_cast<std::size_t>(n + 1), nan);
    report.z_hi.assign(static_cast<std::size_t>(n + 1), nan);

    // the jump straddles the decision level
    const double level = 0.5 * (c1 + c2);
    report.level_check = true;
    std::optional<Index> first_level_miss;
    for (const Index k : u.jumps()) {
        const double lo = std::min(f[k - 1], f[k]);
        const double hi = std::max(f[k - 1], f[k]);
        if (!(lo - kCertificateSlack <= level && level <= hi + kCertificateSlack)) {
            report.level_check = false;
            if (!first_level_miss) first_level_miss = k;
        }
    }

    const Eigen::VectorXd cells = u.to_field();
    const double weight = p.lambda * f.dx();
    std::size_t next_jump = 0;
    double lo = 0.0;
    double hi = 0.0;
    report.z_lo[0] = lo;
    report.z_hi[0] = hi;

    auto fail = [&](Index k, ViolationReason reason) {
        report.first_violation = Violation{k, reason};
        report.feasible = false;
        return report;
    };

    for (Index i = 0; i < n; ++i) {
        const Index k = i + 1;  // boundary reached after cell i
        const double d = weight * ((c1 - f[i]) * (c1 - f[i]) - (c2 - f[i]) * (c2 - f[i]));
        if (cells[i] == 1.0) {
            // z[k] - z[k-1] >= d
            lo = std::max(lo + d, -1.0);
            hi = 1.0;
        } else {
            // z[k] - z[k-1] <= d
            lo = -1.0;
            hi = std::min(hi + d, 1.0);
        }
        if (lo > hi + kCertificateSlack) return fail(k, ViolationReason::BandEmpty);
        hi = std::max(hi, lo);

        const bool is_jump = next_jump < u.jumps().size() && u.jumps()[next_jump] == k;
        double anchor = nan;
        if (is_jump) {
            ++next_jump;
            const int sign = cells[k] > cells[k - 1] ? 1 : -1;
            report.anchors.push_back({k, sign});
            if (first_level_miss && *first_level_miss == k) {
                report.z_lo[static_cast<std::size_t>(k)] = lo;
                report.z_hi[static_cast<std::size_t>(k)] = hi;
                return fail(k, ViolationReason::LevelMiss);
            }
            anchor = sign;
        } else if (k == n) {
            anchor = 0.0;
        }
        if (!std::isnan(anchor)) {
            if (anchor < lo - kCertificateSlack || anchor > hi + kCertificateSlack) {
                report.z_lo[static_cast<std::size_t>(k)] = lo;
                report.z_hi[static_cast<std::size_t>(k)] = hi;
                return fail(k, ViolationReason::AnchorMiss);
            }
            lo = hi = anchor;
        }
        report.z_lo[static_cast<std::size_t>(k)] = lo;
        report.z_hi[static_cast<std::size_t>(k)] = hi;
    }

    if (first_level_miss) return fail(*first_level_miss, ViolationReason::LevelMiss);
    report.feasible = true;
    return report;
}

CertificateReport certify(const SegmentationResult& result, const GridSignal& f, const EnergyParams& p) {
    return certify(result.u, result.c1, result.c2, f, p);
}

CertificateReport certify(const Eigen::Ref<const RelaxedField>& u, double c1, double c2, const GridSignal& f,
                          const EnergyParams& p) {
    if (!((u.array() == 0.0) || (u.array() == 1.0)).all())
        throw InvalidInput("certificate requires binary candidate");
    return certify(BinarySegmentation::from_cells(u), c1, c2, f, p);
}

bool check_jump_signs(const BinarySegmentation& u, const CertificateReport& report) {
    const auto& jumps = u.jumps();
    std::size_t matched = 0;
    for (const Anchor& a : report.anchors) {
        if (matched >= jumps.size() || jumps[matched] != a.boundary) return false;
        const int expected = u.at(a.boundary) > u.at(a.boundary - 1) ? 1 : -1;
        if (a.sign != expected) return false;
        ++matched;
    }
    // a report cut short by a violation may hold fewer anchors than jumps
    return matched == jumps.size() || report.first_violation.has_value();
}

} // namespace tvseg
