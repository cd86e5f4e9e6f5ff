#pragma once

#include "tvseg/solver_exact.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace tvseg {

enum class ViolationReason { BandEmpty, AnchorMiss, LevelMiss };
std::string_view to_string(ViolationReason r);

struct Violation {
    Index boundary = 0;
    ViolationReason reason = ViolationReason::BandEmpty;
};

struct Anchor {
    Index boundary = 0;
    int sign = 0;  ///< +1 for an upward jump of u, -1 for a downward one
};

/// Result of propagating the admissible band of the dual field z over the
/// boundaries 0..n. Boundaries not reached before a violation hold NaN.
struct CertificateReport {
    bool feasible = false;
    bool level_check = false;
    std::vector<double> z_lo;
    std::vector<double> z_hi;
    std::vector<Anchor> anchors;
    std::optional<Violation> first_violation;
};

/// Slack used for band emptiness and anchor hits.
inline constexpr double kCertificateSlack = 1e-9;

/// Checks the optimality system for a binary candidate with its constants.
/// z starts and ends at 0, equals +1/-1 at upward/downward jumps, stays in
/// [-1,1], and across cell i moves by at least d_i where u=1 and at most d_i
/// where u=0, with d_i = lambda*dx*((c1-f_i)^2 - (c2-f_i)^2).
/// Each jump must also straddle the level (c1+c2)/2.
CertificateReport certify(const BinarySegmentation& u, double c1, double c2, const GridSignal& f,
                          const EnergyParams& p);
CertificateReport certify(const SegmentationResult& result, const GridSignal& f, const EnergyParams& p);
/// Overload for per-cell values; throws InvalidInput("certificate requires
/// binary candidate") if any entry is not exactly 0 or 1.
CertificateReport certify(const Eigen::Ref<const RelaxedField>& u, double c1, double c2, const GridSignal& f,
                          const EnergyParams& p);

/// True iff the report has one anchor per jump of u with the sign of the jump.
bool check_jump_signs(const BinarySegmentation& u, const CertificateReport& report);

} // namespace tvseg
