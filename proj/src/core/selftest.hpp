#pragma once

#include <string>
#include <vector>

namespace geofuse {

struct SelftestGroupResult {
    std::string name;
    bool passed = false;
    double measured = 0.0;   // worst observed error for the group
    double tolerance = 0.0;
};

struct SelftestOptions {
    /// Negative control: perturb the Jacobian candidate so the
    /// finite-difference group must fail.
    bool perturb_jacobian = false;
    /// Reduced sample counts for the statistical groups.
    int mc_samples = 20000;
};

struct SelftestReport {
    std::vector<SelftestGroupResult> groups;
    bool all_passed() const;
};

/// Fast oracle suite: exp/log round trips, Jacobian finite differences,
/// Adjoint definitional oracle, orthogonality drift, CCE containment and
/// the mean-absorption covariance transport check.
SelftestReport run_selftest(const SelftestOptions& opts = {});

/// Print one line per group ("[PASS]/[FAIL] name measured= tol=") to stdout.
void print_report(const SelftestReport& report);

}  // namespace geofuse
