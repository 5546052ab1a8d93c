#pragma once

#include <string>
#include <vector>

namespace algkit {

struct CheckResult {
  std::string check;
  std::string site;
  double max_residual = 0.0;
  bool pass = true;
};

/// Flat list of check outcomes; the unit every verification routine returns
/// and the CLI serializes.
struct VerificationReport {
  std::vector<CheckResult> checks;
  std::vector<std::string> notes;

  bool pass() const;
  double max_residual() const;
  const CheckResult* worst_failure() const;  // nullptr when everything passed

  void add(std::string check, std::string site, double residual, double tol);
  void merge(VerificationReport other, const std::string& site_prefix = "");
  std::string summary() const;  // one line per check
};

/// Shared knobs for every sampled verification.
struct CheckOptions {
  double tol = 1e-9;
  int samples = 64;
  uint64_t seed = 0x5EEDULL;
};

}  // namespace algkit
