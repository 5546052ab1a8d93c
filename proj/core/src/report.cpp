#include "algkit/report.hpp"

#include <charconv>

namespace algkit {

bool VerificationReport::pass() const {
  for (const CheckResult& c : checks)
    if (!c.pass) return false;
  return true;
}

double VerificationReport::max_residual() const {
  double m = 0.0;
  for (const CheckResult& c : checks)
    if (c.max_residual > m) m = c.max_residual;
  return m;
}

const CheckResult* VerificationReport::worst_failure() const {
  const CheckResult* worst = nullptr;
  for (const CheckResult& c : checks)
    if (!c.pass && (worst == nullptr || c.max_residual > worst->max_residual)) worst = &c;
  return worst;
}

void VerificationReport::add(std::string check, std::string site, double residual, double tol) {
  checks.push_back({std::move(check), std::move(site), residual, residual < tol});
}

void VerificationReport::merge(VerificationReport other, const std::string& site_prefix) {
  for (CheckResult& c : other.checks) {
    if (!site_prefix.empty()) c.site = site_prefix + c.site;
    checks.push_back(std::move(c));
  }
  for (std::string& n : other.notes) notes.push_back(std::move(n));
}

std::string VerificationReport::summary() const {
  std::string out;
  for (const CheckResult& c : checks) {
    out += c.pass ? "[pass] " : "[FAIL] ";
    out += c.check;
    if (!c.site.empty()) {
      out += " @ ";
      out += c.site;
    }
    out += "  residual=";
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), c.max_residual,
                             std::chars_format::scientific, 3);
    out.append(buf, res.ptr);
    out += '\n';
  }
  for (const std::string& n : notes) {
    out += "note: ";
    out += n;
    out += '\n';
  }
  return out;
}

}  // namespace algkit
