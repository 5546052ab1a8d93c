// algebroid-kit: verification and simulation front end.
//
// Subcommands: describe | verify | prolong | limit-verify | simulate.
// Exit codes: 0 success, 1 check failure, 2 parse error, 3 domain error.

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "algkit/json_io.hpp"

namespace {

using namespace algkit;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitParseError = 2;
constexpr int kExitDomainError = 3;

struct GlobalFlags {
  double tol = 1e-9;
  int samples = 64;
  uint64_t seed = 1;
  std::string out;
};

void add_global_flags(CLI::App* cmd, GlobalFlags& flags) {
  cmd->add_option("--tol", flags.tol, "residual tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--samples", flags.samples, "sample points per box")
      ->check(CLI::Range(8, 1 << 20));
  cmd->add_option("--seed", flags.seed, "seed for randomized sweeps");
  cmd->add_option("--out", flags.out, "report/output path");
}

CheckOptions to_options(const GlobalFlags& flags) {
  CheckOptions opts;
  opts.tol = flags.tol;
  opts.samples = flags.samples;
  opts.seed = flags.seed;
  return opts;
}

void write_or_print(const std::string& out_path, const std::string& payload) {
  if (out_path.empty()) {
    std::cout << payload;
    if (!payload.empty() && payload.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + out_path);
  out << payload;
}

void emit_report(const GlobalFlags& flags, const std::string& command,
                 const VerificationReport& report) {
  std::cout << report.summary();
  nlohmann::json j = report_to_json(report);
  j["command"] = command;
  j["seed"] = flags.seed;
  j["tol"] = flags.tol;
  j["samples"] = flags.samples;
  if (!flags.out.empty()) write_or_print(flags.out, j.dump(2) + "\n");
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

int run_describe(const std::string& input) {
  const nlohmann::json j = load_json_file(input);
  if (j.contains("levels")) {
    const DirectSystemSpec sys = system_from_json(j);
    std::cout << "direct system: " << sys.depth() << " level(s)\n";
    for (size_t i = 0; i < sys.depth(); ++i) {
      const AlgebroidSpec& a = sys.level(i);
      std::cout << "  level " << i << ": base_dim=" << a.base_dim() << " rank=" << a.rank()
                << " structure_entries=" << a.structure_entries().size() << "\n";
    }
    return kExitOk;
  }
  if (j.contains("hamiltonian")) {
    const HamiltonianSystem sys = hamiltonian_from_json(j);
    std::cout << "hamiltonian system: base_dim=" << sys.base_dim() << " rank=" << sys.rank()
              << "\n  H = " << sys.hamiltonian().to_sexpr(sys.phase_coords()) << "\n  monitors:";
    for (const auto& [name, q] : sys.monitors()) std::cout << ' ' << name;
    std::cout << "\n";
    return kExitOk;
  }
  const AlgebroidSpec a = algebroid_from_json(j);
  std::cout << "algebroid: base_dim=" << a.base_dim() << " rank=" << a.rank() << "\n";
  const auto entries = a.structure_entries();
  std::cout << "  nonzero structure entries: " << entries.size() << "\n";
  const CoordNames names = a.base_coords();
  for (const auto& e : entries)
    std::cout << "  C[" << e.alpha + 1 << "," << e.beta + 1 << "]^" << e.gamma + 1 << " = "
              << e.value.to_sexpr(names) << "\n";
  return kExitOk;
}

int run_verify(const std::string& input, const GlobalFlags& flags) {
  const AlgebroidSpec a = algebroid_from_json(load_json_file(input));
  const CheckOptions opts = to_options(flags);
  VerificationReport report;

  Rng rng(opts.seed);
  for (int t = 0; t < 5; ++t) {
    const Section s1 = random_section(rng, a);
    const Section s2 = random_section(rng, a);
    const Expr f = random_polynomial(rng, a.base_dim());
    report.merge(check_leibniz(a, s1, f, s2, opts), "sweep " + std::to_string(t) + " ");
  }
  report.merge(check_jacobi(a, opts));
  report.merge(check_anchor_bracket_compat(a, opts));
  Rng form_rng(opts.seed ^ 0x9E3779B97F4A7C15ull);
  for (int t = 0; t < 10; ++t) {
    const QForm f0 = QForm::function(a.rank(), random_polynomial(form_rng, a.base_dim()));
    report.merge(check_d_squared(a, f0, opts), "form " + std::to_string(t) + " deg0 ");
    QForm f1 = QForm::zero(a.rank(), 1);
    for (int alpha = 0; alpha < a.rank(); ++alpha)
      f1.component_at(static_cast<size_t>(alpha)) = random_polynomial(form_rng, a.base_dim());
    report.merge(check_d_squared(a, f1, opts), "form " + std::to_string(t) + " deg1 ");
  }

  emit_report(flags, "verify", report);
  return report.pass() ? kExitOk : kExitCheckFailure;
}

int run_prolong(const std::string& input, int fiber_dim, const GlobalFlags& flags) {
  const nlohmann::json j = load_json_file(input);
  const AlgebroidSpec a = algebroid_from_json(j);
  int q = fiber_dim;
  if (q <= 0 && j.contains("fiber_dim")) q = j["fiber_dim"].get<int>();
  if (q <= 0) throw ParseError("prolong needs --fiber-dim or a fiber_dim field");
  const AlgebroidSpec p = prolong(a, Fibration(a.base_dim(), q));
  write_or_print(flags.out, algebroid_to_json(p).dump(2) + "\n");
  return kExitOk;
}

int run_limit_verify(const std::string& input, const std::string& family_path,
                     const GlobalFlags& flags) {
  const DirectSystemSpec sys = system_from_json(load_json_file(input));
  const CheckOptions opts = to_options(flags);
  VerificationReport report = verify_direct_system(sys, opts);
  if (!family_path.empty()) {
    const Family fam = family_from_json(load_json_file(family_path), sys);
    std::visit([&](const auto& f) { report.merge(verify_family(sys, f, opts), "family "); },
               fam);
  }
  emit_report(flags, "limit-verify", report);
  return report.pass() ? kExitOk : kExitCheckFailure;
}

std::vector<double> parse_state(const std::string& z0) {
  std::vector<double> out;
  std::stringstream ss(z0);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ParseError("bad --z0 component '" + item + "'");
    }
  }
  if (out.empty()) throw ParseError("--z0 must list phase coordinates");
  return out;
}

int run_simulate(const std::string& system_arg, const std::string& z0_arg, double dt, double T,
                 const GlobalFlags& flags) {
  HamiltonianSystem sys = [&] {
    if (system_arg.rfind("oscillator:", 0) == 0) {
      const int n = std::atoi(system_arg.c_str() + std::string("oscillator:").size());
      if (n < 1) throw ParseError("oscillator:<n> needs n >= 1");
      return harmonic_oscillator_system(n);
    }
    return hamiltonian_from_json(load_json_file(system_arg));
  }();
  const std::vector<double> z0 = parse_state(z0_arg);
  if (static_cast<int>(z0.size()) != sys.phase_dim())
    throw ParseError("--z0 must have " + std::to_string(sys.phase_dim()) + " components");

  const Trajectory traj = integrate_rk4(sys, z0, dt, T);

  std::string csv = "t";
  const CoordNames names = sys.phase_coords();
  for (const auto& n : names) csv += "," + n;
  for (const auto& [name, q] : sys.monitors()) csv += "," + name;
  csv += "\n";
  for (size_t s = 0; s < traj.states.size(); ++s) {
    csv += format_double(traj.times[s]);
    for (double v : traj.states[s]) csv += "," + format_double(v);
    for (const auto& [name, q] : sys.monitors()) csv += "," + format_double(q.eval(traj.states[s]));
    csv += "\n";
  }
  write_or_print(flags.out, csv);

  const DriftStats stats = conserved_report(sys, traj, sys.monitors());
  std::cout << "steps: " << traj.states.size() - 1 << "  dt: " << format_double(traj.dt) << "\n";
  for (const auto& [name, drift] : stats.max_drift)
    std::cout << "drift " << name << ": " << format_double(drift) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lie algebroids in coordinates: verification, prolongation, direct systems, "
               "Hamiltonian simulation"};
  app.require_subcommand(1);

  GlobalFlags flags;
  std::string input, family_path, system_arg, z0_arg;
  int fiber_dim = 0;
  double dt = 1e-3, total_time = 1.0;

  CLI::App* describe = app.add_subcommand("describe", "summarize a JSON input");
  describe->add_option("--input", input, "JSON path")->required();

  CLI::App* verify = app.add_subcommand("verify", "run the identity suite on one algebroid");
  verify->add_option("--input", input, "algebroid JSON path")->required();
  add_global_flags(verify, flags);

  CLI::App* prolong_cmd = app.add_subcommand("prolong", "emit the prolonged algebroid");
  prolong_cmd->add_option("--input", input, "algebroid JSON path")->required();
  prolong_cmd->add_option("--fiber-dim", fiber_dim, "fiber dimension q");
  add_global_flags(prolong_cmd, flags);

  CLI::App* limit = app.add_subcommand("limit-verify", "verify a direct system");
  limit->add_option("--input", input, "direct system JSON path")->required();
  limit->add_option("--family", family_path, "family JSON path (optional)");
  add_global_flags(limit, flags);

  CLI::App* simulate = app.add_subcommand("simulate", "integrate Hamilton equations (RK4)");
  simulate->add_option("--system", system_arg, "JSON path or oscillator:<n>")->required();
  simulate->add_option("--z0", z0_arg, "initial state, comma separated")->required();
  simulate->add_option("--dt", dt, "time step")->check(CLI::PositiveNumber);
  simulate->add_option("--T", total_time, "total time")->check(CLI::PositiveNumber);
  add_global_flags(simulate, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParseError;
  }

  try {
    if (describe->parsed()) return run_describe(input);
    if (verify->parsed()) return run_verify(input, flags);
    if (prolong_cmd->parsed()) return run_prolong(input, fiber_dim, flags);
    if (limit->parsed()) return run_limit_verify(input, family_path, flags);
    if (simulate->parsed()) return run_simulate(system_arg, z0_arg, dt, total_time, flags);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParseError;
  } catch (const DomainExit& e) {
    std::cerr << "domain exit: " << e.what() << " (t = " << e.last_time << ")\n";
    return kExitDomainError;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitDomainError;
  } catch (const NonFinite& e) {
    std::cerr << "non-finite state: " << e.what() << "\n";
    return kExitDomainError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParseError;
  }
  return kExitOk;
}
