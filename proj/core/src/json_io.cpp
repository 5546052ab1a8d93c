#include "algkit/json_io.hpp"

#include <fstream>

namespace algkit {

using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const std::string& what) { throw ParseError("JSON: " + what); }

Expr parse_expr(const json& j, const CoordNames& names, const std::string& where) {
  if (!j.is_string()) parse_fail(where + " must be an s-expression string");
  try {
    return Expr::parse_sexpr(j.get<std::string>(), names);
  } catch (const ParseError& e) {
    parse_fail(where + ": " + e.what());
  }
}

Box box_from_json(const json& j, int dim, const std::string& where) {
  Box box;
  if (!j.is_array() || static_cast<int>(j.size()) != dim)
    parse_fail(where + " must list one [lo, hi] interval per coordinate");
  for (const auto& r : j) {
    if (!r.is_array() || r.size() != 2) parse_fail(where + " intervals must be [lo, hi]");
    const double lo = r[0].get<double>();
    const double hi = r[1].get<double>();
    if (!(lo < hi)) parse_fail(where + " interval must have lo < hi");
    box.ranges.push_back({lo, hi});
  }
  return box;
}

json box_to_json(const Box& box) {
  json j = json::array();
  for (const auto& [lo, hi] : box.ranges) j.push_back({lo, hi});
  return j;
}

int get_positive_int(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer() || j[key].get<int>() < 1)
    parse_fail(std::string(key) + " must be a positive integer");
  return j[key].get<int>();
}

}  // namespace

json algebroid_to_json(const AlgebroidSpec& a) {
  const CoordNames names = a.base_coords();
  json j;
  j["base_dim"] = a.base_dim();
  j["rank"] = a.rank();
  json anchor = json::array();
  for (int i = 0; i < a.base_dim(); ++i) {
    json row = json::array();
    for (int alpha = 0; alpha < a.rank(); ++alpha)
      row.push_back(a.anchor_coef(i, alpha).to_sexpr(names));
    anchor.push_back(std::move(row));
  }
  j["anchor"] = std::move(anchor);
  json structure = json::array();
  for (const auto& e : a.structure_entries())
    structure.push_back({{"alpha", e.alpha + 1},
                         {"beta", e.beta + 1},
                         {"gamma", e.gamma + 1},
                         {"expr", e.value.to_sexpr(names)}});
  j["structure"] = std::move(structure);
  j["sample_box"] = box_to_json(a.sample_box());
  return j;
}

AlgebroidSpec algebroid_from_json(const json& j) {
  if (!j.is_object()) parse_fail("algebroid must be an object");
  const int n = get_positive_int(j, "base_dim");
  const int m = get_positive_int(j, "rank");
  const CoordNames names = make_coords("x", n);

  if (!j.contains("anchor") || !j["anchor"].is_array() || static_cast<int>(j["anchor"].size()) != n)
    parse_fail("anchor must have base_dim rows");
  std::vector<std::vector<Expr>> anchor;
  for (const auto& row : j["anchor"]) {
    if (!row.is_array() || static_cast<int>(row.size()) != m)
      parse_fail("anchor rows must have rank entries");
    std::vector<Expr> r;
    for (const auto& e : row) r.push_back(parse_expr(e, names, "anchor entry"));
    anchor.push_back(std::move(r));
  }

  std::vector<AlgebroidSpec::StructureEntry> structure;
  if (j.contains("structure")) {
    if (!j["structure"].is_array()) parse_fail("structure must be an array");
    for (const auto& e : j["structure"]) {
      if (!e.is_object()) parse_fail("structure entries must be objects");
      structure.push_back({get_positive_int(e, "alpha") - 1, get_positive_int(e, "beta") - 1,
                           get_positive_int(e, "gamma") - 1,
                           parse_expr(e.at("expr"), names, "structure expr")});
    }
  }

  Box box = j.contains("sample_box") ? box_from_json(j["sample_box"], n, "sample_box")
                                     : Box::cube(n);
  return AlgebroidSpec(n, m, std::move(anchor), structure, std::move(box));
}

json qform_to_json(const QForm& omega) {
  json j;
  j["degree"] = omega.degree();
  json comps = json::array();
  const auto tuples = increasing_tuples(omega.rank(), omega.degree());
  const CoordNames names = make_coords("x", 16);  // generous; components are base exprs
  for (size_t t = 0; t < tuples.size(); ++t) {
    if (omega.components()[t].is_zero()) continue;
    json indices = json::array();
    for (int idx : tuples[t]) indices.push_back(idx + 1);
    comps.push_back({{"indices", std::move(indices)},
                     {"expr", omega.components()[t].to_sexpr(names)}});
  }
  j["components"] = std::move(comps);
  return j;
}

QForm qform_from_json(const json& j, int rank) {
  if (!j.is_object() || !j.contains("degree")) parse_fail("q-form needs a degree");
  const int q = j["degree"].get<int>();
  if (q < 0) parse_fail("degree must be >= 0");
  QForm omega = QForm::zero(rank, q);
  const CoordNames names = make_coords("x", 16);
  if (!j.contains("components")) return omega;
  const auto tuples = increasing_tuples(rank, q);
  for (const auto& c : j["components"]) {
    if (!c.is_object() || !c.contains("indices") || !c.contains("expr"))
      parse_fail("component needs indices and expr");
    std::vector<int> idx;
    for (const auto& v : c["indices"]) idx.push_back(v.get<int>() - 1);
    if (static_cast<int>(idx.size()) != q) parse_fail("component index tuple length != degree");
    size_t flat = tuples.size();
    for (size_t t = 0; t < tuples.size(); ++t)
      if (tuples[t] == idx) {
        flat = t;
        break;
      }
    if (flat == tuples.size()) parse_fail("component indices must be strictly increasing");
    omega.component_at(flat) = parse_expr(c["expr"], names, "component expr");
  }
  return omega;
}

json system_to_json(const DirectSystemSpec& sys) {
  json j;
  json levels = json::array();
  for (size_t i = 0; i < sys.depth(); ++i) levels.push_back(algebroid_to_json(sys.level(i)));
  j["levels"] = std::move(levels);
  json base = json::array();
  json fiber = json::array();
  for (size_t i = 0; i + 1 < sys.depth(); ++i) {
    const CoordNames names = sys.level(i).base_coords();
    json eps = json::array();
    for (const Expr& e : sys.base_step(i)) eps.push_back(e.to_sexpr(names));
    base.push_back(std::move(eps));
    json lambda = json::array();
    for (const auto& row : sys.fiber_step(i)) {
      json r = json::array();
      for (const Expr& e : row) r.push_back(e.to_sexpr(names));
      lambda.push_back(std::move(r));
    }
    fiber.push_back(std::move(lambda));
  }
  j["base_bondings"] = std::move(base);
  j["fiber_bondings"] = std::move(fiber);
  return j;
}

DirectSystemSpec system_from_json(const json& j) {
  if (!j.is_object() || !j.contains("levels") || !j["levels"].is_array() || j["levels"].empty())
    parse_fail("direct system needs a nonempty levels array");
  std::vector<AlgebroidSpec> levels;
  for (const auto& l : j["levels"]) levels.push_back(algebroid_from_json(l));
  if (j.contains("depth")) {
    const int depth = get_positive_int(j, "depth");
    if (static_cast<size_t>(depth) > levels.size()) parse_fail("depth exceeds level count");
    levels.erase(levels.begin() + depth, levels.end());
  }

  const bool has_base = j.contains("base_bondings");
  const bool has_fiber = j.contains("fiber_bondings");
  if (!has_base && !has_fiber) return DirectSystemSpec::canonical(std::move(levels));
  if (!has_base || !has_fiber)
    parse_fail("base_bondings and fiber_bondings must be given together");

  const size_t steps = levels.size() - 1;
  if (j["base_bondings"].size() < steps || j["fiber_bondings"].size() < steps)
    parse_fail("need one bonding per consecutive pair");
  std::vector<std::vector<Expr>> base_steps;
  std::vector<std::vector<std::vector<Expr>>> fiber_steps;
  for (size_t i = 0; i < steps; ++i) {
    const CoordNames names = levels[i].base_coords();
    std::vector<Expr> eps;
    for (const auto& e : j["base_bondings"][i]) eps.push_back(parse_expr(e, names, "base bonding"));
    base_steps.push_back(std::move(eps));
    std::vector<std::vector<Expr>> lambda;
    for (const auto& row : j["fiber_bondings"][i]) {
      std::vector<Expr> r;
      for (const auto& e : row) r.push_back(parse_expr(e, names, "fiber bonding"));
      lambda.push_back(std::move(r));
    }
    fiber_steps.push_back(std::move(lambda));
  }
  return DirectSystemSpec(std::move(levels), std::move(base_steps), std::move(fiber_steps));
}

json hamiltonian_to_json(const HamiltonianSystem& sys) {
  const CoordNames names = sys.phase_coords();
  json j;
  j["base_dim"] = sys.base_dim();
  j["rank"] = sys.rank();
  json anchor = json::array();
  for (int i = 0; i < sys.base_dim(); ++i) {
    json row = json::array();
    for (int alpha = 0; alpha < sys.rank(); ++alpha)
      row.push_back(sys.anchor_coef(i, alpha).to_sexpr(names));
    anchor.push_back(std::move(row));
  }
  j["anchor"] = std::move(anchor);
  json structure = json::array();
  for (int a = 0; a < sys.rank(); ++a)
    for (int b = a + 1; b < sys.rank(); ++b)
      for (int g = 0; g < sys.rank(); ++g) {
        const Expr c = sys.structure_coef(a, b, g);
        if (c.is_zero()) continue;
        structure.push_back(
            {{"alpha", a + 1}, {"beta", b + 1}, {"gamma", g + 1}, {"expr", c.to_sexpr(names)}});
      }
  j["structure"] = std::move(structure);
  j["hamiltonian"] = sys.hamiltonian().to_sexpr(names);
  j["domain"] = box_to_json(sys.domain());
  json monitors = json::array();
  for (const auto& [name, q] : sys.monitors()) {
    if (name == "H") continue;  // implied
    monitors.push_back({{"name", name}, {"expr", q.to_sexpr(names)}});
  }
  j["monitors"] = std::move(monitors);
  return j;
}

HamiltonianSystem hamiltonian_from_json(const json& j) {
  if (!j.is_object()) parse_fail("hamiltonian system must be an object");
  const int n = get_positive_int(j, "base_dim");
  const int m = get_positive_int(j, "rank");
  const CoordNames names = concat_coords(make_coords("x", n), make_coords("mu", m));

  if (!j.contains("anchor") || static_cast<int>(j["anchor"].size()) != n)
    parse_fail("anchor must have base_dim rows");
  std::vector<std::vector<Expr>> anchor;
  for (const auto& row : j["anchor"]) {
    if (static_cast<int>(row.size()) != m) parse_fail("anchor rows must have rank entries");
    std::vector<Expr> r;
    for (const auto& e : row) r.push_back(parse_expr(e, names, "anchor entry"));
    anchor.push_back(std::move(r));
  }
  std::vector<HamiltonianSystem::StructureEntry> structure;
  if (j.contains("structure"))
    for (const auto& e : j["structure"])
      structure.push_back({get_positive_int(e, "alpha") - 1, get_positive_int(e, "beta") - 1,
                           get_positive_int(e, "gamma") - 1,
                           parse_expr(e.at("expr"), names, "structure expr")});
  if (!j.contains("hamiltonian")) parse_fail("missing hamiltonian");
  Expr h = parse_expr(j["hamiltonian"], names, "hamiltonian");
  Box domain = j.contains("domain") ? box_from_json(j["domain"], n + m, "domain")
                                    : Box::cube(n + m, 0.5, 1.5);
  HamiltonianSystem sys(n, m, std::move(anchor), structure, std::move(h), std::move(domain));
  if (j.contains("monitors"))
    for (const auto& mon : j["monitors"])
      sys.add_monitor(mon.at("name").get<std::string>(),
                      parse_expr(mon.at("expr"), names, "monitor expr"));
  return sys;
}

Family family_from_json(const json& j, const DirectSystemSpec& sys) {
  if (!j.is_object() || !j.contains("kind") || !j.contains("entries"))
    parse_fail("family needs kind and entries");
  const std::string kind = j["kind"].get<std::string>();
  const auto& entries = j["entries"];
  if (entries.size() != sys.depth()) parse_fail("family needs one entry per level");

  if (kind == "function") {
    FunctionTower fam;
    for (size_t i = 0; i < sys.depth(); ++i)
      fam.per_level.push_back(
          parse_expr(entries[i], sys.level(i).base_coords(), "function entry"));
    return fam;
  }
  if (kind == "section") {
    SectionFamily fam;
    for (size_t i = 0; i < sys.depth(); ++i) {
      Section s;
      for (const auto& e : entries[i])
        s.coeffs.push_back(parse_expr(e, sys.level(i).base_coords(), "section entry"));
      fam.per_level.push_back(std::move(s));
    }
    return fam;
  }
  if (kind == "field") {
    FieldFamily fam;
    for (size_t i = 0; i < sys.depth(); ++i) {
      VectorField v;
      for (const auto& e : entries[i])
        v.comps.push_back(parse_expr(e, sys.level(i).base_coords(), "field entry"));
      fam.per_level.push_back(std::move(v));
    }
    return fam;
  }
  parse_fail("family kind must be function, section or field");
}

json report_to_json(const VerificationReport& report) {
  json j;
  json checks = json::array();
  for (const CheckResult& c : report.checks)
    checks.push_back({{"check", c.check},
                      {"site", c.site},
                      {"max_residual", c.max_residual},
                      {"pass", c.pass}});
  j["checks"] = std::move(checks);
  j["notes"] = report.notes;
  j["pass"] = report.pass();
  return j;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace algkit
