#include "hodgelab/report.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "hodgelab/error.hpp"

namespace hodgelab {

using nlohmann::json;

namespace {

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json mat_json(const Mat3& m) {
  json rows = json::array();
  for (int i = 0; i < 3; ++i) rows.push_back(json::array({m(i, 0), m(i, 1), m(i, 2)}));
  return rows;
}

json groups_json(const std::vector<GroupSummary>& groups) {
  json out = json::array();
  for (const auto& g : groups)
    out.push_back({{"value", g.value}, {"multiplicity", g.multiplicity}, {"eigenvalues", g.eigenvalues}});
  return out;
}

json bound_json(const BoundOutcome& b) {
  return {{"mode", to_string(b.mode)},
          {"lambda_hat", b.lambda_hat},
          {"lower", b.lower},
          {"upper_printed", b.upper_printed},
          {"upper_rederived", b.upper_rederived},
          {"satisfied_printed", b.satisfied_printed},
          {"satisfied_rederived", b.satisfied_rederived},
          {"consistent_printed", b.consistent_printed},
          {"attainment", to_string(b.attainment)},
          {"tolerance", b.tolerance}};
}

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorKind::Config, msg); }

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) config_error(where + " must be a JSON object");
  for (const auto& item : j.items())
    if (!allowed.count(item.key())) config_error("unknown key '" + item.key() + "' in " + where);
}

Vec3 parse_vec(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) config_error(what + " must be an array of 3 numbers");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

Mat3 parse_mat(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) config_error(what + " must be a 3x3 array");
  Mat3 m;
  for (int i = 0; i < 3; ++i) {
    const Vec3 row = parse_vec(j[static_cast<std::size_t>(i)], what);
    m.row(i) = row.transpose();
  }
  return m;
}

FieldKind parse_kind(const std::string& s) {
  for (FieldKind k : {FieldKind::KillingRotation, FieldKind::ConformalGradient,
                      FieldKind::ProjectiveGradient, FieldKind::Affine})
    if (to_string(k) == s) return k;
  config_error("unknown field kind '" + s + "'");
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace

json to_json(const VerificationReport& r) {
  json j;
  j["mesh"] = {{"kind", r.surface.kind == SurfaceKind::Icosphere ? "icosphere" : "spheroid"},
               {"level", r.surface.level},
               {"a", r.surface.a},
               {"c", r.surface.c},
               {"name", r.surface.name()},
               {"vertices", r.vertices},
               {"edges", r.edges},
               {"faces", r.faces},
               {"genus", r.genus},
               {"valid", r.mesh_valid},
               {"star1_nonpositive", r.star1_nonpositive}};
  j["curvature"] = {{"rho", r.rho}, {"P", r.P}, {"defect_sum", r.defect_sum}};
  if (r.rho_exact) j["curvature"]["rho_exact"] = *r.rho_exact;
  if (r.P_exact) j["curvature"]["P_exact"] = *r.P_exact;
  j["spectra"] = {{"scalar", groups_json(r.scalar_groups)}, {"oneform", groups_json(r.oneform_groups)}};
  json fields = json::array();
  for (const auto& f : r.fields) {
    json bounds = json::array();
    for (const auto& b : f.bounds) bounds.push_back(bound_json(b));
    json entry = {{"name", f.name},
                  {"kind", to_string(f.kind)},
                  {"lambda", f.lambda},
                  {"eigenform_residual", f.eigenform_residual},
                  {"eigenform_residual_mass", f.eigenform_residual_mass},
                  {"eigenform", f.eigenform},
                  {"dstar_norm", f.dstar_norm},
                  {"d_norm", f.d_norm},
                  {"class", to_string(f.cls)},
                  {"expected_class", to_string(f.expected)},
                  {"conformal_killing_residual", f.conformal_residual},
                  {"killing_residual", f.killing_residual},
                  {"bounds", bounds},
                  {"identities",
                   {{"yano_2_2", f.yano},
                    {"lichnerowicz_3_2", f.lichnerowicz},
                    {"yano_2_2_mass", f.yano_mass},
                    {"lichnerowicz_3_2_mass", f.lichnerowicz_mass}}}};
    if (!f.bounds_note.empty()) entry["bounds_note"] = f.bounds_note;
    fields.push_back(entry);
  }
  j["fields"] = fields;
  json oracle = json::array();
  for (const auto& o : r.oracle)
    oracle.push_back({{"name", o.name},
                      {"equation", o.equation},
                      {"n", o.n},
                      {"r", o.r},
                      {"residual", o.max_residual},
                      {"expect_zero", o.expect_zero},
                      {"threshold", o.threshold},
                      {"passed", o.passed}});
  j["oracle"] = oracle;
  json mult = json::array();
  for (const auto& m : r.multiplicity)
    mult.push_back({{"name", m.name},
                    {"measured", m.measured},
                    {"bound", m.bound},
                    {"satisfied", m.satisfied},
                    {"equality", m.equality},
                    {"detail", m.detail}});
  j["multiplicity"] = mult;
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name},
                      {"passed", c.passed},
                      {"mandatory", c.mandatory},
                      {"status", c.status},
                      {"detail", c.detail}});
  j["checks"] = checks;
  j["seed"] = r.seed;
  j["pass"] = r.pass();
  j["timestamp"] = r.timestamp;
  return j;
}

json to_json(const RunConfig& c) {
  json surface = {{"kind", c.surface.kind == SurfaceKind::Icosphere ? "icosphere" : "spheroid"},
                  {"level", c.surface.level}};
  if (c.surface.kind == SurfaceKind::Icosphere) {
    surface["radius"] = c.surface.a;
  } else {
    surface["a"] = c.surface.a;
    surface["c"] = c.surface.c;
  }
  json fields = json::array();
  for (const auto& f : c.fields) {
    json e = {{"name", f.name}, {"kind", to_string(f.kind)}};
    if (f.kind == FieldKind::KillingRotation) e["axis"] = vec_json(f.vector);
    if (f.kind == FieldKind::ConformalGradient) e["direction"] = vec_json(f.vector);
    if (f.kind == FieldKind::ProjectiveGradient) e["Q"] = mat_json(f.Q);
    if (f.kind == FieldKind::Affine) {
      e["M"] = mat_json(f.Q);
      e["v"] = vec_json(f.vector);
    }
    fields.push_back(e);
  }
  const Tolerances& t = c.tolerances;
  return {{"surface", surface},
          {"scalar_eigenpairs", c.scalar_eigenpairs},
          {"oneform_eigenpairs", c.oneform_eigenpairs},
          {"levels", c.levels},
          {"fields", fields},
          {"tolerances",
           {{"bound_rel", t.bound_rel},
            {"class_tol", t.class_tol},
            {"group_rel_gap", t.group_rel_gap},
            {"solver_tol", t.solver_tol},
            {"eigenform_tol", t.eigenform_tol},
            {"identity_tol", t.identity_tol}}},
          {"seed", c.seed},
          {"report", c.report_path},
          {"table", c.table_path}};
}

RunConfig parse_config(const json& j) {
  RunConfig c;
  try {
    reject_unknown(j,
                   {"surface", "scalar_eigenpairs", "oneform_eigenpairs", "levels", "fields",
                    "tolerances", "seed", "report", "table"},
                   "config");
    if (j.contains("surface")) {
      const json& s = j["surface"];
      reject_unknown(s, {"kind", "level", "radius", "a", "c"}, "surface");
      const std::string kind = s.value("kind", std::string("icosphere"));
      const int level = s.value("level", c.surface.level);
      if (kind == "icosphere") {
        if (s.contains("a") || s.contains("c")) config_error("icosphere takes 'radius', not 'a'/'c'");
        c.surface = SurfaceSpec::icosphere(level, s.value("radius", 1.0));
      } else if (kind == "spheroid") {
        if (s.contains("radius")) config_error("spheroid takes 'a' and 'c', not 'radius'");
        c.surface = SurfaceSpec::spheroid(level, s.value("a", 1.0), s.value("c", 2.0));
      } else {
        config_error("unknown surface kind '" + kind + "'");
      }
    }
    if (j.contains("scalar_eigenpairs")) c.scalar_eigenpairs = j["scalar_eigenpairs"].get<int>();
    if (j.contains("oneform_eigenpairs")) c.oneform_eigenpairs = j["oneform_eigenpairs"].get<int>();
    if (j.contains("levels")) c.levels = j["levels"].get<std::vector<int>>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("report")) c.report_path = j["report"].get<std::string>();
    if (j.contains("table")) c.table_path = j["table"].get<std::string>();
    if (j.contains("tolerances")) {
      const json& t = j["tolerances"];
      reject_unknown(t,
                     {"bound_rel", "class_tol", "group_rel_gap", "solver_tol", "eigenform_tol",
                      "identity_tol"},
                     "tolerances");
      Tolerances& o = c.tolerances;
      o.bound_rel = t.value("bound_rel", o.bound_rel);
      o.class_tol = t.value("class_tol", o.class_tol);
      o.group_rel_gap = t.value("group_rel_gap", o.group_rel_gap);
      o.solver_tol = t.value("solver_tol", o.solver_tol);
      o.eigenform_tol = t.value("eigenform_tol", o.eigenform_tol);
      o.identity_tol = t.value("identity_tol", o.identity_tol);
    }
    if (j.contains("fields")) {
      if (!j["fields"].is_array()) config_error("'fields' must be an array");
      for (const json& f : j["fields"]) {
        reject_unknown(f, {"name", "kind", "axis", "direction", "Q", "M", "v"}, "field");
        FieldSpec spec;
        spec.kind = parse_kind(f.at("kind").get<std::string>());
        spec.name = f.value("name", to_string(spec.kind));
        switch (spec.kind) {
          case FieldKind::KillingRotation: spec.vector = parse_vec(f.at("axis"), "axis"); break;
          case FieldKind::ConformalGradient:
            spec.vector = parse_vec(f.at("direction"), "direction");
            break;
          case FieldKind::ProjectiveGradient: spec.Q = parse_mat(f.at("Q"), "Q"); break;
          case FieldKind::Affine:
            spec.Q = parse_mat(f.at("M"), "M");
            spec.vector = parse_vec(f.at("v"), "v");
            break;
        }
        make_field(spec, c.surface);  // validates axis, Q symmetry, ...
        c.fields.push_back(spec);
      }
    }
  } catch (const json::exception& e) {
    config_error(std::string("invalid config: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ResourceGuard) throw;
    config_error(std::string("invalid config: ") + e.what());
  }
  try {
    c.validate();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ResourceGuard) throw;
    config_error(e.what());
  }
  return c;
}

RunConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    config_error(std::string("malformed config JSON: ") + e.what());
  }
  return parse_config(j);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string dump_report(const json& report, bool with_timestamp) {
  json copy = report;
  if (!with_timestamp) copy.erase("timestamp");
  return copy.dump(2) + "\n";
}

std::string render_table(const json& r) {
  std::ostringstream out;
  const json& mesh = r.at("mesh");
  out << "surface   " << mesh.at("name").get<std::string>() << "  V=" << mesh.at("vertices")
      << " E=" << mesh.at("edges") << " F=" << mesh.at("faces") << "\n";
  const json& curv = r.at("curvature");
  out << "curvature rho=" << num(curv.at("rho").get<double>())
      << " P=" << num(curv.at("P").get<double>());
  if (curv.contains("rho_exact"))
    out << "  (exact " << num(curv.at("rho_exact").get<double>()) << ", "
        << num(curv.at("P_exact").get<double>()) << ")";
  out << "\n";
  for (const char* key : {"scalar", "oneform"}) {
    out << (std::string(key) == "scalar" ? "scalar spectrum " : "1-form spectrum ");
    for (const json& g : r.at("spectra").at(key))
      out << " " << num(g.at("value").get<double>()) << " x" << g.at("multiplicity");
    out << "\n";
  }

  out << "\n" << pad("field", 12) << pad("lambda", 11) << pad("eig.res", 10) << pad("|d*w|", 10)
      << pad("|dw|", 10) << pad("class", 10) << pad("yano", 10) << "lichnerowicz\n";
  for (const json& f : r.at("fields")) {
    const json& id = f.at("identities");
    out << pad(f.at("name").get<std::string>(), 12) << pad(num(f.at("lambda").get<double>()), 11)
        << pad(sci(f.at("eigenform_residual").get<double>()), 10)
        << pad(sci(f.at("dstar_norm").get<double>()), 10) << pad(sci(f.at("d_norm").get<double>()), 10)
        << pad(f.at("class").get<std::string>(), 10) << pad(sci(id.at("yano_2_2").get<double>()), 10)
        << sci(id.at("lichnerowicz_3_2").get<double>()) << "\n";
  }

  out << "\n" << pad("bounds", 12) << pad("mode", 12) << pad("lower", 10) << pad("printed", 10)
      << pad("rederived", 11) << "attainment\n";
  for (const json& f : r.at("fields")) {
    if (f.contains("bounds_note")) {
      out << pad(f.at("name").get<std::string>(), 12) << "skipped: "
          << f.at("bounds_note").get<std::string>() << "\n";
      continue;
    }
    for (const json& b : f.at("bounds"))
      out << pad(f.at("name").get<std::string>(), 12) << pad(b.at("mode").get<std::string>(), 12)
          << pad(num(b.at("lower").get<double>()), 10)
          << pad(num(b.at("upper_printed").get<double>()), 10)
          << pad(num(b.at("upper_rederived").get<double>()), 11)
          << b.at("attainment").get<std::string>() << "\n";
  }

  out << "\nchecks\n";
  int oracle_total = 0, oracle_passed = 0;
  for (const json& c : r.at("checks")) {
    const std::string name = c.at("name").get<std::string>();
    if (name.rfind("oracle ", 0) == 0) {
      ++oracle_total;
      if (c.at("passed").get<bool>()) {
        ++oracle_passed;
        continue;
      }
    }
    out << "  " << name << ": " << c.at("status").get<std::string>() << "  "
        << c.at("detail").get<std::string>() << "\n";
  }
  out << "  sphere oracle: " << oracle_passed << "/" << oracle_total << " passed\n";
  out << "\noverall: " << (r.at("pass").get<bool>() ? "PASS" : "FAIL") << "\n";
  return out.str();
}

}  // namespace hodgelab
