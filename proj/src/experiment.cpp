#include "feec/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "feec/catalog.hpp"
#include "feec/vecproxy.hpp"

namespace feec {

using nlohmann::json;

namespace {

class Reader {
public:
  explicit Reader(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(const std::string& path, const std::string& msg) const {
    throw ConfigError(origin_ + ": field '" + path + "': " + msg);
  }

  void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) const {
    if (!obj.is_object()) fail(path, "expected an object");
    for (const auto& [key, value] : obj.items())
      if (!allowed.count(key)) fail(path.empty() ? key : path + "." + key, "unknown key");
  }

  const json* find(const json& obj, const std::string& key) const {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
  }

  std::string string(const json& obj, const std::string& key, const std::string& path, const std::string* def) const {
    const json* v = find(obj, key);
    if (!v) {
      if (!def) fail(path, "missing required field");
      return *def;
    }
    if (!v->is_string()) fail(path, "expected a string");
    return v->get<std::string>();
  }

  int integer(const json& obj, const std::string& key, const std::string& path, std::optional<int> def) const {
    const json* v = find(obj, key);
    if (!v) {
      if (!def) fail(path, "missing required field");
      return *def;
    }
    if (!v->is_number_integer()) fail(path, "expected an integer");
    return v->get<int>();
  }

  double number(const json& v, const std::string& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
  }

  bool boolean(const json& obj, const std::string& key, const std::string& path, bool def) const {
    const json* v = find(obj, key);
    if (!v) return def;
    if (!v->is_boolean()) fail(path, "expected true or false");
    return v->get<bool>();
  }

private:
  std::string origin_;
};

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
  return out;
}

std::string resolve_mesh_path(const ExperimentConfig& c) {
  namespace fs = std::filesystem;
  const fs::path p(c.mesh);
  if (p.is_relative() && fs::exists(fs::path(c.base_dir) / p)) return (fs::path(c.base_dir) / p).string();
  return c.mesh;
}

SimplicialComplex load_mesh(const ExperimentConfig& c) {
  const auto names = mesh_generator_names();
  if (std::find(names.begin(), names.end(), c.mesh) != names.end()) return make_mesh(c.mesh);
  return read_mesh_file(resolve_mesh_path(c));
}

NamedSpaceInfo space_info(const ExperimentConfig& c, int n) {
  if (!c.space_name.empty()) return named_space_info(c.space_name, n);
  return {c.family, c.k, ProxyKind::Scalar};
}

Band parse_band(const Reader& rd, const json& obj, const std::string& path) {
  rd.check_keys(obj, path, {"min", "max"});
  Band b;
  if (obj.contains("min")) b.min = rd.number(obj["min"], path + ".min");
  if (obj.contains("max")) b.max = rd.number(obj["max"], path + ".max");
  if (b.min && b.max && *b.min > *b.max) rd.fail(path, "min exceeds max");
  return b;
}

void parse_assertions(const Reader& rd, const json& a, ExperimentConfig& c, const std::set<std::string>& norms) {
  rd.check_keys(a, "assert",
                {"slope", "max_slope", "max_error", "local_global_ratio", "stability", "boundary_residual"});
  auto norm_key = [&](const std::string& path, const std::string& id) {
    if (!norms.count(id)) rd.fail(path, "norm '" + id + "' is not among the requested norms");
  };
  for (const char* key : {"slope", "max_slope"}) {
    if (!a.contains(key)) continue;
    const std::string path = std::string("assert.") + key;
    if (c.levels < 3) rd.fail(path, "slopes need >= 3 levels (levels = " + std::to_string(c.levels) + ")");
    if (!a[key].is_object()) rd.fail(path, "expected an object keyed by norm");
    for (const auto& [id, v] : a[key].items()) {
      norm_key(path + "." + id, id);
      if (std::string(key) == "max_slope") {
        c.max_slope[id] = rd.number(v, path + "." + id);
      } else {
        rd.check_keys(v, path + "." + id, {"expected", "tolerance"});
        if (!v.contains("expected")) rd.fail(path + "." + id + ".expected", "missing required field");
        SlopeAssertion s;
        s.expected = rd.number(v["expected"], path + "." + id + ".expected");
        if (v.contains("tolerance")) s.tolerance = rd.number(v["tolerance"], path + "." + id + ".tolerance");
        if (!(s.tolerance >= 0.0)) rd.fail(path + "." + id + ".tolerance", "must be nonnegative");
        c.slope[id] = s;
      }
    }
  }
  if (a.contains("max_error")) {
    if (!a["max_error"].is_object()) rd.fail("assert.max_error", "expected an object keyed by norm");
    for (const auto& [id, v] : a["max_error"].items()) {
      norm_key("assert.max_error." + id, id);
      c.max_error[id] = rd.number(v, "assert.max_error." + id);
    }
  }
  if (a.contains("local_global_ratio")) {
    if (!c.best_approximation)
      rd.fail("assert.local_global_ratio", "requires measure.best_approximation = true");
    c.local_global_ratio = parse_band(rd, a["local_global_ratio"], "assert.local_global_ratio");
  }
  if (a.contains("stability")) {
    if (!c.stability) rd.fail("assert.stability", "requires measure.stability = true");
    c.stability_band = parse_band(rd, a["stability"], "assert.stability");
  }
  if (a.contains("boundary_residual")) {
    if (c.boundary == "none" || c.boundary_tests <= 0)
      rd.fail("assert.boundary_residual", "requires a boundary selector other than none and boundary_tests > 0");
    c.boundary_residual = parse_band(rd, a["boundary_residual"], "assert.boundary_residual");
  }
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // Line and column of the offending byte.
    int line = 1, column = 1;
    for (size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError(origin + ": line " + std::to_string(line) + ", column " + std::to_string(column) +
                      ": malformed JSON (" + e.what() + ")");
  }
  const Reader rd(origin);
  rd.check_keys(j, "", {"mesh", "first_level", "levels", "space", "boundary", "weights", "backend", "field", "norms",
                        "cells", "measure", "seed", "output", "assert"});
  ExperimentConfig c;
  c.mesh = rd.string(j, "mesh", "mesh", nullptr);
  c.first_level = rd.integer(j, "first_level", "first_level", 0);
  c.levels = rd.integer(j, "levels", "levels", 1);
  if (c.levels < 1) rd.fail("levels", "must be at least 1");
  if (c.first_level < 0) rd.fail("first_level", "must be nonnegative");
  if (c.first_level + c.levels > 8) rd.fail("levels", "first_level + levels must not exceed 8");

  if (!j.contains("space")) rd.fail("space", "missing required field");
  const json& sp = j["space"];
  rd.check_keys(sp, "space", {"name", "family", "r", "k"});
  c.r = rd.integer(sp, "r", "space.r", std::nullopt);
  if (sp.contains("name")) {
    if (sp.contains("family") || sp.contains("k")) rd.fail("space", "give either name or family and k");
    c.space_name = rd.string(sp, "name", "space.name", nullptr);
    const auto names = named_space_names();
    if (std::find(names.begin(), names.end(), c.space_name) == names.end())
      rd.fail("space.name", "unknown named space '" + c.space_name + "' (expected " + join(names) + ")");
  } else {
    const std::string fam = rd.string(sp, "family", "space.family", nullptr);
    try {
      c.family = parse_family(fam);
    } catch (const std::invalid_argument& e) {
      rd.fail("space.family", e.what());
    }
    c.k = rd.integer(sp, "k", "space.k", std::nullopt);
  }

  static const std::string none = "none", eg = "eg", taylor = "taylor", all = "all";
  c.boundary = rd.string(j, "boundary", "boundary", &none);
  const auto selectors = boundary_selector_names();
  if (std::find(selectors.begin(), selectors.end(), c.boundary) == selectors.end())
    rd.fail("boundary", "unknown selector '" + c.boundary + "' (expected " + join(selectors) + ")");
  const std::string w = rd.string(j, "weights", "weights", &eg);
  if (w != "eg" && w != "clement") rd.fail("weights", "expected eg or clement");
  c.weights = parse_weight_kind(w);
  try {
    c.backend = parse_backend(rd.string(j, "backend", "backend", &taylor));
  } catch (const std::invalid_argument& e) {
    rd.fail("backend", e.what());
  }
  c.field = rd.string(j, "field", "field", nullptr);

  std::set<std::string> norm_ids;
  if (j.contains("norms")) {
    if (!j["norms"].is_array() || j["norms"].empty()) rd.fail("norms", "expected a nonempty list of norm ids");
    c.norms.clear();
    for (size_t i = 0; i < j["norms"].size(); ++i) {
      const std::string path = "norms[" + std::to_string(i) + "]";
      if (!j["norms"][i].is_string()) rd.fail(path, "expected a string");
      try {
        c.norms.push_back(parse_norm(j["norms"][i].get<std::string>()));
      } catch (const std::invalid_argument& e) {
        rd.fail(path, e.what());
      }
      if (!norm_ids.insert(norm_id(c.norms.back())).second) rd.fail(path, "duplicate norm");
    }
  } else {
    norm_ids.insert(norm_id(c.norms[0]));
  }
  c.cells = rd.string(j, "cells", "cells", &all);
  if (c.cells != "all" && c.cells != "boundary_adjacent") rd.fail("cells", "expected all or boundary_adjacent");
  if (c.cells == "boundary_adjacent" && c.boundary == "none")
    rd.fail("cells", "boundary_adjacent requires a boundary selector other than none");

  if (j.contains("measure")) {
    const json& m = j["measure"];
    rd.check_keys(m, "measure", {"stability", "best_approximation", "boundary_tests"});
    c.stability = rd.boolean(m, "stability", "measure.stability", true);
    c.best_approximation = rd.boolean(m, "best_approximation", "measure.best_approximation", true);
    c.boundary_tests = rd.integer(m, "boundary_tests", "measure.boundary_tests", 10);
    if (c.boundary_tests < 0) rd.fail("measure.boundary_tests", "must be nonnegative");
  }
  const int seed = rd.integer(j, "seed", "seed", 1);
  if (seed < 0) rd.fail("seed", "must be nonnegative");
  c.seed = static_cast<unsigned>(seed);
  if (j.contains("output")) {
    const json& o = j["output"];
    rd.check_keys(o, "output", {"dir", "report", "csv"});
    static const std::string dot = ".", report = "report.json", csv = "errors.csv";
    c.output_dir = rd.string(o, "dir", "output.dir", &dot);
    c.report_file = rd.string(o, "report", "output.report", &report);
    c.csv_file = rd.string(o, "csv", "output.csv", &csv);
  }
  if (j.contains("assert")) parse_assertions(rd, j["assert"], c, norm_ids);
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open configuration file");
  std::stringstream ss;
  ss << in.rdbuf();
  ExperimentConfig c = parse_experiment_config(ss.str(), path);
  c.base_dir = std::filesystem::path(path).parent_path().string();
  if (c.base_dir.empty()) c.base_dir = ".";
  return c;
}

namespace {

// Checks that need the mesh: dimension-dependent names and space parameters.
SimplicialComplex validated_mesh(const ExperimentConfig& c) {
  SimplicialComplex mesh;
  try {
    mesh = load_mesh(c);
  } catch (const std::exception& e) {
    throw ConfigError("field 'mesh': " + std::string(e.what()) + " (generators: " + join(mesh_generator_names()) +
                      ")");
  }
  const int n = mesh.dimension();
  NamedSpaceInfo info;
  try {
    info = space_info(c, n);
    FESpace probe(mesh, info.family, c.r, info.k);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("field 'space': " + std::string(e.what()));
  }
  try {
    make_catalog_field(c.field, n, info.k);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("field 'field': " + std::string(e.what()) + " (catalog: " + join(field_names()) + ")");
  }
  return mesh;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json config_echo(const ExperimentConfig& c, int k) {
  json space = c.space_name.empty() ? json{{"family", family_name(c.family)}, {"r", c.r}, {"k", k}}
                                    : json{{"name", c.space_name}, {"r", c.r}};
  json norms = json::array();
  for (const auto& nm : c.norms) norms.push_back(norm_id(nm));
  return {{"mesh", c.mesh},
          {"first_level", c.first_level},
          {"levels", c.levels},
          {"space", space},
          {"boundary", c.boundary},
          {"weights", weight_kind_name(c.weights)},
          {"backend", backend_name(c.backend)},
          {"field", c.field},
          {"norms", norms},
          {"cells", c.cells},
          {"measure",
           {{"stability", c.stability}, {"best_approximation", c.best_approximation}, {"boundary_tests", c.boundary_tests}}},
          {"seed", c.seed}};
}

class Checker {
public:
  Checker(ExperimentResult& res, json& out) : res_(res), out_(out) {}

  void band(const std::string& name, double measured, const Band& b) {
    if (!b.min && !b.max) return;
    const bool ok = std::isfinite(measured) && (!b.min || measured >= *b.min) && (!b.max || measured <= *b.max);
    json e{{"name", name}, {"measured", number_or_null(measured)}, {"passed", ok}};
    if (b.min) e["min"] = *b.min;
    if (b.max) e["max"] = *b.max;
    record(e, ok, name + " = " + format_number(measured) + " outside [" + (b.min ? format_number(*b.min) : "-inf") +
                      ", " + (b.max ? format_number(*b.max) : "inf") + "]");
  }

  void slope(const std::string& id, double measured, const SlopeAssertion& s) {
    const bool ok = std::isfinite(measured) && std::abs(measured - s.expected) <= s.tolerance;
    record({{"name", "slope " + id},
            {"measured", number_or_null(measured)},
            {"expected", s.expected},
            {"tolerance", s.tolerance},
            {"passed", ok}},
           ok,
           "slope " + id + " = " + format_number(measured) + ", expected " + format_number(s.expected) + " +- " +
               format_number(s.tolerance));
  }

private:
  void record(json e, bool ok, const std::string& failure) {
    out_.push_back(std::move(e));
    if (!ok) res_.failures.push_back(failure);
  }

  ExperimentResult& res_;
  json& out_;
};

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& c) {
  SimplicialComplex mesh = validated_mesh(c);
  const int n = mesh.dimension();
  const NamedSpaceInfo info = space_info(c, n);
  const FieldSample field = make_catalog_field(c.field, n, info.k);
  const FieldSample dfield = exterior_derivative(field);
  for (int i = 0; i < c.first_level; ++i) mesh = refine_uniform(mesh);

  ExperimentResult res;
  json levels = json::array();
  std::vector<double> hs;
  std::vector<std::vector<double>> errs(c.norms.size());
  std::string label, note;
  std::vector<double> ratios, stabilities, residuals;

  for (int l = 0; l < c.levels; ++l) {
    if (l > 0) mesh = refine_uniform(mesh);
    const int level = c.first_level + l;
    const auto U = named_boundary(mesh, c.boundary);
    FESpace space(mesh, info.family, c.r, info.k, U);
    label = c.space_name.empty() ? space.label() : c.space_name + std::to_string(c.r);
    note = space.note();
    const auto weights = make_weights(c.weights, mesh, U);
    const FEFunction u = project(space, field, weights, c.backend);
    const auto cells = c.cells == "all" ? std::vector<int>{} : cells_touching(mesh, U);
    const ErrorReport er = error_report(u, field, c.norms, cells);

    json rec{{"level", level}, {"h_max", mesh.h_max()}, {"num_cells", mesh.num_cells()}, {"num_dofs", space.num_active()}};
    json errors = json::object();
    std::ostringstream line;
    line << "level " << level << ": h_max " << format_number(mesh.h_max()) << ", " << mesh.num_cells() << " cells, "
         << space.num_active() << " dofs";
    for (size_t i = 0; i < c.norms.size(); ++i) {
      errors[norm_id(c.norms[i])] = er.global[i];
      errs[i].push_back(er.global[i]);
      line << ", " << norm_id(c.norms[i]) << " " << format_number(er.global[i]);
    }
    rec["errors"] = errors;
    hs.push_back(mesh.h_max());

    if (c.stability) {
      const double s = stability_constant(space, weights).constant;
      rec["stability"] = s;
      stabilities.push_back(s);
      line << ", stability " << format_number(s);
    }
    if (c.best_approximation) {
      const auto b = best_approximation(space, field, dfield);
      const double l2 = error_report(u, field, {{0, 2.0}}).global[0];
      const double qo = b.global > 1e-14 ? l2 / b.global : std::numeric_limits<double>::quiet_NaN();
      rec["best_approximation"] = {{"global", b.global},
                                   {"local_total", b.local_total},
                                   {"ratio", b.ratio},
                                   {"quasi_optimality", number_or_null(qo)}};
      ratios.push_back(b.ratio);
      line << ", E2 " << format_number(b.global) << ", local/global ratio " << format_number(b.ratio);
    }
    if (c.boundary != "none" && c.boundary_tests > 0 && info.k < n) {
      const auto bt = weak_boundary_residual(u, c.boundary_tests, c.seed);
      rec["boundary_residual"] = {{"max_relative", bt.max_relative}, {"num_tests", bt.num_tests}};
      residuals.push_back(bt.max_relative);
      line << ", boundary residual " << format_number(bt.max_relative);
    }
    levels.push_back(rec);
    res.log.push_back(line.str());
  }

  json slopes = json::object();
  std::vector<double> slope_values(c.norms.size(), std::numeric_limits<double>::quiet_NaN());
  if (hs.size() >= 3)
    for (size_t i = 0; i < c.norms.size(); ++i) {
      slope_values[i] = fit_slope(hs, errs[i]);
      slopes[norm_id(c.norms[i])] = number_or_null(slope_values[i]);
      res.log.push_back("slope " + norm_id(c.norms[i]) + " " + format_number(slope_values[i]));
    }

  json assertions = json::array();
  Checker check(res, assertions);
  for (size_t i = 0; i < c.norms.size(); ++i) {
    const std::string id = norm_id(c.norms[i]);
    if (auto it = c.slope.find(id); it != c.slope.end()) check.slope(id, slope_values[i], it->second);
    if (auto it = c.max_slope.find(id); it != c.max_slope.end())
      check.band("slope " + id, slope_values[i], Band{std::nullopt, it->second});
    if (auto it = c.max_error.find(id); it != c.max_error.end())
      check.band("final error " + id, errs[i].back(), Band{std::nullopt, it->second});
  }
  for (size_t l = 0; l < ratios.size(); ++l)
    check.band("local/global ratio at level " + std::to_string(c.first_level + l), ratios[l], c.local_global_ratio);
  for (size_t l = 0; l < stabilities.size(); ++l)
    check.band("stability at level " + std::to_string(c.first_level + l), stabilities[l], c.stability_band);
  for (size_t l = 0; l < residuals.size(); ++l)
    check.band("boundary residual at level " + std::to_string(c.first_level + l), residuals[l], c.boundary_residual);

  json norms = json::array();
  for (const auto& nm : c.norms) norms.push_back(norm_id(nm));
  res.report = {{"generated_at", utc_timestamp()},
                {"config", config_echo(c, info.k)},
                {"dimension", n},
                {"space", label},
                {"space_note", note},
                {"weights", weight_kind_name(c.weights)},
                {"backend", backend_name(c.backend)},
                {"field", c.field},
                {"norms", norms},
                {"levels", levels},
                {"slopes", slopes},
                {"assertions", assertions},
                {"passed", res.passed()}};

  std::ostringstream csv;
  csv << kCsvHeader << "\n";
  for (size_t l = 0; l < hs.size(); ++l)
    for (size_t i = 0; i < c.norms.size(); ++i) {
      csv << c.first_level + l << "," << format_number(hs[l]) << "," << norm_id(c.norms[i]) << "," << label << ","
          << weight_kind_name(c.weights) << "," << backend_name(c.backend) << "," << format_number(errs[i][l]) << ",";
      if (l + 1 == hs.size() && hs.size() >= 3) csv << format_number(slope_values[i]);
      csv << "\n";
    }
  res.csv = csv.str();
  return res;
}

std::string catalog_listing() {
  std::vector<std::string> norms;
  for (int s = 0; s <= 1; ++s)
    for (double p : {1.0, 2.0, kInfinity}) norms.push_back(norm_id({s, p}));
  const std::vector<std::pair<std::string, std::vector<std::string>>> sections{
      {"backends", {"l2", "taylor"}},
      {"boundaries", boundary_selector_names()},
      {"families", {"P", "Pminus"}},
      {"fields", field_names()},
      {"meshes", mesh_generator_names()},
      {"norms", norms},
      {"spaces", named_space_names()},
      {"weights", {"clement", "eg"}},
  };
  std::ostringstream out;
  for (auto [title, items] : sections) {
    std::sort(items.begin(), items.end());
    out << title << ":\n";
    for (const auto& it : items) out << "  " << it << "\n";
  }
  return out.str();
}

}  // namespace feec
