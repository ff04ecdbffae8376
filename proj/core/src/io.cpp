#include "wbary/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "wbary/error.hpp"

namespace wbary::io {

using nlohmann::json;

namespace {

[[noreturn]] void parse_error(const std::string& msg) { throw Error(ErrorKind::Parse, msg); }

const json& field(const json& j, const char* name, const std::string& where) {
  if (!j.is_object() || !j.contains(name)) parse_error(where + ": missing field '" + name + "'");
  return j.at(name);
}

double as_real(const json& j, const std::string& where) {
  if (!j.is_number()) parse_error(where + " must be a number");
  return j.get<double>();
}

std::vector<double> as_reals(const json& j, const std::string& where) {
  if (!j.is_array()) parse_error(where + " must be an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(as_real(j[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

Space parse_space(const json& j) {
  const std::string type = field(j, "type", "space").is_string() ? j.at("type").get<std::string>() : "";
  if (type == "euclidean") {
    const json& d = field(j, "dim", "space");
    if (!d.is_number_integer() || d.get<long long>() <= 0) parse_error("space.dim must be a positive integer");
    return Space::euclidean(d.get<std::size_t>());
  }
  if (type == "metric") {
    const json& pts = field(j, "points", "space");
    if (!pts.is_array()) parse_error("space.points must be an array of labels");
    std::vector<std::string> labels;
    for (const auto& p : pts) {
      if (p.is_string()) {
        labels.push_back(p.get<std::string>());
      } else if (p.is_number_integer()) {
        labels.push_back(std::to_string(p.get<long long>()));
      } else {
        parse_error("space.points entries must be strings");
      }
    }
    const json& dist = field(j, "dist", "space");
    if (!dist.is_array()) parse_error("space.dist must be a matrix");
    std::vector<std::vector<double>> rows;
    for (std::size_t r = 0; r < dist.size(); ++r) rows.push_back(as_reals(dist[r], "space.dist[" + std::to_string(r) + "]"));
    return Space(MetricMatrix(std::move(labels), std::move(rows)));
  }
  parse_error("space.type must be \"euclidean\" or \"metric\"");
}

json space_json(const Space& s) {
  if (s.is_euclidean()) return {{"type", "euclidean"}, {"dim", s.point_dim()}};
  const auto& m = s.metric();
  json dist = json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.size(); ++j) row.push_back(m.at(i, j));
    dist.push_back(row);
  }
  return {{"type", "metric"}, {"points", m.labels()}, {"dist", dist}};
}

Point parse_point(const json& j, const Space& s, const std::string& where) {
  if (!s.is_euclidean()) {
    if (j.is_string()) return {static_cast<double>(s.metric().index_of(j.get<std::string>()))};
    if (j.is_number_integer()) return {static_cast<double>(j.get<long long>())};
    parse_error(where + " must be a point label");
  }
  if (j.is_number() && s.point_dim() == 1) return {j.get<double>()};
  return as_reals(j, where);
}

json point_json(const Space& s, const Point& x) {
  if (!s.is_euclidean()) return s.metric().labels().at(static_cast<std::size_t>(x[0]));
  return x;
}

DiscreteMeasure parse_measure_body(const json& j, const Space& s, WeightTolerance tol, const std::string& where) {
  const json& atoms = field(j, "atoms", where);
  if (!atoms.is_array()) parse_error(where + ".atoms must be an array");
  DiscreteMeasure m;
  for (std::size_t k = 0; k < atoms.size(); ++k)
    m.atoms.push_back(parse_point(atoms[k], s, where + ".atoms[" + std::to_string(k) + "]"));
  m.weights = as_reals(field(j, "weights", where), where + ".weights");
  try {
    return validate_measure(m, s, tol);
  } catch (const Error& e) {
    throw Error(e.kind(), where + ": " + e.detail());
  }
}

json measure_json(const Space& s, const DiscreteMeasure& m, bool with_space) {
  json atoms = json::array();
  for (const auto& a : m.atoms) atoms.push_back(point_json(s, a));
  json out;
  if (with_space) out["space"] = space_json(s);
  out["atoms"] = atoms;
  out["weights"] = m.weights;
  return out;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    parse_error(std::string("malformed JSON: ") + e.what());
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

ScalarLaw parse_law(const json& j, const std::string& where) {
  if (j.is_number()) return ScalarLaw::constant(j.get<double>());
  if (!j.is_object() || !j.contains("law") || !j.at("law").is_string()) {
    throw Error(ErrorKind::InvalidConfig, where + " must be a number or an object with a 'law'");
  }
  auto num = [&](const char* name) {
    if (!j.contains(name) || !j.at(name).is_number()) {
      throw Error(ErrorKind::InvalidConfig, where + "." + name + " must be a number");
    }
    return j.at(name).get<double>();
  };
  const std::string law = j.at("law").get<std::string>();
  if (law == "constant") return ScalarLaw::constant(num("value"));
  if (law == "uniform") {
    const double lo = num("low"), hi = num("high");
    if (hi < lo) throw Error(ErrorKind::InvalidConfig, where + ": high < low");
    return ScalarLaw::uniform(lo, hi);
  }
  if (law == "normal") return ScalarLaw::normal(num("mean"), num("sd"));
  if (law == "lognormal") return {ScalarLaw::Kind::LogNormal, num("mu"), num("sigma"), false};
  if (law == "two_point") {
    const bool balanced = j.contains("balanced") && j.at("balanced").is_boolean() && j.at("balanced").get<bool>();
    return ScalarLaw::two_point(num("value"), balanced);
  }
  throw Error(ErrorKind::InvalidConfig, where + ".law '" + law + "' is not one of constant, uniform, normal, "
                                                               "lognormal, two_point");
}

DeformationSpec parse_deformation(const json& j, std::size_t dim) {
  if (!j.is_object()) throw Error(ErrorKind::InvalidConfig, "deformation must be an object");
  DeformationSpec spec;
  spec.dim = dim;
  const std::string kind = j.value("kind", std::string("identity"));
  if (kind == "identity") {
    spec.kind = DeformationSpec::Kind::Identity;
  } else if (kind == "translation") {
    spec.kind = DeformationSpec::Kind::Translation;
  } else if (kind == "scaling") {
    spec.kind = DeformationSpec::Kind::Scaling;
  } else if (kind == "affine") {
    spec.kind = DeformationSpec::Kind::Affine;
  } else if (kind == "monotone-1d-spline" || kind == "monotone_spline") {
    spec.kind = DeformationSpec::Kind::MonotoneSpline;
  } else {
    throw Error(ErrorKind::InvalidConfig, "deformation.kind '" + kind +
                                              "' is not one of identity, translation, scaling, affine, "
                                              "monotone-1d-spline");
  }
  if (j.contains("shift")) spec.shift = parse_law(j.at("shift"), "deformation.shift");
  if (j.contains("factor")) spec.factor = parse_law(j.at("factor"), "deformation.factor");
  if (j.contains("perturbation")) spec.perturbation = parse_law(j.at("perturbation"), "deformation.perturbation");
  if (j.contains("log_slope")) spec.log_slope = parse_law(j.at("log_slope"), "deformation.log_slope");
  try {
    if (j.contains("center")) spec.center = as_reals(j.at("center"), "deformation.center");
    if (j.contains("knots")) spec.knots = as_reals(j.at("knots"), "deformation.knots");
  } catch (const Error& e) {
    throw Error(ErrorKind::InvalidConfig, e.detail());
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw Error(ErrorKind::InvalidConfig, "deformation.seed must be >= 0");
    spec.seed = j.at("seed").get<std::uint64_t>();
  }
  spec.validate();
  return spec;
}

std::vector<std::size_t> parse_sizes(const json& j) {
  if (!j.is_array()) throw Error(ErrorKind::InvalidConfig, "sizes must be an array of positive integers");
  std::vector<std::size_t> out;
  for (const auto& v : j) {
    if (!v.is_number_integer() || v.get<long long>() <= 0) {
      throw Error(ErrorKind::InvalidConfig, "sizes must be an array of positive integers");
    }
    out.push_back(v.get<std::size_t>());
  }
  return out;
}

}  // namespace

std::string format_real(double x) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

MeasureFile parse_measure(const std::string& text, WeightTolerance tol) {
  const json j = parse_json(text);
  MeasureFile out;
  out.space = parse_space(field(j, "space", "measure"));
  out.measure = parse_measure_body(j, out.space, tol, "measure");
  return out;
}

std::string dump_measure(const Space& s, const DiscreteMeasure& m) { return dump(measure_json(s, m, true)); }

MeasureEnsemble parse_ensemble(const std::string& text, WeightTolerance tol) {
  const json j = parse_json(text);
  const json& measures = field(j, "measures", "ensemble");
  if (!measures.is_array() || measures.empty()) parse_error("ensemble.measures must be a nonempty array");
  MeasureEnsemble e;
  if (j.contains("space")) {
    e.space = parse_space(j.at("space"));
  } else {
    e.space = parse_space(field(measures[0], "space", "ensemble.measures[0]"));
  }
  for (std::size_t k = 0; k < measures.size(); ++k) {
    const std::string where = "ensemble.measures[" + std::to_string(k) + "]";
    if (measures[k].contains("space") && !(parse_space(measures[k].at("space")) == e.space)) {
      throw Error(ErrorKind::DimensionMismatch, where + ".space differs from the ensemble space");
    }
    e.measures.push_back(parse_measure_body(measures[k], e.space, tol, where));
  }
  if (j.contains("lambda")) {
    e.lambda = as_reals(j.at("lambda"), "ensemble.lambda");
  } else {
    e.lambda.assign(e.measures.size(), 1.0 / static_cast<double>(e.measures.size()));
  }
  try {
    return validate_ensemble(e, tol);
  } catch (const Error& err) {
    throw Error(err.kind(), std::string("ensemble: ") + err.detail());
  }
}

std::string dump_ensemble(const MeasureEnsemble& e) {
  json measures = json::array();
  for (const auto& m : e.measures) measures.push_back(measure_json(e.space, m, false));
  json out;
  out["space"] = space_json(e.space);
  out["lambda"] = e.lambda;
  out["measures"] = measures;
  return dump(out);
}

std::vector<Point> parse_support(const std::string& text, const Space& s) {
  const json j = parse_json(text);
  const json* pts = nullptr;
  if (j.is_object() && j.contains("points")) {
    pts = &j.at("points");
  } else if (j.is_object() && j.contains("atoms")) {
    pts = &j.at("atoms");
  } else if (j.is_array()) {
    pts = &j;
  } else {
    parse_error("support file needs 'points', 'atoms' or a bare array of points");
  }
  if (!pts->is_array() || pts->empty()) parse_error("support must be a nonempty array of points");
  std::vector<Point> out;
  for (std::size_t k = 0; k < pts->size(); ++k) {
    Point x = parse_point((*pts)[k], s, "support[" + std::to_string(k) + "]");
    s.check_point(x);
    out.push_back(std::move(x));
  }
  return out;
}

std::string dump_plan(const TransportPlan& plan) {
  json triplets = json::array();
  for (const auto& t : plan.triplets()) triplets.push_back(json::array({t.i, t.j, t.mass}));
  json out;
  out["n"] = plan.plan.rows();
  out["m"] = plan.plan.cols();
  out["cost"] = plan.cost;
  out["triplets"] = triplets;
  return dump(out);
}

std::string dump_coupling(const MultiCoupling& c) {
  json entries = json::array();
  for (const auto& e : c.entries) entries.push_back({{"index", e.index}, {"mass", e.mass}});
  json out;
  out["objective"] = c.objective;
  out["dual_objective"] = c.dual_objective;
  out["iterations"] = c.iterations;
  out["entries"] = entries;
  return dump(out);
}

ExperimentConfig parse_experiment_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::InvalidConfig, std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::InvalidConfig, "config must be an object");
  ExperimentConfig cfg;
  const std::string fw = j.value("framework", std::string());
  if (fw == "empirical_sampling") {
    cfg.framework = Framework::EmpiricalSampling;
  } else if (fw == "growing_ensemble") {
    cfg.framework = Framework::GrowingEnsemble;
  } else if (fw == "deformation") {
    cfg.framework = Framework::Deformation;
  } else {
    throw Error(ErrorKind::InvalidConfig,
                "framework must be one of empirical_sampling, growing_ensemble, deformation");
  }
  if (j.contains("p")) {
    if (!j.at("p").is_number()) throw Error(ErrorKind::InvalidConfig, "p must be a number");
    cfg.p = j.at("p").get<double>();
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw Error(ErrorKind::InvalidConfig, "seed must be >= 0");
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }
  if (!j.contains("sizes")) throw Error(ErrorKind::InvalidConfig, "missing field 'sizes'");
  cfg.sizes = parse_sizes(j.at("sizes"));
  if (j.contains("replications")) {
    if (!j.at("replications").is_number_integer() || j.at("replications").get<long long>() < 1) {
      throw Error(ErrorKind::InvalidConfig, "replications must be an integer >= 1");
    }
    cfg.replications = j.at("replications").get<std::size_t>();
  }
  if (j.contains("max_product_size")) {
    if (!j.at("max_product_size").is_number_unsigned()) {
      throw Error(ErrorKind::InvalidConfig, "max_product_size must be a positive integer");
    }
    cfg.bary.mm.max_product_size = j.at("max_product_size").get<std::size_t>();
  }
  try {
    if (j.contains("ensemble")) {
      cfg.ensemble = parse_ensemble(j.at("ensemble").dump());
      cfg.space = cfg.ensemble->space;
    }
    if (j.contains("template")) {
      MeasureFile t = parse_measure(j.at("template").dump());
      cfg.space = t.space;
      cfg.templ = std::move(t.measure);
    }
  } catch (const Error& e) {
    throw Error(ErrorKind::InvalidConfig, e.detail());
  }
  if (j.contains("deformation")) cfg.deformation = parse_deformation(j.at("deformation"), cfg.space.point_dim());
  if (j.contains("reference_size")) {
    if (!j.at("reference_size").is_number_integer() || j.at("reference_size").get<long long>() < 1) {
      throw Error(ErrorKind::InvalidConfig, "reference_size must be a positive integer");
    }
    cfg.reference_size = j.at("reference_size").get<std::size_t>();
  }
  cfg.validate();
  return cfg;
}

std::string report_csv(const ConsistencyReport& report) {
  std::ostringstream out;
  out << "framework,size,replication,dist_to_ref,ensemble_dist,objective,wall_ms,status\n";
  auto opt = [](const std::optional<double>& v) { return v ? format_real(*v) : std::string(); };
  for (const auto& r : report.rows) {
    std::string status = r.status;
    for (char& c : status)
      if (c == ',' || c == '\n' || c == '"') c = ' ';
    out << to_string(r.framework) << ',' << r.size << ',' << r.replication << ',' << opt(r.dist_to_ref) << ','
        << opt(r.ensemble_dist) << ',' << opt(r.objective) << ',' << format_real(r.wall_ms) << ',' << status
        << '\n';
  }
  return out.str();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  out << contents;
  if (!out) throw Error(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

}  // namespace wbary::io
