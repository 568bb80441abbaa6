#include "t2ctc/io_formats.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace t2ctc {
namespace {

[[noreturn]] void bad_field(const std::string& what) {
  throw std::runtime_error("malformed input: " + what);
}

double num(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) {
    bad_field(std::string("expected numeric field '") + key + "'");
  }
  return j[key].get<double>();
}

std::vector<double> num_array(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) {
    bad_field(std::string("expected array field '") + key + "'");
  }
  std::vector<double> out;
  out.reserve(j[key].size());
  for (const auto& v : j[key]) {
    if (!v.is_number()) {
      bad_field(std::string("non-numeric entry in '") + key + "'");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

std::string kind_of(const Json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    bad_field("expected an object with a 'kind' tag");
  }
  return j["kind"].get<std::string>();
}

const char* tnorm_name(TNormKind t) {
  return t == TNormKind::product ? "product" : "minimum";
}

TNormKind tnorm_from_name(const std::string& name) {
  if (name == "product") return TNormKind::product;
  if (name == "minimum") return TNormKind::minimum;
  bad_field("unknown t-norm '" + name + "'");
}

constexpr const char* rulebase_schema = "t2ctc-rulebase-v1";

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Json mf_to_json(const MembershipFunctionT1& mf) {
  Json j;
  if (const auto* g = std::get_if<GaussianMF>(&mf)) {
    j["kind"] = "gaussian";
    j["mean"] = g->mean;
    j["sigma"] = g->sigma;
  } else if (const auto* t = std::get_if<TriangularMF>(&mf)) {
    j["kind"] = "triangular";
    j["left"] = t->left;
    j["peak"] = t->peak;
    j["right"] = t->right;
  } else if (const auto* i = std::get_if<IntervalMF>(&mf)) {
    j["kind"] = "interval";
    j["lo"] = i->lo;
    j["hi"] = i->hi;
  } else if (const auto* s = std::get_if<SingletonMF>(&mf)) {
    j["kind"] = "singleton";
    j["point"] = s->point;
  } else {
    const auto& g = std::get<SampledMF>(mf);
    j["kind"] = "sampled";
    j["domain"] = g.domain;
    j["grades"] = g.grades;
  }
  return j;
}

MembershipFunctionT1 mf_from_json(const Json& j) {
  const std::string kind = kind_of(j);
  if (kind == "gaussian") {
    return GaussianMF{num(j, "mean"), num(j, "sigma")};
  }
  if (kind == "triangular") {
    return TriangularMF{num(j, "left"), num(j, "peak"), num(j, "right")};
  }
  if (kind == "interval") {
    return IntervalMF{num(j, "lo"), num(j, "hi")};
  }
  if (kind == "singleton") {
    return SingletonMF{num(j, "point")};
  }
  if (kind == "sampled") {
    return SampledMF{num_array(j, "domain"), num_array(j, "grades")};
  }
  bad_field("unknown membership function kind '" + kind + "'");
}

Json it2_to_json(const IT2Set& set) {
  Json j;
  if (set.parametric) {
    if (const auto* um = std::get_if<GaussianUncertainMean>(&*set.parametric)) {
      j["kind"] = "it2-gaussian-umean";
      j["m1"] = um->m1;
      j["m2"] = um->m2;
      j["sigma"] = um->sigma;
      return j;
    }
    const auto& us = std::get<GaussianUncertainSigma>(*set.parametric);
    j["kind"] = "it2-gaussian-usigma";
    j["m"] = us.m;
    j["sigma1"] = us.sigma1;
    j["sigma2"] = us.sigma2;
    return j;
  }
  j["kind"] = "it2-bounds";
  j["lower"] = mf_to_json(set.lower);
  j["upper"] = mf_to_json(set.upper);
  return j;
}

IT2Set it2_from_json(const Json& j) {
  const std::string kind = kind_of(j);
  if (kind == "it2-gaussian-umean") {
    return IT2Set::gaussian_umean(num(j, "m1"), num(j, "m2"), num(j, "sigma"));
  }
  if (kind == "it2-gaussian-usigma") {
    return IT2Set::gaussian_usigma(num(j, "m"), num(j, "sigma1"),
                                   num(j, "sigma2"));
  }
  if (kind == "it2-bounds") {
    if (!j.contains("lower") || !j.contains("upper")) {
      bad_field("it2-bounds needs 'lower' and 'upper'");
    }
    return IT2Set::from_bounds(mf_from_json(j["lower"]),
                               mf_from_json(j["upper"]));
  }
  bad_field("unknown interval set kind '" + kind + "'");
}

Json rulebase_to_json(const RuleBase& rb) {
  Json j;
  j["schema"] = rulebase_schema;
  Json inputs = Json::array();
  for (const auto& var : rb.inputs) {
    Json v;
    v["name"] = var.name;
    v["lo"] = var.lo;
    v["hi"] = var.hi;
    Json labels = Json::array();
    for (const auto& label : var.labels) {
      Json l;
      l["name"] = label.name;
      l["set"] = it2_to_json(label.set);
      labels.push_back(std::move(l));
    }
    v["labels"] = std::move(labels);
    inputs.push_back(std::move(v));
  }
  j["inputs"] = std::move(inputs);
  j["output"] = rb.output;
  j["out_lo"] = rb.out_lo;
  j["out_hi"] = rb.out_hi;
  Json rules = Json::array();
  for (const auto& r : rb.rules) {
    Json rule;
    rule["antecedent"] = r.antecedent;
    rule["c"] = r.c;
    rule["s"] = r.s;
    rules.push_back(std::move(rule));
  }
  j["rules"] = std::move(rules);
  j["tnorm"] = tnorm_name(rb.tnorm);
  j["tr"] = rb.tr;
  return j;
}

RuleBase rulebase_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("schema") ||
      j["schema"] != rulebase_schema) {
    bad_field(std::string("rule base schema must be '") + rulebase_schema +
              "'");
  }
  RuleBase rb;
  if (!j.contains("inputs") || !j["inputs"].is_array()) {
    bad_field("expected array field 'inputs'");
  }
  for (const auto& v : j["inputs"]) {
    LinguisticVariable var;
    if (!v.contains("name") || !v["name"].is_string()) {
      bad_field("input variable needs a string 'name'");
    }
    var.name = v["name"].get<std::string>();
    var.lo = num(v, "lo");
    var.hi = num(v, "hi");
    if (!v.contains("labels") || !v["labels"].is_array()) {
      bad_field("input variable needs array 'labels'");
    }
    for (const auto& l : v["labels"]) {
      if (!l.contains("name") || !l["name"].is_string() || !l.contains("set")) {
        bad_field("label needs 'name' and 'set'");
      }
      var.labels.push_back(
          Label{l["name"].get<std::string>(), it2_from_json(l["set"])});
    }
    rb.inputs.push_back(std::move(var));
  }
  if (!j.contains("output") || !j["output"].is_string()) {
    bad_field("expected string field 'output'");
  }
  rb.output = j["output"].get<std::string>();
  rb.out_lo = num(j, "out_lo");
  rb.out_hi = num(j, "out_hi");
  if (!j.contains("rules") || !j["rules"].is_array()) {
    bad_field("expected array field 'rules'");
  }
  for (const auto& r : j["rules"]) {
    Rule rule;
    if (!r.contains("antecedent") || !r["antecedent"].is_array()) {
      bad_field("rule needs array 'antecedent'");
    }
    for (const auto& a : r["antecedent"]) {
      if (!a.is_number_unsigned()) bad_field("antecedent indices must be unsigned");
      rule.antecedent.push_back(a.get<std::size_t>());
    }
    rule.c = num(r, "c");
    rule.s = num(r, "s");
    rb.rules.push_back(std::move(rule));
  }
  if (!j.contains("tnorm") || !j["tnorm"].is_string()) {
    bad_field("expected string field 'tnorm'");
  }
  rb.tnorm = tnorm_from_name(j["tnorm"].get<std::string>());
  if (j.contains("tr")) rb.tr = j["tr"].get<std::string>();
  validate_rulebase(rb);
  return rb;
}

void save_estimators(const EstimatorBank& bank,
                     const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < estimator_count; ++i) {
    save_json_file(dir / (std::string(estimator_names[i]) + ".json"),
                   rulebase_to_json(bank[i]));
  }
}

EstimatorBank load_estimators(const std::filesystem::path& dir) {
  EstimatorBank bank;
  for (std::size_t i = 0; i < estimator_count; ++i) {
    const auto path = dir / (std::string(estimator_names[i]) + ".json");
    bank[i] = rulebase_from_json(load_json_file(path));
  }
  const std::string ref_inputs = rulebase_to_json(bank[0])["inputs"].dump();
  for (std::size_t i = 1; i < estimator_count; ++i) {
    if (rulebase_to_json(bank[i])["inputs"].dump() != ref_inputs) {
      throw std::runtime_error(
          std::string("estimator '") + estimator_names[i] +
          "' does not share the bank's input variables");
    }
  }
  return bank;
}

Json training_report_to_json(const TrainingReport& report) {
  Json j;
  j["schema"] = "t2ctc-training-report-v1";
  j["cell_capacity"] = report.cell_capacity;
  j["sparse_coverage"] = report.sparse_coverage;
  j["feature_bounds"] = report.feature_bounds;
  Json elements = Json::array();
  for (std::size_t i = 0; i < estimator_count; ++i) {
    Json e;
    e["name"] = estimator_names[i];
    e["rules"] = report.rule_counts[i];
    e["samples_used"] = report.per_element[i].used;
    e["samples_skipped"] = report.per_element[i].skipped;
    e["rms_residual"] = report.rms_residual[i];
    e["output_span"] = report.output_span[i];
    elements.push_back(std::move(e));
  }
  j["elements"] = std::move(elements);
  return j;
}

Json robot_params_to_json(const RobotParams& p) {
  Json j;
  j["schema"] = "t2ctc-robot-v1";
  j["d"] = p.d;
  j["h"] = p.h;
  j["g"] = p.g;
  j["mass"] = p.mass;
  Json inertias = Json::array();
  for (const auto& I : p.inertia) {
    Json rows = Json::array();
    for (int r = 0; r < 3; ++r) {
      rows.push_back({I(r, 0), I(r, 1), I(r, 2)});
    }
    inertias.push_back(std::move(rows));
  }
  j["inertia"] = std::move(inertias);
  return j;
}

RobotParams robot_params_from_json(const Json& j) {
  RobotParams p;
  p.d = num(j, "d");
  p.h = num(j, "h");
  p.g = num(j, "g");
  if (!j.contains("mass") || !j["mass"].is_array() || j["mass"].size() != 13) {
    bad_field("expected 13-entry array 'mass'");
  }
  for (std::size_t i = 0; i < 13; ++i) p.mass[i] = j["mass"][i].get<double>();
  if (!j.contains("inertia") || !j["inertia"].is_array() ||
      j["inertia"].size() != 13) {
    bad_field("expected 13-entry array 'inertia'");
  }
  for (std::size_t i = 0; i < 13; ++i) {
    const auto& rows = j["inertia"][i];
    if (!rows.is_array() || rows.size() != 3) bad_field("inertia rows must be 3x3");
    for (int r = 0; r < 3; ++r) {
      if (!rows[r].is_array() || rows[r].size() != 3) {
        bad_field("inertia rows must be 3x3");
      }
      for (int c = 0; c < 3; ++c) p.inertia[i](r, c) = rows[r][c].get<double>();
    }
  }
  p.validate();
  return p;
}

Json centroid_input_to_json(const GeneralizedCentroidInput& input) {
  Json j;
  j["schema"] = "t2ctc-centroid-input-v1";
  Json values = Json::array();
  for (const auto& v : input.values) values.push_back(mf_to_json(v.mf));
  Json weights = Json::array();
  for (const auto& w : input.weights) weights.push_back(mf_to_json(w.mf));
  j["values"] = std::move(values);
  j["weights"] = std::move(weights);
  j["tnorm"] = tnorm_name(input.tnorm);
  return j;
}

GeneralizedCentroidInput centroid_input_from_json(const Json& j) {
  GeneralizedCentroidInput input;
  if (!j.contains("values") || !j["values"].is_array() ||
      !j.contains("weights") || !j["weights"].is_array()) {
    bad_field("expected array fields 'values' and 'weights'");
  }
  for (const auto& v : j["values"]) {
    input.values.push_back(FuzzyNumberT1::parametric(mf_from_json(v)));
  }
  for (const auto& w : j["weights"]) {
    input.weights.push_back(FuzzyNumberT1::parametric(mf_from_json(w)));
  }
  if (j.contains("tnorm")) {
    if (!j["tnorm"].is_string()) bad_field("'tnorm' must be a string");
    input.tnorm = tnorm_from_name(j["tnorm"].get<std::string>());
  }
  if (input.values.size() != input.weights.size()) {
    bad_field("'values' and 'weights' must have equal length");
  }
  if (input.values.empty()) bad_field("'values' must not be empty");
  return input;
}

const char* trace_csv_header() {
  return "t,qd1,qd2,qd3,q1,q2,q3,qdot_d1,qdot_d2,qdot_d3,"
         "qdot1,qdot2,qdot3,tau1,tau2,tau3,loop_us";
}

void write_trace_csv(std::ostream& out, const std::vector<SimStep>& steps) {
  out << trace_schema_tag << '\n' << trace_csv_header() << '\n';
  for (const auto& s : steps) {
    out << g17(s.t);
    for (int i = 0; i < 3; ++i) out << ',' << g17(s.qd[i]);
    for (int i = 0; i < 3; ++i) out << ',' << g17(s.q[i]);
    for (int i = 0; i < 3; ++i) out << ',' << g17(s.qdot_d[i]);
    for (int i = 0; i < 3; ++i) out << ',' << g17(s.qdot[i]);
    for (int i = 0; i < 3; ++i) out << ',' << g17(s.tau[i]);
    out << ',' << g17(s.loop_us) << '\n';
  }
}

void validate_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != trace_schema_tag) {
    throw std::runtime_error("trace csv: missing schema tag");
  }
  if (!std::getline(in, line) || line != trace_csv_header()) {
    throw std::runtime_error("trace csv: header mismatch");
  }
  double prev_t = -1.0;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++row;
    std::stringstream ss(line);
    std::string cell;
    std::size_t cols = 0;
    double t = 0.0;
    while (std::getline(ss, cell, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != cell.size()) {
        throw std::runtime_error("trace csv: non-numeric cell in row " +
                                 std::to_string(row));
      }
      if (cols == 0) t = v;
      ++cols;
    }
    if (cols != 17) {
      throw std::runtime_error("trace csv: expected 17 columns, row " +
                               std::to_string(row) + " has " +
                               std::to_string(cols));
    }
    if (t <= prev_t) {
      throw std::runtime_error("trace csv: time not increasing at row " +
                               std::to_string(row));
    }
    prev_t = t;
  }
  if (row == 0) throw std::runtime_error("trace csv: no data rows");
}

Json snr_to_json(double snr_db) {
  if (std::isinf(snr_db)) return "inf";
  return snr_db;
}

double snr_from_json(const Json& j) {
  if (j.is_string()) {
    if (j == "inf") return std::numeric_limits<double>::infinity();
    bad_field("snr string must be 'inf'");
  }
  if (!j.is_number()) bad_field("snr must be a number or 'inf'");
  const double v = j.get<double>();
  if (v <= 0.0) bad_field("snr must be positive");
  return v;
}

Json summary_to_json(const std::string& controller, double snr_db,
                     std::uint64_t seed, const SimResult& result) {
  Json j;
  j["schema"] = "t2ctc-summary-v1";
  j["controller"] = controller;
  j["snr_db"] = snr_to_json(snr_db);
  j["seed"] = seed;
  j["sse"] = result.sse;
  j["mean_loop_us"] = result.mean_loop_us();
  j["p99_loop_us"] = result.p99_loop_us();
  j["unstable"] = result.unstable;
  if (result.unstable) j["unstable_step"] = result.unstable_step;
  j["held_steps"] = result.held_steps;
  return j;
}

std::string controller_name(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::pd: return "pd";
    case ControllerKind::ctc: return "ctc";
    case ControllerKind::fuzzy_t1: return "fuzzy-t1";
    case ControllerKind::fuzzy_t2: return "fuzzy-t2";
  }
  throw std::logic_error("unreachable controller kind");
}

ControllerKind controller_from_name(const std::string& name) {
  if (name == "pd") return ControllerKind::pd;
  if (name == "ctc") return ControllerKind::ctc;
  if (name == "fuzzy-t1" || name == "t1") return ControllerKind::fuzzy_t1;
  if (name == "fuzzy-t2" || name == "t2") return ControllerKind::fuzzy_t2;
  bad_field("unknown controller '" + name + "'");
}

Json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("cannot parse " + path.string() + ": " +
                             e.what());
  }
  return j;
}

void save_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace t2ctc
