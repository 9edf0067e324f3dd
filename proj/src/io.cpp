#include "nearopt/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace nearopt::io {

using Json = nlohmann::ordered_json;

namespace {

// ---- reading -------------------------------------------------------------

const Json& field(const Json& object, const char* key, const std::string& path) {
  if (!object.is_object()) throw SchemaError(path, "expected an object");
  const auto it = object.find(key);
  if (it == object.end()) throw SchemaError(path + "/" + key, "missing required field");
  return *it;
}

const Json* optional_field(const Json& object, const char* key, const std::string& path) {
  if (!object.is_object()) throw SchemaError(path, "expected an object");
  const auto it = object.find(key);
  return it == object.end() ? nullptr : &*it;
}

Real number(const Json& value, const std::string& path) {
  if (value.is_number()) return value.get<Real>();
  if (value.is_string()) {
    const auto& s = value.get_ref<const std::string&>();
    if (s == "inf" || s == "+inf") return kInfinity;
    if (s == "-inf") return -kInfinity;
  }
  throw SchemaError(path, "expected a number");
}

std::optional<Real> optional_number(const Json& object, const char* key, const std::string& path) {
  const Json* v = optional_field(object, key, path);
  if (v == nullptr || v->is_null()) return std::nullopt;
  return number(*v, path + "/" + key);
}

std::string text(const Json& value, const std::string& path) {
  if (!value.is_string()) throw SchemaError(path, "expected a string");
  return value.get<std::string>();
}

const Json& array(const Json& value, const std::string& path) {
  if (!value.is_array()) throw SchemaError(path, "expected an array");
  return value;
}

std::vector<Real> numbers(const Json& value, const std::string& path) {
  std::vector<Real> out;
  for (std::size_t i = 0; i < array(value, path).size(); ++i) out.push_back(number(value[i], path + "/" + std::to_string(i)));
  return out;
}

std::string at(const std::string& path, std::size_t i) { return path + "/" + std::to_string(i); }

Sense parse_sense(const Json& value, const std::string& path) {
  const std::string s = text(value, path);
  if (s == ">=") return Sense::GreaterEqual;
  if (s == "<=") return Sense::LessEqual;
  if (s == "=" || s == "==") return Sense::Equal;
  throw SchemaError(path, "unknown sense '" + s + "' (expected >=, <= or =)");
}

std::vector<Term> parse_terms(const Json& value, const std::string& path,
                              const std::map<std::string, std::size_t>& index) {
  std::vector<Term> terms;
  for (std::size_t i = 0; i < array(value, path).size(); ++i) {
    const std::string p = at(path, i);
    const std::string name = text(field(value[i], "var", p), p + "/var");
    const auto it = index.find(name);
    if (it == index.end()) throw SchemaError(p + "/var", "unknown variable '" + name + "'");
    terms.push_back({it->second, number(field(value[i], "coef", p), p + "/coef")});
  }
  return terms;
}

RawModel parse_raw(const Json& doc) {
  std::vector<Variable> variables;
  std::map<std::string, std::size_t> index;
  const Json& vars = array(field(doc, "variables", ""), "/variables");
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const std::string p = at("/variables", i);
    Variable v;
    v.name = text(field(vars[i], "name", p), p + "/name");
    if (const Json* lo = optional_field(vars[i], "lower", p)) v.lower = lo->is_null() ? -kInfinity : number(*lo, p + "/lower");
    v.upper = optional_number(vars[i], "upper", p).value_or(kInfinity);
    if (!index.emplace(v.name, i).second) throw SchemaError(p + "/name", "duplicate variable '" + v.name + "'");
    variables.push_back(std::move(v));
  }

  std::vector<LinearConstraint> constraints;
  if (const Json* rows = optional_field(doc, "constraints", "")) {
    for (std::size_t i = 0; i < array(*rows, "/constraints").size(); ++i) {
      const std::string p = at("/constraints", i);
      const Json& row = (*rows)[i];
      LinearConstraint c;
      if (const Json* name = optional_field(row, "name", p)) c.name = text(*name, p + "/name");
      c.terms = parse_terms(field(row, "terms", p), p + "/terms", index);
      c.sense = parse_sense(field(row, "sense", p), p + "/sense");
      c.rhs = number(field(row, "rhs", p), p + "/rhs");
      constraints.push_back(std::move(c));
    }
  }

  std::vector<LinearObjective> objectives;
  const Json& objs = array(field(doc, "objectives", ""), "/objectives");
  for (std::size_t i = 0; i < objs.size(); ++i) {
    const std::string p = at("/objectives", i);
    LinearObjective f{Vector::Zero(static_cast<Eigen::Index>(variables.size())), 0.0, {}};
    f.label = text(field(objs[i], "label", p), p + "/label");
    for (const Term& t : parse_terms(field(objs[i], "terms", p), p + "/terms", index)) {
      f.coefficients(static_cast<Eigen::Index>(t.index)) += t.coefficient;
    }
    f.offset = optional_number(objs[i], "offset", p).value_or(0.0);
    objectives.push_back(std::move(f));
  }

  RawModel model;
  model.program = LinearProgram(std::move(variables), std::move(constraints), std::move(objectives));
  if (const Json* sels = optional_field(doc, "selectors", "")) {
    if (!sels->is_object()) throw SchemaError("/selectors", "expected an object");
    for (const auto& [name, members] : sels->items()) {
      const std::string p = "/selectors/" + name;
      std::vector<std::size_t> indices;
      for (std::size_t i = 0; i < array(members, p).size(); ++i) {
        const std::string var = text(members[i], at(p, i));
        const auto it = index.find(var);
        if (it == index.end()) throw SchemaError(at(p, i), "unknown variable '" + var + "'");
        indices.push_back(it->second);
      }
      try {
        model.selectors.emplace(name, Selector::from_indices(model.program.num_variables(), indices));
      } catch (const ModelError& e) {
        throw SchemaError(p, e.what());
      }
    }
  }
  return model;
}

esom::EnergyModelSpec parse_energy(const Json& doc) {
  esom::EnergyModelSpec spec;
  spec.gwp_cap = optional_number(doc, "gwp_cap", "").value_or(kInfinity);
  if (const Json* notes = optional_field(doc, "notes", "")) spec.notes = text(*notes, "/notes");

  const Json& periods = array(field(doc, "periods", ""), "/periods");
  for (std::size_t i = 0; i < periods.size(); ++i) {
    const std::string p = at("/periods", i);
    spec.periods.push_back({text(field(periods[i], "id", p), p + "/id"), number(field(periods[i], "hours", p), p + "/hours")});
  }

  const Json& resources = array(field(doc, "resources", ""), "/resources");
  for (std::size_t i = 0; i < resources.size(); ++i) {
    const std::string p = at("/resources", i);
    const Json& r = resources[i];
    esom::Resource res;
    res.name = text(field(r, "name", p), p + "/name");
    const std::string cls = text(field(r, "class", p), p + "/class");
    if (cls == "endogenous") {
      res.cls = esom::ResourceClass::Endogenous;
    } else if (cls == "exogenous") {
      res.cls = esom::ResourceClass::Exogenous;
    } else {
      throw SchemaError(p + "/class", "expected 'endogenous' or 'exogenous'");
    }
    if (const Json* layer = optional_field(r, "layer", p)) res.layer = text(*layer, p + "/layer");
    res.c_op = number(field(r, "c_op", p), p + "/c_op");
    res.e_op = number(field(r, "e_op", p), p + "/e_op");
    res.gwp_op = number(field(r, "gwp_op", p), p + "/gwp_op");
    res.potential = optional_number(r, "potential", p);
    spec.resources.push_back(std::move(res));
  }

  const Json& techs = array(field(doc, "technologies", ""), "/technologies");
  for (std::size_t i = 0; i < techs.size(); ++i) {
    const std::string p = at("/technologies", i);
    const Json& t = techs[i];
    esom::Technology tech;
    tech.name = text(field(t, "name", p), p + "/name");
    tech.input = text(field(t, "input", p), p + "/input");
    const Json& outputs = array(field(t, "outputs", p), p + "/outputs");
    for (std::size_t k = 0; k < outputs.size(); ++k) {
      const std::string q = at(p + "/outputs", k);
      tech.outputs.push_back({text(field(outputs[k], "carrier", q), q + "/carrier"),
                              number(field(outputs[k], "efficiency", q), q + "/efficiency")});
    }
    tech.c_inv = number(field(t, "c_inv", p), p + "/c_inv");
    tech.c_maint = number(field(t, "c_maint", p), p + "/c_maint");
    tech.e_constr = number(field(t, "e_constr", p), p + "/e_constr");
    tech.gwp_constr = number(field(t, "gwp_constr", p), p + "/gwp_constr");
    tech.max_capacity = optional_number(t, "max_capacity", p);
    if (const Json* cf = optional_field(t, "capacity_factor", p)) tech.capacity_factor = numbers(*cf, p + "/capacity_factor");
    spec.technologies.push_back(std::move(tech));
  }

  const Json& demands = array(field(doc, "demands", ""), "/demands");
  for (std::size_t i = 0; i < demands.size(); ++i) {
    const std::string p = at("/demands", i);
    spec.demands.push_back({text(field(demands[i], "carrier", p), p + "/carrier"),
                            numbers(field(demands[i], "per_period", p), p + "/per_period")});
  }
  return spec;
}

// ---- writing -------------------------------------------------------------

Json number_json(Real v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number_json(v(i)));
  return out;
}

Json terms_json(const std::vector<Term>& terms, const LinearProgram& lp) {
  Json out = Json::array();
  for (const Term& t : terms) out.push_back({{"var", lp.variables()[t.index].name}, {"coef", t.coefficient}});
  return out;
}

Json dump_raw(const RawModel& model) {
  const LinearProgram& lp = model.program;
  Json doc = {{"version", kFormatVersion}, {"kind", "lp"}};
  Json vars = Json::array();
  for (const Variable& v : lp.variables()) {
    Json j = {{"name", v.name}};
    j["lower"] = v.lower == -kInfinity ? Json(nullptr) : number_json(v.lower);
    if (v.upper != kInfinity) j["upper"] = number_json(v.upper);
    vars.push_back(std::move(j));
  }
  doc["variables"] = std::move(vars);
  Json rows = Json::array();
  for (const LinearConstraint& c : lp.constraints()) {
    Json j;
    if (!c.name.empty()) j["name"] = c.name;
    j["terms"] = terms_json(c.terms, lp);
    j["sense"] = std::string(to_string(c.sense));
    j["rhs"] = number_json(c.rhs);
    rows.push_back(std::move(j));
  }
  doc["constraints"] = std::move(rows);
  Json objs = Json::array();
  for (const LinearObjective& f : lp.objectives()) {
    std::vector<Term> terms;
    for (Eigen::Index i = 0; i < f.coefficients.size(); ++i) {
      if (f.coefficients(i) != 0.0) terms.push_back({static_cast<std::size_t>(i), f.coefficients(i)});
    }
    objs.push_back({{"label", f.label}, {"terms", terms_json(terms, lp)}, {"offset", f.offset}});
  }
  doc["objectives"] = std::move(objs);
  Json sels = Json::object();
  for (const auto& [name, selector] : model.selectors) {
    Json members = Json::array();
    for (std::size_t i : selector.indices()) members.push_back(lp.variables()[i].name);
    sels[name] = std::move(members);
  }
  doc["selectors"] = std::move(sels);
  return doc;
}

Json optional_json(const std::optional<Real>& v) { return v ? number_json(*v) : Json(nullptr); }

Json dump_energy(const esom::EnergyModelSpec& spec) {
  Json doc = {{"version", kFormatVersion}, {"kind", "energy_model"}};
  if (!spec.notes.empty()) doc["notes"] = spec.notes;
  doc["gwp_cap"] = number_json(spec.gwp_cap);
  Json periods = Json::array();
  for (const esom::Period& p : spec.periods) periods.push_back({{"id", p.id}, {"hours", p.hours}});
  doc["periods"] = std::move(periods);
  Json resources = Json::array();
  for (const esom::Resource& r : spec.resources) {
    Json j = {{"name", r.name}, {"class", esom::to_string(r.cls)}};
    if (!r.layer.empty()) j["layer"] = r.layer;
    j["c_op"] = r.c_op;
    j["e_op"] = r.e_op;
    j["gwp_op"] = r.gwp_op;
    j["potential"] = optional_json(r.potential);
    resources.push_back(std::move(j));
  }
  doc["resources"] = std::move(resources);
  Json techs = Json::array();
  for (const esom::Technology& t : spec.technologies) {
    Json outputs = Json::array();
    for (const esom::Output& o : t.outputs) outputs.push_back({{"carrier", o.carrier}, {"efficiency", o.efficiency}});
    Json j = {{"name", t.name}, {"input", t.input}, {"outputs", std::move(outputs)},
              {"c_inv", t.c_inv}, {"c_maint", t.c_maint}, {"e_constr", t.e_constr},
              {"gwp_constr", t.gwp_constr}, {"max_capacity", optional_json(t.max_capacity)}};
    if (!t.capacity_factor.empty()) j["capacity_factor"] = t.capacity_factor;
    techs.push_back(std::move(j));
  }
  doc["technologies"] = std::move(techs);
  Json demands = Json::array();
  for (const esom::DemandProfile& d : spec.demands) demands.push_back({{"carrier", d.carrier}, {"per_period", d.per_period}});
  doc["demands"] = std::move(demands);
  return doc;
}

Json selector_json(const Selector& selector, const LinearProgram& lp) {
  Json names = Json::array();
  for (std::size_t i : selector.indices()) names.push_back(lp.variables()[i].name);
  return names;
}

Json report_object(const NecessaryConditionReport& report, const LinearProgram& lp) {
  Json j;
  j["selector"] = selector_json(report.selector, lp);
  j["threshold"] = report.threshold;
  j["bound"] = to_string(report.bound);
  j["epsilon"] = vector_json(report.epsilon);
  j["front_size"] = report.front_size;
  j["winning_anchor"] = report.winning_anchor;
  j["anchor_minima"] = report.anchor_minima;
  Json witnesses = Json::array();
  for (const Vector& w : report.witnesses) witnesses.push_back(vector_json(w));
  j["witnesses"] = std::move(witnesses);
  j["notes"] = report.notes;
  return j;
}

Json variable_names(const LinearProgram& lp) {
  Json names = Json::array();
  for (const Variable& v : lp.variables()) names.push_back(v.name);
  return names;
}

}  // namespace

ModelDocument parse_model(std::string_view content) {
  Json doc;
  try {
    doc = Json::parse(content.begin(), content.end());
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t offset = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, content.size());
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < offset; ++i) {
      if (content[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string what = e.what();
    const auto colon = what.rfind(": ");
    throw ParseError(line, column, colon == std::string::npos ? what : what.substr(colon + 2));
  }
  if (!doc.is_object()) throw SchemaError("", "model file must contain a JSON object");
  const Json& version = field(doc, "version", "");
  if (!version.is_number_integer() || version.get<long long>() != kFormatVersion) {
    throw SchemaError("/version", "unknown format version " + version.dump() + " (supported: 1)");
  }
  const std::string kind = text(field(doc, "kind", ""), "/kind");
  if (kind == "lp") return parse_raw(doc);
  if (kind == "energy_model") return parse_energy(doc);
  throw SchemaError("/kind", "unknown model kind '" + kind + "' (expected lp or energy_model)");
}

ModelDocument load_model(const std::filesystem::path& path) { return parse_model(read_file(path)); }

std::string dump_model(const ModelDocument& document) {
  const Json doc = std::visit(
      [](const auto& m) -> Json {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, RawModel>) {
          return dump_raw(m);
        } else {
          return dump_energy(m);
        }
      },
      document);
  return doc.dump(2) + "\n";
}

void save_model(const ModelDocument& document, const std::filesystem::path& path) {
  write_atomic(path, dump_model(document));
}

ResolvedModel resolve(const ModelDocument& document) {
  ResolvedModel out;
  if (const auto* raw = std::get_if<RawModel>(&document)) {
    out.program = raw->program;
    out.selectors = raw->selectors;
  } else {
    const auto& spec = std::get<esom::EnergyModelSpec>(document);
    out.energy = spec;
    out.compiled = esom::compile(spec);
    out.program = out.compiled->program;
    out.selectors = out.compiled->selectors;
  }
  return out;
}

std::string format_number(Real value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) value = 0.0;  // drop the sign of -0
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.12g", value);
  return buffer;
}

std::string front_csv(const ParetoFront& front, const LinearProgram& lp, std::size_t free_objective) {
  const std::size_t n = lp.num_objectives();
  if (front.anchors.size() != n) throw ModelError("front_csv: front has no anchor per objective");
  if (free_objective >= n) throw ModelError("front_csv: free objective out of range");
  std::ostringstream out;
  out << "epsilon";
  for (const auto& f : lp.objectives()) out << ',' << f.label;
  for (const auto& f : lp.objectives()) out << ",rel_dev_" << f.label;
  out << '\n';
  for (const ParetoPoint& p : front.points) {
    std::vector<Real> deviation(n);
    Real capped = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const auto i = static_cast<Eigen::Index>(k);
      const Real best = front.anchors[k].objectives(i);
      const Real value = p.objectives(i);
      deviation[k] = best != 0.0 ? value / best - 1.0 : (value == 0.0 ? 0.0 : kInfinity);
      if (k != free_objective) capped = std::max(capped, deviation[k]);
    }
    const bool scheduled = p.provenance.method == Provenance::Method::EpsilonConstraint;
    out << format_number(scheduled ? p.provenance.parameter : capped);
    for (std::size_t k = 0; k < n; ++k) out << ',' << format_number(p.objectives(static_cast<Eigen::Index>(k)));
    for (Real d : deviation) out << ',' << format_number(d);
    out << '\n';
  }
  return out.str();
}

std::string sweep_csv(const SweepResult& result) {
  const std::size_t rows = result.row_levels.size();
  const std::size_t cols = result.column_levels.size();
  if (rows == 0 || cols == 0 || rows * cols != result.thresholds.size()) {
    throw ModelError("sweep_csv: sweep is not a row x column cross product");
  }
  std::ostringstream out;
  out << "eps_row/eps_col";
  for (Real c : result.column_levels) out << ',' << format_number(c);
  out << '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    out << format_number(result.row_levels[r]);
    for (std::size_t c = 0; c < cols; ++c) out << ',' << format_number(result.thresholds[r * cols + c]);
    out << '\n';
  }
  return out.str();
}

std::string report_json(const NecessaryConditionReport& report, const LinearProgram& lp) {
  Json j = report_object(report, lp);
  j["variables"] = variable_names(lp);
  return j.dump(2) + "\n";
}

std::string sweep_json(const SweepResult& result, const LinearProgram& lp) {
  Json j;
  j["selector"] = selector_json(result.selector, lp);
  j["front_size"] = result.front_size;
  j["row_levels"] = result.row_levels;
  j["column_levels"] = result.column_levels;
  j["monotone"] = result.monotone;
  Json violations = Json::array();
  for (const auto& [a, b] : result.monotonicity_violations) violations.push_back({a, b});
  j["monotonicity_violations"] = std::move(violations);
  Json cells = Json::array();
  for (const auto& r : result.reports) cells.push_back(report_object(r, lp));
  j["cells"] = std::move(cells);
  j["variables"] = variable_names(lp);
  return j.dump(2) + "\n";
}

std::string front_json(const ParetoFront& front, const LinearProgram& lp) {
  Json j;
  Json labels = Json::array();
  for (const auto& f : lp.objectives()) labels.push_back(f.label);
  j["objectives"] = std::move(labels);
  auto point = [](const ParetoPoint& p) {
    return Json{{"method", to_string(p.provenance.method)},
                {"parameter", p.provenance.parameter},
                {"objective", p.provenance.objective},
                {"values", vector_json(p.objectives)},
                {"decision", vector_json(p.decision)}};
  };
  Json points = Json::array();
  for (const auto& p : front.points) points.push_back(point(p));
  j["points"] = std::move(points);
  Json anchors = Json::array();
  for (const auto& p : front.anchors) anchors.push_back(point(p));
  j["anchors"] = std::move(anchors);
  j["warnings"] = front.warnings;
  j["variables"] = variable_names(lp);
  return j.dump(2) + "\n";
}

std::string manifest_json(const RunManifest& m) {
  Json j;
  j["command"] = m.command;
  j["input_digest"] = m.input_digest;
  j["solver"] = m.solver;
  j["tolerances"] = {{"feasibility", m.tolerances.feasibility}, {"optimality", m.tolerances.optimality}};
  if (!m.schedule.empty()) j["schedule"] = m.schedule;
  if (!m.row_levels.empty()) j["row_levels"] = m.row_levels;
  if (!m.column_levels.empty()) j["column_levels"] = m.column_levels;
  if (!m.epsilons.empty()) j["epsilons"] = m.epsilons;
  if (m.selector) j["selector"] = *m.selector;
  if (m.free_objective) j["free_objective"] = *m.free_objective;
  j["front_size"] = m.front_size;
  j["seed"] = m.seed;
  j["jobs"] = m.jobs;
  j["started"] = m.started;
  j["finished"] = m.finished;
  return j.dump(2) + "\n";
}

std::string digest(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(h));
  return buffer;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot read '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path temp = path;
  temp += ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw FileError("cannot write '" + temp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw FileError("write to '" + temp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(temp, path, ec);
  if (ec) {
    std::filesystem::remove(temp, ec);
    throw FileError("cannot move output into '" + path.string() + "'");
  }
}

}  // namespace nearopt::io
