#include "nearopt/esom.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace nearopt::esom {

std::string to_string(ResourceClass cls) { return cls == ResourceClass::Endogenous ? "endogenous" : "exogenous"; }

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ModelError(message);
}

void require_nonnegative(Real value, const std::string& what) {
  require(std::isfinite(value) && value >= 0.0, what + " must be finite and nonnegative");
}

template <class T, class Name>
void require_unique(const std::vector<T>& items, Name name, const std::string& kind) {
  std::set<std::string> seen;
  for (const auto& item : items) {
    const std::string& n = name(item);
    require(!n.empty(), kind + " with empty name");
    require(seen.insert(n).second, "duplicate " + kind + " '" + n + "'");
  }
}

void validate(const EnergyModelSpec& spec) {
  const std::size_t periods = spec.periods.size();
  require(periods > 0, "energy model has no periods");
  require_unique(spec.periods, [](const Period& p) -> const std::string& { return p.id; }, "period");
  require_unique(spec.resources, [](const Resource& r) -> const std::string& { return r.name; }, "resource");
  require_unique(spec.technologies, [](const Technology& t) -> const std::string& { return t.name; }, "technology");
  require_unique(spec.demands, [](const DemandProfile& d) -> const std::string& { return d.carrier; }, "demand");

  Real hours = 0.0;
  for (const Period& p : spec.periods) {
    require(std::isfinite(p.hours) && p.hours > 0.0, "period '" + p.id + "' has non-positive weight");
    hours += p.hours;
  }
  require(std::abs(hours - kHoursPerYear) <= 1e-6, "period weights sum to " + std::to_string(hours) + " h, not 8760");

  std::set<std::string> supplied;  // layers something can put energy into
  std::set<std::string> consumed;  // layers something draws from
  for (const Resource& r : spec.resources) {
    require(r.name != "endogenous" && r.name != "exogenous", "resource name '" + r.name + "' is reserved");
    require_nonnegative(r.c_op, "c_op of '" + r.name + "'");
    require_nonnegative(r.e_op, "e_op of '" + r.name + "'");
    require_nonnegative(r.gwp_op, "gwp_op of '" + r.name + "'");
    if (r.potential) require_nonnegative(*r.potential, "potential of '" + r.name + "'");
    supplied.insert(r.supplied_layer());
  }
  for (const Technology& t : spec.technologies) {
    const std::string who = "technology '" + t.name + "'";
    require(!t.outputs.empty(), who + " has no outputs");
    Real total = 0.0;
    for (const Output& o : t.outputs) {
      require(o.efficiency > 0.0 && o.efficiency <= 1.0, who + " efficiency must lie in (0, 1]");
      require(o.carrier != t.input, who + " outputs its own input '" + t.input + "'");
      total += o.efficiency;
      supplied.insert(o.carrier);
    }
    require(total <= 1.0 + 1e-12, who + " output efficiencies sum above 1");
    require_nonnegative(t.c_inv, "c_inv of '" + t.name + "'");
    require_nonnegative(t.c_maint, "c_maint of '" + t.name + "'");
    require_nonnegative(t.e_constr, "e_constr of '" + t.name + "'");
    require_nonnegative(t.gwp_constr, "gwp_constr of '" + t.name + "'");
    if (t.max_capacity) require_nonnegative(*t.max_capacity, "max_capacity of '" + t.name + "'");
    require(t.capacity_factor.empty() || t.capacity_factor.size() == periods,
            who + " capacity factors do not match the period count");
    for (Real cf : t.capacity_factor) require(cf >= 0.0 && cf <= 1.0, who + " capacity factor outside [0, 1]");
    consumed.insert(t.input);
  }
  for (const DemandProfile& d : spec.demands) {
    require(d.per_period.size() == periods, "demand '" + d.carrier + "' does not match the period count");
    for (Real v : d.per_period) require_nonnegative(v, "demand of '" + d.carrier + "'");
    consumed.insert(d.carrier);
  }
  for (const Technology& t : spec.technologies) {
    require(supplied.count(t.input) > 0,
            "technology '" + t.name + "' references input '" + t.input + "' that nothing supplies");
    for (const Output& o : t.outputs) {
      require(consumed.count(o.carrier) > 0,
              "technology '" + t.name + "' outputs '" + o.carrier + "' that nothing consumes");
    }
  }
  for (const DemandProfile& d : spec.demands) {
    require(supplied.count(d.carrier) > 0, "demand carrier '" + d.carrier + "' has no supplier");
  }
  require(spec.gwp_cap >= 0.0, "gwp cap must be nonnegative");
}

std::vector<std::string> layer_order(const EnergyModelSpec& spec) {
  std::vector<std::string> layers;
  auto add = [&](const std::string& l) {
    if (std::find(layers.begin(), layers.end(), l) == layers.end()) layers.push_back(l);
  };
  for (const DemandProfile& d : spec.demands) add(d.carrier);
  for (const Resource& r : spec.resources) add(r.supplied_layer());
  for (const Technology& t : spec.technologies) {
    add(t.input);
    for (const Output& o : t.outputs) add(o.carrier);
  }
  return layers;
}

LinearConstraint make_row(const std::map<std::size_t, Real>& coefficients, Sense sense, Real rhs, std::string name) {
  LinearConstraint row{{}, sense, rhs, std::move(name)};
  for (const auto& [index, value] : coefficients) {
    if (value != 0.0) row.terms.push_back({index, value});
  }
  return row;
}

}  // namespace

CompiledModel compile(const EnergyModelSpec& spec) {
  validate(spec);
  const std::size_t P = spec.periods.size();
  CompiledModel model;

  std::vector<Variable> variables;
  for (const Technology& t : spec.technologies) {
    model.capacity.push_back(variables.size());
    variables.push_back({"cap[" + t.name + "]", 0.0, t.max_capacity.value_or(kInfinity)});
  }
  for (const Resource& r : spec.resources) {
    model.resource_use.emplace_back();
    for (const Period& p : spec.periods) {
      model.resource_use.back().push_back(variables.size());
      variables.push_back({"F[" + r.name + "," + p.id + "]", 0.0, kInfinity});
    }
  }
  for (const Technology& t : spec.technologies) {
    model.dispatch.emplace_back();
    for (const Period& p : spec.periods) {
      model.dispatch.back().push_back(variables.size());
      variables.push_back({"G[" + t.name + "," + p.id + "]", 0.0, kInfinity});
    }
  }
  const auto n = static_cast<Eigen::Index>(variables.size());

  std::vector<LinearConstraint> rows;
  for (const std::string& layer : layer_order(spec)) {
    const auto demand = std::find_if(spec.demands.begin(), spec.demands.end(),
                                     [&](const DemandProfile& d) { return d.carrier == layer; });
    for (std::size_t p = 0; p < P; ++p) {
      std::map<std::size_t, Real> row;
      for (std::size_t r = 0; r < spec.resources.size(); ++r) {
        if (spec.resources[r].supplied_layer() == layer) row[model.resource_use[r][p]] += 1.0;
      }
      for (std::size_t t = 0; t < spec.technologies.size(); ++t) {
        const Technology& tech = spec.technologies[t];
        if (tech.input == layer) row[model.dispatch[t][p]] -= 1.0;
        for (const Output& o : tech.outputs) {
          if (o.carrier == layer) row[model.dispatch[t][p]] += o.efficiency;
        }
      }
      const Real rhs = demand == spec.demands.end() ? 0.0 : demand->per_period[p];
      rows.push_back(make_row(row, Sense::GreaterEqual, rhs, "balance:" + layer + ":" + spec.periods[p].id));
    }
  }
  for (std::size_t t = 0; t < spec.technologies.size(); ++t) {
    const Technology& tech = spec.technologies[t];
    for (std::size_t p = 0; p < P; ++p) {
      const Real cf = tech.capacity_factor.empty() ? 1.0 : tech.capacity_factor[p];
      std::map<std::size_t, Real> row{{model.dispatch[t][p], tech.outputs.front().efficiency},
                                      {model.capacity[t], -cf * spec.periods[p].hours}};
      rows.push_back(make_row(row, Sense::LessEqual, 0.0, "capacity:" + tech.name + ":" + spec.periods[p].id));
    }
  }
  for (std::size_t r = 0; r < spec.resources.size(); ++r) {
    if (!spec.resources[r].potential) continue;
    std::map<std::size_t, Real> row;
    for (std::size_t p = 0; p < P; ++p) row[model.resource_use[r][p]] = 1.0;
    rows.push_back(make_row(row, Sense::LessEqual, *spec.resources[r].potential, "potential:" + spec.resources[r].name));
  }

  LinearObjective cost{Vector::Zero(n), 0.0, "C_tot"};
  LinearObjective energy{Vector::Zero(n), 0.0, "E_in"};
  std::map<std::size_t, Real> gwp;
  for (std::size_t t = 0; t < spec.technologies.size(); ++t) {
    const Technology& tech = spec.technologies[t];
    const auto c = static_cast<Eigen::Index>(model.capacity[t]);
    cost.coefficients(c) = tech.c_inv + tech.c_maint;
    energy.coefficients(c) = tech.e_constr;
    gwp[model.capacity[t]] = tech.gwp_constr;
  }
  for (std::size_t r = 0; r < spec.resources.size(); ++r) {
    const Resource& res = spec.resources[r];
    for (std::size_t idx : model.resource_use[r]) {
      cost.coefficients(static_cast<Eigen::Index>(idx)) = res.c_op;
      energy.coefficients(static_cast<Eigen::Index>(idx)) = res.e_op;
      gwp[idx] = res.gwp_op;
    }
  }
  LinearConstraint gwp_row = make_row(gwp, Sense::LessEqual, spec.gwp_cap, "gwp");
  if (!gwp_row.terms.empty()) rows.push_back(std::move(gwp_row));

  model.program = LinearProgram(std::move(variables), std::move(rows), {std::move(cost), std::move(energy)});

  Vector endogenous = Vector::Zero(n);
  Vector exogenous = Vector::Zero(n);
  for (std::size_t r = 0; r < spec.resources.size(); ++r) {
    Vector single = Vector::Zero(n);
    for (std::size_t idx : model.resource_use[r]) single(static_cast<Eigen::Index>(idx)) = 1.0;
    (spec.resources[r].cls == ResourceClass::Endogenous ? endogenous : exogenous) += single;
    model.selectors.emplace(spec.resources[r].name, Selector(std::move(single)));
  }
  if (endogenous.any()) model.selectors.emplace("endogenous", Selector(std::move(endogenous)));
  if (exogenous.any()) model.selectors.emplace("exogenous", Selector(std::move(exogenous)));
  return model;
}

EnergyReport report(const SolveOutcome& outcome, const CompiledModel& model, const EnergyModelSpec& spec) {
  if (!outcome.optimal() || !outcome.point) {
    throw ModelError("energy report needs an optimal outcome, got " + std::string(to_string(outcome.status)));
  }
  const Vector& x = *outcome.point;
  if (static_cast<std::size_t>(x.size()) != model.program.num_variables()) {
    throw ModelError("energy report: outcome does not belong to this model");
  }
  EnergyReport out;
  for (std::size_t r = 0; r < spec.resources.size(); ++r) {
    const Resource& res = spec.resources[r];
    Real annual = 0.0;
    for (std::size_t idx : model.resource_use[r]) annual += x(static_cast<Eigen::Index>(idx));
    out.resource_energy[res.name] = annual;
    (res.cls == ResourceClass::Endogenous ? out.endogenous : out.exogenous) += annual;
    out.total_primary += annual;
    out.gwp += res.gwp_op * annual;
  }
  for (std::size_t t = 0; t < spec.technologies.size(); ++t) {
    const Real cap = x(static_cast<Eigen::Index>(model.capacity[t]));
    out.capacities[spec.technologies[t].name] = cap;
    out.gwp += spec.technologies[t].gwp_constr * cap;
  }
  out.cost = evaluate(model.program.objective(model.cost_objective), x);
  out.energy_invested = evaluate(model.program.objective(model.energy_objective), x);
  return out;
}

}  // namespace nearopt::esom
