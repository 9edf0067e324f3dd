#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nearopt/conditions.hpp"
#include "nearopt/lp.hpp"

namespace nearopt::esom {

enum class ResourceClass { Endogenous, Exogenous };

std::string to_string(ResourceClass cls);

struct Resource {
  std::string name;
  Real c_op = 0.0;    // currency per MWh of fuel
  Real e_op = 0.0;    // MWh invested per MWh of fuel
  Real gwp_op = 0.0;  // tCO2-eq per MWh of fuel
  std::optional<Real> potential;  // MWh/y; empty = unlimited
  ResourceClass cls = ResourceClass::Endogenous;
  std::string layer;  // carrier the resource supplies; empty = its own name
  const std::string& supplied_layer() const { return layer.empty() ? name : layer; }
};

struct Output {
  std::string carrier;
  Real efficiency = 1.0;
};

/// Converts `input` energy into one or more carriers. Capacity is measured on
/// the first output.
struct Technology {
  std::string name;
  std::string input;
  std::vector<Output> outputs;
  Real c_inv = 0.0;       // annualised, currency per MW per year
  Real c_maint = 0.0;     // currency per MW per year
  Real e_constr = 0.0;    // annualised, MWh per MW per year
  Real gwp_constr = 0.0;  // annualised, tCO2-eq per MW per year
  std::optional<Real> max_capacity;
  std::vector<Real> capacity_factor;  // per period; empty = 1 everywhere
};

struct Period {
  std::string id;
  Real hours = 0.0;
};

struct DemandProfile {
  std::string carrier;
  std::vector<Real> per_period;  // MWh per period
};

struct EnergyModelSpec {
  std::vector<Period> periods;
  std::vector<Resource> resources;
  std::vector<Technology> technologies;
  std::vector<DemandProfile> demands;
  Real gwp_cap = kInfinity;  // tCO2-eq per year
  std::string notes;
};

inline constexpr Real kHoursPerYear = 8760.0;

struct CompiledModel {
  LinearProgram program;
  std::map<std::string, Selector> selectors;
  std::vector<std::size_t> capacity;                  // per technology
  std::vector<std::vector<std::size_t>> resource_use;  // [resource][period]
  std::vector<std::vector<std::size_t>> dispatch;      // [technology][period], input energy
  std::size_t cost_objective = 0;
  std::size_t energy_objective = 1;
};

/// Variables: cap per technology, F per resource and period, G per technology
/// and period. Rows: carrier balance per layer and period, capacity limits,
/// resource potentials, the GWP cap. Objectives: C_tot then E_in.
CompiledModel compile(const EnergyModelSpec& spec);

struct EnergyReport {
  std::map<std::string, Real> resource_energy;  // sum over periods of F
  std::map<std::string, Real> capacities;
  Real endogenous = 0.0;
  Real exogenous = 0.0;
  Real total_primary = 0.0;
  Real cost = 0.0;
  Real energy_invested = 0.0;
  Real gwp = 0.0;
};

EnergyReport report(const SolveOutcome& outcome, const CompiledModel& model, const EnergyModelSpec& spec);

}  // namespace nearopt::esom
