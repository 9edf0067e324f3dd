#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nearopt/conditions.hpp"
#include "nearopt/esom.hpp"
#include "nearopt/lp.hpp"
#include "nearopt/nearopt.hpp"
#include "nearopt/pareto.hpp"

namespace nearopt::io {

inline constexpr int kFormatVersion = 1;

/// Model file that parsed but violates the schema; `field` is a JSON-pointer-like path.
class SchemaError : public ModelError {
 public:
  SchemaError(std::string field, const std::string& message)
      : ModelError(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Malformed JSON text.
class ParseError : public ModelError {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message)
      : ModelError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Unreadable input or unwritable output location.
class FileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RawModel {
  LinearProgram program;
  std::map<std::string, Selector> selectors;
};

using ModelDocument = std::variant<RawModel, esom::EnergyModelSpec>;

ModelDocument parse_model(std::string_view text);
ModelDocument load_model(const std::filesystem::path& path);
std::string dump_model(const ModelDocument& document);
void save_model(const ModelDocument& document, const std::filesystem::path& path);

/// Program and named selectors of either flavour; energy models are compiled.
struct ResolvedModel {
  LinearProgram program;
  std::map<std::string, Selector> selectors;
  std::optional<esom::EnergyModelSpec> energy;
  std::optional<esom::CompiledModel> compiled;
};

ResolvedModel resolve(const ModelDocument& document);

/// 12 significant digits; "inf" / "-inf" for infinities.
std::string format_number(Real value);

/// Columns: epsilon, one per objective, one relative deviation per objective.
/// Anchor rows carry the relative deviation of the capped objective as epsilon.
std::string front_csv(const ParetoFront& front, const LinearProgram& lp, std::size_t free_objective);

/// Heatmap: header row of column levels, first column of row levels.
std::string sweep_csv(const SweepResult& result);

std::string report_json(const NecessaryConditionReport& report, const LinearProgram& lp);
std::string sweep_json(const SweepResult& result, const LinearProgram& lp);
std::string front_json(const ParetoFront& front, const LinearProgram& lp);

struct RunManifest {
  std::string command;
  std::string input_digest;
  std::string solver;
  Tolerances tolerances;
  std::vector<Real> schedule;
  std::vector<Real> row_levels;
  std::vector<Real> column_levels;
  std::vector<std::vector<Real>> epsilons;
  std::optional<std::string> selector;
  std::optional<std::size_t> free_objective;
  std::size_t front_size = 0;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::string started;
  std::string finished;
};

std::string manifest_json(const RunManifest& manifest);

/// FNV-1a 64-bit, lowercase hex.
std::string digest(std::string_view bytes);

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary and renames it over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace nearopt::io
