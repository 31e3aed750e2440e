#pragma once

// Command layer behind the gbsbell executable. Each command resolves its
// parameters, produces a Report, and run_invocation() renders the report and
// a run manifest to disk. Replaying a manifest reproduces the outputs
// byte for byte.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gbs/bell.hpp"
#include "gbs/dynamics.hpp"

namespace gbs::cli {

inline constexpr std::string_view kVersion = "1.0.0";

/// Bad flags or parameter values; maps to the usage exit code.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 12 significant digits, '.' separator, no locale, negative zero printed as 0.
std::string format_number(double x);
/// Shortest string that parses back to exactly x.
std::string format_exact(double x);

double parse_number(std::string_view text);
/// Radians, or a multiple of pi with a "pi" suffix ("0.25pi", "-pi").
double parse_angle(std::string_view text);
std::vector<double> parse_list(std::string_view text);
/// "start:stop:step" or a comma-separated list; returns ascending values in [0, 1].
std::vector<double> parse_grid(std::string_view text);
AnglePreset parse_preset(std::string_view text);
std::string_view preset_name(AnglePreset kind);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct Report {
  std::vector<std::pair<std::string, std::string>> entries;
  std::optional<Table> table;

  void add(std::string key, std::string value) { entries.emplace_back(std::move(key), std::move(value)); }
  void add(std::string key, double value) { add(std::move(key), format_number(value)); }
};

enum class Format { csv, keyvalue };

std::string render_csv_table(const Table& t);
std::string render_csv_entries(const Report& r);
std::string render_keyvalue(const Report& r);

// --------------------------------------------------------------- commands

struct ScanOptions {
  AnglePreset preset = AnglePreset::maximal;
  std::vector<double> grid;
  double theta = 0.0;
  bool include_threshold = false;
  std::size_t n_max = kDefaultNMax;
};
Report cmd_scan(const ScanOptions& o);

struct PScanOptions {
  AnglePreset preset = AnglePreset::maximal;
  double eta = 1.0;
  double step = 0.01;
  double theta = 0.0;
};
Report cmd_pscan(const PScanOptions& o);

Report cmd_covariance(const EntangledGbsParams& params, std::size_t n_max = kDefaultNMax);

struct SimulateOptions {
  AnglePreset preset = AnglePreset::maximal;
  double eta = 1.0;
  double theta = 0.0;
  std::uint64_t shots = 100000;
  std::uint64_t seed = 42;
  double alpha = 1.0;
  std::size_t n_max = kDefaultNMax;
  unsigned workers = 1;
};
Report cmd_simulate(const SimulateOptions& o);

struct GenerateOptions {
  double eta = 1.0;
  double p1 = 0.5, theta1 = 0.0;
  double p2 = 0.5, theta2 = 0.0;
  std::size_t n_max = kDefaultNMax;
};
Report cmd_generate(const GenerateOptions& o);

struct SensitivityOptions {
  AnglePreset preset = AnglePreset::maximal;
  double eta = 1.0;
  double theta = 0.0;
  std::vector<double> epsilons{-0.02, -0.01, 0.0, 0.01, 0.02};
  std::size_t n_max = kDefaultNMax;
};
Report cmd_sensitivity(const SensitivityOptions& o);

// ------------------------------------------------------- invocation layer

/// A command with its raw flag values. Missing parameters take defaults.
struct Invocation {
  std::string command;
  std::map<std::string, std::string> params;
  std::uint64_t seed = 42;
  std::size_t n_max = kDefaultNMax;
  std::string out;  // empty -> "<command>.<ext>"
  std::optional<Format> format;
  unsigned workers = 1;  // execution detail; never affects outputs
};

struct RunResult {
  std::vector<std::string> outputs;  // files written, manifest last
  Report report;
};

/// Commands and the parameter names each accepts.
const std::map<std::string, std::vector<std::string>>& command_parameters();

RunResult run_invocation(const Invocation& inv);

/// Parse a manifest written by run_invocation back into an invocation.
Invocation read_manifest(const std::string& path);

}  // namespace gbs::cli
