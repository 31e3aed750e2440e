#include "gbs/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

#include "gbs/field.hpp"

namespace gbs::cli {

// ------------------------------------------------------------ number format

std::string format_number(double x) {
  if (x == 0.0) x = 0.0;  // drops the sign of -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

std::string format_exact(double x) {
  if (x == 0.0) x = 0.0;
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      parts.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return parts;
}

}  // namespace

double parse_number(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw UsageError("not a number: '" + std::string(text) + "'");
  }
  return v;
}

double parse_angle(std::string_view text) {
  text = trim(text);
  if (text.size() >= 2 && text.substr(text.size() - 2) == "pi") {
    std::string_view factor = trim(text.substr(0, text.size() - 2));
    if (factor.empty() || factor == "+") return kPi;
    if (factor == "-") return -kPi;
    if (factor.back() == '*') factor.remove_suffix(1);
    return parse_number(factor) * kPi;
  }
  return parse_number(text);
}

std::vector<double> parse_list(std::string_view text) {
  std::vector<double> out;
  for (auto part : split(text, ',')) out.push_back(parse_number(part));
  return out;
}

std::vector<double> parse_grid(std::string_view text) {
  text = trim(text);
  std::vector<double> values;
  if (text.find(':') != std::string_view::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw UsageError("grid must be start:stop:step");
    const double start = parse_number(parts[0]);
    const double stop = parse_number(parts[1]);
    const double step = parse_number(parts[2]);
    if (!(step > 0.0) || stop < start) throw UsageError("grid needs step > 0 and stop >= start");
    const double span = (stop - start) / step;
    const double count = std::round(span);
    if (std::abs(span - count) > 1e-9) throw UsageError("grid step must divide [start, stop]");
    for (long k = 0; k <= static_cast<long>(count); ++k) values.push_back(start + static_cast<double>(k) * step);
    values.back() = stop;
  } else {
    values = parse_list(text);
    std::sort(values.begin(), values.end());
  }
  for (double& v : values) {
    if (std::abs(v) < 1e-15) v = 0.0;
    if (v < 0.0 || v > 1.0 + 1e-12) throw UsageError("grid values must lie in [0, 1]");
    v = std::min(v, 1.0);
  }
  return values;
}

AnglePreset parse_preset(std::string_view text) {
  text = trim(text);
  if (text == "maximal") return AnglePreset::maximal;
  if (text == "wide") return AnglePreset::wide;
  throw UsageError("preset must be 'maximal' or 'wide'");
}

std::string_view preset_name(AnglePreset kind) { return kind == AnglePreset::maximal ? "maximal" : "wide"; }

// --------------------------------------------------------------- rendering

std::string render_csv_table(const Table& t) {
  std::string out;
  for (std::size_t c = 0; c < t.columns.size(); ++c) out += (c ? "," : "") + t.columns[c];
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + format_number(row[c]);
    out += '\n';
  }
  return out;
}

std::string render_csv_entries(const Report& r) {
  std::string out = "key,value\n";
  for (const auto& [k, v] : r.entries) out += k + "," + v + "\n";
  return out;
}

std::string render_keyvalue(const Report& r) {
  std::string out;
  for (const auto& [k, v] : r.entries) out += k + " = " + v + "\n";
  if (r.table) {
    for (std::size_t i = 0; i < r.table->rows.size(); ++i) {
      for (std::size_t c = 0; c < r.table->columns.size(); ++c) {
        out += "row." + std::to_string(i) + "." + r.table->columns[c] + " = " + format_number(r.table->rows[i][c]) + "\n";
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------- commands

namespace {
std::string bool_text(bool b) { return b ? "true" : "false"; }
}  // namespace

Report cmd_scan(const ScanOptions& o) {
  std::vector<double> grid = o.grid;
  if (o.include_threshold) grid.push_back(violation_threshold(o.preset));
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.empty()) throw UsageError("scan: empty grid");

  Report r;
  r.add("preset", std::string(preset_name(o.preset)));
  r.add("theta", o.theta);
  r.add("threshold_G", violation_threshold(o.preset));
  Table t{{"G", "s_b_analytic", "s_b_operator"}, {}};
  for (const double G : grid) {
    const double eta = eta_for_degree(G);
    t.rows.push_back({G, analytic_s_b(o.preset, G), bell_function_operator(preset_config(o.preset, eta, o.theta), o.n_max)});
  }
  r.table = std::move(t);
  return r;
}

Report cmd_pscan(const PScanOptions& o) {
  BellConfig cfg = preset_config(o.preset, o.eta, o.theta);
  PScanResult scan;
  try {
    scan = optimal_p_scan(cfg, o.step);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  Report r;
  r.add("preset", std::string(preset_name(o.preset)));
  r.add("eta", o.eta);
  r.add("theta", o.theta);
  r.add("step", o.step);
  r.add("p_star", scan.p_star);
  r.add("s_b_max", scan.s_b_max);
  Table t{{"p", "s_b"}, {}};
  for (const auto& [p, s] : scan.curve) t.rows.push_back({p, s});
  r.table = std::move(t);
  return r;
}

Report cmd_covariance(const EntangledGbsParams& q, std::size_t n_max) {
  for (double p : {q.p1, q.p2})
    if (!(p >= 0.0 && p <= 1.0)) throw UsageError("covariance: p1, p2 must lie in [0, 1]");
  const FieldStats a = field_covariance(q);
  const FieldStats b = field_covariance_operator(q, n_max);
  Report r;
  r.add("p1", q.p1);
  r.add("p2", q.p2);
  r.add("theta1", q.theta1);
  r.add("theta2", q.theta2);
  r.add("eta", q.eta);
  r.add("units", std::string("4*pi*hbar*omega/V = 1"));
  r.add("e1_analytic", a.e1);
  r.add("e1_operator", b.e1);
  r.add("e2_analytic", a.e2);
  r.add("e2_operator", b.e2);
  r.add("e1e2_analytic", a.e1e2);
  r.add("e1e2_operator", b.e1e2);
  r.add("covariance_analytic", a.covariance);
  r.add("covariance_operator", b.covariance);
  return r;
}

Report cmd_simulate(const SimulateOptions& o) {
  if (o.shots < 100) throw UsageError("simulate: shots must be >= 100");
  if (!(o.alpha >= 0.0 && o.alpha <= 1.0)) throw UsageError("simulate: alpha must lie in [0, 1]");
  ExperimentConfig cfg;
  cfg.bell = preset_config(o.preset, o.eta, o.theta);
  cfg.shots = o.shots;
  cfg.seed = o.seed;
  cfg.detector_efficiency = o.alpha;
  cfg.n_max = o.n_max;
  cfg.workers = o.workers;
  const BellEstimate est = run_bell_experiment(cfg);
  const DetectionReport det = detection_threshold_check(o.alpha);

  Report r;
  r.add("preset", std::string(preset_name(o.preset)));
  r.add("eta", o.eta);
  r.add("G", degree_of_entanglement(o.eta));
  r.add("theta", o.theta);
  r.add("p", cfg.bell.p);
  r.add("shots_per_setting", std::to_string(o.shots));
  r.add("seed", std::to_string(o.seed));
  r.add("alpha", o.alpha);
  r.add("fair_sampling", bool_text(cfg.fair_sampling));
  r.add("s_b_hat", est.s_b_hat);
  r.add("std_error", est.std_error);
  r.add("s_b_target", est.s_b_target);
  r.add("deviation_sigma", est.std_error > 0.0 ? (est.s_b_hat - est.s_b_target) / est.std_error : 0.0);
  r.add("violation", bool_text(est.s_b_hat > 2.0));
  r.add("discarded_shots", std::to_string(est.discarded_shots));
  r.add("alpha_t", det.alpha_t);
  r.add("loophole_free_violation_possible", bool_text(det.violable));
  for (std::size_t k = 0; k < est.settings.size(); ++k) {
    const SettingEstimate& s = est.settings[k];
    const std::string pre = "setting." + std::to_string(k) + ".";
    r.add(pre + "phi_a", s.phi_a);
    r.add(pre + "phi_b", s.phi_b);
    r.add(pre + "n_pp", std::to_string(s.n_pp));
    r.add(pre + "n_pm", std::to_string(s.n_pm));
    r.add(pre + "n_mp", std::to_string(s.n_mp));
    r.add(pre + "n_mm", std::to_string(s.n_mm));
    r.add(pre + "retained", std::to_string(s.retained));
    r.add(pre + "discarded", std::to_string(s.discarded));
    r.add(pre + "correlation", s.correlation);
    r.add(pre + "std_error", s.std_error);
    r.add(pre + "exact", s.exact);
  }
  for (std::size_t i = 0; i < est.warnings.size(); ++i) r.add("warning." + std::to_string(i), est.warnings[i]);
  return r;
}

Report cmd_generate(const GenerateOptions& o) {
  for (double p : {o.p1, o.p2})
    if (!(p >= 0.0 && p <= 1.0)) throw UsageError("generate: p1, p2 must lie in [0, 1]");
  const GenerationResult gen = generate_entangled_gbs({o.eta}, o.p1, o.theta1, o.p2, o.theta2, o.n_max);
  const TwoCavityState target = entangled_gbs_state({o.p1, o.p2, o.theta1, o.theta2, o.eta}, o.n_max);

  // Same target with the branch weight eta replaced by eta * exp(i (theta1 - theta2)).
  const StateVector a1 = gbs_state({o.p1, o.theta1}, o.n_max);
  const StateVector a1p = gbs_state(orthogonal_partner({o.p1, o.theta1}), o.n_max);
  const StateVector a2 = gbs_state({o.p2, o.theta2}, o.n_max);
  const StateVector a2p = gbs_state(orthogonal_partner({o.p2, o.theta2}), o.n_max);
  const TwoCavityState x = tensor(a1, a2p);
  const TwoCavityState y = tensor(a1p, a2);
  const cplx w = o.eta * std::polar(1.0, o.theta1 - o.theta2);
  std::vector<cplx> amps(x.amplitudes().size());
  for (std::size_t i = 0; i < amps.size(); ++i) amps[i] = x.amplitudes()[i] + w * y.amplitudes()[i];
  const TwoCavityState phased(o.n_max, std::move(amps));

  char fixed[64];
  std::snprintf(fixed, sizeof(fixed), "%.12f", fidelity(gen.field, target));

  Report r;
  r.add("eta", o.eta);
  r.add("p1", o.p1);
  r.add("theta1", o.theta1);
  r.add("p2", o.p2);
  r.add("theta2", o.theta2);
  r.add("fidelity", std::string(fixed));
  r.add("fidelity_with_branch_phase", fidelity(gen.field, phased));
  r.add("branch_phase", wrap_phase(o.theta1 - o.theta2));
  r.add("p_atoms_down_down", gen.atom_probabilities[0]);
  r.add("p_atoms_down_up", gen.atom_probabilities[1]);
  r.add("p_atoms_up_down", gen.atom_probabilities[2]);
  r.add("p_atoms_up_up", gen.atom_probabilities[3]);
  return r;
}

Report cmd_sensitivity(const SensitivityOptions& o) {
  for (double e : o.epsilons)
    if (!(std::abs(e) < 0.5)) throw UsageError("sensitivity: |epsilon| must be < 0.5");
  ExperimentConfig cfg;
  cfg.bell = preset_config(o.preset, o.eta, o.theta);
  cfg.n_max = o.n_max;
  const auto rows = timing_sensitivity(cfg, o.epsilons);
  Report r;
  r.add("preset", std::string(preset_name(o.preset)));
  r.add("eta", o.eta);
  r.add("theta", o.theta);
  r.add("s_b_ideal", bell_function(cfg.bell));
  Table t{{"epsilon", "fidelity", "s_b", "delta_s_b"}, {}};
  for (const auto& row : rows) t.rows.push_back({row.epsilon, row.fidelity, row.s_b, row.delta_s_b});
  r.table = std::move(t);
  return r;
}

// -------------------------------------------------------- invocation layer

const std::map<std::string, std::vector<std::string>>& command_parameters() {
  static const std::map<std::string, std::vector<std::string>> params{
      {"scan", {"preset", "grid", "theta", "include_threshold"}},
      {"pscan", {"preset", "eta", "step", "theta"}},
      {"covariance", {"p1", "p2", "theta1", "theta2", "eta"}},
      {"simulate", {"preset", "eta", "theta", "shots", "alpha"}},
      {"generate", {"eta", "p1", "theta1", "p2", "theta2"}},
      {"sensitivity", {"preset", "eta", "theta", "eps"}},
  };
  return params;
}

namespace {

class ParamReader {
 public:
  explicit ParamReader(const std::map<std::string, std::string>& raw) : raw_(raw) {}

  const std::string* find(const std::string& key) {
    used_.insert(key);
    const auto it = raw_.find(key);
    return it == raw_.end() ? nullptr : &it->second;
  }

  double number(const std::string& key, double fallback) {
    const auto* v = find(key);
    const double x = v ? parse_number(*v) : fallback;
    record(key, format_exact(x));
    return x;
  }
  double angle(const std::string& key, double fallback) {
    const auto* v = find(key);
    const double x = v ? parse_angle(*v) : fallback;
    record(key, format_exact(x));
    return x;
  }
  AnglePreset preset() {
    const auto* v = find("preset");
    const AnglePreset k = v ? parse_preset(*v) : AnglePreset::maximal;
    record("preset", std::string(preset_name(k)));
    return k;
  }
  bool flag(const std::string& key) {
    const auto* v = find(key);
    bool b = false;
    if (v) {
      if (*v == "true" || *v == "1") b = true;
      else if (*v == "false" || *v == "0") b = false;
      else throw UsageError(key + " must be true or false");
    }
    record(key, bool_text(b));
    return b;
  }
  std::uint64_t count(const std::string& key, std::uint64_t fallback) {
    const auto* v = find(key);
    std::uint64_t n = fallback;
    if (v) {
      const std::string_view t = trim(*v);
      const auto res = std::from_chars(t.data(), t.data() + t.size(), n);
      if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
        throw UsageError(key + " must be a non-negative integer");
      }
    }
    record(key, std::to_string(n));
    return n;
  }
  std::string text(const std::string& key, const std::string& fallback) {
    const auto* v = find(key);
    std::string s = v ? std::string(trim(*v)) : fallback;
    record(key, s);
    return s;
  }

  void reject_unknown(const std::string& command) const {
    for (const auto& [k, v] : raw_) {
      if (!used_.count(k)) throw UsageError(command + ": unknown parameter '" + k + "'");
    }
  }

  std::vector<std::pair<std::string, std::string>> resolved;

 private:
  void record(const std::string& key, std::string value) { resolved.emplace_back(key, std::move(value)); }

  const std::map<std::string, std::string>& raw_;
  std::set<std::string> used_;
};

std::string join_exact(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + format_exact(xs[i]);
  return s;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open output file '" + path + "'");
  f << content;
  if (!f) throw std::runtime_error("failed writing '" + path + "'");
}

Format default_format(const std::string& command) {
  return (command == "scan" || command == "pscan" || command == "sensitivity") ? Format::csv : Format::keyvalue;
}

}  // namespace

RunResult run_invocation(const Invocation& inv) {
  const auto& known = command_parameters();
  if (!known.count(inv.command)) throw UsageError("unknown command '" + inv.command + "'");
  if (inv.n_max < 1) throw UsageError("--n-max must be >= 1");

  ParamReader in(inv.params);
  Report report;
  const std::string& cmd = inv.command;
  if (cmd == "scan") {
    ScanOptions o;
    o.preset = in.preset();
    const std::string grid = in.text("grid", "0:1:0.1");
    o.grid = parse_grid(grid);
    o.theta = in.angle("theta", 0.0);
    o.include_threshold = in.flag("include_threshold");
    o.n_max = inv.n_max;
    in.reject_unknown(cmd);
    report = cmd_scan(o);
  } else if (cmd == "pscan") {
    PScanOptions o;
    o.preset = in.preset();
    o.eta = in.number("eta", 1.0);
    o.step = in.number("step", 0.01);
    o.theta = in.angle("theta", 0.0);
    in.reject_unknown(cmd);
    report = cmd_pscan(o);
  } else if (cmd == "covariance") {
    EntangledGbsParams q{};
    q.p1 = in.number("p1", 0.5);
    q.p2 = in.number("p2", 0.5);
    q.theta1 = in.angle("theta1", 0.0);
    q.theta2 = in.angle("theta2", 0.0);
    q.eta = in.number("eta", 1.0);
    in.reject_unknown(cmd);
    report = cmd_covariance(q, inv.n_max);
  } else if (cmd == "simulate") {
    SimulateOptions o;
    o.preset = in.preset();
    o.eta = in.number("eta", 1.0);
    o.theta = in.angle("theta", 0.0);
    o.shots = in.count("shots", 100000);
    o.alpha = in.number("alpha", 1.0);
    o.seed = inv.seed;
    o.n_max = inv.n_max;
    o.workers = inv.workers;
    in.reject_unknown(cmd);
    report = cmd_simulate(o);
  } else if (cmd == "generate") {
    GenerateOptions o;
    o.eta = in.number("eta", 1.0);
    o.p1 = in.number("p1", 0.5);
    o.theta1 = in.angle("theta1", 0.0);
    o.p2 = in.number("p2", 0.5);
    o.theta2 = in.angle("theta2", 0.0);
    o.n_max = inv.n_max;
    in.reject_unknown(cmd);
    report = cmd_generate(o);
  } else if (cmd == "sensitivity") {
    SensitivityOptions o;
    o.preset = in.preset();
    o.eta = in.number("eta", 1.0);
    o.theta = in.angle("theta", 0.0);
    const auto* eps = in.find("eps");
    if (eps) o.epsilons = parse_list(*eps);
    in.resolved.emplace_back("eps", join_exact(o.epsilons));
    o.n_max = inv.n_max;
    in.reject_unknown(cmd);
    report = cmd_sensitivity(o);
  }

  const Format fmt = inv.format.value_or(default_format(cmd));
  const std::string out = inv.out.empty() ? cmd + (fmt == Format::csv ? ".csv" : ".txt") : inv.out;

  RunResult result;
  if (fmt == Format::keyvalue) {
    write_file(out, render_keyvalue(report));
    result.outputs.push_back(out);
  } else if (report.table) {
    write_file(out, render_csv_table(*report.table));
    result.outputs.push_back(out);
    const std::string summary = out + ".summary";
    write_file(summary, render_keyvalue(Report{report.entries, std::nullopt}));
    result.outputs.push_back(summary);
  } else {
    write_file(out, render_csv_entries(report));
    result.outputs.push_back(out);
  }

  std::string manifest;
  manifest += "command = " + cmd + "\n";
  manifest += "version = " + std::string(kVersion) + "\n";
  manifest += "seed = " + std::to_string(inv.seed) + "\n";
  manifest += "n_max = " + std::to_string(inv.n_max) + "\n";
  manifest += std::string("format = ") + (fmt == Format::csv ? "csv" : "keyvalue") + "\n";
  manifest += "out = " + out + "\n";
  for (const auto& [k, v] : in.resolved) manifest += "param." + k + " = " + v + "\n";
  for (std::size_t i = 0; i < result.outputs.size(); ++i) {
    manifest += "output." + std::to_string(i) + " = " + result.outputs[i] + "\n";
  }
  const std::string manifest_path = out + ".manifest";
  write_file(manifest_path, manifest);
  result.outputs.push_back(manifest_path);
  result.report = std::move(report);
  return result;
}

Invocation read_manifest(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot open manifest '" + path + "'");
  Invocation inv;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) throw UsageError("malformed manifest line: '" + line + "'");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 3);
    if (key == "command") {
      inv.command = value;
    } else if (key == "version") {
      if (value != kVersion) throw UsageError("manifest written by version " + value + ", this is " + std::string(kVersion));
    } else if (key == "seed") {
      inv.seed = std::stoull(value);
    } else if (key == "n_max") {
      inv.n_max = std::stoul(value);
    } else if (key == "format") {
      inv.format = value == "csv" ? Format::csv : Format::keyvalue;
    } else if (key == "out") {
      inv.out = value;
    } else if (key.rfind("param.", 0) == 0) {
      inv.params[key.substr(6)] = value;
    }
  }
  if (inv.command.empty()) throw UsageError("manifest has no command");
  return inv;
}

}  // namespace gbs::cli
