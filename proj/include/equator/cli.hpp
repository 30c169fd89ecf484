#pragma once

// Command-line surface: subcommands rigidity | density | pi | sample | shell,
// each producing one Document that is serialized as CSV or JSON.
//
// CSV layout: `# key,value` lines for the manifest and summary, then a
// header row and the data rows. JSON layout:
//   {"manifest": {...}, "summary": {...}, "columns": [...], "rows": [[...]]}
// Exit codes: 0 success, 1 computation or data failure, 2 usage error.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "equator/errors.hpp"
#include "equator/models.hpp"
#include "equator/numerics.hpp"
#include "equator/rigidity.hpp"
#include "equator/spherical.hpp"

#ifndef EQUATOR_VERSION
#define EQUATOR_VERSION "0.1.0"
#endif

namespace equator::cli {

inline constexpr const char* kToolVersion = EQUATOR_VERSION;
inline constexpr const char* kThreadsEnv = "EQUATOR_THREADS";

enum class Format { csv, json };

struct OutputSpec {
  Format format = Format::csv;
  std::string destination;  // empty: standard output
  int precision = 15;
};

struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::optional<std::uint64_t> seed;
  std::string tool_version = kToolVersion;
};

using Cell = std::variant<std::monostate, std::int64_t, double, std::string>;

struct Document {
  RunManifest manifest;
  std::vector<std::pair<std::string, Cell>> summary;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// Usage error detected after argument parsing (exit 2).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Formatting

/// Shortest text that round-trips `value` rounded to `precision`
/// significant digits; precision 17 gives the exact shortest round-trip.
inline std::string format_number(double value, int precision) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  std::to_chars_result res;
  if (precision >= 17) {
    res = std::to_chars(buffer, buffer + sizeof buffer, value);
  } else {
    res = std::to_chars(buffer, buffer + sizeof buffer, value,
                        std::chars_format::general, precision);
  }
  return std::string(buffer, res.ptr);
}

inline double round_to_precision(double value, int precision) {
  if (!std::isfinite(value)) return value;
  const std::string text = format_number(value, precision);
  double out = 0.0;
  std::from_chars(text.data(), text.data() + text.size(), out);
  return out;
}

namespace detail {

inline std::string csv_cell(const Cell& cell, int precision) {
  return std::visit(
      [precision](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return "";
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, double>) {
          return format_number(v, precision);
        } else {
          if (v.find_first_of(",\"\n") == std::string::npos) return v;
          std::string quoted = "\"";
          for (char c : v) {
            if (c == '"') quoted += '"';
            quoted += c;
          }
          return quoted + "\"";
        }
      },
      cell);
}

inline nlohmann::ordered_json json_cell(const Cell& cell, int precision) {
  return std::visit(
      [precision](const auto& v) -> nlohmann::ordered_json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return nullptr;
          return round_to_precision(v, precision);
        } else {
          return v;
        }
      },
      cell);
}

}  // namespace detail

inline std::string to_csv(const Document& doc, int precision) {
  std::ostringstream out;
  out << "# command," << doc.manifest.command << '\n';
  out << "# tool_version," << doc.manifest.tool_version << '\n';
  for (const auto& [key, value] : doc.manifest.parameters) {
    out << "# param." << key << ',' << detail::csv_cell(Cell{value}, precision) << '\n';
  }
  if (doc.manifest.seed) out << "# seed," << *doc.manifest.seed << '\n';
  for (const auto& [key, value] : doc.summary) {
    out << "# " << key << ',' << detail::csv_cell(value, precision) << '\n';
  }
  for (std::size_t c = 0; c < doc.columns.size(); ++c) {
    out << (c ? "," : "") << doc.columns[c];
  }
  out << '\n';
  for (const auto& row : doc.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << (c ? "," : "") << detail::csv_cell(row[c], precision);
    }
    out << '\n';
  }
  return out.str();
}

inline std::string to_json(const Document& doc, int precision) {
  nlohmann::ordered_json root;
  auto& manifest = root["manifest"];
  manifest["command"] = doc.manifest.command;
  manifest["tool_version"] = doc.manifest.tool_version;
  manifest["parameters"] = nlohmann::ordered_json::object();
  for (const auto& [key, value] : doc.manifest.parameters) {
    manifest["parameters"][key] = value;
  }
  manifest["seed"] = doc.manifest.seed ? nlohmann::ordered_json(*doc.manifest.seed)
                                       : nlohmann::ordered_json(nullptr);
  root["summary"] = nlohmann::ordered_json::object();
  for (const auto& [key, value] : doc.summary) {
    root["summary"][key] = detail::json_cell(value, precision);
  }
  root["columns"] = doc.columns;
  auto& rows = root["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : doc.rows) {
    auto json_row = nlohmann::ordered_json::array();
    for (const auto& cell : row) json_row.push_back(detail::json_cell(cell, precision));
    rows.push_back(std::move(json_row));
  }
  return root.dump(1) + "\n";
}

inline std::string render(const Document& doc, const OutputSpec& output) {
  return output.format == Format::csv ? to_csv(doc, output.precision)
                                    : to_json(doc, output.precision);
}

inline std::string join(const std::vector<std::uint64_t>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out += (i ? " " : "") + std::to_string(values[i]);
  }
  return out;
}

inline Cell optional_cell(const std::optional<double>& v) {
  return v ? Cell{*v} : Cell{};
}

// ---------------------------------------------------------------------------
// Commands. Each builds a Document; failures throw, and `ok` reports
// partial failure that still produced output.

struct CommandResult {
  Document document;
  bool ok = true;
};

struct RigidityArgs {
  std::vector<std::uint64_t> m_values;
  double rel_tol = 1e-12;
  unsigned threads = 0;
};

inline CommandResult cmd_rigidity(const RigidityArgs& args) {
  rigidity::ConvergenceOptions opts;
  opts.rel_tol = args.rel_tol;
  opts.threads = args.threads;
  std::vector<QuantumIndex> ms(args.m_values.begin(), args.m_values.end());
  const auto reports = rigidity::convergence_table(ms, opts);

  CommandResult result;
  Document& doc = result.document;
  doc.manifest.command = "rigidity";
  doc.manifest.parameters = {{"m", join(args.m_values)},
                             {"tol", format_number(args.rel_tol, 17)}};
  doc.columns = {"m",          "R_product", "R_gamma", "R_quadrature",
                 "R_asymptotic", "defect",  "spread",  "status"};
  for (const auto& r : reports) {
    doc.rows.push_back({static_cast<std::int64_t>(r.m.value()),
                        optional_cell(r.via_product), r.via_gamma,
                        optional_cell(r.via_quadrature),
                        optional_cell(r.asymptotic), r.defect,
                        r.cross_route_spread, r.error ? *r.error : "ok"});
    if (r.error) result.ok = false;
  }
  return result;
}

struct DensityArgs {
  std::vector<std::uint64_t> m_values;
  std::uint64_t points = 181;
  bool gaussian = false;
};

inline CommandResult cmd_density(const DensityArgs& args) {
  if (args.points < 2) throw UsageError("--points must be at least 2");
  if (args.m_values.empty()) throw UsageError("at least one m is required");
  CommandResult result;
  Document& doc = result.document;
  doc.manifest.command = "density";
  doc.manifest.parameters = {{"m", join(args.m_values)},
                             {"points", std::to_string(args.points)},
                             {"gaussian", args.gaussian ? "true" : "false"}};
  doc.columns = {"theta"};
  std::vector<spherical::PolarDensity> densities;
  for (auto m : args.m_values) {
    densities.emplace_back(QuantumIndex(m));
    doc.columns.push_back("P_" + std::to_string(m));
    if (args.gaussian) doc.columns.push_back("G_" + std::to_string(m));
  }
  const double step = std::numbers::pi / static_cast<double>(args.points - 1);
  for (std::uint64_t i = 0; i < args.points; ++i) {
    const double theta =
        i + 1 == args.points ? std::numbers::pi : static_cast<double>(i) * step;
    std::vector<Cell> row{theta};
    for (const auto& d : densities) {
      row.emplace_back(d(theta));
      if (args.gaussian) {
        row.emplace_back(spherical::gaussian_approx(d.m(), theta - spherical::kHalfPi));
      }
    }
    doc.rows.push_back(std::move(row));
  }
  return result;
}

struct PiArgs {
  std::uint64_t m_max = 0;
  std::uint64_t exact_cap = rigidity::kDefaultExactCap;
};

inline CommandResult cmd_pi(const PiArgs& args) {
  if (args.m_max > args.exact_cap) {
    throw ResourceError("m-max " + std::to_string(args.m_max) +
                        " exceeds exact-arithmetic cap " +
                        std::to_string(args.exact_cap));
  }
  CommandResult result;
  Document& doc = result.document;
  doc.manifest.command = "pi";
  doc.manifest.parameters = {{"m_max", std::to_string(args.m_max)}};
  doc.columns = {"m", "two_W", "error", "scaled_error"};
  rigidity::WallisSequence seq;
  for (;;) {
    const double estimate = 2.0 * seq.value();
    const double error = rigidity::kPi - estimate;
    doc.rows.push_back({static_cast<std::int64_t>(seq.m()), estimate, error,
                        static_cast<double>(seq.m()) * error});
    if (seq.m() >= args.m_max) break;
    seq.advance();
  }
  return result;
}

struct SampleArgs {
  std::uint64_t m = 0;
  std::uint64_t count = 1000;
  std::uint64_t seed = 0;
  std::uint64_t max_count = 100'000'000;
};

inline CommandResult cmd_sample(const SampleArgs& args) {
  if (args.count < 1) throw UsageError("--count must be at least 1");
  spherical::SamplerOptions opts;
  opts.max_count = args.max_count;
  const QuantumIndex m(args.m);
  const auto batch = spherical::sample_polar(m, args.count, args.seed, opts);
  const std::span<const double> thetas = batch.thetas;

  CommandResult result;
  Document& doc = result.document;
  doc.manifest.command = "sample";
  doc.manifest.parameters = {{"m", std::to_string(args.m)},
                             {"count", std::to_string(args.count)}};
  doc.manifest.seed = args.seed;

  const auto mean = spherical::sample_moment(thetas, [](double t) { return t; });
  const auto cos2 = spherical::sample_moment(thetas, [](double t) {
    const double c = std::cos(t);
    return c * c;
  });
  doc.summary = {{"mean_theta", mean.mean},
                 {"mean_theta_se", mean.standard_error},
                 {"target_mean_theta", spherical::kHalfPi},
                 {"mean_cos2", cos2.mean},
                 {"mean_cos2_se", cos2.standard_error},
                 {"target_cos2", 1.0 / (2.0 * m.as_double() + 3.0)}};
  if (args.m >= 1) {
    const auto csc = spherical::sample_moment(
        thetas, [](double t) { return 1.0 / std::sin(t); });
    doc.summary.emplace_back("mean_csc", csc.mean);
    doc.summary.emplace_back("mean_csc_se", csc.standard_error);
    doc.summary.emplace_back("target_csc", spherical::csc_expectation(m));
  }
  doc.columns = {"theta"};
  doc.rows.reserve(thetas.size());
  for (double t : thetas) doc.rows.push_back({t});
  return result;
}

struct ShellArgs {
  std::string profile_path;
  double mass = 1.0;
  double radial_energy = 0.0;
  std::uint64_t ell_max = 10;
};

inline CommandResult cmd_shell(const ShellArgs& args) {
  if (!(args.mass > 0.0)) throw UsageError("--mass must be positive");
  std::ifstream in(args.profile_path);
  if (!in) {
    throw ProfileError("cannot open profile '" + args.profile_path + "'");
  }
  const auto profile = models::load_radial_profile(in);
  const auto reduction = models::shell_reduce(profile, args.radial_energy);

  CommandResult result;
  Document& doc = result.document;
  doc.manifest.command = "shell";
  doc.manifest.parameters = {{"profile", args.profile_path},
                             {"mass", format_number(args.mass, 17)},
                             {"radial_energy", format_number(args.radial_energy, 17)},
                             {"ell_max", std::to_string(args.ell_max)}};
  doc.summary = {{"effective_radius", reduction.effective_radius},
                 {"r_minus2_expectation", reduction.r_minus2_expectation},
                 {"scale_factor", profile.scale_factor()},
                 {"tails_truncated", std::int64_t{profile.tails_truncated()}},
                 {"units", std::string(models::kUnitConvention)}};
  doc.columns = {"ell", "energy"};
  for (std::uint64_t ell = 0; ell <= args.ell_max; ++ell) {
    const auto entry = models::shell_spectrum(ell, args.mass, reduction);
    doc.rows.push_back({static_cast<std::int64_t>(ell), entry.energy});
  }
  return result;
}

// ---------------------------------------------------------------------------
// Dispatch

inline unsigned threads_from_environment() {
  const char* raw = std::getenv(kThreadsEnv);
  if (raw == nullptr) return 0;
  unsigned value = 0;
  const std::string_view text(raw);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc{} && ptr == text.data() + text.size() ? value : 0;
}

inline std::vector<std::uint64_t> checked_indices(const std::vector<long long>& raw) {
  std::vector<std::uint64_t> out;
  for (long long v : raw) {
    if (v < 0) {
      throw UsageError("m must be non-negative, got " + std::to_string(v));
    }
    out.push_back(static_cast<std::uint64_t>(v));
  }
  return out;
}

/// Parses argv, runs one subcommand, writes the payload to `out` (or the
/// --out file) and diagnostics to `err`. Returns the process exit code.
inline int run_cli(int argc, const char* const* argv, std::ostream& out,
                   std::ostream& err) {
  CLI::App app{"Equatorial rigidity of highest-weight spherical states"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  OutputSpec output;
  std::string format = "csv";
  app.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", output.destination, "Write payload to PATH instead of stdout");
  app.add_option("--precision", output.precision, "Significant digits (1-17)")
      ->check(CLI::Range(1, 17));

  std::vector<long long> m_list;
  long long m_max = -1;
  long long stride = 1;
  double tol = 1e-12;
  auto* rigidity_cmd = app.add_subcommand("rigidity", "Rigidity index by all routes");
  auto* r_m = rigidity_cmd->add_option("--m", m_list, "Quantum numbers")->allow_extra_args();
  auto* r_max = rigidity_cmd->add_option("--m-max", m_max, "Largest m of a strided range");
  rigidity_cmd->add_option("--stride", stride, "Stride for --m-max")->check(CLI::PositiveNumber);
  rigidity_cmd->add_option("--tol", tol, "Quadrature relative tolerance")
      ->check(CLI::PositiveNumber);
  r_m->excludes(r_max);

  std::vector<long long> density_m;
  DensityArgs density;
  auto* density_cmd = app.add_subcommand("density", "Polar density curves");
  density_cmd->add_option("--m", density_m, "Quantum numbers")->required()->allow_extra_args();
  density_cmd->add_option("--points", density.points, "Theta grid points (>= 2)");
  density_cmd->add_flag("--gaussian", density.gaussian, "Add Gaussian-approximation columns");

  long long pi_m_max = 0;
  auto* pi_cmd = app.add_subcommand("pi", "Wallis estimates 2 W_m of pi");
  pi_cmd->add_option("--m-max", pi_m_max, "Largest m")->required();

  long long sample_m = 0;
  SampleArgs sample;
  auto* sample_cmd = app.add_subcommand("sample", "Monte Carlo draws from P_m");
  sample_cmd->add_option("--m", sample_m, "Quantum number")->required();
  sample_cmd->add_option("--count", sample.count, "Number of draws")->required();
  sample_cmd->add_option("--seed", sample.seed, "Random seed");

  ShellArgs shell;
  auto* shell_cmd = app.add_subcommand("shell", "Thin-shell reduction and spectrum");
  shell_cmd->add_option("--profile", shell.profile_path, "Radial profile CSV (r,f0)")
      ->required();
  shell_cmd->add_option("--mass", shell.mass, "Particle mass");
  shell_cmd->add_option("--radial-energy", shell.radial_energy, "Radial ground energy");
  shell_cmd->add_option("--ell-max", shell.ell_max, "Largest l in the spectrum");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  output.format = format == "json" ? Format::json : Format::csv;

  CommandResult result;
  try {
    if (rigidity_cmd->parsed()) {
      RigidityArgs args;
      args.rel_tol = tol;
      args.threads = threads_from_environment();
      if (!m_list.empty()) {
        args.m_values = checked_indices(m_list);
      } else if (m_max >= 0) {
        for (long long m = 0; m <= m_max; m += stride) {
          args.m_values.push_back(static_cast<std::uint64_t>(m));
        }
      } else if (*r_max) {
        throw UsageError("--m-max must be non-negative");
      } else {
        throw UsageError("rigidity needs --m or --m-max");
      }
      result = cmd_rigidity(args);
    } else if (density_cmd->parsed()) {
      density.m_values = checked_indices(density_m);
      result = cmd_density(density);
    } else if (pi_cmd->parsed()) {
      if (pi_m_max < 0) throw UsageError("--m-max must be non-negative");
      result = cmd_pi({static_cast<std::uint64_t>(pi_m_max)});
    } else if (sample_cmd->parsed()) {
      sample.m = checked_indices({sample_m}).front();
      result = cmd_sample(sample);
    } else if (shell_cmd->parsed()) {
      result = cmd_shell(shell);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  const std::string payload = render(result.document, output);
  if (output.destination.empty()) {
    out << payload;
  } else {
    std::ofstream file(output.destination, std::ios::binary);
    if (!(file << payload)) {
      err << "error: cannot write '" << output.destination << "'\n";
      return 1;
    }
  }
  if (!result.ok) {
    err << "error: one or more rows failed; see the status column\n";
    return 1;
  }
  return 0;
}

}  // namespace equator::cli
