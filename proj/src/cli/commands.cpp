#include "l1line/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "l1line/coordinate_fit.hpp"
#include "l1line/fixed_lambda.hpp"
#include "l1line/io/csv.hpp"
#include "l1line/io/format.hpp"
#include "l1line/io/path_document.hpp"
#include "l1line/path.hpp"
#include "l1line/synth.hpp"

namespace l1line::cli {

using io::fmt_list;
using io::fmt_num;
using nlohmann::json;

namespace {

struct CommonOptions {
  std::string format = "text";
  unsigned threads = 1;
  double tol = 1e-9;

  bool json_output() const { return format == "json"; }
};

void add_common(CLI::App& cmd, CommonOptions& common) {
  cmd.add_option("--format", common.format, "Output format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  cmd.add_option("--threads", common.threads, "Worker threads")
      ->check(CLI::Range(1u, 1024u))
      ->capture_default_str();
  cmd.add_option("--tol", common.tol, "Zero threshold for L0 counts and certificate tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

DataMatrix<double> load(const std::string& file) {
  return DataMatrix<double>(io::read_csv(file).values);
}

json vector_json(const Vector<double>& v) {
  json out = json::array();
  for (Index j = 0; j < v.size(); ++j) out.push_back(v(j));
  return out;
}

int cmd_fit(const std::string& file, double lambda, const CommonOptions& common, std::ostream& out) {
  const auto data = load(file);
  detail::require(lambda >= 0 && std::isfinite(lambda), "lambda must be finite and nonnegative");
  const auto fit = fit_line(data, lambda, FitOptions{common.threads});
  const Index l0 = l0_count(fit.v, common.tol);
  if (common.json_output()) {
    json doc = {{"lambda", fit.lambda},
                {"preserved", fit.preserved ? json(*fit.preserved + 1) : json(nullptr)},
                {"z", fit.z},
                {"l0", l0},
                {"v", vector_json(fit.v)}};
    out << doc.dump(2) << '\n';
  } else {
    out << "lambda: " << fmt_num(fit.lambda) << '\n'
        << "preserved: " << (fit.preserved ? std::to_string(*fit.preserved + 1) : "none") << '\n'
        << "z: " << fmt_num(fit.z) << '\n'
        << "l0: " << l0 << '\n'
        << "v: " << fmt_list(fit.v) << '\n';
  }
  return kOk;
}

int cmd_path(const std::string& file, bool per_coordinate, const CommonOptions& common,
             std::ostream& out) {
  const auto data = load(file);
  const auto paths = all_coordinate_paths(data, common.threads);
  const std::span<const PerCoordinatePath<double>> view(paths);
  const auto path = merge_path(data, view);
  const auto doc = io::make_path_document(data, path, view, per_coordinate);
  out << (common.json_output() ? io::serialize(doc) + "\n" : io::render_text(doc));
  return kOk;
}

struct SimulateFlags {
  SimConfig config;
  int replications = 10;
  std::string source = "merged";
};

int cmd_simulate(const SimulateFlags& flags, const CommonOptions& common, std::ostream& out) {
  SimulationOptions options;
  options.replications = flags.replications;
  options.threads = common.threads;
  options.l0_tol = common.tol;
  options.source =
      flags.source == "union" ? BreakpointSource::per_coordinate_union : BreakpointSource::merged;
  const auto summary = simulate(flags.config, options);

  std::size_t degenerate = 0;
  for (const auto& rec : summary.replications) degenerate += rec.degenerate_lambdas ? 1 : 0;
  const auto& c = summary.config;

  if (common.json_output()) {
    json columns = json::array();
    for (std::size_t k = 0; k < kSimulationColumns.size(); ++k) {
      columns.push_back({{"name", kSimulationColumns[k]},
                         {"l0_mean", summary.l0[k].mean},
                         {"l0_sd", summary.l0[k].sd},
                         {"discordance_mean", summary.discordance[k].mean},
                         {"discordance_sd", summary.discordance[k].sd}});
    }
    json doc = {{"n", c.n},
                {"m", c.m},
                {"nc", c.contaminated_points},
                {"mc", c.contaminated_dims},
                {"reps", summary.replications.size()},
                {"seed", c.seed},
                {"noise", c.noise_scale},
                {"outlier_scale", c.effective_outlier_scale()},
                {"lambda_source", flags.source},
                {"degenerate_lambda_reps", degenerate},
                {"columns", std::move(columns)}};
    out << doc.dump(2) << '\n';
    return kOk;
  }
  out << "n: " << c.n << '\n'
      << "m: " << c.m << '\n'
      << "nc: " << c.contaminated_points << '\n'
      << "mc: " << c.contaminated_dims << '\n'
      << "reps: " << summary.replications.size() << '\n'
      << "seed: " << c.seed << '\n'
      << "noise: " << fmt_num(c.noise_scale) << '\n'
      << "outlier_scale: " << fmt_num(c.effective_outlier_scale()) << '\n'
      << "lambda_source: " << flags.source << '\n'
      << "degenerate_lambda_reps: " << degenerate << '\n';
  for (std::size_t k = 0; k < kSimulationColumns.size(); ++k) {
    out << kSimulationColumns[k] << ": l0 " << fmt_num(summary.l0[k].mean) << " ("
        << fmt_num(summary.l0[k].sd) << ") discordance " << fmt_num(summary.discordance[k].mean)
        << " (" << fmt_num(summary.discordance[k].sd) << ")\n";
  }
  return kOk;
}

int cmd_certify(const std::string& file, const std::vector<double>& lambdas, bool corrupt,
                const CommonOptions& common, std::ostream& out) {
  const auto data = load(file);
  for (const double lambda : lambdas) {
    detail::require(lambda >= 0 && std::isfinite(lambda), "lambda must be finite and nonnegative");
  }
  const auto report = certify(data, lambdas, common.tol, corrupt);
  if (common.json_output()) {
    json doc = {{"subproblems", report.subproblems},
                {"failures", report.failures},
                {"max_gap", report.max_gap},
                {"max_infeasibility", report.max_infeasibility},
                {"status", report.ok() ? "ok" : "failed"},
                {"messages", report.messages}};
    out << doc.dump(2) << '\n';
  } else {
    out << "lambdas: " << fmt_list(lambdas) << '\n'
        << "subproblems: " << report.subproblems << '\n'
        << "failures: " << report.failures << '\n'
        << "max_gap: " << fmt_num(report.max_gap) << '\n'
        << "max_infeasibility: " << fmt_num(report.max_infeasibility) << '\n';
    for (const auto& message : report.messages) out << "failure: " << message << '\n';
    out << "status: " << (report.ok() ? "ok" : "failed") << '\n';
  }
  return report.ok() ? kOk : kCertificationFailed;
}

}  // namespace

CertifyReport certify(const DataMatrix<double>& data, std::span<const double> lambdas, double tol,
                      bool corrupt) {
  CertifyReport report;
  bool corrupted = false;
  for (const double lambda : lambdas) {
    for (Index p = 0; p < data.dims(); ++p) {
      if (data.column_is_zero(p)) continue;
      for (Index j = 0; j < data.dims(); ++j) {
        if (j == p) continue;
        ++report.subproblems;
        const auto ratios = build_ratio_list(data, p, j);
        const auto solution = solve_subproblem(ratios, lambda);
        const std::string where = "lambda " + fmt_num(lambda) + " preserved " +
                                  std::to_string(p + 1) + " target " + std::to_string(j + 1);
        try {
          auto cert = build_dual_certificate(ratios, lambda, solution);
          if (corrupt && !corrupted) {
            cert.gamma += 1.0 + lambda;
            corrupted = true;
          }
          const auto check = check_certificate(ratios, lambda, solution.value, cert, tol);
          report.max_gap = std::max(report.max_gap, check.gap());
          report.max_infeasibility = std::max(
              {report.max_infeasibility, check.balance_residual, check.bound_violation});
          if (!check.ok()) {
            ++report.failures;
            report.messages.push_back(where + ": gap " + fmt_num(check.gap()) + ", balance " +
                                      fmt_num(check.balance_residual) + ", bound excess " +
                                      fmt_num(check.bound_violation));
          }
        } catch (const CertificateInfeasible& e) {
          ++report.failures;
          report.messages.push_back(where + ": " + e.what());
        }
      }
    }
  }
  return report;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse L1-norm best-fit lines and their penalty paths", "l1line"};
  app.require_subcommand(1);

  CommonOptions common;
  std::string input;
  double lambda = 0;
  bool per_coordinate = false;
  SimulateFlags sim;
  std::optional<double> outlier_scale;
  std::vector<double> lambdas;
  bool corrupt = false;

  auto* fit = app.add_subcommand("fit", "Best line at one penalty");
  fit->add_option("input", input, "CSV file, one point per row")->required();
  fit->add_option("--lambda", lambda, "Penalty")->required();
  add_common(*fit, common);

  auto* path = app.add_subcommand("path", "Solution path over all penalties");
  path->add_option("input", input, "CSV file, one point per row")->required();
  path->add_flag("--per-coordinate", per_coordinate, "Also emit every preserved coordinate's lines");
  add_common(*path, common);

  auto* simulate_cmd = app.add_subcommand("simulate", "Synthetic robustness experiment");
  simulate_cmd->add_option("--n", sim.config.n, "Points")->capture_default_str();
  simulate_cmd->add_option("--m", sim.config.m, "Dimensions")->capture_default_str();
  simulate_cmd->add_option("--nc", sim.config.contaminated_points, "Contaminated points")
      ->capture_default_str();
  simulate_cmd->add_option("--mc", sim.config.contaminated_dims, "Contaminated dimensions")
      ->capture_default_str();
  simulate_cmd->add_option("--reps", sim.replications, "Replications")->capture_default_str();
  simulate_cmd->add_option("--seed", sim.config.seed, "Seed of the first replication")
      ->capture_default_str();
  simulate_cmd->add_option("--noise", sim.config.noise_scale, "Laplace noise scale")
      ->capture_default_str();
  simulate_cmd->add_option("--outlier-scale", outlier_scale, "Outlier magnitude (default 50x noise)");
  simulate_cmd->add_option("--lambda-source", sim.source, "Breakpoints behind lambda min/avg/max")
      ->check(CLI::IsMember({"merged", "union"}))
      ->capture_default_str();
  add_common(*simulate_cmd, common);

  auto* certify_cmd = app.add_subcommand("certify", "Check dual certificates of every subproblem");
  certify_cmd->add_option("input", input, "CSV file, one point per row")->required();
  certify_cmd->add_option("--lambda", lambdas, "Penalty (repeatable)")->required();
  certify_cmd->add_flag("--corrupt-certificate", corrupt)->group("");
  add_common(*certify_cmd, common);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidationError;
  }

  try {
    if (fit->parsed()) return cmd_fit(input, lambda, common, out);
    if (path->parsed()) return cmd_path(input, per_coordinate, common, out);
    if (simulate_cmd->parsed()) {
      sim.config.outlier_scale = outlier_scale;
      detail::require(sim.replications >= 1, "--reps must be at least 1");
      return cmd_simulate(sim, common, out);
    }
    return cmd_certify(input, lambdas, corrupt, common, out);
  } catch (const io::IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const io::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kParseError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int k = 1; k < argc; ++k) args.emplace_back(argv[k]);
  return run_cli(args, out, err);
}

}  // namespace l1line::cli
