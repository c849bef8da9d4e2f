#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "axbnet/errors.hpp"
#include "axbnet/oracle.hpp"
#include "axbnet/problem_io.hpp"
#include "axbnet/sim.hpp"

namespace {

using nlohmann::json;

json matrix_json(const axbnet::Mat& m) {
  json rows = json::array();
  for (axbnet::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (axbnet::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw axbnet::ParseError("cannot write file: " + path);
  out << text;
  if (!out) throw axbnet::ParseError("write failed: " + path);
}

std::uint64_t parse_u64(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("expected an unsigned integer seed");
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(text.c_str(), &end, 10);
  if (errno != 0 || end != text.c_str() + text.size()) {
    throw std::invalid_argument("bad seed value: " + text);
  }
  return static_cast<std::uint64_t>(v);
}

struct SolveFlags {
  std::string problem_file;
  double dt = 0.0;
  double t_end = 100.0;
  double tol = 1e-6;
  double stop_tol = 0.0;
  std::string init = "zero";
  std::string method = "rk4";
  std::string readout = "average";
  std::int64_t stride = 0;
  std::string out_csv;
  std::string report_path;
};

int run_solve(const SolveFlags& f) {
  const axbnet::LoadedProblem lp = axbnet::load_problem(f.problem_file);

  axbnet::SolveOptions opt;
  opt.method = axbnet::method_from_string(f.method);
  opt.dt = f.dt;
  opt.t_end = f.t_end;
  opt.tol = f.tol;
  opt.stop_tol = f.stop_tol;
  if (f.stride < 0) throw std::invalid_argument("--stride must be nonnegative");
  opt.record_stride = static_cast<axbnet::Index>(f.stride);
  if (f.init == "zero") {
    opt.seeded_init = false;
  } else if (f.init.rfind("seeded:", 0) == 0) {
    opt.seeded_init = true;
    opt.seed = parse_u64(f.init.substr(7));
  } else {
    throw std::invalid_argument("--init must be zero or seeded:<seed>");
  }
  if (f.readout == "average") {
    opt.pick_agent.reset();
  } else if (f.readout.rfind("agent:", 0) == 0) {
    opt.pick_agent = static_cast<int>(parse_u64(f.readout.substr(6)));
  } else {
    throw std::invalid_argument("--readout must be average or agent:<index>");
  }

  const axbnet::SolveReport rep = axbnet::solve(lp.problem, lp.graph, opt);

  json doc;
  doc["converged"] = rep.converged;
  doc["residual"] = rep.residual;
  doc["opt_residual"] = rep.opt_residual;
  doc["opt_residual_scaled"] = rep.opt_residual_scaled;
  doc["rate"] = rep.rate ? json(*rep.rate) : json(nullptr);
  doc["rate_r2"] = rep.rate_r2 ? json(*rep.rate_r2) : json(nullptr);
  doc["time_steps"] = rep.time_steps;
  doc["t_final"] = rep.t_final;
  doc["dt"] = rep.dt_used;
  doc["method"] = f.method;
  doc["structure"] = axbnet::to_string(rep.structure);
  doc["solved_as"] = axbnet::to_string(rep.solved_as);
  doc["reduced"] = rep.reduced;
  doc["tol"] = f.tol;
  doc["init"] = f.init;
  doc["readout"] = f.readout;
  doc["stride"] = f.stride;
  doc["problem_file"] = f.problem_file;
  doc["x"] = matrix_json(rep.x);
  try {
    const axbnet::OracleResult oracle = axbnet::solve_centralized(lp.problem);
    doc["oracle_min_residual"] = oracle.min_residual;
  } catch (const axbnet::CapError&) {
    doc["oracle_min_residual"] = nullptr;  // beyond the dense oracle's reach
  }

  if (!f.out_csv.empty()) {
    std::ofstream csv(f.out_csv, std::ios::binary);
    if (!csv) throw axbnet::ParseError("cannot write file: " + f.out_csv);
    axbnet::write_trajectory_csv(csv, rep.traj,
                                 rep.lyapunov.empty() ? nullptr : &rep.lyapunov);
  }
  const std::string text = doc.dump(2) + "\n";
  if (!f.report_path.empty()) write_text_file(f.report_path, text);
  std::cout << text;
  return rep.converged ? 0 : 1;
}

int run_oracle(const std::string& problem_file, const std::string& report_path) {
  const axbnet::LoadedProblem lp = axbnet::load_problem(problem_file);
  const axbnet::OracleResult res = axbnet::solve_centralized(lp.problem);
  json doc;
  doc["solvability"] = axbnet::to_string(axbnet::solvability(lp.problem));
  doc["min_residual"] = res.min_residual;
  doc["grad_norm"] = res.grad_norm;
  doc["x_star"] = matrix_json(res.x_star);
  const std::string text = doc.dump(2) + "\n";
  if (!report_path.empty()) write_text_file(report_path, text);
  std::cout << text;
  return 0;
}

int run_spectrum(const std::string& problem_file) {
  const axbnet::LoadedProblem lp = axbnet::load_problem(problem_file);
  const axbnet::ProblemInstance pc =
      axbnet::is_canonical(lp.problem.structure) ? lp.problem : axbnet::to_canonical(lp.problem);
  const axbnet::System sys(pc, lp.graph);
  const axbnet::LinearSystem ls = axbnet::assemble_linear_system(sys);
  const axbnet::SemistabilityReport rep = axbnet::check_semistable(ls.m);
  json doc;
  doc["semistable"] = rep.semistable;
  doc["spectral_abscissa"] = rep.spectral_abscissa;
  doc["nonzero_abscissa"] = rep.nonzero_abscissa;
  doc["predicted_rate"] = rep.predicted_rate;
  doc["rank_m"] = rep.rank_m;
  doc["rank_m_sq"] = rep.rank_m_sq;
  doc["zero_tol"] = rep.zero_tol;
  doc["state_dim"] = sys.state_dim();
  doc["solved_as"] = axbnet::to_string(pc.structure);
  std::cout << doc.dump(2) << "\n";
  return 0;
}

int run_verify(const std::string& problem_file, const std::string& x_file, double tol) {
  const axbnet::LoadedProblem lp = axbnet::load_problem(problem_file);
  const axbnet::Mat x = axbnet::load_matrix(x_file);
  const double raw = axbnet::optimality_residual(lp.problem, x);
  const double scale = axbnet::optimality_scale(lp.problem, x);
  const double scaled = raw / scale;
  const bool pass = scaled <= tol;
  json doc;
  doc["pass"] = pass;
  doc["opt_residual"] = raw;
  doc["opt_residual_scaled"] = scaled;
  doc["scale"] = scale;
  doc["residual"] = axbnet::frob_norm(lp.problem.A * x * lp.problem.B - lp.problem.F);
  doc["tol"] = tol;
  std::cout << doc.dump(2) << "\n";
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"distributed least-squares solver for A X B = F over an agent network"};
  app.require_subcommand(1);

  SolveFlags sf;
  CLI::App* solve = app.add_subcommand("solve", "integrate a distributed algorithm to a solution");
  solve->add_option("problem", sf.problem_file, "problem JSON file")->required();
  solve->add_option("--dt", sf.dt, "step size (default: picked from the spectrum)");
  solve->add_option("--t-end", sf.t_end, "integration horizon");
  solve->add_option("--tol", sf.tol, "scaled optimality tolerance for the convergence verdict");
  solve->add_option("--stop-tol", sf.stop_tol, "field-norm early-stop threshold (0 = off)");
  solve->add_option("--init", sf.init, "initial state: zero or seeded:<seed>");
  solve->add_option("--method", sf.method, "integrator: rk4 or euler");
  solve->add_option("--readout", sf.readout, "solution readout: average or agent:<index>");
  solve->add_option("--stride", sf.stride, "record every N steps (0 = auto)");
  solve->add_option("--out", sf.out_csv, "trajectory CSV path");
  solve->add_option("--report", sf.report_path, "report JSON path");

  std::string oracle_file, oracle_report;
  CLI::App* oracle = app.add_subcommand("oracle", "centralized least-squares reference");
  oracle->add_option("problem", oracle_file, "problem JSON file")->required();
  oracle->add_option("--report", oracle_report, "report JSON path");

  std::string spectrum_file;
  CLI::App* spectrum =
      app.add_subcommand("spectrum", "assemble the flow matrix and test semistability");
  spectrum->add_option("problem", spectrum_file, "problem JSON file")->required();

  std::string verify_problem, verify_x;
  double verify_tol = 1e-6;
  CLI::App* verify = app.add_subcommand("verify", "first-order optimality check of a given X");
  verify->add_option("problem", verify_problem, "problem JSON file")->required();
  verify->add_option("x", verify_x, "matrix JSON file (bare rows or a solve report)")->required();
  verify->add_option("--tol", verify_tol, "scaled optimality tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (solve->parsed()) return run_solve(sf);
    if (oracle->parsed()) return run_oracle(oracle_file, oracle_report);
    if (spectrum->parsed()) return run_spectrum(spectrum_file);
    if (verify->parsed()) return run_verify(verify_problem, verify_x, verify_tol);
  } catch (const axbnet::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const axbnet::DisconnectedError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const axbnet::DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const axbnet::CapError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
