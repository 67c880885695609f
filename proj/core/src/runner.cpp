#include "cvxreg/runner.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>

#include "cvxreg/alcc.hpp"
#include "cvxreg/papg.hpp"
#include "cvxreg/preprocess.hpp"

namespace cvxreg {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string environment_string() {
  std::ostringstream os;
  os << "compiler=" <<
#if defined(__clang__)
      "clang " << __clang_major__ << "." << __clang_minor__
#elif defined(__GNUC__)
      "gcc " << __GNUC__ << "." << __GNUC_MINOR__
#else
      "unknown"
#endif
     << "; eigen=" << EIGEN_WORLD_VERSION << "." << EIGEN_MAJOR_VERSION << "."
     << EIGEN_MINOR_VERSION
     << "; hw_threads=" << std::thread::hardware_concurrency()
     << "; rng=xoshiro256++ (per-array streams, Box-Muller cosine branch)";
  return os.str();
}

json snapshot_to_json(const MetricsSnapshot& s) {
  return json{{"iter", s.iter},
              {"objective", s.objective},
              {"reg_objective", s.reg_objective},
              {"infeas_raw", s.infeas_raw},
              {"infeas_norm", s.infeas_norm},
              {"gap_raw", s.gap_raw},
              {"gap_norm", s.gap_norm},
              {"wall_time_s", s.wall_time_s}};
}

MetricsSnapshot snapshot_from_json(const json& j) {
  MetricsSnapshot s;
  s.iter = j.at("iter").get<Index>();
  s.objective = j.at("objective").get<double>();
  s.reg_objective = j.at("reg_objective").get<double>();
  s.infeas_raw = j.at("infeas_raw").get<double>();
  s.infeas_norm = j.at("infeas_norm").get<double>();
  s.gap_raw = j.at("gap_raw").get<double>();
  s.gap_norm = j.at("gap_norm").get<double>();
  s.wall_time_s = j.at("wall_time_s").get<double>();
  return s;
}

json config_to_json_obj(const RunConfig& cfg) {
  json j{{"input", cfg.input_csv},
         {"gamma", cfg.gamma},
         {"K", cfg.K},
         {"solver", cfg.solver},
         {"gap_tol", cfg.gap_tol},
         {"infeas_tol", cfg.infeas_tol},
         {"max_iters", cfg.max_iters},
         {"max_seconds", cfg.max_seconds},
         {"workers", cfg.workers},
         {"seed", cfg.seed},
         {"continuation", cfg.continuation},
         {"repair", cfg.repair},
         {"out", cfg.out_json},
         {"history_out", cfg.out_history_csv}};
  if (cfg.generate) {
    j["generate"] = json{{"kind", to_string(cfg.generate->kind)},
                         {"n", cfg.generate->n},
                         {"N", cfg.generate->N},
                         {"noise", cfg.generate->noise},
                         {"seed", cfg.generate->seed}};
  }
  return j;
}

RunConfig config_from_json_obj(const json& j) {
  RunConfig cfg;
  cfg.input_csv = j.value("input", std::string());
  if (j.contains("generate") && !j.at("generate").is_null()) {
    const json& g = j.at("generate");
    GeneratorSpec spec;
    spec.kind = kind_from_string(g.at("kind").get<std::string>());
    spec.n = g.at("n").get<Index>();
    spec.N = g.at("N").get<Index>();
    spec.noise = g.value("noise", 1.0);
    spec.seed = g.value("seed", std::uint64_t{0});  // 0: inherit the run seed
    cfg.generate = spec;
  }
  cfg.gamma = j.value("gamma", 1e-3);
  cfg.K = j.value("K", Index{2});
  cfg.solver = j.value("solver", std::string("papg-alcc"));
  cfg.gap_tol = j.value("gap_tol", 1e-6);
  cfg.infeas_tol = j.value("infeas_tol", 1e-1);
  cfg.max_iters = j.value("max_iters", Index{100000});
  cfg.max_seconds = j.value("max_seconds", 7200.0);
  cfg.workers = j.value("workers", 0);
  cfg.seed = j.value("seed", std::uint64_t{1});
  cfg.continuation = j.value("continuation", false);
  cfg.repair = j.value("repair", false);
  cfg.out_json = j.value("out", std::string());
  cfg.out_history_csv = j.value("history_out", std::string());
  return cfg;
}

json vector_to_json(const VectorXd& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

VectorXd vector_from_json(const json& arr) {
  VectorXd v(static_cast<Index>(arr.size()));
  Index i = 0;
  for (const auto& x : arr) v(i++) = x.get<double>();
  return v;
}

}  // namespace

std::string config_to_json(const RunConfig& cfg) {
  return config_to_json_obj(cfg).dump(2);
}

RunConfig config_from_json(const std::string& text) {
  return config_from_json_obj(json::parse(text));
}

std::string report_to_json(const RunReport& report) {
  json j;
  j["config"] = config_to_json_obj(report.config);
  json hist = json::array();
  for (const auto& s : report.history) hist.push_back(snapshot_to_json(s));
  j["history"] = hist;
  j["final"] = json{{"objective", report.final.objective},
                    {"reg_objective", report.final.reg_objective},
                    {"gap_raw", report.final.gap_raw},
                    {"gap_norm", report.final.gap_norm},
                    {"infeas_raw", report.final.infeas_raw},
                    {"infeas_norm", report.final.infeas_norm},
                    {"cpu_min", report.final.cpu_min},
                    {"wall_min", report.final.wall_min},
                    {"reason", report.final.reason}};
  j["certificates"] = json{{"delta_estimate", report.certificates.delta_estimate},
                           {"subopt_bound", report.certificates.subopt_bound},
                           {"infeas_bound", report.certificates.infeas_bound},
                           {"sigma_C", report.certificates.sigma_C},
                           {"B_xi_estimate", report.certificates.B_xi_estimate},
                           {"estimated", report.certificates.estimated}};
  j["solution"] = json{{"y", vector_to_json(report.solution.y)},
                       {"xi", vector_to_json(report.solution.xi)},
                       {"shift", report.shift}};
  j["environment"] = report.environment;
  j["exit_code"] = report.exit_code;
  return j.dump(2);
}

RunReport report_from_json(const std::string& text) {
  const json j = json::parse(text);
  RunReport report;
  report.config = config_from_json_obj(j.at("config"));
  for (const auto& s : j.at("history")) {
    report.history.push_back(snapshot_from_json(s));
  }
  const json& f = j.at("final");
  report.final.objective = f.at("objective").get<double>();
  report.final.reg_objective = f.at("reg_objective").get<double>();
  report.final.gap_raw = f.at("gap_raw").get<double>();
  report.final.gap_norm = f.at("gap_norm").get<double>();
  report.final.infeas_raw = f.at("infeas_raw").get<double>();
  report.final.infeas_norm = f.at("infeas_norm").get<double>();
  report.final.cpu_min = f.at("cpu_min").get<double>();
  report.final.wall_min = f.at("wall_min").get<double>();
  report.final.reason = f.at("reason").get<std::string>();
  const json& c = j.at("certificates");
  report.certificates.delta_estimate = c.at("delta_estimate").get<double>();
  report.certificates.subopt_bound = c.at("subopt_bound").get<double>();
  report.certificates.infeas_bound = c.at("infeas_bound").get<double>();
  report.certificates.sigma_C = c.at("sigma_C").get<double>();
  report.certificates.B_xi_estimate = c.at("B_xi_estimate").get<double>();
  report.certificates.estimated = c.at("estimated").get<bool>();
  const json& s = j.at("solution");
  report.solution.y = vector_from_json(s.at("y"));
  report.solution.xi = vector_from_json(s.at("xi"));
  report.shift = s.at("shift").get<double>();
  report.environment = j.at("environment").get<std::string>();
  report.exit_code = j.at("exit_code").get<int>();
  return report;
}

std::string history_to_csv(const std::vector<MetricsSnapshot>& history) {
  std::ostringstream os;
  os << "iter,objective,reg_objective,infeas_raw,infeas_norm,gap_raw,gap_norm,"
        "wall_time_s\n";
  for (const auto& s : history) {
    os << s.iter << "," << format_double(s.objective) << ","
       << format_double(s.reg_objective) << "," << format_double(s.infeas_raw)
       << "," << format_double(s.infeas_norm) << ","
       << format_double(s.gap_raw) << "," << format_double(s.gap_norm) << ","
       << format_double(s.wall_time_s) << "\n";
  }
  return os.str();
}

namespace {

double cpu_seconds_now() {
  return static_cast<double>(std::clock()) / CLOCKS_PER_SEC;
}

}  // namespace

RunReport run(const RunConfig& cfg) {
  if (cfg.solver != "papg-alcc" && cfg.solver != "alcc" && cfg.solver != "dga")
    throw std::invalid_argument("unknown solver: " + cfg.solver);
  if (cfg.gamma <= 0) throw std::invalid_argument("gamma must be > 0");
  if (cfg.max_iters <= 0 || cfg.max_seconds <= 0)
    throw std::invalid_argument("budgets must be positive");

  Dataset data;
  if (!cfg.input_csv.empty()) {
    data = load_csv(cfg.input_csv);
  } else if (cfg.generate) {
    GeneratorSpec spec = *cfg.generate;
    if (spec.seed == 0) spec.seed = cfg.seed;
    data = gen_instance(spec);
  } else {
    throw std::invalid_argument("no input: set a CSV path or a generator");
  }
  const Partition part = make_partition(data, cfg.K);

  RunReport report;
  report.config = cfg;
  report.environment = environment_string();

  const auto wall_start = std::chrono::steady_clock::now();
  const double cpu_start = cpu_seconds_now();

  // gamma stages: one solve, or a continuation pass at gamma/10
  std::vector<double> gammas{cfg.gamma};
  if (cfg.continuation) gammas.push_back(cfg.gamma / 10.0);

  TermReason reason = TermReason::error;
  PrimalPoint solution;
  double shift = 0;
  double sigma_C = 0;
  double delta_estimate = 0;
  double B_xi_estimate = 0;
  double gap_raw = 0;

  PreparedProblem prep;
  std::optional<VectorXd> theta_warm;
  std::optional<PrimalPoint> primal_warm;

  for (double gamma : gammas) {
    prep = prepare_problem(data, gamma);
    ProblemOps ops(prep.data, part);
    B_xi_estimate = prep.bounds.Bbar_xi;

    if (cfg.solver == "alcc") {
      AlccConfig acfg;
      acfg.max_outer = cfg.max_iters;
      acfg.max_seconds = cfg.max_seconds;
      acfg.infeas_norm_tol = cfg.infeas_tol;
      acfg.gap_norm_tol = cfg.gap_tol;
      const PrimalPoint& warm = primal_warm ? *primal_warm : prep.feasible;
      AlccResult res = alcc_solve(ops, prep.data.ys, gamma, prep.bounds, acfg,
                                  warm);
      report.history = res.report.history;
      reason = res.report.reason;
      solution = res.point;
      shift = prep.shift;
      delta_estimate = std::max(res.certified_gap, 0.0);
      sigma_C = estimate_sigma_max(op_C(ops)).sigma;
      VectorXd r;
      ops.apply_rows(solution.y, solution.xi, r);
      gap_raw = res.multiplier.dot(r);
      primal_warm = res.point;
    } else {
      PapgConfig pcfg;
      pcfg.gamma = gamma;
      pcfg.gap_norm_tol = cfg.gap_tol;
      pcfg.infeas_norm_tol = cfg.infeas_tol;
      pcfg.max_iters = cfg.max_iters;
      pcfg.max_seconds = cfg.max_seconds;
      pcfg.workers = cfg.workers;
      const VectorXd* theta0 = theta_warm ? &*theta_warm : nullptr;
      PapgResult res = cfg.solver == "papg-alcc"
                           ? papg_solve(ops, prep, pcfg, theta0)
                           : dual_gradient_ascent(ops, prep, pcfg, theta0);
      report.history = res.report.history;
      reason = res.report.reason;
      solution = res.point;
      shift = prep.shift;
      delta_estimate = res.delta_estimate;
      sigma_C = res.sigma_C;
      VectorXd theta(res.dual.theta_cross.size() + res.dual.theta_pos.size());
      theta << res.dual.theta_cross, res.dual.theta_pos;
      gap_raw = theta.dot([&] {
        VectorXd c_eta;
        ops.apply_C(solution.y, solution.xi, c_eta);
        return c_eta;
      }());
      theta_warm = theta;
    }
  }

  // final metrics against the original observations
  {
    ProblemOps ops(data, part);
    solution.y.array() -= shift;
    report.solution = solution;
    report.shift = shift;
    const auto [infeas_raw, infeas_norm] = infeasibility(ops, solution);
    const double rows = static_cast<double>(ops.indexing().rows_total());
    report.final.objective = 0.5 * (solution.y - data.ys).squaredNorm();
    report.final.reg_objective =
        report.final.objective +
        0.5 * gammas.back() * solution.xi.squaredNorm();
    report.final.infeas_raw = infeas_raw;
    report.final.infeas_norm = infeas_norm;
    report.final.gap_raw = gap_raw;
    report.final.gap_norm = gap_raw / rows;
    report.final.reason = to_string(reason);
  }
  report.final.wall_min =
      std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                    wall_start)
          .count() /
      60.0;
  report.final.cpu_min = (cpu_seconds_now() - cpu_start) / 60.0;

  report.certificates.delta_estimate = delta_estimate;
  report.certificates.sigma_C = sigma_C;
  report.certificates.B_xi_estimate = B_xi_estimate;
  const auto [subopt, infeas_bound] = certificate_for_iterate(
      gammas.back(), delta_estimate, B_xi_estimate, sigma_C);
  report.certificates.subopt_bound = subopt;
  report.certificates.infeas_bound = infeas_bound;

  switch (reason) {
    case TermReason::thresholds: report.exit_code = 0; break;
    case TermReason::error: report.exit_code = 1; break;
    default: report.exit_code = 2; break;
  }

  if (!cfg.out_json.empty()) {
    std::ofstream out(cfg.out_json);
    if (!out) throw std::runtime_error("cannot write report: " + cfg.out_json);
    out << report_to_json(report) << "\n";
  }
  if (!cfg.out_history_csv.empty()) {
    std::ofstream out(cfg.out_history_csv);
    if (!out)
      throw std::runtime_error("cannot write history: " + cfg.out_history_csv);
    out << history_to_csv(report.history);
  }
  return report;
}

std::vector<RunConfig> batch_from_json(const std::string& text) {
  const json j = json::parse(text);
  if (!j.is_array()) throw std::invalid_argument("batch file must be a JSON array");
  std::vector<RunConfig> batch;
  for (const auto& item : j) batch.push_back(config_from_json_obj(item));
  return batch;
}

std::string bench(const std::vector<RunConfig>& batch) {
  std::ostringstream os;
  os << "N,solver,seed,cpu_min,wall_min,objective,gap_norm,infeas_norm,reason\n";
  for (const auto& cfg : batch) {
    Index N = 0;
    if (cfg.generate) N = cfg.generate->N;
    try {
      RunReport report = run(cfg);
      N = report.solution.y.size();
      const bool ok = report.exit_code == 0;
      // budget rows mirror the table convention: N/A in the value columns
      os << N << "," << cfg.solver << "," << cfg.seed << ",";
      if (ok) {
        os << format_double(report.final.cpu_min) << ","
           << format_double(report.final.wall_min) << ","
           << format_double(report.final.objective) << ","
           << format_double(report.final.gap_norm) << ","
           << format_double(report.final.infeas_norm);
      } else {
        os << "N/A,N/A,N/A,N/A,N/A";
      }
      os << "," << report.final.reason << "\n";
    } catch (const std::exception& err) {
      os << N << "," << cfg.solver << "," << cfg.seed
         << ",N/A,N/A,N/A,N/A,N/A,error: " << err.what() << "\n";
    }
  }
  return os.str();
}

}  // namespace cvxreg
