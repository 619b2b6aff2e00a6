// dspecies: species-number estimation, sampling-formula probabilities,
// stopping rules and goodness of fit for Dirichlet partitions.

#include "dspecies/dataio.hpp"
#include "dspecies/distributions.hpp"
#include "dspecies/errors.hpp"
#include "dspecies/estimators.hpp"
#include "dspecies/gof.hpp"
#include "dspecies/report.hpp"
#include "dspecies/sampling.hpp"
#include "dspecies/simulate.hpp"
#include "dspecies/stopping.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace dspecies;

namespace {

enum Exit : int { kOk = 0, kValidation = 2, kDivergence = 3, kIo = 4 };

struct DataSource {
  std::string bundled;
  std::string input;
  std::string format = "pairs";
  bool allow_zero_class = false;

  bool given() const { return !bundled.empty() || !input.empty(); }
  Dataset load() const {
    if (!bundled.empty() && !input.empty()) throw ValidationError("give --bundled or --input, not both");
    if (!bundled.empty()) return bundled_dataset(bundled);
    ParseOptions opts;
    opts.format = format == "csv" ? SpectrumFormat::csv : SpectrumFormat::pairs;
    opts.allow_zero_class = allow_zero_class;
    return parse_spectrum_file(input, opts);
  }
};

void add_data_options(CLI::App* cmd, DataSource& src) {
  cmd->add_option("--bundled", src.bundled,
                  "Bundled dataset: madison, hamilton, janzen-1967-day, janzen-1967-night, janzen-1968-day");
  cmd->add_option("--input", src.input, "Spectrum file with one 'i A(i)' pair per line");
  cmd->add_option("--format", src.format, "Input format")->check(CLI::IsMember({"pairs", "csv"}));
  cmd->add_flag("--allow-zero-class", src.allow_zero_class, "Accept an i = 0 row (kept as metadata)");
}

struct ModelArgs {
  std::string model = "dirichlet";
  std::optional<Index> n;
  std::optional<double> theta;
  std::optional<double> gamma;
};

void add_model_options(CLI::App* cmd, ModelArgs& m, bool with_n) {
  cmd->add_option("--model", m.model, "Model: dirichlet, be, mb or kingman")
      ->check(CLI::IsMember({"dirichlet", "be", "mb", "kingman"}));
  if (with_n) cmd->add_option("--n", m.n, "Number of species n");
  cmd->add_option("--theta", m.theta, "Dirichlet parameter theta");
  if (with_n) cmd->add_option("--gamma", m.gamma, "Kingman parameter gamma = n theta");
}

Model make_model(const ModelArgs& a) {
  if (a.model == "kingman") {
    if (!a.gamma) throw ValidationError("--model kingman needs --gamma");
    return KingmanModel{*a.gamma};
  }
  if (!a.n) throw ValidationError("--model " + a.model + " needs --n");
  if (a.model == "be") return BoseEinsteinModel{*a.n};
  if (a.model == "mb") return MaxwellBoltzmannModel{*a.n};
  if (!a.theta) throw ValidationError("--model dirichlet needs --theta");
  return DirichletModel{*a.n, *a.theta};
}

ConditionalModel make_shape(const ModelArgs& a) {
  if (a.model == "kingman") return KingmanShape{};
  if (a.model == "mb") return MaxwellBoltzmannShape{};
  if (a.model == "be") return ThetaShape{1.0};
  if (!a.theta) throw ValidationError("--model dirichlet needs --theta");
  return ThetaShape{*a.theta};
}

Json model_inputs(const ModelArgs& a) {
  Json j;
  j["model"] = a.model;
  j["n"] = a.n ? Json(*a.n) : Json(nullptr);
  j["theta"] = a.theta ? Json(*a.theta) : Json(nullptr);
  j["gamma"] = a.gamma ? Json(*a.gamma) : Json(nullptr);
  return j;
}

// ---- estimate

struct EstimateArgs {
  DataSource data;
  std::optional<Index> k;
  std::optional<Index> p;
  std::optional<double> theta;
  std::string stat = "both";
  std::string n_estimator = "mle";
  std::string scheme = "one_step";
  std::string out;
};

int run_estimate(const EstimateArgs& a) {
  Json inputs;
  std::optional<FrequencySpectrum> spectrum;
  Index k = 0;
  Index p = 0;
  if (a.data.given()) {
    if (a.k || a.p) throw ValidationError("--k/--p cannot be combined with a dataset");
    const Dataset ds = a.data.load();
    inputs["dataset"] = dataset_summary(ds);
    spectrum = ds.spectrum;
    k = ds.spectrum.k();
    p = ds.spectrum.p();
  } else {
    if (!a.k || !a.p) throw ValidationError("give a dataset (--bundled/--input) or both --k and --p");
    k = *a.k;
    p = *a.p;
    inputs["k"] = k;
    inputs["p"] = p;
  }
  inputs["theta"] = a.theta ? Json(*a.theta) : Json(nullptr);
  inputs["stat"] = a.stat;
  inputs["n_estimator"] = a.n_estimator;
  inputs["scheme"] = a.scheme;

  std::vector<EstimateReport> reports;
  if (a.theta) {
    reports.push_back(mle_n(*a.theta, k, p));
    reports.push_back(umvb_n(*a.theta, k, p));
  }
  reports.push_back(kingman_gamma(k, p));
  Json extra = Json::object();
  if (spectrum) {
    const NEstimator est = a.n_estimator == "umvb" ? NEstimator::umvb : NEstimator::mle;
    const JointScheme scheme = a.scheme == "fixed_point" ? JointScheme::fixed_point : JointScheme::one_step;
    std::optional<double> n_d;
    std::optional<double> n_psi;
    if (a.stat == "D" || a.stat == "both") {
      const double d = pair_match_D(*spectrum);
      if (d > 0.0 && d < 1.0) {
        reports.push_back(joint_estimate(JointStatistic::D, k, p, d, est, scheme));
        n_d = reports.back().n_real;
      } else {
        extra["D_note"] = "D = " + std::to_string(d) + " is outside (0, 1); no joint estimate";
      }
    }
    if (a.stat == "psi" || a.stat == "both") {
      const double psi = psi_simpson(*spectrum);
      if (psi > 0.0 && psi < 1.0) {
        reports.push_back(joint_estimate(JointStatistic::psi, k, p, psi, est, scheme));
        n_psi = reports.back().n_real;
      } else {
        extra["psi_note"] = "psi = " + std::to_string(psi) + " is outside (0, 1); no joint estimate";
      }
    }
    if (n_d && n_psi) extra["n_estimates_coincide"] = *n_d == *n_psi;
  }
  Json results = Json::array();
  bool diverged = false;
  for (const auto& r : reports) {
    results.push_back(to_json(r));
    diverged = diverged || r.diverged();
  }
  Json env = make_envelope("estimate", std::move(inputs), std::move(results));
  if (!extra.empty()) env["notes"] = std::move(extra);
  write_report(env, a.out);
  return diverged ? kDivergence : kOk;
}

// ---- simulate

struct SimulateArgs {
  Index n = 100;
  double theta = 1.0;
  std::vector<Index> k_values;
  Index reps = kDefaultReps;
  std::uint64_t seed = 0;
  bool include_umvb = false;
  std::string scheme = "one_step";
  std::string out;
};

int run_simulate(const SimulateArgs& a) {
  SimulationConfig cfg;
  cfg.n = a.n;
  cfg.theta = a.theta;
  cfg.k_values = a.k_values;
  cfg.reps = a.reps;
  cfg.seed = a.seed;
  cfg.include_umvb = a.include_umvb;
  cfg.scheme = a.scheme == "fixed_point" ? JointScheme::fixed_point : JointScheme::one_step;
  const SimulationReport rep = simulate(cfg);
  Json inputs;
  inputs["n"] = a.n;
  inputs["theta"] = a.theta;
  write_report(make_envelope("simulate", std::move(inputs), to_json(rep), a.seed), a.out);
  return kOk;
}

// ---- dist

struct DistArgs {
  ModelArgs model;
  Index k = 0;
  std::optional<Index> p;
  std::string method = "auto";
  std::string out;
};

int run_dist(const DistArgs& a) {
  const Model model = make_model(a.model);
  validate(model);
  Json inputs = model_inputs(a.model);
  inputs["k"] = a.k;
  inputs["p"] = a.p ? Json(*a.p) : Json(nullptr);
  inputs["method"] = a.method;
  Json results;
  if (a.p) {
    static const std::map<std::string, PMethod> methods{{"auto", PMethod::automatic},
                                                        {"bell", PMethod::bell},
                                                        {"alternating", PMethod::alternating},
                                                        {"special", PMethod::special}};
    const LogReal lp = p_logpmf(model, a.k, *a.p, methods.at(a.method));
    results["p"] = *a.p;
    results["probability"] = lp.value();
    results["log_probability"] = lp.is_zero() ? Json("-inf") : Json(lp.log());
  } else {
    const Eigen::VectorXd pmf = p_pmf(model, a.k);
    results["pmf"] = std::vector<double>(pmf.data(), pmf.data() + pmf.size());
  }
  write_report(make_envelope("dist", std::move(inputs), std::move(results)), a.out);
  return kOk;
}

// ---- gof

struct GofArgs {
  DataSource data;
  ModelArgs model;
  std::string variant = "derived";
  std::string out;
};

int run_gof(const GofArgs& a) {
  if (!a.data.given()) throw ValidationError("gof needs --bundled or --input");
  const Dataset ds = a.data.load();
  const GofReport rep = goodness_of_fit(make_shape(a.model), ds.spectrum, alpha_variant_from_string(a.variant));
  Json inputs = model_inputs(a.model);
  inputs["dataset"] = dataset_summary(ds);
  inputs["alpha_variant"] = a.variant;
  write_report(make_envelope("gof", std::move(inputs), to_json(rep)), a.out);
  return rep.alpha_mle.empty() ? kDivergence : kOk;
}

// ---- stop

struct StopArgs {
  std::string rule = "coupon";
  ModelArgs model;
  std::vector<Index> k_values;
  std::string method = "closed";
  std::optional<std::uint64_t> seed;
  Index reps = kSmallestFragmentReps;
  double epsilon = 0.01;
  std::string trajectory;
  std::optional<double> sim_theta;
  std::string out;
};

Trajectory read_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  Trajectory t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    for (char& c : line)
      if (c == ',') c = ' ';
    std::istringstream fields(line);
    Index k = 0;
    Index p = 0;
    std::string rest;
    if (!(fields >> k)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw ParseError("expected 'k P'", line_no);
    }
    if (!(fields >> p) || (fields >> rest)) throw ParseError("expected 'k P'", line_no);
    t.emplace_back(k, p);
  }
  return t;
}

int run_stop(const StopArgs& a) {
  StoppingReport rep;
  rep.rule = a.rule;
  Json inputs = model_inputs(a.model);
  inputs["rule"] = a.rule;
  if (a.rule == "coupon") {
    const Model model = make_model(a.model);
    rep.model = describe(model);
    rep.method = "closed_form";
    if (a.k_values.empty()) throw ValidationError("--rule coupon needs --k");
    for (Index k : a.k_values) {
      rep.k_values.push_back(k);
      rep.probabilities.push_back(coupon_cdf(model, k));
    }
  } else if (a.rule == "smallest-fragment") {
    if (!a.model.n) throw ValidationError("--rule smallest-fragment needs --n");
    double theta = 1.0;
    if (a.model.model == "dirichlet") {
      if (!a.model.theta) throw ValidationError("--model dirichlet needs --theta");
      theta = *a.model.theta;
    } else if (a.model.model != "be") {
      throw ValidationError("--rule smallest-fragment needs --model be or dirichlet");
    }
    const StopMethod method = a.method == "mc" ? StopMethod::monte_carlo : StopMethod::closed_form;
    if (method == StopMethod::monte_carlo && !a.seed) throw ValidationError("--method mc needs --seed");
    if (a.k_values.empty()) throw ValidationError("--rule smallest-fragment needs --k");
    rep.model = "dirichlet(n=" + std::to_string(*a.model.n) + ")";
    rep.method = to_string(method);
    if (method == StopMethod::monte_carlo) {
      rep.seed = a.seed;
      rep.replications = a.reps;
    }
    for (Index k : a.k_values) {
      const TailEstimate t = smallest_fragment_tail(*a.model.n, theta, k, method, a.seed.value_or(0), a.reps);
      rep.k_values.push_back(k);
      rep.probabilities.push_back(t.probability);
      rep.std_errors.push_back(t.std_error);
    }
  } else {
    const ConditionalModel shape = make_shape(a.model);
    Trajectory traj;
    if (!a.trajectory.empty()) {
      traj = read_trajectory(a.trajectory);
    } else {
      if (!a.seed) throw ValidationError("a simulated trajectory needs --seed (or give --trajectory)");
      if (!a.model.n || a.k_values.size() != 1)
        throw ValidationError("a simulated trajectory needs --n and a single --k");
      double theta = 1.0;
      if (a.sim_theta)
        theta = *a.sim_theta;
      else if (const auto* t = std::get_if<ThetaShape>(&shape))
        theta = t->theta;
      else
        throw ValidationError("--model mb/kingman with a simulated trajectory needs --sim-theta");
      traj = trajectory_from_labels(polya_sequence(*a.model.n, theta, a.k_values.front(), *a.seed));
      rep.seed = a.seed;
      inputs["sim_theta"] = theta;
    }
    rep.method = "closed_form";
    rep.model = std::holds_alternative<KingmanShape>(shape) ? "kingman" : a.model.model;
    rep.epsilon = epsilon_stop(shape, a.epsilon, traj);
    inputs["epsilon"] = a.epsilon;
  }
  write_report(make_envelope("stop", std::move(inputs), to_json(rep), rep.seed), a.out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Species-number estimation and sampling formulae for Dirichlet partitions"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("dspecies 1.0"));

  EstimateArgs est;
  auto* c_est = app.add_subcommand("estimate", "Estimate n, theta and gamma from a spectrum or (k, P)");
  add_data_options(c_est, est.data);
  c_est->add_option("--k", est.k, "Sample size (without a dataset)");
  c_est->add_option("--p", est.p, "Number of distinct species seen (without a dataset)");
  c_est->add_option("--theta", est.theta, "Known theta; enables the MLE and UMVB estimates of n");
  c_est->add_option("--stat", est.stat, "Statistic for joint (theta, n) estimation")
      ->check(CLI::IsMember({"D", "psi", "both"}));
  c_est->add_option("--n-estimator", est.n_estimator, "n-equation for joint estimation")
      ->check(CLI::IsMember({"mle", "umvb"}));
  c_est->add_option("--scheme", est.scheme, "Joint scheme: one_step (n at theta = 1, then theta) or fixed_point")
      ->check(CLI::IsMember({"one_step", "fixed_point"}));
  c_est->add_option("--out", est.out, "Report path (default stdout)");

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Estimator means and standard deviations over simulated samples");
  c_sim->add_option("--n", sim.n, "Number of species")->required();
  c_sim->add_option("--theta", sim.theta, "Dirichlet parameter")->required();
  c_sim->add_option("--k", sim.k_values, "Sample sizes (default 2n/3, n, 3n/2)");
  c_sim->add_option("--reps", sim.reps, "Samples per partition")->capture_default_str();
  c_sim->add_option("--seed", sim.seed, "Random seed")->required();
  c_sim->add_flag("--include-umvb", sim.include_umvb, "Also compute the UMVB estimate of n");
  c_sim->add_option("--scheme", sim.scheme, "Joint scheme")->check(CLI::IsMember({"one_step", "fixed_point"}));
  c_sim->add_option("--out", sim.out, "Report path (default stdout)");

  DistArgs dist;
  auto* c_dist = app.add_subcommand("dist", "Law of the number of distinct species P");
  add_model_options(c_dist, dist.model, true);
  c_dist->add_option("--k", dist.k, "Sample size")->required();
  c_dist->add_option("--p", dist.p, "Value of P (omit for the whole pmf)");
  c_dist->add_option("--method", dist.method, "Computation route")
      ->check(CLI::IsMember({"auto", "bell", "alternating", "special"}));
  c_dist->add_option("--out", dist.out, "Report path (default stdout)");

  GofArgs gof;
  auto* c_gof = app.add_subcommand("gof", "Goodness of fit of a model to a spectrum");
  add_data_options(c_gof, gof.data);
  add_model_options(c_gof, gof.model, false);
  c_gof->add_option("--alpha-variant", gof.variant, "Expected-count formulas: paper or derived")
      ->check(CLI::IsMember({"paper", "derived"}));
  c_gof->add_option("--out", gof.out, "Report path (default stdout)");

  StopArgs stop;
  auto* c_stop = app.add_subcommand("stop", "Stopping rules");
  c_stop->add_option("--rule", stop.rule, "smallest-fragment, coupon or epsilon")
      ->check(CLI::IsMember({"smallest-fragment", "coupon", "epsilon"}));
  add_model_options(c_stop, stop.model, true);
  c_stop->add_option("--k", stop.k_values, "Sample sizes (epsilon: length of the simulated trajectory)");
  c_stop->add_option("--method", stop.method, "closed or mc (smallest-fragment)")
      ->check(CLI::IsMember({"closed", "mc"}));
  c_stop->add_option("--seed", stop.seed, "Random seed (Monte Carlo and simulated trajectories)");
  c_stop->add_option("--reps", stop.reps, "Monte Carlo partitions")->capture_default_str();
  c_stop->add_option("--epsilon", stop.epsilon, "Threshold for the epsilon rule")->capture_default_str();
  c_stop->add_option("--trajectory", stop.trajectory, "File of 'k P' lines for the epsilon rule");
  c_stop->add_option("--sim-theta", stop.sim_theta, "theta used to simulate the trajectory");
  c_stop->add_option("--out", stop.out, "Report path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*c_est) return run_estimate(est);
    if (*c_sim) return run_simulate(sim);
    if (*c_dist) return run_dist(dist);
    if (*c_gof) return run_gof(gof);
    if (*c_stop) return run_stop(stop);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const NoSolutionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDivergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  }
  return kValidation;
}
