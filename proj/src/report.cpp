#include "dspecies/report.hpp"

#include "dspecies/errors.hpp"

#include <cmath>
#include <fstream>
#include <iostream>

namespace dspecies {

namespace {

Json num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double get_num(const Json& j) {
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::nan("");
    throw ValidationError("report: expected a number, got '" + s + "'");
  }
  return j.get<double>();
}

Json opt_num(const std::optional<double>& x) { return x ? num(*x) : Json(nullptr); }

std::optional<double> get_opt_num(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return get_num(j.at(key));
}

template <class T>
Json opt(const std::optional<T>& x) {
  return x ? Json(*x) : Json(nullptr);
}

template <class T>
std::optional<T> get_opt(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

Json num_array(const std::vector<double>& xs) {
  Json a = Json::array();
  for (double x : xs) a.push_back(num(x));
  return a;
}

std::vector<double> get_num_array(const Json& j) {
  std::vector<double> out;
  for (const auto& x : j) out.push_back(get_num(x));
  return out;
}

Json chi2_json(const std::optional<Chi2Result>& c) {
  if (!c) return nullptr;
  Json j;
  j["pooled"] = num(c->pooled);
  j["unpooled"] = opt_num(c->unpooled);
  j["cells"] = c->cells;
  j["pooled_from"] = c->pooled_from;
  return j;
}

std::optional<Chi2Result> chi2_from_json(const Json& j) {
  if (j.is_null()) return std::nullopt;
  Chi2Result c;
  c.pooled = get_num(j.at("pooled"));
  c.unpooled = get_opt_num(j, "unpooled");
  c.cells = j.at("cells").get<Index>();
  c.pooled_from = j.at("pooled_from").get<Index>();
  return c;
}

}  // namespace

Json to_json(const EstimateReport& r) {
  Json j;
  j["estimator"] = r.estimator;
  j["model"] = r.model;
  j["statistic_used"] = r.statistic_used;
  j["scheme"] = r.scheme;
  j["k"] = r.k;
  j["p"] = r.p;
  j["theta_input"] = opt_num(r.theta_input);
  j["stat_value"] = opt_num(r.stat_value);
  j["n_real"] = opt_num(r.n_real);
  j["n_floor"] = opt(r.n_floor);
  j["theta_hat"] = opt_num(r.theta_hat);
  j["gamma_hat"] = opt_num(r.gamma_hat);
  j["flag"] = to_string(r.flag);
  j["iterations"] = r.iterations;
  j["residual"] = num(r.residual);
  return j;
}

EstimateReport estimate_report_from_json(const Json& j) {
  EstimateReport r;
  r.estimator = j.at("estimator").get<std::string>();
  r.model = j.at("model").get<std::string>();
  r.statistic_used = j.at("statistic_used").get<std::string>();
  r.scheme = j.at("scheme").get<std::string>();
  r.k = j.at("k").get<Index>();
  r.p = j.at("p").get<Index>();
  r.theta_input = get_opt_num(j, "theta_input");
  r.stat_value = get_opt_num(j, "stat_value");
  r.n_real = get_opt_num(j, "n_real");
  r.n_floor = get_opt<Index>(j, "n_floor");
  r.theta_hat = get_opt_num(j, "theta_hat");
  r.gamma_hat = get_opt_num(j, "gamma_hat");
  r.flag = estimate_flag_from_string(j.at("flag").get<std::string>());
  r.iterations = j.at("iterations").get<int>();
  r.residual = get_num(j.at("residual"));
  return r;
}

Json to_json(const GofReport& r) {
  Json j;
  j["model"] = r.model;
  j["alpha_variant"] = r.alpha_variant;
  j["k"] = r.k;
  j["p"] = r.p;
  j["theta_input"] = opt_num(r.theta_input);
  j["n_hat"] = opt_num(r.n_hat);
  j["gamma_hat"] = opt_num(r.gamma_hat);
  j["observed"] = r.observed;
  j["alpha_umvb"] = num_array(r.alpha_umvb);
  j["alpha_mle"] = num_array(r.alpha_mle);
  j["chi2_umvb"] = chi2_json(r.chi2_umvb);
  j["chi2_mle"] = chi2_json(r.chi2_mle);
  j["loglik"] = opt_num(r.loglik);
  j["dof_note"] = r.dof_note;
  return j;
}

GofReport gof_report_from_json(const Json& j) {
  GofReport r;
  r.model = j.at("model").get<std::string>();
  r.alpha_variant = j.at("alpha_variant").get<std::string>();
  r.k = j.at("k").get<Index>();
  r.p = j.at("p").get<Index>();
  r.theta_input = get_opt_num(j, "theta_input");
  r.n_hat = get_opt_num(j, "n_hat");
  r.gamma_hat = get_opt_num(j, "gamma_hat");
  r.observed = j.at("observed").get<std::vector<Index>>();
  r.alpha_umvb = get_num_array(j.at("alpha_umvb"));
  r.alpha_mle = get_num_array(j.at("alpha_mle"));
  r.chi2_umvb = chi2_from_json(j.at("chi2_umvb"));
  r.chi2_mle = chi2_from_json(j.at("chi2_mle"));
  r.loglik = get_opt_num(j, "loglik");
  r.dof_note = j.at("dof_note").get<std::string>();
  return r;
}

Json to_json(const StoppingReport& r) {
  Json j;
  j["rule"] = r.rule;
  j["method"] = r.method;
  j["model"] = r.model;
  j["k_values"] = r.k_values;
  j["probabilities"] = num_array(r.probabilities);
  j["std_errors"] = num_array(r.std_errors);
  j["seed"] = opt(r.seed);
  j["replications"] = opt(r.replications);
  if (r.epsilon) {
    const EpsilonStop& e = *r.epsilon;
    Json ej;
    ej["epsilon"] = num(e.epsilon);
    ej["model"] = e.model;
    ej["k_hat"] = opt(e.k_hat);
    ej["k_tilde"] = opt(e.k_tilde);
    ej["skipped"] = e.skipped;
    Json pts = Json::array();
    for (const auto& p : e.points) {
      Json pj;
      pj["k"] = p.k;
      pj["p"] = p.p;
      pj["r_hat"] = opt_num(p.r_hat);
      pj["r_tilde"] = opt_num(p.r_tilde);
      pts.push_back(std::move(pj));
    }
    ej["points"] = std::move(pts);
    j["epsilon"] = std::move(ej);
  } else {
    j["epsilon"] = nullptr;
  }
  return j;
}

StoppingReport stopping_report_from_json(const Json& j) {
  StoppingReport r;
  r.rule = j.at("rule").get<std::string>();
  r.method = j.at("method").get<std::string>();
  r.model = j.at("model").get<std::string>();
  r.k_values = j.at("k_values").get<std::vector<Index>>();
  r.probabilities = get_num_array(j.at("probabilities"));
  r.std_errors = get_num_array(j.at("std_errors"));
  r.seed = get_opt<std::uint64_t>(j, "seed");
  r.replications = get_opt<Index>(j, "replications");
  if (!j.at("epsilon").is_null()) {
    const Json& ej = j.at("epsilon");
    EpsilonStop e;
    e.epsilon = get_num(ej.at("epsilon"));
    e.model = ej.at("model").get<std::string>();
    e.k_hat = get_opt<Index>(ej, "k_hat");
    e.k_tilde = get_opt<Index>(ej, "k_tilde");
    e.skipped = ej.at("skipped").get<std::vector<Index>>();
    for (const auto& pj : ej.at("points"))
      e.points.push_back({pj.at("k").get<Index>(), pj.at("p").get<Index>(), get_opt_num(pj, "r_hat"),
                          get_opt_num(pj, "r_tilde")});
    r.epsilon = std::move(e);
  }
  return r;
}

Json to_json(const SimulationReport& r) {
  Json cfg;
  cfg["n"] = r.config.n;
  cfg["theta"] = num(r.config.theta);
  cfg["k_values"] = r.config.k_values;
  cfg["reps"] = r.config.reps;
  cfg["seed"] = r.config.seed;
  cfg["include_umvb"] = r.config.include_umvb;
  cfg["scheme"] = r.config.scheme == JointScheme::one_step ? "one_step" : "fixed_point";
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    Json rj;
    rj["k"] = row.k;
    rj["mean_p"] = num(row.mean_p);
    Json es = Json::array();
    for (const auto& e : row.estimators) {
      Json ej;
      ej["name"] = e.name;
      ej["mean"] = num(e.mean);
      ej["std"] = num(e.std_dev);
      ej["count"] = e.count;
      ej["flagged"] = e.flagged;
      es.push_back(std::move(ej));
    }
    rj["estimators"] = std::move(es);
    rows.push_back(std::move(rj));
  }
  Json j;
  j["config"] = std::move(cfg);
  j["rows"] = std::move(rows);
  return j;
}

SimulationReport simulation_report_from_json(const Json& j) {
  SimulationReport r;
  const Json& cfg = j.at("config");
  r.config.n = cfg.at("n").get<Index>();
  r.config.theta = get_num(cfg.at("theta"));
  r.config.k_values = cfg.at("k_values").get<std::vector<Index>>();
  r.config.reps = cfg.at("reps").get<Index>();
  r.config.seed = cfg.at("seed").get<std::uint64_t>();
  r.config.include_umvb = cfg.at("include_umvb").get<bool>();
  r.config.scheme = cfg.at("scheme").get<std::string>() == "one_step" ? JointScheme::one_step
                                                                       : JointScheme::fixed_point;
  for (const auto& rj : j.at("rows")) {
    SimulationRow row;
    row.k = rj.at("k").get<Index>();
    row.mean_p = get_num(rj.at("mean_p"));
    for (const auto& ej : rj.at("estimators"))
      row.estimators.push_back({ej.at("name").get<std::string>(), get_num(ej.at("mean")),
                                get_num(ej.at("std")), ej.at("count").get<Index>(),
                                ej.at("flagged").get<Index>()});
    r.rows.push_back(std::move(row));
  }
  return r;
}

Json dataset_summary(const Dataset& d) {
  Json j;
  j["name"] = d.name;
  j["k"] = d.spectrum.k();
  j["p"] = d.spectrum.p();
  j["known_n"] = opt(d.known_n);
  j["source"] = d.source_note;
  Json spec = Json::object();
  for (const auto& [i, a] : d.spectrum.entries()) spec[std::to_string(i)] = a;
  j["spectrum"] = std::move(spec);
  return j;
}

Json make_envelope(const std::string& command, Json inputs, Json results,
                   std::optional<std::uint64_t> seed) {
  Json j;
  j["schema"] = kReportSchema;
  j["command"] = command;
  j["seed"] = opt(seed);
  j["inputs"] = std::move(inputs);
  j["results"] = std::move(results);
  return j;
}

std::string dump_report(const Json& j) { return j.dump(2) + "\n"; }

void write_report(const Json& j, const std::string& destination) {
  const std::string text = dump_report(j);
  if (destination.empty() || destination == "-") {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw IoError("cannot write report to stdout");
    return;
  }
  std::ofstream out(destination, std::ios::binary);
  if (!out) throw IoError("cannot open '" + destination + "' for writing");
  out << text;
  out.close();
  if (!out) throw IoError("write to '" + destination + "' failed");
}

Json parse_report(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("report is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("schema") || j.at("schema") != kReportSchema)
    throw ValidationError(std::string("report schema is not ") + kReportSchema);
  return j;
}

}  // namespace dspecies
