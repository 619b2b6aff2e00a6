#include "testing.hpp"

#include <json.hpp>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <string>

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(DSPECIES_CLI) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

nlohmann::json run_json(const std::string& args) {
  const Run r = run(args);
  REQUIRE_MESSAGE(r.code == 0, args);
  return nlohmann::json::parse(r.out);
}

std::set<std::string> help_flags(const std::string& sub) {
  const Run r = run(sub + " --help");
  REQUIRE(r.code == 0);
  std::set<std::string> flags;
  const std::regex flag(R"(--[a-z][a-z-]*)");
  for (auto it = std::sregex_iterator(r.out.begin(), r.out.end(), flag); it != std::sregex_iterator(); ++it)
    flags.insert(it->str());
  return flags;
}

}  // namespace

TEST_CASE("help lists exactly the supported flags") {
  const std::map<std::string, std::set<std::string>> expected{
      {"estimate",
       {"--help", "--bundled", "--input", "--format", "--allow-zero-class", "--k", "--p", "--theta", "--stat",
        "--n-estimator", "--scheme", "--out"}},
      {"simulate", {"--help", "--n", "--theta", "--k", "--reps", "--seed", "--include-umvb", "--scheme", "--out"}},
      {"dist", {"--help", "--model", "--n", "--theta", "--gamma", "--k", "--p", "--method", "--out"}},
      {"gof",
       {"--help", "--bundled", "--input", "--format", "--allow-zero-class", "--model", "--theta", "--alpha-variant",
        "--out"}},
      {"stop",
       {"--help", "--rule", "--model", "--n", "--theta", "--gamma", "--k", "--method", "--seed", "--reps", "--epsilon",
        "--trajectory", "--sim-theta", "--out"}},
  };
  for (const auto& [sub, flags] : expected) {
    CHECK_MESSAGE(help_flags(sub) == flags, sub);
  }
  CHECK(run("--bogus-flag").code == 2);
  CHECK(run("estimate --bundled madison --no-such-flag").code == 2);
}

TEST_CASE("estimate examples") {
  const auto m = run_json("estimate --bundled madison --stat D");
  CHECK(m["schema"] == "dirichlet-species/v1");
  bool found = false;
  for (const auto& r : m["results"])
    if (r["estimator"] == "joint") {
      found = true;
      CHECK(r["statistic_used"] == "P,D");
      CHECK(r["n_real"].get<double>() == doctest::Approx(274.6).epsilon(5e-4));
      CHECK(r["theta_hat"].get<double>() == doctest::Approx(1.09).epsilon(0.01));
    }
  CHECK(found);
  const auto j = run_json("estimate --bundled janzen-1967-day --stat D");
  for (const auto& r : j["results"])
    if (r["estimator"] == "joint") {
      CHECK(r["n_real"].get<double>() == doctest::Approx(162.7).epsilon(5e-4));
      CHECK(r["theta_hat"].get<double>() == doctest::Approx(0.219).epsilon(0.01));
    }
  const auto be = run_json("estimate --theta 1 --k 10 --p 5");
  std::map<std::string, double> n;
  for (const auto& r : be["results"])
    if (r["n_real"].is_number()) n[r["estimator"]] = r["n_real"].get<double>();
  CHECK(n["mle_n"] == doctest::Approx(9.0));
  CHECK(n["umvb_n"] == doctest::Approx(8.3333).epsilon(1e-4));
}

TEST_CASE("dist, stop and gof examples") {
  const auto d = run_json("dist --model be --n 2 --k 2 --p 2");
  CHECK(d["results"]["probability"].get<double>() == doctest::Approx(1.0 / 3.0));
  const auto whole = run_json("dist --model dirichlet --n 4 --theta 0.5 --k 6");
  CHECK(whole["results"].dump().find("pmf") != std::string::npos);
  const auto s = run_json("stop --rule coupon --model mb --n 2 --k 3");
  CHECK(s["results"]["probabilities"][0].get<double>() == doctest::Approx(0.75));
  const auto g = run_json("gof --bundled hamilton --model kingman");
  const std::string text = g.dump();
  CHECK(text.find("\"inf\"") == std::string::npos);
  CHECK(text.find("\"nan\"") == std::string::npos);
  CHECK(g["results"]["loglik"].is_number());
  CHECK(g["results"]["chi2_mle"]["pooled"].is_number());
}

TEST_CASE("exit codes") {
  CHECK(run("estimate --bundled madison").code == 0);
  CHECK(run("estimate --bundled no-such-set").code == 2);
  CHECK(run("estimate --theta 1 --k 5 --p 9").code == 2);
  CHECK(run("simulate --n 10 --theta 1").code == 2);  // seed is mandatory
  CHECK(run("dist --model be --n 2").code == 2);
  CHECK(run("estimate --theta 1 --k 10 --p 10").code == 3);
  CHECK(run("estimate --input /nonexistent/spectrum.txt").code == 4);
  CHECK(run("dist --model be --n 2 --k 2 --out /nonexistent/dir/out.json").code == 4);
}

TEST_CASE("reports are reproducible") {
  const Run a = run("simulate --n 30 --theta 0.7 --reps 5 --seed 9");
  const Run b = run("simulate --n 30 --theta 0.7 --reps 5 --seed 9");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(nlohmann::json::parse(a.out)["seed"] == 9);
  const Run c = run("stop --rule smallest-fragment --n 4 --theta 0.5 --k 1 5 --method mc --seed 3 --reps 500");
  const Run d = run("stop --rule smallest-fragment --n 4 --theta 0.5 --k 1 5 --method mc --seed 3 --reps 500");
  CHECK(c.code == 0);
  CHECK(c.out == d.out);
  CHECK(run("gof --bundled madison --model be").out == run("gof --bundled madison --model be").out);
}

TEST_CASE("file input and output") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto in = dir / "dspecies_cli_spectrum.txt";
  const auto out = dir / "dspecies_cli_report.json";
  {
    std::ofstream f(in);
    f << "# name: small\n1 6\n2 3\n3 1\n";
  }
  const Run r = run("estimate --input " + in.string() + " --theta 1 --out " + out.string());
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream f(out);
  const auto j = nlohmann::json::parse(f);
  CHECK(j["inputs"]["dataset"]["name"] == "small");
  CHECK(j["inputs"]["dataset"]["k"] == 15);
  std::filesystem::remove(in);
  std::filesystem::remove(out);
}
