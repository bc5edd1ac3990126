#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include <nlohmann/json.hpp>

#include "exlift/cli.hpp"
#include "support.hpp"

using namespace exlift;
using json = nlohmann::ordered_json;

namespace {

std::string model_path(const char* name) { return std::string(EXLIFT_MODELS_DIR) + "/" + name; }

RunConfig config(const std::string& model, const std::string& query = "") {
  RunConfig c;
  c.model_path = model;
  c.query = query;
  return c;
}

json infer_json(const RunConfig& c) {
  const auto out = cmd_infer(c);
  REQUIRE_MESSAGE(out.exit_code == kExitOk, out.err);
  return json::parse(out.out);
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("infer: single-formula marginal") {
  const auto j = infer_json(config(model_path("smokers.mln"), "Smokes(A)=1"));
  CHECK(j["mode"] == "marginal");
  CHECK(j["engine"] == "lifted");
  CHECK(j["fragment"] == "Monadic");
  CHECK(std::fabs(j["probability"].get<double>() - std::exp(1.5) / (1 + std::exp(1.5))) < 1e-12);
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  CHECK(keys == std::vector<std::string>{"mode", "engine", "fragment", "probability", "log_partition",
                                         "statistics_visited", "elapsed_ms"});
}

TEST_CASE("infer: lifted and oracle agree on two-variable models") {
  for (std::size_t k = 2; k <= 4; ++k) {
    const auto path = support::write_temp("fs" + std::to_string(k) + ".mln",
                                          "domain " + std::to_string(k) +
                                              "\n1.3 Smokes(x) => Cancer(x)\n1.5 Smokes(x) & Friends(x,y) => Smokes(y)\n");
    const auto evidence = support::write_temp("fs_e.db", "Smokes(C2) = 1\nCancer(C1) = 0\n");
    std::vector<const char*> queries{"Friends(C2,C1)=0,Smokes(C1)=1"};
    if (k < 4) queries.insert(queries.end(), {"Smokes(C1)=1", "Cancer(C2)=1", "Friends(C1,C2)=1"});
    for (const char* q : queries) {
      auto c = config(path, q);
      c.evidence_path = evidence;
      c.engine = "lifted";
      const auto lifted = infer_json(c);
      c.engine = "oracle";
      const auto oracle = infer_json(c);
      CHECK(lifted["fragment"] == "TwoVariable");
      CHECK(oracle["statistics_visited"] == 0);
      CHECK(support::rel_error(lifted["probability"].get<double>(), oracle["probability"].get<double>()) < 1e-10);
    }
  }
}

TEST_CASE("infer: MPE") {
  auto c = config(model_path("smokers.mln"));
  c.mode = "mpe";
  const auto j = infer_json(c);
  CHECK(j["mpe_assignment"] == json{{"Smokes(A)", 1}, {"Smokes(B)", 1}, {"Smokes(C)", 1}});
  CHECK(j["log_weight"].get<double>() == doctest::Approx(4.5).epsilon(1e-15));
  CHECK(j["mpe_scope"] == "all");
  CHECK_FALSE(j.contains("probability"));

  c.format = "text";
  const auto text = cmd_infer(c);
  CHECK(text.exit_code == kExitOk);
  CHECK(text.out.find("mpe_assignment: Smokes(A)=1,Smokes(B)=1,Smokes(C)=1\n") != std::string::npos);
}

TEST_CASE("infer: exit codes") {
  CHECK(cmd_infer(config("/nonexistent/model.mln")).exit_code == kExitParse);
  CHECK(cmd_infer(config(support::write_temp("bad.mln", "domain 2\n1.0 S(x) &\n"))).exit_code == kExitParse);
  CHECK(cmd_infer(config(model_path("smokers.mln"), "Smokes(Q)=1")).exit_code == kExitParse);

  auto big = config(support::write_temp("ternary4.mln", "domain 4\n0.7 L(x,y,z) => L(y,x,z)\n"), "L(C1,C2,C3)=1");
  const auto unsupported = cmd_infer(big);
  CHECK(unsupported.exit_code == kExitUnsupported);
  CHECK_FALSE(unsupported.err.empty());

  auto small = config(model_path("ternary.mln"), "Likes(C1,C2,C1)=1");
  const auto j = infer_json(small);
  CHECK(j["engine"] == "oracle");
  CHECK(j["fragment"] == "Unsupported");

  auto lifted_only = small;
  lifted_only.engine = "lifted";
  CHECK(cmd_infer(lifted_only).exit_code == kExitUnsupported);

  auto hard = config(support::write_temp("hard.mln", "domain 2\n1.0 S(x)\n"), "S(C1)=1");
  hard.evidence_path = support::write_temp("hard.db", "S(C1) = 0\n");
  hard.mode = "mpe";
  CHECK(cmd_infer(hard).exit_code == kExitInfeasible);
  hard.mode = "marginal";
  CHECK(infer_json(hard)["probability"] == 0.0);

  auto bad_mode = config(model_path("smokers.mln"));
  bad_mode.mode = "sample";
  CHECK(cmd_infer(bad_mode).exit_code == kExitFailure);
}

TEST_CASE("validate") {
  const auto path = support::write_temp("m5.mln", "domain 5\n1.3 S(x) => C(x)\n1.5 S(x) & S(y)\n");
  auto c = config(path);
  c.seed = 99;
  const auto first = cmd_validate(c);
  CHECK(first.exit_code == kExitOk);
  const auto report = json::parse(first.out);
  CHECK(report["marginal_checks"] == 200);
  CHECK(report["result"] == "PASS");
  CHECK(cmd_validate(c).out == first.out);

  c.count_hook = [](BigInt& n) {
    if (n > 1) n += 1;
  };
  const auto broken = cmd_validate(c);
  CHECK(broken.exit_code != kExitOk);
  CHECK(json::parse(broken.out)["result"] == "FAIL");

  auto fs = config(support::write_temp("fs3v.mln", support::kFriendsSmokers));
  fs.queries = 40;
  CHECK(cmd_validate(fs).exit_code == kExitOk);
}

TEST_CASE("bench") {
  auto c = config(model_path("smokers_pairs.mln"));
  c.domain_sizes = {25, 50, 100, 200};
  const auto out = cmd_bench(c);
  REQUIRE(out.exit_code == kExitOk);
  const auto rows = lines(out.out);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == "k,statistics,elapsed_ms,engine,oracle");
  std::vector<unsigned long> stats;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    std::istringstream row(rows[i]);
    std::string k, n, ms, engine, oracle;
    std::getline(row, k, ',');
    std::getline(row, n, ',');
    std::getline(row, ms, ',');
    std::getline(row, engine, ',');
    std::getline(row, oracle, ',');
    const auto kk = std::stoul(k);
    CHECK(std::stoul(n) == binomial(kk + 3, 3).get_ui());
    CHECK(engine == "lifted");
    CHECK(oracle == "infeasible");
    stats.push_back(std::stoul(n));
  }
  for (std::size_t i = 1; i < stats.size(); ++i) {
    const double ratio = static_cast<double>(stats[i]) / static_cast<double>(stats[i - 1]);
    const double k0 = 25.0 * std::pow(2.0, static_cast<double>(i - 1)), k1 = 2 * k0;
    CHECK(ratio == doctest::Approx((k1 + 3) * (k1 + 2) * (k1 + 1) / ((k0 + 3) * (k0 + 2) * (k0 + 1))));
  }
}

TEST_CASE("describe") {
  CHECK(lines(cmd_describe(config(model_path("smokers_pairs.mln"))).out)[0] ==
        "Monadic, width 2, 3 blocks, |T| = C(6,3) = 20");
  CHECK(lines(cmd_describe(config(model_path("friends_smokers.mln"))).out)[0] == "TwoVariable, Y width 3, 3 pairs");
  CHECK(lines(cmd_describe(config(model_path("ternary.mln"))).out)[0] == "Unsupported (oracle only)");
  CHECK(cmd_describe(config("/nonexistent.mln")).exit_code == kExitParse);
}

TEST_CASE("executable exit status") {
  const std::string exe = EXLIFT_CLI_PATH;
  CHECK(std::system((exe + " describe --model " + model_path("smokers.mln") + " > /dev/null").c_str()) == 0);
  const int status = std::system((exe + " infer --model /nonexistent.mln 2> /dev/null").c_str());
  CHECK(WEXITSTATUS(status) == kExitParse);
  const int usage = std::system((exe + " infer 2> /dev/null > /dev/null").c_str());
  CHECK(WEXITSTATUS(usage) == kExitFailure);
}
