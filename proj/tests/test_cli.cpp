#include "doctest.h"

#include "entangle/cli.hpp"
#include "entangle/io.hpp"

#include <cmath>
#include <sstream>

using namespace entangle;
using io::Json;

namespace {

const std::string kData = ENTANGLE_EXAMPLES_DIR;

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
  Json json() const { return Json::parse(out); }
};

Outcome run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Outcome o;
  o.code = cli::run(args, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::string data(const std::string& name) { return kData + "/" + name; }

}  // namespace

TEST_CASE("measure on a Bell state") {
  const Outcome o = run({"measure", data("bell.json"), "--measure", "e"});
  REQUIRE(o.code == 0);
  const Json j = o.json();
  const double v = j["deterministic"]["results"]["value"].get<double>();
  CHECK(std::abs(v - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(j["deterministic"]["command"] == "measure");
  CHECK(j["deterministic"]["inputs"]["state"]["sha256"].get<std::string>().size() == 64);
  CHECK(o.out.find("0.7071067811") != std::string::npos);

  const Outcome p = run({"measure", data("bell.json"), "--measure", "p-number", "--p", "3"});
  REQUIRE(p.code == 0);
  CHECK(std::abs(p.json()["deterministic"]["results"]["value"].get<double>() - std::cbrt(0.75)) < 1e-15);
  CHECK(p.out.find("0.90856029641") != std::string::npos);
}

TEST_CASE("measure variants") {
  const auto value = [](const std::vector<std::string>& args) {
    const Outcome o = run(args);
    REQUIRE(o.code == 0);
    return o.json()["deterministic"]["results"]["value"].get<double>();
  };
  const std::string s = data("schmidt_64_36.json");
  CHECK(value({"measure", s, "--measure", "entropy"}) == doctest::Approx(0.942683189255492));
  CHECK(value({"measure", s, "--measure", "negativity"}) == doctest::Approx(0.96));
  CHECK(value({"measure", s, "--measure", "concurrence", "--k", "2"}) == doctest::Approx(0.96));
  CHECK(value({"measure", s, "--measure", "geometric", "--ranks", "1,1"}) == doctest::Approx(0.64));
  CHECK(value({"measure", s, "--measure", "nu", "--p", "2"}) == doctest::Approx(0.4608));
  CHECK(value({"measure", data("product.json"), "--measure", "e"}) == 0.0);
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == cli::kInvalidParameter);
  CHECK(run({"measure", data("bell.json")}).code == cli::kInvalidParameter);
  CHECK(run({"measure", data("bell.json"), "--measure", "bogus"}).code == cli::kInvalidParameter);
  CHECK(run({"measure", data("bell.json"), "--measure", "p-number", "--p", "1"}).code == cli::kInvalidParameter);
  CHECK(run({"measure", data("bell.json"), "--measure", "concurrence", "--k", "3"}).code == cli::kInvalidParameter);
  CHECK(run({"measure", data("bell.json"), "--measure", "geometric", "--ranks", "1,x"}).code ==
        cli::kInvalidParameter);
  CHECK(run({"measure", data("malformed.json"), "--measure", "e"}).code == cli::kMalformedInput);
  CHECK(run({"measure", data("unnormalized.json"), "--measure", "e"}).code == cli::kMalformedInput);
  CHECK(run({"measure", data("missing.json"), "--measure", "e"}).code == cli::kMalformedInput);
  CHECK(run({"measure", data("bell_density.json"), "--measure", "e"}).code == cli::kMalformedInput);
  CHECK(run({"roof", data("bell_density.json"), "--measure", "e", "--m", "2"}).code == cli::kInvalidParameter);
  CHECK(run({"roof", data("bell_density.json"), "--measure", "e", "--restarts", "0"}).code ==
        cli::kInvalidParameter);
  CHECK(run({"--help"}).code == cli::kSuccess);
}

TEST_CASE("roof is deterministic across thread counts") {
  const std::vector<std::string> base = {"roof", data("bell_plus_product.json"), "--measure", "e",
                                         "--seed", "7", "--restarts", "6"};
  const Outcome serial = run(base);
  REQUIRE(serial.code == 0);
  std::vector<std::string> threaded = base;
  threaded.insert(threaded.end(), {"--threads", "2"});
  const Outcome parallel = run(threaded);
  REQUIRE(parallel.code == 0);
  const Json a = serial.json();
  const Json b = parallel.json();
  CHECK(a["deterministic"].dump() == b["deterministic"].dump());
  CHECK(b["execution"]["threads"] == 2);
  const double v = a["deterministic"]["results"]["value"].get<double>();
  CHECK(std::abs(v - 0.5 / std::sqrt(2.0)) < 1e-7);
  CHECK(a["deterministic"]["results"]["reconstruction_residual"].get<double>() < 1e-10);
  CHECK(a["deterministic"]["config"]["roof"]["m"] == 4);
}

TEST_CASE("roof on separable and pure inputs") {
  const Outcome sep = run({"roof", data("separable.json"), "--measure", "e", "--restarts", "4"});
  REQUIRE(sep.code == 0);
  CHECK(sep.json()["deterministic"]["results"]["value"].get<double>() < 1e-6);
  const Outcome pure = run({"roof", data("bell.json"), "--measure", "e", "--restarts", "2"});
  REQUIRE(pure.code == 0);
  CHECK(std::abs(pure.json()["deterministic"]["results"]["value"].get<double>() - 1.0 / std::sqrt(2.0)) < 1e-12);
  const Outcome concave = run({"roof", data("bell_density.json"), "--measure", "geometric", "--ranks", "1,1",
                               "--direction", "max", "--restarts", "2"});
  REQUIRE(concave.code == 0);
  CHECK(concave.json()["deterministic"]["results"]["value"].get<double>() == doctest::Approx(0.5));
}

TEST_CASE("sweep") {
  const Outcome o = run({"sweep", data("schmidt_64_36.json"), "--measure", "p-number", "--p-grid", "1.5:3.0:0.5"});
  REQUIRE(o.code == 0);
  const Json r = o.json()["deterministic"]["results"];
  REQUIRE(r["rows"].size() == 4);
  CHECK(r["rows"][3]["p"].get<double>() == doctest::Approx(3.0));
  CHECK(r["strictly_increasing"] == true);
  CHECK(r["csv"].get<std::string>().rfind("p,value,gap_estimate\n", 0) == 0);

  const Outcome mixed = run({"sweep", data("bell_plus_product.json"), "--measure", "p-number", "--p-grid",
                             "2:4:1", "--restarts", "3"});
  REQUIRE(mixed.code == 0);
  CHECK(mixed.json()["deterministic"]["results"]["nondecreasing_within_gap"] == true);

  CHECK(run({"sweep", data("bell.json"), "--measure", "p-number", "--p-grid", "1.0:2:0.5"}).code ==
        cli::kInvalidParameter);
  CHECK(run({"sweep", data("bell.json"), "--measure", "p-number", "--p-grid", "0.5:2:0.5"}).code ==
        cli::kInvalidParameter);
  CHECK(run({"sweep", data("bell.json"), "--measure", "p-number", "--p-grid", "2:3"}).code ==
        cli::kInvalidParameter);
  CHECK(run({"sweep", data("bell.json"), "--measure", "e", "--p-grid", "2:3:1"}).code == cli::kInvalidParameter);
}

TEST_CASE("locc audit") {
  const Outcome o = run({"locc", data("tree_alice_measure.json"), data("bell.json"), "--measure", "e"});
  REQUIRE(o.code == 0);
  const Json r = o.json()["deterministic"]["results"];
  CHECK(r["any_violation"] == false);
  REQUIRE(r["nodes"].size() == 1);
  CHECK(r["nodes"][0]["node"] == "()");
  CHECK(r["nodes"][0]["slack"].get<double>() == doctest::Approx(1.0 / std::sqrt(2.0)));
  REQUIRE(r["levels"].size() == 2);
  CHECK(r["levels"][1][1]["node"] == "(2)");
  CHECK(r["levels"][1][1]["probability"].get<double>() == doctest::Approx(0.5));

  const Outcome two = run({"locc", data("tree_two_round.json"), data("bell_plus_product.json"), "--measure",
                           "e", "--restarts", "4"});
  REQUIRE(two.code == 0);
  CHECK(two.json()["deterministic"]["results"]["any_violation"] == false);
  CHECK(two.json()["deterministic"]["results"]["pruned"].empty());

  const Outcome pruned = run({"locc", data("tree_two_round.json"), data("bell.json"), "--measure", "e"});
  REQUIRE(pruned.code == 0);
  const Json t = pruned.json()["deterministic"]["results"];
  CHECK(t["any_violation"] == false);
  REQUIRE(t["pruned"].size() == 1);
  CHECK(t["pruned"][0] == "(1,2)");

  const Outcome bad = run({"locc", data("tree_incomplete.json"), data("bell.json"), "--measure", "e"});
  CHECK(bad.code == cli::kInvalidTree);
  CHECK(bad.err.find("()") != std::string::npos);
  CHECK(bad.json()["deterministic"]["validation"]["valid"] == false);

  CHECK(run({"locc", data("tree_identity.json"), data("malformed.json"), "--measure", "e"}).code ==
        cli::kMalformedInput);
}

TEST_CASE("report file") {
  const std::string path = "cli_report_test.json";
  const Outcome o = run({"measure", data("bell.json"), "--measure", "e", "--out", path});
  REQUIRE(o.code == 0);
  CHECK(io::read_file(path) == o.out);
}
