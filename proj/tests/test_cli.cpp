#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sheafkit/cli.hpp"
#include "sheafkit/io.hpp"
#include "support.hpp"

using namespace sheafkit;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(SHEAFKIT_DATA_DIR) + "/" + name; }

std::string scratch(const std::string& name, const std::string& content) {
  const auto dir = std::filesystem::temp_directory_path() / "sheafkit_cli_tests";
  std::filesystem::create_directories(dir);
  const auto path = dir / name;
  std::ofstream(path) << content;
  return path.string();
}

}  // namespace

TEST_CASE("hom prints the generator") {
  const Run r = run({"hom", data("ex_times2.json"), data("ex_times3.json")});
  CHECK(r.code == kExitOk);
  CHECK(r.out == "rank 1; basis [(2),(3)]\n");
}

TEST_CASE("hom with e1 and the boundary route") {
  const Run r = run({"hom", data("ex_times2.json"), data("ex_times2.json"), "--via-delta", "--e1"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("rank 1; basis [(1),(1)]") == 0);
  CHECK(r.out.find("E1 Z/2") != std::string::npos);
}

TEST_CASE("validate reports the failing index") {
  const Run r = run({"validate", data("bad.json")});
  CHECK(r.code == kExitInvalid);
  CHECK(r.out.find("i=1") != std::string::npos);
  CHECK(run({"validate", data("ex_times2.json")}).code == kExitOk);
}

TEST_CASE("pullback check") {
  const Run r = run({"pullback-check", data("ex_zigzag3.json"), data("ex_zigzag3.json"), "--y", "1:2", "--z", "2:3"});
  CHECK(r.code == kExitOk);
  CHECK(r.out == "pullback property: holds\n");
}

TEST_CASE("k groups, skyscrapers and towers") {
  const Run k = run({"k", data("ex_zigzag.json"), "--interval", "1:3"});
  CHECK(k.code == kExitOk);
  CHECK(k.out.find("K0 rank 1; basis [(1,1)]") == 0);
  CHECK(k.out.find("K1 Z/2") != std::string::npos);

  const Run s = run({"sky", "--d-rank", "1", "--at", "x_1", data("ex_times3.json"), "--via-tower"});
  CHECK(s.code == kExitOk);
  CHECK(s.out == "E0 0\nE1 Z\n");
  CHECK(run({"sky", "--d-rank", "1", "--at", "x_9", data("ex_times3.json")}).code == kExitUsage);
  CHECK(run({"sky", "--d-rank", "1", "--at", "nowhere", data("ex_times3.json")}).code == kExitParse);

  const Run t = run({"tower", data("tower_times2.json")});
  CHECK(t.code == kExitOk);
  CHECK(t.out.find("lim1 nonzero (uncountable)") != std::string::npos);
  const Run c = run({"tower", data("tower_const.json"), "--json"});
  CHECK(c.out.find("\"lim\"") != std::string::npos);
}

TEST_CASE("morphism commands") {
  const Run c = run({"compose", data("ex_times2.json"), data("ex_times3.json"), data("ex_times2.json"),
                     data("t_2_3.json"), data("t_3_2.json")});
  CHECK(c.code == kExitOk);
  CHECK(c.out == "[(6),(6)]\n");

  CHECK(run({"invert", data("ex_times2.json"), data("ex_times3.json"), data("t_2_3.json")}).code == kExitInfeasible);

  const Run r = run({"restrict", data("ex_times2.json"), data("ex_times3.json"), "--from", "1:2", "--to", "2:2",
                     "--tuple", data("t_2_3.json")});
  CHECK(r.out == "[(3)]\n");

  // psi = (2,2), alpha = (1,1) over (id, x1): parity obstruction
  const std::string psi = scratch("psi.json", R"({"betas": [[[2]], [[2]]]})");
  const std::string one = scratch("one.json", R"({"betas": [[[1]], [[1]]]})");
  const std::string two = scratch("two.json", R"({"betas": [[[2]], [[2]]]})");
  const std::string a = data("ex_times1.json");
  CHECK(run({"factor", a, a, a, psi, one}).code == kExitInfeasible);
  const Run f = run({"factor", a, a, a, psi, two});
  CHECK(f.code == kExitOk);
  CHECK(f.out.find("mu [(1),(1)]") == 0);

  // a morphism file naming the wrong algebras is rejected
  CHECK(run({"invert", data("ex_times3.json"), data("ex_times2.json"), data("t_2_3.json")}).code == kExitInvalid);
}

TEST_CASE("refine emits an algebra") {
  const Run r = run({"refine", data("ex_times2.json"), "--segment", "2"});
  CHECK(r.code == kExitOk);
  const ElementaryAlgebra a = io::algebra_from_json(io::Json::parse(r.out));
  CHECK(a.n() == 2);
  CHECK(validate(a).ok());
  CHECK(run({"refine", data("ex_times2.json"), "--segment", "7"}).code == kExitUsage);
}

TEST_CASE("oracle check") {
  const Run r = run({"oracle-check", data("ex_zigzag.json"), data("ex_zigzag3.json"), "--box", "2"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("oracle: agree") == 0);
}

TEST_CASE("intertwine command") {
  const Run r = run({"intertwine", data("intertwine_demo.json")});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("zigzag complete") != std::string::npos);
  const Run bad = run({"intertwine", data("intertwine_obstructed.json")});
  CHECK(bad.code == kExitInfeasible);
  CHECK(bad.out.find("failed at round 1 (eta)") != std::string::npos);
}

TEST_CASE("exit codes for bad input") {
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"hom", data("ex_times2.json")}).code == kExitUsage);
  CHECK(run({"hom", data("missing.json"), data("ex_times2.json")}).code == kExitParse);
  CHECK(run({"validate", scratch("broken.json", "{\"name\": ")}).code == kExitParse);
  CHECK(run({"k", data("ex_times2.json"), "--interval", "1:5"}).code == kExitUsage);
  CHECK(run({"hom", data("ex_times2.json"), data("ex_zigzag.json")}).code == kExitInvalid);
  CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("output is deterministic and honours the environment") {
  const std::vector<std::string> args{"hom", data("ex_zigzag.json"), data("ex_zigzag.json"), "--e1"};
  CHECK(run(args).out == run(args).out);
  ::setenv("SHEAFKIT_OUTPUT", "json", 1);
  const Run j = run(args);
  ::unsetenv("SHEAFKIT_OUTPUT");
  CHECK(j.out.front() == '{');
  CHECK(io::Json::parse(j.out)["hom"]["rank"] == 1);
  ::setenv("SHEAFKIT_OUTPUT", "json", 1);
  const Run t = run({"hom", data("ex_times2.json"), data("ex_times3.json"), "--text"});
  ::unsetenv("SHEAFKIT_OUTPUT");
  CHECK(t.out == "rank 1; basis [(2),(3)]\n");
}

TEST_CASE("property: json round trips") {
  testing::Rng rng(51);
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = static_cast<std::size_t>(testing::uniform(rng, 0, 3));
    ElementaryAlgebra a = testing::random_strict(rng, "A" + std::to_string(trial), n, 2, 3);
    if (trial % 3 == 0) {
      std::vector<double> xs;
      for (std::size_t i = 1; i <= n; ++i) xs.push_back(static_cast<double>(i) / static_cast<double>(n + 1));
      a.coords = xs;
    }
    const io::Json j = io::to_json(a);
    const ElementaryAlgebra back = io::algebra_from_json(io::Json::parse(io::dump(j)));
    CHECK(io::to_json(back) == j);
    CHECK(back.h_ranks == a.h_ranks);
    CHECK(back.gamma0 == a.gamma0);
    CHECK(back.gamma1 == a.gamma1);

    HomTuple t;
    for (std::size_t k = 0; k <= n; ++k)
      t.betas.push_back(testing::random_matrix(rng, static_cast<std::size_t>(testing::uniform(rng, 0, 2)),
                                               static_cast<std::size_t>(testing::uniform(rng, 0, 2)), -9, 9));
    CHECK(io::morphism_from_json(io::to_json(io::MorphismFile{"A", "B", t})).tuple == t);

    Tower w;
    w.ranks = {static_cast<std::size_t>(testing::uniform(rng, 0, 2)), static_cast<std::size_t>(testing::uniform(rng, 0, 2))};
    w.maps = {testing::random_matrix(rng, w.ranks[0], w.ranks[1], -5, 5)};
    const Tower wb = io::tower_from_json(io::to_json(w));
    CHECK(wb.ranks == w.ranks);
    CHECK(wb.maps == w.maps);
  }
  IntMatrix big(1, 1);
  big(0, 0) = Integer("-1234567890123456789012345678901234567890");
  CHECK(io::matrix_from_json(io::to_json(big), "m") == big);
  CHECK(io::to_json(big)[0][0].is_string());
}

TEST_CASE("torsion in tower stages is rejected") {
  CHECK_THROWS_AS(io::tower_from_json(io::Json::parse(R"({"ranks": [1], "maps": [], "torsion": [[2]]})")),
                  UnsupportedError);
}
