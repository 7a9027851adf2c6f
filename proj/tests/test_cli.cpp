#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "billiards/cli.hpp"

using namespace billiards;
using json = nlohmann::json;

namespace {

std::string fixture(const std::string& name) { return std::string(FIXTURE_DIR) + "/" + name; }

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "billiards");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("xi report for the equilateral triangle") {
  const Outcome o = invoke({"xi", fixture("equilateral.json")});
  REQUIRE(o.code == cli::kOk);
  const json r = json::parse(o.out);
  CHECK(r["schema"] == 1);
  CHECK(r["xi"].get<double>() == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(r["bounces"] == 3);
  CHECK(r["classical"] == true);
  CHECK(r["trajectory"].size() == 3);
  CHECK(r["certificate"]["imbalance"].get<double>() < 1e-8);
  CHECK_FALSE(r.contains("oracle"));
}

TEST_CASE("xi with the oracle and in text form") {
  const Outcome o = invoke({"--oracle", "--grid", "0.01", "xi", fixture("square.json")});
  REQUIRE(o.code == cli::kOk);
  const json r = json::parse(o.out);
  CHECK(r["xi"].get<double>() == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(std::abs(r["oracle"]["difference"].get<double>()) <= 5 * 0.01);

  const Outcome t = invoke({"--format", "text", "xi", fixture("right_isoceles.json")});
  REQUIRE(t.code == cli::kOk);
  CHECK(t.out.find("xi = ") != std::string::npos);
}

TEST_CASE("ellipsoid norm problems") {
  const Outcome o = invoke({"xi", fixture("equilateral_ellipsoid.json")});
  REQUIRE(o.code == cli::kOk);
  CHECK(json::parse(o.out)["xi"].get<double>() > 0.0);
  // Set-valued momenta are outside the solver's scope.
  CHECK(invoke({"xi", fixture("square_dual_polytope.json")}).code == cli::kUnsupported);
}

TEST_CASE("verify exit codes") {
  const Outcome ok = invoke({"verify", fixture("equilateral.json"), fixture("orthic.json")});
  CHECK(ok.code == cli::kOk);
  CHECK(json::parse(ok.out)["valid"] == true);
  const Outcome bad = invoke({"verify", fixture("equilateral.json"), fixture("orthic_shifted.json")});
  CHECK(bad.code == cli::kInvalidTrajectory);
  CHECK(json::parse(bad.out)["valid"] == false);
  CHECK(invoke({"verify", fixture("square.json"), fixture("square_two_bounce.json")}).code == cli::kOk);
  CHECK(invoke({"verify", fixture("right_isoceles.json"), fixture("right_corner.json")}).code == cli::kOk);
  // Trajectory points of the wrong dimension.
  CHECK(invoke({"verify", fixture("tetrahedron.json"), fixture("orthic.json")}).code == cli::kParseError);
}

TEST_CASE("input errors") {
  CHECK(invoke({"xi", fixture("malformed.json")}).code == cli::kParseError);
  const Outcome field = invoke({"xi", fixture("bad_field.json")});
  CHECK(field.code == cli::kParseError);
  CHECK(field.err.find("body.halfspaces[1].normal[1]") != std::string::npos);
  CHECK(invoke({"xi", fixture("unbounded.json")}).code == cli::kInvalidBody);
  CHECK(invoke({"xi", fixture("no_such_file.json")}).code == cli::kParseError);
  CHECK(invoke({"frobnicate"}).code == cli::kParseError);
  CHECK_THROWS_AS(cli::parse_problem(R"({"dimension": 2, "body": {"type": "vrep", "vertices": [[0, 0, 0]]}})"),
                  cli::ParseError);
  CHECK_THROWS_AS(cli::parse_problem(R"({"schema": 2, "dimension": 2, "body": {"type": "vrep", "vertices": [[0, 0]]}})"),
                  cli::ParseError);
  CHECK_THROWS_AS(cli::parse_trajectory(R"({"vertices": [[0, 0]]})", 2), cli::ParseError);
}

TEST_CASE("acuteness reports") {
  const Outcome cube = invoke({"acuteness", fixture("cube.json")});
  REQUIRE(cube.code == cli::kOk);
  const json c = json::parse(cube.out);
  CHECK(c["acute"] == false);
  CHECK(c["offending_faces"].size() == 20);
  const json t = json::parse(invoke({"acuteness", fixture("tetrahedron.json")}).out);
  CHECK(t["acute"] == true);
  CHECK(t["dihedral_angles"].size() == 6);
}

TEST_CASE("render") {
  const auto dir = std::filesystem::temp_directory_path() / "billiards_render_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "tri.svg").string();
  REQUIRE(invoke({"-o", path, "render", fixture("equilateral.json")}).code == cli::kOk);
  std::ifstream in(path);
  std::stringstream svg;
  svg << in.rdbuf();
  CHECK(svg.str().find("id=\"trajectory\"") != std::string::npos);
  CHECK(svg.str().find("id=\"certificate-normals\"") != std::string::npos);
  CHECK(invoke({"-o", path, "render", fixture("equilateral.json"), fixture("orthic.json")}).code == cli::kOk);
  CHECK(invoke({"render", fixture("equilateral.json")}).code == cli::kParseError);
  CHECK(invoke({"-o", (dir / "missing" / "x.svg").string(), "render", fixture("equilateral.json")}).code ==
        cli::kMissingOutputDir);
  CHECK(invoke({"-o", path, "render", fixture("tetrahedron.json")}).code == cli::kUnsupported);
  std::filesystem::remove_all(dir);
}

TEST_CASE("reports round-trip and are reproducible") {
  const auto dir = std::filesystem::temp_directory_path() / "billiards_roundtrip_test";
  std::filesystem::create_directories(dir);
  for (const char* name : {"equilateral.json", "right_isoceles.json", "pentagon.json", "equilateral_ellipsoid.json", "tetrahedron.json"}) {
    CAPTURE(name);
    const Outcome first = invoke({"xi", fixture(name)});
    REQUIRE(first.code == cli::kOk);
    CHECK(invoke({"xi", fixture(name)}).out == first.out);
    // The xi report is itself a valid trajectory file.
    const std::string report = (dir / "report.json").string();
    std::ofstream(report) << first.out;
    const Outcome check = invoke({"verify", fixture(name), report});
    CHECK(check.code == cli::kOk);
    CHECK(json::parse(check.out)["length"].get<double>() ==
          doctest::Approx(json::parse(first.out)["xi"].get<double>()).epsilon(1e-12));
  }
  const std::string a = (dir / "a.svg").string(), b = (dir / "b.svg").string();
  REQUIRE(invoke({"-o", a, "render", fixture("square.json"), fixture("square_two_bounce.json")}).code == cli::kOk);
  REQUIRE(invoke({"-o", b, "render", fixture("square.json"), fixture("square_two_bounce.json")}).code == cli::kOk);
  std::stringstream sa, sb;
  sa << std::ifstream(a).rdbuf();
  sb << std::ifstream(b).rdbuf();
  CHECK(sa.str() == sb.str());
  std::filesystem::remove_all(dir);
}
