#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "billiards/body.hpp"
#include "billiards/norm.hpp"
#include "billiards/trajectory.hpp"

namespace billiards::cli {

/// Exit codes of the command-line tool.
enum Exit : int {
  kOk = 0,
  kInvalidTrajectory = 1,
  kParseError = 2,
  kInvalidBody = 3,
  kVerificationFailure = 4,
  kMissingOutputDir = 5,
  kUnsupported = 6,
};

/// Malformed input; `field` is a path such as "body.halfspaces[2].normal".
class ParseError : public Error {
 public:
  ParseError(std::string field, const std::string& what)
      : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct Options {
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
};

struct Problem {
  Polytope body;
  NormBody norm;
  Options options;
};

/// Parses a problem document.  Throws ParseError for schema violations and the
/// library's geometry/precondition errors when the data describe an invalid body.
Problem parse_problem(const std::string& text);
Problem load_problem(const std::string& path);

/// Accepts {"vertices": [...]} or a report carrying a "trajectory" array.
ClosedPolyline parse_trajectory(const std::string& text, int dim);
ClosedPolyline load_trajectory(const std::string& path, int dim);

/// Deterministic SVG of a planar body, a closed polyline, its bounce normals and the
/// normals of a non-fit certificate.  Requires d = 2.
std::string render_svg(const Polytope& k, const NormBody& t, const ClosedPolyline& q);

/// Runs the tool with argv-style arguments (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace billiards::cli
