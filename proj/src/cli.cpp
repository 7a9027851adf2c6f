#include "billiards/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "billiards/cones.hpp"
#include "billiards/containment.hpp"
#include "billiards/solver.hpp"

namespace billiards::cli {

using json = nlohmann::json;

namespace {

std::string index_path(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

const json& member(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw ParseError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ParseError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ParseError(path, "expected a finite number");
  return v;
}

std::vector<double> numbers(const json& j, const std::string& path, int dim) {
  if (!j.is_array()) throw ParseError(path, "expected an array of " + std::to_string(dim) + " numbers");
  if (static_cast<int>(j.size()) != dim)
    throw ParseError(path, "expected " + std::to_string(dim) + " entries, got " + std::to_string(j.size()));
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], index_path(path, i)));
  return out;
}

const json& array(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ParseError(path, "expected a non-empty array");
  return j;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("", e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("", "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Polytope parse_body(const json& b, int d) {
  const json& type = member(b, "type", "body");
  if (type == "hrep") {
    const json& hs = array(member(b, "halfspaces", "body"), "body.halfspaces");
    std::vector<Halfspace> out;
    for (std::size_t i = 0; i < hs.size(); ++i) {
      const std::string p = index_path("body.halfspaces", i);
      out.push_back({Covector(numbers(member(hs[i], "normal", p), p + ".normal", d)),
                     number(member(hs[i], "offset", p), p + ".offset")});
    }
    return Polytope::from_hrep(std::move(out));
  }
  if (type == "vrep") {
    const json& vs = array(member(b, "vertices", "body"), "body.vertices");
    std::vector<Vector> out;
    for (std::size_t i = 0; i < vs.size(); ++i) out.emplace_back(numbers(vs[i], index_path("body.vertices", i), d));
    return Polytope::from_vrep(out);
  }
  throw ParseError("body.type", "expected \"hrep\" or \"vrep\"");
}

NormBody parse_norm(const json& n, int d) {
  const json& type = member(n, "type", "norm");
  if (type == "euclidean") return NormBody::euclidean(d);
  if (type == "ellipsoid") {
    const json& rows = member(n, "matrix", "norm");
    if (!rows.is_array() || static_cast<int>(rows.size()) != d)
      throw ParseError("norm.matrix", "expected " + std::to_string(d) + " rows");
    Matrix m(d, d);
    for (int r = 0; r < d; ++r) {
      const auto row = numbers(rows[static_cast<std::size_t>(r)], index_path("norm.matrix", static_cast<std::size_t>(r)), d);
      for (int c = 0; c < d; ++c) m(r, c) = row[static_cast<std::size_t>(c)];
    }
    Covector center = Covector::zero(d);
    if (n.contains("center")) center = Covector(numbers(n["center"], "norm.center", d));
    return NormBody::ellipsoid(m, center);
  }
  if (type == "dual-polytope") {
    const json& vs = array(member(n, "vertices", "norm"), "norm.vertices");
    std::vector<Covector> out;
    for (std::size_t i = 0; i < vs.size(); ++i) out.emplace_back(numbers(vs[i], index_path("norm.vertices", i), d));
    return NormBody::dual_polytope(std::move(out));
  }
  throw ParseError("norm.type", "expected \"euclidean\", \"ellipsoid\" or \"dual-polytope\"");
}

json to_json(const Vector& v) { return v.to_std(); }
json to_json(const Covector& v) { return v.to_std(); }

json to_json(const ClosedPolyline& q) {
  json a = json::array();
  for (const auto& v : q.vertices) a.push_back(to_json(v));
  return a;
}

json to_json(const TrajectoryReport& r) {
  json bounces = json::array();
  for (const auto& b : r.bounces) {
    bounces.push_back({{"point", to_json(b.point)},
                       {"on_boundary", b.on_boundary},
                       {"active_facets", b.active_facets},
                       {"momentum_in", to_json(b.momentum_in)},
                       {"momentum_out", to_json(b.momentum_out)},
                       {"normal", to_json(b.normal)},
                       {"lambda", b.lambda},
                       {"residual", b.law_residual},
                       {"classical", b.classical}});
  }
  return bounces;
}

json to_json(const NonFitCertificate& c) {
  json entries = json::array();
  for (const auto& e : c.entries) {
    entries.push_back({{"point", e.point},
                       {"facet", e.facet ? json(*e.facet) : json(nullptr)},
                       {"normal", to_json(e.normal)},
                       {"offset", e.offset},
                       {"weight", e.weight}});
  }
  return {{"entries", entries}, {"imbalance", c.imbalance()}};
}

std::string norm_name(const NormBody& t) {
  if (t.is_euclidean()) return "euclidean";
  return t.is_smooth() ? "ellipsoid" : "dual-polytope";
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string fmt_fixed(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

std::string fmt(const Vector& v) {
  std::string s = "(";
  for (int i = 0; i < v.dim(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s + ")";
}

struct Settings {
  std::string format = "json";
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  double grid = 1e-3;
  bool oracle = false;
  std::string output;
  std::string problem;
  std::string trajectory;
};

void emit(std::ostream& out, const json& report, const std::string& text, const Settings& s) {
  if (s.format == "text")
    out << text;
  else
    out << report.dump(2) << "\n";
}

int cmd_xi(const Problem& p, const Settings& s, std::ostream& out) {
  const SolveResult r = shortest_trajectory(p.body, p.norm);
  json residuals = json::array();
  for (const auto& b : r.report.bounces) residuals.push_back(b.law_residual);
  json report = {{"schema", 1},
                 {"command", "xi"},
                 {"dimension", p.body.dim()},
                 {"norm", norm_name(p.norm)},
                 {"xi", r.xi},
                 {"bounces", r.trajectory.size()},
                 {"classical", r.report.classical},
                 {"trajectory", to_json(r.trajectory)},
                 {"sequence", r.sequence.indices},
                 {"sequences_tried", r.sequences_tried},
                 {"runner_up_gap", std::isfinite(r.runner_up_gap) ? json(r.runner_up_gap) : json(nullptr)},
                 {"certificate", to_json(r.certificate)},
                 {"residuals", residuals},
                 {"bounce_reports", to_json(r.report)}};
  std::string text = "xi = " + fmt(r.xi) + "\nbounces = " + std::to_string(r.trajectory.size()) +
                     "\nclassical = " + (r.report.classical ? "true" : "false") + "\ntrajectory =";
  for (const auto& v : r.trajectory.vertices) text += " " + fmt(v);
  text += "\nmax residual = " + fmt(r.report.max_residual()) + "\n";
  if (s.oracle) {
    const BruteForceResult b = brute_force_xi(p.body, p.norm, s.grid);
    report["oracle"] = {{"xi", b.xi},
                        {"grid", s.grid},
                        {"difference", r.xi - b.xi},
                        {"resolution_warning", b.resolution_warning},
                        {"polyline", to_json(b.polyline)}};
    text += "oracle xi = " + fmt(b.xi) + " (grid " + fmt(s.grid) + ", difference " + fmt(r.xi - b.xi) + ")\n";
    if (b.resolution_warning) text += "oracle warning: resolution too coarse\n";
  }
  emit(out, report, text, s);
  return kOk;
}

int cmd_acuteness(const Problem& p, const Settings& s, std::ostream& out) {
  const AcutenessReport r = is_acute_body(p.body);
  const std::uint64_t seed = s.seed.value_or(p.options.seed.value_or(0));
  json faces = json::array();
  json offending = json::array();
  std::string text = std::string("acute = ") + (r.acute ? "true" : "false") + "\n";
  for (std::size_t i = 0; i < r.faces.size(); ++i) {
    const FaceVerdict& f = r.faces[i];
    json face = {{"dimension", f.face.dim},
                 {"vertices", f.face.vertices},
                 {"facets", f.face.facets},
                 {"representative", to_json(f.representative)},
                 {"lineality_dim", f.tangent.lineality_dim()},
                 {"spherical_diameter", f.tangent.spherical_diameter},
                 {"acute", f.acute}};
    if (!f.acute) {
      const ProbeVerdict v = weak_acuteness_probe(p.body, f.representative, 256, 256, seed);
      face["weak_probe"] = v == ProbeVerdict::Confirmed ? "confirmed" : "unresolved";
      offending.push_back(i);
      text += "not acute: face " + std::to_string(i) + " (dimension " + std::to_string(f.face.dim) + ", spherical diameter " +
              fmt(f.tangent.spherical_diameter) + ")\n";
    }
    faces.push_back(std::move(face));
  }
  json report = {{"schema", 1},         {"command", "acuteness"}, {"dimension", p.body.dim()},
                 {"acute", r.acute},    {"faces", faces},         {"offending_faces", offending}};
  if (p.body.num_facets() == static_cast<std::size_t>(p.body.dim()) + 1) {
    const auto angles = simplex_dihedral_angles(p.body);
    report["dihedral_angles"] = angles;
    text += "dihedral angles =";
    for (double a : angles) text += " " + fmt(a);
    text += "\n";
  }
  emit(out, report, text, s);
  return kOk;
}

int cmd_verify(const Problem& p, const ClosedPolyline& q, const Settings& s, std::ostream& out) {
  const double tol = s.tol.value_or(p.options.tol.value_or(tol::boundary));
  const TrajectoryReport r = verify(p.body, p.norm, q, tol, std::max(tol, tol::law));
  json report = {{"schema", 1},
                 {"command", "verify"},
                 {"valid", r.valid},
                 {"classical", r.classical},
                 {"length", r.length},
                 {"trajectory", to_json(q)},
                 {"bounces", to_json(r)}};
  std::string text = std::string("valid = ") + (r.valid ? "true" : "false") + "\nclassical = " +
                     (r.classical ? "true" : "false") + "\nlength = " + fmt(r.length) + "\n";
  for (std::size_t i = 0; i < r.bounces.size(); ++i) {
    const auto& b = r.bounces[i];
    text += "bounce " + std::to_string(i) + " " + fmt(b.point) + (b.on_boundary ? "" : " OFF BOUNDARY") +
            " residual " + fmt(b.law_residual) + (b.classical ? " classical" : "") + "\n";
  }
  emit(out, report, text, s);
  return r.valid ? kOk : kInvalidTrajectory;
}

int cmd_render(const Problem& p, const std::optional<ClosedPolyline>& q, const Settings& s, std::ostream& out,
               std::ostream& err) {
  if (p.body.dim() != 2) {
    err << "render: only planar bodies (dimension 2) can be rendered\n";
    return kUnsupported;
  }
  if (s.output.empty()) {
    err << "render: an output path (-o) is required\n";
    return kParseError;
  }
  const std::filesystem::path path(s.output);
  const auto dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  if (!std::filesystem::is_directory(dir)) {
    err << "render: output directory does not exist: " << dir.string() << "\n";
    return kMissingOutputDir;
  }
  const ClosedPolyline traj = q ? *q : shortest_trajectory(p.body, p.norm).trajectory;
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    err << "render: cannot write " << s.output << "\n";
    return kMissingOutputDir;
  }
  f << render_svg(p.body, p.norm, traj);
  emit(out, json{{"schema", 1}, {"command", "render"}, {"output", s.output}}, "wrote " + s.output + "\n", s);
  return kOk;
}

}  // namespace

Problem parse_problem(const std::string& text) {
  const json doc = parse_json(text);
  if (!doc.is_object()) throw ParseError("", "expected a JSON object");
  if (doc.contains("schema") && doc["schema"] != 1) throw ParseError("schema", "unsupported schema version");
  const json& dj = member(doc, "dimension", "");
  if (!dj.is_number_integer() || dj.get<int>() < 2) throw ParseError("dimension", "expected an integer >= 2");
  const int d = dj.get<int>();
  Options opt;
  if (doc.contains("options")) {
    const json& o = doc["options"];
    if (!o.is_object()) throw ParseError("options", "expected an object");
    if (o.contains("tol")) {
      opt.tol = number(o["tol"], "options.tol");
      if (!(*opt.tol > 0.0)) throw ParseError("options.tol", "expected a positive number");
    }
    if (o.contains("seed")) {
      if (!o["seed"].is_number_unsigned()) throw ParseError("options.seed", "expected a non-negative integer");
      opt.seed = o["seed"].get<std::uint64_t>();
    }
  }
  Polytope body = parse_body(member(doc, "body", ""), d);
  NormBody norm = doc.contains("norm") ? parse_norm(doc["norm"], d) : NormBody::euclidean(d);
  return Problem{std::move(body), std::move(norm), opt};
}

Problem load_problem(const std::string& path) { return parse_problem(read_file(path)); }

ClosedPolyline parse_trajectory(const std::string& text, int dim) {
  const json doc = parse_json(text);
  std::string key;
  if (doc.is_object() && doc.contains("vertices"))
    key = "vertices";
  else if (doc.is_object() && doc.contains("trajectory"))
    key = "trajectory";
  else
    throw ParseError("vertices", "missing");
  const json& vs = doc[key];
  if (!vs.is_array() || vs.size() < 2) throw ParseError(key, "expected at least two vertices");
  ClosedPolyline q;
  for (std::size_t i = 0; i < vs.size(); ++i) q.vertices.emplace_back(numbers(vs[i], index_path(key, i), dim));
  return q;
}

ClosedPolyline load_trajectory(const std::string& path, int dim) { return parse_trajectory(read_file(path), dim); }

std::string render_svg(const Polytope& k, const NormBody& t, const ClosedPolyline& q) {
  if (k.dim() != 2) throw PreconditionError("render_svg: only planar bodies can be rendered");
  const double arrow = 0.15 * k.diameter();

  struct Arrow {
    Vector from, to;
  };
  std::vector<Arrow> bounce, cert;
  if (t.is_smooth() && q.size() >= 2) {
    for (const auto& b : verify(k, t, q).bounces)
      if (b.lambda > 0.0) bounce.push_back({b.point, b.point + arrow * as_vector(b.normal)});
  }
  if (q.size() >= 2) {
    const FitResult fit = fits_into_interior(k, q.vertices);
    if (!fit.fits)
      for (const auto& e : fit.certificate.entries) {
        const Vector& at = q.vertices[e.point];
        cert.push_back({at, at + 0.7 * arrow * as_vector(e.normal)});
      }
  }

  // Bounding box of everything drawn.
  double lo[2] = {1e300, 1e300}, hi[2] = {-1e300, -1e300};
  auto grow = [&](const Vector& v) {
    for (int i = 0; i < 2; ++i) {
      lo[i] = std::min(lo[i], v[i]);
      hi[i] = std::max(hi[i], v[i]);
    }
  };
  for (const auto& v : k.vertices()) grow(v);
  for (const auto& v : q.vertices) grow(v);
  for (const auto& a : bounce) grow(a.to);
  for (const auto& a : cert) grow(a.to);
  const double span = std::max({hi[0] - lo[0], hi[1] - lo[1], 1e-12});
  const double size = 600.0, pad = 30.0, s = (size - 2 * pad) / span;
  const double height = (hi[1] - lo[1]) * s + 2 * pad, width = (hi[0] - lo[0]) * s + 2 * pad;
  auto X = [&](const Vector& v) { return fmt_fixed((v[0] - lo[0]) * s + pad); };
  auto Y = [&](const Vector& v) { return fmt_fixed((hi[1] - v[1]) * s + pad); };

  std::vector<std::pair<double, Vector>> ring;
  const Vector c = k.chebyshev_center();
  for (const auto& v : k.vertices()) ring.emplace_back(std::atan2(v[1] - c[1], v[0] - c[0]), v);
  std::sort(ring.begin(), ring.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt_fixed(width) << "\" height=\"" << fmt_fixed(height)
    << "\" viewBox=\"0 0 " << fmt_fixed(width) << " " << fmt_fixed(height) << "\">\n";
  o << "<defs><marker id=\"head\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"6\" markerHeight=\"6\" "
       "orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\"/></marker></defs>\n";
  o << "<polygon id=\"body\" fill=\"#eef2f7\" stroke=\"#334\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < ring.size(); ++i) o << (i ? " " : "") << X(ring[i].second) << "," << Y(ring[i].second);
  o << "\"/>\n";
  o << "<polygon id=\"trajectory\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < q.size(); ++i) o << (i ? " " : "") << X(q.vertices[i]) << "," << Y(q.vertices[i]);
  o << "\"/>\n";
  auto group = [&](const char* id, const char* colour, const char* dash, const std::vector<Arrow>& as) {
    o << "<g id=\"" << id << "\" stroke=\"" << colour << "\" stroke-width=\"1.5\"" << dash << ">\n";
    for (const auto& a : as)
      o << "<line x1=\"" << X(a.from) << "\" y1=\"" << Y(a.from) << "\" x2=\"" << X(a.to) << "\" y2=\"" << Y(a.to)
        << "\" marker-end=\"url(#head)\"/>\n";
    o << "</g>\n";
  };
  group("bounce-normals", "#1f618d", "", bounce);
  group("certificate-normals", "#7d3c98", " stroke-dasharray=\"4 3\"", cert);
  for (const auto& v : q.vertices) o << "<circle cx=\"" << X(v) << "\" cy=\"" << Y(v) << "\" r=\"3\" fill=\"#c0392b\"/>\n";
  o << "</svg>\n";
  return o.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Settings s;
  CLI::App app{"Shortest closed billiard trajectories in convex polytopes", args.empty() ? "billiards" : args[0]};
  app.add_option("--tol", s.tol, "Boundary / reflection-law tolerance for verification");
  app.add_option("--seed", s.seed, "Seed for the sampling probe");
  app.add_option("--grid", s.grid, "Resolution of the brute-force oracle")->check(CLI::PositiveNumber);
  app.add_flag("--oracle", s.oracle, "Also run the brute-force oracle");
  app.add_option("--format", s.format, "Report format")->check(CLI::IsMember({"json", "text"}));
  app.add_option("-o,--output", s.output, "Output path (render)");
  app.require_subcommand(1);

  auto* xi = app.add_subcommand("xi", "Shortest closed trajectory length and certificate");
  xi->add_option("problem", s.problem, "Problem file")->required();
  auto* ac = app.add_subcommand("acuteness", "Acuteness condition per face");
  ac->add_option("problem", s.problem, "Problem file")->required();
  auto* ve = app.add_subcommand("verify", "Check the reflection law along a closed polyline");
  ve->add_option("problem", s.problem, "Problem file")->required();
  ve->add_option("trajectory", s.trajectory, "Trajectory file")->required();
  auto* re = app.add_subcommand("render", "SVG of a planar body and trajectory");
  re->add_option("problem", s.problem, "Problem file")->required();
  re->add_option("trajectory", s.trajectory, "Trajectory file (default: the shortest trajectory)");
  for (auto* sub : {xi, ac, ve, re}) sub->fallthrough();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("billiards");
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kParseError;
  }

  std::optional<Problem> problem;
  try {
    problem.emplace(load_problem(s.problem));
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kParseError;
  } catch (const Error& e) {
    err << "invalid body: " << e.what() << "\n";
    return kInvalidBody;
  }
  std::optional<ClosedPolyline> traj;
  if (!s.trajectory.empty()) {
    try {
      traj = load_trajectory(s.trajectory, problem->body.dim());
    } catch (const ParseError& e) {
      err << "parse error: " << e.what() << "\n";
      return kParseError;
    }
  }

  try {
    if (xi->parsed()) return cmd_xi(*problem, s, out);
    if (ac->parsed()) return cmd_acuteness(*problem, s, out);
    if (ve->parsed()) return cmd_verify(*problem, *traj, s, out);
    return cmd_render(*problem, traj, s, out, err);
  } catch (const VerificationError& e) {
    err << "verification failure: " << e.what() << "\n";
    return kVerificationFailure;
  } catch (const PreconditionError& e) {
    err << "unsupported input: " << e.what() << "\n";
    return s.trajectory.empty() ? kUnsupported : kInvalidTrajectory;
  } catch (const Error& e) {
    err << "internal error: " << e.what() << "\n";
    return kVerificationFailure;
  }
}

}  // namespace billiards::cli
