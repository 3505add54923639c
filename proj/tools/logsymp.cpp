// Command-line front end: surfaces, classifications, verifications, periods, Hasse diagrams.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "logsymp/classification.hpp"
#include "logsymp/groupoids.hpp"
#include "logsymp/json_io.hpp"
#include "logsymp/multivector.hpp"
#include "logsymp/periods.hpp"
#include "logsymp/surface.hpp"

using namespace logsymp;
namespace fs = std::filesystem;

namespace {

enum Exit { Ok = 0, ValidationFailure = 1, InternalFailure = 2 };

struct Options {
  std::string input;
  std::string output;
  std::string mode;
  std::string format = "json";
  bool dot = false;
  long bound = 0;
  std::uint64_t seed = 0;
  std::optional<std::size_t> samples;
  std::optional<double> tol;
  std::optional<unsigned> resolution;
  std::string mesh;
  std::optional<double> t;
  bool flow = false;
  std::string curve;
  std::vector<double> at;
};

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError(path, "cannot open input file");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw SchemaError(path, std::string("not valid JSON: ") + e.what());
  }
}

// Reports land beside the input unless -o is given; "-" means stdout.
void emit(const Options& o, const std::string& text, const std::string& suffix) {
  std::string target = o.output;
  if (target.empty()) {
    if (o.input.empty()) {
      target = "-";
    } else {
      fs::path p(o.input);
      target = (p.parent_path() / (p.stem().string() + suffix)).string();
    }
  }
  if (target == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(target);
  if (!out) throw std::runtime_error("cannot write " + target);
  out << text;
  std::cout << "wrote " << target << "\n";
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

GraphMode graph_mode(const std::string& mode) {
  if (mode == "logtan") return GraphMode::LogTangent;
  if (mode == "logsymp-hausdorff") return GraphMode::LogSymplectic;
  throw SchemaError("--mode", "expected logtan or logsymp-hausdorff");
}

IntegrationPoset classify_graph(const GraphOfGroups& g, const Options& o, Json& validation) {
  const GraphMode mode = graph_mode(o.mode);
  if (o.bound < 1) throw SchemaError("--bound", "bound must be at least 1");
  auto report = validate_graph(g, mode);
  if (!report.valid()) {
    validation = report.violations;
    return {};
  }
  IntegrationPoset p = mode == GraphMode::LogTangent ? classify_logtan(g, o.bound) : classify_logsymp_hausdorff(g, o.bound);
  for (const auto& x : p.elements) {
    auto failed = audit_integration(g, mode, x);
    if (!failed.empty()) throw std::logic_error("emitted element " + x.key + " fails re-validation: " + failed.front());
  }
  return p;
}

std::string wanted_format(const Options& o, const std::string& fallback) {
  if (o.dot) return "dot";
  std::string f = o.format.empty() ? fallback : o.format;
  if (f != "json" && f != "dot") throw SchemaError("--format", "expected json or dot");
  return f;
}

int run_classify(const Options& o) {
  GraphOfGroups g = graph_from_json(read_json(o.input));
  Json violations;
  IntegrationPoset p = classify_graph(g, o, violations);
  if (!violations.is_null()) {
    emit(o, dump({{"valid", false}, {"violations", violations}}), ".report.json");
    return ValidationFailure;
  }
  if (wanted_format(o, "json") == "dot") {
    emit(o, poset_to_dot(p), ".dot");
  } else {
    Json j = poset_to_json(p);
    j["revalidated"] = true;
    emit(o, dump(j), ".report.json");
  }
  return Ok;
}

int run_classify_local(const Options& o) {
  LocalModel m = local_model_from_json(read_json(o.input));
  if (o.bound != 0) m.bound = o.bound;
  if (m.bound < 1) throw SchemaError("/bound", "bound must be at least 1");
  auto problems = validate_local(m);
  if (!problems.empty()) {
    emit(o, dump({{"valid", false}, {"violations", problems}}), ".report.json");
    return ValidationFailure;
  }
  IntegrationPoset p = classify_local(m);
  for (const auto& x : p.elements)
    if (!audit_local(m, x).empty()) throw std::logic_error("emitted element " + x.key + " fails re-validation");
  if (wanted_format(o, "json") == "dot") {
    emit(o, poset_to_dot(p), ".dot");
  } else {
    Json j = poset_to_json(p);
    j["case"] = to_string(m.local_case);
    j["revalidated"] = true;
    emit(o, dump(j), ".report.json");
  }
  return Ok;
}

int run_verify_mt(const Options& o) {
  Json in = read_json(o.input);
  if (!in.contains("graph")) throw SchemaError("/graph", "missing field");
  GraphOfGroups g = graph_from_json(in.at("graph"), "/graph");
  auto valid = validate_graph(g, GraphMode::LogSymplectic);
  if (!valid.valid()) {
    emit(o, dump({{"valid", false}, {"violations", valid.violations}}), ".report.json");
    return ValidationFailure;
  }
  if (!in.contains("family") || !in.at("family").is_object()) throw SchemaError("/family", "expected an object keyed by vertex id");
  std::map<std::string, MappingTorusSubgroup> family;
  for (const auto& [id, spec] : in.at("family").items())
    family.emplace(id, mt_subgroup_from_json(spec, g.vertex(id).group, "/family/" + id));
  MtVerification v = verify_integration_mt(g, family);
  SscReport ssc = ssc_hausdorff_check(g);
  Json witnesses = Json::array();
  for (const auto& w : ssc.witnesses)
    witnesses.push_back({{"component", w.component}, {"vertex", w.vertex}, {"generators", w.generators}});
  Json out = {{"accepted", v.accepted},
              {"report", v.report},
              {"sscHausdorff", {{"hausdorff", ssc.hausdorff}, {"witnesses", witnesses}}}};
  emit(o, dump(out), ".report.json");
  return v.accepted ? Ok : ValidationFailure;
}

int run_analyze_surface(const Options& o) {
  SurfaceModel m = surface_from_json(read_json(o.input));
  if (o.resolution) {
    m.resolution = *o.resolution;
    validate_surface_model(m);
  }
  PoissonGraphReport r = analyze_surface(m);
  if (!o.mesh.empty()) {
    std::ofstream mesh(o.mesh);
    if (!mesh) throw std::runtime_error("cannot write " + o.mesh);
    mesh << mesh_to_obj(r.decomposition);
  }
  emit(o, dump(report_to_json(r)), ".report.json");
  return r.transversality.ok && r.decomposition.stability.stable ? Ok : ValidationFailure;
}

int run_period(const Options& o) {
  Json out = Json::object();
  bool ok = true;
  if (o.t) {
    const double t = *o.t;
    if (!(t > 0 && t < 1)) throw SchemaError("--t", "expected 0 < t < 1");
    double a = modular_period_elliptic(t), s = modular_period_series(t);
    double rel = std::abs(a - s) / a;
    out["t"] = t;
    out["agm"] = a;
    out["series"] = s;
    out["relativeDifference"] = rel;
    out["agree"] = rel <= 1e-12;
    ok = ok && rel <= 1e-12;
    if (o.flow) {
      std::ostringstream expr;
      expr.precision(17);
      expr << "x*(x-1)*(x-" << t << ") - y^2";
      const std::vector<std::string> xy{"x", "y"};
      Polynomial f = parse_polynomial(expr.str(), xy);
      double x0 = t / 2, y0 = std::sqrt(x0 * (x0 - 1) * (x0 - t));
      FlowPeriod fp = modular_period_flow(f, {x0, y0});
      out["flow"] = {{"closed", fp.outcome == FlowOutcome::Closed}, {"period", fp.period}, {"steps", fp.steps},
                     {"relativeDifference", std::abs(fp.period - a) / a}};
      ok = ok && fp.outcome == FlowOutcome::Closed && std::abs(fp.period - a) <= 1e-6 * a;
    }
  } else if (!o.curve.empty()) {
    if (o.at.size() != 2) throw SchemaError("--at", "expected a start point x,y");
    const std::vector<std::string> xy{"x", "y"};
    Polynomial f = parse_polynomial(o.curve, xy);
    FlowPeriod fp = modular_period_flow(f, {o.at[0], o.at[1]});
    out["curve"] = o.curve;
    out["closed"] = fp.outcome == FlowOutcome::Closed;
    out["period"] = fp.outcome == FlowOutcome::Closed ? Json(fp.period) : Json(nullptr);
    out["steps"] = fp.steps;
    if (!fp.note.empty()) out["note"] = fp.note;
  } else {
    throw SchemaError("period", "give --t or --curve with --at");
  }
  emit(o, dump(out), ".report.json");
  return ok ? Ok : ValidationFailure;
}

Json run_negative_controls(std::size_t samples, double tol, std::uint64_t seed) {
  Json out = Json::object();
  auto lp = make_model("log_pair", {{"n", 2}});
  lp.multiply = [](const Vec& g, const Vec& h) { return Vec{g[0] + h[0], g[1], g[2], h[3]}; };
  out["corrupted multiplication"] = !check_groupoid_axioms(lp, samples, tol, seed).passed;
  auto sp = make_model("symp_pair_2d");
  out["coordinate frame on symp_pair_2d"] =
      !anchor_frame_check(sp, coordinate_frame(2), default_anchor_objects(sp, 0), tol).passed;
  TwoForm w = derive_symplectic_form();
  FormField flipped = [w](const Vec& z) {
    Eigen::MatrixXd m = w.evaluate(z);
    m(0, 3) = -m(0, 3);
    m(3, 0) = -m(3, 0);
    return m;
  };
  out["flipped d lambda ^ d y"] = !multiplicativity_check(sp, flipped, std::min<std::size_t>(samples, 1000), tol, seed).passed;
  return out;
}

int run_verify_model(const Options& o) {
  Json spec = read_json(o.input);
  if (!spec.contains("kind") || !spec.at("kind").is_string()) throw SchemaError("/kind", "missing model kind");
  const std::string kind = spec.at("kind").get<std::string>();
  Json params = spec.value("params", Json::object());
  ChartGroupoidModel m = [&] {
    try {
      return make_model(kind, params);
    } catch (const GlueError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw SchemaError("/kind", e.what());
    }
  }();
  std::size_t samples = o.samples ? *o.samples : spec.value("samples", std::size_t{10000});
  double tol = o.tol ? *o.tol : spec.value("tol", 1e-8);
  std::vector<std::string> checks = spec.value("checks", std::vector<std::string>{"axioms", "anchor", "multiplicative", "blowdown"});
  const std::set<std::string> known{"axioms", "anchor", "multiplicative", "poisson-sign", "blowdown", "poisson-map",
                                    "negative-controls"};

  Json results = Json::object();
  bool ok = true;
  auto put = [&](const std::string& name, const CheckReport& r) {
    results[name] = to_json(r);
    ok = ok && r.passed;
  };
  auto skip = [&](const std::string& name, const std::string& why) {
    results[name] = {{"applicable", false}, {"note", why}};
  };
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const std::string& c = checks[i];
    if (!known.count(c)) throw SchemaError("/checks/" + std::to_string(i), "unknown check '" + c + "'");
    if (c == "axioms") {
      put(c, check_groupoid_axioms(m, samples, tol, o.seed));
    } else if (c == "anchor") {
      auto frame = expected_anchor_frame(m);
      if (!frame) {
        skip(c, "no reference frame for this kind");
        continue;
      }
      put(c, anchor_frame_check(m, *frame, default_anchor_objects(m, samples, o.seed), tol));
    } else if (c == "multiplicative" || c == "poisson-sign") {
      auto w = model_symplectic_form(m);
      if (!w) {
        skip(c, "no symplectic form for this kind");
        continue;
      }
      FormField field = [w = *w](const Vec& z) { return w.evaluate(z); };
      if (c == "multiplicative") {
        CheckReport r = multiplicativity_check(m, field, samples, tol, o.seed);
        r.details["closed"] = w->is_closed();
        r.passed = r.passed && w->is_closed();
        put(c, r);
      } else if (m.object_dim == 2 && m.kind == "symp_pair_2d") {
        put(c, poisson_sign_check(m, field, samples, tol, o.seed));
      } else {
        skip(c, "sign check is defined for symp_pair_2d");
      }
    } else if (c == "blowdown") {
      if (kind == "symp_pair_2d") {
        auto lp = make_model("log_pair", {{"n", 2}});
        auto pr = make_model("pair", {{"n", 2}});
        put("blowdown symp_pair_2d -> log_pair", blowdown_check(m, lp, symp_to_log_pair(), samples, tol, o.seed));
        put("blowdown log_pair -> pair", blowdown_check(lp, pr, log_pair_to_pair(), samples, tol, o.seed));
        put("blowdown symp_pair_2d -> pair", blowdown_check(m, pr, symp_to_pair(), samples, tol, o.seed));
      } else if (kind == "log_pair" && m.object_dim == 2) {
        put("blowdown log_pair -> pair", blowdown_check(m, make_model("pair", {{"n", 2}}), log_pair_to_pair(), samples,
                                                        tol, o.seed));
      } else {
        skip(c, "no blow-down map for this kind");
      }
    } else if (c == "poisson-map") {
      if (kind != "symp_pair_2d") {
        skip(c, "defined for symp_pair_2d -> pair");
        continue;
      }
      TwoForm w = derive_symplectic_form();
      FormField field = [w](const Vec& z) { return w.evaluate(z); };
      put(c, poisson_map_check(m, field, symp_to_pair(), pair_blowdown_bivector, samples, tol, o.seed));
    } else if (c == "negative-controls") {
      Json controls = run_negative_controls(samples, tol, o.seed);
      bool all = true;
      for (const auto& [name, failed] : controls.items()) all = all && failed.get<bool>();
      results[c] = {{"passed", all}, {"failedAsDesigned", controls}};
      ok = ok && all;
    }
  }
  Json out = {{"kind", m.kind}, {"params", m.params}, {"samples", samples}, {"tol", tol},
              {"seed", o.seed}, {"passed", ok},       {"checks", results}};
  emit(o, dump(out), ".report.json");
  return ok ? Ok : ValidationFailure;
}

// Accepts a poset ({"elements":[...], "covers" or "leq": [[a,b],...]}) or a graph of groups.
int run_hasse(const Options& o) {
  Json in = read_json(o.input);
  std::vector<std::string> keys;
  std::vector<std::pair<std::size_t, std::size_t>> covers;
  if (in.contains("vertices")) {
    Json violations;
    IntegrationPoset p = classify_graph(graph_from_json(in), o, violations);
    if (!violations.is_null()) {
      std::cerr << violations.dump() << "\n";
      return ValidationFailure;
    }
    for (const auto& x : p.elements) keys.push_back(x.key);
    covers = p.covers;
  } else {
    if (!in.contains("elements") || !in.at("elements").is_array()) throw SchemaError("/elements", "expected an array");
    const Json& els = in.at("elements");
    for (std::size_t i = 0; i < els.size(); ++i) {
      if (els[i].is_string())
        keys.push_back(els[i].get<std::string>());
      else if (els[i].is_object() && els[i].contains("key") && els[i].at("key").is_string())
        keys.push_back(els[i].at("key").get<std::string>());
      else
        throw SchemaError("/elements/" + std::to_string(i), "expected a key string or an object with a key");
    }
    if (std::set<std::string>(keys.begin(), keys.end()).size() != keys.size())
      throw SchemaError("/elements", "element keys must be distinct");
    const std::string rel = in.contains("leq") ? "leq" : "covers";
    if (!in.contains(rel) || !in.at(rel).is_array()) throw SchemaError("/" + rel, "expected an array of pairs");
    const std::size_t n = keys.size();
    std::vector<std::vector<bool>> leq(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) leq[i][i] = true;
    const Json& pairs = in.at(rel);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const std::string p = "/" + rel + "/" + std::to_string(i);
      if (!pairs[i].is_array() || pairs[i].size() != 2 || !pairs[i][0].is_number_unsigned() ||
          !pairs[i][1].is_number_unsigned())
        throw SchemaError(p, "expected a pair of element indices");
      auto a = pairs[i][0].get<std::size_t>(), b = pairs[i][1].get<std::size_t>();
      if (a >= n || b >= n) throw SchemaError(p, "index out of range");
      leq[a][b] = true;
    }
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        if (leq[i][k])
          for (std::size_t j = 0; j < n; ++j)
            if (leq[k][j]) leq[i][j] = true;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (leq[i][j] && leq[j][i]) {
          std::cerr << "not a partial order: " << keys[i] << " and " << keys[j] << " lie on a cycle\n";
          return ValidationFailure;
        }
    covers = poset_hasse(n, [&](std::size_t a, std::size_t b) { return leq[a][b]; });
  }
  if (wanted_format(o, "dot") == "dot") {
    emit(o, poset_to_dot(keys, covers), ".dot");
  } else {
    Json c = Json::array();
    for (auto [a, b] : covers) c.push_back({a, b});
    emit(o, dump({{"elements", keys}, {"covers", c}}), ".report.json");
  }
  return Ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Log symplectic graphs, integrations and groupoid models"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--seed", o.seed, "random seed for every sampled check")->default_val(0);
  app.add_option("-o,--output", o.output, "report path (\"-\" for stdout)");

  auto with_input = [&](CLI::App* sub) { sub->add_option("input", o.input, "input JSON")->required()->check(CLI::ExistingFile); };
  auto with_format = [&](CLI::App* sub, const std::string& def) {
    o.format = "";
    sub->add_option("--format", o.format, "json or dot (default " + def + ")");
  };

  auto* surface = app.add_subcommand("analyze-surface", "graph of a degeneracy curve on RP2 or R2");
  with_input(surface);
  surface->add_option("--resolution", o.resolution, "mesh refinement level");
  surface->add_option("--mesh", o.mesh, "write the mesh as Wavefront OBJ");

  auto* classify = app.add_subcommand("classify", "integrations of a graph of groups");
  with_input(classify);
  classify->add_option("--mode", o.mode, "logtan or logsymp-hausdorff")->required();
  classify->add_option("--bound", o.bound, "largest subgroup index")->required();
  with_format(classify, "json");

  auto* local = app.add_subcommand("classify-local", "integrations near one degeneracy component");
  with_input(local);
  local->add_option("--bound", o.bound, "overrides the bound in the input");
  with_format(local, "json");

  auto* mt = app.add_subcommand("verify-mt", "check a mapping-torus subgroup family");
  with_input(mt);

  auto* model = app.add_subcommand("verify-model", "sampled checks on a groupoid model");
  with_input(model);
  model->add_option("--samples", o.samples, "overrides the sample count");
  model->add_option("--tol", o.tol, "overrides the tolerance");

  auto* period = app.add_subcommand("period", "modular period of the elliptic family or of a curve");
  period->add_option("--t", o.t, "parameter of y^2 = x(x-1)(x-t)");
  period->add_flag("--flow", o.flow, "also integrate the modular vector field");
  period->add_option("--curve", o.curve, "polynomial f(x, y)");
  period->add_option("--at", o.at, "start point near the curve")->delimiter(',')->expected(2);

  auto* hasse = app.add_subcommand("hasse", "Hasse diagram of a poset or of a classification");
  with_input(hasse);
  hasse->add_flag("--dot", o.dot, "DOT output (the default)");
  hasse->add_option("--mode", o.mode, "classification mode when the input is a graph");
  hasse->add_option("--bound", o.bound, "classification bound when the input is a graph");
  with_format(hasse, "dot");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return ValidationFailure;
  }

  try {
    if (*surface) return run_analyze_surface(o);
    if (*classify) return run_classify(o);
    if (*local) return run_classify_local(o);
    if (*mt) return run_verify_mt(o);
    if (*model) return run_verify_model(o);
    if (*period) return run_period(o);
    if (*hasse) return run_hasse(o);
  } catch (const SchemaError& e) {
    std::cerr << "schema violation at " << e.what() << "\n";
    return ValidationFailure;
  } catch (const NotLiftable& e) {
    std::cerr << "internal assertion: " << e.what() << "\n";
    return InternalFailure;
  } catch (const GlueError& e) {
    std::cerr << "internal assertion: " << e.what() << "\n";
    return InternalFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return ValidationFailure;
  } catch (const std::exception& e) {
    std::cerr << "internal assertion: " << e.what() << "\n";
    return InternalFailure;
  }
  return InternalFailure;
}
