#include "entangle/cli.hpp"

#include "entangle/io.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace entangle::cli {

namespace {

using io::Json;

struct MeasureFlags {
  std::string name;
  double p = 0.0;
  int k = 0;
  std::string ranks;
  std::string logBase = "2";
  CLI::Option* pOpt = nullptr;
  CLI::Option* kOpt = nullptr;
  CLI::Option* ranksOpt = nullptr;

  void attach(CLI::App* app, bool required = true) {
    auto* m = app->add_option("--measure", name, "Measure: e, p-number, entropy, negativity, concurrence, geometric, nu");
    if (required) {
      m->required();
    }
    pOpt = app->add_option("--p", p, "Order p > 1 (p-number, nu). Default: none");
    kOpt = app->add_option("--k", k, "Concurrence index 1 <= k <= min(dimA, dimB). Default: none");
    ranksOpt = app->add_option("--ranks", ranks, "Projector ranks for geometric, comma separated (e.g. 1,1). Default: none");
    app->add_option("--log-base", logBase, "Entropy log base")->check(CLI::IsMember({"2", "e"}))->capture_default_str();
  }

  MeasureSpec spec() const {
    MeasureSpec s;
    s.kind = parse_measure_kind(name);
    if (pOpt->count() > 0) {
      s.p = p;
    }
    if (kOpt->count() > 0) {
      s.k = k;
    }
    if (ranksOpt->count() > 0) {
      std::stringstream ss(ranks);
      std::string item;
      while (std::getline(ss, item, ',')) {
        try {
          std::size_t used = 0;
          const int r = std::stoi(item, &used);
          if (used != item.size()) {
            throw std::invalid_argument(item);
          }
          s.ranks.push_back(r);
        } catch (const std::exception&) {
          throw InvalidParameter("--ranks: '" + item + "' is not an integer");
        }
      }
    }
    s.logBase = logBase == "e" ? LogBase::E : LogBase::Two;
    return s;
  }
};

struct RoofFlags {
  int m = 0;
  int restarts = 32;
  std::uint64_t seed = 0;
  double tol = 1e-9;
  int maxIters = 2000;
  std::string direction = "min";
  int threads = 1;
  CLI::Option* mOpt = nullptr;

  void attach(CLI::App* app, bool withDirection) {
    mOpt = app->add_option("--m", m, "Ensemble size, rank <= m <= rank^2. Default: rank^2");
    app->add_option("--restarts", restarts, "Independent random restarts")->capture_default_str();
    app->add_option("--seed", seed, "Seed for the restart isometries")->capture_default_str();
    app->add_option("--tol", tol, "Stop when the objective improves by less than this over 20 iterations")
        ->capture_default_str();
    app->add_option("--max-iters", maxIters, "Iteration cap per restart")->capture_default_str();
    app->add_option("--threads", threads, "Worker threads for restarts (0 = all cores); does not change results")
        ->capture_default_str();
    if (withDirection) {
      app->add_option("--direction", direction, "min = convex roof, max = concave roof")
          ->check(CLI::IsMember({"min", "max"}))
          ->capture_default_str();
    }
  }

  RoofOptions options() const {
    RoofOptions o;
    if (mOpt->count() > 0) {
      o.ensembleSize = m;
    }
    o.restarts = restarts;
    o.seed = seed;
    o.tol = tol;
    o.maxIters = maxIters;
    o.threads = threads;
    return o;
  }

  Direction dir() const { return direction == "max" ? Direction::Maximize : Direction::Minimize; }
};

Json spec_json(const MeasureSpec& s) {
  Json j{{"name", s.name()}, {"p", nullptr}, {"k", nullptr}, {"ranks", nullptr}, {"log_base", nullptr}};
  if (s.p) j["p"] = *s.p;
  if (s.k) j["k"] = *s.k;
  if (!s.ranks.empty()) j["ranks"] = s.ranks;
  if (s.kind == MeasureKind::EntanglementEntropy) j["log_base"] = s.logBase == LogBase::E ? "e" : "2";
  return j;
}

Json roof_config_json(const RoofOptions& o, std::size_t m, Direction dir) {
  return Json{{"m", m},
              {"restarts", o.restarts},
              {"seed", o.seed},
              {"tol", o.tol},
              {"max_iters", o.maxIters},
              {"fd_step", o.fdStep},
              {"stall_window", o.stallWindow},
              {"direction", dir == Direction::Minimize ? "min" : "max"}};
}

Json ensemble_json(const Ensemble& e) {
  Json states = Json::array();
  for (const auto& s : e.states) {
    states.push_back(io::to_json(s.amplitudes()));
  }
  return Json{{"weights", io::to_json(e.weights)}, {"states", states}};
}

Json roof_result_json(const RoofResult& r, const DensityOperator& rho) {
  Json restarts = Json::array();
  for (const auto& s : r.restarts) {
    restarts.push_back(Json{{"value", s.value},
                            {"iterations", s.iterations},
                            {"converged", s.converged},
                            {"perturbations", s.perturbations}});
  }
  return Json{{"value", r.value},
              {"ensemble", ensemble_json(r.ensemble)},
              {"reconstruction_residual", r.ensemble.reconstruction_error(rho)},
              {"objective_trace", r.objectiveTrace},
              {"gap_estimate", r.gapEstimate},
              {"converged", r.converged},
              {"best_restart", r.bestRestart},
              {"perturbations", r.perturbations},
              {"restarts", restarts}};
}

struct LoadedFile {
  std::string path;
  std::string digest;
  Json json;
};

LoadedFile load(const std::string& path) {
  const std::string text = io::read_file(path);
  return {path, io::sha256_hex(text), io::parse_json_text(text, path)};
}

Json input_json(const LoadedFile& f) { return Json{{"path", f.path}, {"sha256", f.digest}}; }

class Report {
public:
  explicit Report(std::string command) { body_["command"] = std::move(command); }
  Json& body() { return body_; }
  Json& execution() { return execution_; }

  void emit(std::ostream& out, const std::string& outPath, double seconds) {
    execution_["wall_seconds"] = seconds;
    const Json doc{{"deterministic", body_}, {"execution", execution_}};
    const std::string text = doc.dump(2) + "\n";
    out << text;
    if (!outPath.empty()) {
      std::ofstream f(outPath, std::ios::binary);
      if (!f) {
        throw std::runtime_error("cannot write --out file '" + outPath + "'");
      }
      f << text;
    }
  }

private:
  Json body_ = Json::object();
  Json execution_ = Json::object();
};

int cmd_measure(const std::string& file, const MeasureFlags& mf, Report& rep) {
  const LoadedFile f = load(file);
  const io::StateFile st = io::parse_state(f.json);
  if (st.kind != io::StateFile::Kind::Pure) {
    throw io::ParseError("measure requires a pure-state file (kind \"pure\")");
  }
  const MeasureSpec spec = mf.spec();
  spec.validate(st.dims);
  const PureState& psi = *st.pure;
  const SchmidtDecomposition sd = schmidt(psi);
  double value = 0.0;
  if (spec.kind == MeasureKind::GeometricMeasure) {
    value = geometric_measure_pure(psi, spec.ranks);
  } else {
    value = evaluate(spec, psi);
  }
  rep.body()["inputs"] = Json{{"state", input_json(f)}};
  rep.body()["config"] = Json{{"measure", spec_json(spec)}};
  rep.body()["results"] = Json{{"value", value}, {"schmidt_lambdas", io::to_json(sd.lambdas)}};
  return kSuccess;
}

int cmd_roof(const std::string& file, const MeasureFlags& mf, const RoofFlags& rf, Report& rep) {
  const LoadedFile f = load(file);
  const io::StateFile st = io::parse_state(f.json);
  const DensityOperator rho = st.as_density();
  const MeasureSpec spec = mf.spec();
  spec.validate(st.dims);
  const RoofOptions opts = rf.options();
  const RoofResult r = solve_roof(RoofProblem{rho, spec, rf.dir(), opts});
  rep.body()["inputs"] = Json{{"state", input_json(f)}};
  rep.body()["config"] = Json{{"measure", spec_json(spec)}, {"roof", roof_config_json(opts, r.ensembleSize, rf.dir())}};
  rep.body()["results"] = roof_result_json(r, rho);
  rep.execution()["threads"] = opts.threads;
  const double residual = r.ensemble.reconstruction_error(rho);
  if (residual > 1e-8) {
    rep.body()["error"] = "reconstruction residual " + std::to_string(residual) + " exceeds 1e-8";
    return kInternalFailure;
  }
  return kSuccess;
}

struct Grid {
  double start = 0.0, stop = 0.0, step = 0.0;
  std::vector<double> points() const {
    std::vector<double> pts;
    const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    for (long i = 0; i <= n; ++i) {
      pts.push_back(start + static_cast<double>(i) * step);
    }
    return pts;
  }
};

Grid parse_grid(const std::string& text) {
  Grid g;
  std::stringstream ss(text);
  std::string a, b, c;
  if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c) ) {
    throw InvalidParameter("--p-grid must be START:STOP:STEP");
  }
  try {
    g.start = std::stod(a);
    g.stop = std::stod(b);
    g.step = std::stod(c);
  } catch (const std::exception&) {
    throw InvalidParameter("--p-grid must contain three numbers");
  }
  if (!(g.start > 1.0)) throw InvalidParameter("--p-grid: START must be > 1");
  if (!(g.step > 0.0)) throw InvalidParameter("--p-grid: STEP must be > 0");
  if (!(g.stop >= g.start) || !std::isfinite(g.stop)) throw InvalidParameter("--p-grid: STOP must be >= START");
  return g;
}

int cmd_sweep(const std::string& file, const MeasureFlags& mf, const std::string& gridText, const RoofFlags& rf,
              Report& rep) {
  const LoadedFile f = load(file);
  const io::StateFile st = io::parse_state(f.json);
  MeasureSpec base = mf.spec();
  if (base.kind != MeasureKind::PNumber) {
    throw InvalidParameter("sweep supports --measure p-number only");
  }
  if (base.p) {
    throw InvalidParameter("sweep takes --p-grid, not --p");
  }
  const Grid grid = parse_grid(gridText);
  const bool pure = st.kind == io::StateFile::Kind::Pure;
  const RoofOptions opts = rf.options();

  Json rows = Json::array();
  std::string csv = "p,value,gap_estimate\n";
  std::vector<double> values, gaps;
  std::size_t m = 0;
  for (const double p : grid.points()) {
    MeasureSpec spec = MeasureSpec::p_number(p);
    spec.validate(st.dims);
    double value = 0.0, gap = 0.0;
    if (pure) {
      value = evaluate(spec, *st.pure);
    } else {
      const RoofResult r = solve_roof(RoofProblem{*st.density, spec, Direction::Minimize, opts});
      value = r.value;
      gap = r.gapEstimate;
      m = r.ensembleSize;
    }
    values.push_back(value);
    gaps.push_back(gap);
    rows.push_back(Json{{"p", p}, {"value", value}, {"gap_estimate", gap}});
    std::ostringstream line;
    line.precision(17);
    line << p << ',' << value << ',' << gap << '\n';
    csv += line.str();
  }
  bool strictly = true, withinGap = true;
  for (std::size_t i = 1; i < values.size(); ++i) {
    strictly = strictly && values[i] > values[i - 1];
    withinGap = withinGap && values[i] >= values[i - 1] - 2.0 * std::max(gaps[i], gaps[i - 1]);
  }
  rep.body()["inputs"] = Json{{"state", input_json(f)}};
  Json config{{"measure", "p-number"},
              {"p_grid", Json{{"start", grid.start}, {"stop", grid.stop}, {"step", grid.step}}}};
  if (!pure) {
    config["roof"] = roof_config_json(opts, m, Direction::Minimize);
    rep.execution()["threads"] = opts.threads;
  }
  rep.body()["config"] = config;
  rep.body()["results"] = Json{{"rows", rows},
                               {"csv", csv},
                               {"strictly_increasing", strictly},
                               {"nondecreasing_within_gap", withinGap}};
  return kSuccess;
}

Json validation_json(const ValidationReport& v) {
  Json issues = Json::array();
  for (const auto& i : v.issues) {
    const char* kind = i.kind == ValidationIssue::Kind::Completeness ? "completeness"
                       : i.kind == ValidationIssue::Kind::Dimension  ? "dimension"
                                                                     : "structure";
    issues.push_back(Json{{"node", format_path(i.node)}, {"kind", kind}, {"message", i.message}, {"residual", i.residual}});
  }
  return Json{{"valid", v.valid()}, {"issues", issues}};
}

int cmd_locc(const std::string& treePath, const std::string& statePath, const MeasureFlags& mf, const RoofFlags& rf,
             Report& rep) {
  const LoadedFile tf = load(treePath);
  const LoadedFile sf = load(statePath);
  const io::TreeFile tree = io::parse_tree(tf.json);
  const io::StateFile st = io::parse_state(sf.json);
  const MeasureSpec spec = mf.spec();
  const RoofOptions opts = rf.options();
  rep.body()["inputs"] = Json{{"tree", input_json(tf)}, {"state", input_json(sf)}};
  rep.body()["config"] = Json{{"measure", spec_json(spec)},
                              {"roof", roof_config_json(opts, 0, spec.increasing() ? Direction::Maximize
                                                                                   : Direction::Minimize)}};
  rep.body()["config"]["roof"].erase("m");
  rep.execution()["threads"] = opts.threads;
  rep.body()["validation"] = validation_json(tree.validation);
  if (!tree.validation.valid()) {
    return kInvalidTree;
  }
  if (!(tree.dims == st.dims)) {
    throw io::ParseError("tree dims do not match the state dims");
  }
  spec.validate(st.dims);
  const DensityOperator rho = st.as_density();
  const TreeRun run = run_tree(tree.root, rho);
  const AuditReport audit = audit_monotonicity(tree.root, rho, spec, opts);

  std::map<NodePath, const BranchValue*> byPath;
  for (const auto& b : audit.branches) {
    byPath[b.node] = &b;
  }
  Json levels = Json::array();
  for (const auto& level : run.levels) {
    Json rows = Json::array();
    for (const auto& b : level) {
      Json row{{"node", format_path(b.nodeId)},
               {"probability", b.probability},
               {"conditional_probability", b.conditionalProbability},
               {"dims", io::to_json(b.dims)},
               {"final", b.leaf},
               {"value", nullptr},
               {"exact", nullptr},
               {"gap_estimate", nullptr}};
      if (const auto it = byPath.find(b.nodeId); it != byPath.end()) {
        row["value"] = it->second->value;
        row["exact"] = it->second->exact;
        row["gap_estimate"] = it->second->gapEstimate;
      }
      rows.push_back(row);
    }
    levels.push_back(rows);
  }
  Json nodes = Json::array();
  for (const auto& n : audit.nodes) {
    nodes.push_back(Json{{"node", format_path(n.node)},
                         {"probability", n.probability},
                         {"parent_value", n.parentValue},
                         {"child_average", n.childAverage},
                         {"slack", n.slack},
                         {"gap_allowance", n.gapAllowance},
                         {"exact", n.exact},
                         {"violation", n.violation},
                         {"pruned_children", n.prunedChildren}});
  }
  Json pruned = Json::array();
  for (const auto& p : audit.pruned) {
    pruned.push_back(format_path(p));
  }
  rep.body()["results"] = Json{
      {"levels", levels},
      {"nodes", nodes},
      {"pruned", pruned},
      {"increasing_measure", audit.increasing},
      {"end_to_end", Json{{"input_value", audit.inputValue},
                          {"output_value", audit.outputValue},
                          {"slack", audit.endToEndSlack},
                          {"gap", audit.endToEndGap},
                          {"violation", audit.endToEndViolation}}},
      {"any_violation", audit.any_violation()},
      {"output_state", io::state_to_json(run.output)}};
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bipartite entanglement measures, convex-roof optimization and LOCC audits", "entangle"};
  app.require_subcommand(1);
  std::string outPath;
  app.add_option("--out", outPath, "Also write the report to this file")->capture_default_str();

  std::string stateFile, treeFile, grid;
  MeasureFlags measureFlags, roofMeasure, sweepMeasure, loccMeasure;
  RoofFlags roofFlags, sweepRoof, loccRoof;

  auto* measure = app.add_subcommand("measure", "Evaluate a measure on a pure-state file");
  measure->add_option("state", stateFile, "Pure-state file")->required();
  measureFlags.attach(measure);
  measure->add_option("--out", outPath, "Also write the report to this file");

  auto* roof = app.add_subcommand("roof", "Convex (or concave) roof of a measure on a density file");
  roof->add_option("state", stateFile, "Density (or pure) state file")->required();
  roofMeasure.attach(roof);
  roofFlags.attach(roof, true);
  roof->add_option("--out", outPath, "Also write the report to this file");

  auto* sweep = app.add_subcommand("sweep", "p-number over a grid of p");
  sweep->add_option("state", stateFile, "Pure or density state file")->required();
  sweepMeasure.attach(sweep);
  sweep->add_option("--p-grid", grid, "START:STOP:STEP with START > 1")->required();
  sweepRoof.attach(sweep, false);
  sweep->add_option("--out", outPath, "Also write the report to this file");

  auto* locc = app.add_subcommand("locc", "Run an LOCC tree and audit monotonicity of a measure");
  locc->add_option("tree", treeFile, "LOCC tree file")->required();
  locc->add_option("state", stateFile, "Pure or density state file")->required();
  loccMeasure.attach(locc);
  loccRoof.attach(locc, false);
  locc->add_option("--out", outPath, "Also write the report to this file");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kInvalidParameter;
  }

  const auto t0 = std::chrono::steady_clock::now();
  auto* sub = app.get_subcommands().front();
  Report rep(sub->get_name());
  rep.execution()["argv"] = args;
  int code = kSuccess;
  try {
    if (sub == measure) {
      code = cmd_measure(stateFile, measureFlags, rep);
    } else if (sub == roof) {
      code = cmd_roof(stateFile, roofMeasure, roofFlags, rep);
    } else if (sub == sweep) {
      code = cmd_sweep(stateFile, sweepMeasure, grid, sweepRoof, rep);
    } else {
      code = cmd_locc(treeFile, stateFile, loccMeasure, loccRoof, rep);
    }
  } catch (const InvalidParameter& e) {
    err << "error: invalid parameter: " << e.what() << "\n";
    return kInvalidParameter;
  } catch (const InvalidInput& e) {
    err << "error: malformed input: " << e.what() << "\n";
    return kMalformedInput;
  } catch (const std::exception& e) {
    err << "error: internal failure: " << e.what() << "\n";
    return kInternalFailure;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  try {
    rep.emit(out, outPath, seconds);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInternalFailure;
  }
  if (code == kInvalidTree) {
    err << "error: LOCC tree failed validation\n";
    for (const auto& issue : rep.body()["validation"]["issues"]) {
      err << "  " << issue["node"].get<std::string>() << " " << issue["kind"].get<std::string>() << ": "
          << issue["message"].get<std::string>() << " (residual " << issue["residual"].dump() << ")\n";
    }
  } else if (code == kInternalFailure) {
    err << "error: internal consistency check failed\n";
  }
  return code;
}

}  // namespace entangle::cli
