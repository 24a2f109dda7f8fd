#pragma once

// Command-line front end. Every command prints one JSON report on stdout.
// Exit codes: 0 computed (whatever the verdict), 1 malformed input, 2 unsupported case.

#include <chrono>
#include <cstdlib>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sek/acceptance.hpp"
#include "sek/causal_cones.hpp"
#include "sek/causal_maps.hpp"
#include "sek/folded_forms.hpp"
#include "sek/io.hpp"
#include "sek/rainich.hpp"
#include "sek/wavefront.hpp"

namespace sek::cli {

using json = io::json;

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> c{"se", "dp", "classify", "decompose", "pullback", "symmetry", "wavefront",
                                          "selftest"};
  return c;
}

struct Options {
  std::string command;
  std::string in, jacobian, target_metric, builtin, config;
  std::string sign = "plus", kind = "em";
  std::size_t samples = kDefaultNullCount;
  std::uint64_t seed = kDefaultSeed;
  bool exact = false, no_meta = false;
  int dim = 4;
  double q = 1, a = 1, adot = 0, amplitude = -1;
  std::optional<double> psi, rescale;
  std::vector<double> cuts;
  double r0 = 1, r1 = 3;
  int steps = 200;
};

namespace detail {

/// Flags from a JSON config object, appended only where the command line is silent.
inline std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  const json cfg = io::read_json_file(path);
  if (!cfg.is_object()) throw Error(Errc::MalformedInput, "config must be a JSON object");
  std::set<std::string> given;
  for (const auto& a : args)
    if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));
  for (const auto& [key, value] : cfg.items()) {
    if (key == "config" || given.count(key)) continue;
    const std::string flag = "--" + key;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
    } else if (value.is_array()) {
      args.push_back(flag);
      for (const auto& v : value) args.push_back(v.is_string() ? v.get<std::string>() : v.dump());
    } else if (value.is_string()) {
      args.push_back(flag);
      args.push_back(value.get<std::string>());
    } else if (value.is_number()) {
      args.push_back(flag);
      args.push_back(value.dump());
    } else {
      throw Error(Errc::MalformedInput, "config value for '" + key + "' has an unsupported type");
    }
  }
  return args;
}

inline json provenance(const Options& o, const std::vector<std::string>& args) {
  json flags = json::object();
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i].rfind("--", 0) != 0) continue;
    std::string key = args[i].substr(2), value;
    if (const auto eq = key.find('='); eq != std::string::npos) {
      value = key.substr(eq + 1);
      key = key.substr(0, eq);
      flags[key] = value;
      continue;
    }
    json vals = json::array();
    while (i + 1 < args.size() && (args[i + 1].rfind("--", 0) != 0 || args[i + 1].size() == 2)) vals.push_back(args[++i]);
    flags[key] = vals.empty() ? json(true) : vals.size() == 1 ? vals[0] : vals;
  }
  json p;
  p["command"] = o.command;
  p["flags"] = flags;
  p["seed"] = o.seed;
  p["tolerances"] = {{"classification", kTolClass}, {"algebraic", kTolAlg}, {"ode_rel", kOdeRelTol}};
  return p;
}

inline json meta() {
  const auto now = std::chrono::system_clock::now();
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
  return {{"tool", "sek"}, {"unix_time", secs}};
}

inline DPSign parse_sign(const std::string& s) {
  if (s == "plus") return DPSign::plus;
  if (s == "minus") return DPSign::minus;
  throw Error(Errc::MalformedInput, "--sign must be plus or minus");
}

inline io::TensorDocument load_tensor(const Options& o) {
  if (o.in.empty()) throw Error(Errc::MalformedInput, "--in FILE is required");
  return io::parse_tensor_document(io::read_json_file(o.in));
}

/// Jacobian as a bare flat array or an object with "jacobian" or "components".
inline Matrix parse_jacobian(const json& j, int n) {
  const json wrap = j.is_array() ? json{{"jacobian", j}} : j;
  if (!wrap.is_object()) throw Error(Errc::MalformedInput, "jacobian must be an array or an object");
  const auto v = io::detail::numbers(wrap, wrap.contains("components") ? "components" : "jacobian");
  if (v.size() != static_cast<std::size_t>(n * n)) throw Error(Errc::MalformedInput, "jacobian must have dim^2 entries");
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(v.data(), n, n);
}

/// One pullback point: a candidate tensor, or a base frame with jacobian and target metric.
inline json pullback_point(const json& doc, const std::optional<json>& jac, const std::optional<json>& target) {
  const json* jj = jac ? &*jac : doc.contains("jacobian") ? &doc.at("jacobian") : nullptr;
  const json* tt = target ? &*target : doc.contains("target_metric") ? &doc.at("target_metric") : nullptr;
  if (!jj && !tt) return io::to_json(check_proper_causal(io::parse_tensor_document(doc).tensor));
  if (!jj || !tt) throw Error(Errc::MalformedInput, "jacobian and target metric must be given together");
  const FrameRef base = io::parse_frame(doc);
  const FrameRef tf = io::parse_frame(*tt);
  if (tf->dim() != base->dim()) throw Error(Errc::ShapeMismatch, "target metric dimension differs from the base");
  const Matrix j = parse_jacobian(*jj, base->dim());
  const Tensor phg = pullback_metric(base, j, metric_tensor(tf));
  json r = io::to_json(check_proper_causal(phg, MapData{j, tf}));
  r["pullback"] = io::tensor_json(phg);
  return r;
}

inline json cmd_se(const Options& o) {
  const auto doc = load_tensor(o);
  const SuperenergyTensor st = doc.structure ? superenergy(FoldedForm(doc.tensor, *doc.structure)) : superenergy(doc.tensor);
  json r;
  r["folds"] = st.folds;
  r["superenergy"] = io::tensor_json(st.tensor);
  return r;
}

inline json cmd_dp(const Options& o) {
  const auto doc = load_tensor(o);
  const DPSign sign = parse_sign(o.sign);
  const DPVerdict v = o.exact ? check_dp2_exact(doc.tensor, sign) : check_dp_sampled(doc.tensor, sign, o.samples, o.seed);
  return {{"verdict", io::to_json(v)}};
}

inline json cmd_pullback(const Options& o) {
  json points = json::array();
  if (!o.in.empty()) {
    const json doc = io::read_json_file(o.in);
    std::optional<json> jac, target;
    if (!o.jacobian.empty()) jac = io::read_json_file(o.jacobian);
    if (!o.target_metric.empty()) target = io::read_json_file(o.target_metric);
    if (doc.is_object() && doc.contains("points")) {
      if (!doc.at("points").is_array()) throw Error(Errc::MalformedInput, "'points' must be an array");
      for (const auto& p : doc.at("points")) points.push_back(pullback_point(p, jac, target));
    } else {
      points.push_back(pullback_point(doc, jac, target));
    }
  } else {
    if (!o.jacobian.empty() || !o.target_metric.empty())
      throw Error(Errc::MalformedInput, "--jacobian and --target-metric need --in with the base frame");
    BuiltinParams bp;
    bp.dim = o.dim;
    bp.q = o.q;
    const auto pt = builtin_example(o.builtin.empty() ? "minkowski_stretch" : o.builtin, bp);
    std::optional<MapData> md;
    if (pt.jacobian) md = MapData{*pt.jacobian, pt.base_frame};
    json r = io::to_json(check_proper_causal(pt.candidate, md));
    r["pullback"] = io::tensor_json(pt.candidate);
    points.push_back(r);
  }
  return {{"points", points}};
}

inline json cmd_symmetry(const Options& o) {
  Tensor l = [&] {
    if (!o.in.empty()) return load_tensor(o).tensor;
    if (o.builtin.empty()) throw Error(Errc::MalformedInput, "symmetry needs --in or --builtin");
    BuiltinParams bp;
    bp.dim = o.dim;
    bp.a = o.a;
    bp.adot = o.adot;
    bp.amplitude = o.amplitude;
    return builtin_example(o.builtin, bp).candidate;
  }();
  const SymmetryVerdict v = check_generalized_symmetry(l, o.psi, o.samples, o.seed);
  json r = io::to_json(v);
  r["interval"] = v.feasible ? json{{"lower", nullptr}, {"upper", *v.psi_max}} : json(nullptr);
  return r;
}

inline std::vector<double> default_cuts(const GeneratorBundle& b) {
  double lo = -1e300, hi = 1e300;
  for (const auto& g : b.generators) {
    if (g.t_grid.empty()) throw Error(Errc::InvalidBundle, "generator without parameter grid");
    lo = std::max(lo, g.t_grid.front());
    hi = std::min(hi, g.t_grid.back());
  }
  if (!(hi >= lo)) throw Error(Errc::InvalidBundle, "generators share no common parameter range");
  std::vector<double> cuts;
  for (int i = 0; i < 5; ++i) cuts.push_back(lo + (hi - lo) * i / 4);
  return cuts;
}

inline json table(const CutIntegrals& c) {
  json rows = json::array();
  for (std::size_t i = 0; i < c.cuts.size(); ++i) {
    json row = {{"cut", c.cuts[i]}, {"value", c.values[i]}};
    if (c.b_only) row["b_only"] = (*c.b_only)[i];
    if (c.f_only) row["f_only"] = (*c.f_only)[i];
    rows.push_back(row);
  }
  return {{"table", rows}, {"max_rel_spread", c.max_rel_spread}};
}

inline json cmd_wavefront(const Options& o) {
  IntegralKind kind;
  if (o.kind == "em") kind = IntegralKind::em;
  else if (o.kind == "grav") kind = IntegralKind::grav;
  else throw Error(Errc::MalformedInput, "--kind must be em or grav");
  GeneratorBundle b;
  if (!o.in.empty()) b = io::parse_bundle(io::read_json_file(o.in));
  else if (o.builtin.empty() || o.builtin == "lightcone") b = lightcone_example(o.dim, o.r0, o.r1, o.steps);
  else throw Error(Errc::UnknownExample, "unknown bundle '" + o.builtin + "'");
  const auto cuts = o.cuts.empty() ? default_cuts(b) : o.cuts;
  json r = table(conserved_integrals(b, cuts, kind));
  if (o.rescale) {
    std::vector<double> scaled = cuts;
    for (double& t : scaled) t /= *o.rescale;
    r["rescaled"] = table(conserved_integrals(rescale_bundle(b, *o.rescale), scaled, kind));
    r["rescaled"]["rho"] = *o.rescale;
  }
  return r;
}

inline json cmd_selftest(const Options& o) {
  json rows = json::array();
  int passed = 0;
  for (const auto& c : acceptance::run_all(o.seed)) {
    rows.push_back({{"id", c.id}, {"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    passed += c.pass;
  }
  return {{"criteria", rows}, {"passed", passed}, {"total", rows.size()}};
}

inline json dispatch(const Options& o) {
  if (o.command == "se") return cmd_se(o);
  if (o.command == "dp") return cmd_dp(o);
  if (o.command == "classify") return {{"classification", io::to_json(classify_em(load_tensor(o).tensor))}};
  if (o.command == "decompose") return {{"decomposition", io::to_json(decompose_dp2(load_tensor(o).tensor))}};
  if (o.command == "pullback") return cmd_pullback(o);
  if (o.command == "symmetry") return cmd_symmetry(o);
  if (o.command == "wavefront") return cmd_wavefront(o);
  return cmd_selftest(o);
}

}  // namespace detail

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  Options o;
  if (const char* env = std::getenv("SEK_SEED")) {
    try {
      o.seed = std::stoull(env);
    } catch (const std::exception&) {
      err << "sek: ignoring unparsable SEK_SEED\n";
    }
  }
  CLI::App app{"Superenergy, dominant-property and causal-relation checks", "sek"};
  app.add_option("command", o.command, "se|dp|classify|decompose|pullback|symmetry|wavefront|selftest")
      ->required()
      ->check(CLI::IsMember(commands()));
  app.add_option("--in", o.in, "input JSON document");
  app.add_option("--config", o.config, "JSON file of flag values; the command line wins");
  app.add_option("--sign", o.sign, "plus or minus")->capture_default_str();
  app.add_option("--samples", o.samples, "null directions per slot")->capture_default_str();
  app.add_option("--seed", o.seed, "sampling seed (default from SEK_SEED)");
  app.add_flag("--exact", o.exact, "rank-2 eigenframe decision");
  app.add_option("--jacobian", o.jacobian, "JSON file with an N x N jacobian");
  app.add_option("--target-metric", o.target_metric, "JSON frame document of the target metric");
  app.add_option("--builtin", o.builtin, "minkowski_stretch|robertson_walker|kerr_schild|lightcone");
  app.add_option("--dim", o.dim, "dimension for builtin examples")->capture_default_str();
  app.add_option("--q", o.q, "stretch factor")->capture_default_str();
  app.add_option("--a", o.a, "scale factor")->capture_default_str();
  app.add_option("--adot", o.adot, "scale factor rate")->capture_default_str();
  app.add_option("--amplitude", o.amplitude, "Kerr-Schild amplitude")->capture_default_str();
  app.add_option("--psi", o.psi, "test a specific psi");
  app.add_option("--cuts", o.cuts, "cut parameter values");
  app.add_option("--kind", o.kind, "em or grav")->capture_default_str();
  app.add_option("--rescale", o.rescale, "also evaluate the bundle rescaled by rho");
  app.add_option("--r0", o.r0, "light-cone start radius")->capture_default_str();
  app.add_option("--r1", o.r1, "light-cone end radius")->capture_default_str();
  app.add_option("--steps", o.steps, "light-cone grid steps")->capture_default_str();
  app.add_flag("--no-meta", o.no_meta, "omit the timestamped meta block");

  json report;
  int code = 0;
  try {
    args = detail::merge_config(args);
    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
      app.parse(rev);
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return 0;
    } catch (const CLI::ParseError& e) {
      throw Error(Errc::MalformedInput, e.what());
    }
    report["provenance"] = detail::provenance(o, args);
    report["result"] = detail::dispatch(o);
  } catch (const Error& e) {
    code = is_unsupported_case(e.code()) ? 2 : 1;
    std::string msg = e.what();
    const std::string prefix = std::string(to_string(e.code())) + ": ";
    if (msg.rfind(prefix, 0) == 0) msg = msg.substr(prefix.size());
    if (!report.contains("provenance")) report["provenance"] = detail::provenance(o, args);
    report["error"] = {{"code", std::string(to_string(e.code()))}, {"message", msg}};
    err << "sek: " << e.what() << "\n";
  } catch (const std::exception& e) {
    code = 1;
    report["error"] = {{"code", "MalformedInput"}, {"message", e.what()}};
    err << "sek: " << e.what() << "\n";
  }
  if (!o.no_meta) report["meta"] = detail::meta();
  out << report.dump(2) << "\n";
  return code;
}

}  // namespace sek::cli
