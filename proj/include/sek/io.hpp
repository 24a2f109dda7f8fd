#pragma once

// JSON documents for tensors, verdicts and generator bundles.

#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "sek/causal_cones.hpp"
#include "sek/causal_maps.hpp"
#include "sek/folded_forms.hpp"
#include "sek/lorentz_core.hpp"
#include "sek/rainich.hpp"
#include "sek/wavefront.hpp"

namespace sek::io {

using json = nlohmann::ordered_json;

struct TensorDocument {
  Tensor tensor;
  std::optional<BlockStructure> structure;
};

namespace detail {

[[noreturn]] inline void malformed(const std::string& what) { throw Error(Errc::MalformedInput, what); }

inline std::vector<double> numbers(const json& j, const char* key) {
  if (!j.contains(key)) malformed(std::string("missing field '") + key + "'");
  const json& a = j.at(key);
  if (!a.is_array()) malformed(std::string("field '") + key + "' must be an array");
  std::vector<double> out;
  for (const auto& x : a) {
    if (!x.is_number()) malformed(std::string("field '") + key + "' must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

inline std::vector<int> ints(const json& a, const char* what) {
  if (!a.is_array()) malformed(std::string(what) + " must be an array");
  std::vector<int> out;
  for (const auto& x : a) {
    if (!x.is_number_integer()) malformed(std::string(what) + " must hold integers");
    out.push_back(x.get<int>());
  }
  return out;
}

inline int natural(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number_integer()) malformed(std::string("field '") + key + "' must be an integer");
  const int v = j.at(key).get<int>();
  if (v < 0) malformed(std::string("field '") + key + "' must be nonnegative");
  return v;
}

}  // namespace detail

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::MalformedInput, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::MalformedInput, "invalid JSON in '" + path + "': " + e.what());
  }
}

/// Frame from "dim" plus optional "metric", "future_axis", "orientation".
inline FrameRef parse_frame(const json& j) {
  if (!j.is_object()) detail::malformed("document must be a JSON object");
  const int n = detail::natural(j, "dim");
  if (n < 2 || n > kMaxDim) throw Error(Errc::DimensionOutOfRange, "dimension must be in 2..6");
  std::optional<Matrix> metric;
  if (j.contains("metric")) {
    const auto m = detail::numbers(j, "metric");
    if (m.size() != static_cast<std::size_t>(n * n)) detail::malformed("metric must have dim^2 entries");
    metric = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(m.data(), n, n);
  }
  std::optional<Vector> axis;
  if (j.contains("future_axis")) {
    axis = detail::numbers(j, "future_axis");
    if (axis->size() != static_cast<std::size_t>(n)) detail::malformed("future_axis must have dim entries");
  }
  int orientation = 1;
  if (j.contains("orientation")) {
    if (!j.at("orientation").is_number_integer()) detail::malformed("orientation must be +1 or -1");
    orientation = j.at("orientation").get<int>();
  }
  return make_frame(n, metric, axis, orientation);
}

inline TensorDocument parse_tensor_document(const json& j) {
  const FrameRef f = parse_frame(j);
  const int rank = detail::natural(j, "rank");
  if (rank > kMaxRank) throw Error(Errc::RankOutOfRange, "rank must be <= 8");
  auto comps = detail::numbers(j, "components");
  if (comps.size() != ipow(f->dim(), rank)) detail::malformed("components must have dim^rank entries");
  TensorDocument doc{Tensor(f, rank, std::move(comps)), std::nullopt};
  if (j.contains("structure")) {
    const json& s = j.at("structure");
    if (!s.is_object() || !s.contains("degrees")) detail::malformed("structure needs 'degrees'");
    BlockStructure bs{detail::ints(s.at("degrees"), "degrees"), {}};
    if (s.contains("permutation")) bs.permutation = detail::ints(s.at("permutation"), "permutation");
    if (!bs.permutation.empty()) {
      std::vector<int> sorted = bs.permutation;
      std::sort(sorted.begin(), sorted.end());
      for (int i = 0; i < static_cast<int>(sorted.size()); ++i)
        if (sorted[i] != i || static_cast<int>(sorted.size()) != rank)
          throw Error(Errc::InvalidStructure, "permutation must be a permutation of the slots");
    }
    doc.structure = std::move(bs);
  }
  return doc;
}

inline json frame_json(const LorentzFrame& f) {
  json j;
  j["dim"] = f.dim();
  std::vector<double> m;
  for (int a = 0; a < f.dim(); ++a)
    for (int b = 0; b < f.dim(); ++b) m.push_back(f.g(a, b));
  j["metric"] = m;
  j["future_axis"] = f.future_axis();
  j["orientation"] = f.orientation();
  return j;
}

inline json tensor_json(const Tensor& t, const std::optional<BlockStructure>& s = std::nullopt) {
  json j = frame_json(t.frame());
  j["rank"] = t.rank();
  j["components"] = std::vector<double>(t.components().begin(), t.components().end());
  if (s) j["structure"] = {{"degrees", s->degrees}, {"permutation", s->permutation}};
  return j;
}

inline json vectors_json(const std::vector<Vector>& vs) {
  json a = json::array();
  for (const auto& v : vs) a.push_back(v);
  return a;
}

inline json to_json(const DPVerdict& v) {
  json j;
  j["member"] = v.member;
  j["sign"] = to_string(v.sign);
  j["method"] = to_string(v.method);
  j["margin"] = v.margin;
  j["witness"] = v.witness ? vectors_json(*v.witness) : json(nullptr);
  j["witness_value"] = v.witness_value ? json(*v.witness_value) : json(nullptr);
  j["samples_used"] = v.samples_used;
  return j;
}

inline json to_json(const EMClassification& c) {
  json j;
  j["kind"] = to_string(c.kind);
  json m = json::array();
  for (auto k : c.matches) m.push_back(to_string(k));
  j["matches"] = m;
  json params;
  if (c.pform) params["pform"] = {{"sign", c.pform->sign}, {"p", c.pform->p}};
  if (c.maxwell_c) params["maxwell"] = {{"c", *c.maxwell_c}};
  if (c.scalar)
    params["scalar"] = {{"beta", c.scalar->beta ? json(*c.scalar->beta) : json(nullptr)},
                        {"character", to_string(c.scalar->character)}};
  if (!c.fluid.empty()) {
    json a = json::array();
    for (const auto& fp : c.fluid) a.push_back({{"lambda", fp.lambda}, {"mu", fp.mu}});
    params["perfect_fluid"] = a;
  }
  if (c.dust) params["dust"] = {{"rho", c.dust->rho}};
  j["parameters"] = params.is_null() ? json::object() : params;
  json r = json::object();
  for (const auto& [k, v] : c.residuals) r[k] = v;
  j["residuals"] = r;
  return j;
}

inline json to_json(const SimpleFormDecomposition& d) {
  json j;
  json terms = json::array();
  for (const auto& t : d.terms) terms.push_back({{"p", t.p}, {"weight", t.weight}, {"form", tensor_json(t.form)}});
  j["terms"] = terms;
  j["eigenframe"] = vectors_json(d.eigenframe);
  j["residual"] = d.residual;
  return j;
}

inline json to_json(const CausalRelVerdict& v) {
  json j;
  j["properly_related"] = v.properly_related;
  j["orientation_flipped"] = v.orientation_flipped;
  j["canonical_null_count"] = v.canonical_null_count;
  j["conformal_factor"] = v.conformal_factor ? json(*v.conformal_factor) : json(nullptr);
  j["witness"] = v.witness ? vectors_json(*v.witness) : json(nullptr);
  j["method"] = to_string(v.dp.method);
  j["margin"] = v.dp.margin;
  return j;
}

inline json to_json(const SymmetryVerdict& v) {
  json j;
  j["feasible"] = v.feasible;
  j["psi_max"] = v.psi_max ? json(*v.psi_max) : json(nullptr);
  j["psi_admitted"] = v.psi_admitted ? json(*v.psi_admitted) : json(nullptr);
  j["method"] = to_string(v.method);
  j["witness"] = v.witness ? vectors_json(*v.witness) : json(nullptr);
  return j;
}

inline json to_json(const CutIntegrals& c) {
  json j;
  j["cuts"] = c.cuts;
  j["values"] = c.values;
  j["max_rel_spread"] = c.max_rel_spread;
  if (c.b_only) j["b_only"] = *c.b_only;
  if (c.f_only) j["f_only"] = *c.f_only;
  return j;
}

inline GeneratorBundle parse_bundle(const json& j) {
  if (!j.is_object() || !j.contains("generators") || !j.at("generators").is_array())
    detail::malformed("bundle needs a 'generators' array");
  GeneratorBundle b;
  for (const auto& g : j.at("generators")) {
    if (!g.is_object()) detail::malformed("generator must be an object");
    GeneratorRecord r;
    r.t_grid = detail::numbers(g, "t_grid");
    r.theta = detail::numbers(g, "theta");
    r.psi = g.contains("psi") ? detail::numbers(g, "psi") : std::vector<double>(r.t_grid.size(), 0.0);
    if (g.contains("killing")) {
      if (!g.at("killing").is_array()) detail::malformed("killing must be an array of arrays");
      for (const auto& k : g.at("killing")) {
        json wrap = {{"k", k}};
        r.killing.push_back(detail::numbers(wrap, "k"));
      }
    }
    for (const char* key : {"c2_init", "w_init", "measure_init"})
      if (g.contains(key) && !g.at(key).is_number()) detail::malformed(std::string(key) + " must be a number");
    r.c2_init = g.value("c2_init", 0.0);
    r.w_init = g.value("w_init", 0.0);
    r.measure_init = g.value("measure_init", 1.0);
    if (g.contains("b_fraction")) r.b_fraction = detail::numbers(g, "b_fraction");
    b.generators.push_back(std::move(r));
  }
  return b;
}

inline json bundle_json(const GeneratorBundle& b) {
  json gens = json::array();
  for (const auto& g : b.generators) {
    json r;
    r["t_grid"] = g.t_grid;
    r["theta"] = g.theta;
    r["psi"] = g.psi;
    r["killing"] = g.killing;
    r["c2_init"] = g.c2_init;
    r["w_init"] = g.w_init;
    r["measure_init"] = g.measure_init;
    if (g.b_fraction) r["b_fraction"] = *g.b_fraction;
    gens.push_back(r);
  }
  return {{"generators", gens}};
}

}  // namespace sek::io
