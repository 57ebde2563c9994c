#pragma once

#include <json.hpp>

#include <set>
#include <string>
#include <vector>

#include "ensform/configuration.hpp"
#include "ensform/digraph.hpp"
#include "ensform/ensemble.hpp"
#include "ensform/errors.hpp"
#include "ensform/parameterization.hpp"
#include "ensform/stochastic_lie.hpp"
#include "ensform/synthesis.hpp"

namespace ensform {

using json = nlohmann::json;

/// Strict object reader: unknown fields are rejected, required fields must
/// be present.
inline void check_fields(const json& j, const std::string& where,
                         const std::set<std::string>& required,
                         const std::set<std::string>& optional = {}) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items())
    if (!required.count(key) && !optional.count(key))
      throw ConfigError(where + ": unknown field '" + key + "'");
  for (const auto& key : required)
    if (!j.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
}

// ---- graphs ----------------------------------------------------------------

inline json graph_to_json(const Digraph& g) {
  json edges = json::array();
  for (auto [i, j] : g.edges()) edges.push_back({i, j});
  return {{"n", g.n_vertices()}, {"edges", edges}};
}

inline Digraph graph_from_json(const json& j) {
  check_fields(j, "graph", {"n", "edges"});
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 2) throw ConfigError("graph: edges must be [i, j] pairs");
    edges.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
  }
  return Digraph(j.at("n").get<int>(), std::move(edges));
}

inline json schedule_to_json(const GraphSchedule& s) {
  json segments = json::array();
  for (const auto& [t, g] : s.segments())
    segments.push_back({{"t", t}, {"graph", graph_to_json(g)}});
  return {{"T", s.horizon()}, {"segments", segments}};
}

inline GraphSchedule schedule_from_json(const json& j) {
  check_fields(j, "schedule", {"T", "segments"});
  std::vector<std::pair<double, Digraph>> segments;
  for (const auto& seg : j.at("segments")) {
    check_fields(seg, "schedule segment", {"t", "graph"});
    segments.emplace_back(seg.at("t").get<double>(), graph_from_json(seg.at("graph")));
  }
  return GraphSchedule(std::move(segments), j.at("T").get<double>());
}

// ---- matrices and configurations -------------------------------------------

inline json int_matrix_to_json(const IntMatrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.size(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.size(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

inline json matrix_set_to_json(const MatrixSet& s) {
  json out = json::array();
  for (const auto& m : s) out.push_back(int_matrix_to_json(m));
  return out;
}

inline json configuration_to_json(const Configuration& x) {
  json rows = json::array();
  for (int i = 0; i < x.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < x.cols(); ++j) row.push_back(x(i, j));
    rows.push_back(row);
  }
  return {{"n_agents", x.rows()}, {"dim", x.cols()}, {"positions", rows}};
}

inline Configuration configuration_from_json(const json& j) {
  check_fields(j, "configuration", {"n_agents", "dim", "positions"});
  const int n_agents = j.at("n_agents").get<int>();
  const int dim = j.at("dim").get<int>();
  const auto& rows = j.at("positions");
  if (static_cast<int>(rows.size()) != n_agents)
    throw ConfigError("configuration: row count does not match n_agents");
  Configuration x(n_agents, dim);
  for (int i = 0; i < n_agents; ++i) {
    if (static_cast<int>(rows.at(i).size()) != dim)
      throw ConfigError("configuration: row length does not match dim");
    for (int k = 0; k < dim; ++k) x(i, k) = rows.at(i).at(k).get<double>();
  }
  if (!x.allFinite()) throw ConfigError("configuration: non-finite entry");
  return x;
}

// ---- parameterization -------------------------------------------------------

inline json rho_to_json(const RhoFunction& f) {
  switch (f.kind()) {
    case RhoFunction::Kind::Constant:
      return {{"kind", "constant"}, {"value", f.offset()}};
    case RhoFunction::Kind::Affine: {
      json slope = json::array();
      for (int k = 0; k < f.slope().size(); ++k) slope.push_back(f.slope()(k));
      return {{"kind", "affine"}, {"offset", f.offset()}, {"slope", slope}};
    }
    case RhoFunction::Kind::Polynomial:
      return {{"kind", "polynomial"}, {"coord", f.coord() + 1}, {"coeffs", f.coeffs()}};
    case RhoFunction::Kind::Exponential: {
      json slope = json::array();
      for (int k = 0; k < f.slope().size(); ++k) slope.push_back(f.slope()(k));
      return {{"kind", "exponential"}, {"offset", f.offset()}, {"slope", slope}};
    }
  }
  throw ConfigError("rho: unknown kind");
}

inline RhoFunction rho_from_json(const json& j) {
  check_fields(j, "rho", {"kind"}, {"value", "offset", "slope", "coord", "coeffs"});
  const std::string kind = j.at("kind").get<std::string>();
  auto slope_of = [&]() {
    Eigen::VectorXd s(j.at("slope").size());
    for (std::size_t k = 0; k < j.at("slope").size(); ++k)
      s(static_cast<int>(k)) = j.at("slope").at(k).get<double>();
    return s;
  };
  if (kind == "constant") return RhoFunction::constant(j.at("value").get<double>());
  if (kind == "affine") return RhoFunction::affine(j.value("offset", 0.0), slope_of());
  if (kind == "polynomial")
    return RhoFunction::polynomial(j.value("coord", 1) - 1,
                                   j.at("coeffs").get<std::vector<double>>());
  if (kind == "exponential") return RhoFunction::exponential(j.value("offset", 0.0), slope_of());
  throw ConfigError("rho: unknown kind '" + kind + "'");
}

inline json parameterization_to_json(const ParameterizationSet& p) {
  json functions = json::array();
  for (int s = 0; s < p.size(); ++s) functions.push_back(rho_to_json(p.function(s)));
  return {{"functions", functions}, {"nonzero_index", p.nonzero_index() + 1}};
}

inline ParameterizationSet parameterization_from_json(const json& j) {
  check_fields(j, "parameterization", {"functions", "nonzero_index"});
  std::vector<RhoFunction> rho;
  for (const auto& f : j.at("functions")) rho.push_back(rho_from_json(f));
  return ParameterizationSet(std::move(rho), j.at("nonzero_index").get<int>() - 1);
}

// ---- grids ------------------------------------------------------------------

inline json grid_to_json(const SigmaGrid& g) {
  json samples = json::array();
  for (const auto& s : g.samples) {
    json pt = json::array();
    for (int k = 0; k < s.size(); ++k) pt.push_back(s(k));
    samples.push_back(pt);
  }
  return {{"samples", samples}};
}

inline SigmaGrid grid_from_json(const json& j) {
  check_fields(j, "grid", {}, {"samples", "interval", "count", "box", "counts"});
  SigmaGrid g;
  if (j.contains("samples")) {
    for (const auto& pt : j.at("samples")) {
      Sigma s(pt.size());
      for (std::size_t k = 0; k < pt.size(); ++k) s(static_cast<int>(k)) = pt.at(k).get<double>();
      g.samples.push_back(s);
    }
  } else if (j.contains("interval")) {
    const auto& iv = j.at("interval");
    g = SigmaGrid::uniform_1d(iv.at(0).get<double>(), iv.at(1).get<double>(),
                              j.at("count").get<int>());
  } else if (j.contains("box")) {
    const auto& box = j.at("box");
    const auto& counts = j.at("counts");
    g = SigmaGrid::box_2d(box.at(0).at(0).get<double>(), box.at(0).at(1).get<double>(),
                          counts.at(0).get<int>(), box.at(1).at(0).get<double>(),
                          box.at(1).at(1).get<double>(), counts.at(1).get<int>());
  } else {
    throw ConfigError("grid: specify samples, interval, or box");
  }
  if (g.samples.empty()) throw ConfigError("grid: empty");
  for (std::size_t a = 0; a < g.samples.size(); ++a)
    for (std::size_t b = a + 1; b < g.samples.size(); ++b)
      if (g.samples[a] == g.samples[b]) throw ConfigError("grid: samples must be distinct");
  return g;
}

// ---- words and reports -------------------------------------------------------

inline json bracket_word_to_json(const BracketWord& w) {
  json leaves = json::array();
  for (auto [i, j] : w.leaves()) leaves.push_back({i, j});
  return {{"text", w.to_string()}, {"depth", w.depth()}, {"leaves", leaves}};
}

inline json separation_report_to_json(const SeparationReport& rep) {
  json pairs = json::array();
  for (const auto& p : rep.pairs)
    pairs.push_back({{"a", p.a}, {"b", p.b}, {"witness", p.witness < 0 ? json() : json(p.witness + 1)}});
  return {{"separated", rep.separated}, {"pairs", pairs}};
}

inline json levi_report_to_json(const LeviReport& rep) {
  return {{"n", rep.n},
          {"dims",
           {{"zero_row_sum", rep.dim_zero_row_sum},
            {"commutator_ideal", rep.dim_commutator_ideal},
            {"semisimple_part", rep.dim_semisimple_part},
            {"radical", rep.dim_radical}}},
          {"checks",
           {{"commutator_span_is_ideal", rep.commutator_span_is_ideal},
            {"ideal_is_perfect", rep.ideal_is_perfect},
            {"semisimple_part_ok", rep.semisimple_part_ok},
            {"radical_ok", rep.radical_ok},
            {"mixed_bracket_in_radical", rep.mixed_bracket_in_radical},
            {"direct_sum", rep.direct_sum},
            {"full_space_split", rep.full_space_split}}},
          {"passed", rep.passed}};
}

inline json semi_codist_report_to_json(const SemiCodistReport& rep) {
  json witnesses = json::array();
  for (const auto& w : rep.witnesses)
    witnesses.push_back({{"target", int_matrix_to_json(w.target)},
                         {"generator_edge", {w.generator_edge.first, w.generator_edge.second}},
                         {"source", int_matrix_to_json(w.source)},
                         {"closed_form", w.closed_form}});
  json unwitnessed = json::array();
  for (const auto& m : rep.unwitnessed) unwitnessed.push_back(int_matrix_to_json(m));
  return {{"passed", rep.passed},
          {"rank", rep.rank},
          {"expected_rank", rep.expected_rank},
          {"witnesses", witnesses},
          {"unwitnessed", unwitnessed}};
}

inline json tracking_report_to_json(const TrackingReport& rep) {
  json per_sample = json::array();
  for (const auto& curve : rep.per_sample_error) per_sample.push_back(curve);
  return {{"delta", rep.delta},
          {"delta_dense", rep.delta_dense},
          {"sup_error", rep.sup_error},
          {"error_bound", rep.bound},
          {"kappa", rep.kappa},
          {"max_coefficient", rep.max_coefficient},
          {"max_basis_norm", rep.max_basis_norm},
          {"state_bound", rep.state_bound},
          {"gamma", rep.gamma},
          {"fit_ill_conditioned", rep.fit_ill_conditioned},
          {"segment_start_indices", rep.segment_start_indices},
          {"per_sample_error", per_sample}};
}

}  // namespace ensform
