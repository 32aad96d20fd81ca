#include "pdm/serialize.hpp"

#include "pdm/csv.hpp"
#include "pdm/error.hpp"

#include <sstream>

namespace pdm {

namespace {

Json matrix_json(const Eigen::MatrixXd& a) {
  Json rows = Json::array();
  for (Index i = 0; i < a.rows(); ++i) {
    Json r = Json::array();
    for (Index j = 0; j < a.cols(); ++j) r.push_back(a(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

Eigen::MatrixXd matrix_from(const Json& j, Index rows, Index cols) {
  if (!j.is_array() || static_cast<Index>(j.size()) != rows) throw Error("parse", "matrix has the wrong row count");
  Eigen::MatrixXd a(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const auto& r = j[static_cast<std::size_t>(i)];
    if (!r.is_array() || static_cast<Index>(r.size()) != cols) throw Error("parse", "matrix has the wrong column count");
    for (Index c = 0; c < cols; ++c) a(i, c) = r[static_cast<std::size_t>(c)].get<double>();
  }
  return a;
}

Json optional_json(const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); }

std::string optional_cell(const std::optional<double>& x) { return x ? csv::format_double(*x) : ""; }

} // namespace

Json decomposition_to_json(const Decomposition& d, const VoteMatrix& v, const RunSettings& s) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["seed"] = s.seed;
  j["minority_threshold"] = s.minority_threshold;
  j["sigma"] = s.sigma;
  j["null_reps"] = s.null_reps;
  j["max_layers"] = s.max_layers;
  Json ids = Json::array();
  for (const auto& leg : v.legislators()) ids.push_back(leg.id);
  j["legislator_ids"] = std::move(ids);
  j["vote_ids"] = v.vote_ids();

  Json layers = Json::array();
  for (const auto& layer : d.layers) {
    Json l;
    l["layer"] = layer.layer_index;
    l["k0"] = layer.params.k0;
    l["l"] = layer.params.l;
    Json curve = Json::array();
    for (const auto& [c, value] : layer.params.aic_curve) curve.push_back({{"components", c}, {"value", value}});
    l["aic_curve"] = std::move(curve);
    l["null_fiedler_min"] = layer.params.null_fiedler_min;
    l["null_reps"] = layer.params.null_reps;
    l["assignment"] = layer.assignment(v.n());
    Json motivations = Json::array();
    for (const auto& m : layer.motivations) {
      Json mj;
      mj["source_cluster"] = m.source_cluster;
      mj["in_basis"] = m.in_basis;
      mj["vector"] = std::vector<double>(m.vector.data(), m.vector.data() + m.vector.size());
      motivations.push_back(std::move(mj));
    }
    l["motivations"] = std::move(motivations);
    l["weights"] = matrix_json(layer.weights);
    l["null_rows"] = layer.null_rows;
    l["no_signal_rows"] = layer.no_signal_rows;
    l["diagnostics"] = layer.diagnostics;
    layers.push_back(std::move(l));
  }
  j["layers"] = std::move(layers);
  j["residual"] = {{"frobenius_norm", d.residual.norm()},
                   {"max_abs", d.residual.size() > 0 ? d.residual.cwiseAbs().maxCoeff() : 0.0}};
  j["stop_reason"] = to_string(d.stop_reason);
  j["diagnostics"] = d.diagnostics;
  return j;
}

StoredDecomposition decomposition_from_json(const Json& j) {
  try {
    if (j.at("schema_version").get<int>() != kSchemaVersion) {
      throw Error("parse", "unsupported decomposition schema version");
    }
    StoredDecomposition out;
    out.settings.seed = j.at("seed").get<std::uint64_t>();
    out.settings.minority_threshold = j.at("minority_threshold").get<double>();
    out.settings.sigma = j.at("sigma").get<double>();
    out.settings.null_reps = j.at("null_reps").get<int>();
    out.settings.max_layers = j.at("max_layers").get<int>();
    out.legislator_ids = j.at("legislator_ids").get<std::vector<std::string>>();
    out.vote_ids = j.at("vote_ids").get<std::vector<std::string>>();
    const auto n = static_cast<Index>(out.legislator_ids.size());
    const auto m = static_cast<Index>(out.vote_ids.size());

    for (const auto& lj : j.at("layers")) {
      LayerModel layer;
      layer.layer_index = lj.at("layer").get<int>();
      layer.params.k0 = lj.at("k0").get<int>();
      layer.params.l = lj.at("l").get<int>();
      for (const auto& p : lj.at("aic_curve")) {
        layer.params.aic_curve.emplace_back(p.at("components").get<int>(), p.at("value").get<double>());
      }
      layer.params.null_fiedler_min = lj.at("null_fiedler_min").get<double>();
      layer.params.null_reps = lj.at("null_reps").get<int>();
      const auto assignment = lj.at("assignment").get<std::vector<int>>();
      if (static_cast<Index>(assignment.size()) != n) throw Error("parse", "assignment length mismatch");
      for (std::size_t i = 0; i < assignment.size(); ++i) {
        if (assignment[i] < 0) continue;
        layer.clustering.rows.push_back(static_cast<Index>(i));
        layer.clustering.labels.push_back(assignment[i]);
      }
      for (const auto& mj : lj.at("motivations")) {
        Motivation mot;
        mot.source_cluster = mj.at("source_cluster").get<int>();
        mot.in_basis = mj.at("in_basis").get<bool>();
        mot.layer = layer.layer_index;
        const auto vec = mj.at("vector").get<std::vector<double>>();
        if (static_cast<Index>(vec.size()) != m) throw Error("parse", "motivation length mismatch");
        mot.vector = Eigen::Map<const Eigen::VectorXd>(vec.data(), m);
        layer.motivations.push_back(std::move(mot));
      }
      layer.weights = matrix_from(lj.at("weights"), n, static_cast<Index>(layer.motivations.size()));
      layer.null_rows = lj.at("null_rows").get<std::vector<Index>>();
      layer.no_signal_rows = lj.at("no_signal_rows").get<std::vector<Index>>();
      layer.diagnostics = lj.at("diagnostics").get<std::vector<std::string>>();
      layer.approximation = approximation_from(layer.weights, layer.motivations, m);
      out.decomposition.layers.push_back(std::move(layer));
    }
    out.decomposition.stop_reason = stop_reason_from_string(j.at("stop_reason").get<std::string>());
    out.decomposition.diagnostics = j.at("diagnostics").get<std::vector<std::string>>();
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error("parse", std::string("malformed decomposition: ") + e.what());
  }
}

Json eval_to_json(const EvalTable& t) {
  Json models = Json::array();
  for (const auto& r : t.models) {
    Json mj;
    mj["model"] = r.model_name;
    mj["percent_correct"] = r.percent_correct;
    mj["apre"] = optional_json(r.apre);
    mj["n_cast"] = r.n_cast;
    mj["errors"] = r.errors;
    mj["per_vote_errors"] = r.per_vote_errors;
    mj["diagnostics"] = r.diagnostics;
    models.push_back(std::move(mj));
  }
  Json random;
  random["instances"] = t.random.instances;
  random["mean_apre"] = optional_json(t.random.mean_apre);
  random["min_percent_correct"] = t.random.min_percent_correct;
  random["max_percent_correct"] = t.random.max_percent_correct;
  Json instances = Json::array();
  for (const auto& r : t.random.reports) {
    instances.push_back({{"percent_correct", r.percent_correct}, {"apre", optional_json(r.apre)}});
  }
  random["per_instance"] = std::move(instances);
  return {{"models", std::move(models)}, {"random", std::move(random)}};
}

std::string eval_to_csv(const EvalTable& t) {
  std::ostringstream out;
  out << "model,percent_correct,apre,n_cast,errors,min_percent_correct,max_percent_correct\n";
  for (const auto& r : t.models) {
    out << csv::join({r.model_name, csv::format_double(r.percent_correct), optional_cell(r.apre),
                      std::to_string(r.n_cast), std::to_string(r.errors), "", ""})
        << '\n';
  }
  double mean_pc = 0.0;
  for (const auto& r : t.random.reports) mean_pc += r.percent_correct;
  if (!t.random.reports.empty()) mean_pc /= static_cast<double>(t.random.reports.size());
  const long n_cast = t.random.reports.empty() ? 0 : t.random.reports.front().n_cast;
  out << csv::join({"random", csv::format_double(mean_pc), optional_cell(t.random.mean_apre),
                    std::to_string(n_cast), "", csv::format_double(t.random.min_percent_correct),
                    csv::format_double(t.random.max_percent_correct)})
      << '\n';
  return out.str();
}

Json separating_votes_to_json(const SeparatingVotes& s, const VoteMatrix& v, int layer) {
  Json pairs = Json::array();
  for (const auto& p : s.pairs) {
    Json ranked = Json::array();
    for (const auto& rv : p.run.ranking) {
      ranked.push_back({{"vote_id", rv.vote_id}, {"weight", rv.weight}, {"rounds", rv.rounds}});
    }
    Json pj;
    pj["cluster_a"] = p.cluster_a;
    pj["cluster_b"] = p.cluster_b;
    pj["ranking"] = std::move(ranked);
    pj["training_error"] = p.run.training_error;
    pj["error_bound"] = p.run.error_bound;
    pj["rounds_run"] = p.run.stumps.size();
    pj["perfect"] = p.run.perfect;
    pj["diagnostic"] = p.run.diagnostic ? Json(*p.run.diagnostic) : Json(nullptr);
    pairs.push_back(std::move(pj));
  }
  Json selected = Json::array();
  for (Index c : s.selected_columns) selected.push_back(v.vote_ids()[static_cast<std::size_t>(c)]);
  Json table = Json::array();
  for (const auto& row : s.yea_table) {
    Json r = Json::array();
    for (const auto& cell : row) r.push_back(cell ? Json(*cell) : Json(nullptr));
    table.push_back(std::move(r));
  }
  Json j;
  j["layer"] = layer;
  j["pairs"] = std::move(pairs);
  j["selected_votes"] = std::move(selected);
  j["yea_table"] = std::move(table);
  j["warnings"] = s.warnings;
  return j;
}

std::string separating_votes_to_csv(const SeparatingVotes& s, const VoteMatrix& v) {
  std::ostringstream out;
  std::vector<std::string> header{"vote_id"};
  for (std::size_t c = 0; c < s.yea_table.size(); ++c) header.push_back("cluster_" + std::to_string(c));
  out << csv::join(header) << '\n';
  for (std::size_t k = 0; k < s.selected_columns.size(); ++k) {
    std::vector<std::string> row{v.vote_ids()[static_cast<std::size_t>(s.selected_columns[k])]};
    for (const auto& cluster_row : s.yea_table) {
      row.push_back(cluster_row[k] ? std::to_string(*cluster_row[k]) : "");
    }
    out << csv::join(row) << '\n';
  }
  return out.str();
}

std::string dims_to_csv(const std::vector<DimsRow>& rows) {
  std::ostringstream out;
  std::vector<std::string> header{"series", "estimated_dim", "above_max"};
  for (int d = 1; d <= kMaxMdsDimension; ++d) header.push_back("stress_" + std::to_string(d));
  out << csv::join(header) << '\n';
  for (const auto& r : rows) {
    std::vector<std::string> row{r.series, csv::format_double(r.estimate.estimated_dim),
                                 r.estimate.above_max ? "true" : "false"};
    for (const auto& [dim, stress] : r.estimate.stress_by_dim) row.push_back(csv::format_double(stress));
    out << csv::join(row) << '\n';
  }
  return out.str();
}

std::string mds_plot_csv(const VoteMatrix& v, const std::vector<Index>& rows,
                         const std::vector<int>& assignment, const Eigen::MatrixXd& coords_2d) {
  std::ostringstream out;
  out << "id,party,region,cluster,x,y\n";
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto i = static_cast<std::size_t>(rows[k]);
    const auto& leg = v.legislators()[i];
    const auto k_idx = static_cast<Index>(k);
    const double x = coords_2d.cols() > 0 ? coords_2d(k_idx, 0) : 0.0;
    const double y = coords_2d.cols() > 1 ? coords_2d(k_idx, 1) : 0.0;
    out << csv::join({leg.id, leg.party, leg.region.value_or(""), std::to_string(assignment[i]),
                      csv::format_double(x), csv::format_double(y)})
        << '\n';
  }
  return out.str();
}

std::string sim_summary_csv(const ExperimentSummary& s) {
  std::ostringstream out;
  out << "alpha,trial,correlation,within_party_variance\n";
  for (const auto& t : s.trials) {
    out << csv::join({csv::format_double(t.alpha), std::to_string(t.trial), csv::format_double(t.abs_corr),
                      csv::format_double(t.within_party_variance)})
        << '\n';
  }
  return out.str();
}

std::string sim_plot_csv(const ExperimentSummary& s) {
  std::ostringstream out;
  out << "alpha,member,fiedler,party,loyalty\n";
  for (const auto& p : s.plot) {
    out << csv::join({csv::format_double(p.alpha), std::to_string(p.member), csv::format_double(p.fiedler),
                      std::to_string(p.party), csv::format_double(p.loyalty)})
        << '\n';
  }
  return out.str();
}

std::string sim_per_alpha_csv(const ExperimentSummary& s) {
  std::ostringstream out;
  out << "alpha,mean_abs_correlation,mean_within_party_variance\n";
  for (const auto& a : s.per_alpha) {
    out << csv::join({csv::format_double(a.alpha), csv::format_double(a.mean_abs_corr),
                      csv::format_double(a.mean_within_party_variance)})
        << '\n';
  }
  return out.str();
}

Json sim_to_json(const ExperimentSummary& s, std::uint64_t seed, int n_trials) {
  Json j;
  j["seed"] = seed;
  j["trials_per_alpha"] = n_trials;
  j["alphas"] = s.per_alpha.size();
  j["mean_abs_correlation"] = s.mean_abs_corr;
  j["variance_abs_correlation"] = s.variance_abs_corr;
  j["correlation_trend_spearman"] = s.corr_trend;
  j["localization_trend_spearman"] = s.localization_trend;
  return j;
}

} // namespace pdm
