#include "pdm/commands.hpp"

#include "pdm/csv.hpp"
#include "pdm/error.hpp"
#include "pdm/rng.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

namespace pdm {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kMdsStream = 0x3d5;

void report_error(const RunConfig& config, std::ostream& err, const std::string& kind,
                  const std::string& message, long row = 0, long column = 0) {
  Json e{{"kind", kind}, {"message", message}};
  if (row > 0) e["row"] = row;
  if (column > 0) e["column"] = column;
  const Json doc{{"error", e}};
  err << doc.dump() << '\n';
  std::error_code ec;
  fs::create_directories(config.out, ec);
  if (!ec) {
    std::ofstream f(config.out / "error.json");
    if (f) f << doc.dump(2) << '\n';
  }
}

template <class F>
int guarded(const RunConfig& config, std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    report_error(config, err, e.kind(), e.what(), e.row(), e.column());
  } catch (const Error& e) {
    report_error(config, err, e.kind(), e.what());
  } catch (const std::exception& e) {
    report_error(config, err, "internal", e.what());
  }
  return kExitFailure;
}

void write_json(const fs::path& path, const Json& j) { csv::write_text(path, j.dump(2) + "\n"); }

Json config_json(const RunConfig& c) {
  Json j;
  j["format"] = to_string(c.format);
  j["input"] = c.input.string();
  j["members"] = c.members.string();
  j["votes"] = c.votes.string();
  j["minority_threshold"] = c.minority_threshold;
  j["sigma"] = c.sigma;
  j["null_reps"] = c.null_reps;
  j["max_layers"] = c.max_layers;
  j["rounds"] = c.rounds;
  j["top_k"] = c.top_k;
  j["seed"] = c.seed;
  j["out"] = c.out.string();
  return j;
}

void write_manifest(const RunConfig& c, const std::string& command, Json config,
                    const std::vector<std::string>& artifacts) {
  Json j;
  j["command"] = command;
  j["schema_version"] = kSchemaVersion;
  j["seed"] = c.seed;
  j["config"] = std::move(config);
  j["artifacts"] = artifacts;
  write_json(c.out / "manifest.json", j);
}

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& a, const std::vector<Index>& rows) {
  Eigen::MatrixXd out(static_cast<Index>(rows.size()), a.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) out.row(static_cast<Index>(k)) = a.row(rows[k]);
  return out;
}

void check_matches(const StoredDecomposition& s, const VoteMatrix& v) {
  if (s.vote_ids != v.vote_ids()) {
    throw Error("data", "stored decomposition vote ids do not match the filtered input");
  }
  if (static_cast<Index>(s.legislator_ids.size()) != v.n()) {
    throw Error("data", "stored decomposition legislators do not match the input");
  }
  for (Index i = 0; i < v.n(); ++i) {
    if (s.legislator_ids[static_cast<std::size_t>(i)] != v.legislators()[static_cast<std::size_t>(i)].id) {
      throw Error("data", "stored decomposition legislators do not match the input");
    }
  }
}

} // namespace

InputFormat input_format_from_string(const std::string& s) {
  if (s == "wide_csv") return InputFormat::wide_csv;
  if (s == "voteview") return InputFormat::voteview;
  throw Error("parameter", "unknown format '" + s + "' (expected wide_csv or voteview)");
}

const char* to_string(InputFormat f) noexcept {
  return f == InputFormat::voteview ? "voteview" : "wide_csv";
}

VoteMatrix load_filtered(const RunConfig& config, double threshold) {
  if (config.format == InputFormat::voteview) {
    if (config.members.empty() || config.votes.empty()) {
      throw Error("parameter", "voteview input needs --members and --votes");
    }
    return filter_minority(load_voteview(config.members, config.votes), threshold);
  }
  if (config.input.empty()) throw Error("parameter", "wide_csv input needs --input");
  return filter_minority(load_wide_csv(config.input), threshold);
}

EvalTable build_eval_table(const VoteMatrix& v, const Decomposition& d, std::uint64_t seed) {
  EvalTable t;
  const int layers = static_cast<int>(d.layers.size());
  if (layers >= 1) t.models.push_back(score(predict_signs(d.approximation(1), v), v, "pdm_one_layer"));
  if (layers >= 2) t.models.push_back(score(predict_signs(d.approximation(2), v), v, "pdm_two_layer"));
  t.models.push_back(score(minority_model(v), v, "minority"));
  t.random = random_model_summary(v, derive_seed(seed, kEvalStream));
  return t;
}

int cmd_analyze(const RunConfig& config, std::ostream& log, std::ostream& err) {
  return guarded(config, err, [&] {
    if (config.max_layers < 1) throw Error("parameter", "max-layers must be at least 1");
    if (config.null_reps < 1) throw Error("parameter", "null-reps must be at least 1");
    const VoteMatrix v = load_filtered(config, config.minority_threshold);
    log << "loaded " << v.n() << " legislators x " << v.m() << " votes after filtering\n";

    PdmConfig pc;
    pc.sigma = config.sigma;
    pc.null_reps = config.null_reps;
    pc.max_layers = config.max_layers;
    pc.seed = config.seed;
    const Decomposition d = decompose(v, pc);
    log << "layers: " << d.layers.size() << " (stop: " << to_string(d.stop_reason) << ")\n";
    for (const auto& layer : d.layers) {
      log << "  layer " << layer.layer_index << ": k0=" << layer.params.k0 << " l=" << layer.params.l << '\n';
    }

    fs::create_directories(config.out);
    std::vector<std::string> artifacts;
    const RunSettings settings{config.seed, config.minority_threshold, config.sigma, config.null_reps,
                               config.max_layers};
    write_json(config.out / "decomposition.json", decomposition_to_json(d, v, settings));
    artifacts.push_back("decomposition.json");

    // MDS on each layer's approximation, and on the sum of the first two.
    std::vector<DimsRow> dims;
    auto embed = [&](const std::string& series, const Eigen::MatrixXd& approx, const LayerModel& layer,
                     std::uint64_t stream) {
      const auto& rows = layer.clustering.rows;
      if (rows.size() < 2) return;
      const auto dist = pairwise_distances(select_rows(approx, rows));
      auto est = estimate_dimension(dist, derive_seed(derive_seed(config.seed, kMdsStream), stream));
      const std::string name = "mds_" + series + ".csv";
      csv::write_text(config.out / name, mds_plot_csv(v, rows, layer.assignment(v.n()), est.coords_2d));
      artifacts.push_back(name);
      dims.push_back({series, std::move(est)});
    };
    for (const auto& layer : d.layers) {
      embed("layer" + std::to_string(layer.layer_index), layer.approximation, layer,
            static_cast<std::uint64_t>(layer.layer_index));
    }
    if (d.layers.size() >= 2) embed("combined", d.approximation(2), d.layers.front(), 0);
    csv::write_text(config.out / "dims.csv", dims_to_csv(dims));
    artifacts.push_back("dims.csv");

    Json separating = Json::array();
    for (const auto& layer : d.layers) {
      const int k = layer.clustering.k() > 0 ? layer.clustering.k() : layer.params.k0;
      if (k < 2) continue;
      const auto sv = explain_clusters(v, layer.assignment(v.n()), k, config.rounds, config.top_k);
      const std::string name = layer.layer_index == 1
                                   ? "separating_votes.csv"
                                   : "separating_votes_layer" + std::to_string(layer.layer_index) + ".csv";
      csv::write_text(config.out / name, separating_votes_to_csv(sv, v));
      artifacts.push_back(name);
      separating.push_back(separating_votes_to_json(sv, v, layer.layer_index));
    }
    write_json(config.out / "separating_votes.json", Json{{"layers", std::move(separating)}});
    artifacts.push_back("separating_votes.json");

    const auto table = build_eval_table(v, d, config.seed);
    csv::write_text(config.out / "eval.csv", eval_to_csv(table));
    write_json(config.out / "eval.json", eval_to_json(table));
    artifacts.push_back("eval.csv");
    artifacts.push_back("eval.json");
    for (const auto& r : table.models) {
      log << "  " << r.model_name << ": " << csv::format_double(r.percent_correct) << "% correct, APRE "
          << (r.apre ? csv::format_double(*r.apre) : std::string("null")) << '\n';
    }

    artifacts.push_back("manifest.json");
    write_manifest(config, "analyze", config_json(config), artifacts);
    return kExitOk;
  });
}

int cmd_simulate(const RunConfig& config, std::ostream& log, std::ostream& err) {
  std::vector<double> grid;
  try {
    grid = parse_alpha_grid(config.alpha_grid);
    if (config.trials < 1) throw Error("parameter", "trials must be at least 1");
  } catch (const Error& e) {
    report_error(config, err, "usage", e.what());
    return kExitUsage;
  }
  return guarded(config, err, [&] {
    fs::create_directories(config.out);
    const auto summary = run_experiment(grid, config.trials, config.seed);
    std::vector<std::string> artifacts{"sim_summary.csv", "sim_per_alpha.csv", "sim_plot.csv",
                                       "sim_summary.json"};
    csv::write_text(config.out / "sim_summary.csv", sim_summary_csv(summary));
    csv::write_text(config.out / "sim_per_alpha.csv", sim_per_alpha_csv(summary));
    csv::write_text(config.out / "sim_plot.csv", sim_plot_csv(summary));
    write_json(config.out / "sim_summary.json", sim_to_json(summary, config.seed, config.trials));
    if (config.matrix_out) {
      SimConfig sc;
      sc.alpha = grid.front();
      sc.seed = config.seed;
      save_wide_csv(simulate(sc).vote_matrix, *config.matrix_out);
    }
    log << "alphas: " << grid.size() << ", trials per alpha: " << config.trials << '\n'
        << "mean |corr(v1, signed loyalty)|: " << csv::format_double(summary.mean_abs_corr) << '\n'
        << "variance: " << csv::format_double(summary.variance_abs_corr) << '\n';
    Json cfg;
    cfg["alpha_grid"] = config.alpha_grid;
    cfg["trials"] = config.trials;
    cfg["seed"] = config.seed;
    cfg["out"] = config.out.string();
    artifacts.push_back("manifest.json");
    write_manifest(config, "simulate", std::move(cfg), artifacts);
    return kExitOk;
  });
}

int cmd_eval(const RunConfig& config, std::ostream& log, std::ostream& err) {
  return guarded(config, err, [&] {
    const fs::path path = config.decomposition.value_or(config.out / "decomposition.json");
    std::ifstream f(path);
    if (!f) throw Error("io", "cannot open decomposition file " + path.string());
    Json j;
    try {
      j = Json::parse(f);
    } catch (const nlohmann::json::exception& e) {
      throw Error("parse", "decomposition is not valid JSON: " + std::string(e.what()));
    }
    const auto stored = decomposition_from_json(j);
    const VoteMatrix v = load_filtered(config, stored.settings.minority_threshold);
    check_matches(stored, v);
    const auto table = build_eval_table(v, stored.decomposition, stored.settings.seed);
    fs::create_directories(config.out);
    csv::write_text(config.out / "eval.csv", eval_to_csv(table));
    write_json(config.out / "eval.json", eval_to_json(table));
    for (const auto& r : table.models) {
      log << r.model_name << ": " << csv::format_double(r.percent_correct) << "% correct\n";
    }
    return kExitOk;
  });
}

} // namespace pdm
