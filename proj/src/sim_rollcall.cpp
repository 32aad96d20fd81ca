#include "pdm/sim_rollcall.hpp"

#include "pdm/error.hpp"
#include "pdm/graph_spectral.hpp"
#include "pdm/rng.hpp"
#include "pdm/stats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

namespace pdm {

namespace {

double parse_number(const std::string& s) {
  double x = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, x);
  if (ec != std::errc() || ptr != end) throw Error("parameter", "not a number: '" + s + "'");
  return x;
}

double within_variance(const std::vector<double>& a, const std::vector<double>& b) {
  double sum = 0.0;
  int parts = 0;
  for (const auto* g : {&a, &b}) {
    if (g->empty()) continue;
    sum += stats::variance(*g);
    ++parts;
  }
  return parts > 0 ? sum / parts : 0.0;
}

} // namespace

SimResult simulate(const SimConfig& config) {
  if (!(config.alpha > 0.0)) throw Error("parameter", "alpha must be positive");
  if (config.beta != 1.0) throw Error("parameter", "only beta = 1 is supported");
  if (config.n_members < 4) throw Error("parameter", "need at least four members");
  if (config.n_votes < 2) throw Error("parameter", "need at least two votes");

  const int n = config.n_members;
  const int m = config.n_votes;
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Eigen::VectorXd loyalty(n);
  Eigen::VectorXi party(n);
  {
    Rng rng = make_rng(config.seed, 1);
    const double power = std::isinf(config.alpha) ? 0.0 : 1.0 / config.alpha;
    for (int i = 0; i < n; ++i) {
      loyalty(i) = std::pow(unif(rng), power);
      party(i) = i < n / 2 ? 1 : -1;
    }
  }
  Eigen::VectorXi line(m);
  {
    Rng rng = make_rng(config.seed, 2);
    for (int j = 0; j < m; ++j) line(j) = unif(rng) < 0.5 ? 1 : -1;
  }
  VoteValues values(n, m);
  {
    Rng rng = make_rng(config.seed, 3);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) {
        const int party_line = party(i) * line(j);
        values(i, j) = unif(rng) < loyalty(i) ? party_line : -party_line;
      }
    }
  }

  std::vector<Legislator> members;
  for (int i = 0; i < n; ++i) {
    members.push_back({"sim" + std::to_string(i + 1), "member " + std::to_string(i + 1),
                       party(i) > 0 ? "A" : "B", std::nullopt});
  }
  std::vector<std::string> vote_ids;
  for (int j = 0; j < m; ++j) vote_ids.push_back("v" + std::to_string(j + 1));
  VoteMatrix v(std::move(members), std::move(vote_ids), std::move(values));

  const auto graph = build_spectral_graph(v.as_real());
  const Eigen::VectorXd v1 = graph.fiedler_vector();
  Eigen::VectorXd fiedler = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> xs, ys, in_a, in_b;
  for (Index k = 0; k < graph.size(); ++k) {
    const Index i = graph.active_rows[static_cast<std::size_t>(k)];
    fiedler(i) = v1(k);
    xs.push_back(v1(k));
    ys.push_back(loyalty(i) * party(i));
    (party(i) > 0 ? in_a : in_b).push_back(v1(k));
  }

  SimResult out{std::move(v), std::move(loyalty), std::move(party), std::move(fiedler), 0.0, 0.0};
  out.fiedler_loyalty_corr = stats::pearson(xs, ys);
  out.within_party_variance = within_variance(in_a, in_b);
  return out;
}

ExperimentSummary run_experiment(const std::vector<double>& alpha_grid, int n_trials,
                                 std::uint64_t seed, int n_members, int n_votes) {
  if (alpha_grid.empty()) throw Error("parameter", "alpha grid is empty");
  if (n_trials < 1) throw Error("parameter", "need at least one trial");

  const std::size_t g = alpha_grid.size();
  std::vector<std::size_t> plot_index;
  for (std::size_t q = 0; q < 4 && q < g; ++q) {
    const std::size_t idx = g <= 4 ? q : (q * (g - 1)) / 3;
    plot_index.push_back(idx);
  }

  ExperimentSummary s;
  std::vector<double> all_abs;
  std::vector<double> alphas, mean_corr, mean_var;
  for (std::size_t a = 0; a < g; ++a) {
    const double alpha = alpha_grid[a];
    std::vector<double> abs_corr, wvar;
    for (int t = 0; t < n_trials; ++t) {
      SimConfig cfg;
      cfg.n_members = n_members;
      cfg.n_votes = n_votes;
      cfg.alpha = alpha;
      cfg.seed = derive_seed(derive_seed(seed, a), static_cast<std::uint64_t>(t));
      const auto r = simulate(cfg);
      const double c = std::abs(r.fiedler_loyalty_corr);
      s.trials.push_back({alpha, t, c, r.within_party_variance});
      abs_corr.push_back(c);
      wvar.push_back(r.within_party_variance);
      all_abs.push_back(c);
      if (t == 0 && std::find(plot_index.begin(), plot_index.end(), a) != plot_index.end()) {
        for (int i = 0; i < n_members; ++i) {
          s.plot.push_back({alpha, i, r.fiedler(i), r.party(i), r.loyalty(i)});
        }
      }
    }
    s.per_alpha.push_back({alpha, stats::mean(abs_corr), stats::mean(wvar)});
    alphas.push_back(alpha);
    mean_corr.push_back(s.per_alpha.back().mean_abs_corr);
    mean_var.push_back(s.per_alpha.back().mean_within_party_variance);
  }
  s.mean_abs_corr = stats::mean(all_abs);
  s.variance_abs_corr = stats::variance(all_abs);
  if (g >= 2) {
    s.corr_trend = stats::spearman(alphas, mean_corr);
    s.localization_trend = stats::spearman(alphas, mean_var);
  }
  return s;
}

std::vector<double> parse_alpha_grid(const std::string& spec) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = spec.find(':', start);
    parts.push_back(spec.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  std::vector<double> grid;
  if (parts.size() == 1) {
    grid.push_back(parse_number(parts[0]));
  } else if (parts.size() == 3) {
    const double lo = parse_number(parts[0]);
    const double hi = parse_number(parts[1]);
    const double step = parse_number(parts[2]);
    if (!(step > 0.0)) throw Error("parameter", "alpha grid step must be positive");
    if (hi < lo) throw Error("parameter", "alpha grid stop is below its start");
    const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
    for (long k = 0; k < count; ++k) grid.push_back(lo + static_cast<double>(k) * step);
  } else {
    throw Error("parameter", "alpha grid must look like start:stop:step");
  }
  for (double a : grid) {
    if (!(a > 0.0) || !std::isfinite(a)) throw Error("parameter", "alpha must be positive");
  }
  return grid;
}

} // namespace pdm
