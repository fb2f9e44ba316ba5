#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "qentropy/error.hpp"
#include "qentropy/functionals.hpp"
#include "qentropy/io.hpp"
#include "qentropy/rng.hpp"
#include "qentropy/states.hpp"
#include "qentropy/theorems.hpp"

namespace qentropy {

enum class Check { Subadditivity, Multipartite, DivergenceBounds, Monotonicity, Gt3, Proofstep, DataProcessing };

inline constexpr std::array kAllChecks = {Check::Subadditivity, Check::Multipartite, Check::DivergenceBounds,
                                          Check::Monotonicity,  Check::Gt3,          Check::Proofstep,
                                          Check::DataProcessing};

inline std::string_view check_name(Check c) {
  switch (c) {
    case Check::Subadditivity: return "subadditivity";
    case Check::Multipartite: return "multipartite";
    case Check::DivergenceBounds: return "divergence_bounds";
    case Check::Monotonicity: return "monotonicity";
    case Check::Gt3: return "gt3";
    case Check::Proofstep: return "proofstep";
    case Check::DataProcessing: return "data_processing";
  }
  return "unknown";
}

inline std::optional<Check> parse_check(std::string_view name) {
  for (auto c : kAllChecks)
    if (check_name(c) == name) return c;
  return std::nullopt;
}

struct SweepConfig {
  std::vector<Check> checks{kAllChecks.begin(), kAllChecks.end()};
  std::vector<TensorShape> shapes{TensorShape{2, 2}, TensorShape{2, 3}, TensorShape{3, 3}, TensorShape{2, 2, 2}};
  std::size_t trials = 200;
  std::uint64_t seed = 20140307;
  /// Mixing applied to states that must be full rank (monotonicity, gt3, proofstep, sigma
  /// in divergence checks).
  double eps_mix = 1e-6;
  double tolerance = kDefaultTolerance;
  /// Worker threads; results do not depend on it.
  std::size_t threads = 1;
  /// Slater rows for N = 2..slater_n_max; 0 disables.
  std::size_t slater_n_max = 0;
  /// Equality-family trials; 0 disables.
  std::size_t equality_trials = 0;

  void validate() const {
    if (trials == 0) throw Error(ErrorKind::InvalidArgument, "sweep needs trials >= 1");
    if (!(eps_mix >= 0.0 && eps_mix <= 1.0)) throw Error(ErrorKind::InvalidArgument, "eps_mix must lie in [0, 1]");
    if (!(tolerance >= 0.0)) throw Error(ErrorKind::InvalidArgument, "tolerance must be nonnegative");
    if (checks.empty()) throw Error(ErrorKind::InvalidArgument, "sweep needs at least one check");
    if (shapes.empty()) throw Error(ErrorKind::InvalidArgument, "sweep needs at least one shape");
    for (const auto& s : shapes) {
      if (s.size() < 2) throw Error(ErrorKind::InvalidArgument, "sweep shapes need at least two subsystems");
      if (s.total() > kMaxAmbientDim) throw Error(ErrorKind::InvalidArgument, "sweep shape exceeds dimension guard");
    }
  }
};

/// Aggregate over the trials of one (check, shape) pair.
struct CheckStats {
  std::string check;
  std::string shape;
  std::size_t count = 0;
  std::size_t failures = 0;
  std::size_t errors = 0;
  double min_slack = std::numeric_limits<double>::infinity();
  std::map<std::string, double> min_slack_by_label;
  /// Largest residual among those carrying a limit.
  double max_residual = 0.0;
  std::map<std::string, double> max_residual_by_label;
  std::size_t worst_trial = 0;
  std::uint64_t worst_seed = 0;
  std::string first_error;
};

struct SlaterRow {
  std::size_t n = 0;
  double divergence = 0.0;
  double divergence_error = 0.0;   // |D - ln(2N/(N-1))|
  double trace_norm = 0.0;
  double trace_norm_error = 0.0;   // |Tr|rho - sigma| - (N+1)/N|
  double overlap = 0.0;
  double overlap_error = 0.0;      // |-2 ln overlap - D|
  double mutual_information = 0.0;
  double renyi_bound = 0.0;
  double renyi_slack = 0.0;
  double pinsker_bound = 0.0;
  double hs_bound = 0.0;
  bool pass = false;
};

struct Report {
  SweepConfig config;
  std::vector<CheckStats> rows;
  std::optional<CheckStats> equality;
  std::vector<SlaterRow> slater;
  double wall_seconds = 0.0;

  std::size_t total_count() const {
    std::size_t n = slater.size() + (equality ? equality->count : 0);
    for (const auto& r : rows) n += r.count;
    return n;
  }
  std::size_t total_failures() const {
    std::size_t n = equality ? equality->failures : 0;
    for (const auto& r : rows) n += r.failures;
    for (const auto& s : slater) n += s.pass ? 0 : 1;
    return n;
  }
  std::size_t total_errors() const {
    std::size_t n = equality ? equality->errors : 0;
    for (const auto& r : rows) n += r.errors;
    return n;
  }
  bool ok() const { return total_failures() == 0 && total_errors() == 0; }
};

namespace detail {

inline TensorShape bipartite_view(const TensorShape& shape) {
  return shape.size() == 2 ? shape : shape.first_vs_rest();
}

}  // namespace detail

/// Rebuilds the inputs of one trial from its seed and evaluates the certificate.
/// Random draws happen in a fixed order, one statement per draw.
inline Certificate replay_trial(Check check, const TensorShape& shape, std::uint64_t seed, double eps_mix,
                                double tolerance = kDefaultTolerance) {
  SplitMix64 rng(seed);
  const std::size_t dim = shape.total();
  auto draw_state = [&](std::size_t d) {
    const std::size_t rank = 1 + static_cast<std::size_t>(rng.uniform_index(d));
    const std::uint64_t state_seed = rng.next();
    return random_density(d, rank, state_seed);
  };

  switch (check) {
    case Check::Subadditivity: {
      const auto rho = draw_state(dim);
      return subadditivity_certificate(rho, detail::bipartite_view(shape), tolerance);
    }
    case Check::Multipartite: {
      const auto rho = draw_state(dim);
      return multipartite_certificate(rho, shape, tolerance);
    }
    case Check::DivergenceBounds: {
      const auto rho = draw_state(dim);
      const auto sigma = epsilon_mix(draw_state(dim), eps_mix);
      return divergence_bounds_certificate(rho, sigma, tolerance);
    }
    case Check::Monotonicity: {
      const auto rho = epsilon_mix(draw_state(dim), eps_mix);
      const auto sigma = epsilon_mix(draw_state(dim), eps_mix);
      return monotonicity_certificate(rho, sigma, detail::bipartite_view(shape), tolerance);
    }
    case Check::Gt3: {
      const auto bip = detail::bipartite_view(shape);
      const auto sigma12 = epsilon_mix(draw_state(dim), eps_mix);
      const auto rho1 = epsilon_mix(draw_state(bip[0]), eps_mix);
      const auto sigma1 = marginal(sigma12, bip, {0});
      return gt3_certificate(rho1, sigma1, sigma12, bip, tolerance);
    }
    case Check::Proofstep: {
      const auto gibbs = epsilon_mix(draw_state(dim), eps_mix);
      const std::uint64_t a_seed = rng.next();
      const HermitianMatrix h = -1.0 * matrix_fn(gibbs.spectrum(), MatrixFunction::log_on_support());
      return proofstep_certificate(h, random_hermitian(dim, a_seed), tolerance);
    }
    case Check::DataProcessing: {
      const auto rho = draw_state(dim);
      const auto sigma = epsilon_mix(draw_state(dim), eps_mix);
      const std::size_t out = shape[0];
      const std::size_t n_kraus = std::max<std::size_t>(4, (dim + out - 1) / out);
      const std::uint64_t channel_seed = rng.next();
      return data_processing_certificate(rho, sigma, random_channel(dim, out, n_kraus, channel_seed), tolerance);
    }
  }
  throw Error(ErrorKind::InvalidArgument, "unknown check");
}

/// Random block structure for equality trial `seed`: 1-4 blocks, left dims 1-3, a
/// shared right dim of 2-3, weights bounded away from zero.
inline BlockSpec random_block_spec(SplitMix64& rng) {
  BlockSpec spec;
  const std::size_t blocks = 1 + static_cast<std::size_t>(rng.uniform_index(4));
  const std::size_t right = 2 + static_cast<std::size_t>(rng.uniform_index(2));
  double sq = 0.0, sr = 0.0;
  for (std::size_t j = 0; j < blocks; ++j) {
    EqualityBlock b;
    b.left_dim = 1 + static_cast<std::size_t>(rng.uniform_index(3));
    b.right_dim = right;
    b.q = 0.1 + rng.uniform();
    b.r = 0.1 + rng.uniform();
    sq += b.q;
    sr += b.r;
    spec.blocks.push_back(std::move(b));
  }
  for (auto& b : spec.blocks) {
    b.q /= sq;
    b.r /= sr;
  }
  return spec;
}

inline Certificate replay_equality_trial(std::uint64_t seed, double tolerance = kDefaultTolerance) {
  SplitMix64 rng(seed);
  const BlockSpec spec = random_block_spec(rng);
  const std::uint64_t family_seed = rng.next();
  const auto inst = equality_family(spec, family_seed);
  return equality_certificate(inst.rho12, inst.sigma12, inst.shape, tolerance);
}

namespace detail {

struct TrialOutcome {
  std::optional<Certificate> certificate;
  std::string error;
};

inline void accumulate(CheckStats& stats, const TrialOutcome& outcome, std::size_t trial, std::uint64_t seed) {
  ++stats.count;
  if (!outcome.certificate) {
    ++stats.errors;
    if (stats.first_error.empty()) stats.first_error = outcome.error;
    return;
  }
  const auto& c = *outcome.certificate;
  if (!c.pass()) ++stats.failures;
  for (const auto& s : c.slacks) {
    auto [it, inserted] = stats.min_slack_by_label.try_emplace(s.label, s.value);
    if (!inserted) it->second = std::min(it->second, s.value);
  }
  for (const auto& r : c.residuals) {
    auto [it, inserted] = stats.max_residual_by_label.try_emplace(r.label, r.value);
    if (!inserted) it->second = std::max(it->second, r.value);
    if (r.limit) stats.max_residual = std::max(stats.max_residual, r.value);
  }
  const double m = c.min_slack();
  if (m < stats.min_slack) {
    stats.min_slack = m;
    stats.worst_trial = trial;
    stats.worst_seed = seed;
  }
}

template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  for (auto& th : pool) th.join();
}

template <typename Eval>
TrialOutcome guarded(Eval&& eval) {
  try {
    return {eval(), {}};
  } catch (const Error& e) {
    return {std::nullopt, std::string(to_string(e.kind())) + ": " + e.what()};
  }
}

}  // namespace detail

namespace detail {

inline void require_slater_guard(std::size_t n) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "Slater pair needs N >= 2");
  if (n * n > kMaxAmbientDim) {
    std::ostringstream os;
    os << "Slater pair: N = " << n << " needs dimension " << n * n << ", above the memory guard of "
       << kMaxAmbientDim;
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
}

}  // namespace detail

/// Closed-form comparison for one Slater pair. Rejects n < 2 and n^2 > 128.
inline SlaterRow slater_row(std::size_t n, double tolerance = kDefaultTolerance) {
  detail::require_slater_guard(n);
  const auto pair = slater_pair(n);
  const double nd = static_cast<double>(n);
  SlaterRow row;
  row.n = n;
  row.divergence = relative_entropy(pair.rho, pair.sigma).finite_value();
  row.divergence_error = std::abs(row.divergence - std::log(2.0 * nd / (nd - 1.0)));
  row.trace_norm = trace_norm(pair.rho.matrix() - pair.sigma.matrix());
  row.trace_norm_error = std::abs(row.trace_norm - (nd + 1.0) / nd);
  row.overlap = root_overlap(pair.rho, pair.sigma);
  row.overlap_error = std::abs(-2.0 * std::log(row.overlap) - row.divergence);
  const auto cert = subadditivity_certificate(pair.rho, pair.shape, tolerance);
  row.mutual_information = cert.lhs;
  row.renyi_bound = *cert.bound("renyi");
  row.renyi_slack = *cert.slack("renyi");
  row.pinsker_bound = *cert.bound("pinsker");
  row.hs_bound = *cert.bound("hs");
  row.pass = cert.pass() && row.divergence_error <= tolerance && row.trace_norm_error <= tolerance &&
             row.overlap_error <= tolerance && std::abs(row.renyi_slack) <= tolerance;
  return row;
}

/// Slater rows for N = 2..n_max. Rejects n_max < 2 and n_max^2 > 128.
inline std::vector<SlaterRow> slater_rows(std::size_t n_max, double tolerance = kDefaultTolerance) {
  detail::require_slater_guard(n_max);
  std::vector<SlaterRow> rows;
  for (std::size_t n = 2; n <= n_max; ++n) rows.push_back(slater_row(n, tolerance));
  return rows;
}

inline Report run_slater_battery(std::size_t n_max, double tolerance = kDefaultTolerance) {
  const auto start = std::chrono::steady_clock::now();
  Report report;
  report.config.checks.clear();
  report.config.shapes.clear();
  report.config.slater_n_max = n_max;
  report.config.tolerance = tolerance;
  report.slater = slater_rows(n_max, tolerance);
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

/// Runs every (check, shape) pair for `trials` trials. Trial i of every pair draws its
/// inputs from trial_seed(seed, i); evaluator errors are counted per trial.
inline Report run_sweep(const SweepConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  Report report;
  report.config = config;

  const std::size_t pairs = config.checks.size() * config.shapes.size();
  std::vector<detail::TrialOutcome> outcomes(pairs * config.trials);
  detail::parallel_for(outcomes.size(), config.threads, [&](std::size_t job) {
    const std::size_t pair = job / config.trials;
    const std::size_t trial = job % config.trials;
    const Check check = config.checks[pair / config.shapes.size()];
    const TensorShape& shape = config.shapes[pair % config.shapes.size()];
    outcomes[job] = detail::guarded(
        [&] { return replay_trial(check, shape, trial_seed(config.seed, trial), config.eps_mix, config.tolerance); });
  });

  for (std::size_t pair = 0; pair < pairs; ++pair) {
    CheckStats stats;
    stats.check = check_name(config.checks[pair / config.shapes.size()]);
    stats.shape = config.shapes[pair % config.shapes.size()].to_string();
    for (std::size_t trial = 0; trial < config.trials; ++trial)
      detail::accumulate(stats, outcomes[pair * config.trials + trial], trial, trial_seed(config.seed, trial));
    report.rows.push_back(std::move(stats));
  }

  if (config.equality_trials > 0) {
    std::vector<detail::TrialOutcome> eq(config.equality_trials);
    detail::parallel_for(eq.size(), config.threads, [&](std::size_t t) {
      eq[t] = detail::guarded([&] { return replay_equality_trial(trial_seed(config.seed, t), config.tolerance); });
    });
    CheckStats stats;
    stats.check = "equality";
    stats.shape = "blocks";
    for (std::size_t t = 0; t < eq.size(); ++t) detail::accumulate(stats, eq[t], t, trial_seed(config.seed, t));
    report.equality = std::move(stats);
  }

  if (config.slater_n_max > 0) report.slater = slater_rows(config.slater_n_max, config.tolerance);

  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json to_json(const CheckStats& s) {
  using io::number;
  nlohmann::json slack_by = nlohmann::json::object(), residual_by = nlohmann::json::object();
  for (const auto& [k, v] : s.min_slack_by_label) slack_by[k] = number(v);
  for (const auto& [k, v] : s.max_residual_by_label) residual_by[k] = number(v);
  std::ostringstream hex;
  hex << "0x" << std::hex << s.worst_seed;
  return {
      {"check", s.check},
      {"shape", s.shape},
      {"count", s.count},
      {"failures", s.failures},
      {"errors", s.errors},
      {"min_slack", number(s.min_slack)},
      {"min_slack_by_label", std::move(slack_by)},
      {"max_residual", number(s.max_residual)},
      {"max_residual_by_label", std::move(residual_by)},
      {"worst_trial", s.worst_trial},
      {"worst_seed", s.worst_seed},
      {"worst_seed_hex", hex.str()},
      {"first_error", s.first_error},
  };
}

inline nlohmann::json to_json(const SlaterRow& r) {
  return {
      {"n", r.n},
      {"divergence", r.divergence},
      {"divergence_error", r.divergence_error},
      {"trace_norm", r.trace_norm},
      {"trace_norm_error", r.trace_norm_error},
      {"overlap", r.overlap},
      {"overlap_error", r.overlap_error},
      {"mutual_information", r.mutual_information},
      {"renyi_bound", r.renyi_bound},
      {"renyi_slack", r.renyi_slack},
      {"pinsker_bound", r.pinsker_bound},
      {"hs_bound", r.hs_bound},
      {"pass", r.pass},
  };
}

/// Report document. Wall time is left out unless asked for, so identical runs give
/// byte-identical documents.
inline nlohmann::json to_json(const Report& report, bool include_timing = false) {
  nlohmann::json checks = nlohmann::json::array(), shapes = nlohmann::json::array();
  for (auto c : report.config.checks) checks.push_back(check_name(c));
  for (const auto& s : report.config.shapes) shapes.push_back(s.dims());
  nlohmann::json doc = {
      {"config",
       {{"checks", std::move(checks)},
        {"dims", std::move(shapes)},
        {"trials", report.config.trials},
        {"seed", report.config.seed},
        {"eps_mix", report.config.eps_mix},
        {"tolerance", report.config.tolerance},
        {"slater_n_max", report.config.slater_n_max},
        {"equality_trials", report.config.equality_trials}}},
  };
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) rows.push_back(to_json(r));
  doc["checks"] = std::move(rows);
  doc["equality"] = report.equality ? to_json(*report.equality) : nlohmann::json(nullptr);
  nlohmann::json slater = nlohmann::json::array();
  for (const auto& r : report.slater) slater.push_back(to_json(r));
  doc["slater"] = std::move(slater);
  doc["totals"] = {{"count", report.total_count()},
                   {"failures", report.total_failures()},
                   {"errors", report.total_errors()},
                   {"verdict", report.ok() ? "pass" : "fail"}};
  if (include_timing) doc["wall_seconds"] = report.wall_seconds;
  return doc;
}

}  // namespace qentropy
