#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "strichartz/estimators.hpp"
#include "strichartz/extremize.hpp"
#include "strichartz/rng.hpp"
#include "strichartz/theory.hpp"

namespace strichartz {

struct SweepRow {
  std::map<std::string, double> parameters;
  double observed = 0.0;
  std::optional<double> theory_bound_value;
  std::string provenance;  // generator id of the maximizing draw + seed set
  bool ok = true;
  std::string error;
};

struct SweepTable {
  std::string estimate_id;
  std::string axis = "N1";
  std::vector<SweepRow> rows;  // sorted by the primary axis
  std::string policy;
  std::size_t aborted = 0;
};

struct GeneratorPolicy {
  std::vector<DataKind> kinds{DataKind::constant};
  int random_count = 0;
  std::uint64_t base_seed = 1;
};

struct SweepSpec {
  std::string estimate_id;
  std::string axis = "N1";
  std::vector<double> axis_values;
  std::map<std::string, double> fixed;  // alpha, T (<=0: full period), N2, N3, lambda, gamma, p, d
  std::string n2_rule;                  // "", "N1", or use fixed N2
  std::string n3_rule;                  // "", "sqrt", or use fixed N3
  GeneratorPolicy policy;

  void validate() const {
    if (axis_values.empty()) throw std::invalid_argument("sweep: empty axis");
    std::set<double> uniq(axis_values.begin(), axis_values.end());
    if (uniq.size() != axis_values.size())
      throw std::invalid_argument("sweep: duplicate axis point");
    for (double v : axis_values)
      if (!(v >= 1.0) || std::exp2(std::round(std::log2(v))) != v)
        throw std::invalid_argument("sweep: axis points must be dyadic");
  }
};

namespace sweep_detail {

inline double fixed_or(const SweepSpec& s, const std::string& key, double dflt) {
  auto it = s.fixed.find(key);
  return it == s.fixed.end() ? dflt : it->second;
}

// support {1..N}, the truncation convention of the linear constant
inline CoefficientVector interval_data(DataKind kind, double N, const TorusSpec& torus,
                                       std::uint64_t seed, std::string* id) {
  const std::int64_t n = static_cast<std::int64_t>(N * torus.lambda);
  std::vector<CoefficientVector::Entry> e;
  if (kind == DataKind::single_mode) {
    e.emplace_back(Freq(1), cplx{1.0, 0.0});
    *id = "single_mode";
  } else if (kind == DataKind::constant) {
    for (std::int64_t k = 1; k <= n; ++k) e.emplace_back(Freq(k), cplx{1.0, 0.0});
    *id = "constant";
  } else if (kind == DataKind::knapp) {
    const std::int64_t w = std::max<std::int64_t>(1, std::llround(std::sqrt(double(n))));
    for (std::int64_t k = n - w + 1; k <= n; ++k) e.emplace_back(Freq(k), cplx{1.0, 0.0});
    *id = "knapp";
  } else {
    Rng rng(seed);
    for (std::int64_t k = 1; k <= n; ++k) e.emplace_back(Freq(k), rng.next_complex_gaussian());
    *id = "random(seed=" + std::to_string(seed) + ")";
  }
  return CoefficientVector(torus, std::move(e)).normalized();
}

inline double resolve_T(const SweepSpec& spec, double N1) {
  auto it = spec.fixed.find("alpha");
  if (it != spec.fixed.end()) return std::pow(N1, -it->second);
  auto t = spec.fixed.find("T");
  if (t != spec.fixed.end()) return t->second <= 0.0 ? kTwoPi : t->second;
  return kTwoPi;
}

inline std::vector<Freq> ball_points(std::array<double, 2> center, double radius,
                                     const TorusSpec& torus) {
  return FrequencyRegion::ball(center, radius).lattice_points(torus);
}

}  // namespace sweep_detail

// Evaluates one estimate over a dyadic axis: each row takes the maximum
// observed value over the policy's structured and seeded random draws.
// Verifier precondition failures abort the row, not the sweep.
inline SweepTable run_sweep(const SweepSpec& spec, const NormOptions& opts = {}) {
  spec.validate();
  SweepTable table;
  table.estimate_id = spec.estimate_id;
  table.axis = spec.axis;
  {
    std::string p;
    for (DataKind k : spec.policy.kinds) p += std::string(data_kind_name(k)) + "+";
    p += "random*" + std::to_string(spec.policy.random_count) +
         "(seed=" + std::to_string(spec.policy.base_seed) + ")";
    table.policy = p;
  }

  std::vector<double> axis = spec.axis_values;
  std::sort(axis.begin(), axis.end());

  const double lambda = sweep_detail::fixed_or(spec, "lambda", 1.0);
  const double gamma = sweep_detail::fixed_or(spec, "gamma", 1.0);
  const double alpha = sweep_detail::fixed_or(spec, "alpha", 1.0);

  for (std::size_t ri = 0; ri < axis.size(); ++ri) {
    const double N1 = axis[ri];
    SweepRow row;
    row.parameters["N1"] = N1;
    try {
      // per-row draw list: structured kinds then seeded randoms
      struct Draw {
        DataKind kind;
        std::uint64_t seed;
      };
      std::vector<Draw> draws;
      for (DataKind k : spec.policy.kinds) draws.push_back({k, 0});
      for (int i = 0; i < spec.policy.random_count; ++i)
        draws.push_back({DataKind::random,
                         mix_seed(spec.policy.base_seed, ri * 4096 + static_cast<std::uint64_t>(i))});

      double best = -1.0;
      std::string best_id;
      std::optional<double> bound;

      const std::string& id = spec.estimate_id;
      if (id == "linear_lp") {
        const TorusSpec torus(1, lambda);
        const double p = sweep_detail::fixed_or(spec, "p", 6.0);
        const double T = sweep_detail::resolve_T(spec, N1);
        row.parameters["p"] = p;
        row.parameters["T"] = T;
        for (const auto& d : draws) {
          std::string gid;
          const auto data = sweep_detail::interval_data(d.kind, N1, torus, d.seed, &gid);
          const double obs = strichartz_ratio(data, Dispersion::schrodinger(), T, p, opts);
          if (obs > best) {
            best = obs;
            best_id = gid;
          }
        }
        bound = theory_bound("linear_lp", {{"N1", N1}}).value;
      } else if (id == "bilinear_short") {
        const TorusSpec torus(1, lambda);
        const double N2 = sweep_detail::fixed_or(spec, "N2", 16.0);
        const double T = sweep_detail::resolve_T(spec, N1);
        row.parameters["N2"] = N2;
        row.parameters["T"] = T;
        const Dispersion disp = Dispersion::schrodinger();
        for (const auto& d : draws) {
          const auto d1 = structured_data(d.kind, N1, disp, torus, alpha, mix_seed(d.seed, 1));
          const auto d2 = structured_data(d.kind, N2, disp, torus, alpha, mix_seed(d.seed, 2));
          const double obs = bilinear_short_ratio(d1.coeffs, d2.coeffs, disp, T, false, opts);
          if (obs > best) {
            best = obs;
            best_id = d1.generator_id + "|" + d2.generator_id;
          }
        }
        bound = theory_bound("bilinear_short", {{"N1", N1}}).value;
      } else if (id == "trilinear_1d" || id == "trilinear_1d_log") {
        const TorusSpec torus(1, lambda);
        double N2 = spec.n2_rule == "N1" ? N1 : sweep_detail::fixed_or(spec, "N2", N1);
        double N3 = spec.n3_rule == "sqrt"
                        ? std::exp2(std::round(0.5 * std::log2(N1)))
                        : sweep_detail::fixed_or(spec, "N3", 16.0);
        row.parameters["N2"] = N2;
        row.parameters["N3"] = N3;
        row.parameters["alpha"] = alpha;
        const Dispersion disp = Dispersion::schrodinger();
        for (const auto& d : draws) {
          const auto d1 = structured_data(d.kind, N1, disp, torus, alpha, mix_seed(d.seed, 1));
          const auto d2 = structured_data(d.kind, N2, disp, torus, alpha, mix_seed(d.seed, 2));
          const auto d3 = structured_data(d.kind, N3, disp, torus, alpha, mix_seed(d.seed, 3));
          const EstimateReport rep =
              id == "trilinear_1d" ? trilinear_1d(d1.coeffs, d2.coeffs, d3.coeffs, alpha, 0.0, opts)
                                   : trilinear_1d_log(d1.coeffs, d2.coeffs, d3.coeffs, alpha, opts);
          if (rep.observed > best) {
            best = rep.observed;
            best_id = d1.generator_id;
            bound = rep.theory_bound_value;
            row.parameters["beta"] = rep.parameters.at("beta");
          }
        }
      } else if (id == "airy_smoothing" || id == "smoothing_low_p") {
        const int d_dim = static_cast<int>(sweep_detail::fixed_or(spec, "d", 1.0));
        const TorusSpec torus(d_dim, lambda, d_dim == 2 ? gamma : 1.0);
        const double p = sweep_detail::fixed_or(spec, "p", id == "airy_smoothing" ? 6.0 : 4.0);
        row.parameters["alpha"] = alpha;
        row.parameters["p"] = p;
        const Dispersion disp =
            id == "airy_smoothing" ? Dispersion::airy() : Dispersion::schrodinger();
        const SmoothingKind kind =
            id == "airy_smoothing" ? SmoothingKind::airy : SmoothingKind::schrodinger_low_p;
        for (const auto& d : draws) {
          const auto data = structured_data(d.kind, N1, disp, torus, alpha, d.seed);
          const EstimateReport rep = smoothing_ratio(kind, N1, alpha, p, data.coeffs, opts);
          if (rep.observed > best) {
            best = rep.observed;
            best_id = data.generator_id;
            bound = rep.theory_bound_value;
          }
        }
      } else if (id == "rescaled_bilinear_1d" || id == "rescaled_trilinear_1d") {
        const TorusSpec torus(1, lambda);
        const double N2 = sweep_detail::fixed_or(spec, "N2", 16.0);
        row.parameters["N2"] = N2;
        row.parameters["lambda"] = lambda;
        const Dispersion disp = Dispersion::schrodinger();
        for (const auto& d : draws) {
          const auto d1 = structured_data(d.kind, N1, disp, torus, alpha, mix_seed(d.seed, 1));
          const auto d2 = structured_data(d.kind, N2, disp, torus, alpha, mix_seed(d.seed, 2));
          const EstimateReport rep = id == "rescaled_bilinear_1d"
                                         ? rescaled_verify_bilinear_1d(d1.coeffs, d2.coeffs, opts)
                                         : rescaled_verify_trilinear_1d(d1.coeffs, d2.coeffs, 0.0, opts);
          if (rep.observed > best) {
            best = rep.observed;
            best_id = d1.generator_id;
            bound = rep.theory_bound_value;
          }
        }
      } else if (id == "square_function_gap") {
        const TorusSpec torus(1, lambda);
        const double T = sweep_detail::resolve_T(spec, N1);
        const std::int64_t block =
            static_cast<std::int64_t>(sweep_detail::fixed_or(spec, "block", std::sqrt(N1)));
        row.parameters["T"] = T;
        row.parameters["block"] = static_cast<double>(block);
        const Dispersion disp = Dispersion::schrodinger();
        const double N2 = sweep_detail::fixed_or(spec, "N2", N1 / 4.0);
        for (const auto& d : draws) {
          const auto d1 = structured_data(d.kind, N1, disp, torus, alpha, mix_seed(d.seed, 1));
          const auto d2 = structured_data(d.kind, N2, disp, torus, alpha, mix_seed(d.seed, 2));
          const double obs = square_function_gap(d1.coeffs, d2.coeffs, block, T, opts);
          if (obs > best) {
            best = obs;
            best_id = d1.generator_id;
          }
        }
        bound = theory_bound("square_function_gap", {}).value;
      } else if (id == "trilinear_2d" || id == "rescaled_trilinear_2d") {
        const TorusSpec torus(2, lambda, gamma);
        const double N3 = sweep_detail::fixed_or(spec, "N3", 8.0);
        row.parameters["N3"] = N3;
        row.parameters["alpha"] = alpha;
        row.parameters["gamma"] = gamma;
        const std::array<std::array<double, 2>, 3> centers = {
            {{N1, 0.0}, {0.0, N1}, {0.0, 0.0}}};
        for (const auto& d : draws) {
          CoefficientVector cs[3];
          for (int i = 0; i < 3; ++i) {
            const auto pts = sweep_detail::ball_points(centers[i], N3, torus);
            if (d.kind == DataKind::random) {
              Rng rng(mix_seed(d.seed, static_cast<std::uint64_t>(i)));
              std::vector<CoefficientVector::Entry> e;
              for (const Freq& k : pts) e.emplace_back(k, rng.next_complex_gaussian());
              cs[i] = CoefficientVector(torus, std::move(e)).normalized();
            } else {
              cs[i] = gen_detail::normalized_indicator(torus, pts);
            }
          }
          const EstimateReport rep = id == "trilinear_2d"
                                         ? trilinear_2d(cs[0], cs[1], cs[2], alpha, opts)
                                         : rescaled_verify_trilinear_2d(cs[0], cs[1], cs[2], opts);
          if (rep.observed > best) {
            best = rep.observed;
            best_id = std::string(data_kind_name(d.kind));
            bound = rep.theory_bound_value;
            row.parameters["nu"] = rep.parameters.at("nu");
          }
        }
      } else {
        throw std::invalid_argument("sweep: unknown estimate id '" + id + "'");
      }

      row.observed = best;
      row.theory_bound_value = bound;
      row.provenance = "max@" + best_id;
    } catch (const PreconditionError& e) {
      row.ok = false;
      row.error = e.what();
      ++table.aborted;
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

// ---------------------------------------------------------------------------
// scaling fits
// ---------------------------------------------------------------------------

enum class FitModel { power_only, power_plus_log, auto_select };

struct ScalingFit {
  double gamma = 0.0;
  double c_log = 0.0;
  double b = 0.0;
  double residual_rms = 0.0;
  std::string model = "power_only";
};

namespace sweep_detail {

// least squares of y on columns {log N, [log log N], 1}
inline ScalingFit lsq_fit(const std::vector<double>& n, const std::vector<double>& y,
                          bool with_log) {
  const std::size_t rows = n.size();
  const int cols = with_log ? 3 : 2;
  double ata[3][3] = {{0}};
  double atb[3] = {0};
  for (std::size_t i = 0; i < rows; ++i) {
    const double x0 = std::log(n[i]);
    const double x1 = with_log ? std::log(std::log(n[i])) : 0.0;
    const double phi[3] = {x0, with_log ? x1 : 1.0, 1.0};
    for (int a = 0; a < cols; ++a) {
      for (int b2 = 0; b2 < cols; ++b2) ata[a][b2] += phi[a] * phi[b2];
      atb[a] += phi[a] * y[i];
    }
  }
  // gaussian elimination with partial pivoting
  double m[3][4];
  for (int a = 0; a < cols; ++a) {
    for (int b2 = 0; b2 < cols; ++b2) m[a][b2] = ata[a][b2];
    m[a][cols] = atb[a];
  }
  for (int col = 0; col < cols; ++col) {
    int piv = col;
    for (int r2 = col + 1; r2 < cols; ++r2)
      if (std::abs(m[r2][col]) > std::abs(m[piv][col])) piv = r2;
    if (std::abs(m[piv][col]) < 1e-12)
      throw std::invalid_argument("fit: degenerate design matrix (all N equal?)");
    std::swap_ranges(m[col], m[col] + cols + 1, m[piv]);
    for (int r2 = 0; r2 < cols; ++r2) {
      if (r2 == col) continue;
      const double f = m[r2][col] / m[col][col];
      for (int c2 = col; c2 <= cols; ++c2) m[r2][c2] -= f * m[col][c2];
    }
  }
  ScalingFit fit;
  fit.gamma = m[0][cols] / m[0][0];
  if (with_log) {
    fit.c_log = m[1][cols] / m[1][1];
    fit.b = m[2][cols] / m[2][2];
    fit.model = "power_plus_log";
  } else {
    fit.b = m[1][cols] / m[1][1];
  }
  double ss = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    const double pred = fit.gamma * std::log(n[i]) +
                        (with_log ? fit.c_log * std::log(std::log(n[i])) : 0.0) + fit.b;
    ss += (y[i] - pred) * (y[i] - pred);
  }
  fit.residual_rms = std::sqrt(ss / static_cast<double>(rows));
  return fit;
}

}  // namespace sweep_detail

// Least squares of log(observed) = gamma log N + c log log N + b over the
// valid rows. auto_select keeps the simpler model unless the log term
// improves the residual by more than 5%.
inline ScalingFit fit_scaling(const SweepTable& table, FitModel model = FitModel::power_only) {
  std::vector<double> n, y;
  for (const auto& row : table.rows) {
    if (!row.ok) continue;  // aborted rows are excluded from fits
    if (!(row.observed > 0.0)) throw std::invalid_argument("fit: observed values must be positive");
    n.push_back(row.parameters.at(table.axis));
    y.push_back(std::log(row.observed));
  }
  if (n.size() < 4) throw std::invalid_argument("fit: at least 4 rows required");
  if (model == FitModel::power_only) return sweep_detail::lsq_fit(n, y, false);
  if (model == FitModel::power_plus_log) return sweep_detail::lsq_fit(n, y, true);
  const ScalingFit simple = sweep_detail::lsq_fit(n, y, false);
  const ScalingFit full = sweep_detail::lsq_fit(n, y, true);
  return full.residual_rms < 0.95 * simple.residual_rms ? full : simple;
}

// ---------------------------------------------------------------------------
// emission
// ---------------------------------------------------------------------------

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string table_to_csv(const SweepTable& table) {
  std::set<std::string> keys;
  for (const auto& row : table.rows)
    for (const auto& [k, v] : row.parameters) keys.insert(k);
  std::string out;
  for (const auto& k : keys) out += k + ",";
  out += "observed,theory_bound,provenance\n";
  for (const auto& row : table.rows) {
    for (const auto& k : keys) {
      auto it = row.parameters.find(k);
      out += (it == row.parameters.end() ? "" : format_double(it->second)) + std::string(",");
    }
    if (row.ok) {
      out += format_double(row.observed) + ",";
      out += (row.theory_bound_value ? format_double(*row.theory_bound_value) : "") + std::string(",");
      out += row.provenance;
    } else {
      out += ",,error:" + row.error;
    }
    out += "\n";
  }
  return out;
}

inline nlohmann::json table_to_json(const SweepTable& table) {
  nlohmann::json j;
  j["estimate_id"] = table.estimate_id;
  j["axis"] = table.axis;
  j["policy"] = table.policy;
  j["aborted"] = table.aborted;
  auto rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json r;
    r["parameters"] = row.parameters;
    if (row.ok) {
      r["observed"] = row.observed;
      if (row.theory_bound_value)
        r["theory_bound"] = *row.theory_bound_value;
      else
        r["theory_bound"] = nullptr;
      r["provenance"] = row.provenance;
    } else {
      r["error"] = row.error;
    }
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j;
}

inline nlohmann::json fit_to_json(const ScalingFit& fit) {
  return {{"model", fit.model},
          {"gamma", fit.gamma},
          {"c_log", fit.c_log},
          {"b", fit.b},
          {"residual_rms", fit.residual_rms}};
}

}  // namespace strichartz
