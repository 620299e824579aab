#pragma once

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "mqs/loss_channel.hpp"
#include "mqs/metrics.hpp"
#include "mqs/ofilter.hpp"
#include "mqs/states.hpp"

namespace mqs {

enum class Family { coherent_mqs, coherent_pointer, noon, qiopa_equatorial, qiopa_hv, qiopa_ofiltered };

inline constexpr std::array<std::pair<Family, std::string_view>, 6> kFamilyNames{{
    {Family::coherent_mqs, "coherent_mqs"},
    {Family::coherent_pointer, "coherent_pointer"},
    {Family::noon, "noon"},
    {Family::qiopa_equatorial, "qiopa_equatorial"},
    {Family::qiopa_hv, "qiopa_hv"},
    {Family::qiopa_ofiltered, "qiopa_ofiltered"},
}};

inline std::string_view to_string(Family f) {
  for (const auto& [k, v] : kFamilyNames)
    if (k == f) return v;
  return "unknown";
}

inline Family parse_family(std::string_view s) {
  for (const auto& [k, v] : kFamilyNames)
    if (v == s) return k;
  throw ConfigError("unknown family '" + std::string(s) + "'");
}

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct SweepConfig {
  Family family = Family::coherent_mqs;
  std::vector<double> alpha;
  std::vector<double> phi;
  std::vector<int> N;
  std::vector<double> g;
  std::vector<int> k;
  std::vector<double> r_grid;
  std::optional<int> n_max;  // derived from the tail bound when empty
  double tail_tolerance = 1e-10;
  std::string output_path = "-";
  unsigned workers = 0;  // 0: hardware concurrency

  // Fills unset family parameters with the defaults.
  void apply_defaults() {
    const bool coherent = family == Family::coherent_mqs || family == Family::coherent_pointer;
    const bool qiopa = family == Family::qiopa_equatorial || family == Family::qiopa_hv ||
                       family == Family::qiopa_ofiltered;
    if (coherent && alpha.empty()) alpha = {4.0};
    if (family == Family::coherent_mqs && phi.empty()) phi = {std::numbers::pi / 2};
    if ((family == Family::qiopa_equatorial || family == Family::qiopa_ofiltered) && phi.empty()) phi = {0.0};
    if (family == Family::noon && N.empty()) N = {2, 4, 8};
    if (qiopa && g.empty()) g = family == Family::qiopa_ofiltered ? std::vector<double>{0.8} : std::vector<double>{0.8, 1.1, 1.3};
    if (family == Family::qiopa_ofiltered && k.empty()) k = {0, 4, 6, 8};
    if (r_grid.empty())
      for (int i = 0; i <= 20; ++i) r_grid.push_back(i / 20.0);
  }

  void check() const {
    if (r_grid.empty()) throw ConfigError("r_grid is empty");
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
      if (!(r_grid[i] >= 0.0 && r_grid[i] <= 1.0)) throw ConfigError("r_grid values must lie in [0, 1]");
      if (i > 0 && !(r_grid[i] > r_grid[i - 1])) throw ConfigError("r_grid must be strictly ascending");
    }
    if (n_max && *n_max < 0) throw ConfigError("n_max must be >= 0");
    if (!(tail_tolerance > 0.0 && tail_tolerance < 1.0)) throw ConfigError("tail_tolerance must lie in (0, 1)");
    auto need = [&](bool present, const char* name) {
      if (!present) throw ConfigError(std::string("family ") + std::string(to_string(family)) + " requires " + name);
    };
    switch (family) {
      case Family::coherent_mqs: need(!phi.empty(), "phi"); [[fallthrough]];
      case Family::coherent_pointer: need(!alpha.empty(), "alpha"); break;
      case Family::noon: need(!N.empty(), "N"); break;
      case Family::qiopa_ofiltered: need(!k.empty(), "k"); [[fallthrough]];
      case Family::qiopa_equatorial: need(!phi.empty(), "phi"); [[fallthrough]];
      case Family::qiopa_hv: need(!g.empty(), "g"); break;
    }
    for (double a : alpha)
      if (!(a >= 0.0)) throw ConfigError("alpha must be >= 0");
    for (int n : N)
      if (n < 1) throw ConfigError("N must be >= 1");
    for (double x : g)
      if (!(x > 0.0)) throw ConfigError("g must be > 0");
    for (int x : k)
      if (x < 0) throw ConfigError("k must be >= 0");
    for (double x : phi) {
      const double hi = family == Family::coherent_mqs ? std::numbers::pi : 2 * std::numbers::pi;
      if (!(x >= 0.0 && (family == Family::coherent_mqs ? x <= hi : x < hi)))
        throw ConfigError("phi out of range for family");
    }
  }
};

struct SweepPoint {
  Family family = Family::coherent_mqs;
  double alpha = kNaN;
  double phi = kNaN;
  int N = -1;
  double g = kNaN;
  int k = -1;
  double R = 0.0;
};

struct SweepResult {
  SweepPoint point;
  int n_max = -1;
  double x = kNaN;
  double D = kNaN;
  double fidelity = kNaN;
  double success_probability = kNaN;
  double mean_photons_out = kNaN;
  double D_reference = kNaN;  // closed-form law where one exists
  std::string error;

  bool ok() const { return error.empty(); }
};

inline constexpr std::string_view kCsvHeader =
    "family,alpha,phi,N,g,k,n_max,R,x,D,fidelity,success_probability,mean_photons_out,D_reference,status";

// Rows in grid order: parameter combinations outermost, R innermost.
inline std::vector<SweepPoint> expand_grid(const SweepConfig& cfg) {
  auto or_nan = [](const std::vector<double>& v) { return v.empty() ? std::vector<double>{kNaN} : v; };
  auto or_none = [](const std::vector<int>& v) { return v.empty() ? std::vector<int>{-1} : v; };
  std::vector<SweepPoint> out;
  for (double a : or_nan(cfg.alpha))
    for (double ph : or_nan(cfg.phi))
      for (int n : or_none(cfg.N))
        for (double g : or_nan(cfg.g))
          for (int k : or_none(cfg.k))
            for (double R : cfg.r_grid) out.push_back({cfg.family, a, ph, n, g, k, R});
  return out;
}

inline int sweep_n_max(const SweepPoint& pt, const std::optional<int>& fixed, double tol) {
  if (fixed) return *fixed;
  switch (pt.family) {
    case Family::coherent_mqs:
      return required_n_max([&](int n) { return coherent_mqs_pair_tail(pt.alpha, pt.phi, n); }, tol);
    case Family::coherent_pointer:
      return required_n_max([&](int n) { return coherent_tail(pt.alpha, n); }, tol);
    case Family::noon: return pt.N;
    case Family::qiopa_hv: return required_n_max([&](int n) { return qiopa_pi_tail(pt.g, n); }, tol);
    default: return required_n_max([&](int n) { return qiopa_equatorial_tail(pt.g, n); }, tol);
  }
}

inline double factor_mean_photons(const ModeFactors& f) {
  double na = 0.0, nb = 0.0;
  for (Index i = 0; i < f.a.rows(); ++i) na += i * f.a(i, i).real();
  for (Index i = 0; i < f.b.rows(); ++i) nb += i * f.b(i, i).real();
  return na * f.b.trace().real() + nb * f.a.trace().real();
}

inline SweepResult evaluate_point(const SweepPoint& pt, const std::optional<int>& fixed_n_max, double tol) {
  SweepResult r;
  r.point = pt;
  try {
    const ChannelParams ch = ChannelParams::from_reflectivity(pt.R);
    r.n_max = sweep_n_max(pt, fixed_n_max, tol);
    const TruncationConfig cfg{r.n_max, tol};
    DistanceReport rep;
    r.success_probability = 1.0;
    switch (pt.family) {
      case Family::coherent_mqs: {
        const auto rp = coherent_mqs_lossy_density({pt.alpha, pt.phi, Sign::plus}, ch, cfg);
        const auto rm = coherent_mqs_lossy_density({pt.alpha, pt.phi, Sign::minus}, ch, cfg);
        rep = bures_distance(rp, rm);
        r.x = pt.R * pt.alpha * pt.alpha * std::pow(std::sin(pt.phi), 2);
        r.mean_photons_out = mean_photon_number(rp);
        r.D_reference = coherent_mqs_distance_analytic(pt.alpha, pt.phi, pt.R);
        break;
      }
      case Family::coherent_pointer: {
        const cplx b = coherent_loss_analytic(pt.alpha, ch);
        const auto rp = pure_to_density(coherent_state_vector(b, cfg));
        const auto rm = pure_to_density(coherent_state_vector(-b, cfg));
        rep = bures_distance(rp, rm);
        r.x = pt.R * pt.alpha * pt.alpha;
        r.mean_photons_out = mean_photon_number(rp);
        r.D_reference = coherent_pointer_distance(pt.alpha, ch.T);
        break;
      }
      case Family::noon: {
        const auto rp = apply_loss_two_mode(noon_state_vector({pt.N, Sign::plus}, cfg), ch, cfg);
        const auto rm = apply_loss_two_mode(noon_state_vector({pt.N, Sign::minus}, cfg), ch, cfg);
        rep = bures_distance(rp, rm);
        r.x = pt.R * pt.N;
        r.mean_photons_out = mean_photon_number(rp);
        r.D_reference = noon_distances({pt.N, Sign::plus}, pt.R).mqs;
        break;
      }
      case Family::qiopa_equatorial: {
        const QiopaParams p{pt.g, pt.phi};
        rep = qiopa_equatorial_distance(p, ch, cfg);
        r.x = pt.R * qiopa_mean_photon_number(pt.g);
        r.mean_photons_out = factor_mean_photons(qiopa_equatorial_lossy_factors(p, ch, cfg.n_max));
        break;
      }
      case Family::qiopa_hv: {
        const QiopaParams p{pt.g, 0.0};
        rep = qiopa_hv_distance(p, ch, cfg);
        r.x = pt.R * qiopa_mean_photon_number(pt.g);
        double n = 0.0;
        for (const auto& s : qiopa_hv_lossy_sectors(p, ch, cfg.n_max))
          for (std::size_t i = 0; i < s.basis.size(); ++i) {
            const auto [a, b] = two_mode_index(s.basis[i], cfg);
            n += (a + b) * s.block(i, i).real();
          }
        r.mean_photons_out = n;
        break;
      }
      case Family::qiopa_ofiltered: {
        const auto f = qiopa_ofiltered_distance({pt.g, pt.phi}, ch, cfg, OFilterParams{pt.k});
        rep = f.report;
        r.x = pt.R * qiopa_mean_photon_number(pt.g);
        r.success_probability = f.success_rho;
        r.mean_photons_out = f.mean_photons_rho;
        break;
      }
    }
    r.D = rep.bures;
    r.fidelity = rep.fidelity;
  } catch (const std::exception& e) {
    r.error = e.what();
    r.x = r.D = r.fidelity = r.success_probability = r.mean_photons_out = kNaN;
  }
  return r;
}

inline unsigned resolve_workers(unsigned requested) {
  unsigned w = requested;
  if (const char* env = std::getenv("MQS_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) throw ConfigError("MQS_WORKERS must be a positive integer");
    w = static_cast<unsigned>(v);
  }
  if (w == 0) w = std::max(1u, std::thread::hardware_concurrency());
  return w;
}

inline std::vector<SweepResult> run_sweep(SweepConfig cfg) {
  cfg.apply_defaults();
  cfg.check();
  const auto points = expand_grid(cfg);
  std::vector<SweepResult> rows(points.size());
  const unsigned workers = std::min<unsigned>(resolve_workers(cfg.workers), std::max<std::size_t>(1, points.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < points.size();)
      rows[i] = evaluate_point(points[i], cfg.n_max, cfg.tail_tolerance);
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return rows;
}

inline std::string csv_number(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline void write_csv(std::ostream& os, const std::vector<SweepResult>& rows) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    const auto& p = r.point;
    os << to_string(p.family) << ',' << csv_number(p.alpha) << ',' << csv_number(p.phi) << ','
       << (p.N >= 0 ? std::to_string(p.N) : "") << ',' << csv_number(p.g) << ','
       << (p.k >= 0 ? std::to_string(p.k) : "") << ',' << (r.n_max >= 0 ? std::to_string(r.n_max) : "") << ','
       << csv_number(p.R) << ',' << csv_number(r.x) << ',' << csv_number(r.D) << ',' << csv_number(r.fidelity)
       << ',' << csv_number(r.success_probability) << ',' << csv_number(r.mean_photons_out) << ','
       << csv_number(r.D_reference) << ',' << (r.ok() ? std::string("ok") : csv_quote("error: " + r.error))
       << '\n';
  }
}

}  // namespace mqs
