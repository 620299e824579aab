#pragma once

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "mqs/loss_channel.hpp"
#include "mqs/metrics.hpp"
#include "mqs/ofilter.hpp"
#include "mqs/states.hpp"

namespace mqs {

struct CheckResult {
  std::string name;
  bool passed = false;
  double observed = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  double seconds = 0.0;
  bool over_budget = false;

  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
};

using ClosedForm = std::function<Eigen::MatrixXcd(const QiopaParams&, ChannelParams, int)>;

struct ValidationHooks {
  ClosedForm equatorial_closed_form = [](const QiopaParams& p, ChannelParams ch, int n) {
    return qiopa_equatorial_lossy_elements(p, ch, n);
  };
  ClosedForm hv_closed_form = [](const QiopaParams& p, ChannelParams ch, int n) {
    return qiopa_hv_lossy_elements(p, ch, n);
  };
};

struct ValidationOptions {
  int n_max = 40;          // output grid of the closed-form comparisons
  double max_gain = 0.8;
  double tail_tolerance = 1e-10;
  double budget_seconds = 600.0;
};

// Truncation of a source state whose missing amplitudes cannot reach the compared elements.
inline constexpr double kOracleSourceTail = 1e-24;

inline Eigen::MatrixXcd random_density(int dim, std::mt19937_64& rng, int rank = 0) {
  std::normal_distribution<double> n01;
  const int r = rank > 0 ? rank : dim;
  Eigen::MatrixXcd a(dim, r);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < r; ++j) a(i, j) = cplx(n01(rng), n01(rng));
  Eigen::MatrixXcd rho = a * a.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

inline ValidationReport validate(const ValidationOptions& opt = {}, const ValidationHooks& hooks = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  ValidationReport rep;
  auto check_le = [&](std::string name, double observed, double tol, std::string detail = {}) {
    rep.checks.push_back({std::move(name), observed <= tol, observed, 0.0, tol, std::move(detail)});
  };
  auto check_close = [&](std::string name, double observed, double expected, double tol) {
    rep.checks.push_back({std::move(name), std::abs(observed - expected) <= tol, observed, expected, tol, {}});
  };
  auto guarded = [&](const std::string& name, auto&& body) {
    try {
      body();
    } catch (const std::exception& e) {
      rep.checks.push_back({name, false, kNaN, kNaN, 0.0, e.what()});
    }
  };
  auto tag = [](const char* base, double a, double b) {
    return std::string(base) + "[" + detail::fmt(a) + "," + detail::fmt(b) + "]";
  };
  const int n = opt.n_max;
  const std::vector<double> gains = opt.max_gain >= 0.8 ? std::vector<double>{0.4, 0.8} : std::vector<double>{opt.max_gain};

  guarded("kraus_completeness", [&] {
    double worst = 0.0;
    for (double T : {0.0, 0.1, 0.5, 0.9, 1.0}) worst = std::max(worst, build_kraus_set({T}, {n}).completeness_defect());
    check_le("kraus_completeness", worst, 1e-12);
  });

  guarded("beam_splitter_oracle", [&] {
    std::mt19937_64 rng(7);
    double worst = 0.0;
    for (double T : {0.2, 0.7}) {
      const Eigen::MatrixXcd r1 = random_density(6, rng);
      worst = std::max(worst, (beam_splitter_loss_single_mode(r1, {T}) - apply_loss_single_mode(r1, {T}, 5))
                                  .cwiseAbs().maxCoeff());
      const Eigen::MatrixXcd r2 = random_density(16, rng);
      worst = std::max(worst, (beam_splitter_loss_two_mode(r2, {T}, 3) - apply_loss_two_mode(r2, {T}, 3, 3))
                                  .cwiseAbs().maxCoeff());
    }
    check_le("beam_splitter_oracle", worst, 1e-12);
  });

  for (double g : gains)
    for (double T : {0.1, 0.5, 0.9}) {
      const std::string nm = tag("equatorial_closed_form_vs_kraus", g, T);
      guarded(nm, [&] {
        const QiopaParams p{g, 0.3};
        const int ns = required_n_max([&](int m) { return qiopa_equatorial_tail(g, m); }, kOracleSourceTail, n);
        const auto f = qiopa_equatorial_factors(p, ns);
        const Eigen::MatrixXcd oracle = apply_loss_two_mode_pure(kron(f.a, f.b), {T}, ns, n);
        check_le(nm, (hooks.equatorial_closed_form(p, {T}, n) - oracle).cwiseAbs().maxCoeff(), 1e-8);
      });
    }

  for (double g : gains)
    for (double T : {0.1, 0.5, 0.9}) {
      const std::string nm = tag("hv_closed_form_vs_kraus", g, T);
      guarded(nm, [&] {
        const QiopaParams p{g, 0.0};
        const int ns = required_n_max([&](int m) { return qiopa_pi_tail(g, m); }, kOracleSourceTail, n);
        const Eigen::MatrixXcd oracle = apply_loss_two_mode_pure(qiopa_pi_amplitudes(p, ns), {T}, ns, n);
        check_le(nm, (hooks.hv_closed_form(p, {T}, n) - oracle).cwiseAbs().maxCoeff(), 1e-8);
      });
    }

  guarded("coherent_closed_form_vs_kraus", [&] {
    const TruncationConfig cfg{n, opt.tail_tolerance};
    const auto p = canonical_cat(2.0, Sign::plus);
    const auto ch = ChannelParams::from_reflectivity(0.1);
    const auto oracle = apply_loss(coherent_mqs_vector(p, cfg), ch, cfg);
    check_le("coherent_closed_form_vs_kraus",
             (coherent_mqs_lossy_elements(p, ch, n) - oracle.entries()).cwiseAbs().maxCoeff(), 1e-8);
  });

  guarded("coherent_cat_normalized_law", [&] {
    const TruncationConfig cfg{n, opt.tail_tolerance};
    double worst = 0.0;
    for (double a : {1.0, 2.0, 3.0})
      for (double R : {0.05, 0.1, 0.3, 0.7}) {
        const auto ch = ChannelParams::from_reflectivity(R);
        const auto rp = apply_loss(coherent_mqs_vector(canonical_cat(a, Sign::plus), cfg), ch, cfg);
        const auto rm = apply_loss(coherent_mqs_vector(canonical_cat(a, Sign::minus), cfg), ch, cfg);
        const double f = std::sqrt(std::expm1(-4.0 * R * a * a) / std::expm1(-4.0 * a * a));
        worst = std::max(worst, std::abs(bures_distance(rp, rm).fidelity - f));
      }
    check_le("coherent_cat_normalized_law", worst, 1e-12);
  });

  guarded("coherent_visibility_headline", [&] {
    const TruncationConfig cfg{
        required_n_max([](int m) { return coherent_mqs_pair_tail(4.0, std::numbers::pi / 2, m); }, opt.tail_tolerance),
        opt.tail_tolerance};
    const auto ch = ChannelParams::from_reflectivity(1.0 / 16);
    const auto rp = coherent_mqs_lossy_density(canonical_cat(4.0, Sign::plus), ch, cfg);
    const auto rm = coherent_mqs_lossy_density(canonical_cat(4.0, Sign::minus), ch, cfg);
    const double D = bures_distance(rp, rm).bures;
    check_close("coherent_visibility_law_x1", D, coherent_mqs_distance_analytic(4.0, std::numbers::pi / 2, 1.0 / 16), 1e-6);
    check_close("coherent_visibility_headline", D, 0.096, 1e-3);
  });

  guarded("coherent_pointer_distance", [&] {
    const TruncationConfig cfg{n, opt.tail_tolerance};
    double worst = 0.0;
    for (double a : {1.0, 2.0, 3.0})
      for (double R : {0.05, 0.1, 0.3, 0.7}) {
        const auto ch = ChannelParams::from_reflectivity(R);
        const auto rp = apply_loss(pure_to_density(coherent_state_vector(a, cfg)), ch);
        const auto rm = apply_loss(pure_to_density(coherent_state_vector(-a, cfg)), ch);
        worst = std::max(worst, std::abs(bures_distance(rp, rm).bures - coherent_pointer_distance(a, ch.T)));
      }
    check_le("coherent_pointer_distance", worst, 1e-6);
  });

  guarded("noon_laws", [&] {
    double wp = 0.0, wm = 0.0;
    for (int N : {2, 4, 8})
      for (double R : {0.1, 0.5, 0.9}) {
        const TruncationConfig cfg{N, opt.tail_tolerance};
        const auto ch = ChannelParams::from_reflectivity(R);
        const auto a = apply_loss_two_mode(pure_to_density(basis_state(TwoModeIndex{N, 0}, cfg)), ch);
        const auto b = apply_loss_two_mode(pure_to_density(basis_state(TwoModeIndex{0, N}, cfg)), ch);
        const auto sp = apply_loss_two_mode(noon_state_vector({N, Sign::plus}, cfg), ch, cfg);
        const auto sm = apply_loss_two_mode(noon_state_vector({N, Sign::minus}, cfg), ch, cfg);
        const auto ref = noon_distances({N}, R);
        wp = std::max(wp, std::abs(bures_distance(a, b).bures - ref.pointer));
        wm = std::max(wm, std::abs(bures_distance(sp, sm).bures - ref.mqs));
      }
    check_le("noon_pointer_law", wp, 1e-6);
    check_le("noon_mqs_law", wm, 1e-6);
  });

  guarded("superposition_identity", [&] {
    const double g = opt.max_gain;
    const TruncationConfig cfg{required_n_max([&](int m) { return qiopa_equatorial_tail(g, m); }, opt.tail_tolerance),
                               opt.tail_tolerance};
    double worst = 0.0;
    for (double phi : {0.0, std::numbers::pi / 4, std::numbers::pi / 2, std::numbers::pi})
      worst = std::max(worst, qiopa_superposition_identity_check(g, phi, cfg));
    check_le("superposition_identity", worst, 1e-8);
  });

  guarded("phase_covariance", [&] {
    const double g = opt.max_gain;
    const TruncationConfig cfg{required_n_max([&](int m) { return qiopa_equatorial_tail(g, m); }, opt.tail_tolerance),
                               opt.tail_tolerance};
    double worst = 0.0;
    for (double R : {0.2, 0.6}) {
      const auto ch = ChannelParams::from_reflectivity(R);
      const double d0 = qiopa_equatorial_distance({g, 0.0}, ch, cfg).bures;
      for (double phi : {std::numbers::pi / 4, std::numbers::pi / 2})
        worst = std::max(worst, std::abs(qiopa_equatorial_distance({g, phi}, ch, cfg).bures - d0));
    }
    check_le("phase_covariance", worst, 1e-7);
  });

  guarded("visibility_equals_distinguishability", [&] {
    const double g = 0.4;
    const TruncationConfig cfg{required_n_max([&](int m) { return qiopa_equatorial_tail(g, m); }, opt.tail_tolerance),
                               opt.tail_tolerance};
    double worst = 0.0;
    for (double R : {0.2, 0.6}) {
      const auto ch = ChannelParams::from_reflectivity(R);
      const auto rr = apply_loss_two_mode(qiopa_circular_state(g, Handedness::right, cfg), ch, cfg);
      const auto rl = apply_loss_two_mode(qiopa_circular_state(g, Handedness::left, cfg), ch, cfg);
      const auto rp = apply_loss_two_mode(qiopa_diagonal_state(g, Sign::plus, cfg), ch, cfg);
      const auto rm = apply_loss_two_mode(qiopa_diagonal_state(g, Sign::minus, cfg), ch, cfg);
      worst = std::max(worst, std::abs(bures_distance(rr, rl).bures - bures_distance(rp, rm).bures));
    }
    check_le("visibility_equals_distinguishability", worst, 1e-7);
  });

  guarded("mean_photon_number", [&] {
    const double g = opt.max_gain;
    const TruncationConfig cfg{required_n_max([&](int m) { return qiopa_pi_tail(g, m); }, opt.tail_tolerance), opt.tail_tolerance};
    check_close("mean_photon_number", qiopa_mean_photon_number(g), mean_photon_number(qiopa_pi_state({g, 0.0}, cfg)), 1e-6);
  });

  guarded("ofilter_ordering", [&] {
    const double g = opt.max_gain;
    const TruncationConfig cfg{required_n_max([&](int m) { return qiopa_equatorial_tail(g, m); }, opt.tail_tolerance),
                               opt.tail_tolerance};
    const auto ch = ChannelParams::from_reflectivity(0.5);
    double dprev = 0.0, pprev = 1.0, violation = 0.0;
    for (int k : {0, 4, 6, 8}) {
      const auto f = qiopa_ofiltered_distance({g, 0.0}, ch, cfg, {k});
      violation = std::max({violation, dprev - f.report.bures, f.success_rho - pprev});
      dprev = f.report.bures;
      pprev = f.success_rho;
    }
    check_le("ofilter_ordering", violation, 1e-9);
  });

  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rep.over_budget = rep.seconds > opt.budget_seconds;
  return rep;
}

}  // namespace mqs
