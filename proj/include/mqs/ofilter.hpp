#pragma once

#include <Eigen/Dense>

#include <cstdlib>
#include <vector>

#include "mqs/fock.hpp"
#include "mqs/metrics.hpp"
#include "mqs/states.hpp"

namespace mqs {

inline constexpr double kMinSuccessProbability = 1e-12;

struct OFilterParams {
  int k = 0;  // keeps |n_a - n_b| > k
  void check() const {
    if (k < 0) throw ValidationError("filter threshold k must be >= 0");
  }
  bool keeps(int n_a, int n_b) const { return std::abs(n_a - n_b) > k; }
};

inline Eigen::DiagonalMatrix<double, Eigen::Dynamic> ofilter_projector(const OFilterParams& p,
                                                                     const TruncationConfig& cfg) {
  p.check();
  Eigen::VectorXd d(basis_dim<2>(cfg));
  for (Index f = 0; f < d.size(); ++f) {
    const auto [a, b] = two_mode_index(f, cfg);
    d[f] = p.keeps(a, b) ? 1.0 : 0.0;
  }
  return Eigen::DiagonalMatrix<double, Eigen::Dynamic>(d);
}

struct FilterOutcome {
  TwoModeDensityMatrix filtered;
  double success_probability;
};

inline FilterOutcome apply_ofilter(const TwoModeDensityMatrix& rho, const OFilterParams& p) {
  const auto P = ofilter_projector(p, rho.truncation());
  Eigen::MatrixXcd m = P * rho.entries() * P;
  const double s = m.trace().real();
  if (s < kMinSuccessProbability) throw FilterAnnihilated("filter annihilates state (success probability " + detail::fmt(s) + ")");
  m /= s;
  TruncationConfig cfg = rho.truncation();
  return {TwoModeDensityMatrix(std::move(m), cfg), s};
}

struct FilteredDistance {
  DistanceReport report;
  double success_rho = 0.0;
  double success_sigma = 0.0;
  double mean_photons_rho = 0.0;  // of the filtered rho
};

// Filter both members of every sector pair, drop rejected basis states and renormalize.
inline FilteredDistance filtered_distance(const std::vector<SectorPair>& sectors, const TruncationConfig& cfg,
                                          const OFilterParams& p) {
  p.check();
  std::vector<SectorPair> kept;
  double sr = 0.0, ss = 0.0, nr = 0.0;
  for (const auto& s : sectors) {
    std::vector<Index> idx;
    for (std::size_t x = 0; x < s.basis.size(); ++x) {
      const auto [a, b] = two_mode_index(s.basis[x], cfg);
      if (p.keeps(a, b)) idx.push_back(static_cast<Index>(x));
    }
    if (idx.empty()) continue;
    SectorPair f;
    const Index n = static_cast<Index>(idx.size());
    f.rho.resize(n, n);
    f.sigma.resize(n, n);
    for (Index y = 0; y < n; ++y) {
      f.basis.push_back(s.basis[idx[y]]);
      for (Index x = 0; x < n; ++x) {
        f.rho(x, y) = s.rho(idx[x], idx[y]);
        f.sigma(x, y) = s.sigma(idx[x], idx[y]);
      }
      const auto [a, b] = two_mode_index(s.basis[idx[y]], cfg);
      nr += (a + b) * f.rho(y, y).real();
    }
    sr += f.rho.trace().real();
    ss += f.sigma.trace().real();
    kept.push_back(std::move(f));
  }
  if (sr < kMinSuccessProbability || ss < kMinSuccessProbability)
    throw FilterAnnihilated("filter annihilates state (success probabilities " + detail::fmt(sr) + ", " +
                            detail::fmt(ss) + ")");
  for (auto& f : kept) {
    f.rho /= sr;
    f.sigma /= ss;
  }
  return {distance_from_sectors(kept), sr, ss, nr / sr};
}

// Parity sectors of the lossy equatorial pair, built from the mode factors.
inline std::vector<SectorPair> qiopa_equatorial_parity_sectors(const QiopaParams& p, ChannelParams ch,
                                                               const TruncationConfig& cfg) {
  const auto r = qiopa_equatorial_lossy_factors(p, ch, cfg.n_max, EquatorialBranch::phi);
  const auto s = qiopa_equatorial_lossy_factors(p, ch, cfg.n_max, EquatorialBranch::phi_perp);
  check_factor_trace(r, cfg);
  check_factor_trace(s, cfg);
  std::vector<SectorPair> out;
  for (int pa = 0; pa < 2; ++pa)
    for (int pb = 0; pb < 2; ++pb) {
      SectorPair sp;
      std::vector<std::pair<int, int>> modes;
      for (int a = pa; a <= cfg.n_max; a += 2)
        for (int b = pb; b <= cfg.n_max; b += 2) {
          modes.emplace_back(a, b);
          sp.basis.push_back(flat_index({a, b}, cfg));
        }
      const Index n = static_cast<Index>(modes.size());
      if (n == 0) continue;
      sp.rho.resize(n, n);
      sp.sigma.resize(n, n);
      for (Index y = 0; y < n; ++y)
        for (Index x = 0; x < n; ++x) {
          const auto [a, b] = modes[x];
          const auto [c, q] = modes[y];
          sp.rho(x, y) = r.a(a, c) * r.b(b, q);
          sp.sigma(x, y) = s.a(a, c) * s.b(b, q);
        }
      out.push_back(std::move(sp));
    }
  return out;
}

inline FilteredDistance qiopa_ofiltered_distance(const QiopaParams& p, ChannelParams ch, const TruncationConfig& cfg,
                                                 const OFilterParams& f) {
  return filtered_distance(qiopa_equatorial_parity_sectors(p, ch, cfg), cfg, f);
}

}  // namespace mqs
