#include <gtest/gtest.h>

#include <numbers>

#include "mqs/states.hpp"
#include "test_support.hpp"

using namespace mqs;

namespace {

constexpr double kPi = std::numbers::pi;

int eq_n_max(double g, double tol = 1e-10) {
  return required_n_max([&](int n) { return qiopa_equatorial_tail(g, n); }, tol);
}

double cat_distance(double a, double phi, double R, int n_max = 80) {
  const TruncationConfig cfg{n_max};
  const auto ch = ChannelParams::from_reflectivity(R);
  const auto rp = coherent_mqs_lossy_density({a, phi, Sign::plus}, ch, cfg);
  const auto rm = coherent_mqs_lossy_density({a, phi, Sign::minus}, ch, cfg);
  return bures_distance(rp, rm).bures;
}

double parity_expectation(const Eigen::MatrixXcd& rho) {
  double s = 0.0;
  for (Index n = 0; n < rho.rows(); ++n) s += (n % 2 ? -1.0 : 1.0) * rho(n, n).real();
  return s;
}

}  // namespace

// ------------------------------------------------------------- coherent

TEST(Coherent, VacuumAtZero) {
  const auto v = coherent_state_vector(0.0, {5});
  EXPECT_EQ(v[0], cplx(1.0));
  EXPECT_EQ(v.amplitudes().tail(5).norm(), 0.0);
}

TEST(Coherent, TailBoundEnforced) {
  EXPECT_THROW(coherent_state_vector(4.0, {20}), TruncationError);
  EXPECT_NO_THROW(coherent_state_vector(4.0, {60}));
  EXPECT_NEAR(coherent_tail(1.0, 0), 1.0 - std::exp(-1.0), 1e-15);
}

TEST(CoherentMqs, NormalizationInvariant) {
  for (double a : {0.3, 1.0, 2.5})
    for (double phi : {0.3, kPi / 4, kPi / 2, 2.0})
      for (Sign s : {Sign::plus, Sign::minus}) {
        const CoherentMqsParams p{a, phi, s};
        const double n = p.normalization();
        EXPECT_NEAR(0.5 * n * n * (2.0 + 2.0 * sign_value(s) * p.overlap()), 1.0, 1e-10);
        EXPECT_NEAR(coherent_mqs_vector(p, {60}).norm_squared(), 1.0, 1e-10);
      }
}

TEST(CoherentMqs, TailMatchesMissingNorm) {
  for (const CoherentMqsParams& p : {canonical_cat(3.0, Sign::plus), canonical_cat(3.0, Sign::minus),
                                     CoherentMqsParams{2.0, 0.7, Sign::plus}}) {
    const auto v = coherent_mqs_vector(p, {120});
    for (int n : {10, 20, 30}) {
      const double missing = v.amplitudes().tail(120 - n).squaredNorm();
      EXPECT_NEAR(coherent_mqs_tail(p, n) / missing, 1.0, 1e-10) << n;
    }
  }
  EXPECT_EQ(coherent_mqs_tail(canonical_cat(0.0, Sign::plus), 0), 0.0);
}

TEST(CoherentMqs, ZeroNormRejected) {
  EXPECT_THROW((CoherentMqsParams{1.0, 0.0, Sign::minus}.normalization()), ValidationError);
  EXPECT_THROW((CoherentMqsParams{1.0, 4.0, Sign::plus}.check()), ValidationError);
}

TEST(CoherentMqs, ParityOfCats) {
  const auto ev = coherent_mqs_vector(canonical_cat(2.0, Sign::plus), {50});
  const auto od = coherent_mqs_vector(canonical_cat(2.0, Sign::minus), {50});
  for (Index n = 1; n <= 50; n += 2) EXPECT_LT(std::abs(ev[n]), 1e-15);
  for (Index n = 0; n <= 50; n += 2) EXPECT_LT(std::abs(od[n]), 1e-15);
}

TEST(CoherentMqs, ClosedFormMatchesKraus) {
  const TruncationConfig cfg{50};
  for (double R : {0.0, 0.1, 0.5, 1.0}) {
    const auto p = CoherentMqsParams{2.0, 1.1, Sign::minus};
    const auto ch = ChannelParams::from_reflectivity(R);
    const auto oracle = apply_loss(coherent_mqs_vector(p, cfg), ch, cfg);
    EXPECT_LT((coherent_mqs_lossy_elements(p, ch, 50) - oracle.entries()).cwiseAbs().maxCoeff(), 1e-12) << R;
  }
}

TEST(CoherentMqs, AnalyticLawValues) {
  EXPECT_EQ(coherent_mqs_distance_analytic(4.0, kPi / 2, 0.0), 1.0);
  EXPECT_NEAR(coherent_mqs_distance_analytic(4.0, kPi / 2, 1.0 / 16), 0.0959173641171265, 1e-15);
  EXPECT_NEAR(coherent_cat_distance_exact(1.0, 0.3), 0.395337477767466, 1e-14);
}

TEST(CoherentMqs, LargeXAsymptotic) {
  // D(x) -> e^{-2x}/sqrt2 for x >~ 1
  for (double x : {2.0, 3.0, 4.0}) {
    const double D = cat_distance(4.0, kPi / 2, x / 16);
    EXPECT_NEAR(D * std::sqrt(2.0) / std::exp(-2.0 * x), 1.0, 0.02) << x;
  }
}

TEST(CoherentMqs, NumericalMatchesExactNormalizedLaw) {
  for (double a : {1.0, 2.0, 3.0})
    for (double R : {0.05, 0.3, 0.7}) EXPECT_NEAR(cat_distance(a, kPi / 2, R, 40), coherent_cat_distance_exact(a, R), 1e-9);
}

TEST(CoherentMqs, UniversalityAtLargeAmplitude) {
  const double d1 = cat_distance(4.0, kPi / 2, 1.0 / 16);
  EXPECT_NEAR(cat_distance(3.0, kPi / 2, 1.0 / 9), d1, 1e-6);
  EXPECT_NEAR(cat_distance(3.0 * std::sqrt(2.0), kPi / 4, 1.0 / 9), d1, 1e-6);
}

TEST(CoherentMqs, MonotoneInR) {
  double prev = 2.0;
  for (int i = 0; i <= 20; ++i) {
    const double D = cat_distance(3.0, kPi / 2, i / 20.0, 60);
    EXPECT_LE(D, prev + 1e-9);
    prev = D;
  }
}

TEST(CoherentMqs, CombCancellation) {
  const double a = 2.0, S = std::exp(-2 * a * a);
  for (double R : {0.05, 0.2, 0.5, 0.9})
    for (Sign s : {Sign::plus, Sign::minus}) {
      const auto rho = coherent_mqs_lossy_elements(canonical_cat(a, s), ChannelParams::from_reflectivity(R), 60);
      const double sv = sign_value(s);
      const double coherence = sv * ((1.0 + sv * S) * parity_expectation(rho) - std::exp(-2 * (1 - R) * a * a));
      EXPECT_NEAR(coherence, std::exp(-2 * R * a * a), 1e-8) << R;
    }
}

TEST(CoherentPointer, Law) {
  EXPECT_EQ(coherent_pointer_distance(4.0, 0.0), 0.0);
  EXPECT_NEAR(coherent_pointer_distance(4.0, 1.0), 1.0, 1e-6);
  EXPECT_NEAR(coherent_pointer_distance(1.0, 0.5), 0.7950600976206501, 1e-15);
  const TruncationConfig cfg{40};
  const auto ch = ChannelParams::from_reflectivity(0.3);
  const auto rp = apply_loss(pure_to_density(coherent_state_vector(2.0, cfg)), ch);
  const auto rm = apply_loss(pure_to_density(coherent_state_vector(-2.0, cfg)), ch);
  EXPECT_NEAR(bures_distance(rp, rm).bures, coherent_pointer_distance(2.0, 0.7), 1e-9);
}

// ------------------------------------------------------------- NOON

TEST(Noon, ConstructionAndLimits) {
  EXPECT_THROW(noon_state_vector({0}, {4}), ValidationError);
  EXPECT_THROW(noon_state_vector({5}, {4}), TruncationError);
  const auto v = noon_state_vector({3, Sign::minus}, {3});
  EXPECT_NEAR(v.at({3, 0}).real(), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(v.at({0, 3}).real(), -1 / std::sqrt(2.0), 1e-15);
  const auto r0 = noon_distances({4}, 0.0), r1 = noon_distances({4}, 1.0);
  EXPECT_EQ(r0.pointer, 1.0);
  EXPECT_EQ(r0.mqs, 1.0);
  EXPECT_EQ(r1.pointer, 0.0);
  EXPECT_EQ(r1.mqs, 0.0);
}

TEST(Noon, LawsAgainstOracle) {
  for (int N : {1, 2, 3, 5})
    for (double R : {0.2, 0.7}) {
      const TruncationConfig cfg{N};
      const auto ch = ChannelParams::from_reflectivity(R);
      const auto a = apply_loss_two_mode(pure_to_density(basis_state(TwoModeIndex{N, 0}, cfg)), ch);
      const auto b = apply_loss_two_mode(pure_to_density(basis_state(TwoModeIndex{0, N}, cfg)), ch);
      const auto sp = apply_loss_two_mode(noon_state_vector({N, Sign::plus}, cfg), ch, cfg);
      const auto sm = apply_loss_two_mode(noon_state_vector({N, Sign::minus}, cfg), ch, cfg);
      const auto ref = noon_distances({N}, R);
      EXPECT_NEAR(bures_distance(a, b).bures, ref.pointer, 1e-9);
      EXPECT_NEAR(bures_distance(sp, sm).bures, ref.mqs, 1e-9);
    }
}

// ------------------------------------------------------------- QI-OPA

TEST(Qiopa, ParameterChecks) {
  EXPECT_THROW((QiopaParams{0.0, 0.0}.check()), ValidationError);
  EXPECT_THROW((QiopaParams{0.5, 2 * kPi}.check()), ValidationError);
  EXPECT_THROW(qiopa_mean_photon_number(-1.0), ValidationError);
}

TEST(Qiopa, MeanPhotonNumber) {
  EXPECT_NEAR(qiopa_mean_photon_number(0.8), 4.15492894238977, 1e-10);
  EXPECT_NEAR(qiopa_mean_photon_number(1.5), 19.13532399155553, 1e-9);
  EXPECT_NEAR(qiopa_mean_photon_number(1e-4), 1.0, 1e-6);
  EXPECT_NEAR(std::round(qiopa_mean_photon_number(1.3)), 12.0, 1.0);
  EXPECT_NEAR(std::round(qiopa_mean_photon_number(1.1)), 8.0, 1.0);
  for (double g : {0.4, 0.8, 1.1}) {
    const TruncationConfig cfg{required_n_max([&](int n) { return qiopa_pi_tail(g, n); }, 1e-14), 1e-14};
    EXPECT_NEAR(mean_photon_number(qiopa_pi_state({g, 0.0}, cfg)), qiopa_mean_photon_number(g), 1e-9);
  }
}

TEST(Qiopa, SlopeLimitClosedForm) {
  EXPECT_NEAR(qiopa_slope_limit(1e-9), 5.0, 1e-8);
  EXPECT_NEAR(qiopa_slope_limit(0.8), 11.413780184167499, 1e-12);
}

TEST(Qiopa, SeedLimit) {
  const TruncationConfig cfg{3};
  const auto h = qiopa_pi_state({1e-9, 0.0}, cfg);
  EXPECT_NEAR(std::abs(h.at({1, 0})), 1.0, 1e-12);
  const auto e = qiopa_equatorial_state({1e-9, 0.4}, cfg);
  EXPECT_NEAR(std::abs(e.at({1, 0})), 1.0, 1e-12);
}

TEST(Qiopa, PiStateIsNormalizedAndPolarized) {
  const double g = 0.8;
  const TruncationConfig cfg{40};
  const auto h = qiopa_pi_state({g, 0.0}, cfg, Polarization::H);
  const auto v = qiopa_pi_state({g, 0.0}, cfg, Polarization::V);
  EXPECT_NEAR(h.norm_squared(), 1.0 - qiopa_pi_tail(g, 40), 1e-14);
  EXPECT_EQ(h.amplitudes().dot(v.amplitudes()), cplx(0.0));
  for (Index f = 0; f < h.dim(); ++f)
    if (h[f] != 0.0) {
      const auto [a, b] = two_mode_index(f, cfg);
      EXPECT_EQ(a, b + 1);
    }
}

TEST(Qiopa, EquatorialParityStructure) {
  const double g = 0.8;
  const TruncationConfig cfg{eq_n_max(g)};
  const auto psi = qiopa_equatorial_state({g, 0.7}, cfg);
  EXPECT_NEAR(psi.norm_squared(), 1.0, 1e-10);
  const auto ps = parity_spectrum(pure_to_density(psi));
  EXPECT_NEAR(ps[2], 1.0, 1e-10);  // odd, even
  const auto perp = qiopa_equatorial_orthogonal_state({g, 0.7}, cfg);
  EXPECT_EQ(psi.amplitudes().dot(perp.amplitudes()), cplx(0.0));
}

TEST(Qiopa, LossSpreadsParityMass) {
  const double g = 0.4;
  const TruncationConfig cfg{eq_n_max(g)};
  const auto rho = qiopa_equatorial_lossy_density({g, 0.0}, {0.9}, cfg);
  int populated = 0;
  for (double m : parity_spectrum(rho)) populated += m > 1e-6;
  EXPECT_GE(populated, 2);
}

TEST(Qiopa, EquatorialLosslessLimit) {
  const double g = 0.8;
  const int n = eq_n_max(g);
  const auto f = qiopa_equatorial_factors({g, 1.2}, n);
  const Eigen::VectorXcd psi = kron(f.a, f.b);
  EXPECT_LT((qiopa_equatorial_lossy_elements({g, 1.2}, {1.0}, n) - psi * psi.adjoint()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Qiopa, HvLosslessLimit) {
  const double g = 0.8;
  const int n = 30;
  const Eigen::VectorXcd psi = qiopa_pi_amplitudes({g, 0.0}, n);
  EXPECT_LT((qiopa_hv_lossy_elements({g, 0.0}, {1.0}, n) - psi * psi.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
  const Eigen::VectorXcd pv = qiopa_pi_amplitudes({g, 0.0}, n, Polarization::V);
  EXPECT_LT((qiopa_hv_lossy_elements({g, 0.0}, {1.0}, n, Polarization::V) - pv * pv.adjoint()).cwiseAbs().maxCoeff(),
            1e-12);
}

TEST(Qiopa, EquatorialClosedFormMatchesKraus) {
  const int n = 20;
  for (double g : {0.4, 0.8})
    for (double T : {0.1, 0.5, 0.9}) {
      const QiopaParams p{g, 0.9};
      const int ns = required_n_max([&](int m) { return qiopa_equatorial_tail(g, m); }, 1e-24, n);
      const auto f = qiopa_equatorial_factors(p, ns);
      const Eigen::MatrixXcd oracle = apply_loss_two_mode_pure(kron(f.a, f.b), {T}, ns, n);
      EXPECT_LT((qiopa_equatorial_lossy_elements(p, {T}, n) - oracle).cwiseAbs().maxCoeff(), 1e-8) << g << " " << T;
    }
}

TEST(Qiopa, HvClosedFormMatchesKraus) {
  const int n = 20;
  for (double g : {0.4, 0.8})
    for (double T : {0.1, 0.5, 0.9})
      for (Polarization pol : {Polarization::H, Polarization::V}) {
        const QiopaParams p{g, 0.0};
        const int ns = required_n_max([&](int m) { return qiopa_pi_tail(g, m); }, 1e-24, n);
        const Eigen::MatrixXcd oracle = apply_loss_two_mode_pure(qiopa_pi_amplitudes(p, ns, pol), {T}, ns, n);
        EXPECT_LT((qiopa_hv_lossy_elements(p, {T}, n, pol) - oracle).cwiseAbs().maxCoeff(), 1e-8) << g << " " << T;
      }
}

TEST(Qiopa, HvBlockDiagonalInDifference) {
  const TruncationConfig cfg{12};
  const auto rho = qiopa_hv_lossy_elements({0.5, 0.0}, {0.6}, 12);
  for (Index x = 0; x < rho.rows(); ++x)
    for (Index y = 0; y < rho.cols(); ++y) {
      const auto [a, b] = two_mode_index(x, cfg);
      const auto [c, d] = two_mode_index(y, cfg);
      if (a - b != c - d) {
        EXPECT_EQ(rho(x, y), cplx(0.0));
      }
    }
}

TEST(Qiopa, DistanceRoutesAgree) {
  const double g = 0.4;
  const TruncationConfig cfg{eq_n_max(g, 1e-12), 1e-12};
  for (double R : {0.1, 0.5}) {
    const auto ch = ChannelParams::from_reflectivity(R);
    const auto a = qiopa_equatorial_lossy_density({g, 0.0}, ch, cfg);
    const auto ep = qiopa_equatorial_lossy_factors({g, 0.0}, ch, cfg.n_max, EquatorialBranch::phi_perp);
    const TwoModeDensityMatrix b(ep.dense(), cfg);
    EXPECT_NEAR(bures_distance(a, b).bures, qiopa_equatorial_distance({g, 0.0}, ch, cfg).bures, 1e-9);
    const auto h = qiopa_hv_lossy_density({g, 0.0}, ch, cfg, Polarization::H);
    const auto v = qiopa_hv_lossy_density({g, 0.0}, ch, cfg, Polarization::V);
    EXPECT_NEAR(bures_distance(h, v).bures, qiopa_hv_distance({g, 0.0}, ch, cfg).bures, 1e-9);
  }
}

TEST(Qiopa, DistanceEndpoints) {
  const double g = 0.8;
  const TruncationConfig cfg{eq_n_max(g)};
  EXPECT_NEAR(qiopa_equatorial_distance({g, 0.0}, {1.0}, cfg).bures, 1.0, 1e-8);
  EXPECT_NEAR(qiopa_equatorial_distance({g, 0.0}, {0.0}, cfg).fidelity, 1.0, 1e-12);
  EXPECT_NEAR(qiopa_hv_distance({g, 0.0}, {1.0}, cfg).bures, 1.0, 1e-8);
}

TEST(Qiopa, TruncationTooSmallThrows) {
  EXPECT_THROW(qiopa_equatorial_distance({0.8, 0.0}, {0.5}, {20}), TruncationError);
  EXPECT_THROW(qiopa_hv_distance({0.8, 0.0}, {0.5}, {10}), TruncationError);
}

TEST(Qiopa, MonotoneInR) {
  const double g = 0.8;
  const TruncationConfig cfg{eq_n_max(g)};
  double pe = 2.0, ph = 2.0;
  for (int i = 0; i <= 20; ++i) {
    const auto ch = ChannelParams::from_reflectivity(i / 20.0);
    const double de = qiopa_equatorial_distance({g, 0.0}, ch, cfg).bures;
    const double dh = qiopa_hv_distance({g, 0.0}, ch, cfg).bures;
    EXPECT_LE(de, pe + 1e-9);
    EXPECT_LE(dh, ph + 1e-9);
    pe = de;
    ph = dh;
  }
}

TEST(Qiopa, PhaseCovariance) {
  const double g = 0.8;
  const TruncationConfig cfg{eq_n_max(g)};
  for (double R : {0.2, 0.6}) {
    const auto ch = ChannelParams::from_reflectivity(R);
    const double d0 = qiopa_equatorial_distance({g, 0.0}, ch, cfg).bures;
    for (double phi : {kPi / 4, kPi / 2, 3.0}) EXPECT_NEAR(qiopa_equatorial_distance({g, phi}, ch, cfg).bures, d0, 1e-7);
  }
}

TEST(Qiopa, ResilienceOrderingAgainstCat) {
  for (double g : {0.8, 1.1}) {
    const TruncationConfig cfg{eq_n_max(g)};
    const double n = qiopa_mean_photon_number(g);
    for (double x : {0.5, 1.0, 2.0, 3.0}) {
      const double de = qiopa_equatorial_distance({g, 0.0}, ChannelParams::from_reflectivity(x / n), cfg).bures;
      EXPECT_GT(de, cat_distance(4.0, kPi / 2, x / 16)) << g << " " << x;
    }
  }
}

TEST(Qiopa, SuperpositionIdentity) {
  const double g = 0.8;
  const TruncationConfig cfg{eq_n_max(g)};
  EXPECT_LT(qiopa_superposition_identity_check(g, 0.0, cfg), 1e-12);
  EXPECT_LT(qiopa_superposition_identity_check(g, kPi, cfg), 1e-10);
  EXPECT_LT(qiopa_superposition_identity_check(g, kPi / 2, cfg), 1e-8);
  EXPECT_LT(qiopa_superposition_identity_check(g, 1.0, cfg), 1e-8);
}

TEST(Qiopa, DiagonalStatesOrthonormal) {
  const double g = 0.6;
  const TruncationConfig cfg{eq_n_max(g, 1e-12), 1e-12};
  const auto p = qiopa_diagonal_state(g, Sign::plus, cfg);
  const auto m = qiopa_diagonal_state(g, Sign::minus, cfg);
  EXPECT_NEAR(p.norm_squared(), 1.0, 1e-10);
  EXPECT_NEAR(m.norm_squared(), 1.0, 1e-10);
  EXPECT_LT(std::abs(p.amplitudes().dot(m.amplitudes())), 1e-10);
  const auto r = qiopa_circular_state(g, Handedness::right, cfg);
  const auto l = qiopa_circular_state(g, Handedness::left, cfg);
  EXPECT_LT(std::abs(r.amplitudes().dot(l.amplitudes())), 1e-10);
}

TEST(Qiopa, VisibilityEqualsDistinguishability) {
  const double g = 0.4;
  const TruncationConfig cfg{eq_n_max(g)};
  for (double R : {0.2, 0.6}) {
    const auto ch = ChannelParams::from_reflectivity(R);
    const auto rr = apply_loss_two_mode(qiopa_circular_state(g, Handedness::right, cfg), ch, cfg);
    const auto rl = apply_loss_two_mode(qiopa_circular_state(g, Handedness::left, cfg), ch, cfg);
    const auto rp = apply_loss_two_mode(qiopa_diagonal_state(g, Sign::plus, cfg), ch, cfg);
    const auto rm = apply_loss_two_mode(qiopa_diagonal_state(g, Sign::minus, cfg), ch, cfg);
    EXPECT_NEAR(bures_distance(rr, rl).bures, bures_distance(rp, rm).bures, 1e-7);
  }
}

TEST(Qiopa, AlignGlobalPhase) {
  Eigen::VectorXcd v(3);
  v << cplx(0.1, 0.0), cplx(0.0, -2.0), cplx(0.5, 0.5);
  const Eigen::VectorXcd a = align_global_phase(v);
  EXPECT_NEAR(a[1].real(), 2.0, 1e-15);
  EXPECT_NEAR(a[1].imag(), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(a[2]), std::abs(v[2]), 1e-15);
  Eigen::VectorXcd tie(2);
  tie << cplx(0.0, 1.0), cplx(-1.0 - 1e-15, 0.0);
  EXPECT_NEAR(align_global_phase(tie)[0].real(), 1.0, 1e-15);
}

TEST(Qiopa, SuperpositionIdentityAtLowGain) {
  for (double g : {0.2, 0.4, 0.6}) {
    const TruncationConfig cfg{eq_n_max(g)};
    for (double phi : {kPi / 4, kPi / 2, 2.5}) EXPECT_LT(qiopa_superposition_identity_check(g, phi, cfg), 1e-10) << g;
  }
}

TEST(RequiredNMax, FindsSmallestCutoff) {
  const int n = required_n_max([](int m) { return coherent_tail(2.0, m); }, 1e-10);
  EXPECT_LE(coherent_tail(2.0, n), 1e-10);
  EXPECT_GT(coherent_tail(2.0, n - 1), 1e-10);
  EXPECT_THROW(required_n_max([](int) { return 1.0; }, 1e-10, 0, 10), TruncationError);
}
