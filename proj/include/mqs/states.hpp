#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "mqs/detail/math.hpp"
#include "mqs/detail/series.hpp"
#include "mqs/fock.hpp"
#include "mqs/linear_optics.hpp"
#include "mqs/loss_channel.hpp"
#include "mqs/metrics.hpp"

namespace mqs {

enum class Sign { plus, minus };

inline double sign_value(Sign s) { return s == Sign::plus ? 1.0 : -1.0; }

// Smallest n_max in [start, limit] whose tail is within tol.
inline int required_n_max(const std::function<double(int)>& tail, double tol, int start = 0,
                          int limit = 2000) {
  for (int n = start; n <= limit; ++n)
    if (tail(n) <= tol) return n;
  throw TruncationError("no truncation up to n_max=" + std::to_string(limit) + " meets tail tolerance");
}

// Sum of term(n) for n >= first, for terms that eventually decrease monotonically.
template <class Term>
double tail_sum(Term&& term, int first) {
  double sum = 0.0, prev = std::numeric_limits<double>::infinity();
  for (int n = first; n < first + detail::kSeriesMaxTerms; ++n) {
    const double t = term(n);
    sum += t;
    if (t <= prev && t <= 1e-17 * sum) return sum;
    if (t == 0.0 && prev == 0.0) return sum;
    prev = t;
  }
  throw ValidationError("tail sum did not converge");
}

// ---------------------------------------------------------------- coherent states

inline Eigen::VectorXcd coherent_amplitudes(cplx alpha, int n_max) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n_max + 1);
  const double r = std::abs(alpha), th = std::arg(alpha);
  if (r == 0.0) {
    v[0] = 1.0;
    return v;
  }
  for (int n = 0; n <= n_max; ++n)
    v[n] = std::polar(std::exp(-0.5 * r * r + n * std::log(r) - 0.5 * detail::log_factorial(n)), n * th);
  return v;
}

inline double coherent_tail(cplx alpha, int n_max) {
  const double r2 = std::norm(alpha);
  if (r2 == 0.0) return 0.0;
  return tail_sum([&](int n) { return std::exp(-r2 + n * std::log(r2) - detail::log_factorial(n)); }, n_max + 1);
}

inline SingleModeStateVector coherent_state_vector(cplx alpha, const TruncationConfig& cfg) {
  return {coherent_amplitudes(alpha, cfg.n_max), cfg};
}

// N/sqrt2 (|alpha e^{i phi}> +- |alpha e^{-i phi}>)
struct CoherentMqsParams {
  cplx alpha{1.0, 0.0};
  double phi = std::numbers::pi / 2;
  Sign sign = Sign::plus;

  cplx beta1() const { return alpha * std::polar(1.0, phi); }
  cplx beta2() const { return alpha * std::polar(1.0, -phi); }
  double overlap() const { return std::real(std::exp(-std::norm(alpha) + std::conj(beta1()) * beta2())); }
  double normalization() const {
    const double s = 1.0 + sign_value(sign) * overlap();
    if (s <= 0.0) throw ValidationError("coherent superposition has zero norm");
    return 1.0 / std::sqrt(s);
  }
  void check() const {
    if (!(phi >= 0.0 && phi <= std::numbers::pi)) throw ValidationError("phi must lie in [0, pi]");
  }
};

// |alpha> +- |-alpha> as a member of the phi family
inline CoherentMqsParams canonical_cat(cplx alpha, Sign s) {
  return {alpha * cplx(0.0, -1.0), std::numbers::pi / 2, s};
}

// Probability of more than n_max photons in the superposition.
inline double coherent_mqs_tail(const CoherentMqsParams& p, int n_max) {
  const double r2 = std::norm(p.alpha);
  if (r2 == 0.0) return 0.0;
  const double delta = -2.0 * p.phi, s = sign_value(p.sign), n2 = std::pow(p.normalization(), 2);
  double sum = 0.0, envelope = 0.0, prev = std::numeric_limits<double>::infinity();
  for (int k = n_max + 1; k < n_max + 1 + detail::kSeriesMaxTerms; ++k) {
    const double pk = std::exp(-r2 + k * std::log(r2) - detail::log_factorial(k));
    sum += pk * (1.0 + s * std::cos(k * delta));
    envelope += 2.0 * pk;
    if (pk <= prev && 2.0 * pk <= 1e-17 * envelope) return n2 * sum;
    prev = pk;
  }
  throw ValidationError("tail sum did not converge");
}

// Larger tail of the +/- pair.
inline double coherent_mqs_pair_tail(cplx alpha, double phi, int n_max) {
  return std::max(coherent_mqs_tail({alpha, phi, Sign::plus}, n_max), coherent_mqs_tail({alpha, phi, Sign::minus}, n_max));
}

inline SingleModeStateVector coherent_mqs_vector(const CoherentMqsParams& p, const TruncationConfig& cfg) {
  p.check();
  const double c = p.normalization() / std::sqrt(2.0);
  Eigen::VectorXcd v = c * (coherent_amplitudes(p.beta1(), cfg.n_max) +
                            sign_value(p.sign) * coherent_amplitudes(p.beta2(), cfg.n_max));
  return {std::move(v), cfg};
}

inline Eigen::MatrixXcd coherent_mqs_lossy_elements(const CoherentMqsParams& p, ChannelParams ch, int n_max) {
  p.check();
  ch.check();
  const double t = std::sqrt(ch.T), r = std::sqrt(ch.reflectivity());
  const Eigen::VectorXcd b1 = coherent_amplitudes(t * p.beta1(), n_max);
  const Eigen::VectorXcd b2 = coherent_amplitudes(t * p.beta2(), n_max);
  const cplx e1 = r * p.beta1(), e2 = r * p.beta2();
  const cplx env = std::exp(-std::norm(e1) + std::conj(e2) * e1);  // <e2|e1>
  const double n2 = std::pow(p.normalization(), 2);
  const double s = sign_value(p.sign);
  return 0.5 * n2 *
         (b1 * b1.adjoint() + b2 * b2.adjoint() +
          s * (env * b1 * b2.adjoint() + std::conj(env) * b2 * b1.adjoint()));
}

inline SingleModeDensityMatrix coherent_mqs_lossy_density(const CoherentMqsParams& p, ChannelParams ch,
                                                          const TruncationConfig& cfg) {
  return {coherent_mqs_lossy_elements(p, ch, cfg.n_max), cfg};
}

inline double coherent_mqs_distance_analytic(cplx alpha, double phi, double R) {
  const double x = R * std::norm(alpha) * std::pow(std::sin(phi), 2);
  return std::sqrt(1.0 - std::sqrt(-std::expm1(-4.0 * x)));
}

// Bures distance of the normalized lossy cats |i alpha> +- |-i alpha>.
inline double coherent_cat_distance_exact(cplx alpha, double R) {
  const double a2 = std::norm(alpha);
  if (a2 == 0.0) return 0.0;
  return std::sqrt(1.0 - std::sqrt(std::expm1(-4.0 * R * a2) / std::expm1(-4.0 * a2)));
}

inline double coherent_pointer_distance(cplx alpha, double T) {
  return std::sqrt(-std::expm1(-2.0 * T * std::norm(alpha)));
}

// ---------------------------------------------------------------- NOON states

struct NoonParams {
  int N = 1;
  Sign sign = Sign::plus;
  void check() const {
    if (N < 1) throw ValidationError("NOON photon number must be >= 1");
  }
};

struct NoonDistances {
  double pointer = 0.0;
  double mqs = 0.0;
};

inline TwoModeStateVector noon_state_vector(const NoonParams& p, const TruncationConfig& cfg) {
  p.check();
  if (p.N > cfg.n_max) throw TruncationError("NOON photon number exceeds n_max");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(basis_dim<2>(cfg));
  v[flat_index({p.N, 0}, cfg)] = 1.0 / std::sqrt(2.0);
  v[flat_index({0, p.N}, cfg)] = sign_value(p.sign) / std::sqrt(2.0);
  return {std::move(v), cfg};
}

inline NoonDistances noon_distances(const NoonParams& p, double R) {
  p.check();
  return {std::sqrt(1.0 - std::pow(R, p.N)), std::pow(1.0 - R, 0.5 * p.N)};
}

// ---------------------------------------------------------------- QI-OPA macrostates

struct QiopaParams {
  double g = 0.8;
  double phi = 0.0;

  double C() const { return std::cosh(g); }
  double Gamma() const { return std::tanh(g); }
  void check() const {
    if (!(g > 0.0) || !std::isfinite(g)) throw ValidationError("gain g must be > 0");
    if (!(phi >= 0.0 && phi < 2.0 * std::numbers::pi)) throw ValidationError("phi must lie in [0, 2pi)");
  }
};

enum class Polarization { H, V };
enum class Parity { even = 0, odd = 1 };
enum class EquatorialBranch { phi, phi_perp };

inline double qiopa_mean_photon_number(double g) {
  if (!(g > 0.0)) throw ValidationError("gain g must be > 0");
  const double G2 = std::pow(std::tanh(g), 2), C4 = std::pow(std::cosh(g), 4);
  double sum = 0.0, prev = std::numeric_limits<double>::infinity(), w = 1.0 / C4;
  for (int i = 0;; ++i, w *= G2) {
    const double t = w * (i + 1) * (2 * i + 1);
    sum += t;
    if (t < prev && t <= 1e-13 * sum) break;
    prev = t;
  }
  return sum;
}

inline double qiopa_slope_limit(double g) {
  const double C = std::cosh(g), G = std::tanh(g);
  return 1.0 + 4.0 * C * C + 2.0 * C * C * G * std::sqrt(1.0 + 2.0 * G * G);
}

inline Eigen::VectorXcd qiopa_pi_amplitudes(const QiopaParams& p, int n_max, Polarization pol = Polarization::H) {
  p.check();
  const Index d = n_max + 1;
  const double G = p.Gamma(), C2 = p.C() * p.C();
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(d * d);
  for (int i = 0; i + 1 <= n_max; ++i) {
    const double a = std::exp(detail::xlogy(i, G) + 0.5 * std::log(i + 1.0)) / C2;
    v[pol == Polarization::H ? (i + 1) * d + i : i * d + i + 1] = a;
  }
  return v;
}

inline double qiopa_pi_tail(double g, int n_max) {
  const double lG2 = 2.0 * std::log(std::tanh(g)), lC4 = 4.0 * std::log(std::cosh(g));
  return tail_sum([&](int i) { return std::exp(i * lG2 + std::log(i + 1.0) - lC4); }, std::max(0, n_max));
}

inline TwoModeStateVector qiopa_pi_state(const QiopaParams& p, const TruncationConfig& cfg,
                                         Polarization pol = Polarization::H) {
  return {qiopa_pi_amplitudes(p, cfg.n_max, pol), cfg};
}

// Single-mode factor sum_a zeta^a sqrt((2a+P)!)/a! |2a+P>, normalized by C^{3/2} (odd) or C^{1/2} (even).
inline Eigen::VectorXcd squeezed_amplitudes(Parity par, cplx zeta, double C, int n_max) {
  const int P = static_cast<int>(par);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n_max + 1);
  const double lz = std::log(std::abs(zeta)), th = std::arg(zeta);
  const double lnorm = -(P == 1 ? 1.5 : 0.5) * std::log(C);
  for (int a = 0; 2 * a + P <= n_max; ++a) {
    if (a > 0 && zeta == 0.0) break;
    const double l = (a > 0 ? a * lz : 0.0) + 0.5 * detail::log_factorial(2 * a + P) - detail::log_factorial(a) + lnorm;
    v[2 * a + P] = std::polar(std::exp(l), a * th);
  }
  return v;
}

inline cplx equatorial_zeta(const QiopaParams& p) { return std::polar(0.5 * p.Gamma(), -p.phi); }
inline cplx equatorial_zeta_perp(const QiopaParams& p) { return -std::polar(0.5 * p.Gamma(), p.phi); }

struct ModeFactors {
  Eigen::MatrixXcd a;  // first mode
  Eigen::MatrixXcd b;  // second mode
  double trace() const { return a.trace().real() * b.trace().real(); }
  Eigen::MatrixXcd dense() const { return kron(a, b); }
};

struct ModeAmplitudes {
  Eigen::VectorXcd a;
  Eigen::VectorXcd b;
};

// Mode factors of the equatorial macrostate (phi branch: odd x even) or its orthogonal
// partner (even x odd), both in the (phi, phi_perp) basis.
inline ModeAmplitudes qiopa_equatorial_factors(const QiopaParams& p, int n_max,
                                               EquatorialBranch br = EquatorialBranch::phi) {
  p.check();
  const Parity pa = br == EquatorialBranch::phi ? Parity::odd : Parity::even;
  const Parity pb = br == EquatorialBranch::phi ? Parity::even : Parity::odd;
  return {squeezed_amplitudes(pa, equatorial_zeta(p), p.C(), n_max),
          squeezed_amplitudes(pb, equatorial_zeta_perp(p), p.C(), n_max)};
}

inline Eigen::VectorXcd kron(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  Eigen::VectorXcd out(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a[i] * b;
  return out;
}

// Probability of more than n_max photons in a squeezed factor.
inline double squeezed_tail(Parity par, double g, int n_max) {
  const int P = static_cast<int>(par);
  const double lz = std::log(0.5 * std::tanh(g)), lnorm = -(P == 1 ? 3.0 : 1.0) * std::log(std::cosh(g));
  const int first = n_max < P ? 0 : (n_max - P) / 2 + 1;
  return tail_sum(
      [&](int a) {
        return std::exp(2.0 * a * lz + detail::log_factorial(2 * a + P) - 2.0 * detail::log_factorial(a) + lnorm);
      },
      first);
}

inline double qiopa_equatorial_tail(double g, int n_max) {
  const double ta = squeezed_tail(Parity::odd, g, n_max), tb = squeezed_tail(Parity::even, g, n_max);
  return ta + tb - ta * tb;
}

inline TwoModeStateVector qiopa_equatorial_state(const QiopaParams& p, const TruncationConfig& cfg) {
  const auto f = qiopa_equatorial_factors(p, cfg.n_max);
  return {kron(f.a, f.b), cfg};
}

inline TwoModeStateVector qiopa_equatorial_orthogonal_state(const QiopaParams& p, const TruncationConfig& cfg) {
  const auto f = qiopa_equatorial_factors(p, cfg.n_max, EquatorialBranch::phi_perp);
  return {kron(f.a, f.b), cfg};
}

// Lossy squeezed factor: element (i,k) sums over the m photons reflected out of the mode,
//   c_{(i+m-P)/2} conj(c_{(k+m-P)/2}) sqrt(C(i+m,m) C(k+m,m)) sqrt(T)^{i+k} R^m,
// restricted to i+m = k+m = P (mod 2).
inline Eigen::MatrixXcd squeezed_lossy_factor(Parity par, cplx zeta, double C, ChannelParams ch, int n_max) {
  ch.check();
  const int P = static_cast<int>(par);
  const double T = ch.T, R = ch.reflectivity();
  const double lz = std::log(std::abs(zeta)), th = std::arg(zeta);
  const double lnorm = -(P == 1 ? 3.0 : 1.0) * std::log(C);
  auto lc = [&](int s) {  // log|c| without normalization for s = 2a+P photons
    const int a = (s - P) / 2;
    return (a > 0 ? a * lz : 0.0) + 0.5 * detail::log_factorial(s) - detail::log_factorial(a);
  };
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n_max + 1, n_max + 1);
  for (int i = 0; i <= n_max; ++i)
    for (int k = i; k <= n_max; k += 2) {
      const int m0 = ((P - i) % 2 + 2) % 2;
      auto term = [&](int m) {
        if (zeta == 0.0 && (i + m > P || k + m > P)) return 0.0;
        const double l = lc(i + m) + lc(k + m) + lnorm +
                         0.5 * (detail::log_binomial(i + m, m) + detail::log_binomial(k + m, m)) +
                         detail::xlogy(0.5 * (i + k), T) + detail::xlogy(m, R);
        return std::exp(l);
      };
      const double s = detail::sum_series(term, m0, 2);
      const cplx v = std::polar(s, th * (i - k) / 2);
      out(i, k) = v;
      out(k, i) = std::conj(v);
    }
  return out;
}

inline ModeFactors qiopa_equatorial_lossy_factors(const QiopaParams& p, ChannelParams ch, int n_max,
                                                  EquatorialBranch br = EquatorialBranch::phi) {
  p.check();
  const Parity pa = br == EquatorialBranch::phi ? Parity::odd : Parity::even;
  const Parity pb = br == EquatorialBranch::phi ? Parity::even : Parity::odd;
  return {squeezed_lossy_factor(pa, equatorial_zeta(p), p.C(), ch, n_max),
          squeezed_lossy_factor(pb, equatorial_zeta_perp(p), p.C(), ch, n_max)};
}

// Element <i,j| rho |k,q> of the lossy equatorial macrostate; the double sum over the
// photons lost from each mode factorizes into A(i,k) B(j,q).
inline Eigen::MatrixXcd qiopa_equatorial_lossy_elements(const QiopaParams& p, ChannelParams ch, int n_max) {
  return qiopa_equatorial_lossy_factors(p, ch, n_max).dense();
}

inline TwoModeDensityMatrix qiopa_equatorial_lossy_density(const QiopaParams& p, ChannelParams ch,
                                                           const TruncationConfig& cfg) {
  return {qiopa_equatorial_lossy_elements(p, ch, cfg.n_max), cfg};
}

inline void check_factor_trace(const ModeFactors& f, const TruncationConfig& cfg) {
  const double tr = f.trace();
  if (std::abs(1.0 - tr) > std::max(kTraceTolerance, cfg.tail_tolerance))
    throw TruncationError("lossy state trace " + detail::fmt(tr) + " at n_max=" + std::to_string(cfg.n_max));
}

// D(Phi^phi_T, Phi^phi_perp_T) through the product structure of both states.
inline DistanceReport qiopa_equatorial_distance(const QiopaParams& p, ChannelParams ch, const TruncationConfig& cfg) {
  const auto r = qiopa_equatorial_lossy_factors(p, ch, cfg.n_max, EquatorialBranch::phi);
  const auto s = qiopa_equatorial_lossy_factors(p, ch, cfg.n_max, EquatorialBranch::phi_perp);
  check_factor_trace(r, cfg);
  check_factor_trace(s, cfg);
  return bures_distance_product({{r.a, s.a}, {r.b, s.b}});
}

// H/V lossy element <i,j| rho^H |k, k+j-i> as a sum over p >= max(0, j+1-i).
inline double qiopa_hv_element(const QiopaParams& p, ChannelParams ch, int i, int j, int k) {
  const int l = k + j - i;
  if (i < 0 || j < 0 || k < 0 || l < 0) return 0.0;
  const double lG = std::log(p.Gamma()), lC = std::log(p.C());
  const double T = ch.T, R = ch.reflectivity();
  auto term = [&](int q) {
    const double v = (2 * q + i + k - 2) * lG - 4.0 * lC + 0.5 * std::log(double(q + i)) +
                     0.5 * std::log(double(q + k)) + detail::xlogy(k + j, T) +
                     detail::xlogy(2 * q + i - 1 - j, R) +
                     0.5 * (detail::log_binomial(q + i, i) + detail::log_binomial(q + i - 1, j) +
                            detail::log_binomial(q + k, k) + detail::log_binomial(q + k - 1, l));
    return std::exp(v);
  };
  return detail::sum_series(term, std::max(0, j + 1 - i));
}

struct Sector {
  std::vector<Index> basis;
  Eigen::MatrixXcd block;
};

// Blocks of fixed photon-number difference n_a - n_b; basis (i, i-d) ordered by i.
inline std::vector<Sector> qiopa_hv_lossy_sectors(const QiopaParams& p, ChannelParams ch, int n_max,
                                                  Polarization pol = Polarization::H) {
  p.check();
  ch.check();
  const TruncationConfig cfg{n_max};
  std::vector<Sector> out;
  for (int d = -n_max; d <= n_max; ++d) {
    Sector s;
    std::vector<int> rows;
    for (int i = std::max(0, d); i <= std::min(n_max, n_max + d); ++i) {
      rows.push_back(i);
      s.basis.push_back(flat_index({i, i - d}, cfg));
    }
    const Index n = static_cast<Index>(rows.size());
    s.block.resize(n, n);
    for (Index x = 0; x < n; ++x)
      for (Index y = x; y < n; ++y) {
        const int i = rows[x], k = rows[y];
        const double v = pol == Polarization::H ? qiopa_hv_element(p, ch, i, i - d, k)
                                                : qiopa_hv_element(p, ch, i - d, i, k - d);
        s.block(x, y) = v;
        s.block(y, x) = v;
      }
    out.push_back(std::move(s));
  }
  return out;
}

inline Eigen::MatrixXcd assemble(const std::vector<Sector>& sectors, Index dim) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& s : sectors)
    for (std::size_t x = 0; x < s.basis.size(); ++x)
      for (std::size_t y = 0; y < s.basis.size(); ++y) m(s.basis[x], s.basis[y]) = s.block(x, y);
  return m;
}

inline Eigen::MatrixXcd qiopa_hv_lossy_elements(const QiopaParams& p, ChannelParams ch, int n_max,
                                                Polarization pol = Polarization::H) {
  return assemble(qiopa_hv_lossy_sectors(p, ch, n_max, pol), basis_dim<2>(TruncationConfig{n_max}));
}

inline TwoModeDensityMatrix qiopa_hv_lossy_density(const QiopaParams& p, ChannelParams ch,
                                                   const TruncationConfig& cfg, Polarization pol = Polarization::H) {
  return {qiopa_hv_lossy_elements(p, ch, cfg.n_max, pol), cfg};
}

inline double sectors_trace(const std::vector<Sector>& s) {
  double t = 0.0;
  for (const auto& x : s) t += x.block.trace().real();
  return t;
}

inline DistanceReport qiopa_hv_distance(const QiopaParams& p, ChannelParams ch, const TruncationConfig& cfg) {
  const auto h = qiopa_hv_lossy_sectors(p, ch, cfg.n_max, Polarization::H);
  const auto v = qiopa_hv_lossy_sectors(p, ch, cfg.n_max, Polarization::V);
  for (const auto* s : {&h, &v}) {
    const double tr = sectors_trace(*s);
    if (std::abs(1.0 - tr) > std::max(kTraceTolerance, cfg.tail_tolerance))
      throw TruncationError("lossy H/V state trace " + detail::fmt(tr) + " at n_max=" + std::to_string(cfg.n_max));
  }
  std::vector<SectorPair> pairs;
  for (std::size_t d = 0; d < h.size(); ++d) pairs.push_back({h[d].basis, h[d].block, v[d].block});
  return distance_from_sectors(pairs);
}

// ---------------------------------------------------------------- basis changes

// Amplitudes of a state given in the (phi, phi_perp) basis, re-expressed in the (+, -) basis.
// Exact on total photon number <= n_max.
inline Eigen::VectorXcd equatorial_to_diagonal_basis(const Eigen::VectorXcd& psi, double phi, int n_max) {
  const PassiveTransform u(equatorial_to_diagonal_matrix(phi), 2 * n_max);
  return u.apply(psi, n_max, n_max);
}

// Phi^+ (phi = 0) and Phi^- = U|pi_->, both in the (+, -) basis.
inline TwoModeStateVector qiopa_diagonal_state(double g, Sign s, const TruncationConfig& cfg) {
  if (s == Sign::plus) return qiopa_equatorial_state({g, 0.0}, cfg);
  const auto f = qiopa_equatorial_factors({g, std::numbers::pi}, cfg.n_max);
  return {equatorial_to_diagonal_basis(kron(f.a, f.b), std::numbers::pi, cfg.n_max), cfg};
}

// Phi^phi = e^{i phi/2} [cos(phi/2) Phi^+ - i sin(phi/2) Phi^-] in the (+, -) basis.
inline Eigen::VectorXcd qiopa_superposition_amplitudes(double g, double phi, const TruncationConfig& cfg) {
  const auto plus = qiopa_diagonal_state(g, Sign::plus, cfg);
  const auto minus = qiopa_diagonal_state(g, Sign::minus, cfg);
  return std::polar(1.0, phi / 2) * (std::cos(phi / 2) * plus.amplitudes() -
                                     cplx(0.0, 1.0) * std::sin(phi / 2) * minus.amplitudes());
}

enum class Handedness { right, left };

// (Phi^+ +- i Phi^-)/sqrt2
inline TwoModeStateVector qiopa_circular_state(double g, Handedness h, const TruncationConfig& cfg) {
  const auto plus = qiopa_diagonal_state(g, Sign::plus, cfg);
  const auto minus = qiopa_diagonal_state(g, Sign::minus, cfg);
  const cplx c = h == Handedness::right ? cplx(0.0, 1.0) : cplx(0.0, -1.0);
  return {(plus.amplitudes() + c * minus.amplitudes()) / std::sqrt(2.0), cfg};
}

// Rotates the largest-magnitude amplitude to the positive real axis; near-ties go to the lowest index.
inline Eigen::VectorXcd align_global_phase(const Eigen::VectorXcd& v) {
  const double top = v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
  if (top == 0.0) return v;
  Index i = 0;
  while (std::abs(v[i]) < (1.0 - 1e-9) * top) ++i;
  return v * std::polar(1.0, -std::arg(v[i]));
}

// Max deviation between the equatorial state rotated into the (+, -) basis and the
// superposition of Phi^+ and Phi^-, over total photon number <= n_max, after phase alignment.
inline double qiopa_superposition_identity_check(double g, double phi, const TruncationConfig& cfg) {
  const int n = cfg.n_max;
  const auto f = qiopa_equatorial_factors({g, phi}, n);
  Eigen::VectorXcd lhs = equatorial_to_diagonal_basis(kron(f.a, f.b), phi, n);
  Eigen::VectorXcd rhs = qiopa_superposition_amplitudes(g, phi, cfg);
  for (int a = 0; a <= n; ++a)
    for (int b = 0; b <= n; ++b)
      if (a + b > n) lhs[a * (n + 1) + b] = rhs[a * (n + 1) + b] = 0.0;
  return (align_global_phase(lhs) - align_global_phase(rhs)).cwiseAbs().maxCoeff();
}

}  // namespace mqs
