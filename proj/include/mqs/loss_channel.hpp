#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <vector>

#include "mqs/detail/math.hpp"
#include "mqs/fock.hpp"
#include "mqs/linear_optics.hpp"

namespace mqs {

struct ChannelParams {
  double T = 1.0;

  static ChannelParams from_transmittivity(double T) {
    ChannelParams p{T};
    p.check();
    return p;
  }
  static ChannelParams from_reflectivity(double R) { return from_transmittivity(1.0 - R); }

  double transmittivity() const { return T; }
  double reflectivity() const { return 1.0 - T; }
  void check() const {
    if (!(T >= 0.0 && T <= 1.0)) throw ValidationError("transmittivity must lie in [0, 1]");
  }
};

class KrausSet {
 public:
  KrausSet(ChannelParams p, const TruncationConfig& cfg) : p_(p), cfg_(cfg) {
    p_.check();
    cfg_.check();
    const Index d = cfg_.mode_dim();
    amp_ = Eigen::MatrixXd::Zero(d, d);
    for (int n = 0; n < d; ++n)
      for (int k = 0; k <= n; ++k) amp_(n, k) = detail::loss_amplitude(n, k, p_.T);
  }

  const ChannelParams& params() const { return p_; }
  const TruncationConfig& truncation() const { return cfg_; }
  Index size() const { return amp_.rows(); }

  // <n-k| E_k |n>
  double amplitude(int n, int k) const { return amp_(n, k); }

  Eigen::MatrixXd op(int k) const {
    const Index d = size();
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(d, d);
    for (int n = k; n < d; ++n) e(n - k, n) = amp_(n, k);
    return e;
  }

  std::vector<Eigen::MatrixXd> operators() const {
    std::vector<Eigen::MatrixXd> ops;
    for (int k = 0; k < size(); ++k) ops.push_back(op(k));
    return ops;
  }

  double completeness_defect() const {
    const Index d = size();
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(d, d);
    for (int k = 0; k < d; ++k) {
      const Eigen::MatrixXd e = op(k);
      s.noalias() += e.transpose() * e;
    }
    return (s - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff();
  }

  // (A(n+k, k)) for n = 0..len-1
  Eigen::VectorXd diagonal(int k, Index len) const {
    Eigen::VectorXd a(len);
    for (Index n = 0; n < len; ++n) a[n] = n + k < size() ? amp_(n + k, k) : 0.0;
    return a;
  }

 private:
  ChannelParams p_;
  TruncationConfig cfg_;
  Eigen::MatrixXd amp_;
};

inline KrausSet build_kraus_set(ChannelParams p, const TruncationConfig& cfg) { return {p, cfg}; }

namespace detail {

// Single-mode channel on a square block whose rows and columns are the same mode,
// keeping output photon numbers up to out_dim-1.
inline Eigen::MatrixXcd loss_on_block(const Eigen::MatrixXcd& blk, const KrausSet& ks, Index out_dim) {
  const Index d = blk.rows();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(out_dim, out_dim);
  for (int k = 0; k < d; ++k) {
    const Index len = std::min(out_dim, d - k);
    if (len <= 0) break;
    const Eigen::VectorXd a = ks.diagonal(k, len);
    out.topLeftCorner(len, len) += a.asDiagonal() * blk.block(k, k, len, len) * a.asDiagonal();
  }
  return out;
}

}  // namespace detail

inline Eigen::MatrixXcd apply_loss_single_mode(const Eigen::MatrixXcd& rho, ChannelParams p,
                                               int n_out) {
  const int n_in = static_cast<int>(rho.rows()) - 1;
  const KrausSet ks(p, TruncationConfig{n_in});
  return detail::loss_on_block(rho, ks, n_out + 1);
}

inline SingleModeDensityMatrix apply_loss(const SingleModeDensityMatrix& rho, ChannelParams p) {
  return {apply_loss_single_mode(rho.entries(), p, rho.truncation().n_max), rho.truncation()};
}

inline SingleModeDensityMatrix apply_loss(const SingleModeStateVector& psi, ChannelParams p,
                                          const TruncationConfig& out) {
  if (out.n_max > psi.truncation().n_max) throw ShapeError("output truncation exceeds input");
  const Eigen::MatrixXcd rho = psi.amplitudes() * psi.amplitudes().adjoint();
  return {apply_loss_single_mode(rho, p, out.n_max), out};
}

// Raw two-mode channel, sum_{k,l} (E_k x E_l) rho (E_k x E_l)^†, applied one mode at a time.
inline Eigen::MatrixXcd apply_loss_two_mode(const Eigen::MatrixXcd& rho, ChannelParams p, int n_in,
                                            int n_out) {
  const Index din = n_in + 1, dout = n_out + 1;
  if (rho.rows() != din * din || rho.cols() != din * din)
    throw ShapeError("two-mode loss: matrix shape does not match truncation");
  if (n_out > n_in) throw ShapeError("output truncation exceeds input");
  const KrausSet ks(p, TruncationConfig{n_in});

  Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(dout * din, dout * din);
  for (int k = 0; k < din; ++k)
    for (Index i = 0; i < dout && i + k < din; ++i)
      for (Index j = 0; j < dout && j + k < din; ++j) {
        const double w = ks.amplitude(i + k, k) * ks.amplitude(j + k, k);
        if (w == 0.0) continue;
        x.block(i * din, j * din, din, din) += w * rho.block((i + k) * din, (j + k) * din, din, din);
      }

  Eigen::MatrixXcd out(dout * dout, dout * dout);
  for (Index i = 0; i < dout; ++i)
    for (Index j = 0; j < dout; ++j)
      out.block(i * dout, j * dout, dout, dout) =
          detail::loss_on_block(x.block(i * din, j * din, din, din), ks, dout);
  return out;
}

inline TwoModeDensityMatrix apply_loss_two_mode(const TwoModeDensityMatrix& rho, ChannelParams p) {
  const int n = rho.truncation().n_max;
  return {apply_loss_two_mode(rho.entries(), p, n, n), rho.truncation()};
}

// Pure input: the mode-a stage is a Gram product, so the input density matrix is never formed.
inline Eigen::MatrixXcd apply_loss_two_mode_pure(const Eigen::VectorXcd& psi, ChannelParams p,
                                                 int n_in, int n_out) {
  const Index din = n_in + 1, dout = n_out + 1;
  if (psi.size() != din * din) throw ShapeError("two-mode loss: vector length does not match truncation");
  if (n_out > n_in) throw ShapeError("output truncation exceeds input");
  const KrausSet ks(p, TruncationConfig{n_in});

  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(dout * din, din);
  for (int k = 0; k < din; ++k)
    for (Index i = 0; i < dout && i + k < din; ++i)
      u.block(i * din, k, din, 1) = ks.amplitude(i + k, k) * psi.segment((i + k) * din, din);
  Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(dout * din, dout * din);
  x.selfadjointView<Eigen::Lower>().rankUpdate(u);
  x.triangularView<Eigen::StrictlyUpper>() = x.adjoint();

  Eigen::MatrixXcd out(dout * dout, dout * dout);
  for (Index i = 0; i < dout; ++i)
    for (Index j = 0; j < dout; ++j)
      out.block(i * dout, j * dout, dout, dout) =
          detail::loss_on_block(x.block(i * din, j * din, din, din), ks, dout);
  return out;
}

inline TwoModeDensityMatrix apply_loss_two_mode(const TwoModeStateVector& psi, ChannelParams p,
                                                const TruncationConfig& out) {
  return {apply_loss_two_mode_pure(psi.amplitudes(), p, psi.truncation().n_max, out.n_max), out};
}

inline cplx coherent_loss_analytic(cplx alpha, ChannelParams p) {
  p.check();
  return std::sqrt(p.T) * alpha;
}

// Secondary oracle: materialize the reflected mode as an environment, scatter on a beam
// splitter and trace the environment out.
inline Eigen::MatrixXcd beam_splitter_loss_single_mode(const Eigen::MatrixXcd& rho, ChannelParams p) {
  const int n = static_cast<int>(rho.rows()) - 1;
  const Index d = n + 1;
  const PassiveTransform bs(beam_splitter_matrix(p.T), n);
  Eigen::MatrixXcd joint = Eigen::MatrixXcd::Zero(d * d, d * d);
  for (int s = 0; s <= n; ++s)
    for (int e = 0; s + e <= n; ++e)
      for (int s2 = 0; s2 <= n; ++s2)
        for (int e2 = 0; s2 + e2 <= n; ++e2)
          joint(s * d + e, s2 * d + e2) = bs.block(s + e)(s, s + e) * rho(s + e, s2 + e2) *
                                          std::conj(bs.block(s2 + e2)(s2, s2 + e2));
  return partial_trace_second_system(joint, d, d);
}

inline Eigen::MatrixXcd beam_splitter_loss_two_mode(const Eigen::MatrixXcd& rho, ChannelParams p,
                                                    int n_max) {
  const Index d = n_max + 1;
  if (rho.rows() != d * d) throw ShapeError("beam splitter oracle: shape mismatch");
  const PassiveTransform bs(beam_splitter_matrix(p.T), n_max);
  auto amp = [&](int out, int env) { return bs.block(out + env)(out, out + env); };

  // environment attached to mode a: joint ordering (a, b, e)
  Eigen::MatrixXcd joint = Eigen::MatrixXcd::Zero(d * d * d, d * d * d);
  for (int a = 0; a <= n_max; ++a)
    for (int e = 0; a + e <= n_max; ++e)
      for (int a2 = 0; a2 <= n_max; ++a2)
        for (int e2 = 0; a2 + e2 <= n_max; ++e2) {
          const cplx w = amp(a, e) * std::conj(amp(a2, e2));
          for (int b = 0; b < d; ++b)
            for (int b2 = 0; b2 < d; ++b2)
              joint((a * d + b) * d + e, (a2 * d + b2) * d + e2) =
                  w * rho((a + e) * d + b, (a2 + e2) * d + b2);
        }
  const Eigen::MatrixXcd mid = partial_trace_second_system(joint, d * d, d);

  joint.setZero();
  for (int b = 0; b <= n_max; ++b)
    for (int e = 0; b + e <= n_max; ++e)
      for (int b2 = 0; b2 <= n_max; ++b2)
        for (int e2 = 0; b2 + e2 <= n_max; ++e2) {
          const cplx w = amp(b, e) * std::conj(amp(b2, e2));
          for (int a = 0; a < d; ++a)
            for (int a2 = 0; a2 < d; ++a2)
              joint((a * d + b) * d + e, (a2 * d + b2) * d + e2) =
                  w * mid(a * d + b + e, a2 * d + b2 + e2);
        }
  return partial_trace_second_system(joint, d * d, d);
}

}  // namespace mqs
