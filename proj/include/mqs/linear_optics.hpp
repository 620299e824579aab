#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <vector>

#include "mqs/fock.hpp"

namespace mqs {

// Passive two-mode transform given by the images of the creation operators,
//   a^† -> m(0,0) A^† + m(0,1) B^†,   b^† -> m(1,0) A^† + m(1,1) B^†.
// block(N)(p, n) is the amplitude of |p, N-p> in the image of |n, N-n>.
class PassiveTransform {
 public:
  PassiveTransform(const Eigen::Matrix2cd& m, int max_total) : blocks_(max_total + 1) {
    std::vector<Eigen::VectorXcd> row;  // images of |n, 0>
    row.emplace_back(Eigen::VectorXcd::Ones(1));
    for (int n = 1; n <= max_total; ++n)
      row.push_back(raise(row.back(), m(0, 0), m(0, 1)) / std::sqrt(double(n)));
    for (int N = 0; N <= max_total; ++N) blocks_[N].resize(N + 1, N + 1);
    for (int n = 0; n <= max_total; ++n) {
      Eigen::VectorXcd img = row[n];
      blocks_[n].col(n) = img;
      for (int k = 1; n + k <= max_total; ++k) {
        img = raise(img, m(1, 0), m(1, 1)) / std::sqrt(double(k));
        blocks_[n + k].col(n) = img;
      }
    }
  }

  int max_total() const { return static_cast<int>(blocks_.size()) - 1; }
  const Eigen::MatrixXcd& block(int total) const { return blocks_.at(total); }

  // Amplitudes over (n_in+1)^2 in, (n_out+1)^2 out; components leaving the output box are dropped.
  Eigen::VectorXcd apply(const Eigen::VectorXcd& psi, int n_in, int n_out) const {
    const Index din = n_in + 1, dout = n_out + 1;
    if (psi.size() != din * din) throw ShapeError("passive transform: input length mismatch");
    if (2 * n_in > max_total()) throw ShapeError("passive transform: photon number exceeds table");
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dout * dout);
    for (int a = 0; a <= n_in; ++a)
      for (int b = 0; b <= n_in; ++b) {
        const cplx c = psi[a * din + b];
        if (c == 0.0) continue;
        const int N = a + b;
        const auto& blk = blocks_[N];
        for (int p = std::max(0, N - n_out); p <= std::min(N, n_out); ++p)
          out[p * dout + (N - p)] += blk(p, a) * c;
      }
    return out;
  }

 private:
  // (x A^† + y B^†) on a vector over |p, M-p>, p = 0..M
  static Eigen::VectorXcd raise(const Eigen::VectorXcd& v, cplx x, cplx y) {
    const Index M = v.size() - 1;
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(M + 2);
    for (Index p = 0; p <= M; ++p) {
      out[p + 1] += x * std::sqrt(double(p + 1)) * v[p];
      out[p] += y * std::sqrt(double(M - p + 1)) * v[p];
    }
    return out;
  }

  std::vector<Eigen::MatrixXcd> blocks_;
};

// Beam splitter with amplitude transmission t = sqrt(T): |n, 0> -> sum_k sqrt(C(n,k) T^{n-k} R^k) |n-k, k>.
inline Eigen::Matrix2cd beam_splitter_matrix(double T) {
  const double t = std::sqrt(T), r = std::sqrt(1.0 - T);
  Eigen::Matrix2cd m;
  m << t, r, -r, t;
  return m;
}

// Creation operators of the (phi, phi_perp) modes expressed through the (+, -) modes,
// with pi_phi = (H + e^{i phi} V)/sqrt2, pi_phi_perp = (e^{-i phi} H - V)/sqrt2, pi_+- = (H +- V)/sqrt2.
inline Eigen::Matrix2cd equatorial_to_diagonal_matrix(double phi) {
  const cplx e = std::polar(1.0, phi), ec = std::conj(e);
  Eigen::Matrix2cd m;
  m << (1.0 + e) / 2.0, (1.0 - e) / 2.0, (ec - 1.0) / 2.0, (ec + 1.0) / 2.0;
  return m;
}

}  // namespace mqs
