#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "mqs/detail/linalg.hpp"
#include "mqs/fock.hpp"

namespace mqs {

inline constexpr double kEigenvalueFloor = 1e-12;

struct DistanceReport {
  double fidelity = 0.0;
  double bures = 1.0;
  double min_eigenvalue_encountered = 0.0;
};

inline Eigen::MatrixXcd hermitian_sqrt(const Eigen::MatrixXcd& rho) {
  if (hermiticity_defect(rho) > kHermitianTolerance) throw ValidationError("hermitian_sqrt: input not Hermitian");
  auto es = detail::hermitian_eigen(rho);
  Eigen::VectorXd s(es.values.size());
  for (Index i = 0; i < s.size(); ++i) {
    const double w = es.values[i];
    if (w < -1e-6) throw NotPositiveSemidefinite("hermitian_sqrt: eigenvalue " + detail::fmt(w));
    s[i] = w > 0.0 ? std::sqrt(w) : 0.0;
  }
  return es.vectors * s.asDiagonal() * es.vectors.adjoint();
}

template <int Modes>
Eigen::MatrixXcd hermitian_sqrt(const DensityMatrix<Modes>& rho) {
  return hermitian_sqrt(rho.entries());
}

// A pair of states restricted to a common invariant subspace, given by basis indices.
struct SectorPair {
  std::vector<Index> basis;
  Eigen::MatrixXcd rho;
  Eigen::MatrixXcd sigma;
};

// Connected components of the joint nonzero pattern; both matrices are block diagonal on them.
inline std::vector<SectorPair> joint_sectors(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols() || rho.rows() != rho.cols())
    throw ShapeError("fidelity: operand shapes differ");
  const Index d = rho.rows();
  std::vector<Index> parent(d);
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (Index j = 0; j < d; ++j)
    for (Index i = j + 1; i < d; ++i)
      if (rho(i, j) != 0.0 || sigma(i, j) != 0.0) {
        const Index a = find(i), b = find(j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }

  std::vector<Index> slot(d, -1);
  std::vector<SectorPair> sectors;
  for (Index i = 0; i < d; ++i) {
    const Index r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<Index>(sectors.size());
      sectors.emplace_back();
    }
    sectors[slot[r]].basis.push_back(i);
  }
  for (auto& s : sectors) {
    const Index n = static_cast<Index>(s.basis.size());
    s.rho.resize(n, n);
    s.sigma.resize(n, n);
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) {
        s.rho(i, j) = rho(s.basis[i], s.basis[j]);
        s.sigma(i, j) = sigma(s.basis[i], s.basis[j]);
      }
  }
  return sectors;
}

namespace detail {

inline Eigen::MatrixXcd weighted_support(const EigenDecomposition& es) {
  std::vector<Index> keep;
  for (Index i = 0; i < es.values.size(); ++i)
    if (es.values[i] > kEigenvalueFloor) keep.push_back(i);
  Eigen::MatrixXcd out(es.vectors.rows(), static_cast<Index>(keep.size()));
  for (Index c = 0; c < out.cols(); ++c)
    out.col(c) = es.vectors.col(keep[c]) * std::sqrt(es.values[keep[c]]);
  return out;
}

inline void check_spectrum(const Eigen::VectorXd& w, double& min_eig) {
  if (w.size() == 0) return;
  const double m = w.minCoeff();
  min_eig = std::min(min_eig, m);
  if (m < -kPositivityTolerance)
    throw NotPositiveSemidefinite("fidelity: eigenvalue " + detail::fmt(m));
}

// Tr|sqrt(sigma) sqrt(rho)| = sum of singular values of (W_s L_s^{1/2})^† (W_r L_r^{1/2}).
inline double sector_fidelity(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma, double& min_eig) {
  const auto er = hermitian_eigen(rho);
  check_spectrum(er.values, min_eig);
  const auto es = hermitian_eigen(sigma);
  check_spectrum(es.values, min_eig);
  const Eigen::MatrixXcd a = weighted_support(er);
  const Eigen::MatrixXcd b = weighted_support(es);
  if (a.cols() == 0 || b.cols() == 0) return 0.0;
  return singular_values(b.adjoint() * a).sum();
}

}  // namespace detail

inline DistanceReport distance_from_sectors(const std::vector<SectorPair>& sectors) {
  double f = 0.0;
  double min_eig = std::numeric_limits<double>::infinity();
  for (const auto& s : sectors) {
    if (s.rho.rows() != s.sigma.rows() || s.rho.rows() != static_cast<Index>(s.basis.size()))
      throw ShapeError("fidelity: sector shape mismatch");
    if (hermiticity_defect(s.rho) > kHermitianTolerance || hermiticity_defect(s.sigma) > kHermitianTolerance)
      throw ValidationError("fidelity: operand not Hermitian");
    f += detail::sector_fidelity(s.rho, s.sigma, min_eig);
  }
  if (f < -kPositivityTolerance || f > 1.0 + kPositivityTolerance)
    throw ValidationError("fidelity " + detail::fmt(f) + " outside [0, 1]");
  f = std::clamp(f, 0.0, 1.0);
  if (sectors.empty()) min_eig = 0.0;
  return {f, std::sqrt(1.0 - f), min_eig};
}

inline DistanceReport bures_distance(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma) {
  return distance_from_sectors(joint_sectors(rho, sigma));
}

template <int Modes>
DistanceReport bures_distance(const DensityMatrix<Modes>& rho, const DensityMatrix<Modes>& sigma) {
  if (rho.truncation().n_max != sigma.truncation().n_max) throw ShapeError("fidelity: truncation mismatch");
  return bures_distance(rho.entries(), sigma.entries());
}

template <int Modes>
double fidelity(const DensityMatrix<Modes>& rho, const DensityMatrix<Modes>& sigma) {
  return bures_distance(rho, sigma).fidelity;
}

inline double fidelity(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma) {
  return bures_distance(rho, sigma).fidelity;
}

// Product states: fidelity factorizes over the tensor factors.
inline DistanceReport bures_distance_product(const std::vector<std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd>>& factors) {
  double f = 1.0;
  double min_eig = std::numeric_limits<double>::infinity();
  for (const auto& [r, s] : factors) {
    const auto rep = bures_distance(r, s);
    f *= rep.fidelity;
    min_eig = std::min(min_eig, rep.min_eigenvalue_encountered);
  }
  return {f, std::sqrt(1.0 - f), min_eig};
}

}  // namespace mqs
