#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <string>

#include "mqs/detail/linalg.hpp"
#include "mqs/detail/math.hpp"
#include "mqs/error.hpp"

namespace mqs {

using cplx = std::complex<double>;
using Index = Eigen::Index;

inline constexpr double kNormTolerance = 1e-10;
inline constexpr double kHermitianTolerance = 1e-10;
inline constexpr double kTraceTolerance = 1e-9;
inline constexpr double kPositivityTolerance = 1e-9;

struct TruncationConfig {
  int n_max = 0;
  double tail_tolerance = 1e-10;

  void check() const {
    if (n_max < 0) throw ValidationError("n_max must be >= 0");
    if (!(tail_tolerance > 0.0 && tail_tolerance < 1.0))
      throw ValidationError("tail_tolerance must lie in (0, 1)");
  }
  Index mode_dim() const { return n_max + 1; }
  bool operator==(const TruncationConfig&) const = default;
};

template <int Modes>
Index basis_dim(const TruncationConfig& cfg) {
  static_assert(Modes == 1 || Modes == 2);
  return Modes == 1 ? cfg.mode_dim() : cfg.mode_dim() * cfg.mode_dim();
}

struct TwoModeIndex {
  int n_a = 0;
  int n_b = 0;
  bool operator==(const TwoModeIndex&) const = default;
};

inline Index flat_index(TwoModeIndex i, const TruncationConfig& cfg) {
  if (i.n_a < 0 || i.n_a > cfg.n_max || i.n_b < 0 || i.n_b > cfg.n_max)
    throw IndexError("photon numbers (" + std::to_string(i.n_a) + ", " + std::to_string(i.n_b) +
                     ") outside [0, " + std::to_string(cfg.n_max) + "]");
  return static_cast<Index>(i.n_a) * cfg.mode_dim() + i.n_b;
}

inline TwoModeIndex two_mode_index(Index flat, const TruncationConfig& cfg) {
  const Index d = cfg.mode_dim();
  if (flat < 0 || flat >= d * d) throw IndexError("flat index out of range");
  return {static_cast<int>(flat / d), static_cast<int>(flat % d)};
}

inline double hermiticity_defect(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

template <int Modes>
class StateVector {
 public:
  StateVector(Eigen::VectorXcd amplitudes, TruncationConfig cfg)
      : amps_(std::move(amplitudes)), cfg_(cfg) {
    cfg_.check();
    if (amps_.size() != basis_dim<Modes>(cfg_))
      throw ShapeError("state vector length " + std::to_string(amps_.size()) + ", expected " +
                       std::to_string(basis_dim<Modes>(cfg_)));
    const double n2 = amps_.squaredNorm();
    if (n2 > 1.0 + kNormTolerance)
      throw ValidationError("state norm^2 " + detail::fmt(n2) + " exceeds 1");
    if (1.0 - n2 > cfg_.tail_tolerance)
      throw TruncationError("tail probability " + detail::fmt(1.0 - n2) +
                            " exceeds tolerance at n_max=" + std::to_string(cfg_.n_max));
  }

  const Eigen::VectorXcd& amplitudes() const { return amps_; }
  const TruncationConfig& truncation() const { return cfg_; }
  Index dim() const { return amps_.size(); }
  double norm_squared() const { return amps_.squaredNorm(); }

  cplx operator[](Index i) const { return amps_[i]; }
  cplx at(TwoModeIndex i) const
    requires(Modes == 2)
  {
    return amps_[flat_index(i, cfg_)];
  }

 private:
  Eigen::VectorXcd amps_;
  TruncationConfig cfg_;
};

template <int Modes>
class DensityMatrix {
 public:
  DensityMatrix(Eigen::MatrixXcd entries, TruncationConfig cfg)
      : rho_(std::move(entries)), cfg_(cfg) {
    cfg_.check();
    const Index d = basis_dim<Modes>(cfg_);
    if (rho_.rows() != d || rho_.cols() != d)
      throw ShapeError("density matrix shape " + std::to_string(rho_.rows()) + "x" +
                       std::to_string(rho_.cols()) + ", expected " + std::to_string(d));
    const double h = hermiticity_defect(rho_);
    if (h > kHermitianTolerance)
      throw ValidationError("density matrix not Hermitian (defect " + detail::fmt(h) + ")");
    const double tr = trace();
    if (std::abs(tr - 1.0) > std::max(kTraceTolerance, cfg_.tail_tolerance))
      throw TruncationError("density matrix trace " + detail::fmt(tr) + " differs from 1 at n_max=" +
                            std::to_string(cfg_.n_max));
  }

  const Eigen::MatrixXcd& entries() const { return rho_; }
  const TruncationConfig& truncation() const { return cfg_; }
  Index dim() const { return rho_.rows(); }
  double trace() const { return rho_.trace().real(); }

  double min_eigenvalue() const {
    if (dim() == 0) return 0.0;
    return detail::hermitian_eigenvalues(rho_).minCoeff();
  }

  // Positivity is expensive at large n_max, so it is checked on request.
  void check_positive() const {
    const double m = min_eigenvalue();
    if (m < -kPositivityTolerance)
      throw NotPositiveSemidefinite("minimum eigenvalue " + detail::fmt(m));
  }

 private:
  Eigen::MatrixXcd rho_;
  TruncationConfig cfg_;
};

using SingleModeStateVector = StateVector<1>;
using TwoModeStateVector = StateVector<2>;
using SingleModeDensityMatrix = DensityMatrix<1>;
using TwoModeDensityMatrix = DensityMatrix<2>;

template <int Modes>
DensityMatrix<Modes> pure_to_density(const StateVector<Modes>& v) {
  const double n2 = v.norm_squared();
  if (std::abs(n2 - 1.0) > std::max(kNormTolerance, v.truncation().tail_tolerance))
    throw ValidationError("pure_to_density: input norm^2 " + detail::fmt(n2));
  Eigen::MatrixXcd rho = v.amplitudes() * v.amplitudes().adjoint();
  return DensityMatrix<Modes>(std::move(rho), v.truncation());
}

inline SingleModeStateVector basis_state(int n, const TruncationConfig& cfg) {
  if (n < 0 || n > cfg.n_max) throw IndexError("photon number outside truncation");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(cfg.mode_dim());
  v[n] = 1.0;
  return {std::move(v), cfg};
}

inline TwoModeStateVector basis_state(TwoModeIndex i, const TruncationConfig& cfg) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(basis_dim<2>(cfg));
  v[flat_index(i, cfg)] = 1.0;
  return {std::move(v), cfg};
}

// Kronecker product, first factor major.
inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Eigen::MatrixXcd partial_trace_second_system(const Eigen::MatrixXcd& joint, Index dim_system,
                                                    Index dim_environment) {
  if (dim_system < 0 || dim_environment < 0 || joint.rows() != joint.cols() ||
      joint.rows() != dim_system * dim_environment)
    throw ShapeError("partial trace: joint matrix is " + std::to_string(joint.rows()) + "x" +
                     std::to_string(joint.cols()) + ", dims " + std::to_string(dim_system) + "*" +
                     std::to_string(dim_environment));
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim_system, dim_system);
  for (Index i = 0; i < dim_system; ++i)
    for (Index j = 0; j < dim_system; ++j) {
      cplx s = 0.0;
      for (Index e = 0; e < dim_environment; ++e)
        s += joint(i * dim_environment + e, j * dim_environment + e);
      out(i, j) = s;
    }
  return out;
}

template <int Modes>
DensityMatrix<Modes> partial_trace_second_system(const Eigen::MatrixXcd& joint,
                                                 const TruncationConfig& system_cfg,
                                                 Index dim_environment) {
  return DensityMatrix<Modes>(
      partial_trace_second_system(joint, basis_dim<Modes>(system_cfg), dim_environment),
      system_cfg);
}

// Probability mass on (even,even), (even,odd), (odd,even), (odd,odd).
inline std::array<double, 4> parity_spectrum(const TwoModeDensityMatrix& rho) {
  std::array<double, 4> mass{};
  const auto& cfg = rho.truncation();
  for (Index f = 0; f < rho.dim(); ++f) {
    const auto [a, b] = two_mode_index(f, cfg);
    mass[2 * (a % 2) + (b % 2)] += rho.entries()(f, f).real();
  }
  return mass;
}

inline double mean_photon_number(const SingleModeDensityMatrix& rho) {
  double s = 0.0;
  for (Index n = 0; n < rho.dim(); ++n) s += static_cast<double>(n) * rho.entries()(n, n).real();
  return s;
}

inline double mean_photon_number(const TwoModeDensityMatrix& rho) {
  double s = 0.0;
  for (Index f = 0; f < rho.dim(); ++f) {
    const auto [a, b] = two_mode_index(f, rho.truncation());
    s += (a + b) * rho.entries()(f, f).real();
  }
  return s;
}

template <int Modes>
double mean_photon_number(const StateVector<Modes>& v) {
  double s = 0.0;
  for (Index f = 0; f < v.dim(); ++f) {
    int n = static_cast<int>(f);
    if constexpr (Modes == 2) {
      const auto [a, b] = two_mode_index(f, v.truncation());
      n = a + b;
    }
    s += n * std::norm(v[f]);
  }
  return s;
}

}  // namespace mqs
