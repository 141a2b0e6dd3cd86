#pragma once

#include <cstddef>
#include <memory>

#include "hkbounds/discrete_operator.hpp"
#include "hkbounds/spectral.hpp"

namespace hkb {

/// Value of a truncated spectral sum together with a rigorous bound on the
/// omitted tail.
struct KernelSample {
  double value = 0.0;
  double remainder = 0.0;
  std::size_t modes = 0;
};

/// Heat kernel k(t,x,y) = sum_n exp(-lambda_n t) psi_n(x) psi_n(y).
///
/// Modes with exp(-lambda_n t) >= truncation * exp(-lambda_0 t) are summed. The
/// tail is bounded with the discrete completeness identity
/// sum_n psi_n(x)^2 = 1 / mass(x), so the bound holds even when only part of
/// the spectrum was computed.
class KernelEvaluator {
 public:
  explicit KernelEvaluator(std::shared_ptr<const SpectralDecomposition> sd, double truncation = 1e-16);

  const SpectralDecomposition& decomposition() const noexcept { return *sd_; }

  /// Truncated sum and tail bound; never throws on accuracy.
  KernelSample evaluate(double t, std::size_t x, std::size_t y) const;

  /// Sums at least the modes of `evaluate`, adding more while the tail bound
  /// exceeds 1e-12 of sqrt(k(t,x,x) k(t,y,y)). Throws TruncationError when
  /// the available modes run out first.
  double heat_kernel(double t, std::size_t x, std::size_t y) const;
  double diagonal(double t, std::size_t x) const { return heat_kernel(t, x, x); }

  std::size_t included_modes(double t) const;

 private:
  KernelSample evaluate_modes(double t, std::size_t x, std::size_t y, std::size_t modes) const;

  std::shared_ptr<const SpectralDecomposition> sd_;
  double truncation_;
};

enum class GreenMethod { spectral, solve, variational };

const char* to_string(GreenMethod method);

/// G_t(x,x) = sum_n psi_n(x)^2 / (t lambda_n + 1). Requires a complete decomposition.
///
/// The point evaluation is represented by the mass-inverse of the nodal
/// indicator, so <f, omega_x> = f(x) and no extra weight appears.
double spectral_green(const SpectralDecomposition& sd, double t, std::size_t x);

/// Factorization of t*stiffness + mass for repeated diagonal resolvent queries at one t.
class ResolventSolver {
 public:
  ResolventSolver(const DiscreteOperator& op, double t);
  ~ResolventSolver();
  ResolventSolver(ResolventSolver&&) noexcept;
  ResolventSolver& operator=(ResolventSolver&&) noexcept;

  double t() const noexcept { return t_; }
  /// u solving (t K + M) u = e_x; the delta pairing <u, omega_x> is u(x).
  Vector solve_delta(std::size_t x) const;
  double diagonal(std::size_t x) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  double t_;
};

struct VariationalOptions {
  double stall_tolerance = 1e-10;  ///< relative ratio gain that counts as stalled
  int stall_window = 50;
  int max_iterations = 0;  ///< 0 means 20 * grid size + 1000
};

struct VariationalResult {
  double value = 0.0;
  Vector maximizer;  ///< normalized so that maximizer(x) = 1
  int iterations = 0;
};

/// |g(x)|^2 / (t Q(g) + |g|^2).
double green_ratio(const DiscreteOperator& op, double t, std::size_t x, const Vector& g);

/// Supremum of green_ratio over grid functions, by conjugate-gradient ascent
/// on the affine slice g(x) = 1 (the ratio is scale invariant, so this is a
/// projection of the ascent onto a normalization). Matrix-free; it never
/// factors the system used by ResolventSolver.
VariationalResult variational_green(const DiscreteOperator& op, double t, std::size_t x,
                                    const VariationalOptions& options = {});

/// Dispatches to one of the three routes. `sd` may be null unless method is spectral.
double green_resolvent(const DiscreteOperator& op, const SpectralDecomposition* sd, double t, std::size_t x,
                       GreenMethod method);

}  // namespace hkb
