#include "hkbounds/kernel.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <deque>

#include "hkbounds/errors.hpp"

namespace hkb {

KernelEvaluator::KernelEvaluator(std::shared_ptr<const SpectralDecomposition> sd, double truncation)
    : sd_(std::move(sd)), truncation_(truncation) {
  if (!sd_ || sd_->count() == 0) throw InvalidArgument("KernelEvaluator needs a nonempty decomposition");
  if (!(truncation_ > 0.0 && truncation_ < 1.0)) throw InvalidArgument("truncation must lie in (0,1)");
}

std::size_t KernelEvaluator::included_modes(double t) const {
  const double cutoff = sd_->eigenvalues(0) - std::log(truncation_) / t;
  const auto* begin = sd_->eigenvalues.data();
  const auto* end = begin + sd_->eigenvalues.size();
  return static_cast<std::size_t>(std::upper_bound(begin, end, cutoff) - begin);
}

KernelSample KernelEvaluator::evaluate(double t, std::size_t x, std::size_t y) const {
  if (!(t > 0.0)) throw InvalidArgument("heat kernel needs t > 0");
  return evaluate_modes(t, x, y, included_modes(t));
}

KernelSample KernelEvaluator::evaluate_modes(double t, std::size_t x, std::size_t y, std::size_t modes) const {
  const auto& sd = *sd_;
  if (x >= sd.grid.size() || y >= sd.grid.size()) throw InvalidArgument("kernel node out of range");
  modes = std::min(modes, sd.count());
  const auto xi = static_cast<Eigen::Index>(x);
  const auto yi = static_cast<Eigen::Index>(y);

  double value = 0.0;
  double norm_x = 0.0;
  double norm_y = 0.0;
  for (std::size_t n = 0; n < modes; ++n) {
    const auto ni = static_cast<Eigen::Index>(n);
    const double px = sd.eigenvectors(xi, ni);
    const double py = sd.eigenvectors(yi, ni);
    value += std::exp(-sd.eigenvalues(ni) * t) * (px * py);  // grouped so k(x,y) == k(y,x) bitwise
    norm_x += px * px;
    norm_y += py * py;
  }

  double remainder = 0.0;
  if (!(sd.complete && modes == sd.count())) {
    // Omitted modes all have lambda >= lambda_tail; Cauchy-Schwarz against the
    // completeness identity bounds their sum.
    const double lambda_tail = sd.lambda(std::min(modes, sd.count() - 1));
    const double rest_x = std::max(0.0, 1.0 / sd.mass(xi) - norm_x);
    const double rest_y = std::max(0.0, 1.0 / sd.mass(yi) - norm_y);
    remainder = std::exp(-lambda_tail * t) * std::sqrt(rest_x * rest_y);
  }
  return {value, remainder, modes};
}

double KernelEvaluator::heat_kernel(double t, std::size_t x, std::size_t y) const {
  auto s = evaluate(t, x, y);
  double scale = std::abs(s.value);
  if (x != y) scale = std::sqrt(std::abs(evaluate(t, x, x).value * evaluate(t, y, y).value));
  // Where k itself is tiny (near the boundary) the default cutoff is not
  // enough; add modes until the tail meets the guarantee or the spectrum ends.
  while (s.remainder > 1e-12 * scale && s.modes < sd_->count()) {
    s = evaluate_modes(t, x, y, 2 * s.modes + 16);
    if (x == y) scale = std::abs(s.value);
  }
  if (s.remainder > 1e-12 * scale) {
    throw TruncationError("heat kernel truncation tail " + std::to_string(s.remainder) + " exceeds 1e-12 of " +
                          std::to_string(scale) + " at t=" + std::to_string(t) +
                          "; compute more eigenpairs or use a larger t");
  }
  return s.value;
}

const char* to_string(GreenMethod method) {
  switch (method) {
    case GreenMethod::spectral: return "spectral";
    case GreenMethod::solve: return "solve";
    case GreenMethod::variational: return "variational";
  }
  return "?";
}

double spectral_green(const SpectralDecomposition& sd, double t, std::size_t x) {
  if (!(t >= 0.0)) throw InvalidArgument("resolvent needs t >= 0");
  if (!sd.complete) throw InvalidArgument("spectral resolvent route needs the complete spectrum");
  if (x >= sd.grid.size()) throw InvalidArgument("resolvent node out of range");
  const auto xi = static_cast<Eigen::Index>(x);
  double g = 0.0;
  for (Eigen::Index n = 0; n < sd.eigenvalues.size(); ++n) {
    const double p = sd.eigenvectors(xi, n);
    g += p * p / (t * sd.eigenvalues(n) + 1.0);
  }
  return g;
}

struct ResolventSolver::Impl {
  Eigen::SimplicialLDLT<SparseMatrix> factor;
  SparseMatrix matrix;
  Eigen::Index size = 0;
};

ResolventSolver::ResolventSolver(const DiscreteOperator& op, double t) : impl_(std::make_unique<Impl>()), t_(t) {
  if (!(t >= 0.0)) throw InvalidArgument("resolvent needs t >= 0");
  SparseMatrix a = t * op.stiffness();
  SparseMatrix mass(a.rows(), a.cols());
  std::vector<Eigen::Triplet<double>> diag;
  for (Eigen::Index i = 0; i < a.rows(); ++i) diag.emplace_back(static_cast<int>(i), static_cast<int>(i), op.mass()(i));
  mass.setFromTriplets(diag.begin(), diag.end());
  a += mass;
  impl_->factor.compute(a);
  impl_->size = a.rows();
  impl_->matrix = std::move(a);
  if (impl_->factor.info() != Eigen::Success) {
    throw std::logic_error("t*stiffness + mass failed to factor; the forms are not positive definite");
  }
}

ResolventSolver::~ResolventSolver() = default;
ResolventSolver::ResolventSolver(ResolventSolver&&) noexcept = default;
ResolventSolver& ResolventSolver::operator=(ResolventSolver&&) noexcept = default;

Vector ResolventSolver::solve_delta(std::size_t x) const {
  if (static_cast<Eigen::Index>(x) >= impl_->size) throw InvalidArgument("resolvent node out of range");
  Vector e = Vector::Zero(impl_->size);
  e(static_cast<Eigen::Index>(x)) = 1.0;
  Vector u = impl_->factor.solve(e);
  // one step of iterative refinement; t K + M is badly conditioned for m >= 2
  u += impl_->factor.solve(e - impl_->matrix * u);
  return u;
}

double ResolventSolver::diagonal(std::size_t x) const { return solve_delta(x)(static_cast<Eigen::Index>(x)); }

double green_ratio(const DiscreteOperator& op, double t, std::size_t x, const Vector& g) {
  const double gx = g(static_cast<Eigen::Index>(x));
  return gx * gx / (t * op.stiffness_form(g, g) + op.mass_form(g, g));
}

VariationalResult variational_green(const DiscreteOperator& op, double t, std::size_t x,
                                    const VariationalOptions& options) {
  if (!(t >= 0.0)) throw InvalidArgument("resolvent needs t >= 0");
  const auto n = static_cast<Eigen::Index>(op.size());
  const auto xi = static_cast<Eigen::Index>(x);
  if (xi >= n) throw InvalidArgument("resolvent node out of range");
  const int cap = options.max_iterations > 0 ? options.max_iterations : static_cast<int>(20 * n + 1000);

  auto apply = [&](const Vector& v) -> Vector { return t * (op.stiffness() * v) + op.mass().cwiseProduct(v); };

  // Maximizing g(x)^2 / E(g) with E(g) = g^T A g is minimizing E on the slice
  // g(x) = 1. Search directions live in the tangent space {v : v(x) = 0}.
  Vector g = Vector::Zero(n);
  g(xi) = 1.0;
  Vector ag = apply(g);
  Vector r = -ag;
  r(xi) = 0.0;
  Vector p = r;
  double rr = r.squaredNorm();
  const double rr0 = rr;
  double energy = g.dot(ag);

  std::deque<double> history{1.0 / energy};
  int iter = 0;
  while (iter < cap && rr > 1e-32 * rr0 && rr > 0.0) {
    const Vector ap = apply(p);
    const double curvature = p.dot(ap);
    if (!(curvature > 0.0)) break;
    const double step = rr / curvature;
    g += step * p;
    ag += step * ap;
    r -= step * ap;
    r(xi) = 0.0;
    const double rr_next = r.squaredNorm();
    p = r + (rr_next / rr) * p;
    p(xi) = 0.0;
    rr = rr_next;
    ++iter;

    energy = g.dot(ag);
    const double ratio = 1.0 / energy;
    history.push_back(ratio);
    if (static_cast<int>(history.size()) > options.stall_window) {
      const double gain = ratio - history.front();
      history.pop_front();
      if (gain < options.stall_tolerance * ratio) break;
    }
  }
  if (iter >= cap) {
    throw NonConvergence("variational Green route hit its iteration cap (" + std::to_string(cap) + ")");
  }
  // recompute from scratch to shed accumulated recurrence drift
  const double value = 1.0 / g.dot(apply(g));
  return {value, std::move(g), iter};
}

double green_resolvent(const DiscreteOperator& op, const SpectralDecomposition* sd, double t, std::size_t x,
                       GreenMethod method) {
  switch (method) {
    case GreenMethod::spectral:
      if (sd == nullptr) throw InvalidArgument("spectral resolvent route needs a decomposition");
      return spectral_green(*sd, t, x);
    case GreenMethod::solve:
      return ResolventSolver(op, t).diagonal(x);
    case GreenMethod::variational:
      return variational_green(op, t, x).value;
  }
  throw InvalidArgument("unknown resolvent method");
}

}  // namespace hkb
