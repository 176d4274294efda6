#pragma once
// Sparse convex quadratic programming for the predictive controllers:
//   minimize    0.5*x'Hx + g'x
//   subject to  A_eq x = b_eq,  lb <= x <= ub
// solved with an operator-splitting iteration (over-relaxed ADMM on the
// stacked constraint [A_eq; I]), equilibration, optional solution polish,
// and an independent KKT residual checker.

#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lfc/sparse.hpp"

namespace lfc {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct QuadraticProgram {
  int n = 0;
  CscMatrix hessian;              // n x n, symmetric PSD, both triangles stored
  std::vector<double> linear;     // g, size n
  CscMatrix eq;                   // m x n equality matrix
  std::vector<double> eq_rhs;     // b, size m
  std::vector<double> lb, ub;     // box bounds, +-inf allowed

  int eq_count() const { return eq.rows(); }

  /// Throws std::invalid_argument on dimension mismatch, asymmetric or
  /// negative-diagonal H, or lb > ub.
  void validate() const;
};

enum class QpStatus { optimal, max_iter, infeasible };
std::string_view to_string(QpStatus status);

struct QpSolution {
  std::vector<double> x;  // primal, size n
  std::vector<double> y;  // equality duals, size m
  std::vector<double> z;  // bound duals, size n (<=0 at lower, >=0 at upper)
  QpStatus status = QpStatus::max_iter;
  // Scaled residual norms: raw infinity norm divided by (1 + problem scale),
  // so status == optimal implies r_prim <= tol_prim and r_dual <= tol_dual.
  double r_prim = kInf;
  double r_dual = kInf;
  int iterations = 0;
  double objective = 0.0;
};

struct SolverSettings {
  double tol_prim = 1e-6;
  double tol_dual = 1e-6;
  int max_iter = 20000;
  double rho = 0.1;            // base step size; equality rows use rho * eq_rho_scale
  double eq_rho_scale = 1e3;
  double sigma = 1e-6;         // primal regularization
  double alpha = 1.6;          // over-relaxation
  double eps_infeas = 1e-6;    // infeasibility certificate threshold
  bool scaling = true;
  int scaling_iters = 10;
  bool adaptive_rho = true;
  bool polish = true;
  double polish_delta = 1e-7;
  int polish_refine_iters = 3;
  int check_interval = 10;     // iterations between convergence checks
};

/// Internal failure that should be unreachable by construction.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Persistent solver: factorizations and scalings are computed once at
/// construction and reused across value updates, which is what the
/// receding-horizon loop needs. Instances are independent; distinct
/// instances may solve concurrently.
class QpSolver {
 public:
  explicit QpSolver(QuadraticProgram qp, SolverSettings settings = {});
  ~QpSolver();
  QpSolver(QpSolver&&) noexcept;
  QpSolver& operator=(QpSolver&&) noexcept;

  void update_linear(std::span<const double> g);
  void update_eq_rhs(std::span<const double> b);
  void update_bounds(std::span<const double> lb, std::span<const double> ub);

  const QpSolution& solve();
  const QpSolution& solve(const QpSolution& warm_start);

  const QuadraticProgram& problem() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-shot solve with default operator-splitting settings.
QpSolution solve_qp(const QuadraticProgram& qp, double tol_prim = 1e-6, double tol_dual = 1e-6,
                    int max_iter = 20000);

/// KKT residuals recomputed from scratch, independently of the solver's
/// internal bookkeeping. Each condition passes when its raw infinity norm is
/// within tol * (1 + scale of the quantities involved).
struct KktReport {
  double eq_residual = 0.0;       // ||A_eq x - b||_inf
  double box_residual = 0.0;      // max distance outside [lb, ub]
  double stationarity = 0.0;      // ||Hx + g + A_eq'y + z||_inf
  double complementarity = 0.0;   // dual-sign / active-bound mismatch
  bool eq_ok = false;
  bool box_ok = false;
  bool stationarity_ok = false;
  bool complementarity_ok = false;
  bool pass() const { return eq_ok && box_ok && stationarity_ok && complementarity_ok; }
};

KktReport check_kkt(const QuadraticProgram& qp, const QpSolution& sol, double tol);

/// Versioned text dump of a program, for debugging and tooling.
void write_qp_dump(const QuadraticProgram& qp, const std::string& path);
QuadraticProgram read_qp_dump(const std::string& path);

}  // namespace lfc
