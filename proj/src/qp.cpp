#include "lfc/qp.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "lfc/kernels.hpp"

namespace lfc {

namespace {

constexpr double kRhoMin = 1e-6;
constexpr double kRhoMax = 1e6;
constexpr double kLooseRho = 1e-6;
constexpr int kRhoUpdateInterval = 50;
constexpr int kStallWindow = 150;  // iterations without halved residuals before refining
constexpr double kStallFactor = 0.5;
constexpr int kPenaltyRounds = 15;
constexpr int kHardRounds = 12;
constexpr double kPinPenalty = 1e6;   // box-pin weight, relative to the Hessian diagonal
constexpr double kReducedDelta = 1e-9;  // regularization of the pinned-set KKT system; the
                                        // refinement sweeps contract at roughly delta over the
                                        // smallest singular value, which near-degenerate sets
                                        // push to ~1e-7

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

CscMatrix transpose_of(const CscMatrix& a) {
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(a.nnz()));
  for (int j = 0; j < a.cols(); ++j) {
    for (int p = a.col_ptr()[j]; p < a.col_ptr()[j + 1]; ++p) {
      trips.push_back({j, a.row_idx()[p], a.values()[p]});
    }
  }
  return CscMatrix::from_triplets(a.cols(), a.rows(), trips);
}

}  // namespace

std::string_view to_string(QpStatus status) {
  switch (status) {
    case QpStatus::optimal: return "optimal";
    case QpStatus::max_iter: return "max_iter";
    case QpStatus::infeasible: return "infeasible";
  }
  return "unknown";
}

void QuadraticProgram::validate() const {
  require(n > 0, "qp: n must be positive");
  require(hessian.rows() == n && hessian.cols() == n, "qp: hessian must be n x n");
  require(static_cast<int>(linear.size()) == n, "qp: linear term size mismatch");
  require(static_cast<int>(lb.size()) == n && static_cast<int>(ub.size()) == n,
          "qp: bound size mismatch");
  const int me = eq.rows();
  require(me == 0 || eq.cols() == n, "qp: equality matrix column count mismatch");
  require(static_cast<int>(eq_rhs.size()) == me, "qp: equality rhs size mismatch");
  for (int i = 0; i < n; ++i) {
    require(!std::isnan(lb[i]) && !std::isnan(ub[i]), "qp: NaN bound");
    require(lb[i] <= ub[i], "qp: lb > ub");
    require(!(lb[i] == ub[i] && !std::isfinite(lb[i])), "qp: equal infinite bounds");
    require(std::isfinite(linear[i]), "qp: non-finite linear term");
  }
  for (double v : eq_rhs) require(std::isfinite(v), "qp: non-finite equality rhs");
  for (double v : eq.values()) require(std::isfinite(v), "qp: non-finite equality entry");
  for (double v : hessian.values()) require(std::isfinite(v), "qp: non-finite hessian entry");

  // Symmetry: compare against the transpose structurally. Diagonal must be
  // nonnegative; PSD beyond the diagonal is the caller's responsibility.
  const CscMatrix ht = transpose_of(hessian);
  require(ht.nnz() == hessian.nnz(), "qp: hessian not symmetric");
  for (int j = 0; j <= n; ++j) {
    require(ht.col_ptr()[j] == hessian.col_ptr()[j], "qp: hessian not symmetric");
  }
  for (int p = 0; p < hessian.nnz(); ++p) {
    require(ht.row_idx()[p] == hessian.row_idx()[p], "qp: hessian not symmetric");
    const double a = hessian.values()[p];
    const double b = ht.values()[p];
    require(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)), "qp: hessian not symmetric");
  }
  for (int j = 0; j < n; ++j) {
    for (int p = hessian.col_ptr()[j]; p < hessian.col_ptr()[j + 1]; ++p) {
      if (hessian.row_idx()[p] == j) {
        require(hessian.values()[p] >= -1e-10, "qp: negative hessian diagonal");
      }
    }
  }
}

struct QpSolver::Impl {
  QuadraticProgram qp;
  SolverSettings st;
  int n = 0;
  int me = 0;
  int m = 0;  // me + n stacked constraint rows

  // Scaled data: hs = c*D*H*D, as = E_eq*A*D, gs = c*D*g. The box block of the
  // stacked constraint is diagonal with entries box_val[j] = E_box[j]*D[j].
  CscMatrix hs, as;
  std::vector<double> gs;
  std::vector<double> box_val;
  std::vector<double> d_scale, e_scale, dinv, einv;
  double cost_scale = 1.0;

  std::vector<double> lo, hi;        // scaled stacked bounds [b;lb], [b;ub]
  std::vector<double> lo_raw, hi_raw;  // unscaled stacked bounds
  std::vector<double> rho, rho_inv;
  double rho_bar = 0.1;

  Eigen::SparseMatrix<double> kkt;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Upper> ldlt;
  bool analyzed = false;

  // Iterates, scaled space.
  std::vector<double> x, z, y;
  // Unscaled snapshots and residual scratch.
  std::vector<double> xu, zu, yu, xu_prev, yu_prev, dy;
  std::vector<double> cx, hx, cty, stat;
  std::vector<double> wn, wm1, wm2, wm3;
  Eigen::VectorXd rhs, sol;

  std::vector<double> diag_h;  // unscaled Hessian diagonal, for the active-set tests

  // Active-set refinement cache. The reduced matrix depends only on the
  // Hessian, the equality rows, and the pinned set, so it survives rhs,
  // linear-term, and bound updates across solves.
  std::vector<int> ref_act;
  std::vector<bool> ref_up;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Upper> ref_fact;
  bool ref_valid = false;

  // Penalized relaxation for settling the set from a stalled iterate. Pins
  // only move diagonal values, so the pattern is analyzed once.
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Upper> pen_fact;
  bool pen_analyzed = false;

  QpSolution out;

  double rp_norm = kInf, rd_norm = kInf;  // last normalized residuals

  explicit Impl(QuadraticProgram q, SolverSettings s) : qp(std::move(q)), st(s) { setup(); }

  void setup() {
    qp.validate();
    require(st.max_iter > 0 && st.tol_prim > 0 && st.tol_dual > 0, "qp: bad solver settings");
    require(st.alpha > 0 && st.alpha < 2, "qp: relaxation must be in (0, 2)");
    n = qp.n;
    me = qp.eq.rows();
    m = me + n;
    rho_bar = st.rho;

    diag_h.assign(static_cast<std::size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) {
      for (int p = qp.hessian.col_ptr()[j]; p < qp.hessian.col_ptr()[j + 1]; ++p) {
        if (qp.hessian.row_idx()[p] == j) diag_h[static_cast<std::size_t>(j)] = qp.hessian.values()[p];
      }
    }

    hs = qp.hessian;
    as = qp.eq;
    gs = qp.linear;
    box_val.assign(static_cast<std::size_t>(n), 1.0);
    d_scale.assign(static_cast<std::size_t>(n), 1.0);
    e_scale.assign(static_cast<std::size_t>(m), 1.0);
    cost_scale = 1.0;
    if (st.scaling) equilibrate();
    dinv.resize(d_scale.size());
    einv.resize(e_scale.size());
    for (std::size_t i = 0; i < d_scale.size(); ++i) dinv[i] = 1.0 / d_scale[i];
    for (std::size_t i = 0; i < e_scale.size(); ++i) einv[i] = 1.0 / e_scale[i];

    lo_raw.resize(static_cast<std::size_t>(m));
    hi_raw.resize(static_cast<std::size_t>(m));
    lo.resize(static_cast<std::size_t>(m));
    hi.resize(static_cast<std::size_t>(m));
    refresh_bounds();

    rho.resize(static_cast<std::size_t>(m));
    rho_inv.resize(static_cast<std::size_t>(m));
    build_rho();
    assemble_kkt();

    x.assign(static_cast<std::size_t>(n), 0.0);
    z.assign(static_cast<std::size_t>(m), 0.0);
    y.assign(static_cast<std::size_t>(m), 0.0);
    xu.resize(x.size());
    zu.resize(z.size());
    yu.resize(y.size());
    xu_prev.resize(x.size());
    yu_prev.resize(y.size());
    dy.resize(y.size());
    cx.resize(z.size());
    hx.resize(x.size());
    cty.resize(x.size());
    stat.resize(x.size());
    wn.resize(x.size());
    wm1.resize(z.size());
    wm2.resize(z.size());
    wm3.resize(z.size());
    rhs.resize(n + m);
    sol.resize(n + m);
  }

  // Ruiz equilibration of the stacked symmetric system plus cost scaling,
  // accumulated into d_scale / e_scale / cost_scale.
  void equilibrate() {
    std::vector<double> ch(static_cast<std::size_t>(n));
    std::vector<double> ca(static_cast<std::size_t>(n));
    std::vector<double> ra(static_cast<std::size_t>(me));
    std::vector<double> d(static_cast<std::size_t>(n));
    std::vector<double> e(static_cast<std::size_t>(m));
    for (int pass = 0; pass < st.scaling_iters; ++pass) {
      hs.col_abs_max(ch);
      if (me > 0) {
        as.col_abs_max(ca);
        as.row_abs_max(ra);
      } else {
        std::fill(ca.begin(), ca.end(), 0.0);
      }
      for (int j = 0; j < n; ++j) {
        double cn = std::max({ch[j], ca[j], box_val[j]});
        if (cn <= 0.0) cn = 1.0;
        d[static_cast<std::size_t>(j)] = 1.0 / std::sqrt(cn);
      }
      for (int i = 0; i < me; ++i) {
        double rn = ra[static_cast<std::size_t>(i)];
        if (rn <= 0.0) rn = 1.0;
        e[static_cast<std::size_t>(i)] = 1.0 / std::sqrt(rn);
      }
      for (int j = 0; j < n; ++j) {
        double rn = box_val[static_cast<std::size_t>(j)];
        if (rn <= 0.0) rn = 1.0;
        e[static_cast<std::size_t>(me + j)] = 1.0 / std::sqrt(rn);
      }
      hs.scale_symmetric(d);
      if (me > 0) as.scale_rows_cols(std::span<const double>(e.data(), static_cast<std::size_t>(me)), d);
      for (int j = 0; j < n; ++j) {
        box_val[static_cast<std::size_t>(j)] *= e[static_cast<std::size_t>(me + j)] * d[static_cast<std::size_t>(j)];
      }
      for (int j = 0; j < n; ++j) {
        gs[static_cast<std::size_t>(j)] *= d[static_cast<std::size_t>(j)];
        d_scale[static_cast<std::size_t>(j)] *= d[static_cast<std::size_t>(j)];
      }
      for (int i = 0; i < m; ++i) e_scale[static_cast<std::size_t>(i)] *= e[static_cast<std::size_t>(i)];

      hs.col_abs_max(ch);
      double mean = 0.0;
      for (double v : ch) mean += v;
      mean /= static_cast<double>(n);
      const double gn = kernels::inf_norm(gs);
      double denom = std::max(mean, gn);
      if (denom <= 0.0) denom = 1.0;
      const double gamma = 1.0 / denom;
      for (double& v : hs.values()) v *= gamma;
      for (double& v : gs) v *= gamma;
      cost_scale *= gamma;
    }
  }

  void refresh_bounds() {
    for (int i = 0; i < me; ++i) {
      lo_raw[static_cast<std::size_t>(i)] = qp.eq_rhs[static_cast<std::size_t>(i)];
      hi_raw[static_cast<std::size_t>(i)] = qp.eq_rhs[static_cast<std::size_t>(i)];
    }
    for (int j = 0; j < n; ++j) {
      lo_raw[static_cast<std::size_t>(me + j)] = qp.lb[static_cast<std::size_t>(j)];
      hi_raw[static_cast<std::size_t>(me + j)] = qp.ub[static_cast<std::size_t>(j)];
    }
    for (int i = 0; i < m; ++i) {
      lo[static_cast<std::size_t>(i)] = e_scale[static_cast<std::size_t>(i)] * lo_raw[static_cast<std::size_t>(i)];
      hi[static_cast<std::size_t>(i)] = e_scale[static_cast<std::size_t>(i)] * hi_raw[static_cast<std::size_t>(i)];
    }
  }

  void build_rho() {
    for (int i = 0; i < m; ++i) {
      double r;
      if (i < me) {
        r = std::clamp(rho_bar * st.eq_rho_scale, kRhoMin, kRhoMax);
      } else {
        const int j = i - me;
        const bool loose = !std::isfinite(qp.lb[static_cast<std::size_t>(j)]) &&
                           !std::isfinite(qp.ub[static_cast<std::size_t>(j)]);
        r = loose ? kLooseRho : std::clamp(rho_bar, kRhoMin, kRhoMax);
      }
      rho[static_cast<std::size_t>(i)] = r;
      rho_inv[static_cast<std::size_t>(i)] = 1.0 / r;
    }
  }

  void assemble_kkt() {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(hs.nnz() + as.nnz() + 2 * m + n));
    for (int j = 0; j < n; ++j) {
      for (int p = hs.col_ptr()[j]; p < hs.col_ptr()[j + 1]; ++p) {
        const int r = hs.row_idx()[p];
        if (r <= j) trips.emplace_back(r, j, hs.values()[p]);
      }
      trips.emplace_back(j, j, st.sigma);
    }
    for (int j = 0; j < as.cols(); ++j) {
      for (int p = as.col_ptr()[j]; p < as.col_ptr()[j + 1]; ++p) {
        trips.emplace_back(j, n + as.row_idx()[p], as.values()[p]);
      }
    }
    for (int j = 0; j < n; ++j) {
      trips.emplace_back(j, n + me + j, box_val[static_cast<std::size_t>(j)]);
    }
    for (int i = 0; i < m; ++i) {
      trips.emplace_back(n + i, n + i, -rho_inv[static_cast<std::size_t>(i)]);
    }
    kkt.resize(n + m, n + m);
    kkt.setFromTriplets(trips.begin(), trips.end());
    if (!analyzed) {
      ldlt.analyzePattern(kkt);
      analyzed = true;
    }
    ldlt.factorize(kkt);
    if (ldlt.info() != Eigen::Success) throw SolverError("kkt factorization failed");
  }

  void unscale_iterates() {
    for (int j = 0; j < n; ++j) xu[static_cast<std::size_t>(j)] = d_scale[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
    for (int i = 0; i < m; ++i) {
      zu[static_cast<std::size_t>(i)] = einv[static_cast<std::size_t>(i)] * z[static_cast<std::size_t>(i)];
      yu[static_cast<std::size_t>(i)] = e_scale[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)] / cost_scale;
    }
  }

  // C*v for the stacked constraint, writing into dst (size m).
  void stacked_mul(std::span<const double> v, std::span<double> dst) const {
    if (me > 0) qp.eq.multiply(v, dst.subspan(0, static_cast<std::size_t>(me)), 1.0, 0.0);
    std::copy(v.begin(), v.end(), dst.begin() + me);
  }

  // C'*w = A_eq'*w_head + w_tail, writing into dst (size n).
  void stacked_mul_t(std::span<const double> w, std::span<double> dst) const {
    if (me > 0) {
      qp.eq.multiply_transpose(w.subspan(0, static_cast<std::size_t>(me)), dst, 1.0, 0.0);
    } else {
      std::fill(dst.begin(), dst.end(), 0.0);
    }
    for (int j = 0; j < n; ++j) dst[static_cast<std::size_t>(j)] += w[static_cast<std::size_t>(me + j)];
  }

  struct Residuals {
    double rp_raw = 0, rp_scale = 0, rd_raw = 0, rd_scale = 0;
    double rp_norm() const { return rp_raw / (1.0 + rp_scale); }
    double rd_norm() const { return rd_raw / (1.0 + rd_scale); }
  };

  // Raw KKT residuals of an unscaled candidate (xc, zc over constraint rows,
  // yc stacked duals).
  Residuals residuals_of(std::span<const double> xc, std::span<const double> zc,
                         std::span<const double> yc) {
    Residuals r;
    stacked_mul(xc, cx);
    r.rp_raw = kernels::inf_norm_diff(cx, zc);
    r.rp_scale = std::max(kernels::inf_norm(cx), kernels::inf_norm(zc));
    qp.hessian.multiply(xc, hx, 1.0, 0.0);
    stacked_mul_t(yc, cty);
    double raw = 0.0, cty_n = 0.0;
    for (int j = 0; j < n; ++j) {
      const double s = hx[static_cast<std::size_t>(j)] + qp.linear[static_cast<std::size_t>(j)] + cty[static_cast<std::size_t>(j)];
      raw = std::max(raw, std::abs(s));
      cty_n = std::max(cty_n, std::abs(cty[static_cast<std::size_t>(j)]));
    }
    r.rd_raw = raw;
    r.rd_scale = std::max({kernels::inf_norm(hx), kernels::inf_norm(qp.linear), cty_n});
    return r;
  }

  bool primal_infeasibility_cert() {
    for (int i = 0; i < m; ++i) dy[static_cast<std::size_t>(i)] = yu[static_cast<std::size_t>(i)] - yu_prev[static_cast<std::size_t>(i)];
    const double dn = kernels::inf_norm(dy);
    if (dn <= 0.0) return false;
    const double eps = st.eps_infeas * dn;
    stacked_mul_t(dy, wn);
    if (kernels::inf_norm(wn) > eps) return false;
    double support = 0.0;
    for (int i = 0; i < m; ++i) {
      const double v = dy[static_cast<std::size_t>(i)];
      if (v > 0.0) {
        if (!std::isfinite(hi_raw[static_cast<std::size_t>(i)])) {
          if (v > eps) return false;
        } else {
          support += hi_raw[static_cast<std::size_t>(i)] * v;
        }
      } else if (v < 0.0) {
        if (!std::isfinite(lo_raw[static_cast<std::size_t>(i)])) {
          if (v < -eps) return false;
        } else {
          support += lo_raw[static_cast<std::size_t>(i)] * v;
        }
      }
    }
    return support <= eps;
  }

  void run(const QpSolution* warm) {
    if (warm != nullptr) {
      require(static_cast<int>(warm->x.size()) == n && static_cast<int>(warm->y.size()) == me &&
                  static_cast<int>(warm->z.size()) == n,
              "qp: warm start size mismatch");
      for (int j = 0; j < n; ++j) x[static_cast<std::size_t>(j)] = dinv[static_cast<std::size_t>(j)] * warm->x[static_cast<std::size_t>(j)];
      stacked_mul(warm->x, cx);
      for (int i = 0; i < m; ++i) z[static_cast<std::size_t>(i)] = e_scale[static_cast<std::size_t>(i)] * cx[static_cast<std::size_t>(i)];
      for (int i = 0; i < me; ++i) y[static_cast<std::size_t>(i)] = cost_scale * warm->y[static_cast<std::size_t>(i)] / e_scale[static_cast<std::size_t>(i)];
      for (int j = 0; j < n; ++j) {
        y[static_cast<std::size_t>(me + j)] = cost_scale * warm->z[static_cast<std::size_t>(j)] / e_scale[static_cast<std::size_t>(me + j)];
      }
    } else {
      std::fill(x.begin(), x.end(), 0.0);
      std::fill(z.begin(), z.end(), 0.0);
      std::fill(y.begin(), y.end(), 0.0);
    }
    unscale_iterates();
    xu_prev = xu;
    yu_prev = yu;

    out.status = QpStatus::max_iter;
    out.iterations = 0;
    int last_rho_iter = 0;
    double stall_best = kInf;
    int stall_iter = 0;

    const std::span<double> rhs_head(rhs.data(), static_cast<std::size_t>(n));
    const std::span<double> rhs_tail(rhs.data() + n, static_cast<std::size_t>(m));
    const std::span<const double> sol_head(sol.data(), static_cast<std::size_t>(n));
    const std::span<const double> sol_tail(sol.data() + n, static_cast<std::size_t>(m));

    for (int iter = 1; iter <= st.max_iter; ++iter) {
      // rhs = [sigma*x - g; z - rho^-1 y]
      kernels::scale(st.sigma, x, rhs_head);
      kernels::axpby(-1.0, gs, 1.0, rhs_head);
      kernels::mul(rho_inv, y, rhs_tail);
      kernels::axpby(1.0, z, -1.0, rhs_tail);
      sol = ldlt.solve(rhs);

      // z_pre = z + alpha*rho^-1*nu + (1-alpha)*rho^-1*y
      kernels::mul(rho_inv, sol_tail, wm1);
      kernels::mul(rho_inv, y, wm2);
      std::copy(z.begin(), z.end(), wm3.begin());
      kernels::axpby(st.alpha, wm1, 1.0, wm3);
      kernels::axpby(1.0 - st.alpha, wm2, 1.0, wm3);

      // x <- alpha*x_tilde + (1-alpha)*x
      kernels::axpby(st.alpha, sol_head, 1.0 - st.alpha, x);
      // z <- clamp(z_pre), y <- rho*(z_pre - z)
      kernels::clamp(wm3, lo, hi, z);
      kernels::axpby(-1.0, z, 1.0, wm3);
      kernels::mul(rho, wm3, y);

      out.iterations = iter;
      if (iter % st.check_interval != 0 && iter != st.max_iter) continue;

      unscale_iterates();
      const Residuals r = residuals_of(xu, zu, yu);
      rp_norm = r.rp_norm();
      rd_norm = r.rd_norm();
      if (rp_norm <= st.tol_prim && rd_norm <= st.tol_dual) {
        out.status = QpStatus::optimal;
        break;
      }
      if (primal_infeasibility_cert()) {
        out.status = QpStatus::infeasible;
        break;
      }
      xu_prev = xu;
      yu_prev = yu;

      if (st.adaptive_rho && iter - last_rho_iter >= kRhoUpdateInterval) {
        const double rel_p = r.rp_raw / std::max(r.rp_scale, 1e-12);
        const double rel_d = r.rd_raw / std::max(r.rd_scale, 1e-12);
        const double ratio = std::sqrt(std::max(rel_p, 1e-14) / std::max(rel_d, 1e-14));
        if (ratio > 5.0 || ratio < 0.2) {
          rho_bar = std::clamp(rho_bar * ratio, kRhoMin, kRhoMax);
          build_rho();
          assemble_kkt();
          last_rho_iter = iter;
          stall_iter = iter;
        }
      }

      const double cur = std::max(rp_norm, rd_norm);
      if (cur <= kStallFactor * stall_best) {
        stall_best = cur;
        stall_iter = iter;
      } else if (st.polish && iter - stall_iter >= kStallWindow) {
        break;  // plateaued; hand the iterate to the active-set refinement
      }
    }

    unscale_iterates();
    if (st.polish && out.status != QpStatus::infeasible) refine();

    out.x.assign(xu.begin(), xu.end());
    out.y.assign(yu.begin(), yu.begin() + me);
    out.z.assign(yu.begin() + me, yu.end());
    out.r_prim = rp_norm;
    out.r_dual = rd_norm;
    qp.hessian.multiply(out.x, hx, 1.0, 0.0);
    double obj = 0.5 * kernels::dot(out.x, hx) + kernels::dot(qp.linear, out.x);
    out.objective = obj;
  }

  // Active-box estimate from an unscaled candidate: a finite bound is pinned
  // when its dual pushes outward or the primal sits past it.
  void active_estimate(std::span<const double> xs, std::span<const double> ys,
                       std::vector<int>& act, std::vector<bool>& up) const {
    act.clear();
    up.clear();
    for (int j = 0; j < n; ++j) {
      const double zj = ys[static_cast<std::size_t>(me + j)];
      const double xj = xs[static_cast<std::size_t>(j)];
      const double kap = diag_h[static_cast<std::size_t>(j)] + 1.0;
      const double lb = qp.lb[static_cast<std::size_t>(j)];
      const double ub = qp.ub[static_cast<std::size_t>(j)];
      const double su = std::isfinite(ub) ? zj + kap * (xj - ub) : 0.0;
      const double sl = std::isfinite(lb) ? -zj + kap * (lb - xj) : 0.0;
      if (su <= 0.0 && sl <= 0.0) continue;
      act.push_back(j);
      up.push_back(su >= sl);
    }
  }

  // Pins the given boxes and solves the equality-constrained subproblem by
  // eliminating the pinned columns, dropping equality rows left without free
  // entries (chains of pinned storage variables would otherwise make the
  // appended-row form exactly singular), and refining against the exact
  // reduced system. The factorization depends only on the pinned index set,
  // so consecutive solves on the same set pay only for triangular solves.
  bool reduced_solve(const std::vector<int>& act, const std::vector<bool>& up,
                     std::vector<double>& xc, std::vector<double>& yc) {
    const int na = static_cast<int>(act.size());
    const double delta = kReducedDelta;

    std::vector<signed char> pinned(static_cast<std::size_t>(n), 0);
    std::vector<double> bnd(static_cast<std::size_t>(n), 0.0);
    for (int a = 0; a < na; ++a) {
      const int j = act[static_cast<std::size_t>(a)];
      pinned[static_cast<std::size_t>(j)] = 1;
      bnd[static_cast<std::size_t>(j)] = up[static_cast<std::size_t>(a)]
                                             ? qp.ub[static_cast<std::size_t>(j)]
                                             : qp.lb[static_cast<std::size_t>(j)];
    }
    std::vector<int> fidx(static_cast<std::size_t>(n), -1);
    int nf = 0;
    for (int j = 0; j < n; ++j) {
      if (!pinned[static_cast<std::size_t>(j)]) fidx[static_cast<std::size_t>(j)] = nf++;
    }
    std::vector<int> ridx(static_cast<std::size_t>(me), -1);
    for (int j = 0; j < n; ++j) {
      if (pinned[static_cast<std::size_t>(j)]) continue;
      for (int p = qp.eq.col_ptr()[j]; p < qp.eq.col_ptr()[j + 1]; ++p) {
        ridx[static_cast<std::size_t>(qp.eq.row_idx()[p])] = 0;
      }
    }
    int mr = 0;
    for (int i = 0; i < me; ++i) {
      if (ridx[static_cast<std::size_t>(i)] == 0) ridx[static_cast<std::size_t>(i)] = mr++;
    }
    const int nt = nf + mr;

    if (nt > 0 && (!ref_valid || act != ref_act)) {
      std::vector<Eigen::Triplet<double>> trips;
      trips.reserve(static_cast<std::size_t>(qp.hessian.nnz() + qp.eq.nnz() + nt));
      for (int j = 0; j < n; ++j) {
        if (pinned[static_cast<std::size_t>(j)]) continue;
        for (int p = qp.hessian.col_ptr()[j]; p < qp.hessian.col_ptr()[j + 1]; ++p) {
          const int r = qp.hessian.row_idx()[p];
          if (r <= j && !pinned[static_cast<std::size_t>(r)]) {
            trips.emplace_back(fidx[static_cast<std::size_t>(r)], fidx[static_cast<std::size_t>(j)],
                               qp.hessian.values()[p]);
          }
        }
        trips.emplace_back(fidx[static_cast<std::size_t>(j)], fidx[static_cast<std::size_t>(j)], delta);
        for (int p = qp.eq.col_ptr()[j]; p < qp.eq.col_ptr()[j + 1]; ++p) {
          trips.emplace_back(fidx[static_cast<std::size_t>(j)],
                             nf + ridx[static_cast<std::size_t>(qp.eq.row_idx()[p])],
                             qp.eq.values()[p]);
        }
      }
      for (int i = 0; i < me; ++i) {
        if (ridx[static_cast<std::size_t>(i)] >= 0) {
          trips.emplace_back(nf + ridx[static_cast<std::size_t>(i)], nf + ridx[static_cast<std::size_t>(i)], -delta);
        }
      }
      Eigen::SparseMatrix<double> kp(nt, nt);
      kp.setFromTriplets(trips.begin(), trips.end());
      ref_fact.compute(kp);
      if (ref_fact.info() != Eigen::Success) {
        ref_valid = false;
        return false;
      }
      ref_act = act;
      ref_up = up;
      ref_valid = true;
    }

    // rhs = [-g_f - H_fp*bnd; b_r - A_rp*bnd]
    Eigen::VectorXd prhs(nt);
    for (int j = 0; j < n; ++j) {
      if (!pinned[static_cast<std::size_t>(j)]) {
        prhs[fidx[static_cast<std::size_t>(j)]] = -qp.linear[static_cast<std::size_t>(j)];
      }
    }
    for (int i = 0; i < me; ++i) {
      if (ridx[static_cast<std::size_t>(i)] >= 0) {
        prhs[nf + ridx[static_cast<std::size_t>(i)]] = qp.eq_rhs[static_cast<std::size_t>(i)];
      }
    }
    for (int a = 0; a < na; ++a) {
      const int j = act[static_cast<std::size_t>(a)];
      const double bv = bnd[static_cast<std::size_t>(j)];
      for (int p = qp.hessian.col_ptr()[j]; p < qp.hessian.col_ptr()[j + 1]; ++p) {
        const int r = qp.hessian.row_idx()[p];
        if (!pinned[static_cast<std::size_t>(r)]) {
          prhs[fidx[static_cast<std::size_t>(r)]] -= qp.hessian.values()[p] * bv;
        }
      }
      for (int p = qp.eq.col_ptr()[j]; p < qp.eq.col_ptr()[j + 1]; ++p) {
        const int i = qp.eq.row_idx()[p];
        if (ridx[static_cast<std::size_t>(i)] >= 0) {
          prhs[nf + ridx[static_cast<std::size_t>(i)]] -= qp.eq.values()[p] * bv;
        }
      }
    }

    Eigen::VectorXd t(nt);
    if (nt > 0) {
      t = ref_fact.solve(prhs);
      // Iterative refinement against the reduced system without the deltas,
      // applied through the full-size operators.
      std::vector<double> xf(static_cast<std::size_t>(n));
      std::vector<double> yf(static_cast<std::size_t>(me), 0.0);
      std::vector<double> hxf(static_cast<std::size_t>(n));
      std::vector<double> axf(static_cast<std::size_t>(me));
      std::vector<double> atyf(static_cast<std::size_t>(n));
      Eigen::VectorXd rr(nt);
      for (int it = 0; it < st.polish_refine_iters; ++it) {
        std::fill(xf.begin(), xf.end(), 0.0);
        for (int j = 0; j < n; ++j) {
          if (!pinned[static_cast<std::size_t>(j)]) xf[static_cast<std::size_t>(j)] = t[fidx[static_cast<std::size_t>(j)]];
        }
        for (int i = 0; i < me; ++i) {
          yf[static_cast<std::size_t>(i)] = ridx[static_cast<std::size_t>(i)] >= 0 ? t[nf + ridx[static_cast<std::size_t>(i)]] : 0.0;
        }
        qp.hessian.multiply(xf, hxf, 1.0, 0.0);
        if (me > 0) {
          qp.eq.multiply(xf, axf, 1.0, 0.0);
          qp.eq.multiply_transpose(yf, atyf, 1.0, 0.0);
        } else {
          std::fill(atyf.begin(), atyf.end(), 0.0);
        }
        for (int j = 0; j < n; ++j) {
          if (!pinned[static_cast<std::size_t>(j)]) {
            rr[fidx[static_cast<std::size_t>(j)]] =
                prhs[fidx[static_cast<std::size_t>(j)]] - hxf[static_cast<std::size_t>(j)] - atyf[static_cast<std::size_t>(j)];
          }
        }
        for (int i = 0; i < me; ++i) {
          if (ridx[static_cast<std::size_t>(i)] >= 0) {
            rr[nf + ridx[static_cast<std::size_t>(i)]] = prhs[nf + ridx[static_cast<std::size_t>(i)]] - axf[static_cast<std::size_t>(i)];
          }
        }
        t += ref_fact.solve(rr);
      }
    }

    for (int j = 0; j < n; ++j) {
      xc[static_cast<std::size_t>(j)] = pinned[static_cast<std::size_t>(j)]
                                            ? bnd[static_cast<std::size_t>(j)]
                                            : t[fidx[static_cast<std::size_t>(j)]];
    }
    std::fill(yc.begin(), yc.end(), 0.0);
    for (int i = 0; i < me; ++i) {
      if (ridx[static_cast<std::size_t>(i)] >= 0) yc[static_cast<std::size_t>(i)] = t[nf + ridx[static_cast<std::size_t>(i)]];
    }
    // Pinned duals from exact stationarity at the pinned columns.
    if (na > 0) {
      std::vector<double> hxv(static_cast<std::size_t>(n));
      std::vector<double> atyv(static_cast<std::size_t>(n), 0.0);
      qp.hessian.multiply(xc, hxv, 1.0, 0.0);
      if (me > 0) {
        qp.eq.multiply_transpose(std::span<const double>(yc.data(), static_cast<std::size_t>(me)),
                                 atyv, 1.0, 0.0);
      }
      for (int a = 0; a < na; ++a) {
        const int j = act[static_cast<std::size_t>(a)];
        yc[static_cast<std::size_t>(me + j)] =
            -(hxv[static_cast<std::size_t>(j)] + qp.linear[static_cast<std::size_t>(j)] + atyv[static_cast<std::size_t>(j)]);
      }
    }
    return true;
  }

  // Complementarity of a candidate, measured like check_kkt: a dual is charged
  // min(its size, the slack it contradicts), so wrong-signed multipliers at a
  // pinned bound are caught.
  bool comp_clean(std::span<const double> xc, std::span<const double> yc) const {
    double raw = 0.0, zn = 0.0, xn = 0.0;
    for (int j = 0; j < n; ++j) {
      const double zj = yc[static_cast<std::size_t>(me + j)];
      const double xj = xc[static_cast<std::size_t>(j)];
      zn = std::max(zn, std::abs(zj));
      xn = std::max(xn, std::abs(xj));
      if (zj > 0.0) {
        raw = std::max(raw, std::isfinite(qp.ub[static_cast<std::size_t>(j)])
                                ? std::min(zj, std::max(0.0, qp.ub[static_cast<std::size_t>(j)] - xj))
                                : zj);
      } else if (zj < 0.0) {
        raw = std::max(raw, std::isfinite(qp.lb[static_cast<std::size_t>(j)])
                                ? std::min(-zj, std::max(0.0, xj - qp.lb[static_cast<std::size_t>(j)]))
                                : -zj);
      }
    }
    return raw <= st.tol_dual * (1.0 + std::max(zn, xn));
  }

  // Minimizes the cost with the pinned boxes as large quadratic penalties and
  // the equality rows kept hard. Unlike a hard pin set, this system is
  // consistent for any estimate, so it yields a physical candidate whose
  // implied duals mu*(x - bound) re-estimate the set reliably.
  bool penalty_solve(const std::vector<int>& act, const std::vector<bool>& up,
                     std::vector<double>& xc, std::vector<double>& yc) {
    const int nt = n + me;
    const double delta = st.polish_delta;
    std::vector<double> mu(static_cast<std::size_t>(n), 0.0);
    std::vector<double> bnd(static_cast<std::size_t>(n), 0.0);
    for (std::size_t a = 0; a < act.size(); ++a) {
      const int j = act[a];
      mu[static_cast<std::size_t>(j)] = kPinPenalty * (diag_h[static_cast<std::size_t>(j)] + 1.0);
      bnd[static_cast<std::size_t>(j)] =
          up[a] ? qp.ub[static_cast<std::size_t>(j)] : qp.lb[static_cast<std::size_t>(j)];
    }

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(qp.hessian.nnz() + qp.eq.nnz() + n + me));
    for (int j = 0; j < n; ++j) {
      for (int p = qp.hessian.col_ptr()[j]; p < qp.hessian.col_ptr()[j + 1]; ++p) {
        const int r = qp.hessian.row_idx()[p];
        if (r <= j) trips.emplace_back(r, j, qp.hessian.values()[p]);
      }
      trips.emplace_back(j, j, delta + mu[static_cast<std::size_t>(j)]);
    }
    for (int j = 0; j < qp.eq.cols(); ++j) {
      for (int p = qp.eq.col_ptr()[j]; p < qp.eq.col_ptr()[j + 1]; ++p) {
        trips.emplace_back(j, n + qp.eq.row_idx()[p], qp.eq.values()[p]);
      }
    }
    for (int i = 0; i < me; ++i) trips.emplace_back(n + i, n + i, -delta);

    Eigen::SparseMatrix<double> kp(nt, nt);
    kp.setFromTriplets(trips.begin(), trips.end());
    if (!pen_analyzed) {
      pen_fact.analyzePattern(kp);
      pen_analyzed = true;
    }
    pen_fact.factorize(kp);
    if (pen_fact.info() != Eigen::Success) return false;

    Eigen::VectorXd prhs(nt);
    for (int j = 0; j < n; ++j) {
      prhs[j] = -qp.linear[static_cast<std::size_t>(j)] +
                mu[static_cast<std::size_t>(j)] * bnd[static_cast<std::size_t>(j)];
    }
    for (int i = 0; i < me; ++i) prhs[n + i] = qp.eq_rhs[static_cast<std::size_t>(i)];
    const Eigen::VectorXd t = pen_fact.solve(prhs);

    for (int j = 0; j < n; ++j) xc[static_cast<std::size_t>(j)] = t[j];
    std::fill(yc.begin(), yc.end(), 0.0);
    for (int i = 0; i < me; ++i) yc[static_cast<std::size_t>(i)] = t[n + i];
    for (std::size_t a = 0; a < act.size(); ++a) {
      const int j = act[a];
      yc[static_cast<std::size_t>(me + j)] =
          mu[static_cast<std::size_t>(j)] *
          (xc[static_cast<std::size_t>(j)] - bnd[static_cast<std::size_t>(j)]);
    }
    return true;
  }

  // Hinge rule: the set of bounds a candidate violates, with the side.
  void violated_set(std::span<const double> xs, std::vector<int>& act,
                    std::vector<bool>& up) const {
    act.clear();
    up.clear();
    for (int j = 0; j < n; ++j) {
      const double xj = xs[static_cast<std::size_t>(j)];
      if (std::isfinite(qp.ub[static_cast<std::size_t>(j)]) && xj > qp.ub[static_cast<std::size_t>(j)]) {
        act.push_back(j);
        up.push_back(true);
      } else if (std::isfinite(qp.lb[static_cast<std::size_t>(j)]) && xj < qp.lb[static_cast<std::size_t>(j)]) {
        act.push_back(j);
        up.push_back(false);
      }
    }
  }

  // Semismooth Newton on the hinge-penalized problem: each round penalizes
  // exactly the bounds the previous candidate violated, until that set
  // reproduces itself. Converges to a candidate within O(1/mu) of the true
  // solution regardless of the seed.
  void settle_penalty(std::vector<int>& act, std::vector<bool>& up) {
    std::vector<double> xc(static_cast<std::size_t>(n));
    std::vector<double> yc(static_cast<std::size_t>(m));
    std::vector<int> prev, next;
    std::vector<bool> pup, nup;
    for (int round = 0; round < kPenaltyRounds; ++round) {
      if (!penalty_solve(act, up, xc, yc)) return;
      violated_set(xc, next, nup);
      if (next == act && nup == up) return;
      if (round > 0 && next == prev && nup == pup) return;  // two-cycle
      prev = std::move(act);
      pup = std::move(up);
      act = std::move(next);
      up = std::move(nup);
    }
  }

  // Rebuilds a pin set in ascending column order, dropping pins that would
  // leave an equality row with no free column. Keeping one column free keeps
  // the row in the reduced system, where the row's multiplier belongs; with
  // every column pinned the row is dropped and its multiplier surfaces as a
  // wrong-signed bound dual on a pinned column. When the bound and the row
  // agree (the degenerate case that produces such sets), the row forces the
  // freed column to its bound value anyway.
  void filter_completing(std::vector<int>& act, std::vector<bool>& up,
                         std::vector<int>& freecnt) const {
    freecnt.assign(static_cast<std::size_t>(me), 0);
    for (int j = 0; j < n; ++j) {
      for (int p = qp.eq.col_ptr()[j]; p < qp.eq.col_ptr()[j + 1]; ++p) {
        ++freecnt[static_cast<std::size_t>(qp.eq.row_idx()[p])];
      }
    }
    std::size_t keep = 0;
    for (std::size_t a = 0; a < act.size(); ++a) {
      const int j = act[a];
      bool completes = false;
      for (int p = qp.eq.col_ptr()[j]; p < qp.eq.col_ptr()[j + 1] && !completes; ++p) {
        completes = freecnt[static_cast<std::size_t>(qp.eq.row_idx()[p])] == 1;
      }
      if (completes) continue;
      for (int p = qp.eq.col_ptr()[j]; p < qp.eq.col_ptr()[j + 1]; ++p) {
        --freecnt[static_cast<std::size_t>(qp.eq.row_idx()[p])];
      }
      act[keep] = j;
      up[keep] = up[a];
      ++keep;
    }
    act.resize(keep);
    up.resize(keep);
  }

  // Pin, solve exactly, then update the set from the candidate: release pins
  // whose multiplier clearly points into the interior (same normalization the
  // complementarity test uses, so noise-level multipliers on weakly active
  // bounds stay pinned instead of churning), then add whatever the candidate
  // still violates, routed through the row-preserving rule. Commits each
  // candidate as the new iterate and tracks the best by worst-case residual;
  // returns whether the best is clean and within tolerance.
  bool hard_rounds(std::vector<int>& act, std::vector<bool>& up, std::vector<double>& xb,
                   std::vector<double>& zb, std::vector<double>& yb, double& rpb, double& rdb,
                   bool& best_clean) {
    std::vector<double> xc(static_cast<std::size_t>(n));
    std::vector<double> yc(static_cast<std::size_t>(m));
    std::vector<double> zc(static_cast<std::size_t>(m));
    std::vector<int> next, keep, un;
    std::vector<bool> nup, kup, uu;
    std::vector<signed char> pin(static_cast<std::size_t>(n));
    std::vector<int> freecnt(static_cast<std::size_t>(me));
    filter_completing(act, up, freecnt);
    for (int round = 0; round < kHardRounds; ++round) {
      if (!reduced_solve(act, up, xc, yc)) break;
      stacked_mul(xc, zc);
      for (int i = 0; i < m; ++i) {
        zc[static_cast<std::size_t>(i)] = std::clamp(zc[static_cast<std::size_t>(i)], lo_raw[static_cast<std::size_t>(i)], hi_raw[static_cast<std::size_t>(i)]);
      }
      const Residuals cand = residuals_of(xc, zc, yc);
      xu = xc;
      zu = zc;
      yu = yc;
      rp_norm = cand.rp_norm();
      rd_norm = cand.rd_norm();
      if (std::max(rp_norm, rd_norm) <= std::max(rpb, rdb)) {
        xb = xu;
        zb = zu;
        yb = yu;
        rpb = rp_norm;
        rdb = rd_norm;
        best_clean = comp_clean(xb, yb);
      }
      double zn = 0.0, xn = 0.0;
      for (int j = 0; j < n; ++j) {
        zn = std::max(zn, std::abs(yc[static_cast<std::size_t>(me + j)]));
        xn = std::max(xn, std::abs(xc[static_cast<std::size_t>(j)]));
      }
      const double theta = st.tol_dual * (1.0 + std::max(zn, xn));
      keep.clear();
      kup.clear();
      for (std::size_t a = 0; a < act.size(); ++a) {
        const double zj = yc[static_cast<std::size_t>(me + act[a])];
        if (up[a] ? zj < -theta : zj > theta) continue;  // wrong-signed: release
        keep.push_back(act[a]);
        kup.push_back(up[a]);
      }
      violated_set(xc, next, nup);
      std::fill(pin.begin(), pin.end(), static_cast<signed char>(0));
      for (int j : keep) pin[static_cast<std::size_t>(j)] = 1;
      std::fill(freecnt.begin(), freecnt.end(), 0);
      for (int j = 0; j < n; ++j) {
        if (pin[static_cast<std::size_t>(j)]) continue;
        for (int p = qp.eq.col_ptr()[j]; p < qp.eq.col_ptr()[j + 1]; ++p) {
          ++freecnt[static_cast<std::size_t>(qp.eq.row_idx()[p])];
        }
      }
      un.clear();
      uu.clear();
      std::size_t i1 = 0, i2 = 0;
      while (i1 < keep.size() || i2 < next.size()) {
        if (i2 >= next.size() || (i1 < keep.size() && keep[i1] <= next[i2])) {
          if (i2 < next.size() && keep[i1] == next[i2]) ++i2;  // keep the current side
          un.push_back(keep[i1]);
          uu.push_back(kup[i1]);
          ++i1;
        } else {
          const int j = next[i2];
          bool completes = false;
          for (int p = qp.eq.col_ptr()[j]; p < qp.eq.col_ptr()[j + 1] && !completes; ++p) {
            completes = freecnt[static_cast<std::size_t>(qp.eq.row_idx()[p])] == 1;
          }
          if (!completes) {
            for (int p = qp.eq.col_ptr()[j]; p < qp.eq.col_ptr()[j + 1]; ++p) {
              --freecnt[static_cast<std::size_t>(qp.eq.row_idx()[p])];
            }
            un.push_back(j);
            uu.push_back(nup[i2]);
          }
          ++i2;
        }
      }
      if (un == act && uu == up) break;  // set reproduced itself
      act = std::move(un);
      up = std::move(uu);
    }
    return best_clean && rpb <= st.tol_prim && rdb <= st.tol_dual;
  }

  // Primal-dual active-set refinement. The splitting iterate seeds the set; a
  // stalled seed is first settled on the penalized relaxation (hard pins from
  // a poor seed can contradict the equality rows), then exact pinned solves
  // finish the job. A starved run is upgraded to optimal once a clean
  // candidate meets both tolerances.
  void refine() {
    std::vector<int> act;
    std::vector<bool> up;
    active_estimate(xu, yu, act, up);

    std::vector<double> xb = xu, zb = zu, yb = yu;
    double rpb = rp_norm, rdb = rd_norm;
    bool best_clean = false;

    bool skipped_settle = false;
    if (out.status == QpStatus::max_iter) {
      if (ref_valid && act == ref_act && up == ref_up) {
        skipped_settle = true;  // seed matches the cached set; try it directly
      } else {
        violated_set(xu, act, up);
        settle_penalty(act, up);
      }
    }
    bool ok = hard_rounds(act, up, xb, zb, yb, rpb, rdb, best_clean);
    if (!ok && skipped_settle) {
      violated_set(xu, act, up);
      settle_penalty(act, up);
      ok = hard_rounds(act, up, xb, zb, yb, rpb, rdb, best_clean);
    }

    if (std::max(rpb, rdb) < std::max(rp_norm, rd_norm)) {
      xu = xb;
      zu = zb;
      yu = yb;
      rp_norm = rpb;
      rd_norm = rdb;
    }
    if (out.status == QpStatus::max_iter && ok) out.status = QpStatus::optimal;
  }
};

QpSolver::QpSolver(QuadraticProgram qp, SolverSettings settings)
    : impl_(std::make_unique<Impl>(std::move(qp), settings)) {}
QpSolver::~QpSolver() = default;
QpSolver::QpSolver(QpSolver&&) noexcept = default;
QpSolver& QpSolver::operator=(QpSolver&&) noexcept = default;

void QpSolver::update_linear(std::span<const double> g) {
  Impl& im = *impl_;
  require(static_cast<int>(g.size()) == im.n, "qp: linear update size mismatch");
  std::copy(g.begin(), g.end(), im.qp.linear.begin());
  for (int j = 0; j < im.n; ++j) {
    im.gs[static_cast<std::size_t>(j)] = im.cost_scale * im.d_scale[static_cast<std::size_t>(j)] * g[static_cast<std::size_t>(j)];
    require(std::isfinite(g[static_cast<std::size_t>(j)]), "qp: non-finite linear term");
  }
}

void QpSolver::update_eq_rhs(std::span<const double> b) {
  Impl& im = *impl_;
  require(static_cast<int>(b.size()) == im.me, "qp: rhs update size mismatch");
  for (int i = 0; i < im.me; ++i) {
    require(std::isfinite(b[static_cast<std::size_t>(i)]), "qp: non-finite equality rhs");
    im.qp.eq_rhs[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(i)];
  }
  im.refresh_bounds();
}

void QpSolver::update_bounds(std::span<const double> lb, std::span<const double> ub) {
  Impl& im = *impl_;
  require(static_cast<int>(lb.size()) == im.n && static_cast<int>(ub.size()) == im.n,
          "qp: bound update size mismatch");
  for (int j = 0; j < im.n; ++j) {
    require(!std::isnan(lb[static_cast<std::size_t>(j)]) && !std::isnan(ub[static_cast<std::size_t>(j)]),
            "qp: NaN bound");
    require(lb[static_cast<std::size_t>(j)] <= ub[static_cast<std::size_t>(j)], "qp: lb > ub");
    im.qp.lb[static_cast<std::size_t>(j)] = lb[static_cast<std::size_t>(j)];
    im.qp.ub[static_cast<std::size_t>(j)] = ub[static_cast<std::size_t>(j)];
  }
  im.refresh_bounds();
}

const QpSolution& QpSolver::solve() {
  impl_->run(nullptr);
  return impl_->out;
}

const QpSolution& QpSolver::solve(const QpSolution& warm_start) {
  impl_->run(&warm_start);
  return impl_->out;
}

const QuadraticProgram& QpSolver::problem() const { return impl_->qp; }

QpSolution solve_qp(const QuadraticProgram& qp, double tol_prim, double tol_dual, int max_iter) {
  SolverSettings st;
  st.tol_prim = tol_prim;
  st.tol_dual = tol_dual;
  st.max_iter = max_iter;
  QpSolver solver(qp, st);
  return solver.solve();
}

KktReport check_kkt(const QuadraticProgram& qp, const QpSolution& sol, double tol) {
  qp.validate();
  const int n = qp.n;
  const int me = qp.eq.rows();
  require(static_cast<int>(sol.x.size()) == n && static_cast<int>(sol.y.size()) == me &&
              static_cast<int>(sol.z.size()) == n,
          "check_kkt: solution size mismatch");
  require(tol > 0, "check_kkt: tol must be positive");
  KktReport rep;

  std::vector<double> ax(static_cast<std::size_t>(me));
  if (me > 0) qp.eq.multiply(sol.x, ax, 1.0, 0.0);
  double eq_raw = 0.0, eq_scale = 0.0;
  for (int i = 0; i < me; ++i) {
    eq_raw = std::max(eq_raw, std::abs(ax[static_cast<std::size_t>(i)] - qp.eq_rhs[static_cast<std::size_t>(i)]));
    eq_scale = std::max({eq_scale, std::abs(ax[static_cast<std::size_t>(i)]), std::abs(qp.eq_rhs[static_cast<std::size_t>(i)])});
  }
  rep.eq_residual = eq_raw;
  rep.eq_ok = eq_raw <= tol * (1.0 + eq_scale);

  double box_raw = 0.0;
  double xn = 0.0;
  for (int j = 0; j < n; ++j) {
    const double xj = sol.x[static_cast<std::size_t>(j)];
    xn = std::max(xn, std::abs(xj));
    if (std::isfinite(qp.lb[static_cast<std::size_t>(j)])) box_raw = std::max(box_raw, qp.lb[static_cast<std::size_t>(j)] - xj);
    if (std::isfinite(qp.ub[static_cast<std::size_t>(j)])) box_raw = std::max(box_raw, xj - qp.ub[static_cast<std::size_t>(j)]);
  }
  rep.box_residual = std::max(box_raw, 0.0);
  rep.box_ok = rep.box_residual <= tol * (1.0 + xn);

  std::vector<double> hxv(static_cast<std::size_t>(n));
  std::vector<double> atyv(static_cast<std::size_t>(n), 0.0);
  qp.hessian.multiply(sol.x, hxv, 1.0, 0.0);
  if (me > 0) qp.eq.multiply_transpose(sol.y, atyv, 1.0, 0.0);
  double st_raw = 0.0, st_scale = 0.0;
  for (int j = 0; j < n; ++j) {
    const double s = hxv[static_cast<std::size_t>(j)] + qp.linear[static_cast<std::size_t>(j)] +
                     atyv[static_cast<std::size_t>(j)] + sol.z[static_cast<std::size_t>(j)];
    st_raw = std::max(st_raw, std::abs(s));
    st_scale = std::max({st_scale, std::abs(hxv[static_cast<std::size_t>(j)]), std::abs(qp.linear[static_cast<std::size_t>(j)]),
                         std::abs(atyv[static_cast<std::size_t>(j)]), std::abs(sol.z[static_cast<std::size_t>(j)])});
  }
  rep.stationarity = st_raw;
  rep.stationarity_ok = st_raw <= tol * (1.0 + st_scale);

  double comp_raw = 0.0, zn = 0.0;
  for (int j = 0; j < n; ++j) {
    const double zj = sol.z[static_cast<std::size_t>(j)];
    const double xj = sol.x[static_cast<std::size_t>(j)];
    zn = std::max(zn, std::abs(zj));
    if (zj > 0.0) {
      comp_raw = std::max(comp_raw, std::isfinite(qp.ub[static_cast<std::size_t>(j)])
                                        ? std::min(zj, std::max(0.0, qp.ub[static_cast<std::size_t>(j)] - xj))
                                        : zj);
    } else if (zj < 0.0) {
      comp_raw = std::max(comp_raw, std::isfinite(qp.lb[static_cast<std::size_t>(j)])
                                        ? std::min(-zj, std::max(0.0, xj - qp.lb[static_cast<std::size_t>(j)]))
                                        : -zj);
    }
  }
  rep.complementarity = comp_raw;
  rep.complementarity_ok = comp_raw <= tol * (1.0 + std::max(zn, xn));
  return rep;
}

namespace {

void dump_matrix(std::FILE* f, const char* tag, const CscMatrix& a) {
  std::fprintf(f, "%s %d\n", tag, a.nnz());
  for (int j = 0; j < a.cols(); ++j) {
    for (int p = a.col_ptr()[j]; p < a.col_ptr()[j + 1]; ++p) {
      std::fprintf(f, "%d %d %.17g\n", a.row_idx()[p], j, a.values()[p]);
    }
  }
}

void dump_vector(std::FILE* f, const char* tag, const std::vector<double>& v) {
  std::fprintf(f, "%s %zu\n", tag, v.size());
  for (double x : v) std::fprintf(f, "%.17g\n", x);
}

double parse_double(const std::string& tok) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0') {
    throw std::runtime_error("qp dump: bad numeric token '" + tok + "'");
  }
  return v;
}

CscMatrix read_matrix(std::istream& in, const std::string& tag, int rows, int cols) {
  std::string word;
  if (!(in >> word) || word != tag) throw std::runtime_error("qp dump: expected section " + tag);
  int nnz = 0;
  if (!(in >> nnz) || nnz < 0) throw std::runtime_error("qp dump: bad nnz for " + tag);
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(nnz));
  for (int i = 0; i < nnz; ++i) {
    int r = 0, c = 0;
    std::string tok;
    if (!(in >> r >> c >> tok)) throw std::runtime_error("qp dump: truncated section " + tag);
    trips.push_back({r, c, parse_double(tok)});
  }
  return CscMatrix::from_triplets(rows, cols, trips);
}

std::vector<double> read_vector(std::istream& in, const std::string& tag, int expect) {
  std::string word;
  if (!(in >> word) || word != tag) throw std::runtime_error("qp dump: expected section " + tag);
  std::size_t count = 0;
  if (!(in >> count) || static_cast<int>(count) != expect) {
    throw std::runtime_error("qp dump: bad length for " + tag);
  }
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::string tok;
    if (!(in >> tok)) throw std::runtime_error("qp dump: truncated section " + tag);
    v[i] = parse_double(tok);
  }
  return v;
}

}  // namespace

void write_qp_dump(const QuadraticProgram& qp, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (f == nullptr) throw std::runtime_error("qp dump: cannot open " + path);
  std::fprintf(f, "lfcqp 1\n");
  std::fprintf(f, "n %d m %d\n", qp.n, qp.eq.rows());
  dump_matrix(f, "H", qp.hessian);
  dump_vector(f, "g", qp.linear);
  dump_matrix(f, "A", qp.eq);
  dump_vector(f, "b", qp.eq_rhs);
  dump_vector(f, "lb", qp.lb);
  dump_vector(f, "ub", qp.ub);
  std::fprintf(f, "end\n");
  std::fclose(f);
}

QuadraticProgram read_qp_dump(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("qp dump: cannot open " + path);
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "lfcqp" || version != 1) {
    throw std::runtime_error("qp dump: unrecognized header");
  }
  QuadraticProgram qp;
  std::string word;
  int me = 0;
  if (!(in >> word) || word != "n" || !(in >> qp.n)) throw std::runtime_error("qp dump: missing n");
  if (!(in >> word) || word != "m" || !(in >> me)) throw std::runtime_error("qp dump: missing m");
  qp.hessian = read_matrix(in, "H", qp.n, qp.n);
  qp.linear = read_vector(in, "g", qp.n);
  qp.eq = read_matrix(in, "A", me, qp.n);
  qp.eq_rhs = read_vector(in, "b", me);
  qp.lb = read_vector(in, "lb", qp.n);
  qp.ub = read_vector(in, "ub", qp.n);
  if (!(in >> word) || word != "end") throw std::runtime_error("qp dump: missing end marker");
  qp.validate();
  return qp;
}

}  // namespace lfc
