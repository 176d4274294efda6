#include "lfc/qp.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "testutil.hpp"

using namespace lfc;

namespace {

QuadraticProgram make_qp(const Eigen::MatrixXd& h, const Eigen::VectorXd& g,
                         const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                         const Eigen::VectorXd& lb, const Eigen::VectorXd& ub) {
  const int n = static_cast<int>(h.rows());
  const int me = static_cast<int>(a.rows());
  QuadraticProgram qp;
  qp.n = n;
  std::vector<Triplet> ht, at;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if (h(r, c) != 0.0) ht.push_back({r, c, h(r, c)});
    }
  }
  for (int r = 0; r < me; ++r) {
    for (int c = 0; c < n; ++c) {
      if (a(r, c) != 0.0) at.push_back({r, c, a(r, c)});
    }
  }
  qp.hessian = CscMatrix::from_triplets(n, n, ht);
  qp.eq = CscMatrix::from_triplets(me, n, at);
  qp.linear.assign(g.data(), g.data() + n);
  qp.eq_rhs.assign(b.data(), b.data() + me);
  qp.lb.assign(lb.data(), lb.data() + n);
  qp.ub.assign(ub.data(), ub.data() + n);
  return qp;
}

struct RandomQp {
  QuadraticProgram qp;
  Eigen::MatrixXd h;
  Eigen::VectorXd g, lb, ub;
};

RandomQp random_box_qp(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::MatrixXd r(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) r(i, j) = dist(rng);
  }
  RandomQp out;
  out.h = r.transpose() * r + 0.5 * Eigen::MatrixXd::Identity(n, n);
  out.g = Eigen::VectorXd::NullaryExpr(n, [&] { return 2.0 * dist(rng); });
  out.lb = Eigen::VectorXd::NullaryExpr(n, [&] { return -0.8 + 0.4 * dist(rng); });
  out.ub = out.lb + Eigen::VectorXd::NullaryExpr(n, [&] { return 0.9 + 0.8 * std::abs(dist(rng)); });
  out.qp = make_qp(out.h, out.g, Eigen::MatrixXd(0, n), Eigen::VectorXd(0), out.lb, out.ub);
  return out;
}

}  // namespace

TEST_SUITE("qp") {

TEST_CASE("hand-worked scalar problem with an active upper bound") {
  // min x^2 - 4x on [-inf, 1.5]: unconstrained minimum 2, clipped to 1.5.
  Eigen::MatrixXd h(1, 1);
  h << 2.0;
  Eigen::VectorXd g(1), lb(1), ub(1);
  g << -4.0;
  lb << -kInf;
  ub << 1.5;
  const QuadraticProgram qp = make_qp(h, g, Eigen::MatrixXd(0, 1), Eigen::VectorXd(0), lb, ub);

  const QpSolution sol = solve_qp(qp);
  REQUIRE(sol.status == QpStatus::optimal);
  CHECK(sol.x[0] == doctest::Approx(1.5).epsilon(1e-8));
  CHECK(sol.objective == doctest::Approx(1.5 * 1.5 - 4.0 * 1.5).epsilon(1e-8));
  CHECK(sol.z[0] > 0.0);  // pushing against the upper bound
  CHECK(sol.r_prim <= 1e-6);
  CHECK(sol.r_dual <= 1e-6);
  CHECK(check_kkt(qp, sol, 1e-6).pass());
}

TEST_CASE("random box problems match exhaustive enumeration") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 5);
    const RandomQp r = random_box_qp(rng, n);
    const QpSolution sol = solve_qp(r.qp, 1e-8, 1e-8);
    REQUIRE(sol.status == QpStatus::optimal);
    CHECK(sol.r_prim <= 1e-8);
    CHECK(sol.r_dual <= 1e-8);
    CHECK(check_kkt(r.qp, sol, 1e-6).pass());

    const Eigen::MatrixXd a0(0, n);
    const Eigen::VectorXd b0(0);
    const test::EnumSolution ref = test::enumerate_box_qp(r.h, r.g, a0, b0, r.lb, r.ub);
    REQUIRE(ref.found);
    for (int i = 0; i < n; ++i) {
      CHECK(std::abs(sol.x[static_cast<std::size_t>(i)] - ref.x(i)) <= 1e-5);
    }
    CHECK(sol.objective == doctest::Approx(ref.objective).epsilon(1e-6));
  }
}

TEST_CASE("equality-constrained interior optimum matches a dense KKT solve") {
  std::mt19937_64 rng(67);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const int n = 8, me = 3;
  Eigen::MatrixXd r(n, n), a(me, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) r(i, j) = dist(rng);
  }
  for (int i = 0; i < me; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = dist(rng);
  }
  const Eigen::MatrixXd h = r.transpose() * r + Eigen::MatrixXd::Identity(n, n);
  const Eigen::VectorXd g = Eigen::VectorXd::NullaryExpr(n, [&] { return dist(rng); });
  const Eigen::VectorXd b = Eigen::VectorXd::NullaryExpr(me, [&] { return dist(rng); });

  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + me, n + me);
  kkt.topLeftCorner(n, n) = h;
  kkt.topRightCorner(n, me) = a.transpose();
  kkt.bottomLeftCorner(me, n) = a;
  Eigen::VectorXd rhs(n + me);
  rhs.head(n) = -g;
  rhs.tail(me) = b;
  const Eigen::VectorXd dense = kkt.fullPivLu().solve(rhs);

  SUBCASE("wide finite bounds") {
    const Eigen::VectorXd lb = Eigen::VectorXd::Constant(n, -50.0);
    const Eigen::VectorXd ub = Eigen::VectorXd::Constant(n, 50.0);
    const QpSolution sol = solve_qp(make_qp(h, g, a, b, lb, ub), 1e-9, 1e-9);
    REQUIRE(sol.status == QpStatus::optimal);
    for (int i = 0; i < n; ++i) {
      CHECK(sol.x[static_cast<std::size_t>(i)] == doctest::Approx(dense(i)).epsilon(1e-6));
    }
    for (int i = 0; i < me; ++i) {
      CHECK(sol.y[static_cast<std::size_t>(i)] == doctest::Approx(dense(n + i)).epsilon(1e-5));
    }
  }
  SUBCASE("unbounded variables") {
    const Eigen::VectorXd lb = Eigen::VectorXd::Constant(n, -kInf);
    const Eigen::VectorXd ub = Eigen::VectorXd::Constant(n, kInf);
    const QpSolution sol = solve_qp(make_qp(h, g, a, b, lb, ub), 1e-9, 1e-9);
    REQUIRE(sol.status == QpStatus::optimal);
    for (int i = 0; i < n; ++i) {
      CHECK(sol.x[static_cast<std::size_t>(i)] == doctest::Approx(dense(i)).epsilon(1e-6));
    }
  }
}

TEST_CASE("a constrained LP-like program lands on the right vertex") {
  // H = 0 keeps the program convex but linear: min x over [-2, 3].
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(1, 1);
  Eigen::VectorXd g(1), lb(1), ub(1);
  g << 1.0;
  lb << -2.0;
  ub << 3.0;
  const QpSolution sol = solve_qp(make_qp(h, g, Eigen::MatrixXd(0, 1), Eigen::VectorXd(0), lb, ub));
  REQUIRE(sol.status == QpStatus::optimal);
  CHECK(sol.x[0] == doctest::Approx(-2.0).epsilon(1e-7));
}

TEST_CASE("primal infeasibility is certified") {
  SUBCASE("equality against the box") {
    Eigen::MatrixXd h(1, 1);
    h << 1.0;
    Eigen::MatrixXd a(1, 1);
    a << 1.0;
    Eigen::VectorXd g(1), b(1), lb(1), ub(1);
    g << 0.0;
    b << 5.0;
    lb << 0.0;
    ub << 1.0;
    const QpSolution sol = solve_qp(make_qp(h, g, a, b, lb, ub));
    CHECK(sol.status == QpStatus::infeasible);
  }
  SUBCASE("two rows that cannot both hold") {
    Eigen::MatrixXd h = Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd a(2, 2);
    a << 1.0, 1.0, 1.0, 1.0;
    Eigen::VectorXd g = Eigen::VectorXd::Zero(2), b(2);
    b << 1.0, 3.0;
    const Eigen::VectorXd lb = Eigen::VectorXd::Constant(2, -kInf);
    const Eigen::VectorXd ub = Eigen::VectorXd::Constant(2, kInf);
    const QpSolution sol = solve_qp(make_qp(h, g, a, b, lb, ub));
    CHECK(sol.status == QpStatus::infeasible);
  }
}

TEST_CASE("iteration cap reports honestly") {
  std::mt19937_64 rng(71);
  const RandomQp r = random_box_qp(rng, 6);
  SolverSettings s;
  s.max_iter = 3;
  s.check_interval = 1;
  s.tol_prim = 1e-12;
  s.tol_dual = 1e-12;
  s.polish = false;
  QpSolver solver(r.qp, s);
  const QpSolution& sol = solver.solve();
  CHECK(sol.status == QpStatus::max_iter);
  CHECK(sol.iterations == 3);
  for (double v : sol.x) CHECK(std::isfinite(v));
  CHECK_FALSE(check_kkt(r.qp, sol, 1e-10).pass());
}

TEST_CASE("warm starting from the optimum converges immediately") {
  std::mt19937_64 rng(73);
  const RandomQp r = random_box_qp(rng, 5);
  QpSolver solver(r.qp);
  const QpSolution cold = solver.solve();
  REQUIRE(cold.status == QpStatus::optimal);
  const int cold_iters = cold.iterations;
  const QpSolution warm = solver.solve(cold);
  REQUIRE(warm.status == QpStatus::optimal);
  CHECK(warm.iterations < cold_iters);
  CHECK(warm.iterations <= 10);
  for (std::size_t i = 0; i < warm.x.size(); ++i) {
    CHECK(warm.x[i] == doctest::Approx(cold.x[i]).epsilon(1e-7));
  }
}

TEST_CASE("value updates behave like a freshly built solver") {
  std::mt19937_64 rng(79);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const int n = 5, me = 2;
  Eigen::MatrixXd rmat(n, n), a(me, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) rmat(i, j) = dist(rng);
  }
  for (int i = 0; i < me; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = dist(rng);
  }
  const Eigen::MatrixXd h = rmat.transpose() * rmat + Eigen::MatrixXd::Identity(n, n);
  const Eigen::VectorXd g = Eigen::VectorXd::NullaryExpr(n, [&] { return dist(rng); });
  const Eigen::VectorXd b = Eigen::VectorXd::NullaryExpr(me, [&] { return dist(rng); });
  const Eigen::VectorXd lb = Eigen::VectorXd::Constant(n, -3.0);
  const Eigen::VectorXd ub = Eigen::VectorXd::Constant(n, 3.0);

  QpSolver solver(make_qp(h, g, a, b, lb, ub));
  REQUIRE(solver.solve().status == QpStatus::optimal);

  const Eigen::VectorXd g2 = Eigen::VectorXd::NullaryExpr(n, [&] { return dist(rng); });
  const Eigen::VectorXd b2 = Eigen::VectorXd::NullaryExpr(me, [&] { return dist(rng); });
  const Eigen::VectorXd lb2 = Eigen::VectorXd::Constant(n, -0.25);
  const Eigen::VectorXd ub2 = Eigen::VectorXd::Constant(n, 0.25);

  std::vector<double> gv(g2.data(), g2.data() + n), bv(b2.data(), b2.data() + me);
  std::vector<double> lv(lb2.data(), lb2.data() + n), uv(ub2.data(), ub2.data() + n);
  solver.update_linear(gv);
  solver.update_eq_rhs(bv);
  solver.update_bounds(lv, uv);
  const QpSolution updated = solver.solve();

  QpSolver fresh(make_qp(h, g2, a, b2, lb2, ub2));
  const QpSolution direct = fresh.solve();
  REQUIRE(updated.status == direct.status);
  if (updated.status == QpStatus::optimal) {
    for (int i = 0; i < n; ++i) {
      CHECK(updated.x[static_cast<std::size_t>(i)] ==
            doctest::Approx(direct.x[static_cast<std::size_t>(i)]).epsilon(1e-6));
    }
  }
}

TEST_CASE("polish sharpens active-set accuracy") {
  std::mt19937_64 rng(83);
  const RandomQp r = random_box_qp(rng, 4);
  SolverSettings with;
  with.polish = true;
  QpSolver polished(r.qp, with);
  const QpSolution& sol = polished.solve();
  REQUIRE(sol.status == QpStatus::optimal);
  // Polished solutions satisfy first-order conditions far below solver tol.
  CHECK(check_kkt(r.qp, sol, 1e-9).pass());

  const test::EnumSolution ref = test::enumerate_box_qp(
      r.h, r.g, Eigen::MatrixXd(0, 4), Eigen::VectorXd(0), r.lb, r.ub);
  REQUIRE(ref.found);
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(sol.x[static_cast<std::size_t>(i)] - ref.x(i)) <= 1e-8);
  }
}

TEST_CASE("fixed variables via equal bounds") {
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(2, 2);
  Eigen::VectorXd g(2), lb(2), ub(2);
  g << 1.0, 1.0;
  lb << 0.7, -5.0;
  ub << 0.7, 5.0;
  const QpSolution sol = solve_qp(make_qp(h, g, Eigen::MatrixXd(0, 2), Eigen::VectorXd(0), lb, ub));
  REQUIRE(sol.status == QpStatus::optimal);
  CHECK(sol.x[0] == doctest::Approx(0.7).epsilon(1e-7));
  CHECK(sol.x[1] == doctest::Approx(-1.0).epsilon(1e-7));
}

TEST_CASE("solver settings variations all reach the same answer") {
  std::mt19937_64 rng(89);
  const RandomQp r = random_box_qp(rng, 5);
  const test::EnumSolution ref = test::enumerate_box_qp(
      r.h, r.g, Eigen::MatrixXd(0, 5), Eigen::VectorXd(0), r.lb, r.ub);
  REQUIRE(ref.found);

  SolverSettings plain;
  SolverSettings no_scaling = plain;
  no_scaling.scaling = false;
  SolverSettings fixed_rho = plain;
  fixed_rho.adaptive_rho = false;
  SolverSettings no_relax = plain;
  no_relax.alpha = 1.0;
  SolverSettings raw = plain;
  raw.polish = false;

  for (const SolverSettings& s : {no_scaling, fixed_rho, no_relax, raw}) {
    QpSolver solver(r.qp, s);
    const QpSolution& sol = solver.solve();
    REQUIRE(sol.status == QpStatus::optimal);
    for (int i = 0; i < 5; ++i) {
      CHECK(std::abs(sol.x[static_cast<std::size_t>(i)] - ref.x(i)) <= 1e-4);
    }
  }
}

TEST_CASE("validate rejects malformed programs") {
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(2, 2);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd lb = Eigen::VectorXd::Constant(2, -1.0);
  Eigen::VectorXd ub = Eigen::VectorXd::Constant(2, 1.0);
  const QuadraticProgram good = make_qp(h, g, Eigen::MatrixXd(0, 2), Eigen::VectorXd(0), lb, ub);
  CHECK_NOTHROW(good.validate());

  QuadraticProgram bad = good;
  bad.linear.pop_back();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = good;
  bad.lb[0] = 2.0;  // above ub
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = good;
  bad.lb[0] = kInf;
  bad.ub[0] = kInf;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = good;
  const std::vector<Triplet> asym = {{0, 0, 1.0}, {0, 1, 1.0}, {1, 1, 1.0}};
  bad.hessian = CscMatrix::from_triplets(2, 2, asym);
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = good;
  const std::vector<Triplet> neg = {{0, 0, -1.0}, {1, 1, 1.0}};
  bad.hessian = CscMatrix::from_triplets(2, 2, neg);
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = good;
  bad.linear[0] = std::nan("");
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("text dump round trips and re-solves identically") {
  test::TempDir dir("qp");
  std::mt19937_64 rng(97);
  RandomQp r = random_box_qp(rng, 4);
  r.qp.lb[1] = -kInf;
  r.qp.ub[2] = kInf;
  const std::string path = dir.str("program.qp");
  write_qp_dump(r.qp, path);
  const QuadraticProgram back = read_qp_dump(path);

  CHECK(back.n == r.qp.n);
  CHECK(back.hessian.nnz() == r.qp.hessian.nnz());
  CHECK(back.hessian.values() == r.qp.hessian.values());
  CHECK(back.linear == r.qp.linear);
  CHECK(back.lb == r.qp.lb);
  CHECK(back.ub == r.qp.ub);

  const QpSolution a = solve_qp(r.qp);
  const QpSolution b = solve_qp(back);
  REQUIRE(a.status == QpStatus::optimal);
  for (std::size_t i = 0; i < a.x.size(); ++i) CHECK(a.x[i] == b.x[i]);
}

TEST_CASE("kkt checker flags wrong answers") {
  Eigen::MatrixXd h(1, 1);
  h << 2.0;
  Eigen::VectorXd g(1), lb(1), ub(1);
  g << -4.0;
  lb << -10.0;
  ub << 10.0;
  const QuadraticProgram qp = make_qp(h, g, Eigen::MatrixXd(0, 1), Eigen::VectorXd(0), lb, ub);
  QpSolution sol = solve_qp(qp);
  REQUIRE(sol.status == QpStatus::optimal);
  REQUIRE(check_kkt(qp, sol, 1e-6).pass());
  sol.x[0] = 1.0;  // not the minimizer
  const KktReport rep = check_kkt(qp, sol, 1e-6);
  CHECK_FALSE(rep.pass());
  CHECK_FALSE(rep.stationarity_ok);
}

}  // TEST_SUITE
