#include "lfc/sparse.hpp"

#include <random>
#include <vector>

#include "doctest.h"

using namespace lfc;

namespace {

struct DenseRef {
  int rows = 0, cols = 0;
  std::vector<double> a;  // row-major
  double& at(int r, int c) { return a[static_cast<std::size_t>(r * cols + c)]; }
  double at(int r, int c) const { return a[static_cast<std::size_t>(r * cols + c)]; }
};

DenseRef dense_of(const CscMatrix& m) {
  DenseRef d{m.rows(), m.cols(), std::vector<double>(static_cast<std::size_t>(m.rows() * m.cols()))};
  for (int c = 0; c < m.cols(); ++c) {
    for (int p = m.col_ptr()[static_cast<std::size_t>(c)];
         p < m.col_ptr()[static_cast<std::size_t>(c) + 1]; ++p) {
      d.at(m.row_idx()[static_cast<std::size_t>(p)], c) += m.values()[static_cast<std::size_t>(p)];
    }
  }
  return d;
}

std::vector<Triplet> random_triplets(std::mt19937_64& rng, int rows, int cols, int count) {
  std::uniform_int_distribution<int> rd(0, rows - 1), cd(0, cols - 1);
  std::uniform_real_distribution<double> vd(-4.0, 4.0);
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) t.push_back({rd(rng), cd(rng), vd(rng)});
  return t;
}

}  // namespace

TEST_SUITE("sparse") {

TEST_CASE("assembly sorts rows and sums duplicates") {
  const std::vector<Triplet> t = {{2, 0, 1.0}, {0, 0, 3.0}, {2, 0, 0.5}, {1, 1, -2.0}, {0, 2, 7.0}};
  const CscMatrix m = CscMatrix::from_triplets(3, 3, t);
  CHECK(m.nnz() == 4);  // the (2,0) pair merged
  CHECK(m.col_ptr() == std::vector<int>{0, 2, 3, 4});
  CHECK(m.row_idx() == std::vector<int>{0, 2, 1, 0});
  CHECK(m.values() == std::vector<double>{3.0, 1.5, -2.0, 7.0});
}

TEST_CASE("assembly matches a dense reference on random input") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const int rows = 1 + static_cast<int>(rng() % 12);
    const int cols = 1 + static_cast<int>(rng() % 12);
    const std::vector<Triplet> t = random_triplets(rng, rows, cols, 40);
    const CscMatrix m = CscMatrix::from_triplets(rows, cols, t);

    DenseRef expect{rows, cols, std::vector<double>(static_cast<std::size_t>(rows * cols))};
    for (const Triplet& x : t) expect.at(x.row, x.col) += x.value;
    const DenseRef got = dense_of(m);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        CHECK(got.at(r, c) == doctest::Approx(expect.at(r, c)).epsilon(1e-14));
      }
    }
    // Rows strictly increasing within each column.
    for (int c = 0; c < cols; ++c) {
      for (int p = m.col_ptr()[static_cast<std::size_t>(c)] + 1;
           p < m.col_ptr()[static_cast<std::size_t>(c) + 1]; ++p) {
        CHECK(m.row_idx()[static_cast<std::size_t>(p - 1)] <
              m.row_idx()[static_cast<std::size_t>(p)]);
      }
    }
  }
}

TEST_CASE("products match the dense reference") {
  std::mt19937_64 rng(29);
  const int rows = 9, cols = 7;
  const std::vector<Triplet> t = random_triplets(rng, rows, cols, 30);
  const CscMatrix m = CscMatrix::from_triplets(rows, cols, t);
  const DenseRef d = dense_of(m);

  std::uniform_real_distribution<double> vd(-2.0, 2.0);
  std::vector<double> x(cols), xt(rows), y(rows), yt(cols);
  for (double& v : x) v = vd(rng);
  for (double& v : xt) v = vd(rng);
  for (double& v : y) v = vd(rng);
  for (double& v : yt) v = vd(rng);
  const std::vector<double> y0 = y, yt0 = yt;

  m.multiply(x, y, 2.0, -0.5);
  for (int r = 0; r < rows; ++r) {
    double acc = 0.0;
    for (int c = 0; c < cols; ++c) acc += d.at(r, c) * x[static_cast<std::size_t>(c)];
    CHECK(y[static_cast<std::size_t>(r)] ==
          doctest::Approx(2.0 * acc - 0.5 * y0[static_cast<std::size_t>(r)]).epsilon(1e-13));
  }

  m.multiply_transpose(xt, yt, 1.5, 1.0);
  for (int c = 0; c < cols; ++c) {
    double acc = 0.0;
    for (int r = 0; r < rows; ++r) acc += d.at(r, c) * xt[static_cast<std::size_t>(r)];
    CHECK(yt[static_cast<std::size_t>(c)] ==
          doctest::Approx(1.5 * acc + yt0[static_cast<std::size_t>(c)]).epsilon(1e-13));
  }
}

TEST_CASE("abs-max reductions and scaling") {
  std::mt19937_64 rng(31);
  const int rows = 8, cols = 6;
  const std::vector<Triplet> t = random_triplets(rng, rows, cols, 25);
  CscMatrix m = CscMatrix::from_triplets(rows, cols, t);
  const DenseRef d = dense_of(m);

  const std::vector<double> cm = m.col_abs_max();
  const std::vector<double> rm = m.row_abs_max();
  for (int c = 0; c < cols; ++c) {
    double mx = 0.0;
    for (int r = 0; r < rows; ++r) mx = std::max(mx, std::abs(d.at(r, c)));
    CHECK(cm[static_cast<std::size_t>(c)] == doctest::Approx(mx).epsilon(1e-14));
  }
  for (int r = 0; r < rows; ++r) {
    double mx = 0.0;
    for (int c = 0; c < cols; ++c) mx = std::max(mx, std::abs(d.at(r, c)));
    CHECK(rm[static_cast<std::size_t>(r)] == doctest::Approx(mx).epsilon(1e-14));
  }

  std::vector<double> rs(rows), cs(cols);
  std::uniform_real_distribution<double> sd(0.5, 2.0);
  for (double& v : rs) v = sd(rng);
  for (double& v : cs) v = sd(rng);

  const CscMatrix copy = m.scaled(rs, cs);
  m.scale_rows_cols(rs, cs);
  const DenseRef ds = dense_of(m);
  const DenseRef ds2 = dense_of(copy);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double expect = d.at(r, c) * rs[static_cast<std::size_t>(r)] * cs[static_cast<std::size_t>(c)];
      CHECK(ds.at(r, c) == doctest::Approx(expect).epsilon(1e-13));
      CHECK(ds2.at(r, c) == doctest::Approx(expect).epsilon(1e-13));
    }
  }
}

TEST_CASE("symmetric scaling uses the same factor on both sides") {
  const std::vector<Triplet> t = {{0, 0, 2.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 4.0}};
  CscMatrix m = CscMatrix::from_triplets(2, 2, t);
  const std::vector<double> s = {2.0, 0.5};
  m.scale_symmetric(s);
  const DenseRef d = dense_of(m);
  CHECK(d.at(0, 0) == 8.0);
  CHECK(d.at(0, 1) == 1.0);
  CHECK(d.at(1, 0) == 1.0);
  CHECK(d.at(1, 1) == 1.0);
}

TEST_CASE("empty matrix edge cases") {
  const CscMatrix m = CscMatrix::from_triplets(4, 3, {});
  CHECK(m.nnz() == 0);
  CHECK(m.col_ptr() == std::vector<int>{0, 0, 0, 0});
  std::vector<double> y(4, 1.0);
  m.multiply(std::vector<double>(3, 1.0), y, 1.0, 0.0);
  for (double v : y) CHECK(v == 0.0);
}

}  // TEST_SUITE
