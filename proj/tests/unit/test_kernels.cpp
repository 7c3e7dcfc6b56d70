#include <doctest.h>

#include <cmath>
#include <random>

#include "factcheck/kernels.hpp"
#include "factcheck/retrieval/snippets.hpp"

using namespace factcheck;

namespace {

Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

}  // namespace

TEST_CASE("parallel kernels are bitwise identical to the serial reference") {
  std::mt19937_64 rng(1);
  for (auto [t, in, outd] : {std::tuple{3, 4, 5}, std::tuple{64, 120, 90}, std::tuple{200, 33, 400}}) {
    const Matrix x = random_matrix(t, in, rng), w = random_matrix(outd, in, rng), dy = random_matrix(t, outd, rng);
    const Vector bias = random_matrix(outd, 1, rng).col(0);
    Matrix a, b;
    kernels::serial::project(x, w, bias, a);
    kernels::parallel::project(x, w, bias, b);
    CHECK(a == b);
    CHECK(a.isApprox((x * w.transpose()).rowwise() + bias.transpose(), 1e-12));

    Matrix ga = Matrix::Constant(outd, in, 0.5), gb = ga;
    kernels::serial::accumulate_weight_grad(dy, x, ga);
    kernels::parallel::accumulate_weight_grad(dy, x, gb);
    CHECK(ga == gb);
    CHECK(ga.isApprox(Matrix((dy.transpose() * x).array() + 0.5), 1e-12));

    Matrix da, db;
    kernels::serial::backprop_input(dy, w, da);
    kernels::parallel::backprop_input(dy, w, db);
    CHECK(da == db);
    CHECK(da.isApprox(dy * w, 1e-12));
  }
}

TEST_CASE("mean_rows and cosine_rows agree across implementations") {
  std::mt19937_64 rng(2);
  const Matrix table = random_matrix(500, 16, rng);
  std::vector<std::vector<std::size_t>> ids(700);
  std::uniform_int_distribution<std::size_t> pick(0, 499), len(0, 12);
  for (auto& v : ids)
    for (std::size_t k = len(rng); k > 0; --k) v.push_back(pick(rng));
  Matrix a, b;
  kernels::serial::mean_rows(table, ids, a);
  kernels::parallel::mean_rows(table, ids, b);
  CHECK(a == b);
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (ids[i].empty()) CHECK(a.row(static_cast<Eigen::Index>(i)).isZero(0.0));

  const Vector q = table.row(3).transpose();
  std::vector<double> ca, cb;
  kernels::serial::cosine_rows(q, a, ca);
  kernels::parallel::cosine_rows(q, a, cb);
  CHECK(ca == cb);
}

TEST_CASE("cosine examples and properties") {
  using retrieval::cosine;
  Vector u(2), v(2);
  u << 1, 0;
  v << 0, 1;
  CHECK(cosine(u, v) == 0.0);
  CHECK(cosine(u, u) == 1.0);
  Vector w(2);
  w << 1, 1;
  CHECK(cosine(w, u) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(cosine(Vector::Zero(2), u) == 0.0);
  CHECK_THROWS(cosine(Vector::Zero(3), u));

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const Vector a = random_matrix(7, 1, rng).col(0), b = random_matrix(7, 1, rng).col(0);
    const double c = cosine(a, b);
    CHECK(c == cosine(b, a));
    CHECK(c >= -1.0);
    CHECK(c <= 1.0);
    CHECK(cosine(Vector(3.7 * a), b) == doctest::Approx(c).epsilon(1e-12));
  }
}
