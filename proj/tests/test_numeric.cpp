#include <cmath>
#include <doctest.h>

#include "signn/errors.hpp"
#include "signn/grad_check.hpp"
#include "signn/matrix.hpp"
#include "signn/rng.hpp"
#include "signn/tape.hpp"
#include "test_helpers.hpp"

using namespace signn;
using num::GradCheckReport;
using num::GradMode;
using num::Matrix;
using num::Param;
using num::Rng;
using num::Tape;
using num::Var;
using test_helpers::random_matrix;

TEST_CASE("matmul examples") {
  const Matrix a = Matrix::from_rows({{1, 2}, {3, 4}});
  const Matrix i2 = Matrix::identity(2);
  CHECK(num::matmul(a, i2).data == a.data);

  const Matrix row = Matrix::from_rows({{1, 0}});
  const Matrix col = Matrix::from_rows({{0}, {1}});
  CHECK(num::matmul(row, col).data == std::vector<double>{0});

  const Matrix b = Matrix::from_rows({{5, 6}, {7, 8}});
  const Matrix c = num::matmul(a, b);
  CHECK(c.data == std::vector<double>{19, 22, 43, 50});
}

TEST_CASE("matmul shape mismatch names both shapes") {
  const Matrix a(2, 3), b(4, 2);
  try {
    num::matmul(a, b);
    FAIL("expected DimensionError");
  } catch (const DimensionError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("2x3") != std::string::npos);
    CHECK(msg.find("4x2") != std::string::npos);
  }
}

TEST_CASE("matmul associativity on random 4x4 triples") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = random_matrix(4, 4, rng);
    const Matrix b = random_matrix(4, 4, rng);
    const Matrix c = random_matrix(4, 4, rng);
    const Matrix left = num::matmul(num::matmul(a, b), c);
    const Matrix right = num::matmul(a, num::matmul(b, c));
    for (std::size_t i = 0; i < left.data.size(); ++i)
      CHECK(left.data[i] == doctest::Approx(right.data[i]).epsilon(1e-10));
  }
}

TEST_CASE("sigmoid examples") {
  CHECK(num::sigmoid_scalar(0.0) == 0.5);
  CHECK(std::fabs(num::sigmoid_scalar(100.0) - 1.0) < 1e-12);
  CHECK(num::sigmoid_scalar(std::log(3.0)) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("heaviside surrogate forward is exactly {0,1}") {
  Tape t;
  Rng rng(3);
  Var x = t.leaf(random_matrix(6, 6, rng, -2.0, 2.0));
  Var y = t.heaviside(x, GradMode::surrogate(1.0));
  for (double v : t.value(y).data) CHECK((v == 0.0 || v == 1.0));

  Tape t2;
  Var zero = t2.leaf(Matrix::scalar(0.0));
  CHECK(t2.value(t2.heaviside(zero, GradMode::surrogate(1.0))).data[0] == 1.0);
}

TEST_CASE("heaviside surrogate gradient: rectangular window") {
  Tape t;
  Var x = t.leaf(Matrix::scalar(-0.3));
  Var y = t.heaviside(x, GradMode::surrogate(1.0));
  CHECK(t.value(y).data[0] == 0.0);
  t.backward(y);
  CHECK(t.grad(x).data[0] == 1.0);  // |x| <= width/2 -> 1/width

  Tape t2;
  Var far = t2.leaf(Matrix::scalar(-0.7));
  Var y2 = t2.heaviside(far, GradMode::surrogate(1.0));
  t2.backward(y2);
  CHECK(t2.grad(far).data[0] == 0.0);  // outside the window
}

TEST_CASE("heaviside smooth forward is sigmoid(steepness*x)") {
  Tape t;
  Var x = t.leaf(Matrix::scalar(-0.3));
  Var y = t.heaviside(x, GradMode::smooth(10.0));
  CHECK(t.value(y).data[0] == doctest::Approx(1.0 / (1.0 + std::exp(3.0))).epsilon(1e-14));
}

TEST_CASE("heaviside smooth converges to surrogate forward as steepness grows") {
  const GradMode hard = GradMode::surrogate(1.0);
  const GradMode soft = GradMode::smooth(1e4);
  for (double x = -2.0; x <= 2.0; x += 0.01) {
    if (std::fabs(x) < 0.01) continue;
    Tape t;
    Var v = t.constant(Matrix::scalar(x));
    const double h = t.value(t.heaviside(v, hard)).data[0];
    const double s = t.value(t.heaviside(v, soft)).data[0];
    CHECK(std::fabs(h - s) < 1e-4);
  }
}

TEST_CASE("stop_gradient blocks the backward path") {
  Param w("w", Matrix::scalar(2.0));
  Tape t;
  Var wv = t.param(w);
  Var y = t.mul(t.stop_gradient(wv), wv);  // value w^2, grad only via second factor
  CHECK(t.value(y).data[0] == 4.0);
  w.reset_grad();
  t.backward(y);
  CHECK(w.grad.data[0] == 2.0);
}

namespace {

// Random-projection scalarization so grad_check exercises full matrix grads.
num::LossFn project(std::function<Var(Tape&)> make, Matrix projection) {
  return [make = std::move(make), projection = std::move(projection)](Tape& t) {
    Var out = make(t);
    return t.sum(t.mul(out, t.constant(projection)));
  };
}

}  // namespace

TEST_CASE("per-op gradients match central finite differences (100 trials)") {
  Rng rng(77);
  int trials = 0;
  auto run = [&](const std::vector<Param*>& params, num::LossFn f) {
    const GradCheckReport report = num::grad_check(f, params, 1e-5, 1e-5);
    INFO(report.summary());
    CHECK(report.passed);
    ++trials;
  };

  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t r = 1 + rng.uniform_index(8);
    const std::size_t k = 1 + rng.uniform_index(8);
    const std::size_t c = 1 + rng.uniform_index(8);

    Param a("a", random_matrix(r, k, rng));
    Param b("b", random_matrix(k, c, rng));
    run({&a, &b}, project([&](Tape& t) { return t.matmul(t.param(a), t.param(b)); },
                          random_matrix(r, c, rng)));

    Param x("x", random_matrix(r, c, rng));
    Param y("y", random_matrix(r, c, rng));
    run({&x, &y}, project([&](Tape& t) { return t.add(t.param(x), t.param(y)); },
                          random_matrix(r, c, rng)));
    run({&x, &y}, project([&](Tape& t) { return t.sub(t.param(x), t.param(y)); },
                          random_matrix(r, c, rng)));
    run({&x, &y}, project([&](Tape& t) { return t.mul(t.param(x), t.param(y)); },
                          random_matrix(r, c, rng)));

    Param denom("denom", random_matrix(r, c, rng, 0.5, 2.0));
    run({&x, &denom}, project([&](Tape& t) { return t.div(t.param(x), t.param(denom)); },
                              random_matrix(r, c, rng)));

    run({&x}, project([&](Tape& t) { return t.sigmoid(t.param(x)); },
                      random_matrix(r, c, rng)));
    run({&x}, project([&](Tape& t) { return t.tanh(t.param(x)); },
                      random_matrix(r, c, rng)));
    run({&x}, project([&](Tape& t) { return t.exp(t.param(x)); },
                      random_matrix(r, c, rng)));
    run({&x}, project([&](Tape& t) { return t.heaviside(t.param(x), GradMode::smooth(3.0)); },
                      random_matrix(r, c, rng)));

    Param s("s", Matrix::scalar(rng.uniform(0.2, 2.0)));
    run({&s, &x}, project([&](Tape& t) { return t.scalar_mul(t.param(s), t.param(x)); },
                          random_matrix(r, c, rng)));

    run({&x}, project([&](Tape& t) { return t.row_sum(t.param(x)); },
                      random_matrix(r, 1, rng)));

    Param bias("bias", random_matrix(1, c, rng));
    run({&x, &bias},
        project([&](Tape& t) { return t.add_row_broadcast(t.param(x), t.param(bias)); },
                random_matrix(r, c, rng)));

    Param w("w", random_matrix(r, 1, rng));
    run({&x, &w}, project([&](Tape& t) { return t.row_scale(t.param(x), t.param(w)); },
                          random_matrix(r, c, rng)));
  }
  CHECK(trials >= 100);
}

TEST_CASE("gather, neighbor_mean, concat, pool_step, max_elem, cross_entropy gradients") {
  Rng rng(99);
  auto run = [&](const std::vector<Param*>& params, num::LossFn f) {
    const GradCheckReport report = num::grad_check(f, params, 1e-5, 1e-5);
    INFO(report.summary());
    CHECK(report.passed);
  };

  Param h("h", random_matrix(6, 4, rng));
  std::vector<std::size_t> ids = {3, 0, 5, 3};
  run({&h}, project([&](Tape& t) { return t.gather_rows(t.param(h), ids); },
                    random_matrix(4, 4, rng)));

  auto samples = std::make_shared<std::vector<std::vector<std::size_t>>>(
      std::vector<std::vector<std::size_t>>{{0, 1}, {2}, {3, 4, 5}, {1, 1, 2}, {5}, {0}});
  run({&h}, project([&](Tape& t) { return t.neighbor_mean(t.param(h), samples); },
                    random_matrix(6, 4, rng)));

  Param p2("p2", random_matrix(6, 3, rng));
  run({&h, &p2},
      project([&](Tape& t) { return t.concat_cols({t.param(h), t.param(p2)}); },
              random_matrix(6, 7, rng)));

  Param pool("pool", random_matrix(4, 5, rng));
  run({&h, &pool}, project([&](Tape& t) { return t.pool_step(t.param(h), t.param(pool), 2); },
                           random_matrix(6, 4, rng)));

  Param m1("m1", random_matrix(3, 3, rng));
  Param m2("m2", random_matrix(3, 3, rng));
  run({&m1, &m2}, project([&](Tape& t) { return t.max_elem(t.param(m1), t.param(m2)); },
                          random_matrix(3, 3, rng)));

  Param scores("scores", random_matrix(5, 3, rng));
  std::vector<std::size_t> labels = {0, 2, 1, 1, 0};
  run({&scores}, [&](Tape& t) { return t.cross_entropy(t.param(scores), labels); });
}

TEST_CASE("grad_check examples") {
  SUBCASE("f(w) = w^2 at w = 3") {
    Param w("w", Matrix::scalar(3.0));
    auto f = [&](Tape& t) {
      Var wv = t.param(w);
      return t.sum(t.mul(wv, wv));
    };
    const GradCheckReport report = num::grad_check(f, {&w}, 1e-4, 1e-6);
    CHECK(report.passed);
    CHECK(w.grad.data[0] == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(report.per_param[0].max_abs_err < 1e-6);
  }
  SUBCASE("constant function has zero gradients") {
    Param w("w", Matrix::scalar(1.5));
    auto f = [&](Tape& t) {
      (void)t.param(w);
      return t.constant(Matrix::scalar(42.0));
    };
    const GradCheckReport report = num::grad_check(f, {&w}, 1e-4, 1e-8);
    CHECK(report.passed);
    CHECK(report.max_rel_err == 0.0);
    CHECK(w.grad.data[0] == 0.0);
  }
  SUBCASE("non-finite loss aborts with diagnostics") {
    Param w("w", Matrix::scalar(1.0));
    auto f = [&](Tape& t) {
      (void)t.param(w);
      return t.constant(Matrix::scalar(std::numeric_limits<double>::quiet_NaN()));
    };
    const GradCheckReport report = num::grad_check(f, {&w}, 1e-4, 1e-6);
    CHECK(report.aborted);
    CHECK_FALSE(report.passed);
    CHECK(report.message.find("not finite") != std::string::npos);
  }
}

TEST_CASE("ops keep values finite on random inputs") {
  Rng rng(123);
  for (int rep = 0; rep < 20; ++rep) {
    Tape t;
    Var a = t.leaf(random_matrix(5, 5, rng, -3.0, 3.0));
    Var b = t.leaf(random_matrix(5, 5, rng, -3.0, 3.0));
    Var out = t.sigmoid(t.add(t.matmul(a, b), t.mul(a, b)));
    CHECK(t.value(out).all_finite());
  }
}

TEST_CASE("backward rejects non-scalar and non-finite losses") {
  Tape t;
  Var a = t.leaf(Matrix::zeros(2, 2));
  CHECK_THROWS_AS(t.backward(a), DimensionError);
  Tape t2;
  Var bad = t2.leaf(Matrix::scalar(std::numeric_limits<double>::infinity()));
  CHECK_THROWS_AS(t2.backward(bad), NumericError);
}
