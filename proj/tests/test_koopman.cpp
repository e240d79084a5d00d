#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "coloke/koopman.hpp"

namespace koop = coloke::koop;
namespace linalg = coloke::linalg;
using linalg::Matrix;

namespace {

// Zeroes the feature net's last layer so the lifting becomes Phi(x) = [x; 0],
// which makes every loss term computable by hand.
koop::LiftedModel identity_lift_model(std::size_t d, std::size_t w) {
  koop::LiftedModel model = koop::make_lifted_model(d, w, {4}, 5);
  const std::size_t layers = model.spec.layer_count();
  for (std::size_t which = 0; which < 2; ++which) {  // last weight block, then bias
    const auto& blk = model.params.blocks[model.first_block + 2 * (layers - 1) + which];
    for (std::size_t i = 0; i < blk.rows * blk.cols; ++i)
      model.params.values[blk.offset + i] = 0.0;
  }
  return model;
}

koop::Buffer buffer_of(const std::vector<double>& xs, std::size_t w) {
  koop::Buffer buf(w);
  for (double x : xs) buf.push(std::vector<double>{x});
  return buf;
}

// Loss of the identity lift with K = I on the ramp x_t = t: every tau-step
// term contributes j^2, so the total has the closed form below.
double ramp_loss(std::size_t w) {
  double total = 0.0;
  for (std::size_t tau = 1; tau <= w; ++tau) {
    const double starts = static_cast<double>(w + 1 - tau);
    double inner = 0.0;
    for (std::size_t j = 1; j <= tau; ++j) inner += static_cast<double>(j * j);
    total += starts * inner;
  }
  return total;
}

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("lift dimension rule") {
  CHECK(koop::default_lift_dim(1) == 2);
  CHECK(koop::default_lift_dim(2) == 3);
  CHECK(koop::default_lift_dim(3) == 5);
  CHECK(koop::default_lift_dim(4) == 6);
  CHECK(koop::default_lift_dim(5) == 8);
}

TEST_CASE("model construction: widths, identity operator, determinism") {
  const koop::LiftedModel m = koop::make_lifted_model(2, 5, {32, 16, 8}, 7);
  CHECK(m.d == 2);
  CHECK(m.m == 3);
  CHECK(m.w == 5);
  CHECK(m.seed == 7);
  CHECK(m.spec.widths == std::vector<std::size_t>{2, 32, 16, 8, 1});
  CHECK(m.params.layout_consistent());
  CHECK(m.k_block == m.params.blocks.size() - 1);

  const Matrix K = koop::koopman_matrix(m);
  CHECK(K.rows() == 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(K(i, j) == (i == j ? 1.0 : 0.0));

  const koop::LiftedModel m2 = koop::make_lifted_model(2, 5, {32, 16, 8}, 7);
  CHECK(m.params.values == m2.params.values);
  const koop::LiftedModel m3 = koop::make_lifted_model(2, 5, {32, 16, 8}, 8);
  CHECK(m.params.values != m3.params.values);

  Matrix K2 = K;
  K2(0, 1) = 0.5;
  koop::LiftedModel mut = m;
  koop::set_koopman_matrix(mut, K2);
  CHECK(koop::koopman_matrix(mut)(0, 1) == 0.5);
}

TEST_CASE("the lifting keeps the state coordinates bit-exact") {
  const koop::LiftedModel m = koop::make_lifted_model(3, 4, {8, 4}, 21);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int round = 0; round < 10; ++round) {
    const std::vector<double> x = {u(gen), u(gen), u(gen)};
    const std::vector<double> z = koop::lift(m, x);
    REQUIRE(z.size() == m.m);
    CHECK(z[0] == x[0]);
    CHECK(z[1] == x[1]);
    CHECK(z[2] == x[2]);
  }
}

TEST_CASE("buffer slides and reports warmth") {
  koop::Buffer buf(2);
  CHECK(buf.w() == 2);
  CHECK_FALSE(buf.warm());
  buf.push(std::vector<double>{1.0});
  buf.push(std::vector<double>{2.0});
  CHECK_FALSE(buf.warm());
  buf.push(std::vector<double>{3.0});
  CHECK(buf.warm());
  buf.push(std::vector<double>{4.0});
  CHECK(buf.size() == 3);
  CHECK(buf.at(0)[0] == 2.0);
  CHECK(buf.at(2)[0] == 4.0);
  CHECK(buf.newest()[0] == 4.0);
  buf.reset();
  CHECK(buf.size() == 0);
}

TEST_CASE("frozen window oracle: loss 18, score 13") {
  const koop::LiftedModel model = identity_lift_model(1, 2);
  const koop::Buffer buf = buffer_of({1.0, 2.0, 4.0}, 2);
  // Terms with Phi(x) = (x, 0), K = I:
  //   (s=0,tau=1): (2-1)^2 = 1
  //   (s=1,tau=1): (4-2)^2 = 4
  //   (s=0,tau=2): (4-2)^2 + (4-1)^2 = 13
  CHECK(koop::multistep_loss(model, buf) == 18.0);
  CHECK(koop::conformity_score(model, buf) == 13.0);
}

TEST_CASE("ramp oracle across window lengths") {
  for (std::size_t w = 1; w <= 5; ++w) {
    const koop::LiftedModel model = identity_lift_model(1, w);
    std::vector<double> xs(w + 1);
    for (std::size_t t = 0; t <= w; ++t) xs[t] = static_cast<double>(t);
    const koop::Buffer buf = buffer_of(xs, w);
    CHECK(koop::multistep_loss(model, buf) == doctest::Approx(ramp_loss(w)).epsilon(1e-14));
    // the window-spanning term alone: sum of j^2 up to w
    double span = 0.0;
    for (std::size_t j = 1; j <= w; ++j) span += static_cast<double>(j * j);
    CHECK(koop::conformity_score(model, buf) == doctest::Approx(span).epsilon(1e-14));
  }
}

TEST_CASE("score never exceeds the loss it is part of") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int round = 0; round < 100; ++round) {
    const std::size_t w = 2 + static_cast<std::size_t>(gen() % 3);
    koop::LiftedModel model = koop::make_lifted_model(2, w, {6}, gen());
    Matrix K = koop::koopman_matrix(model);
    for (std::size_t i = 0; i < K.rows(); ++i)
      for (std::size_t j = 0; j < K.cols(); ++j) K(i, j) += 0.3 * u(gen);
    koop::set_koopman_matrix(model, K);
    koop::Buffer buf(w);
    for (std::size_t t = 0; t <= w; ++t) buf.push(std::vector<double>{u(gen), u(gen)});
    const double loss = koop::multistep_loss(model, buf);
    const double score = koop::conformity_score(model, buf);
    CHECK(score <= loss);
    CHECK(score >= 0.0);
  }
}

TEST_CASE("loss value, tape value, and gradient agree") {
  koop::LiftedModel model = koop::make_lifted_model(2, 3, {5}, 4);
  Matrix K = koop::koopman_matrix(model);
  K(0, 2) = 0.2;
  K(1, 0) = -0.1;
  koop::set_koopman_matrix(model, K);
  koop::Buffer buf(3);
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 4; ++t) buf.push(std::vector<double>{u(gen), u(gen)});

  const double plain = koop::multistep_loss(model, buf);
  coloke::ad::Tape tape(&model.params);
  const int root = koop::multistep_loss_node(tape, model, buf);
  CHECK(tape.scalar_value(root) == doctest::Approx(plain).epsilon(1e-12));

  coloke::ad::ParamVector grad;
  coloke::ad::Tape scratch;
  const double from_gradient = koop::multistep_loss_gradient(scratch, model, buf, grad);
  CHECK(from_gradient == doctest::Approx(plain).epsilon(1e-12));
  const coloke::ad::ParamVector direct = tape.backward(root);
  CHECK(grad.values == direct.values);

  const auto build = [&](coloke::ad::Tape& t) { return koop::multistep_loss_node(t, model, buf); };
  CHECK(coloke::ad::grad_check(build, model.params, 1e-5) < 1e-6);

  koop::Buffer cold(3);
  cold.push(std::vector<double>{0.0, 0.0});
  CHECK_THROWS_AS((void)koop::multistep_loss(model, cold), std::invalid_argument);
}

TEST_CASE("one-step prediction reads the state rows of K Phi") {
  koop::LiftedModel model = identity_lift_model(1, 2);
  Matrix K(2, 2);
  K(0, 0) = 0.75;
  K(0, 1) = 3.0;  // multiplies the zeroed feature, so it must not matter
  K(1, 0) = 9.0;
  K(1, 1) = 2.0;
  koop::set_koopman_matrix(model, K);
  const std::vector<double> pred = koop::predict_next(model, std::vector<double>{2.0});
  REQUIRE(pred.size() == 1);
  CHECK(pred[0] == doctest::Approx(1.5));
}

TEST_CASE("spectrum maps discrete eigenvalues through the matrix logarithm") {
  const double dt = 0.01;
  SUBCASE("real decay rates") {
    Matrix K(2, 2);
    K(0, 0) = std::exp(-0.05 * dt);
    K(1, 1) = std::exp(-1.0 * dt);
    const auto lam = koop::spectrum(K, dt);
    REQUIRE(lam.size() == 2);
    CHECK(lam[0].real() == doctest::Approx(-0.05).epsilon(1e-9));
    CHECK(lam[1].real() == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(std::abs(lam[0].imag()) < 1e-12);
  }
  SUBCASE("a rotation becomes a conjugate imaginary pair") {
    const double omega = 3.0;
    Matrix K(2, 2);
    K(0, 0) = std::cos(omega * dt);
    K(0, 1) = -std::sin(omega * dt);
    K(1, 0) = std::sin(omega * dt);
    K(1, 1) = std::cos(omega * dt);
    const auto lam = koop::spectrum(K, dt);
    REQUIRE(lam.size() == 2);
    CHECK(lam[0].imag() == doctest::Approx(omega).epsilon(1e-9));
    CHECK(lam[1].imag() == doctest::Approx(-omega).epsilon(1e-9));
    CHECK(std::abs(lam[0].real()) < 1e-9);
  }
  SUBCASE("near-zero discrete eigenvalues are dropped and counted") {
    Matrix K(2, 2);
    K(0, 0) = 1.0;  // log(1)/dt = 0
    K(1, 1) = 0.0;  // no finite logarithm
    std::size_t dropped = 99;
    const auto lam = koop::spectrum(K, dt, &dropped);
    CHECK(lam.size() == 1);
    CHECK(dropped == 1);
    CHECK(std::abs(lam[0].real()) < 1e-12);
  }
  SUBCASE("dt must be positive") {
    CHECK_THROWS_AS((void)koop::spectrum(Matrix::identity(2), 0.0), std::invalid_argument);
  }
}

TEST_CASE("eigenfunctions of a diagonal operator read out single observables") {
  koop::LiftedModel model = identity_lift_model(1, 2);
  Matrix K(2, 2);
  K(0, 0) = 0.9;
  K(1, 1) = 0.5;
  koop::set_koopman_matrix(model, K);

  std::vector<std::vector<double>> grid;
  for (double x : {-1.5, -0.5, 0.25, 1.0, 2.0}) grid.push_back({x});

  const double dt = 0.01;
  const koop::EigenfunctionEval ev = koop::eigenfunction_eval(model, grid, dt);
  REQUIRE(ev.eigenvalues.size() == 2);
  CHECK(ev.eigenvalues[0].real() == doctest::Approx(std::log(0.9) / dt));
  CHECK(ev.eigenvalues[1].real() == doctest::Approx(std::log(0.5) / dt));

  // The leading eigenfunction is +-x on this lift; the other reads the zeroed
  // feature coordinate.
  REQUIRE(ev.values[0].size() == grid.size());
  const double sign = ev.values[0][3].real() > 0 ? 1.0 : -1.0;  // grid[3] = 1.0
  for (std::size_t k = 0; k < grid.size(); ++k) {
    CHECK(ev.values[0][k].real() * sign == doctest::Approx(grid[k][0]).epsilon(1e-8));
    CHECK(std::abs(ev.values[0][k].imag()) < 1e-10);
    CHECK(std::abs(ev.values[1][k]) < 1e-10);
  }
}

TEST_CASE("eigenfunction evaluation refuses a defective operator") {
  koop::LiftedModel model = identity_lift_model(1, 2);
  Matrix J(2, 2);
  J(0, 0) = 2.0;
  J(0, 1) = 1.0;
  J(1, 1) = 2.0;
  koop::set_koopman_matrix(model, J);
  CHECK_THROWS_AS((void)koop::eigenfunction_eval(model, {{1.0}}, 0.01), std::runtime_error);
}

TEST_CASE("model snapshots round-trip exactly") {
  koop::LiftedModel model = koop::make_lifted_model(2, 4, {6, 5}, 99);
  Matrix K = koop::koopman_matrix(model);
  K(0, 1) = -0.125;
  K(2, 0) = 1.0 / 3.0;
  koop::set_koopman_matrix(model, K);

  const std::string path = temp_path("coloke_model_roundtrip.json");
  koop::save_model(model, path);
  const koop::LiftedModel back = koop::load_model(path);

  CHECK(back.spec.widths == model.spec.widths);
  CHECK(back.d == model.d);
  CHECK(back.m == model.m);
  CHECK(back.w == model.w);
  CHECK(back.seed == model.seed);
  CHECK(back.params.values == model.params.values);
  CHECK(back.params.blocks.size() == model.params.blocks.size());

  const std::string again = temp_path("coloke_model_roundtrip2.json");
  koop::save_model(back, again);
  CHECK(slurp(path) == slurp(again));  // stable bytes across a save/load cycle
}

TEST_CASE("snapshot loader names the missing field") {
  koop::LiftedModel model = koop::make_lifted_model(1, 2, {3}, 1);
  const std::string good = temp_path("coloke_model_good.json");
  koop::save_model(model, good);

  nlohmann::json j = nlohmann::json::parse(slurp(good));
  j.erase("K");
  const std::string bad = temp_path("coloke_model_bad.json");
  {
    std::ofstream out(bad);
    out << j.dump();
  }
  try {
    (void)koop::load_model(bad);
    FAIL("expected load_model to throw");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("K") != std::string::npos);
  }

  CHECK_THROWS(koop::load_model(temp_path("coloke_model_missing_file.json")));
}
