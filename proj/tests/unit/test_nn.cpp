#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "arm/errors.hpp"
#include "arm/nn/adam.hpp"
#include "arm/nn/checkpoint.hpp"
#include "arm/nn/network.hpp"
#include "arm/nn/ops.hpp"

using namespace arm;
using namespace arm::nn;

namespace {

Tensor filled(Shape shape, double (*f)(std::size_t)) {
  Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<Real>(f(i));
  return t;
}

ParamSet random_params(std::uint64_t seed) {
  NetworkSpec spec;
  spec.conv(4, 3, 2).flatten().dense(5).dense(2, Activation::kNone);
  ParamSet p;
  Rng rng(seed);
  init_params(spec, {1, 2, 6, 6}, "net", p, rng);
  return p;
}

}  // namespace

TEST_CASE("dense layer with zero parameters outputs zeros") {
  NetworkSpec spec;
  spec.dense(3, Activation::kNone);
  ParamSet p;
  Rng rng(1);
  init_params(spec, {2, 5}, "d", p, rng);
  p.at("d.0.w").fill(0);
  const Tensor x = filled({2, 5}, [](std::size_t i) { return std::sin(double(i)) * 10; });
  const Tensor y = forward(spec, p, "d", x);
  CHECK(y.shape() == Shape{2, 3});
  for (Real v : y.values()) CHECK(v == 0);
}

TEST_CASE("identity 1x1 convolution returns its input") {
  NetworkSpec spec;
  spec.conv(3, 1, 1, false, Activation::kNone);
  ParamSet p;
  Rng rng(1);
  init_params(spec, {2, 3, 4, 5}, "c", p, rng);
  Tensor& w = p.at("c.0.w");
  w.fill(0);
  for (int i = 0; i < 3; ++i) w.at(i, i, 0, 0) = 1;
  const Tensor x = filled({2, 3, 4, 5}, [](std::size_t i) { return std::cos(0.3 * double(i)); });
  const Tensor y = forward(spec, p, "c", x);
  REQUIRE(y.shape() == x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(y[i] == x[i]);
}

// Reference outputs were computed once with an independent NumPy implementation
// of the same layers and parameter formulas.
TEST_CASE("golden forward of a two-layer dense net") {
  NetworkSpec spec;
  spec.dense(4).dense(2, Activation::kNone);
  ParamSet p;
  Rng rng(0);
  init_params(spec, {2, 3}, "g", p, rng);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 3; ++j) p.at("g.0.w")[i * 3 + j] = static_cast<Real>(std::sin(i * 3 + j + 1) * 0.5);
    p.at("g.0.b")[i] = static_cast<Real>(0.1 * i - 0.15);
  }
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 4; ++j) p.at("g.1.w")[i * 4 + j] = static_cast<Real>(std::cos(i * 4 + j) * 0.7);
  p.at("g.1.b")[0] = Real(0.05);
  p.at("g.1.b")[1] = Real(-0.02);
  Tensor x({2, 3});
  for (int n = 0; n < 2; ++n)
    for (int j = 0; j < 3; ++j) x[n * 3 + j] = static_cast<Real>(0.3 * (n + 1) * (j - 1) + 0.2);
  const Tensor y = forward(spec, p, "g", x);
  const double golden[] = {-0.01456844393615118, 0.12691975550096218, -0.00434111030602058, 0.10286142378301091};
  for (int i = 0; i < 4; ++i) CHECK(y[i] == doctest::Approx(golden[i]).epsilon(1e-5));
}

TEST_CASE("golden forward of a normalized conv net") {
  NetworkSpec spec;
  spec.conv(3, 3, 1).flatten().dense(2, Activation::kNone);
  ParamSet p;
  Rng rng(0);
  init_params(spec, {1, 2, 4, 4}, "g", p, rng);
  Tensor& w = p.at("g.0.w");
  for (int o = 0; o < 3; ++o)
    for (int c = 0; c < 2; ++c)
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) w.at(o, c, a, b) = static_cast<Real>(0.2 * std::cos(o * 18 + c * 9 + a * 3 + b));
  const double bias[] = {0.01, -0.02, 0.03}, gain[] = {1.0, 0.5, 1.5}, beta[] = {0.0, 0.1, -0.1};
  for (int o = 0; o < 3; ++o) {
    p.at("g.0.b")[o] = static_cast<Real>(bias[o]);
    p.at("g.0.g")[o] = static_cast<Real>(gain[o]);
    p.at("g.0.beta")[o] = static_cast<Real>(beta[o]);
  }
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 48; ++j) p.at("g.2.w")[i * 48 + j] = static_cast<Real>(0.05 * std::sin(i * 48 + j));
  p.at("g.2.b")[0] = Real(0.1);
  p.at("g.2.b")[1] = Real(0.2);
  const Tensor x = filled({1, 2, 4, 4}, [](std::size_t i) { return std::sin(0.7 * double(i)); });
  const Tensor y = forward(spec, p, "g", x);
  CHECK(y[0] == doctest::Approx(0.08933805579379353).epsilon(1e-5));
  CHECK(y[1] == doctest::Approx(0.09072532588099236).epsilon(1e-5));
}

TEST_CASE("declared output shapes match forward passes") {
  NetworkSpec spec;
  spec.skip_push().conv(4, 3, 2).residual(4, 3, 1).max_pool(2).upsample().upsample().skip_concat().conv(1, 3, 1,
                                                                                                          false);
  ParamSet p;
  Rng rng(2);
  init_params(spec, {2, 3, 8, 8}, "s", p, rng);
  const Tensor y = forward(spec, p, "s", Tensor({2, 3, 8, 8}, Real(0.5)));
  CHECK(y.shape() == output_shape(spec, {2, 3, 8, 8}));
  CHECK(y.shape() == Shape{2, 1, 8, 8});

  NetworkSpec pooled;
  pooled.conv(5, 3, 2).global_max_pool().dense(3);
  ParamSet q;
  init_params(pooled, {1, 2, 7, 7}, "p", q, rng);
  CHECK(forward(pooled, q, "p", Tensor({1, 2, 7, 7}, Real(1))).shape() == output_shape(pooled, {1, 2, 7, 7}));
  CHECK_THROWS_AS(forward(pooled, q, "p", Tensor({1, 3, 7, 7})), ShapeError);
  CHECK_THROWS_AS(output_shape(pooled, {1, 2, 7}), ShapeError);
}

TEST_CASE("initialization is deterministic and fan-in scaled") {
  const ParamSet a = random_params(9), b = random_params(9), c = random_params(10);
  CHECK(a == b);
  CHECK_FALSE(a == c);
  const Tensor& w = a.at("net.0.w");
  const double bound = 1.0 / std::sqrt(2.0 * 9.0);
  for (Real v : w.values()) CHECK(std::abs(v) <= bound + 1e-7);
  for (Real v : a.at("net.0.b").values()) CHECK(v == 0);
  for (Real v : a.at("net.0.g").values()) CHECK(v == 1);
}

TEST_CASE("gradients of simple losses") {
  ParamSet p;
  p.add("v", Tensor({4}, std::vector<Real>{1, -2, 3, 0.5}));
  const ParamSet g = gradients([](const Bound& b) { return sum(square(b("v"))); }, p);
  for (std::size_t i = 0; i < 4; ++i) CHECK(g.at("v")[i] == doctest::Approx(2 * p.at("v")[i]));

  const ParamSet z = gradients([](const Bound& b) { return b.tape().constant(Tensor({1}, Real(3))); }, p);
  for (Real v : z.at("v").values()) CHECK(v == 0);

  CHECK_THROWS_AS(gradients([](const Bound& b) { return square(b("v")); }, p), ContractError);
}

TEST_CASE("adam: zero gradients leave parameters unchanged") {
  ParamSet p = random_params(1);
  const ParamSet before = p;
  Adam opt;
  for (int i = 0; i < 10; ++i) opt.step(p, p.zeros_like());
  for (const auto& [name, t] : p)
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(std::abs(t[i] - before.at(name)[i]) <= 1e-12);
}

TEST_CASE("adam: one step matches hand arithmetic") {
  ParamSet p;
  p.add("x", Tensor({2}, std::vector<Real>{1.0f, -0.5f}));
  ParamSet g;
  g.add("x", Tensor({2}, std::vector<Real>{0.2f, -4.0f}));
  Adam opt(AdamConfig{0.1});
  opt.step(p, g);
  // m = 0.1 g, v = 0.001 g^2; bias-corrected m/v = g, g^2; update = lr g / (|g| + eps).
  CHECK(p.at("x")[0] == doctest::Approx(1.0 - 0.1 * 0.2 / (0.2 + 1e-8)).epsilon(1e-6));
  CHECK(p.at("x")[1] == doctest::Approx(-0.5 + 0.1 * 4.0 / (4.0 + 1e-8)).epsilon(1e-6));
  CHECK(opt.first_moment().at("x")[0] == doctest::Approx(0.02));
  CHECK(opt.second_moment().at("x")[1] == doctest::Approx(0.016));
  g.at("x")[0] = 0.0f;
  opt.step(p, g);
  // Second step: m = 0.9*0.02 = 0.018, v = 0.999*4e-5; corrections 0.19 and 0.001999.
  const double m = 0.018 / 0.19, v = 0.999 * 4e-5 / (1 - 0.999 * 0.999);
  CHECK(p.at("x")[0] == doctest::Approx(0.9 - 0.1 * m / (std::sqrt(v) + 1e-8)).epsilon(1e-5));
  CHECK(opt.steps() == 2);
}

TEST_CASE("adam converges on a quadratic bowl") {
  ParamSet p;
  p.add("x", Tensor({3}, std::vector<Real>{2, -1, 0.5}));
  const Real target[] = {0.3f, 0.7f, -0.2f};
  Adam opt(AdamConfig{0.05});
  for (int i = 0; i < 500; ++i) {
    const ParamSet g = gradients(
        [&](const Bound& b) {
          Tensor t({3}, std::vector<Real>(target, target + 3));
          return sum(square(b("x") - b.tape().constant(std::move(t))));
        },
        p);
    opt.step(p, g);
  }
  for (int i = 0; i < 3; ++i) CHECK(std::abs(p.at("x")[i] - target[i]) < 1e-3);
}

TEST_CASE("adam rejects non-finite gradients without touching parameters") {
  ParamSet p = random_params(4);
  const ParamSet before = p;
  ParamSet g = p.zeros_like();
  g.at("net.0.w")[3] = std::numeric_limits<Real>::quiet_NaN();
  Adam opt;
  CHECK_THROWS_AS(opt.step(p, g), TrainingDivergence);
  CHECK(p == before);
  g.at("net.0.w")[3] = std::numeric_limits<Real>::infinity();
  CHECK_THROWS_AS(opt.step(p, g), TrainingDivergence);
}

TEST_CASE("100 optimizer steps are bitwise reproducible") {
  auto train = [] {
    ParamSet p = random_params(21);
    NetworkSpec spec;
    spec.conv(4, 3, 2).flatten().dense(5).dense(2, Activation::kNone);
    Adam opt;
    const Tensor x = filled({3, 2, 6, 6}, [](std::size_t i) { return std::sin(0.1 * double(i)); });
    for (int i = 0; i < 100; ++i) {
      opt.step(p, gradients([&](const Bound& b) { return mean(square(forward(spec, b, "net", b.tape().constant_ref(x)))); },
                            p));
      CHECK(p.all_finite());
    }
    return p;
  };
  CHECK(train() == train());
}

TEST_CASE("soft update") {
  ParamSet online, target;
  online.add("a", Tensor({3}, Real(1)));
  target.add("a", Tensor({3}, Real(0)));
  ParamSet t = target;
  soft_update(t, online, 0.5);
  for (Real v : t.at("a").values()) CHECK(v == doctest::Approx(0.5));
  t = target;
  soft_update(t, online, 1.0);
  CHECK(t == online);

  t = target;
  const double tau = 0.1;
  for (int k = 1; k <= 30; ++k) {
    soft_update(t, online, tau);
    CHECK(t.at("a")[0] == doctest::Approx(1.0 - std::pow(1.0 - tau, k)).epsilon(1e-5));
  }
  CHECK_THROWS_AS(soft_update(t, online, 0.0), ContractError);
  CHECK_THROWS_AS(soft_update(t, online, 1.5), ContractError);
  ParamSet other;
  other.add("a", Tensor({4}));
  CHECK_THROWS_AS(soft_update(t, other, 0.5), ShapeError);
}

TEST_CASE("checkpoint roundtrip and corruption detection") {
  const ParamSet p = random_params(5);
  const std::string bytes = encode_params(p);
  CHECK(decode_params(bytes) == p);
  CHECK(bytes.compare(0, 8, std::string("ARMCKPT\0", 8)) == 0);

  for (std::size_t cut : {std::size_t{0}, std::size_t{7}, std::size_t{20}, bytes.size() / 2, bytes.size() - 1}) {
    CHECK_THROWS_AS(decode_params(bytes.substr(0, cut)), FormatError);
  }
  for (std::size_t pos : {std::size_t{9}, std::size_t{30}, bytes.size() / 2, bytes.size() - 3}) {
    std::string flipped = bytes;
    flipped[pos] = static_cast<char>(flipped[pos] ^ 0x5a);
    CHECK_THROWS_AS(decode_params(flipped), FormatError);
  }

  const auto path = std::filesystem::temp_directory_path() / "arm_nn_test.ckpt";
  save_checkpoint(path, p);
  CHECK(load_checkpoint(path) == p);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_checkpoint(path), FormatError);
}
