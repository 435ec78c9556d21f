#include <cmath>
#include <doctest.h>

#include "signn/errors.hpp"
#include "signn/neuron.hpp"
#include "signn/rng.hpp"
#include "test_helpers.hpp"

using namespace signn;
using neuron::BlifParams;
using neuron::BlifState;
using neuron::NeuronBank;
using neuron::NeuronKind;
using num::GradMode;
using num::Matrix;

namespace {
const GradMode kHard = GradMode::surrogate(1.0);
}

TEST_CASE("blif hand-worked positive spike") {
  // tau=0.5, V_reset=0, V=0, V_th=1, I=2 -> V~=1, S=1, V'=0, V_th'=1.0
  BlifParams p = neuron::make_params(0.5, 0.9);
  BlifState s = neuron::make_state(1, 1, p);
  auto [spikes, next] = neuron::blif_step(Matrix::scalar(2.0), s, p, kHard);
  CHECK(spikes.data[0] == 1.0);
  CHECK(next.v.data[0] == 0.0);
  CHECK(next.v_th.data[0] == 1.0);  // 0.9*1 + 0.1*1, exact
}

TEST_CASE("blif hand-worked negative-side spike") {
  // I=-3 -> V~=-1.5; theta(-1.5-1)=0, theta(-1-(-1.5))=theta(0.5)=1 -> S=1, V'=0
  BlifParams p = neuron::make_params(0.5, 0.9);
  BlifState s = neuron::make_state(1, 1, p);
  auto [spikes, next] = neuron::blif_step(Matrix::scalar(-3.0), s, p, kHard);
  CHECK(spikes.data[0] == 1.0);
  CHECK(next.v.data[0] == 0.0);
  CHECK(next.v_th.data[0] == 1.0);
}

TEST_CASE("resting equilibrium: zero input from reset stays put") {
  for (double tau : {0.1, 0.5, 0.9}) {
    BlifParams p = neuron::make_params(tau, 0.8);
    BlifState s = neuron::make_state(1, 1, p);
    auto [spikes, next] = neuron::blif_step(Matrix::scalar(0.0), s, p, kHard);
    CHECK(spikes.data[0] == 0.0);
    CHECK(next.v.data[0] == 0.0);
  }
}

TEST_CASE("lif: one-sided detection") {
  BlifParams p = neuron::make_params(0.5, 0.9);
  BlifState s = neuron::make_state(1, 1, p);
  auto [neg_spikes, n1] = neuron::lif_step(Matrix::scalar(-3.0), s, p, kHard);
  CHECK(neg_spikes.data[0] == 0.0);  // BLIF fires here, LIF does not
  CHECK(n1.v.data[0] == -1.5);

  auto [pos_spikes, n2] = neuron::lif_step(Matrix::scalar(2.0), s, p, kHard);
  auto [blif_spikes, n3] = neuron::blif_step(Matrix::scalar(2.0), s, p, kHard);
  CHECK(pos_spikes.data[0] == blif_spikes.data[0]);
  CHECK(n2.v.data[0] == n3.v.data[0]);
  CHECK(n2.v_th.data[0] == n3.v_th.data[0]);
}

TEST_CASE("lif: constant sub-threshold drive converges geometrically to I") {
  // V~ after t steps of I=0.4, tau=0.5 from rest: 0.4 * (1 - 0.5^t)
  BlifParams p = neuron::make_params(0.5, 0.999);  // threshold decay negligible here
  BlifState s = neuron::make_state(1, 1, p);
  for (int t = 1; t <= 10; ++t) {
    auto [spikes, next] = neuron::lif_step(Matrix::scalar(0.4), s, p, kHard);
    CHECK(spikes.data[0] == 0.0);
    CHECK(next.v.data[0] ==
          doctest::Approx(0.4 * (1.0 - std::pow(0.5, t))).epsilon(1e-12));
    s = next;
  }
  CHECK(s.v.data[0] < 0.4);
}

TEST_CASE("reset_state restores first-step behaviour and is idempotent") {
  NeuronBank bank(NeuronKind::Blif, 2, 3, "t");
  num::Rng rng(5);
  const Matrix input = test_helpers::random_matrix(2, 3, rng, -2.0, 2.0);

  auto [first_spikes, first_state] =
      neuron::blif_step(input, bank.state(), bank.params(), kHard);
  // push the bank through a few steps
  for (int i = 0; i < 4; ++i)
    bank.state() = neuron::blif_step(input, bank.state(), bank.params(), kHard).second;

  const double raw_tau_before = bank.params().raw_tau.value.data[0];
  bank.reset_state();
  auto [again_spikes, again_state] =
      neuron::blif_step(input, bank.state(), bank.params(), kHard);
  CHECK(again_spikes.data == first_spikes.data);
  CHECK(again_state.v.data == first_state.v.data);
  CHECK(again_state.v_th.data == first_state.v_th.data);

  bank.reset_state();
  bank.reset_state();  // twice == once
  CHECK(bank.state().v.data == neuron::make_state(2, 3, bank.params()).v.data);
  CHECK(bank.params().raw_tau.value.data[0] == raw_tau_before);
  CHECK(bank.trace().steps.empty());
}

TEST_CASE("randomized grid: threshold positivity, exclusivity, reset correctness") {
  num::Rng rng(31);
  for (int trial = 0; trial < 400; ++trial) {
    const double tau = rng.uniform(0.05, 0.95);
    const double gamma = rng.uniform(0.05, 0.95);
    const double v_th_init = rng.uniform(0.05, 1.0);
    BlifParams p = neuron::make_params(tau, gamma, 0.0, v_th_init);
    BlifState s = neuron::make_state(5, 5, p);
    const double cap = std::max(v_th_init, 1.0);
    for (int step = 0; step < 25; ++step) {
      const Matrix input = test_helpers::random_matrix(5, 5, rng, -4.0, 4.0);
      auto [spikes, next] = neuron::blif_step(input, s, p, kHard);
      for (std::size_t i = 0; i < spikes.data.size(); ++i) {
        const double sv = spikes.data[i];
        CHECK((sv == 0.0 || sv == 1.0));
        if (sv == 1.0) CHECK(next.v.data[i] == 0.0);  // reset correctness
        CHECK(next.v_th.data[i] > 0.0);
        CHECK(next.v_th.data[i] <= cap);
      }
      s = next;
    }
  }
}

TEST_CASE("bidirectional terms are mutually exclusive over the stated grid") {
  // V~ in [-5,5], V_th in (0,2]: at most one of theta(V~-V_th), theta(-V_th-V~) is 1
  for (double v_tilde = -5.0; v_tilde <= 5.0; v_tilde += 0.1) {
    for (double v_th = 0.05; v_th <= 2.0; v_th += 0.05) {
      const double up = v_tilde - v_th >= 0.0 ? 1.0 : 0.0;
      const double down = -v_th - v_tilde >= 0.0 ? 1.0 : 0.0;
      CHECK(up + down <= 1.0);

      // dynamics agree with the direct formula: arrange V~ = v_tilde exactly
      BlifParams p = neuron::make_params(0.5, 0.5, 0.0, v_th);
      BlifState s = neuron::make_state(1, 1, p);
      auto [spikes, next] = neuron::blif_step(Matrix::scalar(2.0 * v_tilde), s, p, kHard);
      CHECK(spikes.data[0] == up + down);
    }
  }
}

TEST_CASE("no-input decay is geometric to 1e-10 over 20 steps") {
  num::Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const double tau = rng.uniform(0.05, 0.95);
    const double v_reset = rng.uniform(-0.5, 0.5);
    BlifParams p = neuron::make_params(tau, 0.9, v_reset, /*v_th_init=*/10.0);
    BlifState s = neuron::make_state(1, 1, p);
    const double v0 = rng.uniform(-2.0, 2.0);
    s.v.data[0] = v0;
    const double eff_tau = p.tau();
    for (int step = 1; step <= 20; ++step) {
      auto [spikes, next] = neuron::blif_step(Matrix::scalar(0.0), s, p, kHard);
      REQUIRE(spikes.data[0] == 0.0);
      const double expect = std::pow(1.0 - eff_tau, step) * std::fabs(v0 - v_reset);
      CHECK(std::fabs(std::fabs(next.v.data[0] - v_reset) - expect) < 1e-10);
      s = next;
    }
  }
}

TEST_CASE("effective decay rates stay in (0,1) across the reachable raw range") {
  for (double raw : {-30.0, -3.0, 0.0, 3.0, 30.0}) {
    BlifParams p = neuron::make_params(0.5, 0.5);
    p.raw_tau.value.data[0] = raw;
    p.raw_gamma.value.data[0] = raw;
    CHECK(p.tau() > 0.0);
    CHECK(p.tau() < 1.0);
    CHECK(p.gamma() > 0.0);
    CHECK(p.gamma() < 1.0);
  }
}

TEST_CASE("firing_rate examples") {
  neuron::SpikeTrace trace;
  SUBCASE("empty trace gives empty series") { CHECK(neuron::firing_rate(trace).empty()); }
  SUBCASE("counts to rates") {
    Matrix none = Matrix::zeros(10, 30);
    Matrix all = Matrix::ones(10, 30);
    Matrix half = Matrix::zeros(10, 30);
    for (std::size_t i = 0; i < 150; ++i) half.data[i] = 1.0;
    trace.record(none);
    trace.record(none);
    trace.record(all);
    trace.record(half);
    const auto rates = neuron::firing_rate(trace);
    CHECK(rates == std::vector<double>{0.0, 0.0, 1.0, 0.5});
    CHECK(trace.mean_rate() == doctest::Approx(0.375));
  }
}

TEST_CASE("neuron_step rejects shape mismatches") {
  BlifParams p = neuron::make_params(0.5, 0.5);
  BlifState s = neuron::make_state(2, 2, p);
  CHECK_THROWS_AS(neuron::blif_step(Matrix::zeros(3, 2), s, p, kHard), DimensionError);
}

TEST_CASE("bank pass on tape matches value-level stepping") {
  NeuronBank bank(NeuronKind::Blif, 3, 4, "b");
  num::Rng rng(7);
  std::vector<Matrix> inputs;
  for (int i = 0; i < 5; ++i) inputs.push_back(test_helpers::random_matrix(3, 4, rng, -3, 3));

  num::Tape tape;
  bank.reset_state();
  bank.begin_pass(tape);
  std::vector<Matrix> tape_spikes;
  for (const Matrix& in : inputs)
    tape_spikes.push_back(tape.value(bank.step(tape, tape.constant(in), kHard)));

  BlifState s = neuron::make_state(3, 4, bank.params());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    auto [spikes, next] = neuron::blif_step(inputs[i], s, bank.params(), kHard);
    CHECK(spikes.data == tape_spikes[i].data);
    s = next;
  }
  CHECK(bank.trace().steps.size() == 5);
}
