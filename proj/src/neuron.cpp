#include "signn/neuron.hpp"

#include <cmath>
#include <fstream>

#include "signn/errors.hpp"

namespace signn::neuron {

using num::GradMode;
using num::Matrix;
using num::Param;
using num::Tape;
using num::Var;

namespace {
double logit(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ConfigError("decay rate must be in (0, 1)");
  return std::log(p / (1.0 - p));
}
}  // namespace

double BlifParams::tau() const { return num::sigmoid_scalar(raw_tau.value.data[0]); }
double BlifParams::gamma() const { return num::sigmoid_scalar(raw_gamma.value.data[0]); }

BlifParams make_params(double tau_eff, double gamma_eff, double v_reset,
                       double v_th_init, const std::string& prefix) {
  if (!(v_th_init > 0.0)) throw ConfigError("v_th_init must be positive");
  BlifParams p;
  p.raw_tau = Param(prefix + ".raw_tau", Matrix::scalar(logit(tau_eff)));
  p.raw_gamma = Param(prefix + ".raw_gamma", Matrix::scalar(logit(gamma_eff)));
  p.v_reset = v_reset;
  p.v_th_init = v_th_init;
  return p;
}

BlifState make_state(std::size_t rows, std::size_t cols, const BlifParams& p) {
  return BlifState{Matrix::full(rows, cols, p.v_reset),
                   Matrix::full(rows, cols, p.v_th_init)};
}

void SpikeTrace::record(const Matrix& spikes) {
  Step s;
  s.units = spikes.size();
  for (double v : spikes.data)
    if (v != 0.0) ++s.spikes;
  steps.push_back(s);
}

std::size_t SpikeTrace::total_spikes() const {
  std::size_t n = 0;
  for (const Step& s : steps) n += s.spikes;
  return n;
}

std::size_t SpikeTrace::total_units() const {
  std::size_t n = 0;
  for (const Step& s : steps) n += s.units;
  return n;
}

double SpikeTrace::mean_rate() const {
  const std::size_t units = total_units();
  return units == 0 ? 0.0
                    : static_cast<double>(total_spikes()) / static_cast<double>(units);
}

std::vector<double> firing_rate(const SpikeTrace& trace) {
  std::vector<double> rates;
  rates.reserve(trace.steps.size());
  for (const auto& s : trace.steps)
    rates.push_back(s.units == 0
                        ? 0.0
                        : static_cast<double>(s.spikes) / static_cast<double>(s.units));
  return rates;
}

void write_trace_csv(const SpikeTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write trace csv: " + path);
  out << "step,spikes,units,rate\n";
  const auto rates = firing_rate(trace);
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", rates[i]);
    out << (i + 1) << "," << trace.steps[i].spikes << "," << trace.steps[i].units
        << "," << buf << "\n";
  }
}

NeuronStepVars neuron_step(Tape& t, NeuronKind kind, Var input, Var v, Var v_th,
                           Var tau, Var gamma, double v_reset, const GradMode& mode) {
  // copy the shape up front: pushing nodes may reallocate the tape
  const std::size_t rows = t.value(v).rows;
  const std::size_t cols = t.value(v).cols;
  if (t.value(input).rows != rows || t.value(input).cols != cols)
    throw DimensionError("neuron_step: input " + t.value(input).shape_str() +
                         " vs state " + t.value(v).shape_str());

  // Integrate
  Var rest = t.constant(Matrix::full(rows, cols, v_reset));
  Var drive = t.add(t.sub(rest, v), input);
  Var v_tilde = t.add(v, t.scalar_mul(tau, drive));

  // Fire
  Var s = t.heaviside(t.sub(v_tilde, v_th), mode);
  if (kind == NeuronKind::Blif) {
    Var below = t.heaviside(t.sub(t.mul_scalar(v_th, -1.0), v_tilde), mode);
    s = t.add(s, below);
  }

  // Reset / Update see the spike pattern as data in Surrogate mode; the
  // trainable gradient path is the Fire surrogate feeding the gated features.
  Var s_ru = mode.is_smooth() ? s : t.stop_gradient(s);

  Var ones = t.constant(Matrix::ones(rows, cols));
  Var v_next = t.add(t.mul(v_tilde, t.sub(ones, s_ru)), t.mul_scalar(s_ru, v_reset));

  Var one = t.constant(Matrix::scalar(1.0));
  Var vth_next =
      t.add(t.scalar_mul(gamma, v_th), t.scalar_mul(t.sub(one, gamma), s_ru));

  return NeuronStepVars{s, v_next, vth_next};
}

namespace {

std::pair<Matrix, BlifState> value_step(NeuronKind kind, const Matrix& input,
                                        const BlifState& state, const BlifParams& params,
                                        const GradMode& mode) {
  Tape t;
  Var in = t.constant(input);
  Var v = t.constant(state.v);
  Var v_th = t.constant(state.v_th);
  Var tau = t.sigmoid(t.constant(params.raw_tau.value));
  Var gamma = t.sigmoid(t.constant(params.raw_gamma.value));
  NeuronStepVars out = neuron_step(t, kind, in, v, v_th, tau, gamma, params.v_reset, mode);
  return {t.value(out.spikes), BlifState{t.value(out.v), t.value(out.v_th)}};
}

}  // namespace

std::pair<Matrix, BlifState> blif_step(const Matrix& input, const BlifState& state,
                                       const BlifParams& params, const GradMode& mode) {
  return value_step(NeuronKind::Blif, input, state, params, mode);
}

std::pair<Matrix, BlifState> lif_step(const Matrix& input, const BlifState& state,
                                      const BlifParams& params, const GradMode& mode) {
  return value_step(NeuronKind::Lif, input, state, params, mode);
}

NeuronBank::NeuronBank(NeuronKind kind, std::size_t rows, std::size_t cols,
                       const std::string& name_prefix, double tau_init,
                       double gamma_init, double v_reset, double v_th_init)
    : kind_(kind), rows_(rows), cols_(cols),
      params_(make_params(tau_init, gamma_init, v_reset, v_th_init, name_prefix)),
      state_(make_state(rows, cols, params_)) {}

void NeuronBank::reset_state() {
  state_ = make_state(rows_, cols_, params_);
  trace_.clear();
}

void NeuronBank::begin_pass(Tape& t) {
  tau_var_ = t.sigmoid(t.param(params_.raw_tau));
  gamma_var_ = t.sigmoid(t.param(params_.raw_gamma));
  v_var_ = t.constant(Matrix::full(rows_, cols_, params_.v_reset));
  vth_var_ = t.constant(Matrix::full(rows_, cols_, params_.v_th_init));
}

Var NeuronBank::step(Tape& t, Var input, const GradMode& mode) {
  if (!tau_var_.valid()) throw ConfigError("NeuronBank::step before begin_pass");
  NeuronStepVars out = neuron_step(t, kind_, input, v_var_, vth_var_, tau_var_,
                                   gamma_var_, params_.v_reset, mode);
  v_var_ = out.v;
  vth_var_ = out.v_th;
  if (!mode.is_smooth()) trace_.record(t.value(out.spikes));
  state_.v = t.value(out.v);
  state_.v_th = t.value(out.v_th);
  return out.spikes;
}

}  // namespace signn::neuron
