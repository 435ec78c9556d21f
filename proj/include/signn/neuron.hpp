#pragma once

#include <string>
#include <utility>
#include <vector>

#include "signn/matrix.hpp"
#include "signn/tape.hpp"

namespace signn::neuron {

enum class NeuronKind { Blif, Lif };

/// Learnable decay factors plus the fixed reset/threshold constants.  The
/// decay rates live as unconstrained reals; the effective values are their
/// sigmoids, so tau and gamma stay in (0, 1) throughout training.
struct BlifParams {
  num::Param raw_tau;    // 1x1
  num::Param raw_gamma;  // 1x1
  double v_reset = 0.0;
  double v_th_init = 1.0;

  double tau() const;
  double gamma() const;
};

/// raw values chosen so the effective decay rates equal the given ones.
BlifParams make_params(double tau_eff, double gamma_eff, double v_reset = 0.0,
                       double v_th_init = 1.0, const std::string& prefix = "blif");

/// Membrane voltage and adaptive threshold per unit.
struct BlifState {
  num::Matrix v;
  num::Matrix v_th;
};

BlifState make_state(std::size_t rows, std::size_t cols, const BlifParams& p);

/// Per-step spike totals for firing-rate accounting.
struct SpikeTrace {
  struct Step {
    std::size_t spikes = 0;
    std::size_t units = 0;
  };
  std::vector<Step> steps;

  void clear() { steps.clear(); }
  /// Counts nonzero entries of a {0,1}-valued spike matrix.
  void record(const num::Matrix& spikes);
  std::size_t total_spikes() const;
  std::size_t total_units() const;
  /// total spikes / total unit-steps; 0 on an empty trace.
  double mean_rate() const;
};

/// Per-step spikes/units; empty trace gives an empty series.
std::vector<double> firing_rate(const SpikeTrace& trace);

/// CSV `step,spikes,units,rate`.
void write_trace_csv(const SpikeTrace& trace, const std::string& path);

struct NeuronStepVars {
  num::Var spikes;  // differentiable through the Fire surrogate
  num::Var v;
  num::Var v_th;
};

/// One neuron step on the tape.
///
///   Integrate: v~ = v + tau * (v_reset - v + input)
///   Fire:      s  = H(v~ - v_th) [+ H(-v_th - v~) for BLIF]
///   Reset:     v' = v~ * (1 - s) + v_reset * s
///   Update:    v_th' = gamma * v_th + (1 - gamma) * s
///
/// tau/gamma are 1x1 vars holding the effective decay rates.  In Surrogate
/// mode the spike matrix entering Reset/Update is detached (gradient crosses
/// only the Fire surrogate); in Smooth mode every path stays differentiable so
/// reverse mode matches finite differences of the smooth forward exactly.
NeuronStepVars neuron_step(num::Tape& t, NeuronKind kind, num::Var input,
                           num::Var v, num::Var v_th, num::Var tau, num::Var gamma,
                           double v_reset, const num::GradMode& mode);

/// Value-level steps (thin tapes over neuron_step; dynamics live in one place).
std::pair<num::Matrix, BlifState> blif_step(const num::Matrix& input,
                                            const BlifState& state,
                                            const BlifParams& params,
                                            const num::GradMode& mode);
std::pair<num::Matrix, BlifState> lif_step(const num::Matrix& input,
                                           const BlifState& state,
                                           const BlifParams& params,
                                           const num::GradMode& mode);

/// A bank of neurons (one per node-feature unit) owned by one sequence pass.
/// begin_pass binds the learnable decays to a tape and rewinds state; step
/// advances the state vars and records the spike trace.
class NeuronBank {
 public:
  NeuronBank(NeuronKind kind, std::size_t rows, std::size_t cols,
             const std::string& name_prefix, double tau_init = 0.7,
             double gamma_init = 0.7, double v_reset = 0.0, double v_th_init = 1.0);

  NeuronKind kind() const { return kind_; }
  BlifParams& params() { return params_; }
  const BlifParams& params() const { return params_; }
  BlifState& state() { return state_; }
  SpikeTrace& trace() { return trace_; }
  const SpikeTrace& trace() const { return trace_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  /// v := v_reset, v_th := v_th_init, trace cleared; learnables untouched.
  void reset_state();

  void begin_pass(num::Tape& t);
  num::Var step(num::Tape& t, num::Var input, const num::GradMode& mode);

 private:
  NeuronKind kind_;
  std::size_t rows_, cols_;
  BlifParams params_;
  BlifState state_;
  SpikeTrace trace_;
  num::Var tau_var_, gamma_var_, v_var_, vth_var_;
};

/// reset_state on a bank (spec-level name).
inline void reset_state(NeuronBank& bank) { bank.reset_state(); }

}  // namespace signn::neuron
