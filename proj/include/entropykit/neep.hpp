#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "entropykit/alphabet.hpp"
#include "entropykit/error.hpp"
#include "entropykit/random.hpp"

namespace entropykit {

// Neural estimator for entropy production.
//
// A score h(a, b) is computed by embedding both states, concatenating the
// two vectors and passing them through a softplus MLP with a scalar
// output. The entropy-production increment of a transition a -> b is the
// antisymmetric part dS(a, b) = h(a, b) - h(b, a), and training maximizes
//   J = mean over observed transitions of dS - exp(-dS).
// At the optimum, the mean of dS along a trajectory estimates the
// steady-state entropy production per step.

enum class Optimizer { SgdMomentum, AdaptiveMoments };

inline std::string_view to_string(Optimizer o) {
  return o == Optimizer::SgdMomentum ? "sgd_momentum" : "adaptive_moments";
}

inline Optimizer parse_optimizer(std::string_view name) {
  if (name == "sgd_momentum") return Optimizer::SgdMomentum;
  if (name == "adaptive_moments") return Optimizer::AdaptiveMoments;
  throw Error(ErrorKind::InvalidArgument, "unknown optimizer '" + std::string(name) + "'");
}

struct TrainConfig {
  std::size_t embedding_width = 8;
  std::vector<std::size_t> hidden{64, 64};
  double learning_rate = 1e-3;
  std::size_t batch_size = 256;
  std::size_t epochs = 200;
  std::uint64_t seed = 0;
  Optimizer optimizer = Optimizer::AdaptiveMoments;
  double momentum = 0.9;
  double holdout_fraction = 0.1;
  std::size_t min_transitions = 100;

  void validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorKind::InvalidArgument, what); };
    if (embedding_width == 0) fail("embedding width must be positive");
    for (auto h : hidden) {
      if (h == 0) fail("hidden layer widths must be positive");
    }
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) fail("learning rate must be positive");
    if (batch_size == 0) fail("batch size must be positive");
    if (epochs == 0) fail("epochs must be positive");
    if (!(momentum >= 0.0 && momentum < 1.0)) fail("momentum must lie in [0, 1)");
    if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) fail("holdout fraction must lie in (0, 1)");
  }
};

inline nlohmann::ordered_json to_json(const TrainConfig& c) {
  nlohmann::ordered_json j;
  j["embedding_width"] = c.embedding_width;
  j["hidden"] = c.hidden;
  j["learning_rate"] = c.learning_rate;
  j["batch_size"] = c.batch_size;
  j["epochs"] = c.epochs;
  j["seed"] = c.seed;
  j["optimizer"] = to_string(c.optimizer);
  j["momentum"] = c.momentum;
  j["holdout_fraction"] = c.holdout_fraction;
  j["min_transitions"] = c.min_transitions;
  return j;
}

inline TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.embedding_width = j.value("embedding_width", c.embedding_width);
  c.hidden = j.value("hidden", c.hidden);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.epochs = j.value("epochs", c.epochs);
  c.seed = j.value("seed", c.seed);
  c.optimizer = parse_optimizer(j.value("optimizer", std::string(to_string(c.optimizer))));
  c.momentum = j.value("momentum", c.momentum);
  c.holdout_fraction = j.value("holdout_fraction", c.holdout_fraction);
  c.min_transitions = j.value("min_transitions", c.min_transitions);
  return c;
}

struct Transition {
  State from = 0;
  State to = 0;
};

// Transitions tallied by ordered pair; the objective and its gradient only
// depend on these counts.
struct PairCounts {
  explicit PairCounts(std::size_t states) : n(states), counts(states * states, 0) {}

  void add(Transition t) {
    ++counts[t.from * n + t.to];
    ++total;
  }
  void clear() {
    std::fill(counts.begin(), counts.end(), 0);
    total = 0;
  }
  std::uint64_t at(State a, State b) const { return counts[a * n + b]; }

  std::size_t n;
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;
};

inline std::vector<Transition> transitions_of(std::span<const Trajectory> trajectories, std::size_t n) {
  std::vector<Transition> out;
  for (const auto& t : trajectories) {
    check_states(t, n);
    for (std::size_t k = 1; k < t.size(); ++k) out.push_back({t.states[k - 1], t.states[k]});
  }
  return out;
}

namespace detail {

inline double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }
inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace detail

class NeepModel {
 public:
  // All parameters live in one flat vector: the n x d embedding table
  // first, then for every dense layer its row-major weights followed by
  // its biases.
  NeepModel(LocationAlphabet alphabet, std::size_t embedding_width, std::vector<std::size_t> hidden,
            std::vector<double> parameters)
      : alphabet_(std::move(alphabet)), d_(embedding_width), hidden_(std::move(hidden)) {
    if (d_ == 0) throw Error(ErrorKind::InvalidArgument, "embedding width must be positive");
    std::size_t offset = alphabet_.size() * d_;
    std::size_t in = 2 * d_;
    std::vector<std::size_t> widths = hidden_;
    widths.push_back(1);
    for (std::size_t out : widths) {
      if (out == 0) throw Error(ErrorKind::InvalidArgument, "layer widths must be positive");
      layers_.push_back({offset, offset + in * out, in, out});
      offset += in * out + out;
      in = out;
    }
    if (parameters.size() != offset) {
      throw Error(ErrorKind::InvalidArgument, "expected " + std::to_string(offset) + " parameters, got " +
                                                  std::to_string(parameters.size()));
    }
    params_ = std::move(parameters);
  }

  // Embeddings uniform in [-0.1, 0.1]; hidden weights uniform with scale
  // 1/sqrt(fan_in); biases zero. The output layer starts at zero so that
  // dS is identically 0 and J = -1 before training, unless
  // `zero_output_layer` is false.
  static NeepModel initialize(const LocationAlphabet& alphabet, std::size_t embedding_width,
                              const std::vector<std::size_t>& hidden, Rng& rng,
                              bool zero_output_layer = true) {
    NeepModel m(alphabet, embedding_width, hidden, std::vector<double>(parameter_count(alphabet.size(), embedding_width, hidden), 0.0));
    for (std::size_t i = 0; i < alphabet.size() * embedding_width; ++i) m.params_[i] = rng.uniform(-0.1, 0.1);
    for (std::size_t l = 0; l < m.layers_.size(); ++l) {
      const auto& layer = m.layers_[l];
      if (l + 1 == m.layers_.size() && zero_output_layer) break;
      const double scale = 1.0 / std::sqrt(static_cast<double>(layer.in));
      for (std::size_t k = 0; k < layer.in * layer.out; ++k) m.params_[layer.weights + k] = rng.uniform(-scale, scale);
    }
    return m;
  }

  static std::size_t parameter_count(std::size_t states, std::size_t d, const std::vector<std::size_t>& hidden) {
    std::size_t total = states * d;
    std::size_t in = 2 * d;
    for (std::size_t out : hidden) {
      total += in * out + out;
      in = out;
    }
    return total + in + 1;
  }

  const LocationAlphabet& alphabet() const noexcept { return alphabet_; }
  std::size_t states() const noexcept { return alphabet_.size(); }
  std::size_t embedding_width() const noexcept { return d_; }
  const std::vector<std::size_t>& hidden() const noexcept { return hidden_; }
  std::size_t parameter_count() const noexcept { return params_.size(); }
  std::span<double> parameters() noexcept { return params_; }
  std::span<const double> parameters() const noexcept { return params_; }

  // h(a, b).
  double score(State a, State b) const {
    Workspace ws(*this);
    return forward(a, b, ws);
  }

  // h(a, b) evaluated without caching in an arbitrary floating type; used
  // by the finite-difference gradient check in extended precision.
  template <typename Scalar>
  Scalar score_as(State a, State b) const {
    check(a);
    check(b);
    std::vector<Scalar> x(2 * d_);
    for (std::size_t k = 0; k < d_; ++k) {
      x[k] = static_cast<Scalar>(params_[a * d_ + k]);
      x[d_ + k] = static_cast<Scalar>(params_[b * d_ + k]);
    }
    std::vector<Scalar> y;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      const auto& layer = layers_[l];
      y.assign(layer.out, Scalar(0));
      for (std::size_t o = 0; o < layer.out; ++o) {
        Scalar z = static_cast<Scalar>(params_[layer.biases + o]);
        for (std::size_t i = 0; i < layer.in; ++i) z += static_cast<Scalar>(params_[layer.weights + o * layer.in + i]) * x[i];
        if (l + 1 == layers_.size()) return z;
        y[o] = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
      }
      x.swap(y);
    }
    return Scalar(0);
  }

  double delta_s(State a, State b) const {
    check(a);
    check(b);
    if (a == b) return 0.0;
    return score(a, b) - score(b, a);
  }

  // grad += coefficient * d h(a, b) / d theta.
  void accumulate_score_gradient(State a, State b, double coefficient, std::span<double> grad) const {
    Workspace ws(*this);
    forward(a, b, ws);
    std::vector<double> delta{coefficient};
    std::vector<double> below;
    for (std::size_t l = layers_.size(); l-- > 0;) {
      const auto& layer = layers_[l];
      const std::vector<double>& input = ws.activations[l];
      for (std::size_t o = 0; o < layer.out; ++o) {
        const double g = delta[o];
        if (g == 0.0) continue;
        double* gw = grad.data() + layer.weights + o * layer.in;
        for (std::size_t i = 0; i < layer.in; ++i) gw[i] += g * input[i];
        grad[layer.biases + o] += g;
      }
      below.assign(layer.in, 0.0);
      for (std::size_t o = 0; o < layer.out; ++o) {
        const double g = delta[o];
        if (g == 0.0) continue;
        const double* w = params_.data() + layer.weights + o * layer.in;
        for (std::size_t i = 0; i < layer.in; ++i) below[i] += g * w[i];
      }
      if (l > 0) {
        const std::vector<double>& pre = ws.preactivations[l - 1];
        for (std::size_t i = 0; i < layer.in; ++i) below[i] *= detail::sigmoid(pre[i]);
      }
      delta.swap(below);
    }
    for (std::size_t k = 0; k < d_; ++k) {
      grad[a * d_ + k] += delta[k];
      grad[b * d_ + k] += delta[d_ + k];
    }
  }

 private:
  struct Layer {
    std::size_t weights;
    std::size_t biases;
    std::size_t in;
    std::size_t out;
  };

  struct Workspace {
    explicit Workspace(const NeepModel& m)
        : activations(m.layers_.size()), preactivations(m.layers_.size()) {}
    std::vector<std::vector<double>> activations;     // input of layer l
    std::vector<std::vector<double>> preactivations;  // pre-softplus output of layer l
  };

  void check(State s) const {
    if (s >= states()) throw Error(ErrorKind::InvalidArgument, "state index out of range");
  }

  double forward(State a, State b, Workspace& ws) const {
    check(a);
    check(b);
    auto& x = ws.activations[0];
    x.resize(2 * d_);
    std::copy_n(params_.data() + a * d_, d_, x.begin());
    std::copy_n(params_.data() + b * d_, d_, x.begin() + static_cast<std::ptrdiff_t>(d_));
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      const auto& layer = layers_[l];
      const auto& input = ws.activations[l];
      auto& pre = ws.preactivations[l];
      pre.resize(layer.out);
      for (std::size_t o = 0; o < layer.out; ++o) {
        const double* w = params_.data() + layer.weights + o * layer.in;
        double z = params_[layer.biases + o];
        for (std::size_t i = 0; i < layer.in; ++i) z += w[i] * input[i];
        pre[o] = z;
      }
      if (l + 1 == layers_.size()) return pre[0];
      auto& next = ws.activations[l + 1];
      next.resize(layer.out);
      for (std::size_t o = 0; o < layer.out; ++o) next[o] = detail::softplus(pre[o]);
    }
    return 0.0;  // unreachable: there is always an output layer
  }

  LocationAlphabet alphabet_;
  std::size_t d_;
  std::vector<std::size_t> hidden_;
  std::vector<Layer> layers_;
  std::vector<double> params_;
};

inline double delta_s(const NeepModel& model, State s, State s_next) { return model.delta_s(s, s_next); }

// J over tallied transitions.
inline double objective(const NeepModel& model, const PairCounts& pairs) {
  if (pairs.total == 0) throw Error(ErrorKind::InvalidArgument, "objective needs a non-empty batch");
  const std::size_t n = pairs.n;
  double sum = 0.0;
  for (State a = 0; a < n; ++a) {
    sum -= static_cast<double>(pairs.at(a, a));  // dS(a, a) = 0 contributes 0 - e^0
    for (State b = a + 1; b < n; ++b) {
      const std::uint64_t ab = pairs.at(a, b);
      const std::uint64_t ba = pairs.at(b, a);
      if (ab == 0 && ba == 0) continue;
      const double ds = model.delta_s(a, b);
      if (ab) sum += static_cast<double>(ab) * (ds - std::exp(-ds));
      if (ba) sum += static_cast<double>(ba) * (-ds - std::exp(ds));
    }
  }
  return sum / static_cast<double>(pairs.total);
}

inline double objective(const NeepModel& model, std::span<const Transition> batch) {
  PairCounts pairs(model.states());
  for (const auto& t : batch) {
    if (t.from >= pairs.n || t.to >= pairs.n) throw Error(ErrorKind::InvalidArgument, "state index out of range");
    pairs.add(t);
  }
  return objective(model, pairs);
}

// Returns J and overwrites `grad` with dJ/dtheta.
inline double objective_gradient(const NeepModel& model, const PairCounts& pairs, std::span<double> grad) {
  if (pairs.total == 0) throw Error(ErrorKind::InvalidArgument, "objective needs a non-empty batch");
  std::fill(grad.begin(), grad.end(), 0.0);
  const std::size_t n = pairs.n;
  const double total = static_cast<double>(pairs.total);
  double sum = 0.0;
  for (State a = 0; a < n; ++a) {
    sum -= static_cast<double>(pairs.at(a, a));
    for (State b = a + 1; b < n; ++b) {
      const std::uint64_t ab = pairs.at(a, b);
      const std::uint64_t ba = pairs.at(b, a);
      if (ab == 0 && ba == 0) continue;
      const double ds = model.delta_s(a, b);
      const double e_minus = std::exp(-ds);
      const double e_plus = std::exp(ds);
      if (ab) sum += static_cast<double>(ab) * (ds - e_minus);
      if (ba) sum += static_cast<double>(ba) * (-ds - e_plus);
      // dJ/d dS(a,b), with dS(b,a) = -dS(a,b).
      const double coefficient =
          (static_cast<double>(ab) * (1.0 + e_minus) - static_cast<double>(ba) * (1.0 + e_plus)) / total;
      model.accumulate_score_gradient(a, b, coefficient, grad);
      model.accumulate_score_gradient(b, a, -coefficient, grad);
    }
  }
  return sum / total;
}

// Mean dS over the consecutive pairs of one trajectory. Pairs are tallied
// first and summed in a fixed order, so a reversed trajectory yields
// exactly the negated value.
inline double ep_rate(const NeepModel& model, const Trajectory& trajectory) {
  if (trajectory.size() < 2) throw Error(ErrorKind::InsufficientData, "ep_rate needs at least two states");
  check_states(trajectory, model.states());
  const std::size_t n = model.states();
  PairCounts pairs(n);
  for (std::size_t k = 1; k < trajectory.size(); ++k) pairs.add({trajectory.states[k - 1], trajectory.states[k]});
  double sum = 0.0;
  for (State a = 0; a < n; ++a) {
    for (State b = a + 1; b < n; ++b) {
      const auto net = static_cast<std::int64_t>(pairs.at(a, b)) - static_cast<std::int64_t>(pairs.at(b, a));
      if (net != 0) sum += static_cast<double>(net) * model.delta_s(a, b);
    }
  }
  return sum / static_cast<double>(pairs.total);
}

struct TrainLog {
  std::vector<double> train_objective;    // entry 0 is before the first update
  std::vector<double> holdout_objective;  // same indexing
  std::size_t best_epoch = 0;
  std::size_t train_transitions = 0;
  std::size_t holdout_transitions = 0;
};

struct TrainResult {
  NeepModel model;
  TrainLog log;
};

// Gradient ascent on J. A seeded fraction of transitions is held out and
// the parameters from the epoch with the highest held-out J are returned.
inline TrainResult train(std::span<const Trajectory> trajectories, const LocationAlphabet& alphabet,
                         const TrainConfig& config) {
  config.validate();
  const std::size_t n = alphabet.size();
  std::vector<Transition> all = transitions_of(trajectories, n);
  if (all.size() < config.min_transitions) {
    throw Error(ErrorKind::InsufficientData, std::to_string(all.size()) + " transitions, need " +
                                                 std::to_string(config.min_transitions));
  }
  if (all.size() < 2) throw Error(ErrorKind::InsufficientData, "need at least two transitions");

  Rng rng(config.seed);
  NeepModel model = NeepModel::initialize(alphabet, config.embedding_width, config.hidden, rng);

  rng.shuffle(std::span<Transition>(all));
  auto holdout_size = static_cast<std::size_t>(std::llround(config.holdout_fraction * static_cast<double>(all.size())));
  holdout_size = std::clamp<std::size_t>(holdout_size, 1, all.size() - 1);
  PairCounts holdout(n), training(n);
  for (std::size_t k = 0; k < holdout_size; ++k) holdout.add(all[k]);
  std::vector<Transition> train_set(all.begin() + static_cast<std::ptrdiff_t>(holdout_size), all.end());
  for (const auto& t : train_set) training.add(t);

  TrainLog log;
  log.train_transitions = train_set.size();
  log.holdout_transitions = holdout_size;
  log.train_objective.push_back(objective(model, training));
  log.holdout_objective.push_back(objective(model, holdout));
  std::vector<double> best = std::vector<double>(model.parameters().begin(), model.parameters().end());
  double best_holdout = log.holdout_objective.back();

  const std::size_t p = model.parameter_count();
  std::vector<double> grad(p), first(p, 0.0), second(p, 0.0);
  std::uint64_t step = 0;
  PairCounts batch(n);
  constexpr double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;

  auto diverged = [](std::size_t epoch, const std::string& what) {
    return Error(ErrorKind::Diverged, what + " at epoch " + std::to_string(epoch));
  };

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.shuffle(std::span<Transition>(train_set));
    for (std::size_t start = 0; start < train_set.size(); start += config.batch_size) {
      const std::size_t stop = std::min(train_set.size(), start + config.batch_size);
      batch.clear();
      for (std::size_t k = start; k < stop; ++k) batch.add(train_set[k]);
      const double j = objective_gradient(model, batch, grad);
      if (!std::isfinite(j)) throw diverged(epoch, "non-finite objective");
      ++step;
      auto theta = model.parameters();
      if (config.optimizer == Optimizer::SgdMomentum) {
        for (std::size_t k = 0; k < p; ++k) {
          if (!std::isfinite(grad[k])) throw diverged(epoch, "non-finite gradient");
          first[k] = config.momentum * first[k] + grad[k];
          theta[k] += config.learning_rate * first[k];
        }
      } else {
        const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
        const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
        for (std::size_t k = 0; k < p; ++k) {
          if (!std::isfinite(grad[k])) throw diverged(epoch, "non-finite gradient");
          first[k] = beta1 * first[k] + (1.0 - beta1) * grad[k];
          second[k] = beta2 * second[k] + (1.0 - beta2) * grad[k] * grad[k];
          theta[k] += config.learning_rate * (first[k] / c1) / (std::sqrt(second[k] / c2) + adam_eps);
        }
      }
    }
    const double jt = objective(model, training);
    const double jh = objective(model, holdout);
    if (!std::isfinite(jt) || !std::isfinite(jh)) throw diverged(epoch, "non-finite objective");
    log.train_objective.push_back(jt);
    log.holdout_objective.push_back(jh);
    if (jh > best_holdout) {
      best_holdout = jh;
      log.best_epoch = epoch;
      std::copy(model.parameters().begin(), model.parameters().end(), best.begin());
    }
  }
  std::copy(best.begin(), best.end(), model.parameters().begin());
  return {std::move(model), std::move(log)};
}

// J accumulated in long double throughout.
inline long double objective_extended(const NeepModel& model, const PairCounts& pairs) {
  const std::size_t n = pairs.n;
  long double sum = 0.0L;
  for (State a = 0; a < n; ++a) {
    sum -= static_cast<long double>(pairs.at(a, a));
    for (State b = a + 1; b < n; ++b) {
      const std::uint64_t ab = pairs.at(a, b);
      const std::uint64_t ba = pairs.at(b, a);
      if (ab == 0 && ba == 0) continue;
      const long double ds = model.score_as<long double>(a, b) - model.score_as<long double>(b, a);
      sum += static_cast<long double>(ab) * (ds - std::exp(-ds));
      sum += static_cast<long double>(ba) * (-ds - std::exp(ds));
    }
  }
  return sum / static_cast<long double>(pairs.total);
}

using GradientFn = std::function<std::vector<double>(const NeepModel&, const PairCounts&)>;

inline std::vector<double> analytic_gradient(const NeepModel& model, const PairCounts& pairs) {
  std::vector<double> grad(model.parameter_count());
  objective_gradient(model, pairs, grad);
  return grad;
}

// Largest relative error between an analytic gradient and central finite
// differences over a random subset of parameters (all of them when there
// are fewer than `sample_size`). Relative error uses the denominator
// max(|analytic|, |numeric|, 1e-8); entries where both are below 1e-12
// count as exact. The differenced objective is evaluated in long double:
// in double, round-off alone is about 1e-11 at epsilon = 1e-5, which is
// comparable to the smallest gradients of a freshly initialized model.
inline double gradient_check(const NeepModel& model, std::span<const Transition> batch, double epsilon,
                             std::uint64_t seed = 0, std::size_t sample_size = 128,
                             const GradientFn& gradient = analytic_gradient) {
  if (batch.empty()) throw Error(ErrorKind::InvalidArgument, "gradient check needs a non-empty batch");
  if (!(epsilon >= 1e-7 && epsilon <= 1e-3)) throw Error(ErrorKind::InvalidArgument, "epsilon must lie in [1e-7, 1e-3]");
  PairCounts pairs(model.states());
  for (const auto& t : batch) pairs.add(t);
  const std::vector<double> analytic = gradient(model, pairs);

  std::vector<std::size_t> indices(model.parameter_count());
  for (std::size_t k = 0; k < indices.size(); ++k) indices[k] = k;
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(indices));
  indices.resize(std::min(indices.size(), std::max<std::size_t>(sample_size, 100)));

  NeepModel probe = model;
  double worst = 0.0;
  for (std::size_t k : indices) {
    const double original = probe.parameters()[k];
    probe.parameters()[k] = original + epsilon;
    const long double up = objective_extended(probe, pairs);
    probe.parameters()[k] = original - epsilon;
    const long double down = objective_extended(probe, pairs);
    probe.parameters()[k] = original;
    const auto numeric = static_cast<double>((up - down) / (2.0L * static_cast<long double>(epsilon)));
    const double a = analytic[k];
    if (std::abs(a) < 1e-12 && std::abs(numeric) < 1e-12) continue;
    const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
    worst = std::max(worst, std::abs(a - numeric) / denom);
  }
  return worst;
}

inline nlohmann::ordered_json to_json(const NeepModel& model, const std::optional<TrainConfig>& config = std::nullopt) {
  nlohmann::ordered_json j;
  j["format"] = "entropykit.neep";
  j["version"] = 1;
  j["alphabet"] = model.alphabet().symbols();
  j["embedding_width"] = model.embedding_width();
  j["hidden"] = model.hidden();
  j["parameters"] = std::vector<double>(model.parameters().begin(), model.parameters().end());
  if (config) {
    j["config"] = to_json(*config);
    j["seed"] = config->seed;
  }
  return j;
}

inline NeepModel neep_model_from_json(const nlohmann::json& j) {
  try {
    if (j.value("format", std::string()) != "entropykit.neep") {
      throw Error(ErrorKind::InvalidArgument, "not a NEEP checkpoint");
    }
    if (j.at("version").get<int>() != 1) throw Error(ErrorKind::InvalidArgument, "unsupported checkpoint version");
    return NeepModel(LocationAlphabet(j.at("alphabet").get<std::vector<std::string>>()),
                     j.at("embedding_width").get<std::size_t>(), j.at("hidden").get<std::vector<std::size_t>>(),
                     j.at("parameters").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("NEEP checkpoint: ") + e.what());
  }
}

}  // namespace entropykit
