#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "entropykit/alphabet.hpp"
#include "entropykit/entropy.hpp"
#include "entropykit/error.hpp"
#include "entropykit/random.hpp"

namespace entropykit {

// Row-stochastic first-order transition matrix with the counts it came from.
//
// Rows without any observed transition are uniform and marked unobserved.
class TransitionMatrix {
 public:
  TransitionMatrix(LocationAlphabet alphabet, std::vector<double> probs,
                   std::vector<std::uint64_t> counts, std::vector<bool> unobserved, double smoothing_alpha = 0.0)
      : alphabet_(std::move(alphabet)),
        probs_(std::move(probs)),
        counts_(std::move(counts)),
        unobserved_(std::move(unobserved)),
        alpha_(smoothing_alpha) {
    const std::size_t n = alphabet_.size();
    if (probs_.size() != n * n || counts_.size() != n * n || unobserved_.size() != n) {
      throw Error(ErrorKind::InvalidArgument, "transition matrix shape does not match alphabet");
    }
  }

  // Validates and wraps an explicit matrix (no counts). Rows must sum to 1
  // within 1e-9 and are then rescaled to sum to 1.
  static TransitionMatrix from_probabilities(LocationAlphabet alphabet,
                                             const std::vector<std::vector<double>>& rows) {
    const std::size_t n = alphabet.size();
    if (rows.size() != n) {
      throw Error(ErrorKind::InvalidArgument,
                  "expected " + std::to_string(n) + " rows, got " + std::to_string(rows.size()));
    }
    std::vector<double> probs(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::string where = "row " + std::to_string(i);
      if (rows[i].size() != n) throw Error(ErrorKind::InvalidArgument, where + ": wrong length");
      double sum = 0.0;
      for (double p : rows[i]) {
        if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
          throw Error(ErrorKind::InvalidArgument, where + ": entry outside [0, 1]");
        }
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-9) {
        throw Error(ErrorKind::InvalidArgument, where + ": sums to " + std::to_string(sum));
      }
      for (std::size_t j = 0; j < n; ++j) probs[i * n + j] = rows[i][j] / sum;
    }
    return TransitionMatrix(std::move(alphabet), std::move(probs), std::vector<std::uint64_t>(n * n, 0),
                            std::vector<bool>(n, false));
  }

  const LocationAlphabet& alphabet() const noexcept { return alphabet_; }
  std::size_t size() const noexcept { return alphabet_.size(); }
  double prob(std::size_t i, std::size_t j) const { return probs_[i * size() + j]; }
  std::uint64_t count(std::size_t i, std::size_t j) const { return counts_[i * size() + j]; }
  std::span<const double> row(std::size_t i) const { return {probs_.data() + i * size(), size()}; }
  bool row_unobserved(std::size_t i) const { return unobserved_[i]; }
  double smoothing_alpha() const noexcept { return alpha_; }
  const std::vector<double>& probabilities() const noexcept { return probs_; }
  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }

  std::uint64_t total_transitions() const {
    return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
  }

 private:
  LocationAlphabet alphabet_;
  std::vector<double> probs_;
  std::vector<std::uint64_t> counts_;
  std::vector<bool> unobserved_;
  double alpha_;
};

// Counts adjacent pairs inside each trajectory (never across trajectories).
// With smoothing_alpha > 0 every row becomes (count + alpha) / (row + n alpha).
inline TransitionMatrix fit_transition_matrix(std::span<const Trajectory> trajectories,
                                              const LocationAlphabet& alphabet,
                                              double smoothing_alpha = 0.0) {
  if (!(smoothing_alpha >= 0.0) || !std::isfinite(smoothing_alpha)) {
    throw Error(ErrorKind::InvalidArgument, "smoothing alpha must be finite and non-negative");
  }
  const std::size_t n = alphabet.size();
  std::vector<std::uint64_t> counts(n * n, 0);
  std::uint64_t total = 0;
  for (const auto& t : trajectories) {
    check_states(t, n);
    for (std::size_t k = 1; k < t.size(); ++k) {
      ++counts[t.states[k - 1] * n + t.states[k]];
      ++total;
    }
  }
  if (total == 0) throw Error(ErrorKind::InsufficientData, "no transitions to fit");

  std::vector<double> probs(n * n);
  std::vector<bool> unobserved(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t row = 0;
    for (std::size_t j = 0; j < n; ++j) row += counts[i * n + j];
    unobserved[i] = row == 0;
    const double denom = static_cast<double>(row) + static_cast<double>(n) * smoothing_alpha;
    for (std::size_t j = 0; j < n; ++j) {
      probs[i * n + j] = denom > 0.0 ? (static_cast<double>(counts[i * n + j]) + smoothing_alpha) / denom
                                     : 1.0 / static_cast<double>(n);
    }
  }
  return TransitionMatrix(alphabet, std::move(probs), std::move(counts), std::move(unobserved),
                          smoothing_alpha);
}

inline TransitionMatrix fit_transition_matrix(const Trajectory& trajectory, const LocationAlphabet& alphabet,
                                              double smoothing_alpha = 0.0) {
  return fit_transition_matrix(std::span<const Trajectory>(&trajectory, 1), alphabet, smoothing_alpha);
}

// Communicating-class structure of the transition graph (edges P_ij > 0).
struct ChainStructure {
  bool irreducible = false;
  std::size_t closed_classes = 0;
  std::size_t period = 1;  // lcm of the periods of the closed classes
};

inline ChainStructure analyze_chain(const TransitionMatrix& T) {
  const std::size_t n = T.size();
  std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<std::size_t> stack{s};
    reach[s][s] = 1;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v = 0; v < n; ++v) {
        if (T.prob(u, v) > 0.0 && !reach[s][v]) {
          reach[s][v] = 1;
          stack.push_back(v);
        }
      }
    }
  }

  ChainStructure out;
  std::vector<std::size_t> component(n, n);
  std::size_t components = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (component[s] != n) continue;
    std::vector<std::size_t> members;
    for (std::size_t v = 0; v < n; ++v) {
      if (reach[s][v] && reach[v][s]) {
        component[v] = components;
        members.push_back(v);
      }
    }
    ++components;

    bool closed = true;
    for (std::size_t u : members) {
      for (std::size_t v = 0; v < n; ++v) {
        if (T.prob(u, v) > 0.0 && component[v] != component[s]) closed = false;
      }
    }
    if (!closed) continue;
    ++out.closed_classes;

    // Period: gcd of level[u] + 1 - level[v] over edges inside the class.
    std::vector<long> level(n, -1);
    std::deque<std::size_t> queue{s};
    level[s] = 0;
    std::size_t g = 0;
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      for (std::size_t v : members) {
        if (T.prob(u, v) <= 0.0) continue;
        if (level[v] < 0) {
          level[v] = level[u] + 1;
          queue.push_back(v);
        } else {
          g = std::gcd(g, static_cast<std::size_t>(std::labs(level[u] + 1 - level[v])));
        }
      }
    }
    out.period = std::lcm(out.period, std::max<std::size_t>(g, 1));
  }
  out.irreducible = components == 1;
  return out;
}

struct StationaryResult {
  ProbabilityDistribution distribution;
  bool reducible = false;  // more than one communicating class
  bool periodic = false;   // some closed class has period > 1
  std::size_t iterations = 0;

  bool flagged() const noexcept { return reducible || periodic; }
};

// Power iteration from the uniform distribution until the L1 change is
// below 1e-12. For periodic chains the iterates cycle, so the average over
// one full cycle is tracked instead (the limit of the Cesaro average).
inline StationaryResult stationary_distribution(const TransitionMatrix& T,
                                                std::size_t max_iterations = 1'000'000) {
  const std::size_t n = T.size();
  const ChainStructure structure = analyze_chain(T);
  const std::size_t cycle = structure.period;
  if (cycle > 10'000) throw Error(ErrorKind::NoStationaryDistribution, "cycle length too large");

  StationaryResult result;
  result.reducible = !structure.irreducible;
  result.periodic = structure.period > 1;

  std::deque<std::vector<double>> history;
  history.emplace_back(n, 1.0 / static_cast<double>(n));
  for (std::size_t k = 1; k <= max_iterations; ++k) {
    const auto& prev = history.back();
    std::vector<double> next(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (prev[i] == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) next[j] += prev[i] * T.prob(i, j);
    }
    history.push_back(std::move(next));
    if (history.size() > cycle + 1) history.pop_front();
    if (history.size() < cycle + 1) continue;

    double change = 0.0;
    for (std::size_t j = 0; j < n; ++j) change += std::abs(history.back()[j] - history.front()[j]);
    change /= static_cast<double>(cycle);
    if (change < 1e-12) {
      std::vector<double> avg(n, 0.0);
      for (std::size_t h = 1; h < history.size(); ++h) {
        for (std::size_t j = 0; j < n; ++j) avg[j] += history[h][j];
      }
      const double sum = std::accumulate(avg.begin(), avg.end(), 0.0);
      for (double& a : avg) a /= sum;
      result.distribution.probs = std::move(avg);
      result.distribution.support_count = std::max<std::uint64_t>(T.total_transitions(), 1);
      result.iterations = k;
      return result;
    }
  }
  throw Error(ErrorKind::NoStationaryDistribution,
              "power iteration did not settle within " + std::to_string(max_iterations) + " iterations");
}

// -sum_i marginal_i sum_j P_ij ln P_ij, in nats per step.
inline double entropy_rate(const TransitionMatrix& T, const ProbabilityDistribution& marginal) {
  const std::size_t n = T.size();
  if (marginal.probs.size() != n) {
    throw Error(ErrorKind::InvalidArgument, "marginal does not match the transition matrix alphabet");
  }
  double rate = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (marginal.probs[i] == 0.0) continue;
    double row_entropy = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double p = T.prob(i, j);
      if (p > 0.0) row_entropy -= p * std::log(p);
    }
    rate += marginal.probs[i] * row_entropy;
  }
  return std::max(rate, 0.0);
}

namespace detail {

// Inverse-CDF draw; falls back to the last positive entry when rounding
// leaves u above the final cumulative sum.
inline State sample_index(std::span<const double> probs, double u) {
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t j = 0; j < probs.size(); ++j) {
    if (probs[j] <= 0.0) continue;
    last_positive = j;
    cumulative += probs[j];
    if (u < cumulative) return j;
  }
  return last_positive;
}

}  // namespace detail

// Draws `steps` states: the first from `start`, the rest from rows of T.
// Bit-reproducible for a given (T, start, steps, seed); see Rng.
inline Trajectory simulate_trajectory(const TransitionMatrix& T, const ProbabilityDistribution& start,
                                      std::size_t steps, std::uint64_t seed) {
  if (steps == 0) throw Error(ErrorKind::InvalidArgument, "steps must be positive");
  if (start.probs.size() != T.size()) {
    throw Error(ErrorKind::InvalidArgument, "start distribution does not match alphabet");
  }
  Rng rng(seed);
  Trajectory out;
  out.states.reserve(steps);
  out.states.push_back(detail::sample_index(start.probs, rng.uniform()));
  for (std::size_t k = 1; k < steps; ++k) {
    out.states.push_back(detail::sample_index(T.row(out.states.back()), rng.uniform()));
  }
  return out;
}

// Steady-state entropy production of an irreducible chain:
//   sigma = 1/2 sum_ij (pi_i P_ij - pi_j P_ji) ln(pi_i P_ij / pi_j P_ji).
inline double analytic_ep_rate(const TransitionMatrix& T) {
  const StationaryResult stat = stationary_distribution(T);
  if (stat.reducible) throw Error(ErrorKind::ReducibleChain, "entropy production needs an irreducible chain");
  const auto& pi = stat.distribution.probs;
  const std::size_t n = T.size();
  double sigma = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double forward = pi[i] * T.prob(i, j);
      const double backward = pi[j] * T.prob(j, i);
      if (forward > 0.0 && backward > 0.0) {
        sigma += (forward - backward) * std::log(forward / backward);
      } else if (forward > 0.0 || backward > 0.0) {
        throw Error(ErrorKind::InfiniteEntropyProduction,
                    "one-way transition between " + T.alphabet().symbol(i) + " and " + T.alphabet().symbol(j));
      }
    }
  }
  return std::max(sigma, 0.0);
}

inline nlohmann::ordered_json to_json(const TransitionMatrix& T) {
  const std::size_t n = T.size();
  nlohmann::ordered_json j;
  j["format"] = "entropykit.transition_matrix";
  j["version"] = 1;
  j["alphabet"] = T.alphabet().symbols();
  auto counts = nlohmann::ordered_json::array();
  auto probs = nlohmann::ordered_json::array();
  std::vector<std::size_t> unobserved;
  for (std::size_t i = 0; i < n; ++i) {
    auto crow = nlohmann::ordered_json::array();
    auto prow = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < n; ++k) {
      crow.push_back(T.count(i, k));
      prow.push_back(T.prob(i, k));
    }
    counts.push_back(std::move(crow));
    probs.push_back(std::move(prow));
    if (T.row_unobserved(i)) unobserved.push_back(i);
  }
  j["counts"] = std::move(counts);
  j["probs"] = std::move(probs);
  j["flags"] = {{"unobserved_rows", unobserved}};
  j["smoothing_alpha"] = T.smoothing_alpha();
  return j;
}

// Accepts the output of to_json, or a bare {"alphabet", "probs"} spec.
// A spec without counts goes through from_probabilities validation.
inline TransitionMatrix transition_matrix_from_json(const nlohmann::json& j) {
  try {
    LocationAlphabet alphabet(j.at("alphabet").get<std::vector<std::string>>());
    const auto rows = j.at("probs").get<std::vector<std::vector<double>>>();
    if (!j.contains("counts")) return TransitionMatrix::from_probabilities(std::move(alphabet), rows);

    const std::size_t n = alphabet.size();
    const auto count_rows = j.at("counts").get<std::vector<std::vector<std::uint64_t>>>();
    if (rows.size() != n || count_rows.size() != n) {
      throw Error(ErrorKind::InvalidArgument, "matrix rows do not match alphabet");
    }
    std::vector<double> probs;
    std::vector<std::uint64_t> counts;
    for (std::size_t i = 0; i < n; ++i) {
      if (rows[i].size() != n || count_rows[i].size() != n) {
        throw Error(ErrorKind::InvalidArgument, "row " + std::to_string(i) + ": wrong length");
      }
      probs.insert(probs.end(), rows[i].begin(), rows[i].end());
      counts.insert(counts.end(), count_rows[i].begin(), count_rows[i].end());
    }
    std::vector<bool> unobserved(n, false);
    if (j.contains("flags")) {
      for (auto i : j["flags"].value("unobserved_rows", std::vector<std::size_t>{})) {
        if (i >= n) throw Error(ErrorKind::InvalidArgument, "unobserved row index out of range");
        unobserved[i] = true;
      }
    }
    return TransitionMatrix(std::move(alphabet), std::move(probs), std::move(counts), std::move(unobserved),
                            j.value("smoothing_alpha", 0.0));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("transition matrix JSON: ") + e.what());
  }
}

}  // namespace entropykit
