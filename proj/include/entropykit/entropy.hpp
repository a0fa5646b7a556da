#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "entropykit/alphabet.hpp"
#include "entropykit/error.hpp"

namespace entropykit {

struct ProbabilityDistribution {
  std::vector<double> probs;
  std::size_t support_count = 1;  // observations behind the estimate
};

// Empirical location frequencies of a trajectory.
inline ProbabilityDistribution estimate_distribution(const Trajectory& trajectory,
                                                     const LocationAlphabet& alphabet) {
  if (trajectory.empty()) throw Error(ErrorKind::InsufficientData, "empty trajectory");
  check_states(trajectory, alphabet.size());
  std::vector<std::size_t> counts(alphabet.size(), 0);
  for (State s : trajectory.states) ++counts[s];
  ProbabilityDistribution dist;
  dist.probs.resize(alphabet.size());
  const auto total = static_cast<double>(trajectory.size());
  for (std::size_t i = 0; i < counts.size(); ++i) dist.probs[i] = static_cast<double>(counts[i]) / total;
  dist.support_count = trajectory.size();
  return dist;
}

// -sum p ln p over the nonzero entries, in nats.
//
// Terms are summed in ascending order of p, so relabeling the alphabet
// cannot change the result in the last bit.
inline double shannon_entropy(const std::vector<double>& probs) {
  std::vector<double> nonzero;
  nonzero.reserve(probs.size());
  for (double p : probs) {
    if (p > 0.0) nonzero.push_back(p);
  }
  std::sort(nonzero.begin(), nonzero.end());
  double h = 0.0;
  for (double p : nonzero) h -= p * std::log(p);
  return std::max(h, 0.0);
}

inline double shannon_entropy(const ProbabilityDistribution& dist) { return shannon_entropy(dist.probs); }

}  // namespace entropykit
