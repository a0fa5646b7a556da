#pragma once

#include <chrono>
#include <cstdint>
#include <ostream>
#include <string>

#include "entropykit/markov.hpp"
#include "entropykit/time.hpp"

namespace entropykit {

// Synthetic event corpus: every day of `weeks` weeks gets
// `events_per_period` daytime events, evenly spaced from 06:00, and as
// many night events, evenly spaced from 18:00 and wrapping past midnight
// onto the same civil date. Locations are drawn from the day or night
// chain; each (day, period) uses its own derived seed.
struct SyntheticHousehold {
  std::string household_id = "h1";
  sys_days first_day{std::chrono::year{2021} / 1 / 4};  // a Monday
  std::size_t weeks = 20;
  std::size_t events_per_period = 48;
  std::uint64_t seed = 0;
};

inline void write_synthetic_events(std::ostream& out, const SyntheticHousehold& spec, const TransitionMatrix& day_chain,
                                   const TransitionMatrix& night_chain, bool header = true) {
  using namespace std::chrono;
  if (spec.events_per_period == 0) throw Error(ErrorKind::InvalidArgument, "events_per_period must be positive");
  if (header) out << "household_id,timestamp,location\n";
  const std::size_t n = day_chain.size();
  const ProbabilityDistribution uniform{std::vector<double>(n, 1.0 / static_cast<double>(n)), 1};
  const seconds spacing{12 * 3600 / static_cast<long>(spec.events_per_period)};
  for (std::size_t d = 0; d < spec.weeks * 7; ++d) {
    const local_days day{(spec.first_day + days{static_cast<long>(d)}).time_since_epoch()};
    for (int period = 0; period < 2; ++period) {
      const TransitionMatrix& chain = period == 0 ? day_chain : night_chain;
      const auto seed = spec.seed * 1'000'003ULL + d * 2 + static_cast<std::uint64_t>(period);
      const Trajectory t = simulate_trajectory(chain, uniform, spec.events_per_period, seed);
      for (std::size_t i = 0; i < t.size(); ++i) {
        seconds offset = (period == 0 ? hours{6} : hours{18}) + spacing * static_cast<long>(i);
        if (offset >= hours{24}) offset -= hours{24};
        out << spec.household_id << ',' << format_civil(day + offset) << ','
            << chain.alphabet().symbol(t.states[i]) << '\n';
      }
    }
  }
}

}  // namespace entropykit
