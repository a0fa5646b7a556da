#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "entropykit/error.hpp"

namespace entropykit {

// Ordered set of location symbols; a symbol's position is its state index.
class LocationAlphabet {
 public:
  explicit LocationAlphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
    if (symbols_.size() < 2) {
      throw Error(ErrorKind::InvalidArgument, "alphabet needs at least two locations");
    }
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
      if (symbols_[i].empty()) {
        throw Error(ErrorKind::InvalidArgument, "empty location name in alphabet");
      }
      if (!index_.emplace(symbols_[i], i).second) {
        throw Error(ErrorKind::InvalidArgument, "duplicate location '" + symbols_[i] + "'");
      }
    }
  }

  // The five monitored rooms.
  static LocationAlphabet rooms() {
    return LocationAlphabet({"bathroom", "bedroom", "lounge", "kitchen", "hallway"});
  }

  std::size_t size() const noexcept { return symbols_.size(); }
  const std::vector<std::string>& symbols() const noexcept { return symbols_; }
  const std::string& symbol(std::size_t index) const { return symbols_.at(index); }

  std::optional<std::size_t> find(std::string_view symbol) const {
    const auto it = index_.find(std::string(symbol));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t index(std::string_view symbol) const {
    if (auto i = find(symbol)) return *i;
    throw Error(ErrorKind::InvalidArgument, "unknown location '" + std::string(symbol) + "'");
  }

  friend bool operator==(const LocationAlphabet& a, const LocationAlphabet& b) {
    return a.symbols_ == b.symbols_;
  }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, std::size_t> index_;
};

using State = std::size_t;

// Ordered sequence of alphabet indices.
struct Trajectory {
  std::vector<State> states;

  std::size_t size() const noexcept { return states.size(); }
  bool empty() const noexcept { return states.empty(); }

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

// Throws unless every state indexes into an alphabet of `n` symbols.
inline void check_states(const Trajectory& trajectory, std::size_t n) {
  for (State s : trajectory.states) {
    if (s >= n) {
      throw Error(ErrorKind::InvalidArgument,
                  "state " + std::to_string(s) + " outside alphabet of size " + std::to_string(n));
    }
  }
}

}  // namespace entropykit
