#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace smpe {

/// Row-major enumeration of action profiles: player 0 is the most significant
/// digit, so profiles are listed in lexicographic order.
class ProfileSpace {
 public:
  ProfileSpace() = default;
  explicit ProfileSpace(std::vector<std::size_t> counts);

  std::size_t players() const noexcept { return counts_.size(); }
  std::size_t count(std::size_t player) const { return counts_.at(player); }
  const std::vector<std::size_t>& counts() const noexcept { return counts_; }
  std::size_t size() const noexcept { return size_; }

  std::size_t index(std::span<const std::size_t> profile) const;
  std::vector<std::size_t> decode(std::size_t index) const;
  std::size_t action_of(std::size_t index, std::size_t player) const {
    return (index / strides_[player]) % counts_[player];
  }
  /// Index of the profile obtained by replacing `player`'s action.
  std::size_t with_action(std::size_t index, std::size_t player, std::size_t action) const {
    return index - action_of(index, player) * strides_[player] + action * strides_[player];
  }

 private:
  std::vector<std::size_t> counts_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
};

}  // namespace smpe
