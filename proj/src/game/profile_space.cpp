#include "smpe/game/profile_space.hpp"

#include "smpe/errors.hpp"

namespace smpe {

ProfileSpace::ProfileSpace(std::vector<std::size_t> counts) : counts_(std::move(counts)) {
  strides_.assign(counts_.size(), 1);
  size_ = 1;
  for (std::size_t i = counts_.size(); i-- > 0;) {
    if (counts_[i] == 0) throw InvalidInput("player with no actions");
    strides_[i] = size_;
    size_ *= counts_[i];
  }
}

std::size_t ProfileSpace::index(std::span<const std::size_t> profile) const {
  if (profile.size() != counts_.size()) throw InvalidInput("profile has wrong number of players");
  std::size_t idx = 0;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (profile[i] >= counts_[i]) throw InvalidInput("action index out of range");
    idx += profile[i] * strides_[i];
  }
  return idx;
}

std::vector<std::size_t> ProfileSpace::decode(std::size_t index) const {
  std::vector<std::size_t> out(counts_.size());
  for (std::size_t i = 0; i < counts_.size(); ++i) out[i] = action_of(index, i);
  return out;
}

}  // namespace smpe
