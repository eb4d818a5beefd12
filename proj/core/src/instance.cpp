#include "railplan/instance.hpp"

#include <algorithm>
#include <numeric>

namespace railplan {

const char* toString(ContainerType t) { return t == ContainerType::T40 ? "T40" : "T53"; }
const char* toString(PlatformType p) { return p == PlatformType::P40 ? "P40" : "P53"; }

ContainerType parseContainerType(const std::string& s) {
  if (s == "T40") return ContainerType::T40;
  if (s == "T53") return ContainerType::T53;
  throw ReferenceError("unknown container type '" + s + "'");
}

PlatformType parsePlatformType(const std::string& s) {
  if (s == "P40") return PlatformType::P40;
  if (s == "P53") return PlatformType::P53;
  throw ReferenceError("unknown platform type '" + s + "'");
}

std::vector<int> TrainService::thresholdLegs() const {
  if (minLoadLegs) return *minLoadLegs;
  std::vector<int> all(legs.size());
  std::iota(all.begin(), all.end(), 0);
  return all;
}

int Instance::terminalIndex(const std::string& id) const {
  for (std::size_t i = 0; i < terminals.size(); ++i)
    if (terminals[i].id == id) return static_cast<int>(i);
  return -1;
}

bool Instance::hasExtras() const {
  return std::any_of(services.begin(), services.end(), [](const TrainService& s) { return s.isExtra(); });
}

}  // namespace railplan
