#pragma once

#include <string>
#include <vector>

#include "railplan/blocks.hpp"
#include "railplan/instance.hpp"
#include "railplan/milp.hpp"
#include "railplan/network.hpp"

namespace railplan {

enum class Formulation { SsndRm, UnrestrictedFleet, UnrestrictedLoading };
inline constexpr Formulation kFormulations[] = {Formulation::SsndRm, Formulation::UnrestrictedFleet,
                                                Formulation::UnrestrictedLoading};
const char* toString(Formulation f);
Formulation parseFormulation(const std::string& s);

// Row families, one per constraint group of the model.
enum class RowFamily {
  DemandCover,
  FlowLink,
  LoadCount,
  PlatformUpper,
  PlatformLower,
  MixedTop53,
  BlockLength,
  PoolBalance,
  Allocation,
  FleetCap,
  RegularCapacity,
  ExtraCapacity,
  ExtraMinLoad,
};
inline constexpr int kRowFamilyCount = 13;
const char* toString(RowFamily f);

// Loading pattern on one platform: a single container or an unordered pair.
struct LoadPattern {
  PlatformType platform;
  ContainerType first;
  std::optional<ContainerType> second;  // first <= second when present
};
// Admissible patterns; on P40 a 53-ft box never sits alone or on the bottom.
std::vector<LoadPattern> loadPatterns();

struct BuiltModel {
  milp::ModelSpec model;
  milp::VariableRegistry registry;
  Formulation formulation = Formulation::SsndRm;
  std::string instanceFingerprint;
  std::string catalogFingerprint;

  // Row id -> family tag, for --explain.
  std::string explainJson() const;
};

std::string instanceFingerprint(const Instance& inst);
std::string catalogFingerprint(const Instance& inst, const BlockCatalog& cat);

// Objective coefficients.
Money extraServiceCost(const TrainService& svc, const CostParams& c);
Money blockFlowCost(const BlockPath& b, const CompatibleBlock& kb, const CostParams& c);
Money emptyCarCost(const BlockPath& b, const CostParams& c);
Money allocationCost(const RailcarType& car, const CostParams& c);
// ceil(eta/2) for P40 cars, 0 for P53 cars.
int mixedPairCapacity(const RailcarType& car);

BuiltModel buildSsndRm(const Instance& inst, const BlockCatalog& cat, const TimeSpaceNetwork& net);
BuiltModel buildUnrestrictedFleet(const Instance& inst, const BlockCatalog& cat, const TimeSpaceNetwork& net);
BuiltModel buildUnrestrictedLoading(const Instance& inst, const BlockCatalog& cat, const TimeSpaceNetwork& net);
BuiltModel buildFormulation(Formulation f, const Instance& inst, const BlockCatalog& cat, const TimeSpaceNetwork& net);

}  // namespace railplan
