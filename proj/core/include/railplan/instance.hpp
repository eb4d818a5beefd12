#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "railplan/money.hpp"

namespace railplan {

using Minutes = std::int64_t;

inline constexpr Minutes kWeekMinutes = 10080;
inline constexpr int kSchemaVersion = 1;

// (to - from) mod T, always in [0, T).
constexpr Minutes cyclicDuration(Minutes from, Minutes to, Minutes T) {
  Minutes d = (to - from) % T;
  return d < 0 ? d + T : d;
}

enum class ContainerType { T40, T53 };
enum class PlatformType { P40, P53 };

inline constexpr ContainerType kContainerTypes[] = {ContainerType::T40, ContainerType::T53};
inline constexpr PlatformType kPlatformTypes[] = {PlatformType::P40, PlatformType::P53};

constexpr int containerLength(ContainerType t) { return t == ContainerType::T40 ? 40 : 53; }
constexpr int platformLength(PlatformType p) { return p == PlatformType::P40 ? 40 : 53; }
constexpr int index(ContainerType t) { return t == ContainerType::T40 ? 0 : 1; }
constexpr int index(PlatformType p) { return p == PlatformType::P40 ? 0 : 1; }

const char* toString(ContainerType t);
const char* toString(PlatformType p);
ContainerType parseContainerType(const std::string& s);
PlatformType parsePlatformType(const std::string& s);

struct Terminal {
  std::string id;
  std::string name;
  std::string region;
  bool operator==(const Terminal&) const = default;
};

struct RailcarType {
  std::string id;
  PlatformType platform = PlatformType::P40;
  int platformCount = 1;
  int length = 0;                  // feet
  std::optional<int> fleetLimit;   // unbounded when empty
  bool operator==(const RailcarType&) const = default;
};

enum class ServiceKind { Regular, ExtraCandidate };

struct Stop {
  int terminal = -1;
  std::optional<Minutes> arrival;
  std::optional<Minutes> departure;
  bool operator==(const Stop&) const = default;
};

// Leg i runs from stops[i] to stops[i+1].
struct Leg {
  int capacity = 0;  // feet
  int distance = 0;  // km
  bool operator==(const Leg&) const = default;
};

struct TrainService {
  std::string id;
  ServiceKind kind = ServiceKind::Regular;
  std::vector<Stop> stops;
  std::vector<Leg> legs;
  std::optional<Money> fixedCost;
  double minLoadFraction = 0.5;
  std::optional<std::vector<int>> minLoadLegs;  // all legs when empty

  bool isExtra() const { return kind == ServiceKind::ExtraCandidate; }
  Minutes departureAt(int stop) const { return *stops.at(stop).departure; }
  Minutes arrivalAt(int stop) const { return *stops.at(stop).arrival; }
  std::vector<int> thresholdLegs() const;
  bool operator==(const TrainService&) const = default;
};

struct Demand {
  std::string id;
  int origin = -1;
  int destination = -1;
  Minutes release = 0;
  Minutes due = 0;
  int volume = 0;
  ContainerType type = ContainerType::T40;
  Money outsourcingCost = Money::fromTicks(100000 * Money::kScale);
  bool operator==(const Demand&) const = default;
};

struct CostParams {
  Money build = Money::fromDouble(100);
  Money trans = Money::fromDouble(10020);
  Money wait = Money::fromDouble(1);
  Money bord = Money::fromDouble(1000);
  Money km = Money::fromDouble(0.75);
  Money late = Money::fromDouble(1);
  Money alloc = Money::fromDouble(200);
  Money ndel = Money::fromDouble(100000);
  Money fix = Money::fromDouble(700000);
  Money var = Money::fromDouble(0.01);
  bool operator==(const CostParams&) const = default;
};

struct PlanningConfig {
  Minutes scheduleLength = kWeekMinutes;
  Minutes transferTime = 0;
  double warmStartEpsilon = 1e-5;
  double mipGapTarget = 0.025;
  double timeLimit = 3600.0;  // seconds
  int solverThreads = 1;
  bool operator==(const PlanningConfig&) const = default;
};

struct Instance {
  int schemaVersion = kSchemaVersion;
  std::vector<Terminal> terminals;
  std::vector<TrainService> services;
  std::vector<Demand> demands;
  std::vector<RailcarType> railcars;
  CostParams costs;
  PlanningConfig config;

  Minutes T() const { return config.scheduleLength; }
  int terminalIndex(const std::string& id) const;  // -1 when absent
  bool hasExtras() const;
  bool operator==(const Instance&) const = default;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ReferenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
  ValidationError(std::string rule, const std::string& what)
      : std::runtime_error(what), rule(std::move(rule)) {}
  std::string rule;
};

}  // namespace railplan
