#pragma once

#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "railplan/generator.hpp"
#include "railplan/instance.hpp"

namespace railtest {

using namespace railplan;

struct StopSpec {
  int terminal;
  long arrival;    // -1: none
  long departure;  // -1: none
};

inline TrainService service(std::string id, std::initializer_list<StopSpec> stops, int capacity = 3000,
                            int distance = 300) {
  TrainService s;
  s.id = std::move(id);
  for (const StopSpec& st : stops) {
    Stop x;
    x.terminal = st.terminal;
    if (st.arrival >= 0) x.arrival = st.arrival;
    if (st.departure >= 0) x.departure = st.departure;
    s.stops.push_back(x);
  }
  for (std::size_t i = 1; i < s.stops.size(); ++i) s.legs.push_back({capacity, distance});
  return s;
}

inline Instance terminals(int n, std::vector<std::string> regions = {}) {
  Instance inst;
  for (int i = 0; i < n; ++i)
    inst.terminals.push_back({"T" + std::to_string(i + 1), "", i < static_cast<int>(regions.size()) ? regions[i] : "R"});
  return inst;
}

inline RailcarType car(const std::string& id, std::optional<int> fleet = std::nullopt) {
  for (RailcarType r : standardRailcars())
    if (r.id == id) {
      r.fleetLimit = fleet;
      return r;
    }
  throw std::invalid_argument("no standard car " + id);
}

inline Demand demand(std::string id, int o, int d, long release, long due, int volume,
                     ContainerType t = ContainerType::T40) {
  Demand k;
  k.id = std::move(id);
  k.origin = o;
  k.destination = d;
  k.release = release;
  k.due = due;
  k.volume = volume;
  k.type = t;
  return k;
}

// T1 -> T2 at 100, arriving 400; T2 -> T1 at 600, arriving 900.
inline Instance shuttle() {
  Instance inst = terminals(2);
  inst.services.push_back(service("out", {{0, -1, 100}, {1, 400, -1}}));
  inst.services.push_back(service("back", {{1, -1, 600}, {0, 900, -1}}));
  return inst;
}

}  // namespace railtest
