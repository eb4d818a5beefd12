#pragma once

#include <algorithm>
#include <cstdint>
#include <random>

#include "railplan/blocks.hpp"
#include "railplan/generator.hpp"
#include "railplan/instance.hpp"
#include "railplan/network.hpp"
#include "railplan/oracle.hpp"

namespace railtest {

using namespace railplan;

inline long long draw(std::mt19937_64& rng, long long lo, long long hi) {
  return lo + static_cast<long long>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

// Small random instance: 2-3 terminals, up to three services (one possibly an extra
// candidate), at most six containers and limited fleets of one or two car types.
inline Instance tinyInstance(std::uint64_t seed) {
  std::mt19937_64 rng(seed * 7919 + 17);
  Instance inst;
  inst.config.scheduleLength = 2880;
  inst.config.transferTime = 60;
  inst.config.mipGapTarget = 0.0;
  const Minutes T = inst.T();
  const int n = static_cast<int>(draw(rng, 2, 3));
  for (int i = 0; i < n; ++i)
    inst.terminals.push_back({"T" + std::to_string(i + 1), "", i == 0 ? "A" : "B"});

  const bool extra = draw(rng, 0, 1) == 1;
  const int regular = extra ? 2 : static_cast<int>(draw(rng, 2, 3));
  for (int s = 0; s < regular; ++s) {
    TrainService svc;
    svc.id = "S" + std::to_string(s + 1);
    // the second service runs the first one's route backwards so cars can come home
    std::vector<int> route;
    if (s == 1) {
      for (auto it = inst.services[0].stops.rbegin(); it != inst.services[0].stops.rend(); ++it) route.push_back(it->terminal);
    } else {
      route.push_back(static_cast<int>(draw(rng, 0, n - 1)));
      const int legs = n == 3 ? static_cast<int>(draw(rng, 1, 2)) : 1;
      for (int l = 0; l < legs; ++l) {
        int next = route.back();
        while (next == route.back() || (l == 1 && next == route[0])) next = static_cast<int>(draw(rng, 0, n - 1));
        route.push_back(next);
      }
    }
    int here = route[0];
    const int legs = static_cast<int>(route.size()) - 1;
    Minutes clock = draw(rng, 0, T - 1);
    svc.stops.push_back({here, std::nullopt, clock});
    for (int l = 0; l < legs; ++l) {
      int next = route[l + 1];
      svc.legs.push_back({static_cast<int>(draw(rng, 14, 42)) * 10, static_cast<int>(draw(rng, 100, 400))});
      clock += draw(rng, 120, 600);
      Stop st{next, clock % T, std::nullopt};
      if (l + 1 < legs) {
        clock += 60;
        st.departure = clock % T;
      }
      svc.stops.push_back(st);
      here = next;
    }
    inst.services.push_back(std::move(svc));
  }
  if (extra) {
    TrainService& base = inst.services[draw(rng, 0, regular - 1)];
    TrainService x = base;
    for (Leg& l : base.legs) l.capacity = static_cast<int>(draw(rng, 6, 14)) * 10;  // tight, so the extra matters
    x.id += "-x";
    x.kind = ServiceKind::ExtraCandidate;
    x.fixedCost = Money::fromDouble(static_cast<double>(draw(rng, 1, 6) * 5000));
    x.minLoadFraction = 0.5;
    inst.services.push_back(std::move(x));
  }

  int left = static_cast<int>(draw(rng, 2, 6));
  const int demands = static_cast<int>(draw(rng, 1, 3));
  const Money ndel = Money::fromDouble(draw(rng, 0, 1) ? 100000.0 : 15000.0);
  for (int k = 0; k < demands && left > 0; ++k) {
    Demand d;
    d.id = "d" + std::to_string(k + 1);
    if (draw(rng, 0, 4) > 0) {
      // ride along some regular service, possibly for only part of it
      const TrainService& svc = inst.services[draw(rng, 0, regular - 1)];
      const int a = static_cast<int>(draw(rng, 0, static_cast<long long>(svc.legs.size()) - 1));
      const int b = static_cast<int>(draw(rng, a + 1, static_cast<long long>(svc.legs.size())));
      d.origin = svc.stops[a].terminal;
      d.destination = svc.stops[b].terminal;
      d.release = (svc.departureAt(a) - draw(rng, 0, 300) + T) % T;
      d.due = (svc.arrivalAt(b) + draw(rng, -120, 600) + T) % T;
    } else {
      d.origin = static_cast<int>(draw(rng, 0, n - 1));
      do d.destination = static_cast<int>(draw(rng, 0, n - 1));
      while (d.destination == d.origin);
      d.release = draw(rng, 0, T - 1);
      d.due = (d.release + draw(rng, 600, T - 1)) % T;
    }
    if (d.due == d.release) d.due = (d.due + 1) % T;
    d.volume = k + 1 == demands ? left : static_cast<int>(draw(rng, 1, left));
    left -= d.volume;
    d.type = draw(rng, 0, 1) ? ContainerType::T53 : ContainerType::T40;
    d.outsourcingCost = ndel;
    inst.demands.push_back(d);
  }

  std::vector<RailcarType> all = standardRailcars();
  std::shuffle(all.begin(), all.end(), rng);
  const int types = static_cast<int>(draw(rng, 1, 2));
  for (int t = 0; t < types; ++t) {
    RailcarType car = all[t];
    car.fleetLimit = static_cast<int>(draw(rng, 1, 4));
    inst.railcars.push_back(car);
  }
  return inst;
}

// Seeds whose instance and catalog fit the oracle bounds.
inline bool fitsOracle(const Instance& inst, const BlockCatalog& cat, const oracle::TinyBounds& b = {}) {
  if (static_cast<int>(cat.blocks.size()) > b.maxBlocks) return false;
  for (const auto& kb : cat.demandBlocks)
    if (kb.empty()) return true;  // still a valid instance: outsourcing only
  return static_cast<int>(inst.services.size()) <= b.maxServices;
}

}  // namespace railtest
