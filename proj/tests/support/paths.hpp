#pragma once

#include <algorithm>
#include <deque>
#include <set>
#include <vector>

#include "railplan/instance.hpp"

// Straightforward path enumeration straight from the schedule, for cross-checks.
namespace railtest {

using namespace railplan;

struct RawLeg {
  int service;
  int leg;
  bool operator<(const RawLeg& o) const { return std::tie(service, leg) < std::tie(o.service, o.leg); }
  bool operator==(const RawLeg& o) const = default;
};

inline Minutes mod(Minutes a, Minutes T) { return ((a % T) + T) % T; }
inline Minutes depTime(const Instance& in, RawLeg l) { return *in.services[l.service].stops[l.leg].departure; }
inline Minutes arrTime(const Instance& in, RawLeg l) { return *in.services[l.service].stops[l.leg + 1].arrival; }
inline int fromOf(const Instance& in, RawLeg l) { return in.services[l.service].stops[l.leg].terminal; }
inline int toOf(const Instance& in, RawLeg l) { return in.services[l.service].stops[l.leg + 1].terminal; }

inline std::vector<RawLeg> allLegs(const Instance& in) {
  std::vector<RawLeg> v;
  for (int s = 0; s < static_cast<int>(in.services.size()); ++s)
    for (int l = 0; l < static_cast<int>(in.services[s].legs.size()); ++l) v.push_back({s, l});
  return v;
}

// Minutes between the end of `a` and the start of `b` when `b` may follow `a`; -1 otherwise.
inline Minutes connection(const Instance& in, RawLeg a, RawLeg b, bool* transfer = nullptr) {
  if (toOf(in, a) != fromOf(in, b)) return -1;
  Minutes gap = mod(depTime(in, b) - arrTime(in, a), in.T());
  bool stay = a.service == b.service && a.leg + 1 == b.leg;
  if (transfer) *transfer = !stay;
  if (!stay && gap < in.config.transferTime) return -1;
  return gap;
}

inline Minutes legMinutes(const Instance& in, RawLeg l) { return mod(arrTime(in, l) - depTime(in, l), in.T()); }

// Breadth-first enumeration of simple leg sequences.
inline std::set<std::vector<RawLeg>> bfsBlocks(const Instance& in, int maxTransfers) {
  struct Partial {
    std::vector<RawLeg> legs;
    Minutes elapsed;
    int transfers;
  };
  std::set<std::vector<RawLeg>> out;
  std::deque<Partial> q;
  for (RawLeg l : allLegs(in))
    if (fromOf(in, l) != toOf(in, l) && legMinutes(in, l) < in.T()) q.push_back({{l}, legMinutes(in, l), 0});
  while (!q.empty()) {
    Partial p = q.front();
    q.pop_front();
    out.insert(p.legs);
    for (RawLeg n : allLegs(in)) {
      bool transfer = false;
      Minutes gap = connection(in, p.legs.back(), n, &transfer);
      if (gap < 0) continue;
      if (transfer && p.transfers == maxTransfers) continue;
      Minutes e = p.elapsed + gap + legMinutes(in, n);
      if (e >= in.T()) continue;
      bool revisit = toOf(in, n) == fromOf(in, p.legs.front());
      for (RawLeg l : p.legs) revisit = revisit || toOf(in, l) == toOf(in, n);
      if (revisit) continue;
      Partial q2 = p;
      q2.legs.push_back(n);
      q2.elapsed = e;
      q2.transfers += transfer;
      q.push_back(q2);
    }
  }
  return out;
}

// Earliest arrival at `terminal` after boarding leg `first`, any leg sequence (each leg at most once).
inline Minutes bruteTravel(const Instance& in, RawLeg first, int terminal) {
  Minutes best = -1;
  std::vector<RawLeg> used{first};
  auto dfs = [&](auto&& self, Minutes elapsed) -> void {
    RawLeg last = used.back();
    if (toOf(in, last) == terminal && (best < 0 || elapsed < best)) best = elapsed;
    for (RawLeg n : allLegs(in)) {
      if (std::find(used.begin(), used.end(), n) != used.end()) continue;
      Minutes gap = connection(in, last, n);
      if (gap < 0) continue;
      used.push_back(n);
      self(self, elapsed + gap + legMinutes(in, n));
      used.pop_back();
    }
  };
  dfs(dfs, legMinutes(in, first));
  return best;
}

// Shortest release-to-arrival time of a demand, -1 when unreachable.
inline Minutes bruteShortest(const Instance& in, const Demand& d) {
  Minutes best = -1;
  for (RawLeg l : allLegs(in)) {
    if (fromOf(in, l) != d.origin) continue;
    Minutes t = bruteTravel(in, l, d.destination);
    if (t < 0) continue;
    t += mod(depTime(in, l) - d.release, in.T());
    if (best < 0 || t < best) best = t;
  }
  return best;
}

}  // namespace railtest
