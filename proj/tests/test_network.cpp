#include <doctest.h>

#include <map>

#include "railplan/generator.hpp"
#include "railplan/network.hpp"
#include "support/fixtures.hpp"
#include "support/paths.hpp"

using namespace railplan;
using namespace railtest;

namespace {

int countKind(const TimeSpaceNetwork& net, NodeKind k, int terminal = -1) {
  int n = 0;
  for (const auto& x : net.nodes) n += x.kind == k && (terminal < 0 || x.terminal == terminal);
  return n;
}

struct Counts {
  std::size_t nodes = 0;
  std::size_t arcs = 0;
};

// Node and arc totals worked out from the schedule alone.
Counts expectedCounts(const Instance& in) {
  std::map<int, int> events, departures;
  int deps = 0, arrs = 0, legs = 0, handling = 0;
  for (const auto& s : in.services) {
    legs += static_cast<int>(s.legs.size());
    handling += static_cast<int>(s.stops.size()) - 2;
    for (const auto& st : s.stops) {
      if (st.departure) ++deps, ++events[st.terminal], ++departures[st.terminal];
      if (st.arrival) ++arrs, ++events[st.terminal];
    }
  }
  int transfers = 0;
  for (int si = 0; si < static_cast<int>(in.services.size()); ++si)
    for (std::size_t i = 0; i < in.services[si].stops.size(); ++i) {
      const Stop& a = in.services[si].stops[i];
      if (!a.arrival) continue;
      for (int sj = 0; sj < static_cast<int>(in.services.size()); ++sj)
        for (std::size_t j = 0; j < in.services[sj].stops.size(); ++j) {
          const Stop& d = in.services[sj].stops[j];
          if (!d.departure || d.terminal != a.terminal || (si == sj && i == j)) continue;
          if (mod(*d.departure - *a.arrival, in.T()) >= in.config.transferTime) ++transfers;
        }
    }
  Counts c;
  c.nodes = 6 * deps + 5 * arrs + in.terminals.size();
  int pool = 0, din = 0;
  for (auto [t, n] : events) pool += n;
  for (auto [t, n] : departures) din += n;
  c.arcs = legs + handling + 6 * deps + 6 * arrs + pool + din + transfers + in.demands.size();
  return c;
}

}  // namespace

TEST_CASE("two-stop service") {
  Instance in = terminals(2);
  in.services.push_back(service("S", {{0, -1, 100}, {1, 400, -1}}));
  TimeSpaceNetwork net = buildNetwork(in);
  CHECK(countKind(net, NodeKind::TIN) == 1);
  CHECK(countKind(net, NodeKind::TOUT) == 1);
  CHECK(countKind(net, NodeKind::PoolMinus, 0) == 1);
  CHECK(countKind(net, NodeKind::PoolPlus, 0) == 0);
  CHECK(countKind(net, NodeKind::PoolPlus, 1) == 1);
  CHECK(countKind(net, NodeKind::PoolMinus, 1) == 0);
}

TEST_CASE("three-stop service") {
  Instance in = terminals(3);
  in.services.push_back(service("S", {{0, -1, 100}, {1, 400, 460}, {2, 800, -1}}));
  TimeSpaceNetwork net = buildNetwork(in);
  CHECK(countKind(net, NodeKind::TIN) == 2);
  CHECK(countKind(net, NodeKind::TOUT) == 2);
  CHECK(countKind(net, NodeKind::PoolPlus, 1) == 1);
  CHECK(countKind(net, NodeKind::PoolMinus, 1) == 1);
  REQUIRE(net.handlingArcs[0][1] >= 0);
  CHECK(net.arc(net.handlingArcs[0][1]).kind == ArcKind::TrainHandling);
}

TEST_CASE("pool sequence follows time with arrivals first on ties") {
  Instance in = terminals(2);
  in.services.push_back(service("a", {{0, -1, 500}, {1, 800, -1}}));
  in.services.push_back(service("b", {{1, -1, 100}, {0, 500, -1}}));
  TimeSpaceNetwork net = buildNetwork(in);
  const auto& seq = net.terminals[0].poolSequence;
  REQUIRE(seq.size() == 2);
  CHECK(net.node(seq[0]).kind == NodeKind::PoolPlus);
  CHECK(net.node(seq[1]).kind == NodeKind::PoolMinus);
  CHECK(net.previousPoolNode(seq[0]) == seq[1]);
}

TEST_CASE("node and arc counts match a direct count") {
  SizeParams p;
  p.terminals = 3;
  p.services = 3;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Instance in = generateSyntheticNetwork(p, seed);
    in.demands.push_back(demand("d", 0, 2, 0, 5000, 3));
    TimeSpaceNetwork net = buildNetwork(in);
    Counts c = expectedCounts(in);
    CHECK(net.nodes.size() == c.nodes);
    CHECK(net.arcs.size() == c.arcs);
  }
  Instance desk = generateDeskInstance({}, 3);
  TimeSpaceNetwork net = buildNetwork(desk);
  CHECK(net.nodes.size() == expectedCounts(desk).nodes);
  CHECK(net.arcs.size() == expectedCounts(desk).arcs);
}

TEST_CASE("departure options for a demand") {
  Instance in = shuttle();
  TimeSpaceNetwork net = buildNetwork(in);

  SUBCASE("release at the departure time") {
    auto opts = dinNodesForDemand(net, demand("d", 0, 1, 100, 1000, 1));
    REQUIRE(opts.size() == 1);
    CHECK(opts[0].wait == 0);
    CHECK(opts[0].node == net.departures[0][0].container);
  }
  SUBCASE("terminal without departures") {
    Instance one = terminals(3);
    one.services.push_back(service("S", {{0, -1, 100}, {1, 400, -1}}));
    auto opts = dinNodesForDemand(buildNetwork(one), demand("d", 2, 1, 0, 1000, 1));
    CHECK(opts.empty());
  }
  SUBCASE("window shorter than any trip") {
    auto opts = dinNodesForDemand(net, demand("d", 0, 1, 100, 399, 1));
    CHECK(opts.empty());
    CHECK(bruteShortest(in, demand("d", 0, 1, 100, 399, 1)) == 300);
  }
  SUBCASE("window exactly the trip") {
    CHECK(dinNodesForDemand(net, demand("d", 0, 1, 100, 400, 1)).size() == 1);
  }
}

TEST_CASE("shortest path times") {
  Instance in = shuttle();
  TimeSpaceNetwork net = buildNetwork(in);
  CHECK(shortestPathTime(net, demand("d", 0, 1, 100, 1000, 1)) == 300);
  CHECK(shortestPathTime(net, demand("d", 0, 1, 50, 1000, 1)) == 350);

  Instance three = terminals(3);
  three.services.push_back(service("S", {{0, -1, 100}, {1, 400, -1}}));
  CHECK(shortestPathTime(buildNetwork(three), demand("d", 0, 2, 0, 1000, 1)) == kUnreachable);

  SUBCASE("transfer route") {
    Instance t = terminals(3);
    t.config.transferTime = 60;
    t.services.push_back(service("A", {{0, -1, 100}, {1, 400, -1}}));
    t.services.push_back(service("B", {{1, -1, 460}, {2, 710, -1}}));
    t.services.push_back(service("C", {{1, -1, 430}, {2, 650, -1}}));  // too tight to catch
    Demand d = demand("d", 0, 2, 40, 1000, 1);
    CHECK(shortestPathTime(buildNetwork(t), d) == 60 + 300 + 60 + 250);
    CHECK(shortestPathTime(buildNetwork(t), d) == bruteShortest(t, d));
  }
}

TEST_CASE("shortest paths agree with path enumeration") {
  SizeParams p;
  p.terminals = 4;
  p.services = 6;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    Instance in = generateSyntheticNetwork(p, seed);
    TimeSpaceNetwork net = buildNetwork(in);
    for (int o = 0; o < p.terminals; ++o)
      for (int d = 0; d < p.terminals; ++d) {
        if (o == d) continue;
        for (Minutes rel : {0L, 2000L, 7000L}) {
          Demand k = demand("k", o, d, rel, (rel + 10079) % 10080, 1);
          Minutes want = bruteShortest(in, k);
          CHECK(shortestPathTime(net, k) == (want < 0 ? kUnreachable : want));
        }
      }
  }
}
