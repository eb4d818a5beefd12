#include <doctest.h>

#include <map>

#include "railplan/blocks.hpp"
#include "railplan/generator.hpp"
#include "support/fixtures.hpp"
#include "support/paths.hpp"

using namespace railplan;
using namespace railtest;

namespace {

std::set<std::vector<RawLeg>> legSets(const BlockCatalog& cat) {
  std::set<std::vector<RawLeg>> out;
  for (const auto& b : cat.blocks) {
    std::vector<RawLeg> v;
    for (LegRef r : b.legs) v.push_back({r.service, r.leg});
    out.insert(v);
  }
  return out;
}

Instance transferPair(long secondDeparture) {
  Instance in = terminals(3);
  in.config.transferTime = 120;
  in.services.push_back(service("A", {{0, -1, 0}, {1, 100, -1}}));
  in.services.push_back(service("B", {{1, -1, secondDeparture}, {2, secondDeparture + 200, -1}}));
  return in;
}

bool hasTransferBlock(const BlockCatalog& cat) {
  for (const auto& b : cat.blocks)
    if (b.legs.size() == 2) return true;
  return false;
}

}  // namespace

TEST_CASE("single two-stop service gives one block") {
  Instance in = terminals(2);
  in.services.push_back(service("S", {{0, -1, 100}, {1, 400, -1}}));
  BlockCatalog cat = generateBlocks(in, buildNetwork(in));
  REQUIRE(cat.blocks.size() == 1);
  CHECK(cat.blocks[0].transfers == 0);
  CHECK(cat.blocks[0].duration == 300);
  CHECK(cat.blocks[0].buildCost == Money::fromDouble(100));
}

TEST_CASE("transfer time boundary") {
  CHECK_FALSE(hasTransferBlock(generateBlocks(transferPair(100 + 119), buildNetwork(transferPair(100 + 119)))));
  Instance ok = transferPair(100 + 120);
  CHECK(hasTransferBlock(generateBlocks(ok, buildNetwork(ok))));
}

TEST_CASE("block attributes") {
  Instance in = terminals(3, {"CA", "US", "US"});
  in.config.transferTime = 60;
  in.services.push_back(service("A", {{0, -1, 0}, {1, 100, -1}}, 7000, 500));
  in.services.push_back(service("B", {{1, -1, 400}, {2, 700, -1}}, 9000, 300));
  BlockPath b;
  b.legs = {{0, 0}, {1, 0}};
  CHECK(checkLegSequence(b.legs, in).empty());
  b = computeAttributes(b, in);
  CHECK(b.capacity == 7000);
  CHECK(b.transfers == 1);
  CHECK(b.buildCost == Money::fromDouble(10120));
  CHECK(b.borderCrossings == 1);
  CHECK(b.distance == 800);
  CHECK(b.transferWait == 300);
  CHECK(b.duration == 700);
  CHECK(b.transferTerminals == std::vector<int>{1});
}

TEST_CASE("leg sequence checks") {
  Instance in = transferPair(150);
  CHECK(checkLegSequence({{0, 0}, {1, 0}}, in) == "transfer at leg 1 violates t_trans");
  CHECK(checkLegSequence({{1, 0}, {0, 0}}, in) == "legs 0,1 not adjacent");
  CHECK(checkLegSequence({}, in) == "empty leg sequence");
}

TEST_CASE("wrapping block") {
  Instance in = terminals(2);
  in.services.push_back(service("S", {{0, -1, 10000}, {1, 300, -1}}));
  BlockCatalog cat = generateBlocks(in, buildNetwork(in));
  REQUIRE(cat.blocks.size() == 1);
  CHECK(cat.blocks[0].wraps);
  CHECK(cat.blocks[0].duration == 380);
  CHECK(cat.wrapFormedAt[0] == std::vector<int>{0});
}

TEST_CASE("catalog equals breadth-first enumeration") {
  SizeParams p;
  p.terminals = 5;
  p.services = 6;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Instance in = generateSyntheticNetwork(p, seed);
    BlockCatalog cat = generateBlocks(in, buildNetwork(in));
    CHECK(legSets(cat) == bfsBlocks(in, 3));
    CHECK(legSets(cat).size() == cat.blocks.size());
    BlockLimits lim;
    lim.maxTransfers = 1;
    CHECK(legSets(generateBlocks(in, buildNetwork(in), lim)) == bfsBlocks(in, 1));
  }
}

TEST_CASE("demand compatibility") {
  Instance in = shuttle();
  SUBCASE("released after the only departure with no slack for the next cycle") {
    in.demands.push_back(demand("d", 0, 1, 200, 500, 1));
    BlockCatalog cat = generateBlocks(in, buildNetwork(in));
    CHECK(cat.demandBlocks[0].empty());
  }
  SUBCASE("window exactly wait plus duration") {
    in.demands.push_back(demand("d", 0, 1, 50, 400, 1));
    BlockCatalog cat = generateBlocks(in, buildNetwork(in));
    REQUIRE(cat.demandBlocks[0].size() == 1);
    CHECK(cat.demandBlocks[0][0].wait == 50);
    CHECK(cat.demandBlocks[0][0].lateness == 0);
  }
}

TEST_CASE("lateness") {
  Instance in = terminals(2);
  in.services.push_back(service("fast", {{0, -1, 100}, {1, 400, -1}}));
  in.services.push_back(service("slow", {{0, -1, 100}, {1, 520, -1}}));
  in.demands.push_back(demand("d", 0, 1, 100, 2000, 1));
  BlockCatalog cat = generateBlocks(in, buildNetwork(in));
  REQUIRE(cat.demandBlocks[0].size() == 2);
  std::map<int, Minutes> late;
  for (const auto& kb : cat.demandBlocks[0]) late[cat.blocks[kb.block].duration] = kb.lateness;
  CHECK(late[300] == 0);
  CHECK(late[420] == 120);
}

TEST_CASE("compatibility and lateness match direct evaluation") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    Instance in = generateDeskInstance({}, seed);
    TimeSpaceNetwork net = buildNetwork(in);
    BlockCatalog cat = generateBlocks(in, net);
    const Minutes T = in.T();
    for (std::size_t k = 0; k < in.demands.size(); ++k) {
      const Demand& d = in.demands[k];
      const Minutes window = mod(d.due - d.release, T);
      const Minutes sp = bruteShortest(in, d);
      std::map<int, std::pair<Minutes, Minutes>> want;
      for (const auto& b : cat.blocks) {
        RawLeg first{b.legs.front().service, b.legs.front().leg};
        RawLeg last{b.legs.back().service, b.legs.back().leg};
        if (fromOf(in, first) != d.origin || toOf(in, last) != d.destination) continue;
        Minutes wait = mod(depTime(in, first) - d.release, T);
        Minutes dur = 0;
        for (std::size_t i = 0; i < b.legs.size(); ++i) {
          RawLeg l{b.legs[i].service, b.legs[i].leg};
          if (i) dur += connection(in, {b.legs[i - 1].service, b.legs[i - 1].leg}, l);
          dur += legMinutes(in, l);
        }
        if (wait + dur <= window) want[b.id] = {wait, sp < 0 ? 0 : std::max<Minutes>(0, wait + dur - sp)};
      }
      std::map<int, std::pair<Minutes, Minutes>> got;
      for (const auto& kb : cat.demandBlocks[k]) got[kb.block] = {kb.wait, kb.lateness};
      CHECK(got == want);
      for (const auto& [b, v] : got) {
        const auto& kbs = cat.blockDemands[b];
        CHECK(std::find(kbs.begin(), kbs.end(), static_cast<int>(k)) != kbs.end());
      }
    }
  }
}

TEST_CASE("block lookup tables") {
  Instance in = generateDeskInstance({}, 2);
  TimeSpaceNetwork net = buildNetwork(in);
  BlockCatalog cat = generateBlocks(in, net);
  for (const auto& b : cat.blocks) {
    for (LegRef r : b.legs) {
      const auto& on = cat.arcBlocks[net.movingArcs[r.service][r.leg]];
      CHECK(std::find(on.begin(), on.end(), b.id) != on.end());
    }
    CHECK(net.node(cat.departureNode[b.id]).kind == NodeKind::TOUT);
    CHECK(net.node(cat.arrivalNode[b.id]).kind == NodeKind::TIN);
  }
}
