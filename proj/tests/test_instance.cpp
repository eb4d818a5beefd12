#include <doctest.h>

#include "railplan/generator.hpp"
#include "railplan/instance_io.hpp"
#include "railplan/validation.hpp"
#include "support/fixtures.hpp"

using namespace railplan;
using namespace railtest;

namespace {

const char* kMinimal = R"({
  "terminals": [{"id": "A", "region": "CA"}, {"id": "B", "region": "US"}],
  "services": [{"id": "S", "stops": [{"terminal": "A", "departure": 60}, {"terminal": "B", "arrival": 360}],
                "legs": [{"capacity": 3000, "distance": 300}]}],
  "demands": [{"id": "d", "origin": "A", "destination": "B", "release": 0, "due": 1000, "volume": 2, "type": "T40"}],
  "railcars": [{"id": "1x53", "platform": "P53", "platforms": 1, "length": 70, "fleetLimit": 1}],
  "config": {"scheduleLength": 10080, "transferTime": 120}
})";

bool hasRule(const ValidationReport& r, const std::string& rule) {
  for (const auto& v : r.items)
    if (v.rule == rule) return true;
  return false;
}

}  // namespace

TEST_CASE("cyclic durations") {
  CHECK(cyclicDuration(100, 250, 10080) == 150);
  CHECK(cyclicDuration(10000, 200, 10080) == 280);
  CHECK(cyclicDuration(4321, 4321, 10080) == 0);
  CHECK(cyclicDuration(0, 10079, 10080) == 10079);
}

TEST_CASE("money keeps four decimals") {
  CHECK(Money::parse("700000").ticks() == 700000LL * Money::kScale);
  CHECK(Money::parse("0.01").ticks() == 100);
  CHECK(Money::parse(Money::fromDouble(0.75).toString()) == Money::fromDouble(0.75));
  CHECK((Money::fromDouble(100) + Money::fromDouble(10020)).toDouble() == 10120.0);
}

TEST_CASE("minimal document parses") {
  Instance inst = parseInstance(kMinimal);
  REQUIRE(inst.services.size() == 1);
  CHECK(inst.services[0].legs.size() == 1);
  CHECK(inst.demands[0].origin == 0);
  CHECK(inst.demands[0].destination == 1);
  CHECK(inst.railcars[0].fleetLimit == 1);
  CHECK(inst.costs == CostParams{});
  CHECK(validateInstance(inst).items.empty());
}

TEST_CASE("unknown terminal is a reference error") {
  std::string doc = kMinimal;
  doc.replace(doc.find(R"("destination": "B")"), 18, R"("destination": "Z")");
  CHECK_THROWS_AS(parseInstance(doc), ReferenceError);
}

TEST_CASE("malformed documents are parse errors") {
  CHECK_THROWS_AS(parseInstance("{"), ParseError);
  CHECK_THROWS_AS(parseInstance("[]"), ParseError);
  std::string doc = kMinimal;
  doc.replace(doc.find(R"("volume": 2)"), 11, R"("volume": "2")");
  CHECK_THROWS_AS(parseInstance(doc), ParseError);
}

TEST_CASE("six standard car types load") {
  Instance inst = parseInstance(kMinimal);
  inst.railcars = standardRailcars();
  Instance back = parseInstance(saveInstance(inst));
  CHECK(back.railcars.size() == 6);
  CHECK(back == inst);
}

TEST_CASE("save and load round trip is byte stable") {
  Instance inst = generateDeskInstance({}, 11);
  std::string a = saveInstance(inst);
  Instance back = parseInstance(a);
  CHECK(back == inst);
  CHECK(saveInstance(back) == a);
}

TEST_CASE("validation") {
  Instance inst = parseInstance(kMinimal);

  SUBCASE("zero capacity leg") {
    inst.services[0].legs[0].capacity = 0;
    ValidationReport r = validateInstance(inst);
    CHECK_FALSE(r.valid());
    bool found = false;
    for (const auto& v : r.errors()) found = found || v.message == "leg capacity must be positive";
    CHECK(found);
    CHECK_THROWS_AS(parseInstance(saveInstance(inst)), ValidationError);
  }
  SUBCASE("per-platform length must fall with platform count") {
    inst.railcars = {car("1x40"), car("3x40")};
    inst.railcars[1].length = 200;  // 66.7 ft per platform against 56
    ValidationReport r = validateInstance(inst);
    CHECK(r.valid());
    REQUIRE(r.warnings().size() == 1);
    CHECK(r.warnings()[0].rule == "railcar.length-per-platform");
    CHECK(r.warnings()[0].subject == "3x40");
  }
  SUBCASE("standard catalog is monotone") {
    inst.railcars = standardRailcars();
    CHECK(validateInstance(inst).items.empty());
  }
  SUBCASE("times outside the cycle") {
    inst.demands[0].due = 10080;
    CHECK(hasRule(validateInstance(inst), "demand.time-range"));
  }
  SUBCASE("demand ends must differ") {
    inst.demands[0].destination = 0;
    CHECK(hasRule(validateInstance(inst), "demand.distinct-ends"));
  }
  SUBCASE("origin stop with arrival") {
    inst.services[0].stops[0].arrival = 10;
    CHECK(hasRule(validateInstance(inst), "service.origin-arrival"));
  }
  SUBCASE("duplicate ids") {
    inst.railcars.push_back(inst.railcars[0]);
    CHECK(hasRule(validateInstance(inst), "railcar.unique-id"));
  }
}
