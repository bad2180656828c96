#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "recdep/property_suite.hpp"

#include <stdexcept>

using namespace recdep;

namespace {

void check_consistent(const PropertyReport& r) {
    CHECK(r.pass == (r.worst_violation <= r.tolerance));
    bool all = true;
    for (const auto& c : r.checks) {
        CHECK(c.pass == (c.violation <= c.tolerance));
        all = all && c.pass;
    }
    CHECK(all == r.pass);
    CHECK_FALSE(r.checks.empty());
}

}  // namespace

TEST_CASE("fast properties pass on the default grids") {
    for (const char* id : {"remark1", "prop1", "prop4", "prop5"}) {
        CAPTURE(id);
        const auto r = run_property(id);
        CHECK(r.id == id);
        CHECK(r.pass);
        check_consistent(r);
    }
}

TEST_CASE("prop5 covers the full grid") {
    const auto r = check_prop5();
    CHECK(r.witness["cells"] == 1000 * 5 * 4 * 2);
    CHECK(r.witness["mismatches"] == 0);
}

TEST_CASE("a failing grid is reported, not thrown") {
    // Without variation in delta_II there is no strict-gain witness.
    PropertyGrids g;
    g.deltas = {0.0, 0.0};
    const auto r = check_prop4(g);
    CHECK_FALSE(r.pass);
    check_consistent(r);
}

TEST_CASE("ids") {
    CHECK(property_ids().size() == 7);
    CHECK_THROWS_AS(run_property("prop9"), std::invalid_argument);
    const auto j = to_json(check_remark1());
    CHECK(j["id"] == "remark1");
    CHECK(j.contains("witness"));
    CHECK(j.contains("grid"));
}
