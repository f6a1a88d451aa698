#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bbridge/checks.hpp"

using namespace bbridge::checks;

TEST_CASE("full specfun battery passes") {
    const CheckSummary s = specfun_battery();
    CHECK(s.all_passed());
    CHECK(s.group("contiguous").size() == 1000);
    CHECK(s.group("asymptotic").size() == 3);
    CHECK(s.passed + s.failed == s.cells.size());
    for (const CheckCell& c : s.cells) {
        if (!c.passed) {
            MESSAGE(c.group << " " << c.label << " residual " << c.residual << " " << c.error);
        }
    }
}

TEST_CASE("quick battery is smaller and still passes") {
    const CheckSummary s = specfun_battery({true});
    CHECK(s.all_passed());
    CHECK(s.group("contiguous").size() == 100);
}

TEST_CASE("an unreachable series tolerance fails with convergence errors") {
    SpecfunBatteryOptions opt;
    opt.quick = true;
    opt.series_rel_tol = 1e-30;
    const CheckSummary s = specfun_battery(opt);
    CHECK_FALSE(s.all_passed());
    bool saw_error = false;
    for (const CheckCell& c : s.group("contiguous")) {
        saw_error = saw_error || c.error.find("did not converge") != std::string::npos;
    }
    CHECK(saw_error);
}

TEST_CASE("same seed, same draws") {
    const CheckSummary a = specfun_battery({true, 1e-14, 7});
    const CheckSummary b = specfun_battery({true, 1e-14, 7});
    REQUIRE(a.cells.size() == b.cells.size());
    CHECK(a.cells.front().label == b.cells.front().label);
    CHECK(a.cells.front().value == b.cells.front().value);
}
