#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ewb/integrator.hpp"

using namespace ewb;

namespace {

FirstOrderSystem oscillator() {
  return {[](double, const State4& y) { return State4(y[1], -y[0], 0.0, 0.0); }, nullptr};
}

}  // namespace

TEST_SUITE("integrator") {
  TEST_CASE("the downward zero of sin is located at pi") {
    const IntegrationResult r = integrate(oscillator(), 0.0, State4(0.0, 1.0, 0.0, 0.0), {}, true);
    REQUIRE(r.reason == StopReason::Event);
    CHECK(std::abs(r.t - std::numbers::pi) < 1e-9);
    CHECK(std::abs(r.y[0]) < 1e-12);
    CHECK(r.y[1] == doctest::Approx(-1.0).epsilon(1e-9));
  }

  TEST_CASE("an upward crossing is not an event") {
    // Starts negative, crosses upward at pi/2 and downward at 3 pi/2.
    const IntegrationResult r = integrate(oscillator(), 0.0, State4(-1.0, 0.0, 0.0, 0.0), {}, true);
    REQUIRE(r.reason == StopReason::Event);
    CHECK(r.t == doctest::Approx(1.5 * std::numbers::pi).epsilon(1e-10));
  }

  TEST_CASE("output times are hit exactly and accurately") {
    const FirstOrderSystem decay{[](double, const State4& y) { return State4(-y); }, nullptr};
    const std::vector<double> times = {0.1, 0.5, 1.0, 1.7, 2.0};
    const IntegrationResult r = integrate(decay, 0.0, State4(1.0, 2.0, 3.0, 4.0), {}, false, 2.0, times);
    REQUIRE(r.reason == StopReason::ReachedEnd);
    REQUIRE(r.outputs.size() == times.size());
    for (std::size_t i = 0; i < times.size(); ++i)
      CHECK(std::abs(r.outputs[i][3] - 4.0 * std::exp(-times[i])) < 1e-9);
    CHECK(r.t == 2.0);
  }

  TEST_CASE("failure modes are told apart") {
    IntegratorOptions opts;
    opts.t_max = 5.0;
    const FirstOrderSystem blowup{[](double, const State4& y) { return State4(1.0, y[1] * y[1], 0.0, 0.0); }, nullptr};
    CHECK(integrate(blowup, 0.0, State4(1.0, 1.0, 0.0, 0.0), opts, true).reason == StopReason::BlowUp);

    const FirstOrderSystem rising{[](double, const State4&) { return State4(1.0, 0.0, 0.0, 0.0); }, nullptr};
    CHECK(integrate(rising, 0.0, State4(1.0, 0.0, 0.0, 0.0), opts, true).reason == StopReason::NoReturn);

    const FirstOrderSystem guarded{[](double, const State4&) { return State4(0.0, 0.0, -1.0, 0.0); },
                                   [](double, const State4& y) { return y[2] > 0.0; }};
    CHECK(integrate(guarded, 0.0, State4(1.0, 0.0, 1.0, 0.0), opts, true).reason == StopReason::Invalid);
  }

  TEST_CASE("stop reasons have stable names") {
    CHECK(to_string(StopReason::BlowUp) == "blow-up");
    CHECK(to_string(StopReason::NoReturn) == "no-return");
    CHECK(to_string(StopReason::Event) != to_string(StopReason::ReachedEnd));
  }
}
