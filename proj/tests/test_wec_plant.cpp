#include <doctest.h>

#include <cmath>
#include <numeric>

#include "wecdcee/energy_model.hpp"
#include "wecdcee/wec_plant.hpp"

using namespace wec;

namespace {

const WecParams plant;

WecState integrate(double dt, double duration) {
  const auto steps = static_cast<long>(std::llround(duration / dt));
  auto eta = [](double t) { return std::cos(0.4 * kPi * t); };
  auto force = [](double t, double, double) { return 8000.0 * std::cos(1.1 * t + 0.3); };
  WecState s;
  for (long k = 0; k < steps; ++k) s = step(s, plant, eta, force, dt);
  return s;
}

double mechanical_energy(const WecState& s) {
  return 0.5 * plant.mass * s.v * s.v + 0.5 * plant.stiffness * s.x * s.x;
}

}  // namespace

TEST_SUITE("wec_plant") {

TEST_CASE("equilibrium stays put") {
  WecState s;
  for (int i = 0; i < 1000; ++i) s = step(s, plant, 0.0, 0.0, 0.01);
  CHECK(s.x == 0.0);
  CHECK(s.v == 0.0);
  CHECK(s.t == doctest::Approx(10.0));
}

TEST_CASE("free-floating velocity amplitude matches the closed form") {
  const WaveParams w{1.0, 0.0, 0.4 * kPi};
  const double period = kTwoPi / w.omega;
  WecState s;
  auto eta = [&](double t) { return std::cos(w.omega * t); };
  auto none = [](double, double, double) { return 0.0; };
  double peak = 0.0;
  for (long k = 0; s.t < 20.0 * period; ++k) {
    s = step(s, plant, eta, none, 0.01);
    if (s.t > 10.0 * period) peak = std::max(peak, std::abs(s.v));
  }
  const double expected = response_components({0.0, 0.0, w.omega}, w, plant).wave_amplitude;
  CHECK(std::abs(peak - expected) / expected < 0.01);
}

TEST_CASE("halving the step cuts the error about sixteen-fold") {
  const auto reference = integrate(0.01 / 16.0, 100.0);
  const auto coarse = integrate(0.01, 100.0);
  const auto fine = integrate(0.005, 100.0);
  const double e_coarse = std::hypot(coarse.x - reference.x, coarse.v - reference.v);
  const double e_fine = std::hypot(fine.x - reference.x, fine.v - reference.v);
  const double ratio = e_coarse / e_fine;
  CHECK(ratio > 13.0);
  CHECK(ratio < 19.0);
}

TEST_CASE("force is saturated at every stage") {
  auto eta = [](double) { return 0.0; };
  auto huge = [](double, double, double) { return 1e9; };
  auto limit = [](double, double, double) { return 2.1e4; };
  const auto a = step(WecState{}, plant, eta, huge, 0.01);
  const auto b = step(WecState{}, plant, eta, limit, 0.01);
  CHECK(a.x == b.x);
  CHECK(a.v == b.v);
  CHECK(saturate_force(-5e4, plant) == -2.1e4);
  CHECK(saturate_force(100.0, plant) == 100.0);
}

TEST_CASE("bad steps and blow-ups raise") {
  CHECK_THROWS_AS(step(WecState{}, plant, 0.0, 0.0, 0.0), DomainError);
  WecParams wild = plant;
  wild.force_limit = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(step(WecState{}, wild, std::numeric_limits<double>::infinity(), 0.0, 0.01),
                  NumericError);
}

TEST_CASE("undriven motion loses energy monotonically") {
  WecState s{0.1, 0.3, 0.0};
  double e = mechanical_energy(s);
  for (int i = 0; i < 5000; ++i) {
    s = step(s, plant, 0.0, 0.0, 0.01);
    const double next = mechanical_energy(s);
    CHECK(next <= e * (1.0 + 1e-12));
    e = next;
  }
}

TEST_CASE("instantaneous power sign convention") {
  CHECK(instantaneous_power({0.0, 2.0, 0.0}, 0.0) == 0.0);
  CHECK(instantaneous_power({0.0, 2.0, 0.0}, -1000.0) == 2000.0);
  CHECK(instantaneous_power({0.0, 2.0, 0.0}, 1000.0) == -2000.0);
}

TEST_CASE("limit flags") {
  CHECK_FALSE(check_limits({0.5, 1.0, 0.0}, plant).heave);
  CHECK(check_limits({1.5, 1.0, 0.0}, plant).heave);
  CHECK(check_limits({0.0, -3.5, 0.0}, plant).velocity);
}

TEST_CASE("windows and step counts") {
  CHECK(steps_in(50.0, 0.01) == 5000);
  CHECK_THROWS_AS(steps_in(0.015, 0.01), ConfigError);
  CHECK_THROWS_AS(steps_in(0.0, 0.01), ConfigError);
  CHECK_NOTHROW(MeasurementWindows{}.validate(0.01));
  CHECK_THROWS_AS((MeasurementWindows{30.0, 20.0, 50.0, 0.05}.validate(0.01)), ConfigError);
  CHECK_THROWS_AS((MeasurementWindows{20.0, 30.0, 25.0, 0.05}.validate(0.01)), ConfigError);
  CHECK_THROWS_AS((MeasurementWindows{20.0, 30.0, 50.0, -0.1}.validate(0.01)), ConfigError);
  CHECK_THROWS_AS((MeasurementWindows{20.005, 30.0, 50.0, 0.05}.validate(0.01)), ConfigError);
}

TEST_CASE("constant power without noise") {
  PowerTrace trace(5000, 0.01);
  for (int i = 0; i < 5000; ++i) trace.push(100.0);
  MeasurementWindows w;
  w.noise_fraction = 0.0;
  std::mt19937_64 rng(1);
  const auto m = windowed_measurements(trace, w, rng);
  CHECK(m.t1 == doctest::Approx(100.0).epsilon(1e-14));
  CHECK(m.t2 == doctest::Approx(100.0).epsilon(1e-14));
  CHECK(m.t == doctest::Approx(100.0).epsilon(1e-14));
}

TEST_CASE("trailing means integrate a sinusoid") {
  const double dt = 0.01;
  const double omega = 0.9;
  PowerTrace trace(5000, dt);
  const int n = 7000;  // wraps the ring buffer
  for (int k = 1; k <= n; ++k) trace.push(std::sin(omega * k * dt));
  const double end = n * dt;
  for (const double window : {20.0, 30.0, 50.0}) {
    const double exact = (std::cos(omega * (end - window)) - std::cos(omega * end)) / (omega * window);
    CHECK(std::abs(trace.trailing_mean(window) - exact) < omega * dt);
  }
  CHECK_THROWS_AS((void)PowerTrace(10, dt).trailing_mean(1.0), DomainError);
}

TEST_CASE("measurement noise is 5 percent of the clean value") {
  PowerTrace trace(5000, 0.01);
  for (int i = 0; i < 5000; ++i) trace.push(100.0);
  MeasurementWindows w;
  std::mt19937_64 rng(42);
  std::vector<double> samples;
  for (int i = 0; i < 10000; ++i) samples.push_back(windowed_measurements(trace, w, rng).t);
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / samples.size();
  double var = 0.0;
  for (const double s : samples) var += (s - mean) * (s - mean);
  const double sd = std::sqrt(var / (samples.size() - 1));
  CHECK(std::abs(sd - 5.0) < 0.25);
  CHECK(std::abs(mean - 100.0) < 0.2);
}

TEST_CASE("noise draws are independent across windows") {
  PowerTrace trace(5000, 0.01);
  for (int i = 0; i < 5000; ++i) trace.push(100.0);
  std::mt19937_64 rng(9);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (int i = 0; i < 5000; ++i) {
    const auto m = windowed_measurements(trace, MeasurementWindows{}, rng);
    sxy += (m.t1 - 100.0) * (m.t - 100.0);
    sxx += (m.t1 - 100.0) * (m.t1 - 100.0);
    syy += (m.t - 100.0) * (m.t - 100.0);
  }
  CHECK(std::abs(sxy / std::sqrt(sxx * syy)) < 0.05);
}

TEST_CASE("identical seeds give identical traces") {
  auto run = [](std::uint64_t seed) {
    PowerTrace trace(5000, 0.01);
    WecState s;
    std::mt19937_64 rng(seed);
    std::vector<double> out;
    auto eta = [](double t) { return std::cos(1.2 * t); };
    auto force = [](double t, double, double) { return 5000.0 * std::sin(1.2 * t); };
    for (int k = 0; k < 20000; ++k) {
      s = step(s, plant, eta, force, 0.01);
      trace.push(instantaneous_power(s, force(s.t, s.x, s.v)));
      if ((k + 1) % 5000 == 0) {
        const auto m = windowed_measurements(trace, MeasurementWindows{}, rng);
        out.insert(out.end(), {s.x, s.v, m.t1, m.t2, m.t});
      }
    }
    return out;
  };
  CHECK(run(5) == run(5));
  CHECK(run(5) != run(6));
}

}
