#include "doctest.h"

#include <cmath>
#include <numbers>
#include <string>

#include "quatslide/control.hpp"
#include "quatslide/demos.hpp"
#include "quatslide/model_io.hpp"
#include "quatslide/scenario.hpp"
#include "quatslide/sim.hpp"
#include "test_support.hpp"

using namespace quatslide;
using nlohmann::json;
using quatslide::testing::random_vec3;
using quatslide::testing::uniform;

namespace {

constexpr double kPi = std::numbers::pi;

Scenario demo_run(const std::string& name, std::size_t run = 0) {
  const Demo* demo = find_demo(name);
  REQUIRE(demo != nullptr);
  return scenario_from_json(parse_json_text(demo->runs.at(run).scenario_json, name), ".");
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

}  // namespace

TEST_CASE("randomized closed-loop scenarios converge at the designed rates") {
  int far_cover = 0;
  for (int n = 0; n < 20; ++n) {
    const bool global = n % 2 == 1;
    const bool tracking = n % 4 >= 2;
    const double lambda = uniform(1.0, 3.0), sigma = uniform(1.0, 3.0);
    // Rotation offsets near 0 or near a full turn, so some runs start on the far cover.
    double angle = uniform(0.2, 1.0);
    if (n % 3 == 0) angle = 2.0 * kPi - angle;
    Vec3 dp = random_vec3(0.05);
    if (dp.norm() < 0.02) dp *= 0.02 / dp.norm();

    json doc = {{"name", "random-" + std::to_string(n)},
                {"sim", {{"dt", 1e-3}, {"duration", 6.0}}},
                {"controller", {{"mode", global ? "task_global" : "task_local"}, {"lambda", lambda}, {"sigma", sigma}}},
                {"initial", {{"theta", {uniform(-0.5, 0.5), uniform(-0.3, 0.3), uniform(-0.3, 0.3), uniform(-0.5, 0.5),
                                        uniform(-0.6, 0.6), uniform(-1.0, 1.0)}}}},
                {"trajectory", {{"variant", tracking ? "sinusoid_rotation" : "set_point"},
                                {"offset", {{"p", vec_json(dp)}, {"axis", vec_json(random_vec3())}, {"angle", angle}}}}}};
    if (tracking) {
      doc["trajectory"]["amplitude"] = vec_json(random_vec3(0.04));
      doc["trajectory"]["frequency"] = vec_json(random_vec3(0.2).cwiseAbs());
      doc["trajectory"]["axis"] = vec_json(random_vec3());
      doc["trajectory"]["rate"] = uniform(0.05, 0.2);
    }
    const Scenario s = scenario_from_json(doc, ".");
    const SimResult r = run_scenario(s.config);
    CAPTURE(doc.dump());
    REQUIRE_FALSE(r.metrics.aborted());
    REQUIRE(r.metrics.fitted_rate_position.has_value());
    REQUIRE(r.metrics.fitted_rate_orientation.has_value());
    CHECK(*r.metrics.fitted_rate_position == doctest::Approx(sigma).epsilon(0.1));
    CHECK(*r.metrics.fitted_rate_orientation == doctest::Approx(lambda).epsilon(0.1));
    CHECK(r.metrics.max_identity_residual <= 1e-9);
    const double w0 = r.trace.front().q_e.w();
    if (std::abs(w0) > 0.05) CHECK(r.metrics.final_sign == sgn_modified(w0));
    if (w0 < -0.05) ++far_cover;
  }
  CHECK(far_cover >= 5);
}

TEST_CASE("tracking demo") {
  const Scenario s = demo_run("tracking");
  const SimResult r = run_scenario(s.config);
  REQUIRE_FALSE(r.metrics.aborted());
  CHECK(*r.metrics.fitted_rate_position == doctest::Approx(2.0).epsilon(0.1));
  CHECK(*r.metrics.fitted_rate_orientation == doctest::Approx(2.0).epsilon(0.1));
  CHECK(r.metrics.max_identity_residual <= 1e-9);
  for (std::size_t k = 0; k < r.t.size(); ++k) {
    if (r.t[k] >= 6.0) {
      CHECK(r.p_err[k] <= 1e-3);
      CHECK(r.qvec_err[k] <= 1e-3);
    }
  }
}

TEST_CASE("global-frame demo matches the local-frame run") {
  const SimResult a = run_scenario(demo_run("tracking").config);
  const SimResult b = run_scenario(demo_run("global-frame").config);
  REQUIRE(a.qvec_err.size() == b.qvec_err.size());
  double worst = 0.0;
  for (std::size_t k = 0; k < a.qvec_err.size(); ++k) {
    worst = std::max(worst, std::abs(a.qvec_err[k] * a.qvec_err[k] - b.qvec_err[k] * b.qvec_err[k]));
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("350 degree initial error: sgn-based controller versus naive baseline") {
  const SimResult local = run_scenario(demo_run("unwinding", 0).config);
  const SimResult naive = run_scenario(demo_run("unwinding", 1).config);
  REQUIRE_FALSE(local.metrics.aborted());
  REQUIRE_FALSE(naive.metrics.aborted());
  CHECK(local.metrics.path_length < kPi);
  CHECK(local.metrics.path_length == doctest::Approx(10.0 * kPi / 180.0).epsilon(0.05));
  CHECK(local.metrics.final_sign == -1.0);
  CHECK(naive.metrics.path_length > 5.0);
  CHECK(naive.metrics.final_sign == 1.0);
  CHECK(local.metrics.final_qvec_err <= 1e-6);
  CHECK(naive.metrics.final_qvec_err <= 1e-3);
}
