#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "nafd/scenario.hpp"

using namespace nafd;

TEST_SUITE("scenario") {
    TEST_CASE("ULA is half-wavelength spaced and centered") {
        const auto arr = AntennaArray::ula(5, 0.1, true);
        REQUIRE(arr.size() == 5);
        double cx = 0.0;
        for (int i = 0; i < 5; ++i) {
            cx += arr.elements[i].x;
            CHECK(arr.elements[i].y == 0.0);
            if (i > 0) CHECK(arr.elements[i].x - arr.elements[i - 1].x == doctest::Approx(0.05));
        }
        CHECK(std::abs(cx) < 1e-15);
        CHECK(AntennaArray::ula(3, 0.1, false).elements[0].x == 0.0);
    }

    TEST_CASE("steering vector has unit-modulus entries and a matching derivative") {
        const auto arr = AntennaArray::ula(8, 0.1, true);
        const double th = 0.37, h = 1e-6;
        const CVec a = steering_vector(arr, th);
        for (int i = 0; i < a.size(); ++i) CHECK(std::abs(a[i]) == doctest::Approx(1.0));
        const CVec fd = (steering_vector(arr, th + h) - steering_vector(arr, th - h)) / (2.0 * h);
        CHECK((fd - steering_derivative(arr, th)).norm() <= 1e-6 * fd.norm());
        // Broadside (angle pi/2 for an x-axis array) has no progressive phase.
        const CVec b = steering_vector(arr, kPi / 2.0);
        for (int i = 0; i < b.size(); ++i) CHECK(std::abs(b[i] - cd(1.0, 0.0)) < 1e-12);
    }

    TEST_CASE("path gain and the close-in floor") {
        CHECK(path_gain(2.0, 3.0) == doctest::Approx(0.125));
        CHECK_THROWS_AS(path_gain(0.0, 3.0), DomainError);
        SystemConfig c;
        c.reference_distance = 10.0;
        c.path_loss_exponent = 3.0;
        CHECK(link_amplitude(c, {0, 0}, {20, 0}) == doctest::Approx(0.125));
        CHECK(link_amplitude(c, {0, 0}, {3, 4}) == doctest::Approx(1.0));
        CHECK_THROWS_AS(link_amplitude(c, {1, 1}, {1, 1}), DomainError);
    }

    TEST_CASE("assignment encodings round-trip") {
        const auto a = DuplexAssignment::from_bits("10110");
        CHECK(a.mask() == 0b01101);
        CHECK(DuplexAssignment::from_mask(a.mask(), 5) == a);
        CHECK(a.bits() == "10110");
        CHECK(a.dl_aps() == std::vector<int>{0, 2, 3});
        CHECK(a.ul_aps() == std::vector<int>{1, 4});
        CHECK(a.x_d(0) + a.x_u(0) == 1);
        CHECK(a.flipped(1).bits() == "11110");
        CHECK(DuplexAssignment::balanced(5).bits() == "11100");
        CHECK(DuplexAssignment::all_dl(3).ul_aps().empty());
        CHECK(DuplexAssignment::all_ul(3).dl_aps().empty());
        CHECK_THROWS(DuplexAssignment::from_bits("10a"));
    }

    TEST_CASE("scenario is deterministic in the seed and stays in the area") {
        SystemConfig c;
        c.seed = 42;
        const Scenario s1 = build_scenario(c), s2 = build_scenario(c);
        REQUIRE(s1.ues.size() == 8);
        for (std::size_t k = 0; k < s1.ues.size(); ++k) {
            CHECK(s1.ues[k].position.x == s2.ues[k].position.x);
            CHECK(s1.ues[k].position.y == s2.ues[k].position.y);
            CHECK(s1.ues[k].position.x >= 0.0);
            CHECK(s1.ues[k].position.x <= c.area_side);
        }
        CHECK(s1.ues[0].direction == Direction::Downlink);
        CHECK(s1.ues[7].direction == Direction::Uplink);
        const Position mid{c.area_side / 2, c.area_side / 2};
        for (const auto& ap : s1.aps) CHECK(distance(ap.center, mid) == doctest::Approx(c.circle_radius));

        c.seed = 43;
        const Scenario s3 = build_scenario(c);
        CHECK(s3.targets[0].position.x != s1.targets[0].position.x);
    }

    TEST_CASE("changing the antenna count keeps the geometry") {
        SystemConfig c;
        c.seed = 3;
        const Scenario a = build_scenario(c);
        c.antennas = 12;
        const Scenario b = build_scenario(c);
        CHECK(a.targets[1].position.x == b.targets[1].position.x);
        CHECK(a.ues[5].position.y == b.ues[5].position.y);
    }

    TEST_CASE("balanced split alternates around the circle") {
        SystemConfig c;
        c.seed = 1;
        const Scenario s = build_scenario(c);
        const auto a = DuplexAssignment::balanced(c.num_aps);
        const Position mid{c.area_side / 2, c.area_side / 2};
        std::vector<std::pair<double, int>> by_angle;
        for (int m = 0; m < c.num_aps; ++m) by_angle.push_back({direction(mid, s.aps[m].center), a.x_d(m)});
        std::sort(by_angle.begin(), by_angle.end());
        for (std::size_t i = 1; i < by_angle.size(); ++i) CHECK(by_angle[i].second != by_angle[i - 1].second);
    }

    TEST_CASE("invalid configurations are rejected") {
        SystemConfig c;
        c.antennas = 0;
        CHECK_THROWS_AS(c.validate(), ConfigError);
        c = SystemConfig{};
        c.tau_up = 60;
        c.tau_dp = 50;
        CHECK_THROWS_AS(c.validate(), ConfigError);
        c = SystemConfig{};
        c.noise_dl = -1.0;
        CHECK_THROWS_AS(c.validate(), ConfigError);
    }

    TEST_CASE("target variances scale with the mean squared amplitude") {
        SystemConfig c;
        c.seed = 9;
        const Scenario s = build_scenario(c);
        const auto& t = s.targets[0];
        const double g = link_amplitude(c, s.aps[2].center, t.position);
        CHECK(t.gain_var_ap[2] == doctest::Approx(c.gain_uncertainty_ap * g * g));
        CHECK(t.steer_var_ap[2] == c.steering_perturbation);
    }
}
