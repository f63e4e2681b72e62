#include <doctest.h>

#include <cmath>
#include <vector>

#include "nafd/rates.hpp"

using namespace nafd;

namespace {

SystemConfig small_config() {
    SystemConfig c;
    c.num_aps = 3;
    c.antennas = 4;
    c.num_dl_ues = 1;
    c.num_ul_ues = 1;
    c.num_targets = 1;
    c.seed = 12;
    return c;
}

}  // namespace

TEST_SUITE("rates") {
    TEST_CASE("Gamma moments of a sum of exponentials") {
        // Two unit exponentials: mean 2, second moment Var + mean^2 = 2 + 4.
        const std::vector<double> d{1.0, 1.0};
        const auto g = gamma_moments(d);
        CHECK(g.k == doctest::Approx(2.0));
        CHECK(g.theta == doctest::Approx(1.0));
        CHECK(g.second_moment() == doctest::Approx(6.0));
        // Single exponential with mean 3: E[X^2] = 2 * 9.
        CHECK(gamma_from_sums(3.0, 9.0).second_moment() == doctest::Approx(18.0));
        const std::vector<double> zeros{0.0, 0.0};
        CHECK_THROWS_AS(gamma_moments(zeros), DegenerateError);
        const std::vector<double> neg{1.0, -1.0};
        CHECK_THROWS_AS(gamma_moments(neg), DomainError);
    }

    TEST_CASE("normalization gives unit expected precoder power") {
        const ChannelStatistics st(build_scenario(small_config()));
        const auto a = DuplexAssignment::from_bits("101");
        const auto nc = normalization(st, a);
        REQUIRE(nc.eps_dl[0].has_value());
        double s = 0.0;
        for (int m : a.dl_aps()) s += st.r_hat_ue(m, 0).trace().real();
        CHECK(*nc.eps_dl[0] * *nc.eps_dl[0] * s == doctest::Approx(1.0));
        double su = st.r_hat_ue(1, 1).trace().real();
        CHECK(*nc.eps_ul[0] * *nc.eps_ul[0] * su == doctest::Approx(1.0));
    }

    TEST_CASE("DL signal term equals p eps^2 E[||h||^4] from the estimate spectra") {
        const ChannelStatistics st(build_scenario(small_config()));
        const auto a = DuplexAssignment::from_bits("110");
        const auto nc = normalization(st, a);
        // Sum over serving APs of independent Gaussian vectors: mean tr R,
        // second moment (sum tr R)^2 + sum tr R^2.
        double s = 0.0, s2 = 0.0;
        for (int m : a.dl_aps()) {
            const CMat& r = st.r_hat_ue(m, 0);
            s += r.trace().real();
            s2 += (r * r).trace().real();
        }
        const double e2 = *nc.eps_dl[0] * *nc.eps_dl[0];
        const DlTerms t = dl_sinr(0, a, st, nc);
        CHECK(t.signal == doctest::Approx(st.scenario().ues[0].power * e2 * (s * s + s2)));
        CHECK(t.noise == st.config().noise_dl);
        CHECK(t.inter == 0.0);  // single DL UE
        CHECK(t.sinr == doctest::Approx(t.signal / (t.inter + t.error + t.sense + t.cli + t.noise)));
    }

    TEST_CASE("UL terms of a hand-checked single-AP case") {
        const ChannelStatistics st(build_scenario(small_config()));
        const auto a = DuplexAssignment::from_bits("110");
        const auto nc = normalization(st, a);
        const UlTerms t = ul_sinr(0, a, st, nc);
        const CMat& r = st.r_hat_ue(2, 1);
        const double tr = r.trace().real();
        const double p = st.scenario().ues[1].power;
        CHECK(t.signal == doctest::Approx(p / tr * (tr * tr + (r * r).trace().real())));
        CHECK(t.error == doctest::Approx(p / tr * (r * st.theta_ue(2, 1)).trace().real()));
        CHECK(t.noise == doctest::Approx(st.config().noise_ul));
        double cli_c = 0.0;
        for (int m : {0, 1}) {
            const double ej2 = *nc.eps_dl[0] * *nc.eps_dl[0];
            cli_c += st.scenario().ues[0].power * ej2 / tr *
                     (st.theta_ap(m, 2) * r * st.r_hat_ue(m, 0)).trace().real();
        }
        CHECK(t.cli_c == doctest::Approx(cli_c));
    }

    TEST_CASE("degenerate assignments give zero rates on the missing side") {
        SystemConfig c;
        c.seed = 3;
        const ChannelStatistics st(build_scenario(c));
        const auto ul_only = rate_report(DuplexAssignment::all_ul(8), st);
        for (double r : ul_only.dl_rate) CHECK(r == 0.0);
        for (double r : ul_only.ul_rate) CHECK(r > 0.0);
        const auto dl_only = rate_report(DuplexAssignment::all_dl(8), st);
        for (double r : dl_only.ul_rate) CHECK(r == 0.0);
        for (double r : dl_only.dl_rate) CHECK(r > 0.0);
        // All-DL has no receivers, so no cross-link interference on the DL side
        // beyond the UE-UE term.
        CHECK(std::isfinite(dl_only.sum_rate));
    }

    TEST_CASE("every term is finite and non-negative over all assignments") {
        const ChannelStatistics st(build_scenario(small_config()));
        for (std::uint64_t mask = 0; mask < 8; ++mask) {
            const auto a = DuplexAssignment::from_mask(mask, 3);
            const auto rep = rate_report(a, st);
            for (const auto& t : rep.dl) {
                for (double v : {t.signal, t.inter, t.error, t.sense, t.cli, t.sinr}) {
                    CHECK(std::isfinite(v));
                    CHECK(v >= 0.0);
                }
            }
            for (const auto& t : rep.ul) {
                for (double v : {t.signal, t.inter, t.error, t.cli_c, t.cli_s, t.sinr}) {
                    CHECK(std::isfinite(v));
                    CHECK(v >= 0.0);
                }
            }
            CHECK(rep.sum_rate == doctest::Approx(sum_rate(a, st)));
        }
    }

    TEST_CASE("rate uses the pilot-overhead prefactor") {
        SystemConfig c;
        CHECK(c.rate_prefactor() == doctest::Approx(0.8));
        CHECK(rate_from_sinr(3.0, c) == doctest::Approx(1.6));
    }
}
