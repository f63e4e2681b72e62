#include <doctest.h>

#include <cmath>
#include <limits>

#include "nafd/sensing.hpp"

using namespace nafd;

namespace {

struct EchoModel {
    AntennaArray tx = AntennaArray::ula(6, 0.1, true);
    AntennaArray rx = AntennaArray::ula(6, 0.1, true);
    double amplitude = 3e-4;
    double bandwidth = 10e6;

    // Noiseless bistatic echo a(theta) (x) b(phi) with a range phase.
    CVec mean(double d, double th, double ph) const {
        const CVec a = steering_vector(tx, th), b = steering_vector(rx, ph);
        const double kd = 2.0 * kPi * bandwidth / kSpeedOfLight;
        CVec mu(a.size() * b.size());
        for (int p = 0; p < a.size(); ++p)
            for (int q = 0; q < b.size(); ++q) mu[p * b.size() + q] = amplitude * std::polar(1.0, -kd * d) * a[p] * b[q];
        return mu;
    }
};

// Fisher information from central differences of the echo mean.
Eigen::Matrix3d fd_fim(const EchoModel& e, double d, double th, double ph, double sigma2) {
    const double hd = 1e-3, ha = 1e-6;
    CMat jac(e.tx.size() * e.rx.size(), 3);
    jac.col(0) = (e.mean(d + hd, th, ph) - e.mean(d - hd, th, ph)) / (2 * hd);
    jac.col(1) = (e.mean(d, th + ha, ph) - e.mean(d, th - ha, ph)) / (2 * ha);
    jac.col(2) = (e.mean(d, th, ph + ha) - e.mean(d, th, ph - ha)) / (2 * ha);
    return (jac.adjoint() * jac).real() / sigma2;
}

}  // namespace

TEST_SUITE("sensing") {
    TEST_CASE("closed-form bound equals the inverse finite-difference FIM") {
        const EchoModel e;
        const double th = 0.7, ph = -2.1, sigma2 = 2e-12;
        const Eigen::Matrix3d inv = fd_fim(e, 250.0, th, ph, sigma2).inverse();

        CrlbInputs in;
        in.sigma_z2 = sigma2;
        in.power = e.amplitude * e.amplitude;
        in.eta = 1.0;
        in.w_norm2 = 1.0;
        in.antennas = 6;
        in.tx = array_factors(e.tx, th);
        in.rx = array_factors(e.rx, ph);
        in.bandwidth = e.bandwidth;
        in.wavelength = 0.1;
        const CrlbComponents c = crlb_closed_form(in);
        CHECK(inv(0, 0) == doctest::Approx(c.distance).epsilon(1e-5));
        CHECK(inv(1, 1) == doctest::Approx(c.doa).epsilon(1e-5));
        CHECK(inv(2, 2) == doctest::Approx(c.dod).epsilon(1e-5));
        CHECK(c.sum() == doctest::Approx(c.distance + c.doa + c.dod));
    }

    TEST_CASE("library FIM agrees with the finite-difference FIM") {
        const EchoModel e;
        FimGeometry g;
        g.tx = e.tx;
        g.rx = e.rx;
        g.doa = {0.4};
        g.dod = {1.9};
        g.range = {180.0};
        g.amplitude = {e.amplitude};
        g.bandwidth = e.bandwidth;
        g.sigma_z2 = 1e-12;
        const Eigen::MatrixXd j = fim_from_geometry(g);
        const Eigen::Matrix3d ref = fd_fim(e, 180.0, 0.4, 1.9, 1e-12);
        CHECK((j - ref).norm() <= 1e-5 * ref.norm());
    }

    TEST_CASE("array factors and endfire singularity") {
        const auto arr = AntennaArray::ula(4, 0.1, true);
        const ArrayFactors f = array_factors(arr, kPi / 2);
        CHECK(std::abs(f.a) < 1e-15);
        double b = 0.0;
        for (const auto& p : arr.elements) b += p.x * p.x;
        CHECK(f.b == doctest::Approx(b));
        CrlbInputs in;
        in.sigma_z2 = 1.0;
        in.power = in.eta = 1.0;
        in.antennas = 4;
        in.tx = array_factors(arr, 0.0);  // endfire: N B - A^2 = 0
        in.rx = f;
        in.bandwidth = 1e6;
        in.wavelength = 0.1;
        CHECK_THROWS_AS(crlb_closed_form(in), SingularGeometryError);
    }

    TEST_CASE("residual powers match their trace definitions") {
        SystemConfig c;
        c.num_aps = 4;
        c.antennas = 4;
        c.num_dl_ues = 2;
        c.num_ul_ues = 1;
        c.seed = 5;
        const ChannelStatistics st(build_scenario(c));
        const auto a = DuplexAssignment::from_bits("1010");
        const auto nc = normalization(st, a);
        const auto rp = residual_powers(1, a, st, nc);
        double dl = 0.0;
        for (int m : {0, 2})
            for (int j = 0; j < 2; ++j)
                dl += c.p_dl * *nc.eps_dl[j] * *nc.eps_dl[j] * (st.theta_ap(m, 1) * st.r_hat_ue(m, j)).trace().real();
        CHECK(rp.dl == doctest::Approx(dl));
        CHECK(rp.ul == doctest::Approx(c.p_ul * st.theta_ue(1, 2).trace().real()));
        CHECK_THROWS_AS(residual_powers(0, a, st, nc), DomainError);
    }

    TEST_CASE("LER conversion and degenerate sets") {
        SystemConfig c;
        CHECK(ler_from_crlb(std::nullopt, c) == 0.0);
        CHECK(ler_from_crlb(std::numeric_limits<double>::infinity(), c) == 0.0);
        CHECK(ler_from_crlb(c.sigma_loc2, c) == doctest::Approx(0.8));
        c.seed = 2;
        const ChannelStatistics st(build_scenario(c));
        CHECK(sense_sum(DuplexAssignment::all_dl(8), st) == 0.0);
        CHECK(sense_sum(DuplexAssignment::all_ul(8), st) == 0.0);
        const double f2 = sense_sum(DuplexAssignment::balanced(8), st);
        CHECK(std::isfinite(f2));
        CHECK(f2 > 0.0);
    }

    TEST_CASE("CRLB_loc averages the pairs") {
        SystemConfig c;
        c.seed = 6;
        const ChannelStatistics st(build_scenario(c));
        const auto a = DuplexAssignment::from_bits("11000100");
        const auto nc = normalization(st, a);
        double acc = 0.0;
        for (int m : a.dl_aps())
            for (int n : a.ul_aps()) acc += crlb_components(m, n, 1, a, st, nc).sum();
        CHECK(*crlb_loc(1, a, st, nc) == doctest::Approx(acc / 15.0));
        CHECK_THROWS_AS(crlb_inputs(2, 0, 0, a, st, nc), DomainError);
    }

    TEST_CASE("heatmap shape, cell centers and empty sides") {
        SystemConfig c;
        c.seed = 1;
        c.num_aps = 4;
        c.antennas = 4;
        const Scenario sc = build_scenario(c);
        const Heatmap h = ler_heatmap(sc, DuplexAssignment::balanced(4), 3);
        REQUIRE(h.ler.rows() == 3);
        REQUIRE(h.ler.cols() == 3);
        CHECK(h.xs[0] == doctest::Approx(50.0));
        CHECK(h.ys[2] == doctest::Approx(250.0));
        CHECK(h.ler.allFinite());
        CHECK(h.ler.minCoeff() >= 0.0);
        CHECK(ler_heatmap(sc, DuplexAssignment::all_dl(4), 3).ler.cwiseAbs().maxCoeff() == 0.0);
        CHECK_THROWS(ler_heatmap(sc, DuplexAssignment::balanced(3), 3));
        CHECK_THROWS(ler_heatmap(sc, DuplexAssignment::balanced(4), 1));
    }
}
