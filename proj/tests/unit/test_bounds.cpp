#include <cmath>
#include <fstream>
#include <random>

#include "doctest.h"
#include "json.hpp"
#include "mdpu/bounds.hpp"
#include "mdpu/mdp.hpp"

using namespace mdpu;

namespace {

nlohmann::json golden() {
    std::ifstream in(std::string(MDPU_TEST_DATA_DIR) + "/golden_bounds.json");
    REQUIRE(in.good());
    return nlohmann::json::parse(in);
}

GrowthFunction log_f(double m1, double m2, double shift = 0.0) {
    GrowthFunction f;
    f.kind = GrowthFunction::Kind::log;
    f.m1 = m1;
    f.m2 = m2;
    f.shift = shift;
    return f;
}

}  // namespace

TEST_SUITE("theory-bounds") {
    TEST_CASE("golden values from the high-precision oracle") {
        const auto g = golden();
        CHECK(k1_rmax(2, 2, 1, 1, 1, 0.25).value == g["k1_rmax(2,2,1,1,1,0.25)"]);
        CHECK(k1_urmax(2, 2, 1, 1, 1, 0.25).value == g["k1_urmax(2,2,1,1,1,0.25)"]);
        CHECK(k1_urmax(2, 2, 2, 1, 1, 0.25).value == g["k1_urmax(2,2,2,1,1,0.25)"]);
        const auto r = k2_k3(2, 2, 1, 1, 1, 0.25, ExtendedCount::of(10));
        CHECK(r.k2.value == g["k2(2,2,1,1,1,0.25,10)"]);
        CHECK(k2_k3(1, 1, 1, 1, 1, 0.25, ExtendedCount::of(1)).k3.value == g["k3(1,1,0.25)"]);
        CHECK(k0(DiscoveryFamily::constant(0.5), 4, 0.1).value == g["k0(constant 0.5,4,0.1)"]);
        CHECK(k0(DiscoveryFamily::constant(0.3), 4, 0.2).value == g["k0(constant 0.3,4,0.2)"]);
        CHECK(k0(DiscoveryFamily::harmonic_j(), 1, 0.5).value == g["k0(1/(t+1),1,0.5)"]);
        for (const char* d : {"0.2", "0.1", "0.05", "0.02"}) {
            const std::string key = std::string("k0(1/(t+1),1,") + d + ")";
            CHECK(k0(DiscoveryFamily::power(1.0), 1, std::stod(d)).value == g[key]);
        }
    }

    TEST_CASE("K1 formula structure") {
        // First term dominant: quadrupling epsilon divides it by 64 before the ceiling.
        const auto big = k1_urmax(10, 2, 10, 1, 1, 0.5);
        const auto small = k1_urmax(10, 2, 10, 1, 4, 0.5);
        CHECK(big.value == 400ull * 400 * 400 + 1);
        CHECK(small.value == 100ull * 100 * 100 + 1);
        std::uint64_t prev = 0;
        for (double d : {0.9, 0.5, 0.1, 1e-3, 1e-6, 1e-12}) {
            const auto v = k1_urmax(2, 2, 1, 1, 1, d).value;
            CHECK(v >= prev);
            prev = v;
        }
        CHECK(k1_rmax(2, 2, 1, 1, 1, 0.25).value == 873);
        const auto huge = k1_urmax(1e9, 1e9, 1e9, 1e9, 1e-9, 0.1);
        CHECK(huge.saturated);
        CHECK(huge.log_value > std::log(1e18));
    }

    TEST_CASE("K2 is nondecreasing in N, k and K0") {
        std::uint64_t prev = 0;
        for (double N : {1.0, 2.0, 3.0, 5.0}) {
            const auto v = k2_k3(N, 2, 1, 1, 1, 0.25, ExtendedCount::of(10)).k2.value;
            CHECK(v >= prev);
            prev = v;
        }
        prev = 0;
        for (double k : {1.0, 2.0, 4.0}) {
            const auto v = k2_k3(2, k, 1, 1, 1, 0.25, ExtendedCount::of(10)).k2.value;
            CHECK(v >= prev);
            prev = v;
        }
        prev = 0;
        for (std::uint64_t K0 : {1u, 100u, 4097u, 100000u}) {
            const auto v = k2_k3(2, 2, 1, 1, 1, 0.25, ExtendedCount::of(K0)).k2.value;
            CHECK(v >= prev);
            prev = v;
        }
        CHECK(k2_k3(2, 2, 1, 1, 1, 0.25, ExtendedCount::inf()).k2.infinite);
    }

    TEST_CASE("K0 examples and the infinite flag") {
        CHECK(k0(DiscoveryFamily::constant(0.5), 4, 0.1).value == 11);
        const auto inf = k0(DiscoveryFamily::power(2.0), 1, 0.01);
        CHECK(inf.infinite);
        CHECK_FALSE(inf.finite());
        CHECK(k0(DiscoveryFamily::constant(0.0), 1, 0.5).infinite);
        CHECK(k0(DiscoveryFamily::from_table({{0.1, 0.1}}), 1, 0.5).infinite);
        CHECK(k0(DiscoveryFamily::from_table({{0.9, 0.9, 0.9}}), 1, 0.5).value == 3);
        CHECK_THROWS_AS(k0(DiscoveryFamily::constant(0.5), 0, 0.1), InvalidInput);
        CHECK_THROWS_AS(k0(DiscoveryFamily::constant(0.5), 1, 1.0), InvalidInput);
    }

    TEST_CASE("K0 minimality over random draws") {
        std::mt19937_64 rng(2024);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (int i = 0; i < 100; ++i) {
            DiscoveryFamily fam;
            switch (i % 4) {
                case 0: fam = DiscoveryFamily::constant(0.05 + 0.9 * unit(rng)); break;
                case 1: fam = DiscoveryFamily::power(0.5 + 0.5 * unit(rng)); break;
                case 2: fam = DiscoveryFamily::harmonic_j(); break;
                default: fam = DiscoveryFamily::log_harmonic(2.0 + 2.0 * unit(rng)); break;
            }
            const double N = 1.0 + std::floor(8.0 * unit(rng));
            const double delta = 0.05 + 0.9 * unit(rng);
            const auto K = k0(fam, N, delta);
            REQUIRE(K.finite());
            REQUIRE(K.exact);
            const double threshold = std::log(4.0 * N / delta);
            CHECK(partial_sum(fam, 1, K.value) >= threshold);
            CHECK(partial_sum(fam, 1, K.value - 1) < threshold);
        }
    }

    TEST_CASE("lower bound time") {
        const auto f = log_f(1.0, 1.0);
        CHECK(lower_bound_target(0.5, 0.1) == doctest::Approx(0.5 * std::log(0.1) / std::log(0.5)));
        CHECK(lower_bound_steps(f, 0.5, 0.1).value == 2);

        GrowthFunction ll = f;
        ll.kind = GrowthFunction::Kind::loglog;
        CHECK(lower_bound_steps(ll, 0.5, 0.1).value >= lower_bound_steps(f, 0.5, 0.1).value);
        CHECK(lower_bound_steps(f, 0.5, 1.0 - 1e-12).value == 1);

        // Agreement with the closed-form inverse to one step.
        for (double delta : {0.3, 0.1, 0.01, 1e-4}) {
            for (const auto& g : {log_f(2.0, 0.0, 1.0), log_f(0.5, 0.2)}) {
                const double target = lower_bound_target(0.3, delta);
                const auto t = lower_bound_steps(g, 0.3, delta);
                const double closed = std::max(1.0, std::ceil(g.inverse(target)));
                CHECK(std::abs(static_cast<double>(t.value) - closed) <= 1.0);
            }
        }
        GrowthFunction lin;
        lin.kind = GrowthFunction::Kind::linear;
        lin.m1 = 0.0;
        lin.m2 = 0.0;
        CHECK(lower_bound_steps(lin, 0.5, 0.1).infinite);
    }

    TEST_CASE("impossibility gap") {
        const auto g = impossibility_gap(DiscoveryFamily::power(2.0), 1.0, 2.0);
        CHECK(g.c1 == doctest::Approx(0.25));
        CHECK(g.total_mass == doctest::Approx(M_PI * M_PI / 6.0 - 1.0).epsilon(1e-12));
        CHECK(g.d == doctest::Approx(0.4760921382251592).epsilon(1e-12));
        CHECK(g.gap == doctest::Approx(g.d));
        // The floor never exceeds the exact non-discovery limit of one half.
        CHECK(g.d <= 0.5);

        const auto z = impossibility_gap(DiscoveryFamily::constant(0.0), 1.0, 3.5);
        CHECK(z.d == 1.0);
        CHECK(z.gap == 2.5);
        CHECK_THROWS_WITH_AS(impossibility_gap(DiscoveryFamily::harmonic_j(), 1.0, 2.0), doctest::Contains("inapplicable"),
                             InvalidInput);
        CHECK_THROWS_AS(impossibility_gap(DiscoveryFamily::power(2.0), 2.0, 1.0), InvalidInput);
    }

    TEST_CASE("K0 is bounded by the inverse of a lower envelope") {
        GrowthFunction lin;
        lin.kind = GrowthFunction::Kind::linear;
        lin.m1 = 0.5;
        lin.m2 = 0.0;
        const auto c = k0_upper_bound_check(DiscoveryFamily::constant(0.5), lin, 4, 0.1);
        CHECK(c.holds);
        CHECK(c.lower_bound_verified);
        CHECK(c.k0.value == c.f_inverse.value);

        const auto h = k0_upper_bound_check(DiscoveryFamily::harmonic_j(), log_f(1.0, -0.7, 1.0), 2, 0.1);
        CHECK(h.holds);
        CHECK(h.lower_bound_verified);
        CHECK(h.verified_up_to == 100'000);

        const auto p = k0_upper_bound_check(DiscoveryFamily::power(1.0), log_f(1.0, -std::log(2.0), 2.0), 1, 0.05);
        CHECK(p.holds);
        CHECK(p.lower_bound_verified);

        // An f that overshoots the partial sums is caught by the numeric check.
        const auto bad = k0_upper_bound_check(DiscoveryFamily::power(1.0), log_f(2.0, 0.0, 1.0), 1, 0.05);
        CHECK_FALSE(bad.lower_bound_verified);
    }

    TEST_CASE("K0 growth in 1/delta") {
        const std::vector<double> deltas{0.2, 0.1, 0.05, 0.02};
        // Polynomial case: D(1,t) = 1/(t+1) has partial sums ~ ln T, so m1 = 1.
        std::vector<double> a;
        double log_mean = 0.0;
        for (double d : deltas) {
            const auto K = k0(DiscoveryFamily::power(1.0), 1, d);
            a.push_back(static_cast<double>(K.value) * d);
            log_mean += std::log(a.back());
        }
        const double fit = std::exp(log_mean / static_cast<double>(a.size()));
        for (double v : a) CHECK(std::abs(v - fit) / fit <= 0.05);

        // Exponential case: ln K0 is convex and increasing in ln(1/delta).
        std::vector<double> x, y;
        for (double d : deltas) {
            const auto K = k0(DiscoveryFamily::log_harmonic(1.0), 1, d);
            x.push_back(std::log(1.0 / d));
            y.push_back(K.log_value);
        }
        double prev_slope = 0.0;
        for (std::size_t i = 1; i < x.size(); ++i) {
            const double slope = (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
            CHECK(slope > 0.0);
            CHECK(slope > prev_slope);
            prev_slope = slope;
        }
    }

    TEST_CASE("saturation rather than wraparound") {
        const auto r = k2_k3(1e6, 1e6, 1e6, 1e6, 1e-6, 1e-6, ExtendedCount::of(1));
        CHECK(r.k2.saturated);
        CHECK(r.k2.clamped() == std::numeric_limits<std::uint64_t>::max());
        CHECK(ExtendedCount::from_real(1e30L).saturated);
        CHECK(ExtendedCount::from_real(2.5L).value == 3);
        CHECK(ExtendedCount::inf().to_string() == "inf");
    }
}
