#include <cmath>
#include <numbers>

#include "doctest.h"
#include "mdpu/discovery.hpp"
#include "mdpu/mdp.hpp"

using namespace mdpu;

namespace {

std::vector<DiscoveryFamily> sample_families() {
    return {DiscoveryFamily::constant(0.1), DiscoveryFamily::constant(0.5), DiscoveryFamily::power(1.0),
            DiscoveryFamily::power(2.0),    DiscoveryFamily::harmonic_j(),  DiscoveryFamily::log_harmonic(1.0),
            DiscoveryFamily::from_table({{0.3, 0.2, 0.1}})};
}

}  // namespace

TEST_SUITE("discovery") {
    TEST_CASE("discovery_prob family semantics") {
        CHECK(discovery_prob(DiscoveryFamily::power(2.0), 1, 1) == doctest::Approx(0.25));
        CHECK(discovery_prob(DiscoveryFamily::harmonic_j(), 3, 7) == doctest::Approx(0.1));
        CHECK(discovery_prob(DiscoveryFamily::constant(0.0), 5, 9) == 0.0);
        CHECK(discovery_prob(DiscoveryFamily::log_harmonic(1.0), 1, 1) == 1.0);  // clamped
        CHECK(discovery_prob(DiscoveryFamily::log_harmonic(1.0), 1, 10) ==
              doctest::Approx(1.0 / (10.0 * (std::log(10.0) + 1.0))));
        const auto table = DiscoveryFamily::from_table({{0.3, 0.2}});
        CHECK(discovery_prob(table, 4, 2) == doctest::Approx(0.2));
        CHECK(discovery_prob(table, 1, 3) == 0.0);
        CHECK_THROWS_AS(discovery_prob(DiscoveryFamily::constant(0.5), 0, 1), InvalidInput);
        CHECK_THROWS_AS(discovery_prob(DiscoveryFamily::constant(0.5), 1, 0), InvalidInput);
    }

    TEST_CASE("validate_family rejects bad parameters") {
        CHECK(validate_family(DiscoveryFamily::constant(0.5)).empty());
        CHECK(validate_family(DiscoveryFamily::harmonic_j()).empty());
        CHECK_FALSE(validate_family(DiscoveryFamily::constant(1.5)).empty());
        CHECK_FALSE(validate_family(DiscoveryFamily::power(-1.0)).empty());
        CHECK_FALSE(validate_family(DiscoveryFamily::from_table({{0.5, 1.2}})).empty());
        // Per-j rows that decrease in j are rejected.
        CHECK_FALSE(validate_family(DiscoveryFamily::from_table({{0.5}, {0.2}})).empty());
    }

    TEST_CASE("nondiscovery_product examples") {
        CHECK(nondiscovery_product(DiscoveryFamily::power(2.0), 1, 3).value == doctest::Approx(5.0 / 8.0));
        CHECK(nondiscovery_product(DiscoveryFamily::harmonic_j(), 3, 7).value == doctest::Approx(0.3));
        for (const auto& f : sample_families()) CHECK(nondiscovery_product(f, 1, 0).value == 1.0);
    }

    TEST_CASE("closed forms of the non-discovery product") {
        const auto p2 = nondiscovery_curve(DiscoveryFamily::power(2.0), 1, 10'000);
        for (std::uint64_t t = 1; t <= 10'000; ++t) {
            const double exact = static_cast<double>(t + 2) / (2.0 * static_cast<double>(t + 1));
            REQUIRE(std::abs(p2[t] - exact) <= 1e-12);
        }
        for (std::uint64_t j = 1; j <= 8; ++j) {
            const auto h = nondiscovery_curve(DiscoveryFamily::harmonic_j(), j, 10'000);
            for (std::uint64_t t = 1; t <= 10'000; ++t) {
                const double exact = static_cast<double>(j) / static_cast<double>(t + j);
                REQUIRE(std::abs(h[t] - exact) <= 1e-12);
            }
        }
        for (double c : {0.1, 0.5, 0.9}) {
            for (std::uint64_t t : {1u, 10u, 100u, 300u}) {
                const double exact = std::pow(1.0 - c, static_cast<double>(t));
                CHECK(nondiscovery_product(DiscoveryFamily::constant(c), 2, t).value ==
                      doctest::Approx(exact).epsilon(1e-12));
            }
        }
    }

    TEST_CASE("underflow is flagged and the log value survives") {
        const auto nd = nondiscovery_product(DiscoveryFamily::constant(0.9), 1, 10'000);
        CHECK(nd.underflow);
        CHECK(nd.value == 0.0);
        CHECK(nd.log_value == doctest::Approx(10'000 * std::log(0.1)).epsilon(1e-12));
    }

    TEST_CASE("product bounds from the proofs") {
        for (const auto& f : sample_families()) {
            const double c1 = sup_discovery(f);
            CompensatedSum sum;
            double prod = 1.0;
            for (std::uint64_t t = 1; t <= 10'000; ++t) {
                const double d = discovery_prob(f, 1, t);
                sum.add(d);
                prod *= 1.0 - d;
                // 1 - x <= e^{-x}
                REQUIRE(prod <= std::exp(-sum.value()) * (1.0 + 1e-12) + 1e-300);
                if (c1 > 0.0 && c1 < 1.0 && prod > 1e-290) {
                    // 1 - x >= (1 - c1)^{x / c1} for x <= c1, checked above the subnormal range
                    REQUIRE(prod >= std::pow(1.0 - c1, sum.value() / c1) * (1.0 - 1e-12));
                }
            }
        }
    }

    TEST_CASE("partial sums") {
        CHECK(partial_sum(DiscoveryFamily::constant(0.5), 1, 10) == doctest::Approx(5.0));
        CHECK(partial_sum(DiscoveryFamily::harmonic_j(), 1, 3) == doctest::Approx(13.0 / 12.0));
        const double limit = std::numbers::pi * std::numbers::pi / 6.0 - 1.0;
        double prev = 0.0;
        for (std::uint64_t T : {10u, 1000u, 100000u, 1000000u}) {
            const double s = partial_sum(DiscoveryFamily::power(2.0), 1, T);
            CHECK(s <= limit);
            CHECK(s > prev);
            prev = s;
        }
        CHECK(prev == doctest::Approx(limit).epsilon(2e-6));

        for (const auto& f : sample_families()) {
            double last = 0.0;
            for (std::uint64_t T = 1; T <= 2000; T += 37) {
                const double s = partial_sum(f, 1, T);
                CHECK(s >= last);
                last = s;
            }
        }
    }

    TEST_CASE("monotone in j on the grid") {
        for (const auto& f : {DiscoveryFamily::constant(0.4), DiscoveryFamily::power(1.5),
                              DiscoveryFamily::log_harmonic(2.0)})
            for (std::uint64_t t = 1; t <= 200; ++t)
                for (std::uint64_t j = 1; j < 32; ++j) CHECK(discovery_prob(f, j + 1, t) >= discovery_prob(f, j, t));
    }

    TEST_CASE("divergence classes") {
        using K = DivergenceClass::Kind;
        CHECK(divergence_class(DiscoveryFamily::power(2.0)).kind == K::convergent);
        CHECK(divergence_class(DiscoveryFamily::power(1.0)).kind == K::log);
        CHECK(divergence_class(DiscoveryFamily::constant(0.5)).kind == K::linear);
        CHECK(divergence_class(DiscoveryFamily::constant(0.0)).kind == K::convergent);
        CHECK(divergence_class(DiscoveryFamily::harmonic_j()).kind == K::log);
        CHECK(divergence_class(DiscoveryFamily::from_table({{0.5}})).kind == K::convergent);
        CHECK(divergence_class(DiscoveryFamily::power(0.5)).kind == K::unknown_numeric);

        const auto lh = divergence_class(DiscoveryFamily::log_harmonic(1.0));
        CHECK(lh.kind == K::loglog);
        REQUIRE(lh.witness.size() == 3);
        // Fit m ln ln T + b through the two outer samples; the middle one
        // must sit within 5 %.
        auto x = [](std::uint64_t T) { return std::log(std::log(static_cast<double>(T))); };
        const auto& w = lh.witness;
        const double m = (w[2].second - w[0].second) / (x(w[2].first) - x(w[0].first));
        const double b = w[0].second - m * x(w[0].first);
        const double mid = m * x(w[1].first) + b;
        CHECK(std::abs(mid - w[1].second) / w[1].second < 0.05);
        CHECK(w[0].second == doctest::Approx(2.364432127194221).epsilon(1e-12));
        CHECK(w[1].second == doctest::Approx(2.963258291899975).epsilon(1e-12));
        CHECK(w[2].second == doctest::Approx(3.3355271026659654).epsilon(1e-12));
    }

    TEST_CASE("sup and total mass") {
        CHECK(sup_discovery(DiscoveryFamily::power(2.0)) == doctest::Approx(0.25));
        CHECK(sup_discovery(DiscoveryFamily::harmonic_j()) == doctest::Approx(0.5));
        CHECK(sup_discovery(DiscoveryFamily::log_harmonic(1.0)) == 1.0);
        CHECK(total_mass(DiscoveryFamily::power(2.0)) ==
              doctest::Approx(std::numbers::pi * std::numbers::pi / 6.0 - 1.0).epsilon(1e-15));
        CHECK(total_mass(DiscoveryFamily::from_table({{0.25, 0.5}})) == doctest::Approx(0.75));
        CHECK(std::isinf(total_mass(DiscoveryFamily::harmonic_j())));
    }
}
