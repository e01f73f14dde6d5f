#pragma once

#include <cstdint>
#include <limits>
#include <string>

#include "mdpu/discovery.hpp"

namespace mdpu {

/// Nonnegative integer that may be too large for 64 bits or infinite.
/// `log_value` is ln(value) and stays meaningful when `saturated`.
struct ExtendedCount {
    std::uint64_t value = 0;
    double log_value = -std::numeric_limits<double>::infinity();
    bool saturated = false;
    bool infinite = false;
    /// False when the value comes from an integral tail estimate rather than
    /// direct summation.
    bool exact = true;

    bool finite() const { return !infinite && !saturated; }
    /// Value usable as a loop threshold; saturated/infinite map to the max.
    std::uint64_t clamped() const { return finite() ? value : std::numeric_limits<std::uint64_t>::max(); }

    static ExtendedCount of(std::uint64_t v);
    static ExtendedCount from_real(long double x);  // ceil(x), saturating
    static ExtendedCount inf();
    std::string to_string() const;
};

/// R-MAX visit threshold:
/// max(ceil(4|S|T Rmax/eps)^3, ceil(-6 ln^3(delta / (6|S||A|^2)))) + 1.
ExtendedCount k1_rmax(double num_states, double num_actions, double horizon, double rmax, double epsilon,
                      double delta);

/// URMAX visit threshold:
/// max(ceil(4 N T Rmax/eps)^3, ceil(8 ln^3(8 N k / delta))) + 1.
ExtendedCount k1_urmax(double N, double k, double horizon, double rmax, double epsilon, double delta);

/// Explore-play threshold: least M with sum_{t<=M} D(1, t) >= ln(4N/delta).
/// Infinite when the family's total mass stays below the threshold. Past
/// 2^22 terms the sum is continued by an integral tail estimate (exact=false).
ExtendedCount k0(const DiscoveryFamily& fam, double N, double delta);

struct ReplayLengths {
    ExtendedCount k2;
    ExtendedCount k3;
};

/// K2 = ceil(2 (N k max(K1(T+1), K0))^{3/2} Rmax / eps) with the URMAX K1,
/// K3 = ceil((2 Rmax + 1) max((2 Rmax/eps)^3, 8 ln^3(4/delta)) / eps).
ReplayLengths k2_k3(double N, double k, double horizon, double rmax, double epsilon, double delta,
                    const ExtendedCount& k0_value);

/// Increasing function f used by the lower-bound and K0-bound calculators.
struct GrowthFunction {
    enum class Kind { linear, log, loglog, family };
    Kind kind = Kind::log;
    double m1 = 1.0;
    double m2 = 0.0;
    double shift = 0.0;  // argument offset: ln(T + shift), ln(ln(T + shift) + 1)
    DiscoveryFamily family;

    /// linear: m1 T + m2; log: m1 ln(T + shift) + m2;
    /// loglog: m1 ln(ln(T + shift) + 1) + m2; family: partial_sum(fam, 1, T).
    double operator()(double T) const;
    /// Closed-form inverse (not defined for the family kind).
    double inverse(double y) const;
    /// ln of the inverse, finite where the inverse overflows a double.
    double log_inverse(double y) const;
    std::string describe() const;
};

/// Least integer t >= 1 with f(t) >= target, via doubling then bisection (or
/// a direct scan for partial-sum functions). Infinite when unreachable.
ExtendedCount invert_growth(const GrowthFunction& f, double target);

/// Time below which no learner can find the hidden action with probability
/// >= 1 - delta: least t with f(t) >= c ln(delta) / ln(1 - c).
ExtendedCount lower_bound_steps(const GrowthFunction& f, double c, double delta);

/// Target value c ln(delta) / ln(1 - c).
double lower_bound_target(double c, double delta);

struct ImpossibilityGap {
    double c1 = 0.0;          // sup_t D(1, t)
    double total_mass = 0.0;  // sum_t D(1, t)
    double d = 1.0;           // (1 - c1)^(total / c1), 1 when c1 == 0
    double gap = 0.0;         // d (r2 - r1)
};

/// Probability floor d of never discovering the hidden action and the
/// resulting reward gap. Throws InvalidInput ("theorem inapplicable") for
/// divergent families or when sup D(1, t) reaches 1.
ImpossibilityGap impossibility_gap(const DiscoveryFamily& fam, double r1, double r2);

struct K0BoundCheck {
    bool holds = false;
    ExtendedCount k0;
    ExtendedCount f_inverse;  // least t with f(t) >= ln(4N/delta)
    /// Whether f(T) <= partial_sum(fam, 1, T) held on 1..verified_up_to.
    bool lower_bound_verified = false;
    std::uint64_t verified_up_to = 0;
};

/// Checks K0 <= f^{-1}(ln(4N/delta)) for an f that lower-bounds the
/// family's partial sums (verified numerically on 1..verify_limit).
K0BoundCheck k0_upper_bound_check(const DiscoveryFamily& fam, const GrowthFunction& f, double N, double delta,
                                  std::uint64_t verify_limit = 100'000);

}  // namespace mdpu
