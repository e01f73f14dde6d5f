#include "mdpu/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mdpu/mdp.hpp"

namespace mdpu {

namespace {

constexpr long double kSaturation = 9.2233720368547758e18L;  // 2^63
constexpr std::uint64_t kScanLimit = std::uint64_t{1} << 22;

// Ceiling that ignores round-off just above an integer (e.g. 4/0.1).
long double ceil_tol(long double x) {
    const long double r = std::round(x);
    if (std::fabs(x - r) <= 1e-12L * std::max(1.0L, std::fabs(x))) return r;
    return std::ceil(x);
}

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidInput(std::string(name) + " must be positive");
}

void require_probability(double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("delta must lie in (0, 1)");
}

long double as_real(const ExtendedCount& c) {
    if (c.infinite) return std::numeric_limits<long double>::infinity();
    if (c.saturated) return std::exp(static_cast<long double>(c.log_value));
    return static_cast<long double>(c.value);
}

struct Antiderivative {
    bool available = false;
    // F(t) and ln(F^{-1}(y)) for D(1, t) with t large.
    long double (*F)(long double t, double p) = nullptr;
    long double (*log_inverse)(long double y, double p) = nullptr;
};

Antiderivative antiderivative(const DiscoveryFamily& fam) {
    Antiderivative a;
    switch (fam.kind) {
        case DiscoveryFamily::Kind::harmonic_j:
            a.available = true;
            a.F = [](long double t, double) { return std::log(t + 1.0L); };
            a.log_inverse = [](long double y, double) { return y > 40 ? y : std::log(std::expm1(y)); };
            break;
        case DiscoveryFamily::Kind::power:
            a.available = true;
            a.F = [](long double t, double alpha) {
                if (alpha == 1.0) return std::log(t + 1.0L);
                return std::pow(t + 1.0L, 1.0L - alpha) / (1.0L - alpha);
            };
            a.log_inverse = [](long double y, double alpha) {
                if (alpha == 1.0) return y > 40 ? y : std::log(std::expm1(y));
                // (t + 1)^{1 - alpha} = (1 - alpha) y; ignore the +1 at this scale.
                return std::log((1.0L - alpha) * y) / (1.0L - alpha);
            };
            break;
        case DiscoveryFamily::Kind::log_harmonic:
            a.available = true;
            a.F = [](long double t, double m1) { return m1 * std::log(std::log(t) + 1.0L); };
            a.log_inverse = [](long double y, double m1) { return std::exp(y / m1) - 1.0L; };
            break;
        case DiscoveryFamily::Kind::constant:
        case DiscoveryFamily::Kind::table:
            break;
    }
    return a;
}

std::size_t table_length(const DiscoveryFamily& fam) {
    return fam.table.empty() ? 0 : fam.table.front().size();
}

/// Least M >= 1 with partial_sum(fam, 1, M) >= target.
ExtendedCount least_partial_sum_reaching(const DiscoveryFamily& fam, double target) {
    if (target <= 0.0) return ExtendedCount::of(1);

    if (fam.kind == DiscoveryFamily::Kind::constant) {
        const double c = fam.param;
        if (c <= 0.0) return ExtendedCount::inf();
        long double m = ceil_tol(static_cast<long double>(target) / c);
        if (m >= kSaturation) return ExtendedCount::from_real(m);
        auto sum = [&](long double k) { return c * static_cast<double>(k); };
        m = std::max(m, 1.0L);
        while (m > 1 && sum(m - 1) >= target) m -= 1;
        while (sum(m) < target) m += 1;
        return ExtendedCount::of(static_cast<std::uint64_t>(m));
    }

    const double total = total_mass(fam);
    if (std::isfinite(total) && total < target) return ExtendedCount::inf();

    const std::uint64_t limit =
        fam.kind == DiscoveryFamily::Kind::table ? std::min<std::uint64_t>(table_length(fam), kScanLimit) : kScanLimit;
    CompensatedSum acc;
    for (std::uint64_t t = 1; t <= limit; ++t) {
        acc.add(discovery_prob(fam, 1, t));
        if (acc.value() >= target) return ExtendedCount::of(t);
    }
    if (fam.kind == DiscoveryFamily::Kind::table) return ExtendedCount::inf();

    const auto anti = antiderivative(fam);
    if (!anti.available) return ExtendedCount::inf();

    // Continue with a midpoint-rule tail: sum_{t=M0+1}^{M} D(t) ~ F(M + 1/2) - F(M0 + 1/2).
    const long double m0 = static_cast<long double>(limit);
    const long double y = static_cast<long double>(target) - acc.value() + anti.F(m0 + 0.5L, fam.param);
    if (fam.kind == DiscoveryFamily::Kind::power && fam.param > 1.0 && y >= 0) return ExtendedCount::inf();
    const long double log_m = anti.log_inverse(y, fam.param);
    ExtendedCount out;
    out.exact = false;
    if (log_m < std::log(kSaturation)) {
        const long double m = std::max(std::ceil(std::exp(log_m) - 0.5L), m0 + 1);
        out.value = static_cast<std::uint64_t>(m);
        out.log_value = static_cast<double>(std::log(m));
    } else {
        out.saturated = true;
        out.value = std::numeric_limits<std::uint64_t>::max();
        out.log_value = static_cast<double>(log_m);
    }
    return out;
}

}  // namespace

ExtendedCount ExtendedCount::of(std::uint64_t v) {
    ExtendedCount c;
    c.value = v;
    c.log_value = v ? std::log(static_cast<double>(v)) : -std::numeric_limits<double>::infinity();
    return c;
}

ExtendedCount ExtendedCount::from_real(long double x) {
    if (std::isnan(x)) throw InvalidInput("bound evaluated to NaN");
    if (std::isinf(x)) return inf();
    const long double r = ceil_tol(x);
    if (r <= 0) return of(0);
    if (r >= kSaturation) {
        ExtendedCount c;
        c.value = std::numeric_limits<std::uint64_t>::max();
        c.saturated = true;
        c.log_value = static_cast<double>(std::log(r));
        return c;
    }
    return of(static_cast<std::uint64_t>(r));
}

ExtendedCount ExtendedCount::inf() {
    ExtendedCount c;
    c.infinite = true;
    c.value = std::numeric_limits<std::uint64_t>::max();
    c.log_value = std::numeric_limits<double>::infinity();
    return c;
}

std::string ExtendedCount::to_string() const {
    if (infinite) return "inf";
    std::ostringstream out;
    if (saturated) {
        out << "exp(" << log_value << ")";
        return out.str();
    }
    out << value;
    return out.str();
}

ExtendedCount k1_rmax(double num_states, double num_actions, double horizon, double rmax, double epsilon,
                      double delta) {
    require_positive(num_states, "|S|");
    require_positive(num_actions, "|A|");
    require_positive(horizon, "T");
    require_positive(rmax, "Rmax");
    require_positive(epsilon, "epsilon");
    require_probability(delta);
    const long double base = ceil_tol(4.0L * num_states * horizon * rmax / epsilon);
    const long double first = base * base * base;
    const long double l = std::log(static_cast<long double>(delta) / (6.0L * num_states * num_actions * num_actions));
    const long double second = ceil_tol(-6.0L * l * l * l);
    return ExtendedCount::from_real(std::max(first, second) + 1.0L);
}

ExtendedCount k1_urmax(double N, double k, double horizon, double rmax, double epsilon, double delta) {
    require_positive(N, "N");
    require_positive(k, "k");
    require_positive(horizon, "T");
    require_positive(rmax, "Rmax");
    require_positive(epsilon, "epsilon");
    require_probability(delta);
    const long double base = ceil_tol(4.0L * N * horizon * rmax / epsilon);
    const long double first = base * base * base;
    const long double l = std::log(8.0L * N * k / static_cast<long double>(delta));
    const long double second = ceil_tol(8.0L * l * l * l);
    return ExtendedCount::from_real(std::max(first, second) + 1.0L);
}

ExtendedCount k0(const DiscoveryFamily& fam, double N, double delta) {
    if (!(N >= 1.0)) throw InvalidInput("N must be at least 1");
    require_probability(delta);
    return least_partial_sum_reaching(fam, std::log(4.0 * N / delta));
}

ReplayLengths k2_k3(double N, double k, double horizon, double rmax, double epsilon, double delta,
                    const ExtendedCount& k0_value) {
    const auto k1_next = k1_urmax(N, k, horizon + 1.0, rmax, epsilon, delta);
    ReplayLengths out;
    const long double visits = std::max(as_real(k1_next), as_real(k0_value));
    if (std::isinf(visits)) {
        out.k2 = ExtendedCount::inf();
    } else {
        const long double inner = static_cast<long double>(N) * k * visits;
        out.k2 = ExtendedCount::from_real(2.0L * inner * std::sqrt(inner) * rmax / epsilon);
    }
    const long double a = 2.0L * rmax / epsilon;
    const long double l = std::log(4.0L / static_cast<long double>(delta));
    const long double b = 8.0L * l * l * l;
    out.k3 = ExtendedCount::from_real((2.0L * rmax + 1.0L) * std::max(a * a * a, b) / epsilon);
    return out;
}

// ---------------------------------------------------------------------------

double GrowthFunction::operator()(double T) const {
    switch (kind) {
        case Kind::linear: return m1 * T + m2;
        case Kind::log: return m1 * std::log(T + shift) + m2;
        case Kind::loglog: return m1 * std::log(std::log(T + shift) + 1.0) + m2;
        case Kind::family: return partial_sum(family, 1, static_cast<std::uint64_t>(std::floor(T)));
    }
    return 0.0;
}

double GrowthFunction::inverse(double y) const {
    switch (kind) {
        case Kind::linear: return (y - m2) / m1;
        case Kind::log: return std::exp((y - m2) / m1) - shift;
        case Kind::loglog: return std::exp(std::exp((y - m2) / m1) - 1.0) - shift;
        case Kind::family: break;
    }
    throw InvalidInput("partial-sum growth functions have no closed-form inverse");
}

double GrowthFunction::log_inverse(double y) const {
    switch (kind) {
        case Kind::linear: return std::log(inverse(y));
        case Kind::log: {
            const double z = (y - m2) / m1;
            return z > 700.0 ? z : std::log(inverse(y));
        }
        case Kind::loglog: {
            const double z = std::exp((y - m2) / m1) - 1.0;
            return z > 700.0 ? z : std::log(inverse(y));
        }
        case Kind::family: break;
    }
    throw InvalidInput("partial-sum growth functions have no closed-form inverse");
}

std::string GrowthFunction::describe() const {
    std::ostringstream out;
    switch (kind) {
        case Kind::linear: out << m1 << "*T + " << m2; break;
        case Kind::log: out << m1 << "*ln(T + " << shift << ") + " << m2; break;
        case Kind::loglog: out << m1 << "*ln(ln(T + " << shift << ") + 1) + " << m2; break;
        case Kind::family: out << "partial_sum(" << family.describe() << ")"; break;
    }
    return out.str();
}

ExtendedCount invert_growth(const GrowthFunction& f, double target) {
    if (f.kind == GrowthFunction::Kind::family) return least_partial_sum_reaching(f.family, target);
    if (f(1.0) >= target) return ExtendedCount::of(1);
    if (!(f.m1 > 0.0)) return ExtendedCount::inf();

    std::uint64_t lo = 1, hi = 2;
    while (f(static_cast<double>(hi)) < target) {
        lo = hi;
        if (hi >= (std::uint64_t{1} << 62)) {
            ExtendedCount c;
            c.saturated = true;
            c.exact = false;
            c.value = std::numeric_limits<std::uint64_t>::max();
            c.log_value = f.log_inverse(target);
            return c;
        }
        hi *= 2;
    }
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        if (f(static_cast<double>(mid)) >= target)
            hi = mid;
        else
            lo = mid;
    }
    return ExtendedCount::of(hi);
}

double lower_bound_target(double c, double delta) {
    if (!(c > 0.0 && c < 1.0)) throw InvalidInput("c must lie in (0, 1)");
    require_probability(delta);
    return c * std::log(delta) / std::log1p(-c);
}

ExtendedCount lower_bound_steps(const GrowthFunction& f, double c, double delta) {
    return invert_growth(f, lower_bound_target(c, delta));
}

ImpossibilityGap impossibility_gap(const DiscoveryFamily& fam, double r1, double r2) {
    if (!(r2 > r1)) throw InvalidInput("r2 must exceed r1");
    ImpossibilityGap out;
    out.total_mass = total_mass(fam);
    if (!std::isfinite(out.total_mass))
        throw InvalidInput("theorem inapplicable: discovery partial sums diverge");
    out.c1 = sup_discovery(fam);
    if (out.c1 >= 1.0) throw InvalidInput("theorem inapplicable: D(1,t) reaches 1");
    out.d = out.c1 == 0.0 ? 1.0 : std::pow(1.0 - out.c1, out.total_mass / out.c1);
    out.gap = out.d * (r2 - r1);
    return out;
}

K0BoundCheck k0_upper_bound_check(const DiscoveryFamily& fam, const GrowthFunction& f, double N, double delta,
                                  std::uint64_t verify_limit) {
    K0BoundCheck out;
    out.k0 = k0(fam, N, delta);
    out.f_inverse = invert_growth(f, std::log(4.0 * N / delta));

    CompensatedSum acc;
    out.lower_bound_verified = true;
    for (std::uint64_t t = 1; t <= verify_limit; ++t) {
        acc.add(discovery_prob(fam, 1, t));
        if (f(static_cast<double>(t)) > acc.value() + 1e-12) {
            out.lower_bound_verified = false;
            out.verified_up_to = t - 1;
            break;
        }
        out.verified_up_to = t;
    }

    if (out.k0.infinite)
        out.holds = out.f_inverse.infinite;
    else if (out.f_inverse.infinite)
        out.holds = true;
    else if (out.k0.finite() && out.f_inverse.finite())
        out.holds = out.k0.value <= out.f_inverse.value;
    else
        out.holds = out.k0.log_value <= out.f_inverse.log_value;
    return out;
}

}  // namespace mdpu
