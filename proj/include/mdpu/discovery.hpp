#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace mdpu {

/// Parametric family of discovery probabilities D(j, t): the chance that one
/// explore play reveals a new action when j actions remain hidden and t - 1
/// consecutive explore plays at the state have failed.
struct DiscoveryFamily {
    enum class Kind { constant, power, harmonic_j, log_harmonic, table };

    Kind kind = Kind::constant;
    /// c for constant, alpha for power, m1 for log_harmonic; unused otherwise.
    double param = 0.0;
    /// Table rows. A single row applies to every j; otherwise row j-1 is used
    /// and the last row covers larger j. Entries past the end are 0.
    std::vector<std::vector<double>> table;

    static DiscoveryFamily constant(double c) { return {Kind::constant, c, {}}; }
    static DiscoveryFamily power(double alpha) { return {Kind::power, alpha, {}}; }
    static DiscoveryFamily harmonic_j() { return {Kind::harmonic_j, 0.0, {}}; }
    static DiscoveryFamily log_harmonic(double m1) { return {Kind::log_harmonic, m1, {}}; }
    static DiscoveryFamily from_table(std::vector<std::vector<double>> rows) {
        return {Kind::table, 0.0, std::move(rows)};
    }

    std::string describe() const;
};

const char* to_string(DiscoveryFamily::Kind kind);

/// Checks parameter ranges, the [0, 1] range and monotonicity in j on the
/// sampled grid j <= 32, t <= 10^4. Returns human-readable violations.
std::vector<std::string> validate_family(const DiscoveryFamily& fam);

/// D(j, t), clamped to [0, 1]. Throws InvalidInput for j == 0 or t == 0.
double discovery_prob(const DiscoveryFamily& fam, std::uint64_t j, std::uint64_t t);

struct NonDiscovery {
    /// prod_{t'=1..t} (1 - D(j, t')); 0 when below 1e-300.
    double value = 1.0;
    /// Natural log of the product, accumulated with compensated summation.
    double log_value = 0.0;
    bool underflow = false;
};

inline constexpr double kUnderflowFloor = 1e-300;

/// Probability that t consecutive explore plays with j hidden actions all fail.
NonDiscovery nondiscovery_product(const DiscoveryFamily& fam, std::uint64_t j, std::uint64_t t);

/// All prefixes of the product for t = 0..t_max (index t).
std::vector<double> nondiscovery_curve(const DiscoveryFamily& fam, std::uint64_t j, std::uint64_t t_max);

/// sum_{t=1..T} D(j, t) with Neumaier compensated summation. T == 0 gives 0.
double partial_sum(const DiscoveryFamily& fam, std::uint64_t j, std::uint64_t horizon);

/// Running compensated sum, exposed for callers that scan partial sums.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct DivergenceClass {
    enum class Kind { convergent, loglog, log, linear, unknown_numeric };
    Kind kind = Kind::unknown_numeric;
    /// (T, partial_sum(fam, 1, T)) at T = 10^2, 10^4, 10^6.
    std::vector<std::pair<std::uint64_t, double>> witness;
};

const char* to_string(DivergenceClass::Kind kind);

DivergenceClass divergence_class(const DiscoveryFamily& fam);

/// sup_t D(1, t), from the family's closed form.
double sup_discovery(const DiscoveryFamily& fam);

/// sum_{t>=1} D(1, t) for a convergent family; +inf when the series diverges.
double total_mass(const DiscoveryFamily& fam);

}  // namespace mdpu
