#include "mdpu/discovery.hpp"

#include <algorithm>
#include <numbers>
#include <sstream>

#include "mdpu/mdp.hpp"

namespace mdpu {

const char* to_string(DiscoveryFamily::Kind kind) {
    switch (kind) {
        case DiscoveryFamily::Kind::constant: return "constant";
        case DiscoveryFamily::Kind::power: return "power";
        case DiscoveryFamily::Kind::harmonic_j: return "harmonic_j";
        case DiscoveryFamily::Kind::log_harmonic: return "log_harmonic";
        case DiscoveryFamily::Kind::table: return "table";
    }
    return "?";
}

const char* to_string(DivergenceClass::Kind kind) {
    switch (kind) {
        case DivergenceClass::Kind::convergent: return "convergent";
        case DivergenceClass::Kind::loglog: return "loglog";
        case DivergenceClass::Kind::log: return "log";
        case DivergenceClass::Kind::linear: return "linear";
        case DivergenceClass::Kind::unknown_numeric: return "unknown-numeric";
    }
    return "?";
}

std::string DiscoveryFamily::describe() const {
    std::ostringstream out;
    out << to_string(kind);
    switch (kind) {
        case Kind::constant: out << "(c=" << param << ")"; break;
        case Kind::power: out << "(alpha=" << param << ")"; break;
        case Kind::log_harmonic: out << "(m1=" << param << ")"; break;
        case Kind::table: out << "(" << table.size() << " rows)"; break;
        case Kind::harmonic_j: break;
    }
    return out.str();
}

namespace {

double raw_value(const DiscoveryFamily& fam, std::uint64_t j, std::uint64_t t) {
    const double td = static_cast<double>(t);
    switch (fam.kind) {
        case DiscoveryFamily::Kind::constant:
            return fam.param;
        case DiscoveryFamily::Kind::power:
            if (fam.param == 2.0) return 1.0 / ((td + 1.0) * (td + 1.0));
            return std::pow(td + 1.0, -fam.param);
        case DiscoveryFamily::Kind::harmonic_j:
            return 1.0 / (td + static_cast<double>(j));
        case DiscoveryFamily::Kind::log_harmonic:
            return fam.param / (td * (std::log(td) + 1.0));
        case DiscoveryFamily::Kind::table: {
            if (fam.table.empty()) return 0.0;
            const auto row = std::min<std::uint64_t>(j, fam.table.size()) - 1;
            const auto& values = fam.table[row];
            return t <= values.size() ? values[t - 1] : 0.0;
        }
    }
    return 0.0;
}

}  // namespace

double discovery_prob(const DiscoveryFamily& fam, std::uint64_t j, std::uint64_t t) {
    if (j == 0) throw InvalidInput("discovery probability needs j >= 1 hidden actions");
    if (t == 0) throw InvalidInput("discovery probability needs t >= 1");
    return std::clamp(raw_value(fam, j, t), 0.0, 1.0);
}

std::vector<std::string> validate_family(const DiscoveryFamily& fam) {
    std::vector<std::string> issues;
    switch (fam.kind) {
        case DiscoveryFamily::Kind::constant:
            if (!(fam.param >= 0.0 && fam.param <= 1.0)) issues.push_back("constant c must lie in [0, 1]");
            break;
        case DiscoveryFamily::Kind::power:
            if (!(fam.param >= 0.0) || !std::isfinite(fam.param)) issues.push_back("power alpha must be >= 0");
            break;
        case DiscoveryFamily::Kind::log_harmonic:
            if (!(fam.param > 0.0) || !std::isfinite(fam.param)) issues.push_back("log_harmonic m1 must be > 0");
            break;
        case DiscoveryFamily::Kind::table:
            if (fam.table.empty()) issues.push_back("table has no rows");
            for (const auto& row : fam.table)
                for (double v : row)
                    if (!(v >= 0.0 && v <= 1.0)) {
                        issues.push_back("table entry outside [0, 1]");
                        break;
                    }
            break;
        case DiscoveryFamily::Kind::harmonic_j:
            break;
    }
    if (!issues.empty()) return issues;

    // Monotone in j on the sampled grid. The harmonic family 1/(t + j) is
    // decreasing in j by construction and is accepted as the worked example
    // it comes from.
    if (fam.kind == DiscoveryFamily::Kind::harmonic_j) return issues;
    for (std::uint64_t t = 1; t <= 10'000; ++t) {
        double prev = discovery_prob(fam, 1, t);
        for (std::uint64_t j = 2; j <= 32; ++j) {
            const double cur = discovery_prob(fam, j, t);
            if (cur < prev) {
                issues.push_back("D(j,t) decreases in j at j=" + std::to_string(j) + ", t=" + std::to_string(t));
                return issues;
            }
            prev = cur;
        }
    }
    return issues;
}

NonDiscovery nondiscovery_product(const DiscoveryFamily& fam, std::uint64_t j, std::uint64_t t) {
    if (j == 0) throw InvalidInput("nondiscovery product needs j >= 1");
    NonDiscovery out;
    CompensatedSum log_acc;
    double product = 1.0;
    for (std::uint64_t k = 1; k <= t; ++k) {
        const double d = discovery_prob(fam, j, k);
        if (d >= 1.0) {
            out.value = 0.0;
            out.log_value = -std::numeric_limits<double>::infinity();
            return out;
        }
        product *= 1.0 - d;
        log_acc.add(std::log1p(-d));
    }
    out.log_value = log_acc.value();
    if (product < kUnderflowFloor) {
        out.value = 0.0;
        out.underflow = true;
    } else {
        out.value = product;
    }
    return out;
}

std::vector<double> nondiscovery_curve(const DiscoveryFamily& fam, std::uint64_t j, std::uint64_t t_max) {
    if (j == 0) throw InvalidInput("nondiscovery product needs j >= 1");
    std::vector<double> curve(t_max + 1, 1.0);
    double product = 1.0;
    for (std::uint64_t k = 1; k <= t_max; ++k) {
        product *= 1.0 - discovery_prob(fam, j, k);
        curve[k] = product < kUnderflowFloor ? 0.0 : product;
    }
    return curve;
}

double partial_sum(const DiscoveryFamily& fam, std::uint64_t j, std::uint64_t horizon) {
    if (j == 0) throw InvalidInput("partial sum needs j >= 1");
    CompensatedSum acc;
    for (std::uint64_t t = 1; t <= horizon; ++t) acc.add(discovery_prob(fam, j, t));
    return acc.value();
}

double sup_discovery(const DiscoveryFamily& fam) {
    switch (fam.kind) {
        case DiscoveryFamily::Kind::constant:
            return std::clamp(fam.param, 0.0, 1.0);
        case DiscoveryFamily::Kind::power:
        case DiscoveryFamily::Kind::harmonic_j:
        case DiscoveryFamily::Kind::log_harmonic:
            // All three are decreasing in t, so the supremum sits at t = 1.
            return discovery_prob(fam, 1, 1);
        case DiscoveryFamily::Kind::table: {
            double best = 0.0;
            if (!fam.table.empty())
                for (double v : fam.table.front()) best = std::max(best, std::clamp(v, 0.0, 1.0));
            return best;
        }
    }
    return 1.0;
}

double total_mass(const DiscoveryFamily& fam) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (fam.kind) {
        case DiscoveryFamily::Kind::constant:
            return fam.param > 0.0 ? inf : 0.0;
        case DiscoveryFamily::Kind::power:
            if (fam.param <= 1.0) return inf;
            if (fam.param == 2.0) return std::numbers::pi * std::numbers::pi / 6.0 - 1.0;
            return std::riemann_zeta(fam.param) - 1.0;
        case DiscoveryFamily::Kind::harmonic_j:
        case DiscoveryFamily::Kind::log_harmonic:
            return inf;
        case DiscoveryFamily::Kind::table: {
            if (fam.table.empty()) return 0.0;
            CompensatedSum acc;
            for (double v : fam.table.front()) acc.add(std::clamp(v, 0.0, 1.0));
            return acc.value();
        }
    }
    return inf;
}

DivergenceClass divergence_class(const DiscoveryFamily& fam) {
    DivergenceClass out;
    using K = DivergenceClass::Kind;
    switch (fam.kind) {
        case DiscoveryFamily::Kind::constant:
            out.kind = fam.param > 0.0 ? K::linear : K::convergent;
            break;
        case DiscoveryFamily::Kind::power:
            if (fam.param > 1.0)
                out.kind = K::convergent;
            else if (fam.param == 1.0)
                out.kind = K::log;
            else if (fam.param == 0.0)
                out.kind = K::linear;
            else
                out.kind = K::unknown_numeric;  // grows like T^(1 - alpha)
            break;
        case DiscoveryFamily::Kind::harmonic_j:
            out.kind = K::log;
            break;
        case DiscoveryFamily::Kind::log_harmonic:
            out.kind = K::loglog;
            break;
        case DiscoveryFamily::Kind::table:
            out.kind = K::convergent;
            break;
    }

    CompensatedSum acc;
    std::uint64_t next_mark = 100;
    for (std::uint64_t t = 1; t <= 1'000'000; ++t) {
        acc.add(discovery_prob(fam, 1, t));
        if (t == next_mark) {
            out.witness.emplace_back(t, acc.value());
            next_mark *= 100;
        }
    }
    return out;
}

}  // namespace mdpu
