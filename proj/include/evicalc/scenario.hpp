#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "evicalc/errors.hpp"
#include "evicalc/joint.hpp"
#include "evicalc/naive_bayes.hpp"

namespace evicalc {

// Deterministic RNG. Doubles are derived from raw mt19937_64 output so
// streams are reproducible across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Uniform in [0, 1).
    double uniform() {
        const std::uint64_t u = gen_();
        return static_cast<double>(u >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Exponential(1) variate; with a batch of these, normalization gives a
    // flat Dirichlet draw over the simplex.
    double exponential() { return -std::log(1.0 - uniform()); }

    std::uint64_t raw() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

// One table under audit: a joint distribution plus the generating model
// when the table came from a naive Bayes parameterization (in which case
// conditional independence holds by construction).
struct Scenario {
    std::string id;
    JointDistribution joint;
    std::optional<NaiveBayesModel> source;

    bool ci_by_construction() const { return source.has_value(); }
};

inline constexpr std::array<double, 6> kGridPriors = {0.01, 0.1, 0.3, 0.5, 0.7, 0.9};
inline constexpr std::array<double, 5> kGridRatios = {1.0 / 99.0, 1.0 / 3.0, 1.0, 3.0, 99.0};

struct FamilySpec {
    std::string family = "ci-grid";
    std::size_t n_evidence = 2;
    std::size_t samples = 500;
    std::uint64_t seed = 0;

    void validate() const {
        if (family != "ci-grid" && family != "ci-random" && family != "general-random")
            fail(Errc::invalid_parameter, "unknown scenario family '" + family + "'");
        if (n_evidence == 0)
            fail(Errc::invalid_parameter, "scenario family needs at least one evidence variable");
    }
};

namespace detail {

inline std::string scenario_id(const std::string& family, std::size_t k) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s#%03zu", family.c_str(), k);
    return buf;
}

inline std::vector<std::string> default_evidence_names(std::size_t n) {
    std::vector<std::string> names;
    names.reserve(n);
    for (std::size_t i = 0; i < n; ++i) names.push_back("E" + std::to_string(i + 1));
    return names;
}

}  // namespace detail

// Full cartesian grid: every prior crossed with every per-finding ratio
// tuple. 6 * 5^n scenarios; conditional independence holds throughout.
inline std::vector<Scenario> ci_grid_scenarios(std::size_t n_evidence) {
    const auto names = detail::default_evidence_names(n_evidence);
    std::vector<std::size_t> pick(n_evidence, 0);
    std::vector<Scenario> out;
    std::size_t k = 0;
    for (double prior : kGridPriors) {
        for (;;) {
            NaiveBayesModel m;
            m.prior = prior;
            for (std::size_t i = 0; i < n_evidence; ++i)
                m.findings.push_back(finding_with_ratio(names[i], kGridRatios[pick[i]]));
            m.validate();
            out.push_back({detail::scenario_id("ci-grid", k++), joint_from_naive_bayes(m), m});
            // odometer over ratio indices
            std::size_t i = 0;
            while (i < n_evidence && ++pick[i] == kGridRatios.size()) pick[i++] = 0;
            if (i == n_evidence) break;
        }
    }
    return out;
}

// Random naive Bayes parameterizations, all parameters U(0.02, 0.98).
inline std::vector<Scenario> ci_random_scenarios(std::size_t n_evidence, std::size_t samples,
                                                 Rng& rng) {
    const auto names = detail::default_evidence_names(n_evidence);
    std::vector<Scenario> out;
    out.reserve(samples);
    for (std::size_t k = 0; k < samples; ++k) {
        NaiveBayesModel m;
        m.prior = rng.uniform(0.02, 0.98);
        for (std::size_t i = 0; i < n_evidence; ++i)
            m.findings.push_back({names[i], rng.uniform(0.02, 0.98), rng.uniform(0.02, 0.98)});
        m.validate();
        out.push_back({detail::scenario_id("ci-random", k), joint_from_naive_bayes(m), m});
    }
    return out;
}

// Flat Dirichlet draws over all 2^(n+1) cells; no independence structure.
inline std::vector<Scenario> general_random_scenarios(std::size_t n_evidence,
                                                      std::size_t samples, Rng& rng) {
    const auto names = detail::default_evidence_names(n_evidence);
    const std::size_t cells = std::size_t{1} << (n_evidence + 1);
    std::vector<Scenario> out;
    out.reserve(samples);
    for (std::size_t k = 0; k < samples; ++k) {
        std::vector<double> mass(cells);
        for (double& c : mass) c = rng.exponential();
        Schema schema{"H", names};
        out.push_back({detail::scenario_id("general-random", k),
                       JointDistribution::from_cells(schema, std::move(mass)), std::nullopt});
    }
    return out;
}

inline std::vector<Scenario> ci_random_scenarios(std::size_t n_evidence, std::size_t samples,
                                                 std::uint64_t seed) {
    Rng rng(seed);
    return ci_random_scenarios(n_evidence, samples, rng);
}

inline std::vector<Scenario> general_random_scenarios(std::size_t n_evidence,
                                                      std::size_t samples, std::uint64_t seed) {
    Rng rng(seed);
    return general_random_scenarios(n_evidence, samples, rng);
}

inline std::vector<Scenario> generate_scenarios(const FamilySpec& spec) {
    spec.validate();
    if (spec.family == "ci-grid") return ci_grid_scenarios(spec.n_evidence);
    Rng rng(spec.seed);
    if (spec.family == "ci-random")
        return ci_random_scenarios(spec.n_evidence, spec.samples, rng);
    return general_random_scenarios(spec.n_evidence, spec.samples, rng);
}

}  // namespace evicalc
