#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "evicalc/errors.hpp"
#include "evicalc/joint.hpp"
#include "evicalc/proposition.hpp"

namespace evicalc {

// Logarithm base for weights of evidence. Natural log is the default;
// base 10 (or any base > 0, != 1) is selectable.
struct LogBase {
    double base = std::numbers::e;
    bool natural = true;

    static LogBase e() { return {}; }

    static LogBase of(double b) {
        if (!(b > 0.0) || b == 1.0 || !std::isfinite(b))
            fail(Errc::invalid_parameter, "log base must be positive, finite and != 1");
        return {b, false};
    }

    double log(double x) const { return natural ? std::log(x) : std::log(x) / std::log(base); }
    double exp(double w) const { return natural ? std::exp(w) : std::pow(base, w); }
};

enum class ValueKind : std::uint8_t { lambda, weight, cf, posterior, evoking };

inline const char* kind_name(ValueKind k) {
    switch (k) {
        case ValueKind::lambda:    return "lambda";
        case ValueKind::weight:    return "weight";
        case ValueKind::cf:        return "cf";
        case ValueKind::posterior: return "posterior";
        case ValueKind::evoking:   return "evoking";
    }
    return "?";
}

// Tagged value of one calculus. Construction enforces the legal range:
// lambda in (0, inf), weight finite, cf in [-1, 1], posterior in [0, 1],
// evoking strength an integer in {0..5}.
struct CalculusValue {
    ValueKind kind;
    double value;

    static CalculusValue lambda(double v) {
        if (!(v > 0.0) || !std::isfinite(v))
            fail(Errc::invalid_parameter, "lambda must lie in (0, inf)");
        return {ValueKind::lambda, v};
    }
    static CalculusValue weight(double v) {
        if (!std::isfinite(v)) fail(Errc::invalid_parameter, "weight must be finite");
        return {ValueKind::weight, v};
    }
    static CalculusValue cf(double v) {
        if (!(v >= -1.0 && v <= 1.0))
            fail(Errc::invalid_parameter, "certainty factor must lie in [-1, 1]");
        return {ValueKind::cf, v};
    }
    static CalculusValue posterior(double v) {
        if (!(v >= 0.0 && v <= 1.0))
            fail(Errc::invalid_parameter, "posterior must lie in [0, 1]");
        return {ValueKind::posterior, v};
    }
    static CalculusValue evoking(int v) {
        if (v < 0 || v > 5)
            fail(Errc::invalid_parameter, "evoking strength must lie in {0..5}");
        return {ValueKind::evoking, static_cast<double>(v)};
    }
};

// --- Likelihood-ratio / weight-of-evidence calculus ---------------------

// log lambda(h, E, e): the additive form of the likelihood ratio.
inline double weight_of_evidence(const JointDistribution& d, const Proposition& hyp,
                                 const EvidenceSet& E, const EvidenceSet& e,
                                 const LogBase& base = LogBase::e()) {
    return base.log(d.likelihood_ratio(hyp, E, e));
}

inline double weight_of_evidence(const JointDistribution& d, const EvidenceSet& E,
                                 const EvidenceSet& e, const LogBase& base = LogBase::e()) {
    return weight_of_evidence(d, d.hypothesis(), E, e, base);
}

// Combination function for the lambda calculus: plain multiplication,
// total on (0, inf) x (0, inf).
inline double combine_lambdas(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
        fail(Errc::invalid_parameter, "lambdas must lie in (0, inf)");
    return a * b;
}

// Combination function for weights: arithmetic sum. The empty sum is 0.
inline double combine_weights(std::span<const double> weights) {
    double s = 0.0;
    for (double w : weights) {
        if (!std::isfinite(w)) fail(Errc::invalid_parameter, "weight must be finite");
        s += w;
    }
    return s;
}

// Posterior reconstructed from a prior and a total weight of evidence:
// post_odds = prior_odds * base^w, returned as a probability.
inline double posterior_from_weight(double prior, double total_weight,
                                    const LogBase& base = LogBase::e()) {
    if (!(prior > 0.0 && prior < 1.0))
        fail(Errc::degenerate_belief, "prior must lie strictly inside (0,1)");
    const double odds = prior / (1.0 - prior) * base.exp(total_weight);
    return odds / (1.0 + odds);
}

// --- Certainty-factor calculus -------------------------------------------

// Change-in-belief measure from a prior and posterior probability:
//   (post - prior) / (1 - prior)  when belief increased,
//   (post - prior) / prior        when it decreased,
//   exactly 0                     when unchanged.
inline double certainty_factor_value(double prior, double posterior) {
    if (!(prior > 0.0 && prior < 1.0))
        fail(Errc::degenerate_belief,
             "certainty factor undefined at prior " + std::to_string(prior));
    if (posterior == prior) return 0.0;
    if (posterior > prior) return (posterior - prior) / (1.0 - prior);
    return (posterior - prior) / prior;
}

inline double certainty_factor(const JointDistribution& d, const Proposition& hyp,
                               const EvidenceSet& E) {
    const double prior = d.probability({hyp});
    const double post = d.conditional(hyp, E);
    return certainty_factor_value(prior, post);
}

inline double certainty_factor(const JointDistribution& d, const EvidenceSet& E) {
    return certainty_factor(d, d.hypothesis(), E);
}

// Certainty factor with every probability conditioned on prior evidence e.
// Reduces to certainty_factor when e is empty.
inline double certainty_factor_conditional(const JointDistribution& d,
                                           const Proposition& hyp, const EvidenceSet& E,
                                           const EvidenceSet& e) {
    const double prior = d.conditional(hyp, e);
    const double post = d.conditional(hyp, e.with(E));
    return certainty_factor_value(prior, post);
}

inline double certainty_factor_conditional(const JointDistribution& d, const EvidenceSet& E,
                               const EvidenceSet& e) {
    return certainty_factor_conditional(d, d.hypothesis(), E, e);
}

// Historically deployed combination function for certainty factors:
//   x + y - xy                      both nonnegative,
//   x + y + xy                      both nonpositive,
//   (x + y) / (1 - min(|x|,|y|))    mixed signs.
// Commutative on all inputs, associative to rounding. (+1, -1) is a
// contradiction and raises.
inline double mycin_combine(double x, double y) {
    if (!(x >= -1.0 && x <= 1.0) || !(y >= -1.0 && y <= 1.0))
        fail(Errc::invalid_parameter, "certainty factors must lie in [-1, 1]");
    if ((x == 1.0 && y == -1.0) || (x == -1.0 && y == 1.0))
        fail(Errc::contradictory_certainty,
             "cannot combine full confirmation with full disconfirmation");
    // certainty is absorbing; the polynomial forms drift off the boundary
    if (x == 1.0 || x == -1.0) return x;
    if (y == 1.0 || y == -1.0) return y;
    if (x >= 0.0 && y >= 0.0) return x + y - x * y;
    if (x <= 0.0 && y <= 0.0) return x + y + x * y;
    return (x + y) / (1.0 - std::min(std::abs(x), std::abs(y)));
}

// --- Evoking-strength calculus -------------------------------------------

// Monotone bucketing of a posterior probability into integer strengths.
// Strength 0 is reserved for probability exactly 0 and the maximum bucket
// value 5 for probability exactly 1 (a pathognomonic finding). Interior
// probabilities map through the strictly increasing bounds: strength k for
// p in (bounds[k-2], bounds[k-1]] counting from 1, values past the last
// bound staying in the top interior bucket.
struct EvokingScale {
    std::vector<double> bounds;

    static EvokingScale defaults() { return {{0.1, 0.35, 0.65, 0.95}}; }

    void validate() const {
        if (bounds.empty() || bounds.size() > 4)
            fail(Errc::invalid_parameter, "evoking scale needs 1 to 4 bounds");
        double prev = 0.0;
        for (double b : bounds) {
            if (!(b > prev && b < 1.0))
                fail(Errc::invalid_parameter,
                     "evoking bounds must be strictly increasing inside (0,1)");
            prev = b;
        }
    }

    int strength(double p) const {
        if (!(p >= 0.0 && p <= 1.0))
            fail(Errc::invalid_parameter, "posterior must lie in [0, 1]");
        if (p == 0.0) return 0;
        if (p == 1.0) return 5;
        int below = 0;
        for (double b : bounds)
            if (b < p) ++below;
        const int top = static_cast<int>(bounds.size());
        return std::min(1 + below, top);
    }

    // Distinct values the scale can produce (0 and 5 included).
    int distinct_buckets() const { return static_cast<int>(bounds.size()) + 2; }
};

inline int evoking_strength(const JointDistribution& d, const Proposition& hyp,
                            const EvidenceSet& E,
                            const EvokingScale& scale = EvokingScale::defaults()) {
    scale.validate();
    return scale.strength(d.conditional(hyp, E));
}

inline int evoking_strength(const JointDistribution& d, const EvidenceSet& E,
                            const EvokingScale& scale = EvokingScale::defaults()) {
    return evoking_strength(d, d.hypothesis(), E, scale);
}

// Disease score term: plain sum of evoking strengths.
inline long internist_score(std::span<const int> strengths) {
    long total = 0;
    for (int s : strengths) {
        if (s < 0 || s > 5)
            fail(Errc::invalid_parameter, "evoking strength must lie in {0..5}");
        total += s;
    }
    return total;
}

}  // namespace evicalc
