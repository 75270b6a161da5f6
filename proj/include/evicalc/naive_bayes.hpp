#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "evicalc/errors.hpp"
#include "evicalc/joint.hpp"
#include "evicalc/proposition.hpp"

namespace evicalc {

// One evidence variable of a naive-Bayes model: p(E|H) and p(E|~H).
struct Finding {
    std::string name;
    double p_given_h = 0.5;
    double p_given_not_h = 0.5;

    // Per-finding likelihood ratio for the positive literal.
    double ratio() const { return p_given_h / p_given_not_h; }

    // Ratio contributed by the finding being explicitly absent.
    double absent_ratio() const { return (1.0 - p_given_h) / (1.0 - p_given_not_h); }
};

// Prior plus per-finding conditionals, evidence conditionally independent
// given the hypothesis and its negation by construction. All parameters are
// restricted to the open interval (0,1): boundary cases are representable
// only through explicit joint tables and raise typed errors there.
struct NaiveBayesModel {
    std::string hypothesis = "H";
    double prior = 0.5;
    std::vector<Finding> findings;

    void validate() const {
        auto open01 = [](double v) { return v > 0.0 && v < 1.0; };
        if (!open01(prior))
            fail(Errc::invalid_parameter,
                 "prior " + std::to_string(prior) + " outside open interval (0,1)");
        Schema s{hypothesis, {}};
        for (const auto& f : findings) s.evidence.push_back(f.name);
        s.validate();
        for (const auto& f : findings)
            if (!open01(f.p_given_h) || !open01(f.p_given_not_h))
                fail(Errc::invalid_parameter,
                     "finding '" + f.name + "' has a parameter outside (0,1)");
    }

    Schema schema() const {
        Schema s{hypothesis, {}};
        for (const auto& f : findings) s.evidence.push_back(f.name);
        return s;
    }

    std::size_t n_findings() const { return findings.size(); }
};

// Expands the model to its exact joint: cell(h, a_1..a_n) =
// p(h) * prod_i p(a_i|h). The result satisfies the conditional-independence
// invariant by construction.
inline JointDistribution joint_from_naive_bayes(
    const NaiveBayesModel& model,
    std::size_t evidence_cap = JointDistribution::kDefaultEvidenceCap) {
    model.validate();
    const std::size_t n = model.n_findings();
    std::vector<double> cells(std::size_t{1} << (n + 1));
    using Mask = JointDistribution::Mask;
    for (Mask m = 0; m < cells.size(); ++m) {
        const bool h = (m >> n) & 1;
        double v = h ? model.prior : 1.0 - model.prior;
        for (std::size_t i = 0; i < n; ++i) {
            const double pe = h ? model.findings[i].p_given_h : model.findings[i].p_given_not_h;
            v *= (m >> i) & 1 ? pe : 1.0 - pe;
        }
        cells[m] = v;
    }
    return JointDistribution::from_cells(model.schema(), std::move(cells), evidence_cap);
}

// Symmetric parameterization of a target likelihood ratio:
// p(E|H) = r/(1+r), p(E|~H) = 1/(1+r), so p(E|H)/p(E|~H) = r.
// ratio 99 gives the familiar (.99, .01) pair.
inline Finding finding_with_ratio(std::string name, double ratio) {
    if (!(ratio > 0.0) || !std::isfinite(ratio))
        fail(Errc::invalid_parameter, "likelihood ratio must be positive and finite");
    return {std::move(name), ratio / (1.0 + ratio), 1.0 / (1.0 + ratio)};
}

}  // namespace evicalc
