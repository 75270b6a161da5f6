#pragma once

#include <string>
#include <vector>

#include "evicalc/calculus.hpp"
#include "evicalc/errors.hpp"
#include "evicalc/joint.hpp"
#include "evicalc/proposition.hpp"

namespace evicalc {

// Uniform view of one update calculus for the auditor: how to score a
// batch of evidence against prior evidence, and how the calculus claims
// two such scores compose.
struct UpdateMeasure {
    std::string name;
    ValueKind kind = ValueKind::lambda;
    bool discrete = false;
    LogBase base = LogBase::e();
    EvokingScale scale = EvokingScale::defaults();

    // u(E; e): the measure assigned to new evidence E given prior evidence e.
    double update(const JointDistribution& d, const Proposition& hyp, const EvidenceSet& E,
                  const EvidenceSet& e) const {
        switch (kind) {
            case ValueKind::lambda:
                return d.likelihood_ratio(hyp, E, e);
            case ValueKind::weight:
                return weight_of_evidence(d, hyp, E, e, base);
            case ValueKind::cf:
                return certainty_factor_conditional(d, hyp, E, e);
            case ValueKind::evoking:
                return static_cast<double>(scale.strength(d.conditional(hyp, e.with(E))));
            case ValueKind::posterior:
                return d.conditional(hyp, e.with(E));
        }
        fail(Errc::invalid_parameter, "unsupported measure kind");
    }

    double update(const JointDistribution& d, const EvidenceSet& E, const EvidenceSet& e) const {
        return update(d, d.hypothesis(), E, e);
    }

    // The calculus's own composition rule for two scores.
    double combine(double a, double b) const {
        switch (kind) {
            case ValueKind::lambda:
                return combine_lambdas(a, b);
            case ValueKind::weight:
                return a + b;
            case ValueKind::cf:
                return mycin_combine(a, b);
            case ValueKind::evoking:
                return a + b;
            case ValueKind::posterior:
                break;
        }
        fail(Errc::invalid_parameter, "measure has no combination rule");
    }

    // Identity element of combine.
    double identity() const { return kind == ValueKind::lambda ? 1.0 : 0.0; }

    bool values_equal(double a, double b, double tol) const {
        if (discrete) return a == b;
        return std::abs(a - b) <= tol;
    }
};

inline UpdateMeasure lambda_measure() {
    UpdateMeasure m;
    m.name = "lambda";
    m.kind = ValueKind::lambda;
    return m;
}

inline UpdateMeasure weight_measure(const LogBase& base = LogBase::e()) {
    UpdateMeasure m;
    m.name = "weight";
    m.kind = ValueKind::weight;
    m.base = base;
    return m;
}

inline UpdateMeasure cf_measure() {
    UpdateMeasure m;
    m.name = "cf";
    m.kind = ValueKind::cf;
    return m;
}

inline UpdateMeasure evoking_measure(const EvokingScale& scale = EvokingScale::defaults()) {
    scale.validate();
    UpdateMeasure m;
    m.name = "evoking";
    m.kind = ValueKind::evoking;
    m.discrete = true;
    m.scale = scale;
    return m;
}

inline UpdateMeasure measure_from_name(const std::string& name,
                                       const LogBase& base = LogBase::e(),
                                       const EvokingScale& scale = EvokingScale::defaults()) {
    if (name == "lambda") return lambda_measure();
    if (name == "weight") return weight_measure(base);
    if (name == "cf") return cf_measure();
    if (name == "evoking") return evoking_measure(scale);
    fail(Errc::invalid_parameter, "unknown measure '" + name + "'");
}

inline std::vector<std::string> measure_names() { return {"lambda", "weight", "cf", "evoking"}; }

}  // namespace evicalc
