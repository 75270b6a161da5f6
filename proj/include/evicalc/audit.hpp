#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "evicalc/io.hpp"
#include "evicalc/measure.hpp"
#include "evicalc/scenario.hpp"

namespace evicalc {

struct AuditOptions {
    double tol = 1e-9;          // modularity deviation tolerance
    double match_tol = 1e-4;    // collision search: component updates "equal"
    double phi_tol = 1e-2;      // collision search: combined updates "different"
    double mass_floor = 1e-12;  // conditioning events below this mass are skipped
    std::size_t max_listed = 8;
    std::size_t synth_budget = 128;       // counterpart-synthesis attempts
    std::size_t pair_budget = 20'000'000;  // pairwise comparisons in the scan
};

// A concrete, replayable demonstration of one violation.
struct Witness {
    std::string kind;
    double magnitude = 0.0;
    ojson detail;
};

struct AuditReport {
    std::string check;
    std::string axiom;
    std::string measure;
    ojson config = ojson::object();
    ojson tolerances = ojson::object();
    std::size_t scenarios = 0;
    std::size_t evaluations = 0;
    std::size_t skipped = 0;
    std::size_t violations = 0;
    ojson skip_reasons = ojson::object();
    double max_deviation = 0.0;
    bool violated = false;
    std::vector<Witness> witnesses;  // worst first
    std::vector<std::string> notes;
    ojson detail = ojson::object();

    const char* verdict() const { return violated ? "violated" : "holds"; }

    ojson to_json() const {
        ojson ws = ojson::array();
        for (const auto& w : witnesses)
            ws.push_back({{"kind", w.kind}, {"magnitude", w.magnitude}, {"detail", w.detail}});
        return {{"check", check},
                {"measure", measure},
                {"axiom", axiom},
                {"verdict", verdict()},
                {"counts",
                 {{"scenarios", scenarios},
                  {"evaluations", evaluations},
                  {"skipped", skipped},
                  {"violations", violations}}},
                {"skip_reasons", skip_reasons},
                {"max_deviation", max_deviation},
                {"tolerances", tolerances},
                {"config", config},
                {"witnesses", ws},
                {"notes", notes},
                {"detail", detail}};
    }

    std::string to_text() const;
};

namespace detail {

inline std::string fmt(double v, const char* spec = "%.12g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

inline void bump(ojson& counters, const std::string& key) {
    if (!counters.contains(key)) counters[key] = 0;
    counters[key] = counters[key].get<std::int64_t>() + 1;
}

// Keeps the `cap` largest-magnitude witnesses; ties keep the earlier one,
// so deterministic iteration order makes the list deterministic.
class WitnessKeeper {
public:
    explicit WitnessKeeper(std::size_t cap) : cap_(cap) {}

    void offer(Witness w) {
        auto pos = std::find_if(items_.begin(), items_.end(), [&](const Witness& x) {
            return w.magnitude > x.magnitude;
        });
        if (pos == items_.end() && items_.size() >= cap_) return;
        items_.insert(pos, std::move(w));
        if (items_.size() > cap_) items_.pop_back();
    }

    std::vector<Witness> take() { return std::move(items_); }

private:
    std::size_t cap_;
    std::vector<Witness> items_;
};

inline double mass_with_hypothesis(const JointDistribution& d, const Proposition& hyp_lit,
                                   const EvidenceSet& e) {
    std::vector<Proposition> lits(e.begin(), e.end());
    lits.push_back(hyp_lit);
    return d.probability(lits);
}

}  // namespace detail

// The masses every measure conditions on when scoring E against prior e.
inline bool conditioning_ok(const JointDistribution& d, const EvidenceSet& E,
                            const EvidenceSet& e, double floor) {
    const Proposition h = d.hypothesis();
    if (detail::mass_with_hypothesis(d, h, e) < floor) return false;
    if (detail::mass_with_hypothesis(d, h.negated(), e) < floor) return false;
    if (d.probability(e.with(E)) < floor) return false;
    return true;
}

// --- Modularity: independence from prior evidence --------------------------

inline AuditReport check_modularity(const UpdateMeasure& m, const std::vector<Scenario>& family,
                                    const AuditOptions& opt = {},
                                    ojson config = ojson::object()) {
    if (family.empty()) fail(Errc::invalid_parameter, "modularity audit needs scenarios");
    AuditReport rep;
    rep.check = "modularity";
    rep.axiom = "U(H,E,e) = U(H,E,{}) for every prior evidence e";
    rep.measure = m.name;
    rep.config = std::move(config);
    rep.tolerances = {{"tol", opt.tol}, {"mass_floor", opt.mass_floor}};
    detail::WitnessKeeper keep(opt.max_listed);
    std::size_t violating_scenarios = 0;

    for (const Scenario& s : family) {
        ++rep.scenarios;
        const Schema& schema = s.joint.schema();
        const Proposition h = s.joint.hypothesis();
        bool violated_here = false;
        for (std::size_t i = 0; i < schema.evidence.size(); ++i) {
            std::vector<std::string> others;
            for (std::size_t j = 0; j < schema.evidence.size(); ++j)
                if (j != i) others.push_back(schema.evidence[j]);
            const auto contexts = evidence_assignments(others, false);
            for (bool pol : {true, false}) {
                const EvidenceSet E = EvidenceSet::of({{schema.evidence[i], pol}});
                double u0 = 0.0;
                bool have_u0 = false;
                std::string u0_skip = "mass-floor";
                if (conditioning_ok(s.joint, E, EvidenceSet{}, opt.mass_floor)) {
                    try {
                        u0 = m.update(s.joint, h, E, EvidenceSet{});
                        have_u0 = true;
                    } catch (const CalcError& err) {
                        u0_skip = errc_name(err.code());
                    }
                }
                for (const EvidenceSet& e : contexts) {
                    if (!have_u0) {
                        ++rep.skipped;
                        detail::bump(rep.skip_reasons, u0_skip);
                        continue;
                    }
                    if (!conditioning_ok(s.joint, E, e, opt.mass_floor)) {
                        ++rep.skipped;
                        detail::bump(rep.skip_reasons, "mass-floor");
                        continue;
                    }
                    double u;
                    try {
                        u = m.update(s.joint, h, E, e);
                    } catch (const CalcError& err) {
                        ++rep.skipped;
                        detail::bump(rep.skip_reasons, errc_name(err.code()));
                        continue;
                    }
                    ++rep.evaluations;
                    const double dev = std::abs(u - u0);
                    rep.max_deviation = std::max(rep.max_deviation, dev);
                    if (!m.values_equal(u, u0, opt.tol)) {
                        ++rep.violations;
                        violated_here = true;
                        keep.offer({"modularity", dev,
                                    {{"scenario", s.id},
                                     {"hypothesis", schema.hypothesis},
                                     {"E", to_string(*E.begin())},
                                     {"e", evidence_to_json(e)},
                                     {"update_with_prior", u},
                                     {"update_baseline", u0},
                                     {"deviation", dev},
                                     {"model", model_to_json(s)}}});
                    }
                }
            }
        }
        if (violated_here) ++violating_scenarios;
    }
    rep.witnesses = keep.take();
    rep.violated = rep.violations > 0;
    rep.detail["violating_scenarios"] = violating_scenarios;
    return rep;
}

// --- Existence of a parallel-combination function --------------------------

namespace detail {

struct PhiContext {
    std::size_t scenario_index;
    Proposition first, second;
    EvidenceSet e;
    double u1, u2, u12;
};

inline ojson phi_side(const std::vector<Scenario>& family, const PhiContext& t) {
    const Scenario& s = family[t.scenario_index];
    return {{"scenario", s.id},        {"E1", to_string(t.first)},
            {"E2", to_string(t.second)}, {"e", evidence_to_json(t.e)},
            {"u1", t.u1},              {"u2", t.u2},
            {"u12", t.u12},            {"model", model_to_json(s)}};
}

// Monotone bisection over t in [-30, 30]; f must be monotone in t.
// Returns false when the target is outside f's range on the bracket.
template <class F>
bool bisect_monotone(F&& f, double target, double& t_out) {
    double lo = -30.0, hi = 30.0;
    const double flo = f(lo), fhi = f(hi);
    const bool increasing = fhi >= flo;
    const double fmin = std::min(flo, fhi), fmax = std::max(flo, fhi);
    if (target < fmin || target > fmax) return false;
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        const bool go_right = increasing ? fm < target : fm > target;
        (go_right ? lo : hi) = mid;
    }
    t_out = 0.5 * (lo + hi);
    return true;
}

struct SynthResult {
    NaiveBayesModel model;
    double u1, u2, u12;
};

// Builds a second naive-Bayes model at a different prior whose component
// updates match the origin tuple's (u1, u2); its combined update then
// exposes any prior dependence of the combined value. Every certainty
// factor here is evaluated from the expanded joint, never from a formula
// shortcut.
inline std::optional<SynthResult> synthesize_cf_counterpart(const NaiveBayesModel& origin,
                                                            const Proposition& lit1,
                                                            const Proposition& lit2, double u1,
                                                            double u2, double margin,
                                                            double min_prior_shift) {
    std::size_t i1 = origin.findings.size(), i2 = origin.findings.size();
    for (std::size_t i = 0; i < origin.findings.size(); ++i) {
        if (origin.findings[i].name == lit1.variable) i1 = i;
        if (origin.findings[i].name == lit2.variable) i2 = i;
    }
    if (i1 >= origin.findings.size() || i2 >= origin.findings.size() || i1 == i2)
        return std::nullopt;

    const EvidenceSet E1 = EvidenceSet::of({lit1});
    const EvidenceSet E2 = EvidenceSet::of({lit2});
    const EvidenceSet E12 = EvidenceSet::of({lit1, lit2});

    const double p = origin.prior;
    const double candidates[] = {p / 2.0, (1.0 + p) / 2.0, p / 4.0, (3.0 + p) / 4.0};

    std::optional<SynthResult> best;
    double best_shift = -1.0;
    for (double prior : candidates) {
        if (!(prior > 1e-3 && prior < 1.0 - 1e-3)) continue;
        if (std::abs(prior - p) < min_prior_shift) continue;
        NaiveBayesModel m = origin;
        m.prior = prior;

        auto cf_after = [&](const EvidenceSet& E, const EvidenceSet& e) {
            const JointDistribution d = joint_from_naive_bayes(m);
            return certainty_factor_conditional(d, d.hypothesis(), E, e);
        };

        double t1;
        auto eval1 = [&](double t) {
            m.findings[i1] = finding_with_ratio(m.findings[i1].name, std::exp(t));
            return cf_after(E1, EvidenceSet{});
        };
        if (!bisect_monotone(eval1, u1, t1)) continue;
        m.findings[i1] = finding_with_ratio(m.findings[i1].name, std::exp(t1));
        if (std::abs(cf_after(E1, EvidenceSet{}) - u1) > margin) continue;

        double t2;
        auto eval2 = [&](double t) {
            m.findings[i2] = finding_with_ratio(m.findings[i2].name, std::exp(t));
            return cf_after(E2, E1);
        };
        if (!bisect_monotone(eval2, u2, t2)) continue;
        m.findings[i2] = finding_with_ratio(m.findings[i2].name, std::exp(t2));

        SynthResult r;
        r.model = m;
        r.u1 = cf_after(E1, EvidenceSet{});
        r.u2 = cf_after(E2, E1);
        r.u12 = cf_after(E12, EvidenceSet{});
        if (std::abs(r.u1 - u1) > margin || std::abs(r.u2 - u2) > margin) continue;
        // prefer the counterpart farthest from the origin prior
        const double shift = std::abs(prior - p);
        if (shift > best_shift) {
            best_shift = shift;
            best = std::move(r);
        }
    }
    return best;
}

}  // namespace detail

// Refutation search for the existence of any combination function phi with
// U(H,E1E2,e) = phi(U(H,E1,e), U(H,E2,E1 e)). Two scenarios whose component
// updates agree while their combined updates differ refute phi; finding
// none refutes nothing, and the report says so. Stage one scans sampled
// scenario pairs; stage two (cf only, parametric families) synthesizes a
// matched counterpart at a different prior, where the mixed-sign branches
// of the cf definition leave room for disagreement.
inline AuditReport check_update_property(const UpdateMeasure& m,
                                         const std::vector<Scenario>& family,
                                         const AuditOptions& opt = {},
                                         ojson config = ojson::object()) {
    if (family.empty()) fail(Errc::invalid_parameter, "update-property audit needs scenarios");
    AuditReport rep;
    rep.check = "update-property";
    rep.axiom = "some phi has U(H,E1E2,e) = phi(U(H,E1,e), U(H,E2,E1 e))";
    rep.measure = m.name;
    rep.config = std::move(config);
    rep.tolerances = {{"match_tol", opt.match_tol},
                      {"phi_tol", opt.phi_tol},
                      {"mass_floor", opt.mass_floor}};
    detail::WitnessKeeper keep(opt.max_listed);

    std::vector<detail::PhiContext> tuples;
    for (std::size_t si = 0; si < family.size(); ++si) {
        const Scenario& s = family[si];
        ++rep.scenarios;
        const Schema& schema = s.joint.schema();
        if (schema.evidence.size() < 2)
            fail(Errc::invalid_parameter, "update-property audit needs two evidence variables");
        const Proposition h = s.joint.hypothesis();
        for (std::size_t i = 0; i < schema.evidence.size(); ++i) {
            for (std::size_t j = 0; j < schema.evidence.size(); ++j) {
                if (i == j) continue;
                std::vector<std::string> others;
                for (std::size_t k = 0; k < schema.evidence.size(); ++k)
                    if (k != i && k != j) others.push_back(schema.evidence[k]);
                const auto contexts = evidence_assignments(others, true);
                for (bool pol_i : {true, false}) {
                    for (bool pol_j : {true, false}) {
                        const Proposition lit1{schema.evidence[i], pol_i};
                        const Proposition lit2{schema.evidence[j], pol_j};
                        const EvidenceSet E1 = EvidenceSet::of({lit1});
                        const EvidenceSet E2 = EvidenceSet::of({lit2});
                        const EvidenceSet E12 = EvidenceSet::of({lit1, lit2});
                        for (const EvidenceSet& e : contexts) {
                            if (!conditioning_ok(s.joint, E1, e, opt.mass_floor) ||
                                !conditioning_ok(s.joint, E2, e.with(lit1), opt.mass_floor) ||
                                s.joint.probability(e.with(E12)) < opt.mass_floor) {
                                ++rep.skipped;
                                detail::bump(rep.skip_reasons, "mass-floor");
                                continue;
                            }
                            detail::PhiContext t{si, lit1, lit2, e, 0, 0, 0};
                            try {
                                t.u1 = m.update(s.joint, h, E1, e);
                                t.u2 = m.update(s.joint, h, E2, e.with(lit1));
                                t.u12 = m.update(s.joint, h, E12, e);
                            } catch (const CalcError& err) {
                                ++rep.skipped;
                                detail::bump(rep.skip_reasons, errc_name(err.code()));
                                continue;
                            }
                            ++rep.evaluations;
                            tuples.push_back(std::move(t));
                        }
                    }
                }
            }
        }
    }

    // stage one: scan component-matched pairs. The combined-difference
    // threshold scales with the combined values so that measures with
    // unbounded range (lambda) do not turn component slack amplified by
    // an exact phi into fake collisions.
    std::vector<std::size_t> order(tuples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        if (tuples[x].u1 != tuples[y].u1) return tuples[x].u1 < tuples[y].u1;
        return x < y;
    });
    std::size_t pairs_checked = 0;
    bool truncated = false;
    std::size_t lo = 0;
    for (std::size_t k = 0; k < order.size() && !truncated; ++k) {
        const detail::PhiContext& y = tuples[order[k]];
        while (y.u1 - tuples[order[lo]].u1 > opt.match_tol) ++lo;
        for (std::size_t q = lo; q < k; ++q) {
            if (++pairs_checked > opt.pair_budget) {
                truncated = true;
                break;
            }
            const detail::PhiContext& x = tuples[order[q]];
            if (std::abs(x.u2 - y.u2) > opt.match_tol) continue;
            const double diff = std::abs(x.u12 - y.u12);
            rep.max_deviation = std::max(rep.max_deviation, diff);
            const double threshold =
                opt.phi_tol * std::max({1.0, std::abs(x.u12), std::abs(y.u12)});
            if (diff > threshold) {
                ++rep.violations;
                keep.offer({"collision", diff,
                            {{"left", detail::phi_side(family, x)},
                             {"right", detail::phi_side(family, y)},
                             {"component_gap_u1", std::abs(x.u1 - y.u1)},
                             {"component_gap_u2", std::abs(x.u2 - y.u2)},
                             {"combined_gap", diff}}});
            }
        }
    }

    // stage two: counterpart synthesis for cf over parametric scenarios.
    std::size_t synth_attempts = 0, synth_found = 0;
    if (m.kind == ValueKind::cf) {
        for (const detail::PhiContext& t : tuples) {
            if (synth_attempts >= opt.synth_budget || synth_found >= 4) break;
            const Scenario& s = family[t.scenario_index];
            if (!s.source || !t.e.empty()) continue;
            if (t.u1 * t.u2 >= 0.0) continue;
            if (std::min(std::abs(t.u1), std::abs(t.u2)) < 0.05) continue;
            if (std::max(std::abs(t.u1), std::abs(t.u2)) > 0.95) continue;
            ++synth_attempts;
            auto r = detail::synthesize_cf_counterpart(*s.source, t.first, t.second, t.u1,
                                                       t.u2, opt.match_tol * 0.5, 0.05);
            if (!r) continue;
            if (std::abs(r->u1 - t.u1) > opt.match_tol) continue;
            if (std::abs(r->u2 - t.u2) > opt.match_tol) continue;
            const double diff = std::abs(r->u12 - t.u12);
            rep.max_deviation = std::max(rep.max_deviation, diff);
            const double threshold =
                opt.phi_tol * std::max({1.0, std::abs(r->u12), std::abs(t.u12)});
            if (diff <= threshold) continue;
            ++rep.violations;
            ++synth_found;
            ojson right = {{"scenario", s.id + "/counterpart"},
                           {"E1", to_string(t.first)},
                           {"E2", to_string(t.second)},
                           {"e", evidence_to_json(t.e)},
                           {"u1", r->u1},
                           {"u2", r->u2},
                           {"u12", r->u12},
                           {"model", model_to_json(r->model)}};
            keep.offer({"collision", diff,
                        {{"left", detail::phi_side(family, t)},
                         {"right", std::move(right)},
                         {"component_gap_u1", std::abs(r->u1 - t.u1)},
                         {"component_gap_u2", std::abs(r->u2 - t.u2)},
                         {"combined_gap", diff}}});
        }
    }

    rep.witnesses = keep.take();
    rep.violated = rep.violations > 0;
    rep.detail["tuples"] = tuples.size();
    rep.detail["pairs_checked"] = pairs_checked;
    rep.detail["pair_scan_truncated"] = truncated;
    rep.detail["synthesis_attempts"] = synth_attempts;
    rep.detail["synthesis_collisions"] = synth_found;
    rep.notes.push_back(
        "existence of phi is tested by refutation: 'holds' means no collision was found "
        "within this search budget, not a proof that phi exists");
    return rep;
}

// --- Posterior-as-update reductio ------------------------------------------

inline AuditReport check_marginal_independence_trap(const std::vector<Scenario>& family,
                                                    const AuditOptions& opt = {},
                                                    ojson config = ojson::object()) {
    if (family.empty()) fail(Errc::invalid_parameter, "trap audit needs scenarios");
    AuditReport rep;
    rep.check = "marginal-independence-trap";
    rep.axiom = "a modular posterior update forces p(H|e) = p(H): no updating at all";
    rep.measure = "posterior";
    rep.config = std::move(config);
    rep.tolerances = {{"tol", opt.tol}, {"mass_floor", opt.mass_floor}};
    detail::WitnessKeeper keep(opt.max_listed);

    std::size_t modular_degenerate = 0, nonmodular_informative = 0, modular_informative = 0;
    ojson degenerate_ids = ojson::array(), anomalous_ids = ojson::array();

    for (const Scenario& s : family) {
        ++rep.scenarios;
        const Schema& schema = s.joint.schema();
        const Proposition h = s.joint.hypothesis();
        const double prior = s.joint.probability({h});
        double modularity_dev = 0.0, info_dev = 0.0;

        for (std::size_t i = 0; i < schema.evidence.size(); ++i) {
            std::vector<std::string> others;
            for (std::size_t j = 0; j < schema.evidence.size(); ++j)
                if (j != i) others.push_back(schema.evidence[j]);
            const auto contexts = evidence_assignments(others, false);
            for (bool pol : {true, false}) {
                const EvidenceSet E = EvidenceSet::of({{schema.evidence[i], pol}});
                if (s.joint.probability(E) < opt.mass_floor) {
                    rep.skipped += contexts.size();
                    detail::bump(rep.skip_reasons, "mass-floor");
                    continue;
                }
                const double u0 = s.joint.conditional(h, E);
                for (const EvidenceSet& e : contexts) {
                    if (s.joint.probability(e.with(E)) < opt.mass_floor) {
                        ++rep.skipped;
                        detail::bump(rep.skip_reasons, "mass-floor");
                        continue;
                    }
                    const double u = s.joint.conditional(h, e.with(E));
                    ++rep.evaluations;
                    const double dev = std::abs(u - u0);
                    modularity_dev = std::max(modularity_dev, dev);
                    rep.max_deviation = std::max(rep.max_deviation, dev);
                    if (dev > opt.tol) {
                        keep.offer({"posterior-modularity", dev,
                                    {{"scenario", s.id},
                                     {"hypothesis", schema.hypothesis},
                                     {"E", to_string(*E.begin())},
                                     {"e", evidence_to_json(e)},
                                     {"posterior_with_prior", u},
                                     {"posterior_baseline", u0},
                                     {"deviation", dev},
                                     {"model", model_to_json(s)}}});
                    }
                }
            }
        }
        for (const EvidenceSet& e : evidence_assignments(schema.evidence, false)) {
            if (s.joint.probability(e) < opt.mass_floor) continue;
            info_dev = std::max(info_dev, std::abs(s.joint.conditional(h, e) - prior));
        }

        const bool modular = modularity_dev <= opt.tol;
        const bool informative = info_dev > opt.tol;
        if (modular && !informative) {
            ++modular_degenerate;
            degenerate_ids.push_back(s.id);
        } else if (modular && informative) {
            ++modular_informative;
            anomalous_ids.push_back(s.id);
        } else {
            ++nonmodular_informative;
            ++rep.violations;
        }
    }

    rep.witnesses = keep.take();
    rep.violated = rep.violations > 0;
    rep.detail["modular_degenerate"] = modular_degenerate;
    rep.detail["nonmodular_informative"] = nonmodular_informative;
    rep.detail["modular_informative"] = modular_informative;
    rep.detail["degenerate_scenarios"] = degenerate_ids;
    rep.detail["anomalous_scenarios"] = anomalous_ids;
    rep.notes.push_back(
        "posterior-as-update is modular only on scenarios where evidence is marginally "
        "independent of the hypothesis, i.e. where updating does nothing");
    rep.notes.push_back("scenarios both modular and informative found: " +
                        std::to_string(modular_informative));
    return rep;
}

// --- cf ~ posterior in the small-prior limit -------------------------------

inline AuditReport check_cf_limit_case(const std::vector<Scenario>& family, double epsilon,
                                       const AuditOptions& opt = {},
                                       ojson config = ojson::object()) {
    AuditReport rep;
    rep.check = "cf-limit";
    rep.axiom = "for confirming evidence, CF(H,E,{}) -> p(H|E) as p(H) -> 0";
    rep.measure = "cf";
    rep.config = std::move(config);
    rep.tolerances = {{"epsilon", epsilon}, {"mass_floor", opt.mass_floor}};
    detail::WitnessKeeper keep(opt.max_listed);

    std::size_t excluded = 0;
    double max_error = 0.0, bound_at_max = 0.0;
    ojson worst = ojson::object();
    for (const Scenario& s : family) {
        const Proposition h = s.joint.hypothesis();
        const double prior = s.joint.probability({h});
        if (!(prior < epsilon)) {
            ++excluded;
            continue;
        }
        ++rep.scenarios;
        if (!(prior > 0.0)) {
            ++rep.skipped;
            detail::bump(rep.skip_reasons, "mass-floor");
            continue;
        }
        for (const EvidenceSet& e : evidence_assignments(s.joint.schema().evidence, false)) {
            if (s.joint.probability(e) < opt.mass_floor) {
                ++rep.skipped;
                detail::bump(rep.skip_reasons, "mass-floor");
                continue;
            }
            const double post = s.joint.conditional(h, e);
            if (post <= prior) continue;  // only confirming evidence approximates
            const double cf = certainty_factor_value(prior, post);
            const double err = std::abs(cf - post);
            const double bound = prior * (1.0 - post) / (1.0 - prior);
            ++rep.evaluations;
            if (err > max_error) {
                max_error = err;
                bound_at_max = bound;
                worst = {{"scenario", s.id},
                         {"E", evidence_to_json(e)},
                         {"posterior", post},
                         {"cf", cf},
                         {"error", err},
                         {"bound", bound},
                         {"model", model_to_json(s)}};
            }
            rep.max_deviation = std::max(rep.max_deviation, err);
            if (err > bound + 1e-12) {
                ++rep.violations;
                keep.offer({"cf-limit-bound", err - bound,
                            {{"scenario", s.id},
                             {"E", evidence_to_json(e)},
                             {"error", err},
                             {"bound", bound},
                             {"model", model_to_json(s)}}});
            }
        }
    }
    rep.witnesses = keep.take();
    rep.violated = rep.violations > 0;
    rep.detail["max_error"] = max_error;
    rep.detail["bound_at_max_error"] = bound_at_max;
    rep.detail["worst_case"] = worst;
    rep.detail["excluded_scenarios"] = excluded;
    rep.notes.push_back("p(H|E) - CF(H,E,{}) equals p(H)(1 - p(H|E))/(1 - p(H)) identically "
                        "for confirming evidence; the bound is checked numerically");
    return rep;
}

// --- The canned two-finding demonstration ----------------------------------

inline NaiveBayesModel counterexample_model() {
    NaiveBayesModel m;
    m.prior = 0.01;
    m.findings = {{"E1", 0.99, 0.01}, {"E2", 0.99, 0.01}};
    return m;
}

inline AuditReport reproduce_mycin_counterexample(const AuditOptions& opt = {},
                                                  ojson config = ojson::object()) {
    const NaiveBayesModel m = counterexample_model();
    const Scenario s{"counterexample", joint_from_naive_bayes(m), m};
    AuditReport rep = check_modularity(cf_measure(), {s}, opt, std::move(config));
    rep.check = "mycin-counterexample";

    const JointDistribution& d = s.joint;
    const Proposition h = d.hypothesis();
    const EvidenceSet e1 = EvidenceSet::of({{"E1", true}});
    const EvidenceSet e2 = EvidenceSet::of({{"E2", true}});
    const EvidenceSet e12 = EvidenceSet::of({{"E1", true}, {"E2", true}});

    const double p_h = d.probability({h});
    const double p1 = d.conditional(h, e1);
    const double p12 = d.conditional(h, e12);
    const double cf1 = certainty_factor_conditional(d, h, e1, EvidenceSet{});
    const double cf12 = certainty_factor_conditional(d, h, e12, EvidenceSet{});
    const double cf2_seq = certainty_factor_conditional(d, h, e2, e1);
    const double cf2_alone = certainty_factor_conditional(d, h, e2, EvidenceSet{});
    const double gap = std::abs(cf2_seq - cf2_alone);

    rep.detail["quantities"] = {{"p_h", p_h},
                                {"p_h_given_e1", p1},
                                {"p_h_given_e1_e2", p12},
                                {"cf_e1", cf1},
                                {"cf_e1_e2", cf12},
                                {"cf_e2_given_e1", cf2_seq},
                                {"cf_e2_alone", cf2_alone},
                                {"modularity_gap", gap}};
    using detail::fmt;
    rep.notes = {
        "model: p(H) = 0.01, two conditionally independent findings, each with "
        "p(E|H) = 0.99 and p(E|~H) = 0.01, so the per-finding likelihood ratio is 99",
        "p(H|E1): odds (0.01/0.99) * 99 = 1, so p = " + fmt(p1),
        "p(H|E1 E2): odds (0.01/0.99) * 99 * 99 = 99, so p = " + fmt(p12),
        "CF(H,E1,{}) = (0.5 - 0.01)/(1 - 0.01) = " + fmt(cf1, "%.5f"),
        "CF(H,{E1,E2},{}) = (0.99 - 0.01)/(1 - 0.01) = " + fmt(cf12, "%.5f"),
        "CF(H,E2,{E1}) = (0.99 - 0.5)/(1 - 0.5) = " + fmt(cf2_seq, "%.5f"),
        "CF(H,E2,{}) = " + fmt(cf2_alone, "%.5f") +
            ", so the update for E2 depends on whether E1 was seen first: gap " +
            fmt(gap, "%.5f"),
        "these parameters are sometimes quoted as a per-finding ratio of .99 with CF "
        "near 5; a ratio below 1 disconfirms and certainty factors cannot exceed 1, so "
        "the consistent reading is ratio 99 with CF near .5",
    };
    return rep;
}

// --- Bucketed-posterior (evoking strength) audit ---------------------------

inline AuditReport audit_evoking_strengths(const std::vector<Scenario>& family,
                                           const EvokingScale& scale = EvokingScale::defaults(),
                                           const AuditOptions& opt = {},
                                           ojson config = ojson::object()) {
    if (family.empty()) fail(Errc::invalid_parameter, "evoking audit needs scenarios");
    scale.validate();
    AuditReport rep;
    rep.check = "evoking-modularity";
    rep.axiom = "U(H,E,e) = U(H,E,{}) for every prior evidence e";
    rep.measure = "evoking";
    rep.config = std::move(config);
    rep.tolerances = {{"thresholds", scale.bounds}, {"mass_floor", opt.mass_floor}};
    detail::WitnessKeeper keep(opt.max_listed);

    std::size_t masked = 0;
    double max_masked_dev = 0.0;
    for (const Scenario& s : family) {
        ++rep.scenarios;
        const Schema& schema = s.joint.schema();
        const Proposition h = s.joint.hypothesis();
        for (std::size_t i = 0; i < schema.evidence.size(); ++i) {
            std::vector<std::string> others;
            for (std::size_t j = 0; j < schema.evidence.size(); ++j)
                if (j != i) others.push_back(schema.evidence[j]);
            const auto contexts = evidence_assignments(others, false);
            for (bool pol : {true, false}) {
                const EvidenceSet E = EvidenceSet::of({{schema.evidence[i], pol}});
                if (s.joint.probability(E) < opt.mass_floor) {
                    rep.skipped += contexts.size();
                    detail::bump(rep.skip_reasons, "mass-floor");
                    continue;
                }
                const double post0 = s.joint.conditional(h, E);
                const int s0 = scale.strength(post0);
                for (const EvidenceSet& e : contexts) {
                    if (s.joint.probability(e.with(E)) < opt.mass_floor) {
                        ++rep.skipped;
                        detail::bump(rep.skip_reasons, "mass-floor");
                        continue;
                    }
                    const double post = s.joint.conditional(h, e.with(E));
                    const int se = scale.strength(post);
                    ++rep.evaluations;
                    const double dev = std::abs(se - s0);
                    rep.max_deviation = std::max(rep.max_deviation, dev);
                    if (se != s0) {
                        ++rep.violations;
                        keep.offer({"evoking-modularity", dev,
                                    {{"scenario", s.id},
                                     {"hypothesis", schema.hypothesis},
                                     {"E", to_string(*E.begin())},
                                     {"e", evidence_to_json(e)},
                                     {"strength_with_prior", se},
                                     {"strength_baseline", s0},
                                     {"posterior_with_prior", post},
                                     {"posterior_baseline", post0},
                                     {"model", model_to_json(s)}}});
                    } else if (std::abs(post - post0) > opt.tol) {
                        ++masked;
                        max_masked_dev = std::max(max_masked_dev, std::abs(post - post0));
                    }
                }
            }
        }
    }
    rep.witnesses = keep.take();
    rep.violated = rep.violations > 0;
    rep.detail["masked_pairs"] = masked;
    rep.detail["max_masked_posterior_deviation"] = max_masked_dev;
    rep.notes.push_back(
        "masked pairs: bucketing hides a posterior shift because both posteriors land "
        "in the same strength bucket");
    return rep;
}

// --- Text rendering ---------------------------------------------------------

inline std::string AuditReport::to_text() const {
    using detail::fmt;
    std::string out;
    out += "== " + check + " : measure " + measure + " ==\n";
    out += "axiom:   " + axiom + "\n";
    out += "verdict: " + std::string(verdict()) + "\n";
    out += "counts:  scenarios " + std::to_string(scenarios) + ", evaluations " +
           std::to_string(evaluations) + ", skipped " + std::to_string(skipped) +
           ", violations " + std::to_string(violations) + "\n";
    if (!skip_reasons.empty()) out += "skips:   " + skip_reasons.dump() + "\n";
    out += "max deviation: " + fmt(max_deviation) + "\n";
    out += "tolerances: " + tolerances.dump() + "\n";
    if (!witnesses.empty()) {
        const Witness& w = witnesses.front();
        ojson trimmed = w.detail;
        trimmed.erase("model");
        if (trimmed.contains("left") && trimmed["left"].is_object())
            trimmed["left"].erase("model");
        if (trimmed.contains("right") && trimmed["right"].is_object())
            trimmed["right"].erase("model");
        out += "worst witness (" + w.kind + ", magnitude " + fmt(w.magnitude) + "):\n";
        out += "  " + trimmed.dump() + "\n";
        if (witnesses.size() > 1)
            out += "  (+" + std::to_string(witnesses.size() - 1) +
                   " more in the JSON report)\n";
    }
    if (!detail.empty()) out += "detail:  " + detail.dump() + "\n";
    for (const auto& n : notes) out += "note:    " + n + "\n";
    return out;
}

}  // namespace evicalc
