// Acceptance gate: each criterion prints exactly one PASS/FAIL line and the
// binary fails if any criterion fails. Tolerances are stated inline; seeds
// are frozen so every run checks the same ground.
#include <catch2/catch_amalgamated.hpp>

#include <evicalc/evicalc.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "helpers.hpp"

using namespace evicalc;

namespace {

constexpr std::uint64_t kChainSeed = 20260816;
constexpr std::uint64_t kOracleSeed = 5;
constexpr std::uint64_t kBucketSeed = 8;

struct Gate {
    std::string name;
    std::vector<std::string> problems;

    explicit Gate(std::string n) : name(std::move(n)) {}

    void expect(bool ok, const std::string& what) {
        if (!ok) problems.push_back(what);
    }

    void finish() {
        std::printf("%s: %s\n", name.c_str(), problems.empty() ? "PASS" : "FAIL");
        std::fflush(stdout);
        std::string joined;
        for (const auto& p : problems) {
            if (!joined.empty()) joined += "; ";
            joined += p;
        }
        INFO(joined);
        REQUIRE(problems.empty());
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool near(double v, double target, double tol) { return std::abs(v - target) <= tol; }

Scenario counterexample_scenario() {
    NaiveBayesModel nb = counterexample_model();
    return {"counterexample", joint_from_naive_bayes(nb), nb};
}

// Recompute a modularity witness from its embedded model alone.
double replay_modularity_deviation(const UpdateMeasure& m, const ojson& det) {
    const ModelFile mf = model_from_json(det.at("model"));
    const Proposition h{det.at("hypothesis").get<std::string>(), true};
    const EvidenceSet E = EvidenceSet::of({parse_literal(det.at("E").get<std::string>())});
    const EvidenceSet e = evidence_from_json(det.at("e"));
    const double u = m.update(mf.joint, h, E, e);
    const double u0 = m.update(mf.joint, h, E, EvidenceSet{});
    if (!near(u, det.at("update_with_prior").get<double>(), 1e-12)) return -1.0;
    if (!near(u0, det.at("update_baseline").get<double>(), 1e-12)) return -1.0;
    return std::abs(u - u0);
}

// Recompute one side of a collision witness from its embedded model alone.
bool replay_collision_side(const ojson& side) {
    const ModelFile mf = model_from_json(side.at("model"));
    const Proposition h{mf.joint.hypothesis()};
    const Proposition f1 = parse_literal(side.at("E1").get<std::string>());
    const Proposition f2 = parse_literal(side.at("E2").get<std::string>());
    const EvidenceSet e = evidence_from_json(side.at("e"));
    const UpdateMeasure cf = cf_measure();
    const double u1 = cf.update(mf.joint, h, EvidenceSet::of({f1}), e);
    const double u2 = cf.update(mf.joint, h, EvidenceSet::of({f2}), e.with(f1));
    const double u12 = cf.update(mf.joint, h, EvidenceSet::of({f1}).with(f2), e);
    return near(u1, side.at("u1").get<double>(), 1e-12) &&
           near(u2, side.at("u2").get<double>(), 1e-12) &&
           near(u12, side.at("u12").get<double>(), 1e-12);
}

}  // namespace

TEST_CASE("criterion 1: counterexample quantities") {
    Gate g("criterion 1 (worked counterexample reproduction)");
    const auto t0 = Clock::now();

    const AuditReport rep = reproduce_mycin_counterexample();
    const ojson& q = rep.detail.at("quantities");
    g.expect(near(q.at("p_h").get<double>(), 0.01, 1e-12), "prior is fixed at 0.01");
    g.expect(near(q.at("p_h_given_e1").get<double>(), 0.5, 1e-9), "p(H|E1) = 0.5 within 1e-9");
    g.expect(near(q.at("p_h_given_e1_e2").get<double>(), 0.99, 1e-9),
             "p(H|E1E2) = 0.99 within 1e-9");
    g.expect(near(q.at("cf_e1").get<double>(), 0.49495, 1e-5), "CF(H,E1,{}) = 0.49495 within 1e-5");
    g.expect(near(q.at("cf_e1_e2").get<double>(), 0.98990, 1e-5),
             "CF(H,E1E2,{}) = 0.98990 within 1e-5");
    g.expect(near(q.at("cf_e2_given_e1").get<double>(), 0.98, 1e-9),
             "CF(H,E2,E1) = 0.98 within 1e-9");
    g.expect(rep.violated, "modularity must be flagged as violated");
    g.expect(near(q.at("modularity_gap").get<double>(), 0.485, 1e-3),
             "violation magnitude = 0.485 within 1e-3");
    g.expect(seconds_since(t0) < 1.0, "runtime under 1 s");
    g.finish();
}

TEST_CASE("criterion 2: chain identity over random joints") {
    Gate g("criterion 2 (likelihood-ratio chain identity, 10k random joints)");
    const auto t0 = Clock::now();

    const auto family = general_random_scenarios(2, 10000, kChainSeed);
    const Proposition e1{"E1", true}, e2{"E2", true};
    std::size_t checked = 0, skipped = 0;
    double worst = 0.0;
    for (const Scenario& s : family) {
        const JointDistribution& d = s.joint;
        try {
            const double combined =
                d.likelihood_ratio(d.hypothesis(), EvidenceSet::of({e1, e2}), EvidenceSet{});
            const double chained =
                d.likelihood_ratio(d.hypothesis(), EvidenceSet::of({e2}), EvidenceSet::of({e1})) *
                d.likelihood_ratio(d.hypothesis(), EvidenceSet::of({e1}), EvidenceSet{});
            worst = std::max(worst, std::abs(combined - chained));
            ++checked;
        } catch (const CalcError&) {
            ++skipped;
        }
    }
    g.expect(family.size() == 10000, "family holds 10,000 scenarios");
    g.expect(checked + skipped == family.size(), "every scenario either checked or skipped");
    g.expect(checked >= 9000, "at least 9,000 scenarios are well defined");
    g.expect(worst <= 1e-9,
             "chain deviation " + std::to_string(worst) + " stays within 1e-9");
    g.expect(seconds_since(t0) < 5.0, "runtime under 5 s");
    g.finish();
}

TEST_CASE("criterion 3: modularity holds under independence, fails without") {
    Gate g("criterion 3 (modularity of lambda and weight)");

    const auto grid = ci_grid_scenarios(2);
    for (const UpdateMeasure& m : {lambda_measure(), weight_measure()}) {
        const AuditReport rep = check_modularity(m, grid);
        g.expect(!rep.violated, m.name + " holds on the ci-grid");
        g.expect(rep.max_deviation < 1e-9,
                 m.name + " max deviation " + std::to_string(rep.max_deviation) + " < 1e-9");
    }

    const auto general = general_random_scenarios(2, 60, 5);
    const AuditReport bad = check_modularity(lambda_measure(), general);
    g.expect(bad.violated, "lambda is violated on general tables");
    g.expect(!bad.witnesses.empty(), "violation carries a witness");
    if (!bad.witnesses.empty()) {
        const double replayed = replay_modularity_deviation(lambda_measure(),
                                                            bad.witnesses.front().detail);
        g.expect(replayed >= 0.0, "witness replays to its reported updates within 1e-12");
        g.expect(near(replayed, bad.witnesses.front().magnitude, 1e-12),
                 "replayed deviation matches the reported magnitude");
    }
    g.finish();
}

TEST_CASE("criterion 4: posterior-as-update collapses to marginal independence") {
    Gate g("criterion 4 (marginal-independence reductio on the ci-grid)");

    const AuditReport rep = check_marginal_independence_trap(ci_grid_scenarios(2));
    const ojson& d = rep.detail;
    g.expect(rep.violated, "the trap audit reports a violation");
    g.expect(d.at("modular_degenerate").get<int>() == 6,
             "all 6 flat scenarios pass modularity degenerately");
    g.expect(d.at("nonmodular_informative").get<int>() == 144,
             "all 144 informative scenarios violate modularity");
    g.expect(d.at("modular_informative").get<int>() == 0,
             "no informative scenario passes modularity");
    g.expect(d.at("anomalous_scenarios").empty(), "no anomalous scenarios");
    g.finish();
}

TEST_CASE("criterion 5: weight-sum posterior equals enumeration") {
    Gate g("criterion 5 (engine oracle equivalence up to 10 findings)");
    const auto t0 = Clock::now();
    double worst = 0.0;
    std::size_t compared = 0;

    const auto run_model = [&](const JointDistribution& joint,
                               const std::vector<CaseRecord>& cases) {
        const Rulebase rb = rulebase_from_joint(joint, "weight");
        for (const CaseRecord& c : cases) {
            const BeliefState b = evaluate_case(rb, c, "weight");
            const double truth = joint.conditional(joint.hypothesis(), c.observed);
            worst = std::max(worst, std::abs(*b.posterior - truth));
            ++compared;
        }
    };

    // exhaustive cases for small models
    for (std::size_t n = 1; n <= 4; ++n) {
        const auto cases = exhaustive_cases(detail::default_evidence_names(n));
        for (const Scenario& s : ci_grid_scenarios(n)) run_model(s.joint, cases);
    }
    // sampled grid-valued models and cases for larger ones
    Rng rng(kOracleSeed);
    for (std::size_t n = 5; n <= 10; ++n) {
        const auto names = detail::default_evidence_names(n);
        for (int k = 0; k < 100; ++k) {
            NaiveBayesModel nb;
            nb.prior = kGridPriors[rng.raw() % kGridPriors.size()];
            for (const auto& name : names)
                nb.findings.push_back(
                    finding_with_ratio(name, kGridRatios[rng.raw() % kGridRatios.size()]));
            nb.validate();
            run_model(joint_from_naive_bayes(nb), sampled_cases(names, 1000, rng));
        }
    }

    g.expect(compared > 300000, "more than 300k case evaluations compared");
    g.expect(worst <= 1e-12,
             "worst posterior gap " + std::to_string(worst) + " stays within 1e-12");
    g.expect(seconds_since(t0) < 30.0, "runtime under 30 s");
    g.finish();
}

TEST_CASE("criterion 6: combinator algebra on the certainty grid") {
    Gate g("criterion 6 (parallel-combination algebra over a 21-cube)");

    std::vector<double> grid;
    for (int i = -10; i <= 10; ++i) grid.push_back(i / 10.0);

    for (double x : grid) g.expect(mycin_combine(x, 0.0) == x, "identity element is exact");

    std::size_t commuted = 0;
    for (double x : grid)
        for (double y : grid) {
            if ((x == 1.0 && y == -1.0) || (x == -1.0 && y == 1.0)) continue;
            if (mycin_combine(x, y) != mycin_combine(y, x)) {
                g.expect(false, "commutativity is exact");
                break;
            }
            ++commuted;
        }
    g.expect(commuted == 21 * 21 - 2, "all defined pairs commute");

    std::size_t associated = 0, contradictions = 0;
    double worst = 0.0;
    bool asymmetric = false;
    for (double x : grid)
        for (double y : grid)
            for (double z : grid) {
                double left = 0.0, right = 0.0;
                bool left_ok = true, right_ok = true;
                try {
                    left = mycin_combine(mycin_combine(x, y), z);
                } catch (const CalcError&) {
                    left_ok = false;
                }
                try {
                    right = mycin_combine(x, mycin_combine(y, z));
                } catch (const CalcError&) {
                    right_ok = false;
                }
                if (left_ok != right_ok) {
                    asymmetric = true;
                    continue;
                }
                if (!left_ok) {
                    ++contradictions;
                    continue;
                }
                worst = std::max(worst, std::abs(left - right));
                ++associated;
            }
    g.expect(!asymmetric, "contradictions arise independently of grouping");
    g.expect(associated + contradictions == 21 * 21 * 21, "every triple classified");
    g.expect(associated > 9000, "contradictory triples are rare");
    g.expect(worst <= 1e-12,
             "associativity gap " + std::to_string(worst) + " stays within 1e-12");
    g.finish();
}

TEST_CASE("criterion 7: collision refutation for certainty factors") {
    Gate g("criterion 7 (combination-function collision search)");

    const AuditReport rep = check_update_property(cf_measure(), ci_random_scenarios(2, 500, 7));
    g.expect(rep.violated, "the search refutes a single combination function");

    bool found_valid = false;
    bool replayed = false;
    for (const Witness& w : rep.witnesses) {
        if (w.kind != "collision") continue;
        const ojson& det = w.detail;
        const bool components_match = det.at("component_gap_u1").get<double>() <= 1e-4 &&
                                      det.at("component_gap_u2").get<double>() <= 1e-4;
        const bool combined_differs = det.at("combined_gap").get<double>() > 1e-2;
        if (components_match && combined_differs) {
            found_valid = true;
            if (replay_collision_side(det.at("left")) && replay_collision_side(det.at("right"))) {
                replayed = true;
                break;
            }
        }
    }
    g.expect(found_valid, "a collision pair matches within 1e-4 yet differs by more than 1e-2");
    g.expect(replayed, "the collision pair replays standalone within 1e-12");
    g.finish();
}

TEST_CASE("criterion 8: bucketed-posterior audit and rebucketing invariance") {
    Gate g("criterion 8 (integer-strength modularity audit)");

    const std::vector<Scenario> family = {counterexample_scenario()};
    const AuditReport rep = audit_evoking_strengths(family);
    g.expect(rep.violated, "default thresholds expose the violation");
    bool saw_4_vs_3 = false;
    for (const Witness& w : rep.witnesses) {
        const ojson& det = w.detail;
        saw_4_vs_3 = saw_4_vs_3 || (det.at("strength_with_prior").get<int>() == 4 &&
                                    det.at("strength_baseline").get<int>() == 3);
    }
    g.expect(saw_4_vs_3, "some witness shows strength 4 against 3");

    // any strictly monotone re-bucketing with at least 4 distinct buckets
    Rng rng(kBucketSeed);
    std::size_t still_violated = 0;
    for (int k = 0; k < 20; ++k) {
        const std::size_t n_bounds = 2 + k % 3;
        std::vector<double> bounds;
        for (std::size_t i = 0; i < n_bounds; ++i) bounds.push_back(rng.uniform(0.001, 0.999));
        std::sort(bounds.begin(), bounds.end());
        const EvokingScale scale{bounds};
        scale.validate();
        if (scale.distinct_buckets() < 4) {
            g.expect(false, "sampled scale has at least 4 buckets");
            continue;
        }
        if (audit_evoking_strengths(family, scale).violated) ++still_violated;
    }
    g.expect(still_violated == 20, "all 20 sampled re-bucketings still report the violation");
    g.finish();
}

TEST_CASE("criterion 9: byte-identical reports") {
    Gate g("criterion 9 (determinism of reports)");

    const std::vector<std::string> commands = {
        "audit --measure cf --family ci-random --seed 7 --samples 200 --format json",
        "audit --measure lambda --family ci-grid --format json",
        "demo mycin-counterexample --format json",
        "demo internist-modularity --format json",
    };
    for (const auto& cmd : commands) {
        const auto a = testutil::run_cli(cmd);
        const auto b = testutil::run_cli(cmd);
        g.expect(!a.out.empty(), "output is non-empty for: " + cmd);
        g.expect(a.status == b.status && a.out == b.out, "byte-identical for: " + cmd);
    }
    g.finish();
}
