#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <evicalc/evicalc.hpp>

using namespace evicalc;

namespace {

Scenario counterexample_scenario() {
    const NaiveBayesModel m = counterexample_model();
    return Scenario{"counterexample", joint_from_naive_bayes(m), m};
}

// Replays one modularity witness from its JSON form and checks the stored
// numbers against a fresh computation.
void replay_modularity(const UpdateMeasure& m, const ojson& w, double tol) {
    const ojson& det = w.at("detail");
    const ModelFile mf = model_from_json(det.at("model"));
    const Proposition h{det.at("hypothesis").get<std::string>(), true};
    const EvidenceSet E = EvidenceSet::of({parse_literal(det.at("E").get<std::string>())});
    const EvidenceSet e = evidence_from_json(det.at("e"));
    const double u = m.update(mf.joint, h, E, e);
    const double u0 = m.update(mf.joint, h, E, EvidenceSet{});
    CHECK(std::abs(u - det.at("update_with_prior").get<double>()) <= tol);
    CHECK(std::abs(u0 - det.at("update_baseline").get<double>()) <= tol);
    CHECK(std::abs(std::abs(u - u0) - w.at("magnitude").get<double>()) <= tol);
}

struct SideValues {
    double u1, u2, u12;
};

SideValues replay_collision_side(const ojson& side) {
    const ModelFile mf = model_from_json(side.at("model"));
    const Proposition h = mf.joint.hypothesis();
    const Proposition f1 = parse_literal(side.at("E1").get<std::string>());
    const Proposition f2 = parse_literal(side.at("E2").get<std::string>());
    const EvidenceSet e = evidence_from_json(side.at("e"));
    const UpdateMeasure cf = cf_measure();
    SideValues v;
    v.u1 = cf.update(mf.joint, h, EvidenceSet::of({f1}), e);
    v.u2 = cf.update(mf.joint, h, EvidenceSet::of({f2}), e.with(f1));
    v.u12 = cf.update(mf.joint, h, EvidenceSet::of({f1}).with(f2), e);
    CHECK(std::abs(v.u1 - side.at("u1").get<double>()) <= 1e-12);
    CHECK(std::abs(v.u2 - side.at("u2").get<double>()) <= 1e-12);
    CHECK(std::abs(v.u12 - side.at("u12").get<double>()) <= 1e-12);
    return v;
}

}  // namespace

TEST_CASE("lambda and weight are modular across the ci grid") {
    const std::vector<Scenario> grid = ci_grid_scenarios(2);
    REQUIRE(grid.size() == 150);

    for (const char* name : {"lambda", "weight"}) {
        const AuditReport rep = check_modularity(measure_from_name(name), grid);
        INFO(name);
        CHECK_FALSE(rep.violated);
        CHECK(rep.scenarios == 150);
        CHECK(rep.violations == 0);
        CHECK(rep.max_deviation < 1e-9);
        CHECK(rep.evaluations > 0);
        CHECK(std::string(rep.verdict()) == "holds");
    }
}

TEST_CASE("certainty factors break modularity on the counterexample") {
    const AuditReport rep = check_modularity(cf_measure(), {counterexample_scenario()});
    CHECK(rep.violated);
    CHECK(rep.violations > 0);
    CHECK(rep.max_deviation == Catch::Approx(48.02 / 99.0).margin(1e-9));
    REQUIRE_FALSE(rep.witnesses.empty());

    // worst witness replays from its own JSON
    const ojson j = rep.to_json();
    replay_modularity(cf_measure(), j.at("witnesses").at(0), 1e-12);
}

TEST_CASE("lambda modularity fails on dependent tables and witnesses replay") {
    const std::vector<Scenario> family = general_random_scenarios(2, 40, 20260816);
    const AuditReport rep = check_modularity(lambda_measure(), family);
    CHECK(rep.violated);
    REQUIRE_FALSE(rep.witnesses.empty());
    CHECK(rep.witnesses.size() <= 8);

    const ojson j = rep.to_json();
    for (const ojson& w : j.at("witnesses")) replay_modularity(lambda_measure(), w, 1e-12);
}

TEST_CASE("auditor counts skips instead of guessing on undefined updates") {
    // all cells with E2 true carry zero mass
    std::vector<double> cells(8, 0.0);
    cells[0] = 0.2;  // ~H ~E1 ~E2
    cells[1] = 0.2;  // ~H  E1 ~E2
    cells[4] = 0.4;  //  H ~E1 ~E2
    cells[5] = 0.2;  //  H  E1 ~E2
    const JointDistribution d =
        JointDistribution::from_cells(Schema{"H", {"E1", "E2"}}, std::move(cells));
    const AuditReport rep = check_modularity(lambda_measure(), {Scenario{"zero-slice", d, {}}});
    CHECK_FALSE(rep.violated);
    CHECK(rep.violations == 0);
    CHECK(rep.skipped > 0);
    CHECK_FALSE(rep.skip_reasons.empty());
}

TEST_CASE("the multiplicative chain rule means lambda passes the phi search") {
    const AuditReport rep = check_update_property(lambda_measure(), ci_grid_scenarios(2));
    CHECK_FALSE(rep.violated);
    CHECK(rep.detail.at("tuples").get<std::size_t>() > 0);
    bool mentions_refutation = false;
    for (const auto& n : rep.notes)
        mentions_refutation = mentions_refutation || n.find("refutation") != std::string::npos;
    CHECK(mentions_refutation);
}

TEST_CASE("evoking and posterior-style measures cannot collide") {
    // the combined update is a function of the final posterior alone, so the
    // second component already determines it
    const AuditReport rep = check_update_property(evoking_measure(), ci_grid_scenarios(2));
    CHECK_FALSE(rep.violated);
}

TEST_CASE("cf collision search refutes any combining function") {
    const std::vector<Scenario> family = ci_random_scenarios(2, 500, 7);
    AuditOptions opt;
    const AuditReport rep = check_update_property(cf_measure(), family, opt);
    CHECK(rep.violated);
    REQUIRE_FALSE(rep.witnesses.empty());

    const ojson j = rep.to_json();
    for (const ojson& w : j.at("witnesses")) {
        if (w.at("kind").get<std::string>() != "collision") continue;
        const ojson& det = w.at("detail");
        const SideValues left = replay_collision_side(det.at("left"));
        const SideValues right = replay_collision_side(det.at("right"));
        CHECK(std::abs(left.u1 - right.u1) <= opt.match_tol);
        CHECK(std::abs(left.u2 - right.u2) <= opt.match_tol);
        const double gap = std::abs(left.u12 - right.u12);
        CHECK(gap > opt.phi_tol * std::max({1.0, std::abs(left.u12), std::abs(right.u12)}));
        CHECK(std::abs(gap - det.at("combined_gap").get<double>()) <= 1e-12);
    }
}

TEST_CASE("phi search needs two evidence variables") {
    NaiveBayesModel m;
    m.prior = 0.3;
    m.findings = {{"E1", 0.8, 0.2}};
    const Scenario s{"one-var", joint_from_naive_bayes(m), m};
    CHECK_THROWS_AS(check_update_property(cf_measure(), {s}), CalcError);
}

TEST_CASE("posterior-as-update is modular only when updating does nothing") {
    const AuditReport rep = check_marginal_independence_trap(ci_grid_scenarios(2));
    CHECK(rep.violated);
    CHECK(rep.scenarios == 150);
    CHECK(rep.detail.at("modular_degenerate").get<int>() == 6);
    CHECK(rep.detail.at("nonmodular_informative").get<int>() == 144);
    CHECK(rep.detail.at("modular_informative").get<int>() == 0);
    CHECK(rep.violations == 144);

    // the six degenerate scenarios are exactly the all-ones ratio tuples
    for (const ojson& id : rep.detail.at("degenerate_scenarios")) {
        const std::string sid = id.get<std::string>();
        bool found = false;
        for (const Scenario& s : ci_grid_scenarios(2)) {
            if (s.id != sid) continue;
            found = true;
            for (const Finding& f : s.source->findings)
                CHECK(f.ratio() == Catch::Approx(1.0).margin(1e-12));
        }
        CHECK(found);
    }
}

TEST_CASE("cf approaches the posterior as the prior vanishes") {
    NaiveBayesModel tiny;
    tiny.prior = 1e-6;
    tiny.findings = {{"E", 0.999999, 0.000001}};
    NaiveBayesModel big;
    big.prior = 0.5;
    big.findings = {{"E", 0.8, 0.2}};
    const std::vector<Scenario> family = {
        Scenario{"tiny-prior", joint_from_naive_bayes(tiny), tiny},
        Scenario{"big-prior", joint_from_naive_bayes(big), big}};

    const AuditReport rep = check_cf_limit_case(family, 0.01);
    CHECK_FALSE(rep.violated);  // the error bound is an identity, never exceeded
    CHECK(rep.scenarios == 1);
    CHECK(rep.detail.at("excluded_scenarios").get<int>() == 1);
    CHECK(rep.evaluations >= 1);
    CHECK(rep.detail.at("max_error").get<double>() < 1e-6);

    // worked number: prior .01 moving to posterior .5 misses by .00505...
    NaiveBayesModel mid;
    mid.prior = 0.01;
    mid.findings = {{"E", 0.99, 0.01}};
    const AuditReport rep2 =
        check_cf_limit_case({Scenario{"mid", joint_from_naive_bayes(mid), mid}}, 0.02);
    CHECK(rep2.detail.at("max_error").get<double>() ==
          Catch::Approx(0.01 * 0.5 / 0.99).margin(1e-9));
    CHECK(rep2.detail.at("bound_at_max_error").get<double>() ==
          Catch::Approx(0.01 * 0.5 / 0.99).margin(1e-9));
}

TEST_CASE("the counterexample report carries every quantity") {
    const AuditReport rep = reproduce_mycin_counterexample();
    CHECK(rep.check == "mycin-counterexample");
    CHECK(rep.violated);
    REQUIRE(rep.detail.contains("quantities"));
    const ojson& q = rep.detail.at("quantities");
    CHECK(q.at("p_h").get<double>() == Catch::Approx(0.01).margin(1e-12));
    CHECK(q.at("p_h_given_e1").get<double>() == Catch::Approx(0.5).margin(1e-9));
    CHECK(q.at("p_h_given_e1_e2").get<double>() == Catch::Approx(0.99).margin(1e-9));
    CHECK(q.at("cf_e1").get<double>() == Catch::Approx(0.49495).margin(1e-5));
    CHECK(q.at("cf_e1_e2").get<double>() == Catch::Approx(0.98990).margin(1e-5));
    CHECK(q.at("cf_e2_given_e1").get<double>() == Catch::Approx(0.98).margin(1e-9));
    CHECK(q.at("modularity_gap").get<double>() == Catch::Approx(0.485).margin(1e-3));
    CHECK_FALSE(rep.notes.empty());
    CHECK_FALSE(rep.witnesses.empty());
}

TEST_CASE("bucketed posteriors break modularity; coarse buckets mask instead") {
    const Scenario s = counterexample_scenario();

    const AuditReport rep = audit_evoking_strengths({s});
    CHECK(rep.violated);
    bool saw_4_vs_3 = false;
    for (const Witness& w : rep.witnesses) {
        const int a = w.detail.at("strength_with_prior").get<int>();
        const int b = w.detail.at("strength_baseline").get<int>();
        saw_4_vs_3 = saw_4_vs_3 || (a == 4 && b == 3);
    }
    CHECK(saw_4_vs_3);

    // one interior bucket: every violation disappears into masking
    const EvokingScale coarse{{0.5}};
    const AuditReport masked = audit_evoking_strengths({s}, coarse);
    CHECK_FALSE(masked.violated);
    CHECK(masked.detail.at("masked_pairs").get<int>() > 0);
    CHECK(masked.detail.at("max_masked_posterior_deviation").get<double>() > 0.1);
}

TEST_CASE("audit reports serialize deterministically") {
    const auto run = [] {
        const std::vector<Scenario> family = ci_random_scenarios(2, 50, 11);
        return check_update_property(cf_measure(), family).to_json().dump(2);
    };
    CHECK(run() == run());

    const auto mod = [] {
        return check_modularity(lambda_measure(), general_random_scenarios(2, 30, 3))
            .to_json()
            .dump(2);
    };
    CHECK(mod() == mod());
}

TEST_CASE("report text rendering summarizes without the full models") {
    const AuditReport rep = check_modularity(cf_measure(), {counterexample_scenario()});
    const std::string text = rep.to_text();
    CHECK(text.find("verdict: violated") != std::string::npos);
    CHECK(text.find("modularity") != std::string::npos);
    CHECK(text.find("\"model\"") == std::string::npos);  // trimmed from text output
}
