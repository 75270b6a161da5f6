#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "evicalc/calculus.hpp"
#include "evicalc/io.hpp"
#include "evicalc/joint.hpp"
#include "evicalc/naive_bayes.hpp"
#include "evicalc/scenario.hpp"

namespace evicalc {

// IF evidence THEN hypothesis, with a strength in one calculus. A rule for
// the negated hypothesis is folded in through the calculus's exact dual
// (weight -w, lambda 1/l, cf -c); the evoking scale has no dual.
struct Rule {
    std::string id;
    Proposition evidence;
    Proposition hypothesis;
    double strength = 0.0;
};

struct Rulebase {
    std::string calculus = "weight";  // weight | lambda | cf | evoking
    std::string hypothesis = "H";
    std::optional<double> prior;
    LogBase base = LogBase::e();
    std::vector<Rule> rules;

    void validate() const {
        if (calculus != "weight" && calculus != "lambda" && calculus != "cf" &&
            calculus != "evoking")
            fail(Errc::invalid_parameter, "unknown calculus '" + calculus + "'");
        if (prior && !(*prior > 0.0 && *prior < 1.0))
            fail(Errc::invalid_parameter, "rulebase prior outside (0,1)");
        for (std::size_t i = 0; i < rules.size(); ++i) {
            const Rule& r = rules[i];
            if (r.hypothesis.variable != hypothesis)
                fail(Errc::unknown_variable,
                     "rule '" + r.id + "' concludes about '" + r.hypothesis.variable +
                         "', not '" + hypothesis + "'");
            check_strength(r);
            for (std::size_t j = i + 1; j < rules.size(); ++j)
                if (rules[j].evidence == r.evidence && rules[j].hypothesis == r.hypothesis)
                    fail(Errc::invalid_parameter,
                         "duplicate rule for " + to_string(r.evidence) + " -> " +
                             to_string(r.hypothesis));
        }
    }

    void check_strength(const Rule& r) const {
        if (calculus == "weight") {
            CalculusValue::weight(r.strength);
        } else if (calculus == "lambda") {
            CalculusValue::lambda(r.strength);
        } else if (calculus == "cf") {
            CalculusValue::cf(r.strength);
        } else {
            if (r.strength != std::floor(r.strength))
                fail(Errc::invalid_parameter,
                     "rule '" + r.id + "': evoking strength must be an integer");
            CalculusValue::evoking(static_cast<int>(r.strength));
            if (!r.hypothesis.positive)
                fail(Errc::invalid_parameter,
                     "rule '" + r.id + "': the evoking scale has no negated-hypothesis dual");
        }
    }
};

struct CaseRecord {
    std::string id;
    EvidenceSet observed;  // present and explicitly absent findings
};

struct BeliefState {
    std::string hypothesis;
    std::string calculus;
    double value = 0.0;
    std::size_t fired = 0;
    std::optional<double> posterior;
};

// Folds the strengths of all rules matched by the case's observed literals
// with the calculus combinator. Result is order-independent: all four
// combinators are commutative and associative (cf to rounding).
inline BeliefState evaluate_case(const Rulebase& rb, const CaseRecord& c,
                                 const std::string& calculus,
                                 std::optional<double> prior_override = std::nullopt) {
    if (calculus != rb.calculus)
        fail(Errc::kind_mismatch,
             "rulebase carries '" + rb.calculus + "' strengths, not '" + calculus + "'");
    rb.validate();
    for (const Proposition& p : c.observed) {
        bool known = false;
        for (const Rule& r : rb.rules) known = known || r.evidence.variable == p.variable;
        if (!known)
            fail(Errc::unknown_variable,
                 "case '" + c.id + "' observes '" + p.variable + "', unknown to the rulebase");
    }

    const bool is_weight = rb.calculus == "weight";
    const bool is_lambda = rb.calculus == "lambda";
    const bool is_cf = rb.calculus == "cf";
    double acc = is_lambda ? 1.0 : 0.0;
    BeliefState out{rb.hypothesis, rb.calculus, acc, 0, std::nullopt};
    for (const Rule& r : rb.rules) {
        if (!c.observed.contains(r.evidence)) continue;
        double s = r.strength;
        if (!r.hypothesis.positive) s = is_lambda ? 1.0 / s : -s;
        if (is_weight)
            acc += s;
        else if (is_lambda)
            acc = combine_lambdas(acc, s);
        else if (is_cf)
            acc = mycin_combine(acc, s);
        else
            acc += s;
        ++out.fired;
    }
    out.value = acc;
    if (is_weight) CalculusValue::weight(acc);
    if (is_cf) CalculusValue::cf(acc);

    const std::optional<double> prior = prior_override ? prior_override : rb.prior;
    if (prior) {
        if (is_weight) out.posterior = posterior_from_weight(*prior, acc, rb.base);
        if (is_lambda) {
            const double odds = *prior / (1.0 - *prior) * acc;
            out.posterior = odds / (1.0 + odds);
        }
    }
    return out;
}

// Full-Bayes posterior by raw enumeration; the oracle every calculus is
// judged against.
inline double ground_truth(const ModelFile& model, const CaseRecord& c) {
    return model.joint.conditional(model.joint.hypothesis(), c.observed);
}

// Derives a single-evidence rulebase from a joint: one rule per finding
// literal for the additive/multiplicative calculi, present-evidence rules
// only for cf and evoking (the historical systems scored absence, if at
// all, outside these calculi).
inline Rulebase rulebase_from_joint(const JointDistribution& d, const std::string& calculus,
                                    const LogBase& base = LogBase::e(),
                                    const EvokingScale& scale = EvokingScale::defaults()) {
    Rulebase rb;
    rb.calculus = calculus;
    rb.hypothesis = d.schema().hypothesis;
    rb.base = base;
    const Proposition h = d.hypothesis();
    const double prior = d.probability({h});
    if (prior > 0.0 && prior < 1.0) rb.prior = prior;
    for (const std::string& name : d.schema().evidence) {
        const Proposition pos{name, true}, neg{name, false};
        const EvidenceSet epos = EvidenceSet::of({pos}), eneg = EvidenceSet::of({neg});
        if (calculus == "weight") {
            rb.rules.push_back(
                {"w:" + name, pos, h, weight_of_evidence(d, h, epos, EvidenceSet{}, base)});
            rb.rules.push_back(
                {"w:~" + name, neg, h, weight_of_evidence(d, h, eneg, EvidenceSet{}, base)});
        } else if (calculus == "lambda") {
            rb.rules.push_back(
                {"l:" + name, pos, h, d.likelihood_ratio(h, epos, EvidenceSet{})});
            rb.rules.push_back(
                {"l:~" + name, neg, h, d.likelihood_ratio(h, eneg, EvidenceSet{})});
        } else if (calculus == "cf") {
            rb.rules.push_back(
                {"cf:" + name, pos, h, certainty_factor_conditional(d, h, epos, EvidenceSet{})});
        } else if (calculus == "evoking") {
            rb.rules.push_back({"ev:" + name, pos, h,
                                static_cast<double>(scale.strength(d.conditional(h, epos)))});
        } else {
            fail(Errc::invalid_parameter, "unknown calculus '" + calculus + "'");
        }
    }
    rb.validate();
    return rb;
}

inline Rulebase rulebase_from_model(const NaiveBayesModel& m, const std::string& calculus,
                                    const LogBase& base = LogBase::e(),
                                    const EvokingScale& scale = EvokingScale::defaults()) {
    return rulebase_from_joint(joint_from_naive_bayes(m), calculus, base, scale);
}

// --- Divergence table -------------------------------------------------------

struct DivergenceRow {
    std::string case_id;
    std::string calculus;
    std::size_t fired = 0;
    double engine_value = 0.0;
    std::optional<double> engine_posterior;
    double truth_posterior = 0.0;
    std::optional<double> truth_value;
    std::optional<double> posterior_error;
    std::optional<double> value_error;
};

struct CalculusSummary {
    std::string calculus;
    double max_posterior_error = 0.0;
    double max_value_error = 0.0;
    std::size_t comparable_pairs = 0;  // case pairs strictly ordered by ground truth
    std::size_t discordant_pairs = 0;  // pairs the calculus fails to order the same way
    double rank_disagreement = 0.0;
};

struct DivergenceTable {
    std::vector<DivergenceRow> rows;
    std::vector<CalculusSummary> summaries;
    std::vector<std::string> notes;

    ojson to_json() const;
    std::string to_csv() const;
    std::string to_text() const;
};

inline DivergenceTable compare_calculi(
    const ModelFile& model, const std::vector<CaseRecord>& cases,
    const std::vector<std::string>& calculi = {"weight", "lambda", "cf", "evoking"},
    const LogBase& base = LogBase::e(), const EvokingScale& scale = EvokingScale::defaults()) {
    const JointDistribution& d = model.joint;
    const Proposition h = d.hypothesis();
    const double prior = d.probability({h});

    DivergenceTable table;
    std::vector<Rulebase> rulebases;
    rulebases.reserve(calculi.size());
    for (const auto& name : calculi) rulebases.push_back(rulebase_from_joint(d, name, base, scale));

    std::vector<double> truth(cases.size());
    for (std::size_t ci = 0; ci < cases.size(); ++ci) truth[ci] = ground_truth(model, cases[ci]);

    // value matrix for rank comparison, calculus-major
    std::vector<std::vector<double>> values(calculi.size(),
                                            std::vector<double>(cases.size(), 0.0));

    for (std::size_t ci = 0; ci < cases.size(); ++ci) {
        for (std::size_t k = 0; k < calculi.size(); ++k) {
            const std::string& name = calculi[k];
            const BeliefState bs = evaluate_case(rulebases[k], cases[ci], name);
            DivergenceRow row;
            row.case_id = cases[ci].id;
            row.calculus = name;
            row.fired = bs.fired;
            row.engine_value = bs.value;
            row.engine_posterior = bs.posterior;
            row.truth_posterior = truth[ci];
            if (name == "weight") {
                row.truth_value = base.log(d.likelihood_ratio(h, cases[ci].observed, EvidenceSet{}));
            } else if (name == "lambda") {
                row.truth_value = d.likelihood_ratio(h, cases[ci].observed, EvidenceSet{});
            } else if (name == "cf") {
                row.truth_value = certainty_factor_value(prior, truth[ci]);
            } else {
                row.truth_value = static_cast<double>(scale.strength(truth[ci]));
            }
            if (bs.posterior) row.posterior_error = std::abs(*bs.posterior - truth[ci]);
            if (name != "evoking" && row.truth_value)
                row.value_error = std::abs(bs.value - *row.truth_value);
            values[k][ci] = bs.value;
            table.rows.push_back(std::move(row));
        }
    }

    for (std::size_t k = 0; k < calculi.size(); ++k) {
        CalculusSummary sum;
        sum.calculus = calculi[k];
        for (const auto& row : table.rows) {
            if (row.calculus != calculi[k]) continue;
            if (row.posterior_error)
                sum.max_posterior_error = std::max(sum.max_posterior_error, *row.posterior_error);
            if (row.value_error)
                sum.max_value_error = std::max(sum.max_value_error, *row.value_error);
        }
        for (std::size_t i = 0; i < cases.size(); ++i) {
            for (std::size_t j = 0; j < cases.size(); ++j) {
                if (truth[i] <= truth[j] + 1e-12) continue;  // need strict truth order
                ++sum.comparable_pairs;
                if (!(values[k][i] > values[k][j])) ++sum.discordant_pairs;
            }
        }
        sum.rank_disagreement =
            sum.comparable_pairs == 0
                ? 0.0
                : static_cast<double>(sum.discordant_pairs) / sum.comparable_pairs;
        table.summaries.push_back(sum);
    }
    table.notes.push_back(
        "cf and evoking reconstruct no posterior; their divergence is the value gap "
        "against the same measure recomputed from the enumeration posterior (cf) and "
        "the case-ranking disagreement (both)");
    table.notes.push_back(
        "cf and evoking rules fire on present evidence only; explicitly absent findings "
        "enter those calculi with no effect");
    return table;
}

// --- Case generation ---------------------------------------------------------

inline std::vector<CaseRecord> exhaustive_cases(const std::vector<std::string>& vars) {
    std::vector<CaseRecord> out;
    const auto sets = evidence_assignments(vars, true);
    out.reserve(sets.size());
    for (std::size_t k = 0; k < sets.size(); ++k) {
        char id[32];
        std::snprintf(id, sizeof id, "case-%03zu", k);
        out.push_back({id, sets[k]});
    }
    return out;
}

inline std::vector<CaseRecord> sampled_cases(const std::vector<std::string>& vars,
                                             std::size_t count, Rng& rng) {
    std::vector<CaseRecord> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        EvidenceSet e;
        for (const auto& v : vars) {
            const double u = rng.uniform();
            if (u < 1.0 / 3.0)
                e.insert({v, true});
            else if (u < 2.0 / 3.0)
                e.insert({v, false});
        }
        char id[32];
        std::snprintf(id, sizeof id, "case-%04zu", k);
        out.push_back({id, std::move(e)});
    }
    return out;
}

// --- Serialization -----------------------------------------------------------

inline ojson rulebase_to_json(const Rulebase& rb) {
    ojson rules = ojson::array();
    for (const Rule& r : rb.rules) {
        ojson jr = {{"id", r.id},
                    {"evidence", to_string(r.evidence)},
                    {"strength", r.strength}};
        if (!r.hypothesis.positive || r.hypothesis.variable != rb.hypothesis)
            jr["hypothesis"] = to_string(r.hypothesis);
        rules.push_back(std::move(jr));
    }
    ojson out = {{"calculus", rb.calculus}, {"hypothesis", rb.hypothesis}};
    if (rb.prior) out["prior"] = *rb.prior;
    if (!rb.base.natural) out["log_base"] = rb.base.base;
    out["rules"] = std::move(rules);
    return out;
}

inline Rulebase rulebase_from_json(const ojson& doc, const std::string& where = "rulebase") {
    Rulebase rb;
    rb.calculus = jsonio::text(jsonio::field(doc, "calculus", where), where + ".calculus");
    if (doc.contains("hypothesis"))
        rb.hypothesis = jsonio::text(doc.at("hypothesis"), where + ".hypothesis");
    if (doc.contains("prior")) rb.prior = jsonio::number(doc.at("prior"), where + ".prior");
    if (doc.contains("log_base"))
        rb.base = LogBase::of(jsonio::number(doc.at("log_base"), where + ".log_base"));
    const ojson& rules = jsonio::field(doc, "rules", where);
    if (!rules.is_array()) fail(Errc::parse_error, where + ": rules must be an array");
    for (const ojson& jr : rules) {
        Rule r;
        r.id = jr.contains("id") ? jsonio::text(jr.at("id"), where)
                                 : "rule-" + std::to_string(rb.rules.size());
        r.evidence = parse_literal(jsonio::text(jsonio::field(jr, "evidence", where), where));
        r.hypothesis = jr.contains("hypothesis")
                           ? parse_literal(jsonio::text(jr.at("hypothesis"), where))
                           : Proposition{rb.hypothesis, true};
        r.strength = jsonio::number(jsonio::field(jr, "strength", where), where + ".strength");
        rb.rules.push_back(std::move(r));
    }
    rb.validate();
    return rb;
}

inline Rulebase load_rulebase(const std::string& path) {
    return rulebase_from_json(jsonio::parse_file(path), path);
}

inline ojson case_to_json(const CaseRecord& c) {
    ojson present = ojson::array(), absent = ojson::array();
    for (const Proposition& p : c.observed) (p.positive ? present : absent).push_back(p.variable);
    return {{"id", c.id}, {"present", present}, {"absent", absent}};
}

inline ojson cases_to_json(const std::vector<CaseRecord>& cases) {
    ojson arr = ojson::array();
    for (const auto& c : cases) arr.push_back(case_to_json(c));
    return {{"cases", arr}};
}

inline CaseRecord case_from_json(const ojson& doc, const std::string& where = "case") {
    CaseRecord c;
    c.id = doc.contains("id") ? jsonio::text(doc.at("id"), where) : "case";
    auto add = [&](const char* key, bool positive) {
        if (!doc.contains(key)) return;
        const ojson& arr = doc.at(key);
        if (!arr.is_array()) fail(Errc::parse_error, where + ": '" + key + "' must be an array");
        for (const ojson& name : arr) c.observed.insert({jsonio::text(name, where), positive});
    };
    add("present", true);
    add("absent", false);
    return c;
}

inline std::vector<CaseRecord> cases_from_json(const ojson& doc,
                                               const std::string& where = "cases") {
    const ojson& arr = jsonio::field(doc, "cases", where);
    if (!arr.is_array()) fail(Errc::parse_error, where + ": 'cases' must be an array");
    std::vector<CaseRecord> out;
    out.reserve(arr.size());
    for (const ojson& c : arr) out.push_back(case_from_json(c, where));
    return out;
}

inline std::vector<CaseRecord> load_cases(const std::string& path) {
    return cases_from_json(jsonio::parse_file(path), path);
}

// --- Table rendering ---------------------------------------------------------

namespace detail {
inline std::string cell(const std::optional<double>& v, const char* spec = "%.17g") {
    if (!v) return "";
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, *v);
    return buf;
}
inline std::string cell(double v, const char* spec = "%.17g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}
}  // namespace detail

inline ojson DivergenceTable::to_json() const {
    ojson rows_json = ojson::array();
    for (const auto& r : rows) {
        ojson jr = {{"case", r.case_id},
                    {"calculus", r.calculus},
                    {"fired", r.fired},
                    {"engine_value", r.engine_value},
                    {"engine_posterior", r.engine_posterior ? ojson(*r.engine_posterior)
                                                            : ojson(nullptr)},
                    {"truth_posterior", r.truth_posterior},
                    {"truth_value", r.truth_value ? ojson(*r.truth_value) : ojson(nullptr)},
                    {"posterior_error",
                     r.posterior_error ? ojson(*r.posterior_error) : ojson(nullptr)},
                    {"value_error", r.value_error ? ojson(*r.value_error) : ojson(nullptr)}};
        rows_json.push_back(std::move(jr));
    }
    ojson sums = ojson::array();
    for (const auto& s : summaries) {
        sums.push_back({{"calculus", s.calculus},
                        {"max_posterior_error", s.max_posterior_error},
                        {"max_value_error", s.max_value_error},
                        {"comparable_pairs", s.comparable_pairs},
                        {"discordant_pairs", s.discordant_pairs},
                        {"rank_disagreement", s.rank_disagreement}});
    }
    return {{"rows", rows_json}, {"summaries", sums}, {"notes", notes}};
}

inline std::string DivergenceTable::to_csv() const {
    std::string out =
        "case,calculus,fired,engine_value,engine_posterior,truth_posterior,truth_value,"
        "posterior_error,value_error\n";
    for (const auto& r : rows) {
        out += r.case_id + "," + r.calculus + "," + std::to_string(r.fired) + "," +
               detail::cell(r.engine_value) + "," + detail::cell(r.engine_posterior) + "," +
               detail::cell(r.truth_posterior) + "," + detail::cell(r.truth_value) + "," +
               detail::cell(r.posterior_error) + "," + detail::cell(r.value_error) + "\n";
    }
    return out;
}

inline std::string DivergenceTable::to_text() const {
    std::string out;
    char line[256];
    std::snprintf(line, sizeof line, "%-12s %-8s %5s %14s %14s %14s %12s %12s\n", "case",
                  "calculus", "fired", "value", "posterior", "truth", "post_err", "value_err");
    out += line;
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%-12s %-8s %5zu %14s %14s %14s %12s %12s\n",
                      r.case_id.c_str(), r.calculus.c_str(), r.fired,
                      detail::cell(r.engine_value, "%.6g").c_str(),
                      detail::cell(r.engine_posterior, "%.6g").c_str(),
                      detail::cell(r.truth_posterior, "%.6g").c_str(),
                      detail::cell(r.posterior_error, "%.3g").c_str(),
                      detail::cell(r.value_error, "%.3g").c_str());
        out += line;
    }
    out += "\n";
    for (const auto& s : summaries) {
        std::snprintf(line, sizeof line,
                      "%-8s max posterior error %-12s max value error %-12s rank disagreement "
                      "%.4f (%zu/%zu pairs)\n",
                      s.calculus.c_str(), detail::cell(s.max_posterior_error, "%.3g").c_str(),
                      detail::cell(s.max_value_error, "%.3g").c_str(), s.rank_disagreement,
                      s.discordant_pairs, s.comparable_pairs);
        out += line;
    }
    for (const auto& n : notes) out += "note: " + n + "\n";
    return out;
}

}  // namespace evicalc
