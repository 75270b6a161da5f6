// evicalc command line: audits, canned demonstrations, rule evaluation, and
// calculus comparison. Exit codes: 0 holds/success, 1 usage, 2 input, 3 an
// audited axiom is violated.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <evicalc/evicalc.hpp>

namespace {

using namespace evicalc;

struct UsageError {
    std::string message;
};

[[noreturn]] void usage_fail(const std::string& msg) { throw UsageError{msg}; }

struct Options {
    std::string measure = "lambda";
    std::string calculus;
    std::string family = "ci-grid";
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::size_t samples = 500;
    double tol = 1e-9;
    double match_tol = 1e-4;
    double phi_tol = 1e-2;
    std::string log_base = "e";
    std::string thresholds;
    std::string format = "text";
    std::string out;
    std::string model;
    std::string rules;
    std::string case_path;
    std::string demo_name;
};

std::uint64_t resolve_seed(const Options& o) {
    if (o.seed_given) return o.seed;
    if (const char* env = std::getenv("EVICALC_SEED")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0') usage_fail("EVICALC_SEED is not an unsigned integer");
        return static_cast<std::uint64_t>(v);
    }
    return 0;
}

LogBase resolve_log_base(const Options& o) {
    if (o.log_base == "e") return LogBase::e();
    char* end = nullptr;
    const double b = std::strtod(o.log_base.c_str(), &end);
    if (end == o.log_base.c_str() || *end != '\0')
        usage_fail("--log-base must be 'e' or a number");
    try {
        return LogBase::of(b);
    } catch (const CalcError& e) {
        usage_fail(e.what());
    }
}

EvokingScale resolve_scale(const Options& o) {
    if (o.thresholds.empty()) return EvokingScale::defaults();
    EvokingScale scale;
    scale.bounds.clear();
    std::string item;
    for (std::size_t i = 0; i <= o.thresholds.size(); ++i) {
        if (i < o.thresholds.size() && o.thresholds[i] != ',') {
            item += o.thresholds[i];
            continue;
        }
        char* end = nullptr;
        const double v = std::strtod(item.c_str(), &end);
        if (item.empty() || end == item.c_str() || *end != '\0')
            usage_fail("--thresholds must be a comma-separated list of numbers");
        scale.bounds.push_back(v);
        item.clear();
    }
    try {
        scale.validate();
    } catch (const CalcError& e) {
        usage_fail(e.what());
    }
    return scale;
}

std::string resolve_format(const Options& o, bool csv_ok) {
    if (o.format == "text" || o.format == "json") return o.format;
    if (o.format == "csv") {
        if (!csv_ok) usage_fail("csv format applies to eval and compare only");
        return o.format;
    }
    usage_fail("unknown format '" + o.format + "' (expected text, json, or csv)");
}

void emit(const Options& o, const std::string& payload) {
    if (o.out.empty())
        std::cout << payload;
    else
        jsonio::write_text_file(o.out, payload);
}

ojson envelope(const std::string& command, ojson config, const std::string& verdict) {
    return {{"schema", "evicalc-report/1"},
            {"command", command},
            {"config", std::move(config)},
            {"verdict", verdict}};
}

std::string dump(const ojson& doc) { return doc.dump(2) + "\n"; }

int finish_audit(const Options& o, const std::string& command, ojson config,
                 const std::vector<AuditReport>& reports, const std::string& format) {
    bool violated = false;
    for (const auto& r : reports) violated = violated || r.violated;
    const std::string verdict = violated ? "violated" : "holds";

    if (format == "json") {
        ojson env = envelope(command, std::move(config), verdict);
        ojson arr = ojson::array();
        for (const auto& r : reports) arr.push_back(r.to_json());
        env["reports"] = std::move(arr);
        emit(o, dump(env));
    } else {
        std::string text;
        for (const auto& r : reports) {
            if (!text.empty()) text += "\n";
            text += r.to_text();
        }
        text += "\noverall verdict: " + verdict + "\n";
        emit(o, text);
    }
    return violated ? 3 : 0;
}

// --- audit -------------------------------------------------------------------

int run_audit(const Options& o) {
    const bool posterior = o.measure == "posterior";
    if (!posterior) {
        bool known = false;
        for (const auto& name : measure_names()) known = known || name == o.measure;
        if (!known)
            usage_fail("unknown measure '" + o.measure +
                       "' (expected lambda, weight, cf, evoking, or posterior)");
    }
    const LogBase base = resolve_log_base(o);
    const EvokingScale scale = resolve_scale(o);
    const std::string format = resolve_format(o, false);
    FamilySpec spec{o.family, 2, o.samples, resolve_seed(o)};
    try {
        spec.validate();
    } catch (const CalcError& e) {
        usage_fail(e.what());
    }
    if (spec.samples == 0) usage_fail("--samples must be positive");

    AuditOptions opt;
    opt.tol = o.tol;
    opt.match_tol = o.match_tol;
    opt.phi_tol = o.phi_tol;

    ojson config = {{"command", "audit"},
                    {"measure", o.measure},
                    {"family", spec.family},
                    {"n_evidence", spec.n_evidence},
                    {"seed", spec.seed},
                    {"samples", spec.samples},
                    {"tol", opt.tol},
                    {"match_tol", opt.match_tol},
                    {"phi_tol", opt.phi_tol},
                    {"log_base", o.log_base},
                    {"thresholds", scale.bounds},
                    {"format", format}};

    const std::vector<Scenario> family = generate_scenarios(spec);
    std::vector<AuditReport> reports;
    if (posterior) {
        reports.push_back(check_marginal_independence_trap(family, opt, config));
    } else {
        const UpdateMeasure m = measure_from_name(o.measure, base, scale);
        reports.push_back(check_modularity(m, family, opt, config));
        reports.push_back(check_update_property(m, family, opt, config));
    }
    return finish_audit(o, "audit", std::move(config), reports, format);
}

// --- demo --------------------------------------------------------------------

int run_demo(const Options& o) {
    if (o.demo_name != "mycin-counterexample" && o.demo_name != "cf-limit-trap" &&
        o.demo_name != "internist-modularity")
        usage_fail("unknown demo '" + o.demo_name +
                   "' (expected mycin-counterexample, cf-limit-trap, or internist-modularity)");
    const EvokingScale scale = resolve_scale(o);
    const std::string format = resolve_format(o, false);

    AuditOptions opt;
    opt.tol = o.tol;
    opt.match_tol = o.match_tol;
    opt.phi_tol = o.phi_tol;

    ojson config = {{"command", "demo"},
                    {"name", o.demo_name},
                    {"tol", opt.tol},
                    {"thresholds", scale.bounds},
                    {"format", format}};

    std::vector<AuditReport> reports;
    if (o.demo_name == "mycin-counterexample") {
        reports.push_back(reproduce_mycin_counterexample(opt, config));
    } else if (o.demo_name == "cf-limit-trap") {
        const std::vector<Scenario> grid = ci_grid_scenarios(2);
        reports.push_back(check_marginal_independence_trap(grid, opt, config));
        reports.push_back(check_cf_limit_case(grid, 0.05, opt, config));
    } else {
        const NaiveBayesModel m = counterexample_model();
        const Scenario s{"counterexample", joint_from_naive_bayes(m), m};
        reports.push_back(audit_evoking_strengths({s}, scale, opt, config));
    }
    return finish_audit(o, "demo", std::move(config), reports, format);
}

// --- eval --------------------------------------------------------------------

int run_eval(const Options& o) {
    const std::string format = resolve_format(o, true);
    if (o.rules.empty()) usage_fail("eval needs --rules");
    if (o.case_path.empty()) usage_fail("eval needs --case");

    const Rulebase rb = load_rulebase(o.rules);
    const std::vector<CaseRecord> cases = load_cases(o.case_path);
    const std::string calculus = o.calculus.empty() ? rb.calculus : o.calculus;

    ojson config = {{"command", "eval"},    {"rules", o.rules},
                    {"case", o.case_path},  {"calculus", calculus},
                    {"format", format}};

    std::vector<BeliefState> states;
    states.reserve(cases.size());
    for (const auto& c : cases) states.push_back(evaluate_case(rb, c, calculus));

    if (format == "json") {
        ojson env = envelope("eval", std::move(config), "success");
        ojson arr = ojson::array();
        for (std::size_t i = 0; i < cases.size(); ++i) {
            const BeliefState& bs = states[i];
            arr.push_back({{"case", cases[i].id},
                           {"hypothesis", bs.hypothesis},
                           {"calculus", bs.calculus},
                           {"fired", bs.fired},
                           {"value", bs.value},
                           {"posterior", bs.posterior ? ojson(*bs.posterior) : ojson(nullptr)}});
        }
        env["results"] = std::move(arr);
        emit(o, dump(env));
    } else if (format == "csv") {
        std::string out = "case,hypothesis,calculus,fired,value,posterior\n";
        char buf[64];
        for (std::size_t i = 0; i < cases.size(); ++i) {
            const BeliefState& bs = states[i];
            std::snprintf(buf, sizeof buf, "%.17g", bs.value);
            out += cases[i].id + "," + bs.hypothesis + "," + bs.calculus + "," +
                   std::to_string(bs.fired) + "," + buf + ",";
            if (bs.posterior) {
                std::snprintf(buf, sizeof buf, "%.17g", *bs.posterior);
                out += buf;
            }
            out += "\n";
        }
        emit(o, out);
    } else {
        std::string out;
        char line[192];
        for (std::size_t i = 0; i < cases.size(); ++i) {
            const BeliefState& bs = states[i];
            std::string post = "-";
            if (bs.posterior) {
                char buf[64];
                std::snprintf(buf, sizeof buf, "%.6g", *bs.posterior);
                post = buf;
            }
            std::snprintf(line, sizeof line, "%-12s %s (%s) fired=%zu value=%.6g posterior=%s\n",
                          cases[i].id.c_str(), bs.hypothesis.c_str(), bs.calculus.c_str(),
                          bs.fired, bs.value, post.c_str());
            out += line;
        }
        if (cases.empty()) out = "no cases\n";
        emit(o, out);
    }
    return 0;
}

// --- compare -----------------------------------------------------------------

int run_compare(const Options& o) {
    const std::string format = resolve_format(o, true);
    if (o.model.empty()) usage_fail("compare needs --model");
    const LogBase base = resolve_log_base(o);
    const EvokingScale scale = resolve_scale(o);

    const ModelFile model = load_model(o.model);
    std::vector<CaseRecord> cases;
    if (!o.case_path.empty()) {
        cases = load_cases(o.case_path);
    } else {
        const std::vector<std::string>& vars = model.joint.schema().evidence;
        if (vars.size() > 8)
            fail(Errc::invalid_parameter,
                 "exhaustive cases need 8 or fewer findings; pass --case");
        cases = exhaustive_cases(vars);
    }

    ojson config = {{"command", "compare"}, {"model", o.model},
                    {"case", o.case_path},  {"log_base", o.log_base},
                    {"thresholds", scale.bounds}, {"format", format}};

    const DivergenceTable table =
        compare_calculi(model, cases, {"weight", "lambda", "cf", "evoking"}, base, scale);

    if (format == "json") {
        ojson env = envelope("compare", std::move(config), "success");
        env["table"] = table.to_json();
        emit(o, dump(env));
    } else if (format == "csv") {
        emit(o, table.to_csv());
    } else {
        emit(o, table.to_text());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"belief-update workbench: exact joints, update calculi, axiom audits"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--tol", o.tol, "modularity deviation tolerance");
        cmd->add_option("--match-tol", o.match_tol, "collision search: component match tolerance");
        cmd->add_option("--phi-tol", o.phi_tol, "collision search: combined difference threshold");
        cmd->add_option("--log-base", o.log_base, "weight log base: 'e' or a number");
        cmd->add_option("--thresholds", o.thresholds, "evoking scale bounds, comma-separated");
        cmd->add_option("--format", o.format, "output format: text, json, csv");
        cmd->add_option("--out", o.out, "write output to this path instead of stdout");
    };

    CLI::App* audit = app.add_subcommand("audit", "audit one measure against the update axioms");
    audit->add_option("--measure", o.measure, "lambda, weight, cf, evoking, or posterior");
    audit->add_option("--family", o.family, "ci-grid, ci-random, or general-random");
    audit->add_option("--seed", o.seed, "random family seed")->trigger_on_parse();
    audit->add_option("--samples", o.samples, "random family size");
    add_common(audit);

    CLI::App* demo = app.add_subcommand("demo", "run a canned demonstration");
    demo->add_option("name", o.demo_name,
                     "mycin-counterexample, cf-limit-trap, or internist-modularity");
    add_common(demo);

    CLI::App* eval = app.add_subcommand("eval", "evaluate cases against a rulebase");
    eval->add_option("--rules", o.rules, "rulebase JSON path");
    eval->add_option("--case", o.case_path, "case file JSON path");
    eval->add_option("--calculus", o.calculus, "expected rulebase calculus");
    add_common(eval);

    CLI::App* compare = app.add_subcommand("compare", "divergence table of all calculi");
    compare->add_option("--model", o.model, "model JSON path");
    compare->add_option("--case", o.case_path, "case file JSON path (default: exhaustive)");
    compare->add_option("--calculus", o.calculus, "unused; accepted for symmetry");
    add_common(compare);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    o.seed_given = audit->count("--seed") > 0;

    try {
        if (audit->parsed()) return run_audit(o);
        if (demo->parsed()) return run_demo(o);
        if (eval->parsed()) return run_eval(o);
        return run_compare(o);
    } catch (const UsageError& u) {
        std::cerr << "error: " << u.message << "\n";
        return 1;
    } catch (const CalcError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
