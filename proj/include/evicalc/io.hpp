#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "evicalc/errors.hpp"
#include "evicalc/joint.hpp"
#include "evicalc/naive_bayes.hpp"
#include "evicalc/scenario.hpp"

namespace evicalc {

using ojson = nlohmann::ordered_json;

namespace jsonio {

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::parse_error, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline ojson parse(const std::string& text, const std::string& origin) {
    try {
        return ojson::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(Errc::parse_error, origin + ": " + e.what());
    }
}

inline ojson parse_file(const std::string& path) { return parse(read_text_file(path), path); }

inline const ojson& field(const ojson& obj, const std::string& key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key))
        fail(Errc::parse_error, where + ": missing field '" + key + "'");
    return obj.at(key);
}

inline double number(const ojson& v, const std::string& where) {
    if (!v.is_number()) fail(Errc::parse_error, where + ": expected a number");
    return v.get<double>();
}

inline std::string text(const ojson& v, const std::string& where) {
    if (!v.is_string()) fail(Errc::parse_error, where + ": expected a string");
    return v.get<std::string>();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Errc::parse_error, "cannot write '" + path + "'");
    out << content;
}

}  // namespace jsonio

// A loaded model: always expandable to a joint, with the naive Bayes
// parameterization kept when that is what the file contained.
struct ModelFile {
    JointDistribution joint;
    std::optional<NaiveBayesModel> naive_bayes;
    std::string hypothesis;
};

inline ojson model_to_json(const NaiveBayesModel& m) {
    ojson findings = ojson::array();
    for (const auto& f : m.findings) {
        findings.push_back(
            {{"name", f.name}, {"p_given_h", f.p_given_h}, {"p_given_not_h", f.p_given_not_h}});
    }
    return {{"naive_bayes",
             {{"hypothesis", m.hypothesis}, {"prior", m.prior}, {"findings", findings}}}};
}

inline ojson model_to_json(const JointDistribution& d) {
    const auto& schema = d.schema();
    ojson entries = ojson::array();
    const std::size_t rows = std::size_t{1} << (schema.evidence.size() + 1);
    for (std::size_t k = 0; k < rows; ++k) entries.push_back(d.entry(k));
    return {{"table",
             {{"hypothesis", schema.hypothesis},
              {"evidence", schema.evidence},
              {"entries", entries}}}};
}

inline ojson model_to_json(const Scenario& s) {
    return s.source ? model_to_json(*s.source) : model_to_json(s.joint);
}

inline ModelFile model_from_json(const ojson& doc, const std::string& where = "model") {
    if (!doc.is_object()) fail(Errc::parse_error, where + ": expected a JSON object");
    if (doc.contains("naive_bayes")) {
        const ojson& nb = doc.at("naive_bayes");
        NaiveBayesModel m;
        if (nb.contains("hypothesis")) m.hypothesis = jsonio::text(nb.at("hypothesis"), where);
        m.prior = jsonio::number(jsonio::field(nb, "prior", where), where + ".prior");
        const ojson& fs = jsonio::field(nb, "findings", where);
        if (!fs.is_array()) fail(Errc::parse_error, where + ": findings must be an array");
        for (const ojson& f : fs) {
            Finding fin;
            fin.name = jsonio::text(jsonio::field(f, "name", where), where + ".name");
            fin.p_given_h = jsonio::number(jsonio::field(f, "p_given_h", where), where);
            fin.p_given_not_h = jsonio::number(jsonio::field(f, "p_given_not_h", where), where);
            m.findings.push_back(std::move(fin));
        }
        m.validate();
        return {joint_from_naive_bayes(m), m, m.hypothesis};
    }
    if (doc.contains("table")) {
        const ojson& t = doc.at("table");
        Schema schema;
        schema.hypothesis =
            t.contains("hypothesis") ? jsonio::text(t.at("hypothesis"), where) : "H";
        const ojson& ev = jsonio::field(t, "evidence", where);
        if (!ev.is_array()) fail(Errc::parse_error, where + ": evidence must be an array");
        for (const ojson& name : ev) schema.evidence.push_back(jsonio::text(name, where));
        const ojson& entries = jsonio::field(t, "entries", where);
        if (!entries.is_array()) fail(Errc::parse_error, where + ": entries must be an array");
        std::vector<double> values;
        values.reserve(entries.size());
        for (const ojson& v : entries) values.push_back(jsonio::number(v, where + ".entries"));
        return {JointDistribution::from_table(schema, values), std::nullopt, schema.hypothesis};
    }
    fail(Errc::parse_error, where + ": expected a 'table' or 'naive_bayes' model");
}

inline ModelFile load_model(const std::string& path) {
    return model_from_json(jsonio::parse_file(path), path);
}

inline Scenario scenario_from_model(const ModelFile& m, const std::string& id) {
    return {id, m.joint, m.naive_bayes};
}

inline ojson evidence_to_json(const EvidenceSet& e) {
    ojson arr = ojson::array();
    for (const auto& p : e) arr.push_back(to_string(p));
    return arr;
}

inline EvidenceSet evidence_from_json(const ojson& arr, const std::string& where = "evidence") {
    if (!arr.is_array()) fail(Errc::parse_error, where + ": expected an array of literals");
    EvidenceSet out;
    for (const ojson& lit : arr) out.insert(parse_literal(jsonio::text(lit, where)));
    return out;
}

}  // namespace evicalc
