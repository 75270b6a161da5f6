#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>
#include <sys/wait.h>

#include <evicalc/evicalc.hpp>

namespace testutil {

using evicalc::ojson;

inline std::string env_path(const char* name) {
    const char* v = std::getenv(name);
    if (!v) throw std::runtime_error(std::string("missing env var ") + name);
    return v;
}

inline std::string data_path(const std::string& file) {
    return env_path("EVICALC_DATA") + "/" + file;
}

inline std::string schema_path(const std::string& file) {
    return env_path("EVICALC_SCHEMAS") + "/" + file;
}

struct CliResult {
    int status = -1;
    std::string out;
};

// Runs the installed CLI through the shell and captures stdout. `prefix`
// lets a test set environment variables for the child.
inline CliResult run_cli(const std::string& args, const std::string& prefix = "") {
    const std::string cmd = prefix + env_path("EVICALC_BIN") + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed for: " + cmd);
    CliResult r;
    char buf[4096];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    const int rc = pclose(pipe);
    r.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    return r;
}

// Just enough of JSON Schema to check the shipped report schema: type,
// enum, required, properties, items, additionalProperties.
inline bool schema_type_matches(const std::string& t, const ojson& v) {
    if (t == "object") return v.is_object();
    if (t == "array") return v.is_array();
    if (t == "string") return v.is_string();
    if (t == "number") return v.is_number();
    if (t == "integer") return v.is_number_integer();
    if (t == "boolean") return v.is_boolean();
    if (t == "null") return v.is_null();
    return false;
}

inline bool schema_check(const ojson& schema, const ojson& doc, const std::string& path,
                         std::string& err) {
    if (schema.contains("type")) {
        const ojson& t = schema.at("type");
        bool ok = false;
        if (t.is_string()) {
            ok = schema_type_matches(t.get<std::string>(), doc);
        } else {
            for (const ojson& one : t) ok = ok || schema_type_matches(one.get<std::string>(), doc);
        }
        if (!ok) {
            err = path + ": type mismatch";
            return false;
        }
    }
    if (schema.contains("enum")) {
        bool ok = false;
        for (const ojson& v : schema.at("enum")) ok = ok || v == doc;
        if (!ok) {
            err = path + ": value not in enum";
            return false;
        }
    }
    if (doc.is_object()) {
        if (schema.contains("required")) {
            for (const ojson& key : schema.at("required")) {
                if (!doc.contains(key.get<std::string>())) {
                    err = path + ": missing required '" + key.get<std::string>() + "'";
                    return false;
                }
            }
        }
        const ojson props =
            schema.contains("properties") ? schema.at("properties") : ojson::object();
        if (schema.contains("additionalProperties") &&
            schema.at("additionalProperties").is_boolean() &&
            !schema.at("additionalProperties").get<bool>()) {
            for (const auto& item : doc.items()) {
                if (!props.contains(item.key())) {
                    err = path + ": unexpected key '" + item.key() + "'";
                    return false;
                }
            }
        }
        for (const auto& item : doc.items()) {
            if (props.contains(item.key()) &&
                !schema_check(props.at(item.key()), item.value(), path + "." + item.key(), err))
                return false;
        }
    }
    if (doc.is_array() && schema.contains("items")) {
        for (std::size_t i = 0; i < doc.size(); ++i) {
            if (!schema_check(schema.at("items"), doc.at(i), path + "[" + std::to_string(i) + "]",
                              err))
                return false;
        }
    }
    return true;
}

inline bool validates_against_report_schema(const ojson& doc, std::string& err) {
    const ojson schema = evicalc::jsonio::parse_file(schema_path("report.schema.json"));
    return schema_check(schema, doc, "$", err);
}

}  // namespace testutil
