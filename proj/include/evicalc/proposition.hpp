#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "evicalc/errors.hpp"

namespace evicalc {

// One literal: a named binary variable, asserted or negated.
// Text form is the bare name for the positive literal, "~name" for the
// negated one.
struct Proposition {
    std::string variable;
    bool positive = true;

    Proposition negated() const { return {variable, !positive}; }

    auto operator<=>(const Proposition&) const = default;
};

inline std::string to_string(const Proposition& p) {
    return p.positive ? p.variable : "~" + p.variable;
}

inline Proposition parse_literal(const std::string& text) {
    if (text.empty() || text == "~")
        fail(Errc::parse_error, "empty literal");
    if (text.front() == '~')
        return {text.substr(1), false};
    return {text, true};
}

// A conjunction of literals with each variable mentioned at most once.
// The empty set is valid and stands for "no prior evidence".
// Kept sorted by variable name so identical sets compare and print equal.
class EvidenceSet {
public:
    EvidenceSet() = default;

    explicit EvidenceSet(std::vector<Proposition> lits) {
        for (auto& p : lits) insert(std::move(p));
    }

    static EvidenceSet of(std::initializer_list<Proposition> lits) {
        EvidenceSet s;
        for (const auto& p : lits) s.insert(p);
        return s;
    }

    void insert(Proposition p) {
        auto it = std::lower_bound(lits_.begin(), lits_.end(), p,
                                   [](const Proposition& a, const Proposition& b) {
                                       return a.variable < b.variable;
                                   });
        if (it != lits_.end() && it->variable == p.variable) {
            if (it->positive == p.positive) return;  // already present
            fail(Errc::duplicate_variable,
                 "variable '" + p.variable + "' appears in both polarities");
        }
        lits_.insert(it, std::move(p));
    }

    // Union of this set and `other`; conflicting polarities are an error.
    EvidenceSet with(const EvidenceSet& other) const {
        EvidenceSet out = *this;
        for (const auto& p : other.lits_) out.insert(p);
        return out;
    }

    EvidenceSet with(const Proposition& p) const {
        EvidenceSet out = *this;
        out.insert(p);
        return out;
    }

    bool contains(const Proposition& p) const {
        return std::find(lits_.begin(), lits_.end(), p) != lits_.end();
    }

    std::optional<bool> polarity_of(const std::string& variable) const {
        for (const auto& p : lits_)
            if (p.variable == variable) return p.positive;
        return std::nullopt;
    }

    bool empty() const { return lits_.empty(); }
    std::size_t size() const { return lits_.size(); }
    const std::vector<Proposition>& literals() const { return lits_; }
    auto begin() const { return lits_.begin(); }
    auto end() const { return lits_.end(); }

    bool operator==(const EvidenceSet&) const = default;

private:
    std::vector<Proposition> lits_;
};

inline std::string to_string(const EvidenceSet& e) {
    if (e.empty()) return "{}";
    std::string out = "{";
    bool first = true;
    for (const auto& p : e) {
        if (!first) out += ", ";
        out += to_string(p);
        first = false;
    }
    return out + "}";
}

// Variable layout of a distribution: one hypothesis variable plus n binary
// evidence variables, all names distinct.
struct Schema {
    std::string hypothesis;
    std::vector<std::string> evidence;

    void validate() const {
        if (hypothesis.empty())
            fail(Errc::invalid_parameter, "hypothesis name is empty");
        for (std::size_t i = 0; i < evidence.size(); ++i) {
            if (evidence[i].empty())
                fail(Errc::invalid_parameter, "evidence name is empty");
            if (evidence[i] == hypothesis)
                fail(Errc::duplicate_variable,
                     "evidence variable '" + evidence[i] + "' collides with hypothesis");
            for (std::size_t j = i + 1; j < evidence.size(); ++j)
                if (evidence[i] == evidence[j])
                    fail(Errc::duplicate_variable,
                         "evidence variable '" + evidence[i] + "' repeated");
        }
    }

    std::size_t n_evidence() const { return evidence.size(); }

    bool is_hypothesis(const std::string& name) const { return name == hypothesis; }

    // Index of an evidence variable, or nullopt for the hypothesis/unknown.
    std::optional<std::size_t> evidence_index(const std::string& name) const {
        for (std::size_t i = 0; i < evidence.size(); ++i)
            if (evidence[i] == name) return i;
        return std::nullopt;
    }

    bool operator==(const Schema&) const = default;
};

// Every consistent evidence assignment over `vars`: each variable absent,
// positive, or negated. 3^m sets, fixed enumeration order.
inline std::vector<EvidenceSet> evidence_assignments(const std::vector<std::string>& vars,
                                                     bool include_empty) {
    if (vars.size() > 12)
        fail(Errc::too_many_variables, "assignment enumeration over " +
                                           std::to_string(vars.size()) +
                                           " variables is intractable");
    std::size_t total = 1;
    for (std::size_t i = 0; i < vars.size(); ++i) total *= 3;
    std::vector<EvidenceSet> out;
    out.reserve(total);
    for (std::size_t k = include_empty ? 0 : 1; k < total; ++k) {
        EvidenceSet e;
        std::size_t rest = k;
        for (const auto& v : vars) {
            const std::size_t digit = rest % 3;
            rest /= 3;
            if (digit == 1) e.insert({v, true});
            if (digit == 2) e.insert({v, false});
        }
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace evicalc
