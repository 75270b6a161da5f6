#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "evicalc/errors.hpp"
#include "evicalc/proposition.hpp"

namespace evicalc {

namespace detail {

// Neumaier compensated summation. Tables hold up to 2^17 cells; plain
// accumulation would eat into the 1e-12 normalization budget.
struct NeumaierSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }

    double value() const { return sum + comp; }
};

}  // namespace detail

// Exact discrete joint distribution over one hypothesis variable and n
// binary evidence variables. Ground truth for every other module: all
// queries are raw sums over the 2^(n+1) table, never shortcuts.
//
// Cell addressing: bit i of a mask is evidence variable i being true,
// bit n is the hypothesis being true.
//
// The externally visible entry order (construction input, file format docs)
// lists the hypothesis-true block first and each variable true-before-false,
// e.g. for one evidence variable: (H E), (H ~E), (~H E), (~H ~E).
class JointDistribution {
public:
    static constexpr std::size_t kDefaultEvidenceCap = 16;

    using Mask = std::uint32_t;

    // Entries are given in the canonical external order described above.
    // Accepts any nonnegative vector summing to 1 within 1e-9 and
    // renormalizes it exactly.
    static JointDistribution from_table(Schema schema, std::span<const double> entries,
                                        std::size_t evidence_cap = kDefaultEvidenceCap) {
        schema.validate();
        check_cap(schema, evidence_cap);
        const std::size_t want = std::size_t{1} << (schema.n_evidence() + 1);
        if (entries.size() != want)
            fail(Errc::wrong_arity, "expected " + std::to_string(want) + " entries, got " +
                                        std::to_string(entries.size()));
        const std::size_t n = schema.n_evidence();
        std::vector<double> cells(want, 0.0);
        for (std::size_t k = 0; k < want; ++k)
            cells[external_to_mask(k, n)] = entries[k];
        return JointDistribution(std::move(schema), std::move(cells), true);
    }

    // Cells indexed by mask directly. Used by generators that already work
    // in mask space; any nonnegative mass with a positive total is accepted
    // and renormalized, so unnormalized draws can be passed as-is.
    static JointDistribution from_cells(Schema schema, std::vector<double> cells,
                                        std::size_t evidence_cap = kDefaultEvidenceCap) {
        schema.validate();
        check_cap(schema, evidence_cap);
        const std::size_t want = std::size_t{1} << (schema.n_evidence() + 1);
        if (cells.size() != want)
            fail(Errc::wrong_arity, "expected " + std::to_string(want) + " cells, got " +
                                        std::to_string(cells.size()));
        return JointDistribution(std::move(schema), std::move(cells), false);
    }

    const Schema& schema() const { return schema_; }
    std::size_t n_evidence() const { return schema_.n_evidence(); }
    std::size_t table_size() const { return table_.size(); }

    double cell(Mask m) const { return table_[m]; }

    // Entry in canonical external order (hypothesis block first,
    // true-before-false).
    double entry(std::size_t external_index) const {
        return table_[external_to_mask(external_index, schema_.n_evidence())];
    }

    Proposition hypothesis(bool positive = true) const {
        return {schema_.hypothesis, positive};
    }

    // Marginal probability of a conjunction of literals. The empty
    // conjunction has probability 1. Queries never renormalize.
    double probability(std::span<const Proposition> literals) const {
        Mask want = 0, care = 0;
        if (!translate(literals, want, care)) return 0.0;  // conflicting literals
        return mass(want, care);
    }

    double probability(const EvidenceSet& e) const {
        return probability(std::span<const Proposition>(e.literals()));
    }

    double probability(std::initializer_list<Proposition> lits) const {
        return probability(std::span<const Proposition>(lits.begin(), lits.size()));
    }

    // p(target | given) = p(target & given) / p(given).
    double conditional(std::span<const Proposition> target,
                       std::span<const Proposition> given) const {
        const double denom = probability(given);
        if (denom <= 0.0)
            fail(Errc::conditioning_on_zero_mass,
                 "conditioning event has zero probability");
        std::vector<Proposition> both(target.begin(), target.end());
        both.insert(both.end(), given.begin(), given.end());
        Mask want = 0, care = 0;
        if (!translate_lenient(both, want, care)) return 0.0;  // target contradicts given
        return mass(want, care) / denom;
    }

    double conditional(const Proposition& target, const EvidenceSet& given) const {
        const Proposition t[1] = {target};
        return conditional(std::span<const Proposition>(t, 1),
                           std::span<const Proposition>(given.literals()));
    }

    double conditional(const EvidenceSet& target, const EvidenceSet& given) const {
        return conditional(std::span<const Proposition>(target.literals()),
                           std::span<const Proposition>(given.literals()));
    }

    // Odds of a hypothesis literal given evidence: p(h|given)/p(~h|given).
    double odds(const Proposition& hyp, const EvidenceSet& given) const {
        const double p = conditional(hyp, given);
        if (p <= 0.0 || p >= 1.0)
            fail(Errc::degenerate_belief,
                 "p(" + to_string(hyp) + "|" + to_string(given) + ") = " +
                     std::to_string(p) + " has no finite odds");
        return p / (1.0 - p);
    }

    double odds(const EvidenceSet& given) const { return odds(hypothesis(), given); }

    // Likelihood ratio lambda(h, E, e) = p(E|h e) / p(E|~h e).
    // Zero numerator or denominator is a typed error, never 0 or infinity.
    double likelihood_ratio(const Proposition& hyp, const EvidenceSet& E,
                            const EvidenceSet& e) const {
        const EvidenceSet he = e.with(hyp);
        const EvidenceSet nhe = e.with(hyp.negated());
        const double ph = probability(he.literals());
        const double pnh = probability(nhe.literals());
        if (ph <= 0.0 || pnh <= 0.0)
            fail(Errc::conditioning_on_zero_mass,
                 "cannot condition on " + to_string(hyp) + " both ways under e = " +
                     to_string(e));
        const double num = probability(he.with(E).literals()) / ph;
        const double den = probability(nhe.with(E).literals()) / pnh;
        if (den <= 0.0)
            fail(Errc::undefined_ratio, "p(" + to_string(E) + "|~" + hyp.variable +
                                            " e) = 0; likelihood ratio undefined");
        if (num <= 0.0)
            fail(Errc::undefined_ratio, "p(" + to_string(E) + "|" + hyp.variable +
                                            " e) = 0; likelihood ratio would be zero");
        return num / den;
    }

    double likelihood_ratio(const EvidenceSet& E, const EvidenceSet& e) const {
        return likelihood_ratio(hypothesis(), E, e);
    }

    // True iff evidence variables are mutually independent given the
    // hypothesis and given its negation: every full evidence assignment
    // factorizes into per-variable conditionals within tol. A side with
    // (near-)zero mass is vacuous. Single-evidence schemas are trivially
    // independent.
    bool is_conditionally_independent(double tol = 1e-9) const {
        const std::size_t n = schema_.n_evidence();
        if (n <= 1) return true;
        for (int side = 0; side < 2; ++side) {
            const bool hyp_true = side == 0;
            const Mask hbit = Mask{1} << n;
            const Mask hwant = hyp_true ? hbit : 0;
            const double ph = mass(hwant, hbit);
            if (ph < 1e-12) continue;
            std::vector<double> marg(n);
            for (std::size_t i = 0; i < n; ++i)
                marg[i] = mass(hwant | (Mask{1} << i), hbit | (Mask{1} << i)) / ph;
            for (Mask a = 0; a < (Mask{1} << n); ++a) {
                double prod = 1.0;
                for (std::size_t i = 0; i < n; ++i)
                    prod *= (a >> i) & 1 ? marg[i] : 1.0 - marg[i];
                const double joint = table_[a | hwant] / ph;
                if (std::abs(joint - prod) > tol) return false;
            }
        }
        return true;
    }

    bool operator==(const JointDistribution&) const = default;

private:
    JointDistribution(Schema schema, std::vector<double> cells, bool strict)
        : schema_(std::move(schema)), table_(std::move(cells)) {
        detail::NeumaierSum total;
        for (double v : table_) {
            if (v < 0.0)
                fail(Errc::negative_probability,
                     "table entry " + std::to_string(v) + " is negative");
            if (!std::isfinite(v))
                fail(Errc::invalid_parameter, "table entry is not finite");
            total.add(v);
        }
        const double sum = total.value();
        if (sum <= 0.0) fail(Errc::zero_mass, "table has zero total mass");
        if (strict && std::abs(sum - 1.0) > 1e-9)
            fail(Errc::not_normalized,
                 "table mass " + std::to_string(sum) + " not within 1e-9 of 1");
        for (double& v : table_) v /= sum;
    }

    static void check_cap(const Schema& schema, std::size_t cap) {
        if (schema.n_evidence() > cap)
            fail(Errc::too_many_variables,
                 std::to_string(schema.n_evidence()) + " evidence variables exceeds cap " +
                     std::to_string(cap));
    }

    // External entry index <-> cell mask. External order counts with the
    // hypothesis as the most significant digit and "true" sorting first.
    static Mask external_to_mask(std::size_t k, std::size_t n) {
        Mask m = 0;
        if (((k >> n) & 1) == 0) m |= Mask{1} << n;  // hypothesis true
        for (std::size_t i = 0; i < n; ++i)
            if (((k >> (n - 1 - i)) & 1) == 0) m |= Mask{1} << i;
        return m;
    }

    bool translate(std::span<const Proposition> lits, Mask& want, Mask& care) const {
        want = care = 0;
        for (const auto& p : lits) {
            const Mask bit = bit_of(p.variable);
            if ((care & bit) != 0) {
                const bool prev = (want & bit) != 0;
                if (prev != p.positive) return false;  // conflicting polarities
                continue;
            }
            care |= bit;
            if (p.positive) want |= bit;
        }
        return true;
    }

    bool translate_lenient(const std::vector<Proposition>& lits, Mask& want,
                           Mask& care) const {
        return translate(std::span<const Proposition>(lits), want, care);
    }

    Mask bit_of(const std::string& variable) const {
        if (schema_.is_hypothesis(variable)) return Mask{1} << schema_.n_evidence();
        if (auto i = schema_.evidence_index(variable)) return Mask{1} << *i;
        fail(Errc::unknown_variable, "variable '" + variable + "' not in schema");
    }

    double mass(Mask want, Mask care) const {
        detail::NeumaierSum s;
        for (Mask m = 0; m < table_.size(); ++m)
            if ((m & care) == (want & care)) s.add(table_[m]);
        return s.value();
    }

    Schema schema_;
    std::vector<double> table_;
};

}  // namespace evicalc
