#pragma once

#include <stdexcept>
#include <string>

namespace evicalc {

// Every failure mode the library reports. Queries never return NaN or
// infinities; boundary cases raise one of these instead.
enum class Errc {
    negative_probability,
    wrong_arity,
    zero_mass,
    not_normalized,
    too_many_variables,
    unknown_variable,
    duplicate_variable,
    conditioning_on_zero_mass,
    degenerate_belief,
    undefined_ratio,
    contradictory_certainty,
    invalid_parameter,
    kind_mismatch,
    parse_error,
};

inline const char* errc_name(Errc c) {
    switch (c) {
        case Errc::negative_probability:      return "NegativeProbability";
        case Errc::wrong_arity:               return "WrongArity";
        case Errc::zero_mass:                 return "ZeroMass";
        case Errc::not_normalized:            return "NotNormalized";
        case Errc::too_many_variables:        return "TooManyVariables";
        case Errc::unknown_variable:          return "UnknownVariable";
        case Errc::duplicate_variable:        return "DuplicateVariable";
        case Errc::conditioning_on_zero_mass: return "ConditioningOnZeroMass";
        case Errc::degenerate_belief:         return "DegenerateBelief";
        case Errc::undefined_ratio:           return "UndefinedRatio";
        case Errc::contradictory_certainty:   return "ContradictoryCertainty";
        case Errc::invalid_parameter:         return "InvalidParameter";
        case Errc::kind_mismatch:             return "KindMismatch";
        case Errc::parse_error:               return "ParseError";
    }
    return "UnknownError";
}

class CalcError : public std::runtime_error {
public:
    CalcError(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) {
    throw CalcError(code, msg);
}

}  // namespace evicalc
