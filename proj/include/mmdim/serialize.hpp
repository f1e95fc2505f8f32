#pragma once

#include "mmdim/estimators.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace mmdim {

/// Input file error; the message starts with the offending field.
class SpecError : public std::invalid_argument {
public:
    SpecError(const std::string& field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(field) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

/// A parsed system spec: {n, kind, B, r, kMax, legScheduleOverride, legLimit, alpha, beta}.
struct SystemSpec {
    int n = 2;
    std::string kind;  // geometric | quadratic | sparse | two_block | identity
    Rational B{1};
    std::optional<Rational> r;
    long k_max = 8;
    long leg_limit = kDefaultLegLimit;
    std::vector<long> legs_override;
    Rational alpha;
    Rational beta;
};

/// Throws SpecError naming the field for malformed, unknown or inconsistent fields.
SystemSpec parse_spec(const std::string& text);
System build_system(const SystemSpec& spec);

/// Canonical JSON text of a system (sorted keys, two-space indent, trailing newline).
std::string serialize_system(const System& system);
/// With `validate`, every horseshoe block must pass validate_horseshoe and
/// the placement must pass check_disjointness; throws SpecError otherwise.
System load_system(const std::string& text, bool validate = true);

std::string csv_header();
std::string csv_row(const RateBound& row, int digits);
std::string csv_row(const NumericRow& row);

}  // namespace mmdim
