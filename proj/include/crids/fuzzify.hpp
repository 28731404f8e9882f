#pragma once

// Membership transforms mapping raw factor measurements onto [0, 1].

#include <span>
#include <vector>

#include "crids/model.hpp"

namespace crids {

/// Raised by transform_site when one factor's transform fails.
class FactorError : public InvalidParameter {
public:
    FactorError(Factor factor, const std::string& what);
    Factor factor() const { return factor_; }

private:
    Factor factor_;
};

/// Increasing S-curve 1 / (1 + (x/f2)^-f1). Scores 0 for x <= 0.
double sigmoid_membership(double x, double shape, double reference);

/// Decreasing S-curve 1 / (1 + (x/f2)^f1). Scores 1 for x <= 0.
double inverse_sigmoid_membership(double x, double shape, double reference);

/// Linear ramp from 0 at x_min to 1 at x_max, clamped outside.
double grade_membership(double x, double x_min, double x_max);

/// Linear ramp from 1 at x_min to 0 at x_max, clamped outside.
double inverse_grade_membership(double x, double x_min, double x_max);

/// Median of `values` (mean of the two central order statistics for even counts).
double median(std::span<const double> values);

/// Returns f2 for sigmoid-family specs: the fixed reference, or the median of `values`.
double resolve_reference(std::span<const double> values, const FactorTransformSpec& spec);

/// Applies `spec` to `x` given an already-resolved reference value.
double apply_transform(double x, const FactorTransformSpec& spec, double resolved_reference);

struct TransformTable {
    PerFactor<std::optional<FactorTransformSpec>> specs{};
    PerFactor<std::optional<double>> resolved_references{};

    void set(Factor f, const FactorTransformSpec& spec) { specs[index_of(f)] = spec; }
    const std::optional<FactorTransformSpec>& spec(Factor f) const { return specs[index_of(f)]; }

    /// Validates every spec and fills resolved_references, computing dataset medians
    /// over the sites that carry a raw value for the factor. A median reference for
    /// a factor no site carries stays unresolved.
    void resolve(std::span<const Site> sites);
};

/// Scores every raw factor present on `site`. Absent factors score 1; A4 is left at 1
/// because it is derived during aggregation.
MembershipVector transform_site(const Site& site, const TransformTable& table);

}  // namespace crids
