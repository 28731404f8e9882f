#include "crids/fuzzify.hpp"

#include <algorithm>
#include <cmath>

namespace crids {

namespace {

void check_sigmoid_params(double x, double shape, double reference) {
    if (std::isnan(x)) throw InvalidParameter("membership input is NaN");
    if (!(std::isfinite(shape) && shape > 0.0)) throw InvalidParameter("shape parameter f1 must be > 0");
    if (!(std::isfinite(reference) && reference > 0.0)) {
        throw InvalidParameter("reference value f2 must be > 0");
    }
}

void check_grade_params(double x, double x_min, double x_max) {
    if (std::isnan(x)) throw InvalidParameter("membership input is NaN");
    if (!(std::isfinite(x_min) && std::isfinite(x_max) && x_min < x_max)) {
        throw InvalidParameter("grade bounds require x_min < x_max");
    }
}

}  // namespace

FactorError::FactorError(Factor factor, const std::string& what)
    : InvalidParameter(std::string(to_string(factor)) + ": " + what), factor_(factor) {}

double sigmoid_membership(double x, double shape, double reference) {
    check_sigmoid_params(x, shape, reference);
    if (x <= 0.0) return 0.0;
    return 1.0 / (1.0 + std::pow(x / reference, -shape));
}

double inverse_sigmoid_membership(double x, double shape, double reference) {
    check_sigmoid_params(x, shape, reference);
    if (x <= 0.0) return 1.0;
    return 1.0 / (1.0 + std::pow(x / reference, shape));
}

double grade_membership(double x, double x_min, double x_max) {
    check_grade_params(x, x_min, x_max);
    if (x <= x_min) return 0.0;
    if (x >= x_max) return 1.0;
    return (x - x_min) / (x_max - x_min);
}

double inverse_grade_membership(double x, double x_min, double x_max) {
    check_grade_params(x, x_min, x_max);
    if (x <= x_min) return 1.0;
    if (x >= x_max) return 0.0;
    return (x_max - x) / (x_max - x_min);
}

double median(std::span<const double> values) {
    if (values.empty()) throw EmptyDataset("median of an empty dataset");
    std::vector<double> v(values.begin(), values.end());
    const auto n = v.size();
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(v.begin(), mid, v.end());
    const double upper = *mid;
    if (n % 2 == 1) return upper;
    const double lower = *std::max_element(v.begin(), mid);
    return lower + (upper - lower) / 2.0;
}

double resolve_reference(std::span<const double> values, const FactorTransformSpec& spec) {
    if (spec.reference_mode == ReferenceMode::Fixed) return spec.reference;
    return median(values);
}

double apply_transform(double x, const FactorTransformSpec& spec, double resolved_reference) {
    switch (spec.kind) {
        case TransformKind::Sigmoid:
            return sigmoid_membership(x, spec.shape, resolved_reference);
        case TransformKind::InverseSigmoid:
            return inverse_sigmoid_membership(x, spec.shape, resolved_reference);
        case TransformKind::Grade:
            return grade_membership(x, spec.x_min, spec.x_max);
        case TransformKind::InverseGrade:
            return inverse_grade_membership(x, spec.x_min, spec.x_max);
        case TransformKind::Passthrough:
            if (!(x >= 0.0 && x <= 1.0)) {
                throw InvalidParameter("passthrough value outside [0, 1]");
            }
            return x;
    }
    throw InvalidParameter("unknown transform kind");
}

void TransformTable::resolve(std::span<const Site> sites) {
    for (const auto& fi : registry()) {
        const auto i = index_of(fi.factor);
        resolved_references[i].reset();
        if (!specs[i]) continue;
        const auto& spec = *specs[i];
        try {
            spec.validate();
            if (spec.reference_mode == ReferenceMode::Fixed) {
                resolved_references[i] = spec.reference;
                continue;
            }
            std::vector<double> values;
            values.reserve(sites.size());
            for (const auto& s : sites) {
                if (auto v = s.raw[i]) values.push_back(*v);
            }
            if (values.empty()) continue;
            const double ref = resolve_reference(values, spec);
            if (!(ref > 0.0)) {
                throw InvalidParameter("dataset median reference is not positive");
            }
            resolved_references[i] = ref;
        } catch (const Error& e) {
            throw FactorError(fi.factor, e.what());
        }
    }
}

MembershipVector transform_site(const Site& site, const TransformTable& table) {
    MembershipVector mv;
    for (const auto& fi : registry()) {
        if (fi.factor == Factor::A4) continue;
        const auto i = index_of(fi.factor);
        const auto& raw = site.raw[i];
        if (!raw) continue;
        const auto& spec = table.specs[i];
        if (!spec) throw FactorError(fi.factor, "no transform configured");
        if (!table.resolved_references[i]) throw FactorError(fi.factor, "reference not resolved");
        try {
            mv.scores[i] = apply_transform(*raw, *spec, *table.resolved_references[i]);
        } catch (const FactorError&) {
            throw;
        } catch (const Error& e) {
            throw FactorError(fi.factor, e.what());
        }
    }
    return mv;
}

}  // namespace crids
