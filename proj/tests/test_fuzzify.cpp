#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "crids/config.hpp"
#include "crids/fuzzify.hpp"

using namespace crids;

namespace {

FactorTransformSpec sig(TransformKind k, double f1, double f2) {
    FactorTransformSpec s;
    s.kind = k;
    s.shape = f1;
    s.reference = f2;
    return s;
}

FactorTransformSpec grade(TransformKind k, double lo, double hi) {
    FactorTransformSpec s;
    s.kind = k;
    s.x_min = lo;
    s.x_max = hi;
    return s;
}

}  // namespace

TEST_CASE("sigmoid membership") {
    CHECK(sigmoid_membership(3, 7.5, 3) == 0.5);
    CHECK(sigmoid_membership(0, 2, 3) == 0.0);
    CHECK(sigmoid_membership(-1.7, 5, 3) == 0.0);
    CHECK(sigmoid_membership(6, 2, 3) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK_THROWS_AS(sigmoid_membership(1, 0, 3), InvalidParameter);
    CHECK_THROWS_AS(sigmoid_membership(1, 2, 0), InvalidParameter);
    CHECK_THROWS_AS(sigmoid_membership(NAN, 2, 3), InvalidParameter);
}

TEST_CASE("inverse sigmoid membership") {
    CHECK(inverse_sigmoid_membership(250, 3.3, 250) == 0.5);
    CHECK(inverse_sigmoid_membership(0, 3, 500) == 1.0);
    CHECK(inverse_sigmoid_membership(1000, 1, 500) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK_THROWS_AS(inverse_sigmoid_membership(1, -1, 3), InvalidParameter);
}

TEST_CASE("grade and inverse grade") {
    CHECK(grade_membership(2, 2, 10) == 0.0);
    CHECK(grade_membership(6, 2, 10) == 0.5);
    CHECK(grade_membership(20, 2, 10) == 1.0);
    CHECK(inverse_grade_membership(150, 200, 1000) == 1.0);
    CHECK(inverse_grade_membership(1200, 200, 1000) == 0.0);
    CHECK(inverse_grade_membership(600, 200, 1000) == 0.5);
    CHECK_THROWS_AS(grade_membership(1, 3, 3), InvalidParameter);
    CHECK_THROWS_AS(inverse_grade_membership(1, 4, 3), InvalidParameter);
}

TEST_CASE("median and reference resolution") {
    const std::vector<double> odd{5, 1, 3, 2, 4};
    const std::vector<double> even{4, 1, 3, 2};
    CHECK(median(odd) == 3.0);
    CHECK(median(even) == 2.5);
    CHECK_THROWS_AS(median(std::vector<double>{}), EmptyDataset);

    auto fixed = sig(TransformKind::Sigmoid, 2, 3);
    CHECK(resolve_reference(odd, fixed) == 3.0);
    auto med = fixed;
    med.reference_mode = ReferenceMode::MedianOfDataset;
    CHECK(resolve_reference(even, med) == 2.5);
    CHECK_THROWS_AS(resolve_reference(std::vector<double>{}, med), EmptyDataset);
}

TEST_CASE("random samples stay in range, hit the midpoint and sum to one") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> f1d(0.1, 10), f2d(0.1, 5000), scale(0, 4);
    for (int k = 0; k < 10000; ++k) {
        const double f1 = f1d(rng), f2 = f2d(rng), x = f2 * scale(rng);
        const double s = sigmoid_membership(x, f1, f2);
        const double r = inverse_sigmoid_membership(x, f1, f2);
        REQUIRE(s >= 0.0);
        REQUIRE(s <= 1.0);
        REQUIRE(r >= 0.0);
        REQUIRE(r <= 1.0);
        REQUIRE(std::abs(s + r - 1.0) <= 1e-12);
        REQUIRE(std::abs(sigmoid_membership(f2, f1, f2) - 0.5) <= 1e-12);

        // Strict monotonicity away from the saturated tails.
        const double x2 = x * 1.01 + 1e-9 * f2;
        const double s2 = sigmoid_membership(x2, f1, f2);
        if (s > 1e-6 && s2 < 1 - 1e-6) REQUIRE(s2 > s);
        if (s > 1e-6 && s2 < 1 - 1e-6) REQUIRE(inverse_sigmoid_membership(x2, f1, f2) < r);
    }
}

TEST_CASE("steeper shape sharpens the curve on both sides of the reference") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> f1d(0.1, 8), f2d(1, 1000), ratio(0.01, 3);
    for (int k = 0; k < 2000; ++k) {
        const double f1 = f1d(rng), f2 = f2d(rng), x = f2 * ratio(rng);
        const double a = sigmoid_membership(x, f1, f2), b = sigmoid_membership(x, f1 + 1, f2);
        if (x > f2) CHECK(b >= a);
        if (x < f2) CHECK(b <= a);
    }
}

TEST_CASE("grade family is monotone and clamped") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-100, 100);
    for (int k = 0; k < 2000; ++k) {
        double lo = u(rng), hi = u(rng);
        if (lo == hi) continue;
        if (lo > hi) std::swap(lo, hi);
        const double x = u(rng) * 1.5, y = x + std::abs(u(rng));
        const double g = grade_membership(x, lo, hi);
        CHECK(g >= 0.0);
        CHECK(g <= 1.0);
        CHECK(grade_membership(y, lo, hi) >= g);
        CHECK(inverse_grade_membership(y, lo, hi) <= inverse_grade_membership(x, lo, hi));
        CHECK(grade_membership(x, lo, hi) + inverse_grade_membership(x, lo, hi) == doctest::Approx(1.0));
    }
}

TEST_CASE("shipped vertical separation curve converges by six feet") {
    const auto t = default_transforms();
    const auto& vsd = *t.spec(Factor::R3);
    CHECK(vsd.kind == TransformKind::Sigmoid);
    CHECK(vsd.reference == 3.0);
    CHECK(apply_transform(3.0, vsd, vsd.reference) == 0.5);
    CHECK(apply_transform(6.0, vsd, vsd.reference) > 0.95);
    const auto& well = *t.spec(Factor::A3);
    CHECK(well.reference == 200.0);
}

TEST_CASE("passthrough requires unit-interval input") {
    FactorTransformSpec p;
    CHECK(apply_transform(0.25, p, 1.0) == 0.25);
    CHECK_THROWS_AS(apply_transform(1.5, p, 1.0), InvalidParameter);
}

TEST_CASE("transform_site scores present factors and leaves the rest at one") {
    TransformTable table;
    table.set(Factor::R3, sig(TransformKind::Sigmoid, 5, 3));
    table.set(Factor::Re3, grade(TransformKind::InverseGrade, 200, 1000));
    table.set(Factor::A3, sig(TransformKind::Sigmoid, 5, 200));
    Site only_vsd{"a", {0, 0}, {}, {}};
    only_vsd.raw[index_of(Factor::R3)] = 3.0;
    Site mids{"b", {0, 0}, {}, {}};
    mids.raw[index_of(Factor::R3)] = 3.0;
    mids.raw[index_of(Factor::Re3)] = 600.0;
    mids.raw[index_of(Factor::A3)] = 200.0;
    Site overflow{"c", {0, 0}, {}, {}};
    overflow.raw[index_of(Factor::Re3)] = 150.0;
    const std::vector<Site> sites{only_vsd, mids, overflow};
    table.resolve(sites);

    const auto a = transform_site(only_vsd, table);
    for (const auto& fi : registry()) CHECK(a.score(fi.factor) == (fi.factor == Factor::R3 ? 0.5 : 1.0));
    const auto b = transform_site(mids, table);
    CHECK(b.score(Factor::R3) == 0.5);
    CHECK(b.score(Factor::Re3) == 0.5);
    CHECK(b.score(Factor::A3) == 0.5);
    CHECK(transform_site(overflow, table).score(Factor::Re3) == 1.0);
}

TEST_CASE("transform errors carry the factor") {
    TransformTable table;
    table.set(Factor::A6, sig(TransformKind::Sigmoid, 2, 100));
    Site s{"a", {0, 0}, {}, {}};
    s.raw[index_of(Factor::A6)] = NAN;
    s.raw[index_of(Factor::Re1)] = 10;
    table.resolve(std::vector<Site>{s});
    try {
        transform_site(s, table);
        FAIL("expected an error");
    } catch (const FactorError& e) {
        CHECK(e.factor() == Factor::A6);
    }
    s.raw[index_of(Factor::A6)] = 10;
    try {
        transform_site(s, table);
        FAIL("expected an error");
    } catch (const FactorError& e) {
        CHECK(e.factor() == Factor::Re1);
    }
}

TEST_CASE("median references resolve over carrying sites") {
    TransformTable table;
    auto spec = sig(TransformKind::InverseSigmoid, 1, 1);
    spec.reference_mode = ReferenceMode::MedianOfDataset;
    table.set(Factor::Re1, spec);
    table.set(Factor::A6, spec);
    std::vector<Site> sites(4);
    const double d[] = {100, 400, 200, 300};
    for (int i = 0; i < 4; ++i) sites[i].raw[index_of(Factor::Re1)] = d[i];
    sites[3].raw[index_of(Factor::Re1)].reset();
    table.resolve(sites);
    CHECK(table.resolved_references[index_of(Factor::Re1)] == 200.0);
    CHECK_FALSE(table.resolved_references[index_of(Factor::A6)].has_value());
    CHECK(transform_site(sites[2], table).score(Factor::Re1) == 0.5);

    sites[0].raw[index_of(Factor::Re1)] = 0.0;
    sites[1].raw[index_of(Factor::Re1)] = 0.0;
    CHECK_THROWS_AS(table.resolve(sites), FactorError);
}

TEST_CASE("curves fitted to the published example reproduce its transformed values") {
    struct Anchor {
        TransformKind kind;
        double f1, f2, x, printed;
    };
    const Anchor anchors[] = {
        {TransformKind::InverseSigmoid, 0.5, 2, 10, 0.309},          // base flood elevation
        {TransformKind::InverseSigmoid, 0.5, 2, 9, 0.3204},
        {TransformKind::Sigmoid, 4, 85, 0.4827153, 1.04013e-09},     // drainage
        {TransformKind::Sigmoid, 4, 85, 120.9102, 0.8037},
        {TransformKind::Sigmoid, 4, 85, 61.76985, 0.2181},
        {TransformKind::InverseSigmoid, 0.7, 1500, 413.0418, 0.711518429},  // sewer
        {TransformKind::InverseSigmoid, 0.7, 1500, 794.9039, 0.6093},
        {TransformKind::InverseSigmoid, 0.7, 1500, 448.6923, 0.6995},
        {TransformKind::Sigmoid, 1.5, 500, 1848.942, 0.876710452},   // overflow
        {TransformKind::Sigmoid, 1.5, 500, 1396.808, 0.8236},
        {TransformKind::Sigmoid, 1.5, 500, 452.2486, 0.4624},
        {TransformKind::Sigmoid, 5, 100, 867.3902, 0.999979633},     // wellhead
        {TransformKind::Sigmoid, 5, 100, 369.1966, 0.9985},
        {TransformKind::Sigmoid, 5, 100, 588.224, 0.9999},
    };
    for (const auto& a : anchors) {
        CAPTURE(a.x);
        CHECK(std::abs(apply_transform(a.x, sig(a.kind, a.f1, a.f2), a.f2) - a.printed) < 1e-3);
    }
}
