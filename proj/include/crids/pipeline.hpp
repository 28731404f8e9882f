#pragma once

// Batch runs: assessment (extract -> fuzzify -> aggregate), planning, and the
// threshold summary of an assessment report.

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crids/config.hpp"

namespace crids {

inline constexpr const char* kToolVersion = "1.0.0";

enum ExitStatus : int {
    kExitOk = 0,
    kExitIoError = 1,
    kExitInfeasible = 2,
    kExitNoSites = 3,
};

struct SiteAssessment {
    Site site;                                  // raw values after extraction
    std::optional<MembershipVector> membership;
    std::string error;

    bool ok() const { return membership.has_value(); }
};

struct AssessmentResult {
    std::vector<SiteAssessment> sites;  // ordered by site id
    TransformTable transforms;          // with resolved references
    std::vector<std::string> warnings;
    std::map<std::string, std::size_t> row_counts;
    std::string report;                 // CSV body
    std::string manifest;               // JSON

    std::size_t succeeded() const;
    int exit_status() const { return succeeded() == 0 ? kExitNoSites : kExitOk; }
};

/// Fixed report column order.
std::vector<std::string> report_columns();

/// Runs the assessment on in-memory inputs. Factors bound to layers that every site
/// already carries as raw columns are not extracted.
AssessmentResult assess(const Config& config, const std::vector<Site>& sites,
                        const std::map<std::string, FeatureLayer>& layers,
                        const std::map<std::string, ElevationSample>& samples);

/// Loads sites, elevations and layers named by the config, then assesses.
AssessmentResult run_assess(const Config& config);

void write_assessment(const AssessmentResult& result, const std::filesystem::path& out_dir);

struct PlanResult {
    PlanningInstance instance;
    Plan plan;
    std::vector<FrontierPoint> frontier;
    std::vector<std::string> errored_sites;
    std::optional<QuantizedCosts> quantized;
    std::string plan_report;
    std::string frontier_report;
    std::string frontier_plans;
    std::string manifest;
    std::string message;
    int exit_status = kExitOk;
};

/// Plans over the successfully assessed sites. `cost_table` holds per-site cost
/// columns (see load_cost_table).
PlanResult plan_assessment(const Config& config, const AssessmentResult& assessment,
                           const std::map<std::string, std::map<std::string, double>>& cost_table = {});

/// Assesses in-line, then plans.
PlanResult run_plan(const Config& config);

void write_plan(const PlanResult& result, const std::filesystem::path& out_dir);

inline constexpr std::array<double, 2> kDefaultSummaryThresholds{0.1, 0.5};

struct ThresholdShare {
    double threshold = 0.0;
    std::size_t count = 0;
    double share = 0.0;  // fraction of sites
};

struct Summary {
    std::size_t total = 0;
    std::vector<ThresholdShare> below;
    std::array<std::size_t, 10> histogram{};  // [0,0.1), ..., [0.9,1.0]

    std::string text() const;
};

Summary summarize(std::span<const double> indices, std::span<const double> thresholds = kDefaultSummaryThresholds);
Summary summarize_report(const CsvTable& report, std::span<const double> thresholds = kDefaultSummaryThresholds);

/// FNV-1a 64-bit digest as 16 hex digits.
std::string fnv1a_hex(std::string_view data);

}  // namespace crids
