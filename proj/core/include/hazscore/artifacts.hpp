#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hazscore/config.hpp"
#include "hazscore/delimited.hpp"
#include "hazscore/hazard_model.hpp"
#include "hazscore/ingest.hpp"
#include "hazscore/panel.hpp"

namespace hazscore {

/// File formats exchanged between pipeline stages.
namespace artifacts {

void write_originations(const std::filesystem::path& path, std::span<const LoanOrigination> loans);
std::vector<LoanOrigination> read_originations(const std::filesystem::path& path);

/// `loan_id,month,status`, one row per observed month.
void write_histories(const std::filesystem::path& path, std::span<const LoanHistory> histories);
/// Rebuilds histories; every loan must appear in `loans`.
std::vector<LoanHistory> read_histories(const std::filesystem::path& path, std::span<const LoanOrigination> loans);

void write_exclusions(const std::filesystem::path& path, std::span<const Exclusion> exclusions);

void write_counts(const std::filesystem::path& path, const MonthlyCounts& counts);
MonthlyCounts read_counts(const std::filesystem::path& path);

void write_split(const std::filesystem::path& path, const SplitAssignment& split);
SplitAssignment read_split(const std::filesystem::path& path);

/// Sampled panel CSV: loan_id,snapshot_month,calendar_month,loan_age,snapshot_mob,status,weight
class PanelWriter {
public:
    explicit PanelWriter(const std::filesystem::path& path);
    void write(const PanelRow& row);
    void close() { out_.close(); }

private:
    DelimitedWriter out_;
};

void read_panel(const std::filesystem::path& path, const std::function<void(const PanelRow&)>& sink);

/// Design rows: loan_id,calendar_month,status,weight,<regressors...>
struct DesignFile {
    DesignMatrix design;
    std::vector<std::string> loan_ids;
    std::vector<Month> months;
};

class DesignWriter {
public:
    DesignWriter(const std::filesystem::path& path, const std::vector<std::string>& names);
    void write(std::string_view loan_id, Month month, int status, double weight, std::span<const double> features);
    void close() { out_.close(); }

private:
    DelimitedWriter out_;
};

DesignFile read_design(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const Json& doc);
Json read_json(const std::filesystem::path& path);

/// Model file: regressor names, estimates, standard errors and the hash of
/// the feature spec they were fitted against.
Json model_to_json(const CoefficientTable& table, const std::string& feature_spec_hash);
CoefficientTable model_from_json(const Json& doc);

void write_coefficients_csv(const std::filesystem::path& path, const CoefficientTable& table);

}  // namespace artifacts
}  // namespace hazscore
