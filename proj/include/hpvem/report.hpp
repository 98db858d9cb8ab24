#pragma once

#include "hpvem/study.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace hpvem {

struct CsvRow {
    int run = 0;
    int dofs = 0;
    double h = 0.0;
    double abscissa = 0.0;
    int eig_index = 0;
    double ref_value = 0.0;
    double computed_value = 0.0;
    double rel_error = 0.0;
    double walltime_s = 0.0;

    bool operator==(const CsvRow&) const = default;
};

inline constexpr const char* csv_header =
    "run,dofs,h,abscissa,eig_index,ref_value,computed_value,rel_error,walltime_s";

std::vector<CsvRow> to_rows(const std::vector<ConvergenceRecord>& records);

void write_csv(std::ostream& out, const std::vector<CsvRow>& rows);
std::vector<CsvRow> parse_csv(std::istream& in);

void write_summary(std::ostream& out, const StudyConfig& config,
                   const std::vector<ConvergenceRecord>& records,
                   const std::vector<FitResult>& fits);

enum class ReportFormat { csv, summary };

/// Writes the report to `path`; throws IoError when the file cannot be written.
void emit_report(const std::string& path, ReportFormat format, const StudyConfig& config,
                 const std::vector<ConvergenceRecord>& records,
                 const std::vector<FitResult>& fits);

} // namespace hpvem
