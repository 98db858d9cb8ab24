#include "hpvem/report.hpp"

#include "hpvem/errors.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace hpvem {

std::vector<CsvRow> to_rows(const std::vector<ConvergenceRecord>& records)
{
    std::vector<CsvRow> rows;
    for (const ConvergenceRecord& r : records) {
        for (std::size_t i = 0; i < r.computed.size(); ++i) {
            CsvRow row;
            row.run = r.run;
            row.dofs = r.dofs;
            row.h = r.h;
            row.abscissa = r.abscissa;
            row.eig_index = static_cast<int>(i) + 1;
            row.ref_value = r.reference[i];
            row.computed_value = r.computed[i];
            row.rel_error = r.rel_error[i];
            row.walltime_s = r.walltime;
            rows.push_back(row);
        }
    }
    return rows;
}

void write_csv(std::ostream& out, const std::vector<CsvRow>& rows)
{
    out << csv_header << '\n';
    char buf[512];
    for (const CsvRow& r : rows) {
        std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%d,%.17g,%.17g,%.17g,%.17g\n", r.run,
                      r.dofs, r.h, r.abscissa, r.eig_index, r.ref_value, r.computed_value,
                      r.rel_error, r.walltime_s);
        out << buf;
    }
}

std::vector<CsvRow> parse_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line != csv_header) {
        throw IoError("CSV header mismatch");
    }
    std::vector<CsvRow> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            f.push_back(cell);
        }
        if (f.size() != 9) {
            throw IoError("CSV line " + std::to_string(lineno) + ": expected 9 fields");
        }
        CsvRow r;
        try {
            r.run = std::stoi(f[0]);
            r.dofs = std::stoi(f[1]);
            r.h = std::strtod(f[2].c_str(), nullptr);
            r.abscissa = std::strtod(f[3].c_str(), nullptr);
            r.eig_index = std::stoi(f[4]);
            r.ref_value = std::strtod(f[5].c_str(), nullptr);
            r.computed_value = std::strtod(f[6].c_str(), nullptr);
            r.rel_error = std::strtod(f[7].c_str(), nullptr);
            r.walltime_s = std::strtod(f[8].c_str(), nullptr);
        } catch (const std::exception&) {
            throw IoError("CSV line " + std::to_string(lineno) + ": malformed number");
        }
        rows.push_back(r);
    }
    return rows;
}

void write_summary(std::ostream& out, const StudyConfig& config,
                   const std::vector<ConvergenceRecord>& records,
                   const std::vector<FitResult>& fits)
{
    char buf[512];
    out << "case " << config.case_name;
    if (config.case_name == "tc4" || config.case_name == "tc4_checkerboard") {
        out << " eps=" << config.eps;
    }
    out << "  regime " << to_string(config.regime) << "  stab " << to_string(config.stab.s1)
        << "  abscissa " << to_string(config.effective_abscissa()) << '\n';
    out << "run      dofs   max_p  abscissa      errors (lambda_1 ..)\n";
    for (const ConvergenceRecord& r : records) {
        std::snprintf(buf, sizeof buf, "%3d %9d %7d  %-12.6g", r.run, r.dofs, r.max_degree,
                      r.abscissa);
        out << buf;
        for (double e : r.rel_error) {
            std::snprintf(buf, sizeof buf, "  %.3e", e);
            out << buf;
        }
        out << '\n';
    }
    for (const FitResult& f : fits) {
        if (f.model == FitModel::algebraic) {
            std::snprintf(buf, sizeof buf,
                          "fit lambda_%d: algebraic rate %.4f  (r2 %.4f, %d points)\n",
                          f.eig_index + 1, f.rate, f.r2, f.points);
        } else {
            std::snprintf(buf, sizeof buf,
                          "fit lambda_%d: exponential b %.4f  (r2 %.4f, %d points)\n",
                          f.eig_index + 1, f.rate, f.r2, f.points);
        }
        out << buf;
    }
}

void emit_report(const std::string& path, ReportFormat format, const StudyConfig& config,
                 const std::vector<ConvergenceRecord>& records,
                 const std::vector<FitResult>& fits)
{
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path);
    }
    if (format == ReportFormat::csv) {
        write_csv(out, to_rows(records));
    } else {
        write_summary(out, config, records, fits);
    }
    out.flush();
    if (!out) {
        throw IoError("write failed: " + path);
    }
}

} // namespace hpvem
