#pragma once

#include "qtp/field.hpp"
#include "qtp/mesh.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qtp::io {

/// One measured quantity of a report.
struct ReportRow {
    std::string name;
    double value = 0.0;
    std::string tolerance;     ///< empty when the quantity has no contract
    std::optional<bool> pass;  ///< unset when the quantity has no contract
};

inline const std::vector<std::string> kReportHeader{"name", "value", "tolerance", "pass"};

/// %.17g, with "nan", "inf" and "-inf" for non-finite values.
std::string format_double(double x);

/// %.6g, for numbers embedded in row names.
std::string format_label(double x);

/// RFC 4180 field quoting.
std::string csv_field(const std::string& s);

std::string csv_text(const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows);
std::string report_text(const std::vector<ReportRow>& rows);

/// Legacy ASCII VTK unstructured grid with one POINT_DATA SCALARS block per field.
std::string vtk_text(const Mesh& mesh,
                     const std::vector<std::pair<std::string, const DiscreteField*>>& fields);

/// Writes to a sibling temporary file and renames it over `path`. Throws IoError.
void atomic_write(const std::filesystem::path& path, const std::string& content);

void write_report(const std::filesystem::path& path, const std::vector<ReportRow>& rows);
void write_vtk(const std::filesystem::path& path, const DiscreteField& field, const std::string& name);

}  // namespace qtp::io
