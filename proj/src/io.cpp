#include "qtp/io.hpp"

#include "qtp/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace qtp::io {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string format_label(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

namespace {

void append_record(std::string& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += csv_field(fields[i]);
    }
    out += "\r\n";
}

}  // namespace

std::string csv_text(const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows) {
    std::string out;
    append_record(out, header);
    for (const auto& row : rows) {
        if (row.size() != header.size()) throw IoError("csv row width does not match header");
        append_record(out, row);
    }
    return out;
}

std::string report_text(const std::vector<ReportRow>& rows) {
    std::vector<std::vector<std::string>> records;
    records.reserve(rows.size());
    for (const auto& r : rows) {
        records.push_back({r.name, format_double(r.value), r.tolerance,
                           r.pass ? (*r.pass ? "pass" : "fail") : ""});
    }
    return csv_text(kReportHeader, records);
}

std::string vtk_text(const Mesh& mesh,
                     const std::vector<std::pair<std::string, const DiscreteField*>>& fields) {
    std::ostringstream os;
    os << "# vtk DataFile Version 3.0\n"
       << "qtp field\n"
       << "ASCII\n"
       << "DATASET UNSTRUCTURED_GRID\n";
    os << "POINTS " << mesh.node_count() << " double\n";
    for (const auto& x : mesh.nodes) {
        os << format_double(x[0]) << ' ' << format_double(x[1]) << " 0\n";
    }
    const int nv = mesh.vertices_per_element();
    os << "CELLS " << mesh.element_count() << ' ' << mesh.element_count() * (nv + 1) << '\n';
    for (const auto& el : mesh.elements) {
        os << nv;
        for (int i = 0; i < nv; ++i) os << ' ' << el[i];
        os << '\n';
    }
    os << "CELL_TYPES " << mesh.element_count() << '\n';
    const int type = mesh.dim == 1 ? 3 : 5;
    for (std::size_t e = 0; e < mesh.element_count(); ++e) os << type << '\n';
    if (!fields.empty()) os << "POINT_DATA " << mesh.node_count() << '\n';
    for (const auto& [name, field] : fields) {
        if (field->size() != mesh.node_count()) throw IoError("field does not match mesh");
        if (name.empty() || name.find_first_of(" \t\n") != std::string::npos) {
            throw IoError("VTK field names may not contain whitespace");
        }
        os << "SCALARS " << name << " double 1\n"
           << "LOOKUP_TABLE default\n";
        for (double v : field->values()) os << format_double(v) << '\n';
    }
    return os.str();
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw IoError("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot rename onto " + path.string());
    }
}

void write_report(const std::filesystem::path& path, const std::vector<ReportRow>& rows) {
    atomic_write(path, report_text(rows));
}

void write_vtk(const std::filesystem::path& path, const DiscreteField& field, const std::string& name) {
    atomic_write(path, vtk_text(field.mesh(), {{name, &field}}));
}

}  // namespace qtp::io
