#pragma once

#include <cmath>
#include <filesystem>
#include <limits>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "../error.hpp"
#include "../field/io.hpp"
#include "audit.hpp"

namespace jumpfb {

/// Result of one experiment. `timing` is kept out of the report files so
/// that identical configs give identical bytes; it goes to timing.json.
struct RunReport {
    std::string name;
    std::string status = "complete";
    std::map<std::string, std::string> config;
    std::vector<AuditReport> audits;
    std::vector<std::string> refinement_columns;
    std::vector<std::vector<double>> refinement_rows;
    std::map<std::string, double> timing;

    bool any_fail() const {
        for (const auto& a : audits)
            if (a.verdict == Verdict::fail) return true;
        return false;
    }
};

enum class ReportFormat { json, csv, text };

inline ReportFormat parse_report_format(const std::string& s) {
    if (s == "json") return ReportFormat::json;
    if (s == "csv") return ReportFormat::csv;
    if (s == "text") return ReportFormat::text;
    throw ConfigError("unknown report format '" + s + "'");
}

namespace detail {

// 12 significant digits; infinities become "inf" / "-inf", NaN becomes null
inline nlohmann::json json_real(double v) {
    if (std::isnan(v)) return nullptr;
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return std::stod(format_real(v, 12));
}

inline double real_from_json(const nlohmann::json& j) {
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw ConfigError("malformed report: bad number '" + s + "'");
    }
    return j.get<double>();
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

} // namespace detail

inline nlohmann::json to_json(const AuditReport& a) {
    nlohmann::json values = nlohmann::json::array();
    for (const auto& v : a.values) values.push_back({{"label", v.label}, {"value", detail::json_real(v.value)}});
    return {{"name", a.name},
            {"values", values},
            {"tolerance", detail::json_real(a.tolerance)},
            {"verdict", to_string(a.verdict)},
            {"notes", a.notes}};
}

inline nlohmann::json to_json(const RunReport& r) {
    nlohmann::json audits = nlohmann::json::array();
    for (const auto& a : r.audits) audits.push_back(to_json(a));
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.refinement_rows) {
        nlohmann::json j = nlohmann::json::array();
        for (double v : row) j.push_back(detail::json_real(v));
        rows.push_back(j);
    }
    return {{"name", r.name},
            {"status", r.status},
            {"config", r.config},
            {"audits", audits},
            {"refinement", {{"columns", r.refinement_columns}, {"rows", rows}}}};
}

inline Verdict parse_verdict(const std::string& s) {
    if (s == "PASS") return Verdict::pass;
    if (s == "FAIL") return Verdict::fail;
    if (s == "NA") return Verdict::na;
    throw ConfigError("unknown verdict '" + s + "'");
}

inline RunReport report_from_json(const nlohmann::json& j) {
    RunReport r;
    try {
        r.name = j.at("name").get<std::string>();
        r.status = j.at("status").get<std::string>();
        r.config = j.at("config").get<std::map<std::string, std::string>>();
        for (const auto& a : j.at("audits")) {
            AuditReport x;
            x.name = a.at("name").get<std::string>();
            for (const auto& v : a.at("values"))
                x.values.push_back({v.at("label").get<std::string>(), detail::real_from_json(v.at("value"))});
            x.tolerance = detail::real_from_json(a.at("tolerance"));
            x.verdict = parse_verdict(a.at("verdict").get<std::string>());
            x.notes = a.at("notes").get<std::vector<std::string>>();
            r.audits.push_back(std::move(x));
        }
        const auto& ref = j.at("refinement");
        r.refinement_columns = ref.at("columns").get<std::vector<std::string>>();
        for (const auto& row : ref.at("rows")) {
            std::vector<double> v;
            for (const auto& x : row) v.push_back(detail::real_from_json(x));
            r.refinement_rows.push_back(std::move(v));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed report: ") + e.what());
    }
    return r;
}

inline std::string render_json(const RunReport& r) { return to_json(r).dump(2) + "\n"; }

// kind,name,verdict,tolerance,label,value
inline std::string render_csv(const RunReport& r) {
    std::ostringstream os;
    os << "kind,name,verdict,tolerance,label,value\n";
    for (const auto& a : r.audits) {
        const std::string head = "audit," + detail::csv_field(a.name) + "," + to_string(a.verdict) + "," +
                                 format_real(a.tolerance) + ",";
        if (a.values.empty()) os << head << ",\n";
        for (const auto& v : a.values) os << head << detail::csv_field(v.label) << ',' << format_real(v.value) << '\n';
    }
    for (std::size_t i = 0; i < r.refinement_rows.size(); ++i)
        for (std::size_t c = 0; c < r.refinement_columns.size(); ++c)
            os << "refinement,row" << i << ",,," << r.refinement_columns[c] << ','
               << format_real(r.refinement_rows[i][c]) << '\n';
    return os.str();
}

inline std::string render_text(const RunReport& r) {
    std::ostringstream os;
    os << "experiment " << r.name << " (" << r.status << ")\n";
    for (const auto& a : r.audits) {
        os << '[' << to_string(a.verdict) << "] " << a.name << "  tolerance " << format_real(a.tolerance) << '\n';
        for (const auto& v : a.values) os << "    " << v.label << " = " << format_real(v.value) << '\n';
        for (const auto& n : a.notes) os << "    note: " << n << '\n';
    }
    if (!r.refinement_rows.empty()) {
        os << "refinement\n ";
        for (const auto& c : r.refinement_columns) os << ' ' << c;
        os << '\n';
        for (const auto& row : r.refinement_rows) {
            os << ' ';
            for (double v : row) os << ' ' << format_real(v);
            os << '\n';
        }
    }
    return os.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open '" + path.string() + "' for writing");
    os << content;
    if (!os) throw Error("write failed for '" + path.string() + "'");
}

/// Writes report.{json,csv,txt} into dir and returns the paths written.
inline std::vector<std::filesystem::path> emit_report(const RunReport& r, const std::filesystem::path& dir,
                                                      const std::set<ReportFormat>& formats = {
                                                          ReportFormat::json, ReportFormat::csv, ReportFormat::text}) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory '" + dir.string() + "': " + ec.message());
    std::vector<std::filesystem::path> out;
    for (auto f : formats) {
        const auto path = dir / (f == ReportFormat::json ? "report.json" : f == ReportFormat::csv ? "report.csv"
                                                                                                   : "report.txt");
        write_text_file(path, f == ReportFormat::json ? render_json(r) : f == ReportFormat::csv ? render_csv(r)
                                                                                               : render_text(r));
        out.push_back(path);
    }
    return out;
}

} // namespace jumpfb
