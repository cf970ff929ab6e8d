#include "msob/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "msob/errors.hpp"

namespace msob {

Report::Report(std::string title) : title_(std::move(title)) {
    doc_["title"] = title_;
    doc_["checks"] = nlohmann::json::array();
    doc_["values"] = nlohmann::json::object();
}

void Report::check(const std::string& name, bool ok, const std::string& detail) {
    nlohmann::json entry;
    entry["name"] = name;
    entry["pass"] = ok;
    if (!detail.empty()) entry["detail"] = detail;
    doc_["checks"].push_back(std::move(entry));
    ++checks_;
    if (!ok) ++failures_;
}

void Report::set(const std::string& key, double v) { doc_["values"][key] = v; }
void Report::set(const std::string& key, bool v) { doc_["values"][key] = v; }
void Report::set(const std::string& key, std::int64_t v) { doc_["values"][key] = v; }
void Report::set(const std::string& key, const std::string& v) { doc_["values"][key] = v; }
void Report::set(const std::string& key, const std::vector<double>& v) { doc_["values"][key] = v; }

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

void append_escaped(const std::string& s, std::string& out) {
    out += '"';
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    out += '"';
}

void render(const nlohmann::json& j, std::string& out) {
    switch (j.type()) {
        case nlohmann::json::value_t::object: {
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ',';
                first = false;
                append_escaped(it.key(), out);
                out += ':';
                render(it.value(), out);
            }
            out += '}';
            break;
        }
        case nlohmann::json::value_t::array: {
            out += '[';
            bool first = true;
            for (const auto& v : j) {
                if (!first) out += ',';
                first = false;
                render(v, out);
            }
            out += ']';
            break;
        }
        case nlohmann::json::value_t::number_float:
            out += format_double(j.get<double>());
            break;
        case nlohmann::json::value_t::string:
            append_escaped(j.get<std::string>(), out);
            break;
        default:
            out += j.dump();
    }
}

}  // namespace

std::string to_json_string(const nlohmann::json& j) {
    std::string out;
    render(j, out);
    out += '\n';
    return out;
}

void write_text_file(const std::string& text, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open for writing: " + path.string());
    os << text;
    if (!os) throw Error("write failed: " + path.string());
}

void write_json_file(const nlohmann::json& j, const std::filesystem::path& path) {
    write_text_file(to_json_string(j), path);
}

void write_report_csv(const Report& report, const std::filesystem::path& path) {
    std::string out = "name,pass,detail\n";
    for (const auto& entry : report.data()["checks"]) {
        out += entry["name"].get<std::string>();
        out += entry["pass"].get<bool>() ? ",1," : ",0,";
        if (entry.contains("detail")) {
            std::string d = entry["detail"].get<std::string>();
            for (char& c : d)
                if (c == ',' || c == '\n') c = ';';
            out += d;
        }
        out += '\n';
    }
    write_text_file(out, path);
}

}  // namespace msob
