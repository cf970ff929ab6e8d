#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace msob {

/// Structured record of a diagnostic run: named checks with pass/fail state
/// plus free-form scalar/array values. Serialization is deterministic
/// (sorted keys, 17 significant digits), so identical runs produce
/// byte-identical files.
class Report {
public:
    Report() : Report("report") {}
    explicit Report(std::string title);

    void check(const std::string& name, bool ok, const std::string& detail = "");
    void set(const std::string& key, double v);
    void set(const std::string& key, bool v);
    void set(const std::string& key, std::int64_t v);
    void set(const std::string& key, std::size_t v) { set(key, static_cast<std::int64_t>(v)); }
    void set(const std::string& key, int v) { set(key, static_cast<std::int64_t>(v)); }
    void set(const std::string& key, const std::string& v);
    void set(const std::string& key, const std::vector<double>& v);

    bool all_passed() const { return failures_ == 0; }
    std::size_t failure_count() const { return failures_; }
    std::size_t check_count() const { return checks_; }
    const std::string& title() const { return title_; }

    const nlohmann::json& data() const { return doc_; }
    nlohmann::json& data() { return doc_; }

private:
    std::string title_;
    nlohmann::json doc_;
    std::size_t checks_ = 0;
    std::size_t failures_ = 0;
};

/// Renders JSON with object keys in sorted order and every floating point
/// number printed with 17 significant digits.
std::string to_json_string(const nlohmann::json& j);

void write_json_file(const nlohmann::json& j, const std::filesystem::path& path);

/// One row per check; columns name,pass,detail.
void write_report_csv(const Report& report, const std::filesystem::path& path);

void write_text_file(const std::string& text, const std::filesystem::path& path);

/// %.17g, the shortest form that round-trips IEEE doubles.
std::string format_double(double v);

}  // namespace msob
