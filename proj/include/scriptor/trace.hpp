#pragma once

#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "scriptor/detail/csv.hpp"
#include "scriptor/error.hpp"

namespace scriptor {

using Millis = std::int64_t;

inline constexpr std::int32_t kDefaultPressureMax = 1023;
inline constexpr Millis kDefaultPeriodMs = 8;

enum class PenStatus : std::uint8_t { InAir = 0, OnPaper = 1 };

/// One tablet acquisition record.
struct PenSample {
    Millis t = 0;  // unix epoch, ms
    std::int32_t x = 0;
    std::int32_t y = 0;
    PenStatus status = PenStatus::InAir;
    std::int32_t azimuth = 0;   // carried through, unused by features
    std::int32_t altitude = 0;  // carried through, unused by features
    std::int32_t pressure = 0;

    bool on_paper() const noexcept { return status == PenStatus::OnPaper; }
    friend bool operator==(const PenSample&, const PenSample&) = default;
};

enum class TaskId : std::uint8_t { Pentagons = 1, House = 2, CursiveSentence = 3, Clock = 4 };

inline constexpr TaskId kAllTasks[] = {TaskId::Pentagons, TaskId::House, TaskId::CursiveSentence, TaskId::Clock};

inline int task_number(TaskId task) noexcept { return static_cast<int>(task); }

inline TaskId task_from_number(long n) {
    if (n < 1 || n > 4) throw DomainError("task_id must be 1..4, got " + std::to_string(n));
    return static_cast<TaskId>(n);
}

inline std::string_view task_name(TaskId task) noexcept {
    switch (task) {
        case TaskId::Pentagons: return "pentagons";
        case TaskId::House: return "house";
        case TaskId::CursiveSentence: return "cursive sentence";
        case TaskId::Clock: return "clock";
    }
    return "?";
}

enum class Group : std::uint8_t { CL, SEV, NOR };

inline constexpr Group kAllGroups[] = {Group::CL, Group::SEV, Group::NOR};

inline std::string_view to_string(Group g) noexcept {
    switch (g) {
        case Group::CL: return "CL";
        case Group::SEV: return "SEV";
        case Group::NOR: return "NOR";
    }
    return "?";
}

inline Group parse_group(std::string_view text) {
    if (text == "CL") return Group::CL;
    if (text == "SEV") return Group::SEV;
    if (text == "NOR") return Group::NOR;
    throw DomainError("group must be CL, SEV or NOR, got '" + std::string(text) + "'");
}

struct RecordingMeta {
    std::string participant_id;
    TaskId task = TaskId::Pentagons;
    Group group = Group::NOR;

    friend bool operator==(const RecordingMeta&, const RecordingMeta&) = default;
};

struct TaskRecording {
    RecordingMeta meta;
    std::vector<PenSample> samples;
    Millis nominal_period = kDefaultPeriodMs;

    friend bool operator==(const TaskRecording&, const TaskRecording&) = default;
};

struct ParseOptions {
    std::int32_t pressure_max = kDefaultPressureMax;
    Millis nominal_period = kDefaultPeriodMs;
};

inline constexpr std::string_view kRecordingHeader = "t_ms,x,y,status,azimuth,altitude,pressure";

/// Parses a recording CSV. Row order is preserved; timestamp ordering is
/// checked by validate_recording / segment, not here.
inline TaskRecording parse_recording(std::istream& in, RecordingMeta meta, const ParseOptions& opts = {}) {
    if (opts.pressure_max <= 0) throw DomainError("pressure_max must be positive");
    if (opts.nominal_period <= 0) throw DomainError("nominal period must be positive");

    TaskRecording rec;
    rec.meta = std::move(meta);
    rec.nominal_period = opts.nominal_period;

    std::string line;
    if (!detail::read_line(in, line)) throw ParseError("no samples");
    if (line != kRecordingHeader)
        throw ParseError("expected header '" + std::string(kRecordingHeader) + "', got '" + line + "'", 1);

    std::size_t lineno = 1;
    while (detail::read_line(in, line)) {
        ++lineno;
        auto fields = detail::split_fields(line);
        if (fields.size() != 7)
            throw ParseError("expected 7 fields, got " + std::to_string(fields.size()), lineno);

        auto field = [&](std::size_t i, const char* name) -> std::int64_t {
            auto v = detail::parse_int<std::int64_t>(fields[i]);
            if (!v) throw ParseError(std::string("field '") + name + "' is not an integer: '" + std::string(fields[i]) + "'", lineno);
            return *v;
        };
        auto narrow = [&](std::int64_t v, const char* name) -> std::int32_t {
            if (v < INT32_MIN || v > INT32_MAX) throw ParseError(std::string("field '") + name + "' out of range", lineno);
            return static_cast<std::int32_t>(v);
        };

        PenSample s;
        s.t = field(0, "t_ms");
        s.x = narrow(field(1, "x"), "x");
        s.y = narrow(field(2, "y"), "y");
        auto status = field(3, "status");
        s.azimuth = narrow(field(4, "azimuth"), "azimuth");
        s.altitude = narrow(field(5, "altitude"), "altitude");
        auto pressure = field(6, "pressure");

        if (s.t < 0) throw DomainError("line " + std::to_string(lineno) + ": negative timestamp");
        if (status != 0 && status != 1)
            throw DomainError("line " + std::to_string(lineno) + ": status must be 0 or 1, got " + std::to_string(status));
        if (pressure < 0 || pressure > opts.pressure_max)
            throw DomainError("line " + std::to_string(lineno) + ": pressure " + std::to_string(pressure) +
                              " outside [0, " + std::to_string(opts.pressure_max) + "]");
        s.status = static_cast<PenStatus>(status);
        s.pressure = static_cast<std::int32_t>(pressure);
        rec.samples.push_back(s);
    }
    if (rec.samples.empty()) throw ParseError("no samples");
    return rec;
}

inline TaskRecording parse_recording(std::string_view text, RecordingMeta meta, const ParseOptions& opts = {}) {
    std::istringstream in{std::string(text)};
    return parse_recording(in, std::move(meta), opts);
}

inline TaskRecording load_recording(const std::filesystem::path& path, RecordingMeta meta, const ParseOptions& opts = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open recording '" + path.string() + "'");
    try {
        return parse_recording(in, std::move(meta), opts);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    } catch (const DomainError& e) {
        throw DomainError(path.string() + ": " + e.what());
    }
}

inline void emit_recording(std::ostream& out, const TaskRecording& rec) {
    out << kRecordingHeader << '\n';
    for (const auto& s : rec.samples) {
        out << s.t << ',' << s.x << ',' << s.y << ',' << static_cast<int>(s.status) << ',' << s.azimuth << ','
            << s.altitude << ',' << s.pressure << '\n';
    }
}

inline std::string emit_recording(const TaskRecording& rec) {
    std::ostringstream out;
    emit_recording(out, rec);
    return out.str();
}

// ---------------------------------------------------------------------------
// Validation

enum class ViolationKind { NonMonotoneTimestamp, PressureOutOfRange, InvalidStatus };

struct Violation {
    ViolationKind kind;
    std::size_t index;  // sample index
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    std::size_t gap_count = 0;
    std::size_t deviating_gaps = 0;  // |dt - period| > 25% of period
    double gap_deviation_fraction = 0.0;

    bool ok() const noexcept { return violations.empty(); }
    bool empty() const noexcept { return violations.empty() && deviating_gaps == 0; }
};

inline ValidationReport validate_recording(const TaskRecording& rec, std::int32_t pressure_max = kDefaultPressureMax) {
    ValidationReport report;
    const auto& s = rec.samples;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i].pressure < 0 || s[i].pressure > pressure_max)
            report.violations.push_back({ViolationKind::PressureOutOfRange, i,
                                         "pressure " + std::to_string(s[i].pressure) + " outside [0, " +
                                             std::to_string(pressure_max) + "]"});
        if (s[i].status != PenStatus::InAir && s[i].status != PenStatus::OnPaper)
            report.violations.push_back({ViolationKind::InvalidStatus, i, "status must be 0 or 1"});
        if (i == 0) continue;
        const Millis dt = s[i].t - s[i - 1].t;
        if (dt <= 0)
            report.violations.push_back({ViolationKind::NonMonotoneTimestamp, i,
                                         "non-monotone timestamp " + std::to_string(s[i].t) + " after " +
                                             std::to_string(s[i - 1].t)});
        ++report.gap_count;
        // |dt - p| > p/4, in integers
        if (4 * std::llabs(dt - rec.nominal_period) > rec.nominal_period) ++report.deviating_gaps;
    }
    if (report.gap_count > 0)
        report.gap_deviation_fraction = static_cast<double>(report.deviating_gaps) / static_cast<double>(report.gap_count);
    return report;
}

// ---------------------------------------------------------------------------
// Manifest

struct ManifestEntry {
    std::filesystem::path file;
    RecordingMeta meta;

    friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

inline constexpr std::string_view kManifestHeader = "file,participant_id,group,task_id";

inline std::vector<ManifestEntry> parse_manifest(std::istream& in) {
    detail::expect_header(in, kManifestHeader, "manifest");
    std::vector<ManifestEntry> entries;
    std::string line;
    std::size_t lineno = 1;
    while (detail::read_line(in, line)) {
        ++lineno;
        auto f = detail::split_fields(line);
        if (f.size() != 4) throw ParseError("manifest: expected 4 fields, got " + std::to_string(f.size()), lineno);
        if (f[0].empty()) throw ParseError("manifest: empty file name", lineno);
        if (f[1].empty()) throw ParseError("manifest: empty participant_id", lineno);
        auto task = detail::parse_int<long>(f[3]);
        if (!task) throw ParseError("manifest: task_id is not an integer", lineno);
        try {
            entries.push_back({std::filesystem::path(std::string(f[0])),
                               {std::string(f[1]), task_from_number(*task), parse_group(f[2])}});
        } catch (const DomainError& e) {
            throw ParseError(std::string("manifest: ") + e.what(), lineno);
        }
    }
    return entries;
}

/// Loads a manifest; relative recording paths resolve against its directory.
inline std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open manifest '" + path.string() + "'");
    auto entries = parse_manifest(in);
    for (auto& e : entries)
        if (e.file.is_relative()) e.file = path.parent_path() / e.file;
    return entries;
}

inline void emit_manifest(std::ostream& out, const std::vector<ManifestEntry>& entries) {
    out << kManifestHeader << '\n';
    for (const auto& e : entries)
        out << e.file.generic_string() << ',' << e.meta.participant_id << ',' << to_string(e.meta.group) << ','
            << task_number(e.meta.task) << '\n';
}

}  // namespace scriptor
