#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <numbers>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "scriptor/detail/csv.hpp"
#include "scriptor/error.hpp"
#include "scriptor/segmentation.hpp"
#include "scriptor/trace.hpp"

namespace scriptor {

enum class Feature : std::uint8_t {
    Pmin, Pmax, Pavg, Psd, P10, P90,
    Nup, Ndown, Nidle,
    Tup, Tdown, Tidle, Ttotal,
    Sbb, Savg, Stotal,
    Iavg,
};

inline constexpr std::size_t kFeatureCount = 17;

inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "Pmin", "Pmax", "Pavg", "Psd", "P10", "P90", "Nup", "Ndown", "Nidle",
    "Tup", "Tdown", "Tidle", "Ttotal", "Sbb", "Savg", "Stotal", "Iavg",
};

inline std::string_view to_string(Feature f) noexcept { return kFeatureNames[static_cast<std::size_t>(f)]; }

inline std::optional<Feature> parse_feature(std::string_view name) noexcept {
    for (std::size_t i = 0; i < kFeatureCount; ++i)
        if (kFeatureNames[i] == name) return static_cast<Feature>(i);
    return std::nullopt;
}

enum class Category : std::uint8_t { Pressure, Ductus, Time, Space, Inclination };

inline constexpr Category kAllCategories[] = {Category::Pressure, Category::Ductus, Category::Time, Category::Space,
                                              Category::Inclination};

inline std::string_view to_string(Category c) noexcept {
    switch (c) {
        case Category::Pressure: return "Pressure";
        case Category::Ductus: return "Ductus";
        case Category::Time: return "Time";
        case Category::Space: return "Space";
        case Category::Inclination: return "Inclination";
    }
    return "?";
}

inline std::optional<Category> parse_category(std::string_view name) noexcept {
    for (auto c : kAllCategories)
        if (to_string(c) == name) return c;
    return std::nullopt;
}

/// Features belonging to a category, in table order.
inline std::span<const Feature> category_features(Category c) noexcept {
    static constexpr Feature all[] = {
        Feature::Pmin, Feature::Pmax, Feature::Pavg, Feature::Psd, Feature::P10, Feature::P90,
        Feature::Nup, Feature::Ndown, Feature::Nidle,
        Feature::Tup, Feature::Tdown, Feature::Tidle, Feature::Ttotal,
        Feature::Sbb, Feature::Savg, Feature::Stotal,
        Feature::Iavg,
    };
    std::span<const Feature> s(all);
    switch (c) {
        case Category::Pressure: return s.subspan(0, 6);
        case Category::Ductus: return s.subspan(6, 3);
        case Category::Time: return s.subspan(9, 4);
        case Category::Space: return s.subspan(13, 3);
        case Category::Inclination: return s.subspan(16, 1);
    }
    return {};
}

struct PressureFeatures {
    double min = 0, max = 0, avg = 0, sd = 0, p10 = 0, p90 = 0;
};

struct SpaceFeatures {
    double bbox_area = 0;    // Sbb
    double avg_gap = 0;      // Savg
    double total_gap = 0;    // Stotal
};

/// Nearest-rank percentile of a sorted sample: element at 1-based rank
/// ceil(percent * n / 100).
template <class T>
T nearest_rank(std::span<const T> sorted, int percent) {
    if (sorted.empty()) throw DomainError("percentile of empty sample");
    if (percent <= 0 || percent > 100) throw DomainError("percentile must be in (0, 100]");
    const auto n = static_cast<long long>(sorted.size());
    const long long rank = std::max(1LL, (percent * n + 99) / 100);
    return sorted[static_cast<std::size_t>(rank - 1)];
}

/// Pressure statistics over on-paper samples only.
inline PressureFeatures pressure_features(const Segmentation& seg) {
    std::vector<std::int32_t> p;
    for (const auto& t : seg.traits)
        if (t.kind == TraitKind::OnPaper)
            for (const auto& s : t.samples) p.push_back(s.pressure);
    if (p.empty()) throw FeatureUndefined("pressure: no on-paper samples");

    std::sort(p.begin(), p.end());
    const auto n = static_cast<double>(p.size());
    const double sum = std::accumulate(p.begin(), p.end(), 0.0);
    const double mean = sum / n;
    double ss = 0;
    for (auto v : p) ss += (v - mean) * (v - mean);

    PressureFeatures out;
    out.min = p.front();
    out.max = p.back();
    out.avg = mean;
    out.sd = p.size() > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
    std::span<const std::int32_t> sorted(p);
    out.p10 = nearest_rank(sorted, 10);
    out.p90 = nearest_rank(sorted, 90);
    return out;
}

struct BoundingBox {
    std::int32_t min_x = 0, min_y = 0, max_x = 0, max_y = 0;

    double width() const noexcept { return static_cast<double>(max_x) - min_x; }
    double height() const noexcept { return static_cast<double>(max_y) - min_y; }
    double area() const noexcept { return width() * height(); }
};

inline BoundingBox bounding_box(std::span<const PenSample> samples) {
    if (samples.empty()) throw DomainError("bounding box of empty trait");
    BoundingBox b{samples[0].x, samples[0].y, samples[0].x, samples[0].y};
    for (const auto& s : samples) {
        b.min_x = std::min(b.min_x, s.x);
        b.max_x = std::max(b.max_x, s.x);
        b.min_y = std::min(b.min_y, s.y);
        b.max_y = std::max(b.max_y, s.y);
    }
    return b;
}

inline SpaceFeatures space_features(const Segmentation& seg) {
    SpaceFeatures out;
    const PenSample* prev_end = nullptr;
    std::size_t strokes = 0;
    for (const auto& t : seg.traits) {
        if (t.kind != TraitKind::OnPaper) continue;
        ++strokes;
        out.bbox_area += bounding_box(t.samples).area();
        if (prev_end) {
            const double dx = static_cast<double>(t.samples.front().x) - prev_end->x;
            const double dy = static_cast<double>(t.samples.front().y) - prev_end->y;
            out.total_gap += std::hypot(dx, dy);
        }
        prev_end = &t.samples.back();
    }
    if (strokes == 0) throw FeatureUndefined("space: no on-paper traits");
    out.avg_gap = strokes > 1 ? out.total_gap / static_cast<double>(strokes - 1) : 0.0;
    return out;
}

/// Mean bounding-box diagonal angle of on-paper strokes, degrees in [0, 90].
/// Single-point strokes are skipped.
inline double inclination_feature(const Segmentation& seg) {
    double sum = 0;
    std::size_t n = 0;
    for (const auto& t : seg.traits) {
        if (t.kind != TraitKind::OnPaper) continue;
        const auto b = bounding_box(t.samples);
        if (b.width() == 0 && b.height() == 0) continue;
        sum += std::atan2(b.height(), b.width()) * (180.0 / std::numbers::pi);
        ++n;
    }
    if (n == 0) throw FeatureUndefined("inclination: no on-paper stroke with a non-degenerate bounding box");
    return sum / static_cast<double>(n);
}

inline TraitCounts ductus_features(const Segmentation& seg) noexcept { return trait_counts(seg); }
inline TraitTimes time_features(const Segmentation& seg) noexcept { return trait_times(seg); }

/// The 17 features of one recording. Undefined entries are empty.
struct FeatureVector {
    std::array<std::optional<double>, kFeatureCount> values{};
    std::vector<std::string> notes;  // why categories are undefined

    std::optional<double>& operator[](Feature f) noexcept { return values[static_cast<std::size_t>(f)]; }
    const std::optional<double>& operator[](Feature f) const noexcept { return values[static_cast<std::size_t>(f)]; }

    bool defined(Category c) const noexcept {
        for (auto f : category_features(c))
            if (!(*this)[f]) return false;
        return true;
    }

    friend bool operator==(const FeatureVector& a, const FeatureVector& b) noexcept { return a.values == b.values; }
};

/// Segments the recording and runs every category extractor. A category that
/// cannot be computed is left empty and noted; the others are unaffected.
inline FeatureVector extract_all(const TaskRecording& rec, Millis idle_threshold = kDefaultIdleThresholdMs) {
    const auto seg = segment(rec, idle_threshold);
    FeatureVector fv;

    const auto counts = ductus_features(seg);
    fv[Feature::Nup] = static_cast<double>(counts.up);
    fv[Feature::Ndown] = static_cast<double>(counts.down);
    fv[Feature::Nidle] = static_cast<double>(counts.idle);

    const auto times = time_features(seg);
    fv[Feature::Tup] = static_cast<double>(times.up);
    fv[Feature::Tdown] = static_cast<double>(times.down);
    fv[Feature::Tidle] = static_cast<double>(times.idle);
    fv[Feature::Ttotal] = static_cast<double>(times.total);

    try {
        const auto p = pressure_features(seg);
        fv[Feature::Pmin] = p.min;
        fv[Feature::Pmax] = p.max;
        fv[Feature::Pavg] = p.avg;
        fv[Feature::Psd] = p.sd;
        fv[Feature::P10] = p.p10;
        fv[Feature::P90] = p.p90;
    } catch (const FeatureUndefined& e) {
        fv.notes.emplace_back(e.what());
    }
    try {
        const auto s = space_features(seg);
        fv[Feature::Sbb] = s.bbox_area;
        fv[Feature::Savg] = s.avg_gap;
        fv[Feature::Stotal] = s.total_gap;
    } catch (const FeatureUndefined& e) {
        fv.notes.emplace_back(e.what());
    }
    try {
        fv[Feature::Iavg] = inclination_feature(seg);
    } catch (const FeatureUndefined& e) {
        fv.notes.emplace_back(e.what());
    }
    return fv;
}

// ---------------------------------------------------------------------------
// Feature table

struct FeatureRow {
    RecordingMeta meta;
    FeatureVector features;

    friend bool operator==(const FeatureRow&, const FeatureRow&) = default;
};

inline std::string feature_table_header() {
    std::string h = "participant_id,group,task_id";
    for (auto name : kFeatureNames) {
        h += ',';
        h += name;
    }
    return h;
}

inline void emit_feature_table(std::ostream& out, std::span<const FeatureRow> rows) {
    out << feature_table_header() << '\n';
    for (const auto& r : rows) {
        out << r.meta.participant_id << ',' << to_string(r.meta.group) << ',' << task_number(r.meta.task);
        for (const auto& v : r.features.values) {
            out << ',';
            if (v) out << detail::format_double(*v);
        }
        out << '\n';
    }
}

inline std::string emit_feature_table(std::span<const FeatureRow> rows) {
    std::ostringstream out;
    emit_feature_table(out, rows);
    return out.str();
}

inline std::vector<FeatureRow> parse_feature_table(std::istream& in) {
    const auto header = feature_table_header();
    detail::expect_header(in, header, "feature table");
    std::vector<FeatureRow> rows;
    std::string line;
    std::size_t lineno = 1;
    while (detail::read_line(in, line)) {
        ++lineno;
        auto f = detail::split_fields(line);
        if (f.size() != 3 + kFeatureCount)
            throw ParseError("feature table: expected " + std::to_string(3 + kFeatureCount) + " fields, got " +
                                 std::to_string(f.size()),
                             lineno);
        FeatureRow row;
        if (f[0].empty()) throw ParseError("feature table: empty participant_id", lineno);
        row.meta.participant_id = std::string(f[0]);
        auto task = detail::parse_int<long>(f[2]);
        if (!task) throw ParseError("feature table: task_id is not an integer", lineno);
        try {
            row.meta.group = parse_group(f[1]);
            row.meta.task = task_from_number(*task);
        } catch (const DomainError& e) {
            throw ParseError(std::string("feature table: ") + e.what(), lineno);
        }
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
            const auto cell = f[3 + i];
            if (cell.empty()) continue;
            auto v = detail::parse_double(cell);
            if (!v) throw ParseError("feature table: " + std::string(kFeatureNames[i]) + " is not a number", lineno);
            row.features.values[i] = *v;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::vector<FeatureRow> parse_feature_table(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_feature_table(in);
}

}  // namespace scriptor
