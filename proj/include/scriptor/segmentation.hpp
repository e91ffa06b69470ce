#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scriptor/error.hpp"
#include "scriptor/trace.hpp"

namespace scriptor {

inline constexpr Millis kDefaultIdleThresholdMs = 3 * kDefaultPeriodMs;

enum class TraitKind : std::uint8_t { InAir, OnPaper, Idle };

inline std::string_view to_string(TraitKind k) noexcept {
    switch (k) {
        case TraitKind::InAir: return "in_air";
        case TraitKind::OnPaper: return "on_paper";
        case TraitKind::Idle: return "idle";
    }
    return "?";
}

/// A maximal stretch of the recording in one pen state. Idle traits carry no
/// samples; they are gaps between consecutive samples longer than the idle
/// threshold.
struct Trait {
    TraitKind kind = TraitKind::InAir;
    Millis start_t = 0;
    Millis end_t = 0;
    std::vector<PenSample> samples;

    Millis duration() const noexcept { return end_t - start_t; }
};

struct Segmentation {
    std::vector<Trait> traits;
    Millis idle_threshold = kDefaultIdleThresholdMs;
};

/// Splits a recording into in-air, on-paper and idle traits.
///
/// Every inter-sample interval belongs to exactly one trait: an Idle trait when
/// it exceeds `idle_threshold`, otherwise the run of the earlier sample. Runs
/// break on status changes and on idle gaps. The last sample contributes no
/// duration, so trait durations sum to t_last - t_first.
inline Segmentation segment(const TaskRecording& rec, Millis idle_threshold = kDefaultIdleThresholdMs) {
    if (idle_threshold <= 0) throw DomainError("idle threshold must be positive");
    const auto& s = rec.samples;
    if (s.size() < 2)
        throw DegenerateRecording("recording needs at least 2 samples, has " + std::to_string(s.size()));
    for (std::size_t i = 1; i < s.size(); ++i)
        if (s[i].t <= s[i - 1].t)
            throw DomainError("timestamps must be strictly increasing (sample " + std::to_string(i) + ")");

    Segmentation seg;
    seg.idle_threshold = idle_threshold;
    auto& traits = seg.traits;
    bool open = false;

    auto kind_of = [](const PenSample& p) { return p.on_paper() ? TraitKind::OnPaper : TraitKind::InAir; };

    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto kind = kind_of(s[i]);
        if (!open || traits.back().kind != kind) {
            traits.push_back(Trait{kind, s[i].t, s[i].t, {}});
            open = true;
        }
        traits.back().samples.push_back(s[i]);
        if (i + 1 == s.size()) break;

        const Millis dt = s[i + 1].t - s[i].t;
        if (dt > idle_threshold) {
            traits.push_back(Trait{TraitKind::Idle, s[i].t, s[i + 1].t, {}});
            open = false;
        } else {
            traits.back().end_t = s[i + 1].t;
        }
    }
    return seg;
}

struct TraitCounts {
    std::size_t up = 0;    // in-air
    std::size_t down = 0;  // on-paper
    std::size_t idle = 0;

    friend bool operator==(const TraitCounts&, const TraitCounts&) = default;
};

struct TraitTimes {
    Millis up = 0;
    Millis down = 0;
    Millis idle = 0;
    Millis total = 0;

    friend bool operator==(const TraitTimes&, const TraitTimes&) = default;
};

inline TraitCounts trait_counts(const Segmentation& seg) noexcept {
    TraitCounts c;
    for (const auto& t : seg.traits) {
        switch (t.kind) {
            case TraitKind::InAir: ++c.up; break;
            case TraitKind::OnPaper: ++c.down; break;
            case TraitKind::Idle: ++c.idle; break;
        }
    }
    return c;
}

inline TraitTimes trait_times(const Segmentation& seg) noexcept {
    TraitTimes tt;
    for (const auto& t : seg.traits) {
        switch (t.kind) {
            case TraitKind::InAir: tt.up += t.duration(); break;
            case TraitKind::OnPaper: tt.down += t.duration(); break;
            case TraitKind::Idle: tt.idle += t.duration(); break;
        }
    }
    tt.total = tt.up + tt.down + tt.idle;
    return tt;
}

/// Debug dump, one trait per line.
inline void dump_traits(std::ostream& out, const Segmentation& seg) {
    out << "kind,start_t,end_t,n_samples\n";
    for (const auto& t : seg.traits)
        out << to_string(t.kind) << ',' << t.start_t << ',' << t.end_t << ',' << t.samples.size() << '\n';
}

}  // namespace scriptor
