#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "scriptor/error.hpp"
#include "scriptor/features.hpp"
#include "scriptor/segmentation.hpp"
#include "scriptor/trace.hpp"

namespace scriptor::synth {

struct Point {
    std::int32_t x = 0;
    std::int32_t y = 0;

    friend bool operator==(const Point&, const Point&) = default;
};

enum class PlanKind : std::uint8_t { OnPaper, InAir, IdleGap };

/// One scripted segment. A pen plan of duration d emits d / period samples
/// spaced one period apart; the next plan starts d after this one. An idle gap
/// of duration g puts g between the surrounding samples and emits nothing.
struct StrokePlan {
    PlanKind kind = PlanKind::OnPaper;
    Millis duration = kDefaultPeriodMs;
    Point start;
    Point end;
    std::int32_t pressure_start = 0;
    std::int32_t pressure_end = 0;
};

struct StrokeScript {
    RecordingMeta meta;
    Millis nominal_period = kDefaultPeriodMs;
    Millis start_t = 1'650'000'000'000;
    std::vector<StrokePlan> plans;
};

/// What the generator knows about the recording it emitted, derived from the
/// plan list alone.
struct GroundTruth {
    TraitCounts counts;
    TraitTimes times;
    std::vector<BoundingBox> stroke_boxes;  // one per on-paper trait
    std::vector<Point> stroke_first;        // first sample of each on-paper trait
    std::vector<Point> stroke_last;         // last sample of each on-paper trait
    double bbox_area = 0;                   // Sbb
    double total_gap = 0;                   // Stotal
    double avg_gap = 0;                     // Savg
    std::optional<double> inclination;      // Iavg
};

struct GeneratedRecording {
    TaskRecording recording;
    GroundTruth truth;
    std::vector<std::string> warnings;
};

/// Rejects scripts that cannot be emitted; returns warnings for idle gaps the
/// segmenter would not detect at `idle_threshold`.
inline std::vector<std::string> check_script(const StrokeScript& script, std::int32_t pressure_max = kDefaultPressureMax,
                                             Millis idle_threshold = kDefaultIdleThresholdMs) {
    const auto p = script.nominal_period;
    if (p <= 0) throw DomainError("script: nominal period must be positive");
    if (script.start_t < 0) throw DomainError("script: negative start time");
    if (script.plans.empty()) throw DomainError("script: no plans");
    std::vector<std::string> warnings;
    for (std::size_t i = 0; i < script.plans.size(); ++i) {
        const auto& pl = script.plans[i];
        const auto where = "script plan " + std::to_string(i) + ": ";
        if (pl.duration <= 0) throw DomainError(where + "duration must be positive");
        if (pl.kind == PlanKind::IdleGap) {
            if (i == 0 || i + 1 == script.plans.size()) throw DomainError(where + "idle gap must sit between pen plans");
            if (script.plans[i - 1].kind == PlanKind::IdleGap) throw DomainError(where + "consecutive idle gaps");
            if (pl.duration <= idle_threshold)
                warnings.push_back(where + "idle gap of " + std::to_string(pl.duration) +
                                   " ms will not be detected at threshold " + std::to_string(idle_threshold) + " ms");
            continue;
        }
        if (pl.duration % p != 0) throw DomainError(where + "duration must be a multiple of the period");
        for (auto pr : {pl.pressure_start, pl.pressure_end})
            if (pr < 0 || pr > pressure_max) throw DomainError(where + "pressure outside [0, pressure_max]");
    }
    return warnings;
}

namespace detail {

inline std::int32_t lerp_round(std::int32_t a, std::int32_t b, std::size_t i, std::size_t k) {
    if (k <= 1) return a;
    const double f = static_cast<double>(i) / static_cast<double>(k - 1);
    return static_cast<std::int32_t>(std::lround(a + (static_cast<double>(b) - a) * f));
}

inline GroundTruth plan_ground_truth(const StrokeScript& script) {
    const auto p = script.nominal_period;
    const auto& plans = script.plans;
    GroundTruth gt;

    // Walk pen plans, merging consecutive same-kind plans not separated by an
    // idle gap into one trait.
    std::optional<PlanKind> run_kind;
    Millis run_duration = 0;
    BoundingBox box;
    Point first, last;

    auto close_run = [&](bool trims_outgoing) {
        if (!run_kind) return;
        const Millis d = run_duration - (trims_outgoing ? p : 0);
        if (*run_kind == PlanKind::OnPaper) {
            ++gt.counts.down;
            gt.times.down += d;
            gt.stroke_boxes.push_back(box);
            gt.stroke_first.push_back(first);
            gt.stroke_last.push_back(last);
        } else {
            ++gt.counts.up;
            gt.times.up += d;
        }
        run_kind.reset();
        run_duration = 0;
    };

    for (std::size_t i = 0; i < plans.size(); ++i) {
        const auto& pl = plans[i];
        if (pl.kind == PlanKind::IdleGap) {
            close_run(true);
            ++gt.counts.idle;
            gt.times.idle += pl.duration;
            continue;
        }
        const auto k = static_cast<std::size_t>(pl.duration / p);
        const Point a = pl.start;
        const Point b = k > 1 ? pl.end : pl.start;
        if (run_kind && *run_kind != pl.kind) close_run(false);
        if (!run_kind) {
            run_kind = pl.kind;
            box = {a.x, a.y, a.x, a.y};
            first = a;
        }
        run_duration += pl.duration;
        box.min_x = std::min({box.min_x, a.x, b.x});
        box.max_x = std::max({box.max_x, a.x, b.x});
        box.min_y = std::min({box.min_y, a.y, b.y});
        box.max_y = std::max({box.max_y, a.y, b.y});
        last = b;
    }
    close_run(true);
    gt.times.total = gt.times.up + gt.times.down + gt.times.idle;

    double incl_sum = 0;
    std::size_t incl_n = 0;
    for (std::size_t s = 0; s < gt.stroke_boxes.size(); ++s) {
        const auto& bb = gt.stroke_boxes[s];
        gt.bbox_area += bb.area();
        if (bb.width() != 0 || bb.height() != 0) {
            incl_sum += std::atan2(bb.height(), bb.width()) * (180.0 / std::numbers::pi);
            ++incl_n;
        }
        if (s > 0) {
            const double dx = static_cast<double>(gt.stroke_first[s].x) - gt.stroke_last[s - 1].x;
            const double dy = static_cast<double>(gt.stroke_first[s].y) - gt.stroke_last[s - 1].y;
            gt.total_gap += std::hypot(dx, dy);
        }
    }
    if (gt.stroke_boxes.size() > 1) gt.avg_gap = gt.total_gap / static_cast<double>(gt.stroke_boxes.size() - 1);
    if (incl_n > 0) gt.inclination = incl_sum / static_cast<double>(incl_n);
    return gt;
}

}  // namespace detail

/// Emits the samples described by `script`. The seed only drives the tilt
/// angles, which no feature reads.
inline GeneratedRecording generate_recording(const StrokeScript& script, std::uint64_t seed,
                                             std::int32_t pressure_max = kDefaultPressureMax,
                                             Millis idle_threshold = kDefaultIdleThresholdMs) {
    GeneratedRecording out;
    out.warnings = check_script(script, pressure_max, idle_threshold);
    const auto p = script.nominal_period;

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::int32_t> azimuth(0, 3599);
    std::uniform_int_distribution<std::int32_t> altitude(300, 900);

    auto& rec = out.recording;
    rec.meta = script.meta;
    rec.nominal_period = p;

    Millis t = script.start_t;
    for (const auto& pl : script.plans) {
        if (pl.kind == PlanKind::IdleGap) {
            t += pl.duration - p;
            continue;
        }
        const auto k = static_cast<std::size_t>(pl.duration / p);
        const bool on_paper = pl.kind == PlanKind::OnPaper;
        for (std::size_t i = 0; i < k; ++i) {
            PenSample s;
            s.t = t + static_cast<Millis>(i) * p;
            s.x = detail::lerp_round(pl.start.x, pl.end.x, i, k);
            s.y = detail::lerp_round(pl.start.y, pl.end.y, i, k);
            s.status = on_paper ? PenStatus::OnPaper : PenStatus::InAir;
            s.azimuth = azimuth(rng);
            s.altitude = altitude(rng);
            s.pressure = detail::lerp_round(pl.pressure_start, pl.pressure_end, i, k);
            rec.samples.push_back(s);
        }
        t += pl.duration;
    }
    out.truth = detail::plan_ground_truth(script);
    return out;
}

// ---------------------------------------------------------------------------
// Random scripts for property tests

struct RandomScriptOptions {
    std::size_t min_plans = 1;
    std::size_t max_plans = 40;
    std::size_t max_samples_per_plan = 30;
    Millis idle_threshold = kDefaultIdleThresholdMs;
    Millis max_idle_gap = 2000;
    std::int32_t coord_max = 20000;
    std::int32_t pressure_max = kDefaultPressureMax;
    double idle_probability = 0.15;
};

/// Arbitrary valid script: mixed kinds including repeated kinds (which merge),
/// single-sample strokes and detectable idle gaps.
template <class Rng>
StrokeScript random_script(Rng& rng, const RandomScriptOptions& opt = {}, Millis period = kDefaultPeriodMs) {
    std::uniform_int_distribution<std::size_t> n_plans(opt.min_plans, opt.max_plans);
    std::uniform_int_distribution<std::size_t> n_samples(1, opt.max_samples_per_plan);
    std::uniform_int_distribution<std::int32_t> coord(0, opt.coord_max);
    std::uniform_int_distribution<std::int32_t> pressure(0, opt.pressure_max);
    std::uniform_int_distribution<Millis> gap(opt.idle_threshold + 1, std::max(opt.idle_threshold + 1, opt.max_idle_gap));
    std::bernoulli_distribution idle(opt.idle_probability);
    std::bernoulli_distribution paper(0.5);

    StrokeScript script;
    script.nominal_period = period;
    script.start_t = std::uniform_int_distribution<Millis>(0, 2'000'000'000'000)(rng);
    const auto n = n_plans(rng);
    for (std::size_t i = 0; i < n; ++i) {
        const bool can_idle = i > 0 && i + 1 < n && script.plans.back().kind != PlanKind::IdleGap;
        StrokePlan pl;
        if (can_idle && idle(rng)) {
            pl.kind = PlanKind::IdleGap;
            pl.duration = gap(rng);
        } else {
            pl.kind = paper(rng) ? PlanKind::OnPaper : PlanKind::InAir;
            pl.duration = static_cast<Millis>(n_samples(rng)) * period;
            pl.start = {coord(rng), coord(rng)};
            pl.end = {coord(rng), coord(rng)};
            pl.pressure_start = pressure(rng);
            pl.pressure_end = pressure(rng);
        }
        script.plans.push_back(pl);
    }
    return script;
}

// ---------------------------------------------------------------------------
// Cohorts

struct Target {
    double mean = 0;
    double sd = 0;
};

/// Category-score targets for one task: the participant's mean over the
/// category's features.
struct TaskTargets {
    Target ductus;
    Target time;
    Target pressure;
};

struct GroupSpec {
    Group group = Group::NOR;
    int count = 2;
    std::array<TaskTargets, 4> tasks{};  // indexed by task number - 1
};

struct CohortSpec {
    std::uint64_t seed = 20220101;
    Millis nominal_period = kDefaultPeriodMs;
    Millis idle_threshold = kDefaultIdleThresholdMs;
    std::int32_t pressure_max = kDefaultPressureMax;
    std::vector<GroupSpec> groups;
};

/// Group sizes 14/15/20; ductus, time and pressure targets taken from the
/// published group means and their reported spreads where available.
inline CohortSpec default_cohort_spec() {
    CohortSpec spec;
    auto tt = [](Target d, Target t, Target p) { return TaskTargets{d, t, p}; };
    // Tasks 3-4 time and pressure were not tabulated; those targets are
    // placeholders with no CL-to-NOR ordering beyond a mild trend on task 3.
    spec.groups = {
        {Group::CL, 14,
         {tt({26.286, 3.480}, {17675.821, 1556.496}, {369.646, 22.644}),
          tt({49.857, 4.167}, {23026.286, 2020.529}, {339.659, 23.303}),
          tt({47.643, 3.665}, {26500.0, 2100.0}, {420.0, 25.0}),
          tt({60.214, 3.927}, {28000.0, 2400.0}, {420.0, 25.0})}},
        {Group::SEV, 15,
         {tt({14.978, 3.362}, {12131.050, 1503.718}, {446.241, 21.876}),
          tt({24.600, 4.304}, {18031.850, 1952.016}, {417.886, 22.513}),
          tt({25.111, 3.541}, {24000.0, 2000.0}, {420.0, 25.0}),
          tt({35.578, 3.794}, {28000.0, 2400.0}, {420.0, 25.0})}},
        {Group::NOR, 20,
         {tt({3.100, 2.912}, {7096.075, 1302.258}, {495.572, 18.945}),
          tt({16.600, 3.494}, {13494.300, 1690.496}, {426.029, 19.497}),
          tt({19.733, 3.066}, {21500.0, 1800.0}, {420.0, 25.0}),
          tt({30.083, 3.286}, {28000.0, 2400.0}, {420.0, 25.0})}},
    };
    return spec;
}

inline void check_cohort_spec(const CohortSpec& spec) {
    if (spec.nominal_period <= 0) throw DomainError("cohort spec: nominal period must be positive");
    if (spec.idle_threshold <= 0) throw DomainError("cohort spec: idle threshold must be positive");
    if (spec.pressure_max <= 0) throw DomainError("cohort spec: pressure_max must be positive");
    if (spec.groups.empty()) throw DomainError("cohort spec: no groups");
    for (const auto& g : spec.groups) {
        const std::string name(to_string(g.group));
        if (g.count < 2) throw DomainError("cohort spec: group " + name + " needs at least 2 participants");
        for (const auto& t : g.tasks)
            for (const auto* target : {&t.ductus, &t.time, &t.pressure})
                if (!(target->sd >= 0) || !std::isfinite(target->mean))
                    throw DomainError("cohort spec: group " + name + " has an invalid target");
    }
}

/// Multiplies every time target (mean and spread) by `factor`.
inline CohortSpec scale_time_targets(CohortSpec spec, double factor) {
    for (auto& g : spec.groups)
        for (auto& t : g.tasks) {
            t.time.mean *= factor;
            t.time.sd *= factor;
        }
    return spec;
}

struct CohortRecording {
    std::string file;  // relative to the cohort directory
    GeneratedRecording generated;
};

struct Cohort {
    std::vector<CohortRecording> recordings;
    std::vector<std::string> log;
};

namespace detail {

// Normal draw truncated below at `floor`: resample a bounded number of times,
// then clamp.
template <class Rng>
double truncated_normal(Rng& rng, Target target, double floor, bool& floored) {
    std::normal_distribution<double> dist(target.mean, target.sd);
    for (int attempt = 0; attempt < 100; ++attempt) {
        const double v = target.sd > 0 ? dist(rng) : target.mean;
        if (v >= floor) return v;
        if (target.sd == 0) break;
    }
    floored = true;
    return floor;
}

inline Millis round_to_period(double ms, Millis period) {
    const auto k = static_cast<Millis>(std::llround(ms / static_cast<double>(period)));
    return std::max<Millis>(1, k) * period;
}

inline std::string participant_id(Group g, int index) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02d", index + 1);
    return std::string(to_string(g)) + buf;
}

inline constexpr double kIdleShare = 0.15;        // fraction of pen transitions that are idle gaps
inline constexpr double kIdleTimeShare = 0.10;    // fraction of total time spent idle
inline constexpr double kOnPaperTimeShare = 0.6;  // of the remaining pen time
inline constexpr double kPressureRampFraction = 0.1;

/// Splits `total` into `count` jittered parts of at least `min_part` each;
/// the parts sum to max(total, count * min_part) exactly.
template <class Rng>
std::vector<Millis> split_total(Rng& rng, Millis total, long count, Millis min_part) {
    std::vector<Millis> parts(static_cast<std::size_t>(std::max(0L, count)), min_part);
    if (parts.empty()) return parts;
    std::uniform_real_distribution<double> weight(0.5, 1.5);
    std::vector<double> w(parts.size());
    double sum = 0;
    for (auto& x : w) sum += x = weight(rng);
    const Millis spare = std::max<Millis>(0, total - static_cast<Millis>(parts.size()) * min_part);
    double cum = 0;
    Millis given = 0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        cum += w[i];
        const Millis upto = i + 1 == parts.size() ? spare : std::llround(static_cast<double>(spare) * (cum / sum));
        parts[i] += upto - given;
        given = upto;
    }
    return parts;
}

/// Builds one task script whose ductus, time and pressure category scores land
/// near the drawn targets.
template <class Rng>
StrokeScript cohort_script(Rng& rng, const CohortSpec& spec, const TaskTargets& targets, RecordingMeta meta,
                           std::vector<std::string>& log) {
    const auto p = spec.nominal_period;
    const std::string who = meta.participant_id + " task " + std::to_string(task_number(meta.task));

    // Ductus score = (Nup + Ndown + Nidle) / 3 with Ndown = Nup + Nidle + 1,
    // so the trait total is odd.
    bool floored = false;
    const double ductus = truncated_normal(rng, targets.ductus, 1.0 / 3.0, floored);
    if (floored) log.push_back(who + ": ductus target floored at a single stroke");
    const long total = 2 * std::max(0L, std::lround((3.0 * ductus - 1.0) / 2.0)) + 1;
    const long transitions = (total - 1) / 2;
    const long n_idle = std::lround(static_cast<double>(transitions) * kIdleShare);
    const long n_strokes = transitions + 1;

    std::vector<bool> idle_transition(static_cast<std::size_t>(transitions), false);
    std::fill_n(idle_transition.begin(), n_idle, true);
    std::shuffle(idle_transition.begin(), idle_transition.end(), rng);

    // Time score = (Tup + Tdown + Tidle + Ttotal) / 4 = Ttotal / 2.
    floored = false;
    const long pen_plans = n_strokes + (transitions - n_idle);
    const double min_total = static_cast<double>(pen_plans * p) + static_cast<double>(n_idle * (spec.idle_threshold + p));
    const double ttotal = 2.0 * truncated_normal(rng, targets.time, min_total / 2.0, floored);
    if (floored) log.push_back(who + ": time target floored at the feasible minimum");

    const double idle_total = n_idle > 0 ? std::max(kIdleTimeShare * ttotal, static_cast<double>(n_idle) * 2.0 * spec.idle_threshold) : 0.0;
    const double pen_time = std::max(ttotal - idle_total + static_cast<double>(p * (1 + n_idle)), static_cast<double>(pen_plans * p));
    const double transitions_air = static_cast<double>(transitions - n_idle);
    const double paper_share = transitions_air > 0 ? kOnPaperTimeShare : 1.0;

    // Pressure score ~ (5c + sd) / 6 for ramps c +- r with r = 0.1c.
    floored = false;
    const double pscore = truncated_normal(rng, targets.pressure, 1.0, floored);
    if (floored) log.push_back(who + ": pressure target floored");
    const double ramp_sd = kPressureRampFraction / std::sqrt(3.0);
    double centre = 6.0 * pscore / (5.0 + ramp_sd);
    const double max_centre = spec.pressure_max / (1.0 + kPressureRampFraction);
    if (centre > max_centre) {
        log.push_back(who + ": pressure target capped by pressure_max");
        centre = max_centre;
    }
    const auto ramp = static_cast<std::int32_t>(std::lround(kPressureRampFraction * centre));
    const auto c = static_cast<std::int32_t>(std::lround(centre));

    std::uniform_int_distribution<std::int32_t> place(1000, 15000);
    std::uniform_int_distribution<std::int32_t> reach(-600, 600);
    std::bernoulli_distribution rising(0.5);

    StrokeScript script;
    script.meta = std::move(meta);
    script.nominal_period = p;

    // Per-plan durations are jittered but their totals are fixed, so the time
    // features depend only on the drawn targets.
    const auto pd = static_cast<double>(p);
    const auto stroke_ms = split_total(rng, std::llround(pen_time * paper_share / pd), n_strokes, 1);
    const auto air_ms = split_total(rng, std::llround(pen_time * (1.0 - paper_share) / pd),
                                    static_cast<long>(transitions_air), 1);
    const auto gap_ms = split_total(rng, std::llround(idle_total), n_idle, spec.idle_threshold + p);
    std::size_t next_air = 0, next_gap = 0;

    Point cursor{place(rng), place(rng)};
    for (long s = 0; s < n_strokes; ++s) {
        StrokePlan stroke;
        stroke.kind = PlanKind::OnPaper;
        stroke.duration = stroke_ms[static_cast<std::size_t>(s)] * p;
        stroke.start = cursor;
        stroke.end = stroke.duration > p ? Point{cursor.x + reach(rng), cursor.y + reach(rng)} : cursor;
        const bool up = rising(rng);
        stroke.pressure_start = std::clamp(up ? c - ramp : c + ramp, 0, spec.pressure_max);
        stroke.pressure_end = std::clamp(up ? c + ramp : c - ramp, 0, spec.pressure_max);
        script.plans.push_back(stroke);
        if (s + 1 == n_strokes) break;

        const Point next{place(rng), place(rng)};
        if (idle_transition[static_cast<std::size_t>(s)]) {
            StrokePlan gap;
            gap.kind = PlanKind::IdleGap;
            gap.duration = gap_ms[next_gap++];
            script.plans.push_back(gap);
        } else {
            StrokePlan air;
            air.kind = PlanKind::InAir;
            air.duration = air_ms[next_air++] * p;
            air.start = stroke.end;
            air.end = next;
            script.plans.push_back(air);
        }
        cursor = next;
    }
    return script;
}

}  // namespace detail

/// One recording per (participant, task). Each recording draws from its own
/// RNG stream keyed by (seed, group, participant, task).
inline Cohort generate_cohort(const CohortSpec& spec) {
    check_cohort_spec(spec);
    Cohort cohort;
    for (std::size_t gi = 0; gi < spec.groups.size(); ++gi) {
        const auto& g = spec.groups[gi];
        for (int i = 0; i < g.count; ++i) {
            const auto pid = detail::participant_id(g.group, i);
            for (auto task : kAllTasks) {
                const auto tn = task_number(task);
                std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                                  static_cast<std::uint32_t>(g.group), static_cast<std::uint32_t>(i),
                                  static_cast<std::uint32_t>(tn)};
                std::mt19937_64 rng(seq);
                auto script = detail::cohort_script(rng, spec, g.tasks[static_cast<std::size_t>(tn - 1)],
                                                    {pid, task, g.group}, cohort.log);
                CohortRecording cr;
                cr.file = pid + "_task" + std::to_string(tn) + ".csv";
                cr.generated = generate_recording(script, rng(), spec.pressure_max, spec.idle_threshold);
                for (auto& w : cr.generated.warnings) cohort.log.push_back(pid + ": " + w);
                cohort.recordings.push_back(std::move(cr));
            }
        }
    }
    return cohort;
}

inline std::vector<ManifestEntry> cohort_manifest(const Cohort& cohort) {
    std::vector<ManifestEntry> entries;
    for (const auto& r : cohort.recordings) entries.push_back({r.file, r.generated.recording.meta});
    return entries;
}

/// Writes every recording plus `manifest.csv` into `dir`.
inline std::filesystem::path write_cohort(const Cohort& cohort, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& r : cohort.recordings) {
        std::ofstream out(dir / r.file, std::ios::binary);
        if (!out) throw Error("cannot write '" + (dir / r.file).string() + "'");
        emit_recording(out, r.generated.recording);
    }
    const auto manifest = dir / "manifest.csv";
    std::ofstream out(manifest, std::ios::binary);
    if (!out) throw Error("cannot write '" + manifest.string() + "'");
    emit_manifest(out, cohort_manifest(cohort));
    return manifest;
}

// ---------------------------------------------------------------------------
// CohortSpec JSON

inline nlohmann::json to_json(const CohortSpec& spec) {
    nlohmann::json j;
    j["seed"] = spec.seed;
    j["nominal_period_ms"] = spec.nominal_period;
    j["idle_threshold_ms"] = spec.idle_threshold;
    j["pressure_max"] = spec.pressure_max;
    j["groups"] = nlohmann::json::array();
    for (const auto& g : spec.groups) {
        nlohmann::json jg;
        jg["group"] = std::string(to_string(g.group));
        jg["count"] = g.count;
        jg["tasks"] = nlohmann::json::array();
        for (std::size_t t = 0; t < g.tasks.size(); ++t) {
            auto target = [](const Target& x) { return nlohmann::json{{"mean", x.mean}, {"sd", x.sd}}; };
            jg["tasks"].push_back({{"task", t + 1},
                                   {"ductus", target(g.tasks[t].ductus)},
                                   {"time", target(g.tasks[t].time)},
                                   {"pressure", target(g.tasks[t].pressure)}});
        }
        j["groups"].push_back(std::move(jg));
    }
    return j;
}

/// Parses a cohort spec. Omitted top-level keys keep their defaults; "groups"
/// is required. Errors name the offending JSON path.
inline CohortSpec cohort_spec_from_json(const nlohmann::json& j) {
    auto fail = [](const std::string& path, const std::string& what) -> void {
        throw ParseError("cohort spec: " + path + ": " + what);
    };
    auto number = [&](const nlohmann::json& obj, const std::string& key, const std::string& path) {
        if (!obj.is_object()) fail(path, "expected object");
        auto it = obj.find(key);
        if (it == obj.end()) fail(path + "." + key, "missing");
        if (!it->is_number()) fail(path + "." + key, "expected number");
        return it->get<double>();
    };
    auto integer = [&](const nlohmann::json& obj, const std::string& key, const std::string& path) {
        auto it = obj.find(key);
        if (it == obj.end()) fail(path + "." + key, "missing");
        if (!it->is_number_integer()) fail(path + "." + key, "expected integer");
        return it->get<long long>();
    };

    if (!j.is_object()) fail("$", "expected object");
    CohortSpec spec;
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) fail("$.seed", "expected integer");
        spec.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("nominal_period_ms")) spec.nominal_period = integer(j, "nominal_period_ms", "$");
    if (j.contains("idle_threshold_ms")) spec.idle_threshold = integer(j, "idle_threshold_ms", "$");
    if (j.contains("pressure_max")) spec.pressure_max = static_cast<std::int32_t>(integer(j, "pressure_max", "$"));
    if (!j.contains("groups") || !j["groups"].is_array()) fail("$.groups", "expected array");

    const auto& groups = j["groups"];
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const auto gpath = "$.groups[" + std::to_string(gi) + "]";
        const auto& jg = groups[gi];
        if (!jg.is_object()) fail(gpath, "expected object");
        GroupSpec g;
        if (!jg.contains("group") || !jg["group"].is_string()) fail(gpath + ".group", "expected string");
        try {
            g.group = parse_group(jg["group"].get<std::string>());
        } catch (const DomainError& e) {
            fail(gpath + ".group", e.what());
        }
        g.count = static_cast<int>(integer(jg, "count", gpath));
        if (!jg.contains("tasks") || !jg["tasks"].is_array() || jg["tasks"].size() != 4)
            fail(gpath + ".tasks", "expected array of 4 tasks");
        std::array<bool, 4> seen{};
        for (std::size_t ti = 0; ti < 4; ++ti) {
            const auto tpath = gpath + ".tasks[" + std::to_string(ti) + "]";
            const auto& jt = jg["tasks"][ti];
            if (!jt.is_object()) fail(tpath, "expected object");
            const auto task = integer(jt, "task", tpath);
            if (task < 1 || task > 4) fail(tpath + ".task", "must be 1..4");
            if (seen[static_cast<std::size_t>(task - 1)]) fail(tpath + ".task", "duplicate task");
            seen[static_cast<std::size_t>(task - 1)] = true;
            auto target = [&](const char* key) {
                const auto path = tpath + "." + key;
                if (!jt.contains(key)) fail(path, "missing");
                return Target{number(jt[key], "mean", path), number(jt[key], "sd", path)};
            };
            auto& tt = g.tasks[static_cast<std::size_t>(task - 1)];
            tt.ductus = target("ductus");
            tt.time = target("time");
            tt.pressure = target("pressure");
        }
        spec.groups.push_back(g);
    }
    check_cohort_spec(spec);
    return spec;
}

}  // namespace scriptor::synth
