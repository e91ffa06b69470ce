#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "scriptor/error.hpp"
#include "scriptor/features.hpp"
#include "scriptor/report.hpp"
#include "scriptor/segmentation.hpp"
#include "scriptor/stats.hpp"
#include "scriptor/synth.hpp"
#include "scriptor/trace.hpp"

namespace scriptor::cli {

enum class ReportFormat { Text, Json };

struct RunConfig {
    Millis idle_threshold = kDefaultIdleThresholdMs;
    std::int32_t pressure_max = kDefaultPressureMax;
    Millis nominal_period = kDefaultPeriodMs;
    double alpha = kDefaultAlpha;
    ReportFormat format = ReportFormat::Text;
    std::optional<std::uint64_t> seed;

    void check() const {
        if (idle_threshold <= 0) throw DomainError("idle threshold must be positive");
        if (pressure_max <= 0) throw DomainError("pressure_max must be positive");
        if (nominal_period <= 0) throw DomainError("period must be positive");
        if (!(alpha > 0 && alpha < 1)) throw DomainError("alpha must be in (0, 1)");
    }
};

/// Log sink that counts errors; commands exit nonzero iff any were logged.
class Log {
public:
    explicit Log(std::ostream& out) : out_(out) {}

    void info(const std::string& msg) { out_ << "info: " << msg << '\n'; }
    void warn(const std::string& msg) { out_ << "warning: " << msg << '\n'; }
    void error(const std::string& msg) {
        out_ << "error: " << msg << '\n';
        ++errors_;
    }

    std::size_t errors() const noexcept { return errors_; }
    int exit_code() const noexcept { return errors_ == 0 ? 0 : 1; }

private:
    std::ostream& out_;
    std::size_t errors_ = 0;
};

namespace detail {

inline void write_output(const std::optional<std::filesystem::path>& path, const std::string& text) {
    if (!path) {
        std::cout << text;
        return;
    }
    if (path->has_parent_path()) std::filesystem::create_directories(path->parent_path());
    std::ofstream out(*path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path->string() + "'");
    out << text;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace detail

/// Feature rows for every recording in the manifest; failures are logged and
/// skipped.
inline std::vector<FeatureRow> extract_rows(const std::vector<ManifestEntry>& entries, const RunConfig& cfg, Log& log,
                                            const std::optional<std::filesystem::path>& trait_dump_dir = {}) {
    const ParseOptions opts{cfg.pressure_max, cfg.nominal_period};
    std::vector<FeatureRow> rows;
    for (const auto& e : entries) {
        const auto name = e.file.string();
        try {
            if (!std::filesystem::exists(e.file)) {
                log.error(name + ": file not found");
                continue;
            }
            auto rec = load_recording(e.file, e.meta, opts);
            const auto report = validate_recording(rec, cfg.pressure_max);
            if (!report.ok()) {
                for (const auto& v : report.violations) log.error(name + ": sample " + std::to_string(v.index) + ": " + v.message);
                continue;
            }
            if (report.deviating_gaps > 0)
                log.warn(name + ": " + std::to_string(report.deviating_gaps) + " of " + std::to_string(report.gap_count) +
                         " sample gaps deviate from the nominal period by more than 25%");

            if (trait_dump_dir) {
                std::filesystem::create_directories(*trait_dump_dir);
                std::ofstream dump(*trait_dump_dir / (e.file.stem().string() + "_traits.csv"), std::ios::binary);
                dump_traits(dump, segment(rec, cfg.idle_threshold));
            }
            FeatureRow row{rec.meta, extract_all(rec, cfg.idle_threshold)};
            for (const auto& note : row.features.notes) log.warn(name + ": " + note);
            rows.push_back(std::move(row));
        } catch (const Error& ex) {
            log.error(name + ": " + ex.what());
        }
    }
    return rows;
}

inline int cmd_extract(const std::filesystem::path& manifest, const std::optional<std::filesystem::path>& output,
                       const RunConfig& cfg, std::ostream& err,
                       const std::optional<std::filesystem::path>& trait_dump_dir = {}) {
    Log log(err);
    try {
        cfg.check();
        const auto entries = load_manifest(manifest);
        const auto rows = extract_rows(entries, cfg, log, trait_dump_dir);
        detail::write_output(output, emit_feature_table(rows));
        log.info("extracted " + std::to_string(rows.size()) + " of " + std::to_string(entries.size()) + " recordings");
    } catch (const std::exception& ex) {
        log.error(ex.what());
    }
    return log.exit_code();
}

/// Every task x (5 categories + 17 features) cell that can be analysed.
inline AnalysisDocument analyze_table(const CohortTable& rows, const RunConfig& cfg, Log& log) {
    validate_cohort(rows);
    AnalysisDocument doc;
    doc.alpha = cfg.alpha;

    std::vector<TaskId> tasks;
    for (auto t : kAllTasks)
        for (const auto& r : rows)
            if (r.meta.task == t) {
                tasks.push_back(t);
                break;
            }

    auto run = [&](const std::string& effect, TaskId task, std::span<const Feature> features) {
        try {
            auto report = group_effect(rows, task, features, effect, cfg.alpha);
            if (!report.excluded.empty())
                log.warn(effect + " task " + std::to_string(task_number(task)) + ": excluded " +
                         std::to_string(report.excluded.size()) + " participant(s) with undefined features");
            doc.reports.push_back(std::move(report));
        } catch (const InsufficientData& ex) {
            log.warn(effect + " task " + std::to_string(task_number(task)) + " skipped: " + ex.what());
        }
    };
    for (auto c : kAllCategories)
        for (auto t : tasks) run(std::string(to_string(c)), t, category_features(c));
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        const Feature f[] = {static_cast<Feature>(i)};
        for (auto t : tasks) run(std::string(kFeatureNames[i]), t, f);
    }
    return doc;
}

inline std::string render(const AnalysisDocument& doc, ReportFormat format) {
    if (format == ReportFormat::Json) return to_json(doc).dump(2) + "\n";
    return render_text(doc);
}

inline int cmd_analyze(const std::filesystem::path& features, const std::optional<std::filesystem::path>& output,
                       const RunConfig& cfg, std::ostream& err) {
    Log log(err);
    try {
        cfg.check();
        std::ifstream in(features, std::ios::binary);
        if (!in) throw Error("cannot open feature table '" + features.string() + "'");
        const auto rows = parse_feature_table(in);
        const auto doc = analyze_table(rows, cfg, log);
        detail::write_output(output, render(doc, cfg.format));
    } catch (const std::exception& ex) {
        log.error(ex.what());
    }
    return log.exit_code();
}

inline int cmd_synth(const std::optional<std::filesystem::path>& spec_path, const std::filesystem::path& out_dir,
                     const RunConfig& cfg, std::ostream& err) {
    Log log(err);
    try {
        cfg.check();
        synth::CohortSpec spec;
        if (spec_path) {
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(detail::read_file(*spec_path));
            } catch (const nlohmann::json::parse_error& ex) {
                throw ParseError("cohort spec: " + std::string(ex.what()));
            }
            spec = synth::cohort_spec_from_json(j);
        } else {
            spec = synth::default_cohort_spec();
            spec.nominal_period = cfg.nominal_period;
            spec.idle_threshold = cfg.idle_threshold;
            spec.pressure_max = cfg.pressure_max;
        }
        if (cfg.seed) spec.seed = *cfg.seed;
        const auto cohort = synth::generate_cohort(spec);
        for (const auto& line : cohort.log) log.info(line);
        const auto manifest = synth::write_cohort(cohort, out_dir);
        log.info("wrote " + std::to_string(cohort.recordings.size()) + " recordings and " + manifest.string());
    } catch (const std::exception& ex) {
        log.error(ex.what());
    }
    return log.exit_code();
}

inline int cmd_report(const std::filesystem::path& analysis, const std::optional<std::filesystem::path>& output,
                      std::ostream& err) {
    Log log(err);
    try {
        const auto doc = parse_analysis(detail::read_file(analysis));
        detail::write_output(output, render_text(doc));
    } catch (const std::exception& ex) {
        log.error(ex.what());
    }
    return log.exit_code();
}

}  // namespace scriptor::cli
