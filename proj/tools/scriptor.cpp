// scriptor: handwriting feature extraction and group analysis.
//
//   scriptor synth   --out-dir cohort/
//   scriptor extract --manifest cohort/manifest.csv -o features.csv
//   scriptor analyze --features features.csv --format json -o analysis.json
//   scriptor report  --input analysis.json

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "scriptor/cli.hpp"

int main(int argc, char** argv) {
    using namespace scriptor;

    CLI::App app{"Online handwriting feature extraction and group comparison"};
    app.require_subcommand(1);

    cli::RunConfig cfg;
    std::string format = "text";
    std::uint64_t seed = 0;

    app.add_option("--idle-threshold-ms", cfg.idle_threshold, "Gap above which the pen counts as idle")
        ->envname("SCRIPTOR_IDLE_THRESHOLD_MS")
        ->capture_default_str();
    app.add_option("--pressure-max", cfg.pressure_max, "Largest valid pressure value")
        ->envname("SCRIPTOR_PRESSURE_MAX")
        ->capture_default_str();
    app.add_option("--period-ms", cfg.nominal_period, "Nominal sampling period")
        ->envname("SCRIPTOR_PERIOD_MS")
        ->capture_default_str();
    app.add_option("--alpha", cfg.alpha, "Significance level")->envname("SCRIPTOR_ALPHA")->capture_default_str();
    app.add_option("--format", format, "Report format")
        ->envname("SCRIPTOR_FORMAT")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();
    auto* seed_opt = app.add_option("--seed", seed, "RNG seed for synth")->envname("SCRIPTOR_SEED");

    std::string manifest, features, analysis, out_dir, spec;
    std::string output, dump_dir;

    auto* extract = app.add_subcommand("extract", "Compute the 17 features for every recording in a manifest");
    extract->add_option("--manifest,-m", manifest, "Manifest CSV")->required();
    extract->add_option("--output,-o", output, "Feature table CSV (default stdout)");
    extract->add_option("--dump-traits", dump_dir, "Write per-recording trait CSVs into this directory");

    auto* analyze = app.add_subcommand("analyze", "Group ANOVA per task, category and feature");
    analyze->add_option("--features,-f", features, "Feature table CSV")->required();
    analyze->add_option("--output,-o", output, "Report file (default stdout)");

    auto* synth = app.add_subcommand("synth", "Generate a synthetic cohort");
    synth->add_option("--spec", spec, "Cohort spec JSON (default: built-in cohort)");
    synth->add_option("--out-dir", out_dir, "Output directory")->required();
    bool print_spec = false;
    auto* spec_cmd = app.add_subcommand("default-spec", "Print the built-in cohort spec as JSON");
    spec_cmd->callback([&] { print_spec = true; });

    auto* report = app.add_subcommand("report", "Render an analysis JSON as text tables");
    report->add_option("--input,-i", analysis, "Analysis JSON")->required();
    report->add_option("--output,-o", output, "Text file (default stdout)");

    CLI11_PARSE(app, argc, argv);

    cfg.format = format == "json" ? cli::ReportFormat::Json : cli::ReportFormat::Text;
    if (seed_opt->count() > 0) cfg.seed = seed;
    auto opt_path = [](const std::string& s) -> std::optional<std::filesystem::path> {
        if (s.empty()) return std::nullopt;
        return std::filesystem::path(s);
    };

    if (print_spec) {
        auto s = synth::default_cohort_spec();
        if (cfg.seed) s.seed = *cfg.seed;
        std::cout << synth::to_json(s).dump(2) << '\n';
        return 0;
    }
    if (*extract) return cli::cmd_extract(manifest, opt_path(output), cfg, std::cerr, opt_path(dump_dir));
    if (*analyze) return cli::cmd_analyze(features, opt_path(output), cfg, std::cerr);
    if (*synth) return cli::cmd_synth(opt_path(spec), out_dir, cfg, std::cerr);
    if (*report) return cli::cmd_report(analysis, opt_path(output), std::cerr);
    return 1;
}
