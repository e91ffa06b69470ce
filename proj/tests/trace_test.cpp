#include "scriptor/trace.hpp"

#include <random>
#include <sstream>
#include <string>

#include "gtest/gtest.h"
#include "scriptor/synth.hpp"

namespace scriptor {
namespace {

const RecordingMeta kMeta{"P01", TaskId::House, Group::CL};

std::string with_header(const std::string& rows) { return std::string(kRecordingHeader) + "\n" + rows; }

TEST(ParseRecording, SingleRow) {
    auto rec = parse_recording(with_header("1000,10,20,1,0,900,300\n"), kMeta);
    ASSERT_EQ(rec.samples.size(), 1u);
    const auto& s = rec.samples[0];
    EXPECT_EQ(s.t, 1000);
    EXPECT_EQ(s.x, 10);
    EXPECT_EQ(s.y, 20);
    EXPECT_EQ(s.status, PenStatus::OnPaper);
    EXPECT_EQ(s.azimuth, 0);
    EXPECT_EQ(s.altitude, 900);
    EXPECT_EQ(s.pressure, 300);
    EXPECT_EQ(rec.meta, kMeta);
    EXPECT_EQ(rec.nominal_period, 8);
}

TEST(ParseRecording, EmptyInputHasNoSamples) {
    try {
        parse_recording(std::string_view(""), kMeta);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("no samples"), std::string::npos);
    }
    EXPECT_THROW(parse_recording(with_header(""), kMeta), ParseError);
}

TEST(ParseRecording, RequiresHeader) {
    EXPECT_THROW(parse_recording(std::string_view("1000,10,20,1,0,900,300\n"), kMeta), ParseError);
}

TEST(ParseRecording, MalformedRowsReportLineNumber) {
    try {
        parse_recording(with_header("0,1,1,1,0,0,10\n8,1,1,1,0,0\n"), kMeta);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
    try {
        parse_recording(with_header("0,1,1,1,0,0,10\n8,1,1.5,1,0,0,10\n"), kMeta);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
        EXPECT_NE(std::string(e.what()).find("'y'"), std::string::npos);
    }
    EXPECT_THROW(parse_recording(with_header("0,1,,1,0,0,10\n"), kMeta), ParseError);
}

TEST(ParseRecording, DomainChecks) {
    EXPECT_THROW(parse_recording(with_header("0,1,1,2,0,0,10\n"), kMeta), DomainError);
    EXPECT_THROW(parse_recording(with_header("0,1,1,1,0,0,-1\n"), kMeta), DomainError);
    EXPECT_THROW(parse_recording(with_header("0,1,1,1,0,0,1024\n"), kMeta), DomainError);
    EXPECT_NO_THROW(parse_recording(with_header("0,1,1,1,0,0,1023\n"), kMeta));
    // a 0-255 device
    EXPECT_THROW(parse_recording(with_header("0,1,1,1,0,0,300\n"), kMeta, {255, 8}), DomainError);
}

TEST(ParseRecording, AcceptsCrlf) {
    auto rec = parse_recording(std::string(kRecordingHeader) + "\r\n0,1,2,0,3,4,5\r\n", kMeta);
    ASSERT_EQ(rec.samples.size(), 1u);
    EXPECT_EQ(rec.samples[0].pressure, 5);
}

TEST(ParseRecording, RoundTripsSyntheticStream) {
    std::mt19937_64 rng(7);
    synth::RandomScriptOptions opt;
    opt.min_plans = 60;
    opt.max_plans = 60;
    TaskRecording rec;
    while (rec.samples.size() < 1000) {
        auto gen = synth::generate_recording(synth::random_script(rng, opt), rng());
        rec = gen.recording;
    }
    rec.samples.resize(1000);
    rec.meta = kMeta;

    const auto text = emit_recording(rec);
    const auto back = parse_recording(text, kMeta);
    EXPECT_EQ(back, rec);
    EXPECT_EQ(emit_recording(back), text);
}

TaskRecording evenly_spaced(std::size_t n, Millis period = 8) {
    TaskRecording rec;
    rec.meta = kMeta;
    for (std::size_t i = 0; i < n; ++i) {
        PenSample s;
        s.t = 1'000 + static_cast<Millis>(i) * period;
        s.status = i % 7 < 4 ? PenStatus::OnPaper : PenStatus::InAir;
        s.pressure = 100;
        rec.samples.push_back(s);
    }
    return rec;
}

TEST(ValidateRecording, CleanStreamIsEmpty) {
    const auto report = validate_recording(evenly_spaced(50));
    EXPECT_TRUE(report.empty());
    EXPECT_EQ(report.gap_count, 49u);
    EXPECT_EQ(report.gap_deviation_fraction, 0.0);
}

TEST(ValidateRecording, DecreasingTimestampReportedAtIndex) {
    auto rec = evenly_spaced(20);
    rec.samples[12].t = rec.samples[11].t - 3;
    const auto report = validate_recording(rec);
    ASSERT_EQ(report.violations.size(), 1u);
    EXPECT_EQ(report.violations[0].kind, ViolationKind::NonMonotoneTimestamp);
    EXPECT_EQ(report.violations[0].index, 12u);
}

TEST(ValidateRecording, DuplicateTimestampIsNonMonotone) {
    auto rec = evenly_spaced(5);
    rec.samples[3].t = rec.samples[2].t;
    rec.samples[4].t = rec.samples[3].t + 8;
    const auto report = validate_recording(rec);
    ASSERT_EQ(report.violations.size(), 1u);
    EXPECT_EQ(report.violations[0].index, 3u);
}

TEST(ValidateRecording, GapDeviationFraction) {
    // 101 samples -> 100 gaps; every 10th gap is 40 ms.
    TaskRecording rec;
    Millis t = 0;
    std::size_t long_gaps = 0;
    for (std::size_t i = 0; i <= 100; ++i) {
        rec.samples.push_back(PenSample{t, 0, 0, PenStatus::OnPaper, 0, 0, 10});
        const bool long_gap = i % 10 == 9;
        long_gaps += long_gap && i < 100;
        t += long_gap ? 40 : 8;
    }
    ASSERT_EQ(long_gaps, 10u);
    const auto report = validate_recording(rec);
    EXPECT_TRUE(report.ok());
    EXPECT_EQ(report.gap_count, 100u);
    EXPECT_EQ(report.deviating_gaps, 10u);
    EXPECT_DOUBLE_EQ(report.gap_deviation_fraction, 0.10);
}

TEST(ValidateRecording, QuarterPeriodBoundary) {
    TaskRecording rec;
    rec.samples = {{0, 0, 0, PenStatus::InAir, 0, 0, 0}, {10, 0, 0, PenStatus::InAir, 0, 0, 0},
                   {21, 0, 0, PenStatus::InAir, 0, 0, 0}};
    // gaps 10 (|2| = p/4, allowed) and 11 (|3| > p/4)
    const auto report = validate_recording(rec);
    EXPECT_EQ(report.deviating_gaps, 1u);
}

TEST(ValidateRecording, PressureRangeUsesGivenMax) {
    auto rec = evenly_spaced(4);
    rec.samples[2].pressure = 300;
    EXPECT_TRUE(validate_recording(rec).ok());
    const auto report = validate_recording(rec, 255);
    ASSERT_EQ(report.violations.size(), 1u);
    EXPECT_EQ(report.violations[0].kind, ViolationKind::PressureOutOfRange);
    EXPECT_EQ(report.violations[0].index, 2u);
}

TEST(ValidateRecording, DoesNotMutate) {
    auto rec = evenly_spaced(30);
    rec.samples[5].t = 0;
    const auto copy = rec;
    (void)validate_recording(rec);
    EXPECT_EQ(rec, copy);
}

TEST(Manifest, ParseAndEmit) {
    const std::string text = std::string(kManifestHeader) + "\na.csv,P1,CL,1\nsub/b.csv,P2,NOR,4\n";
    std::istringstream in(text);
    const auto entries = parse_manifest(in);
    ASSERT_EQ(entries.size(), 2u);
    EXPECT_EQ(entries[1].file, std::filesystem::path("sub/b.csv"));
    EXPECT_EQ(entries[1].meta.group, Group::NOR);
    EXPECT_EQ(entries[1].meta.task, TaskId::Clock);

    std::ostringstream out;
    emit_manifest(out, entries);
    EXPECT_EQ(out.str(), text);
}

TEST(Manifest, RejectsBadValues) {
    auto parse = [](const std::string& row) {
        std::istringstream in(std::string(kManifestHeader) + "\n" + row + "\n");
        return parse_manifest(in);
    };
    EXPECT_THROW(parse("a.csv,P1,XX,1"), ParseError);
    EXPECT_THROW(parse("a.csv,P1,CL,5"), ParseError);
    EXPECT_THROW(parse("a.csv,P1,CL"), ParseError);
    EXPECT_THROW(parse("a.csv,,CL,1"), ParseError);
}

}  // namespace
}  // namespace scriptor
