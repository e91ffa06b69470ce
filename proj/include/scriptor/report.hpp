#pragma once

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "scriptor/error.hpp"
#include "scriptor/stats.hpp"

namespace scriptor {

/// Everything `analyze` produces: one report per (effect, task) cell.
struct AnalysisDocument {
    double alpha = kDefaultAlpha;
    std::vector<AnovaReport> reports;

    friend bool operator==(const AnalysisDocument&, const AnalysisDocument&) = default;
};

namespace detail {

using nlohmann::json;

// JSON has no infinities; they are written as strings.
inline json number_to_json(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

class JsonReader {
public:
    explicit JsonReader(std::string path) : path_(std::move(path)) {}

    [[noreturn]] void fail(const std::string& what) const { throw ParseError("analysis JSON: " + path_ + ": " + what); }

    JsonReader at(const std::string& key) const { return JsonReader(path_ + "." + key); }
    JsonReader at(std::size_t i) const { return JsonReader(path_ + "[" + std::to_string(i) + "]"); }

    const json& member(const json& obj, const std::string& key) const {
        if (!obj.is_object()) fail("expected object");
        auto it = obj.find(key);
        if (it == obj.end()) at(key).fail("missing");
        return *it;
    }

    double number(const json& v) const {
        if (v.is_number()) return v.get<double>();
        if (v.is_string()) {
            const auto s = v.get<std::string>();
            if (s == "inf") return std::numeric_limits<double>::infinity();
            if (s == "-inf") return -std::numeric_limits<double>::infinity();
            if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        }
        fail("expected number");
    }

    long long integer(const json& v) const {
        if (!v.is_number_integer()) fail("expected integer");
        return v.get<long long>();
    }

    std::string string(const json& v) const {
        if (!v.is_string()) fail("expected string");
        return v.get<std::string>();
    }

    const json& array(const json& v) const {
        if (!v.is_array()) fail("expected array");
        return v;
    }

private:
    std::string path_;
};

}  // namespace detail

inline nlohmann::json to_json(const AnovaReport& r) {
    using detail::number_to_json;
    nlohmann::json j;
    j["effect"] = r.effect;
    j["task"] = r.task ? nlohmann::json(task_number(*r.task)) : nlohmann::json(nullptr);
    j["F"] = number_to_json(r.f);
    j["df"] = {r.df_between, r.df_error};
    j["p"] = number_to_json(r.p);
    j["significant"] = r.significant;
    j["descriptives"] = nlohmann::json::array();
    for (const auto& d : r.descriptives)
        j["descriptives"].push_back({{"group", d.group}, {"n", d.n}, {"mean", number_to_json(d.mean)}, {"sd", number_to_json(d.sd)}});
    j["pairwise"] = nlohmann::json::array();
    for (const auto& c : r.pairwise)
        j["pairwise"].push_back({{"a", c.a},
                                 {"b", c.b},
                                 {"mean_difference", number_to_json(c.mean_difference)},
                                 {"t", number_to_json(c.t)},
                                 {"df", number_to_json(c.df)},
                                 {"p_raw", number_to_json(c.p_raw)},
                                 {"p_bonferroni", number_to_json(c.p_bonferroni)}});
    j["excluded"] = r.excluded;
    return j;
}

inline nlohmann::json to_json(const AnalysisDocument& doc) {
    nlohmann::json j;
    j["alpha"] = doc.alpha;
    j["reports"] = nlohmann::json::array();
    for (const auto& r : doc.reports) j["reports"].push_back(to_json(r));
    return j;
}

inline AnovaReport anova_report_from_json(const nlohmann::json& j, const detail::JsonReader& rd) {
    AnovaReport r;
    r.effect = rd.at("effect").string(rd.member(j, "effect"));
    const auto& task = rd.member(j, "task");
    if (!task.is_null()) {
        try {
            r.task = task_from_number(rd.at("task").integer(task));
        } catch (const DomainError& e) {
            rd.at("task").fail(e.what());
        }
    }
    r.f = rd.at("F").number(rd.member(j, "F"));
    const auto& df = rd.at("df").array(rd.member(j, "df"));
    if (df.size() != 2) rd.at("df").fail("expected two entries");
    r.df_between = static_cast<int>(rd.at("df").at(0).integer(df[0]));
    r.df_error = static_cast<int>(rd.at("df").at(1).integer(df[1]));
    r.p = rd.at("p").number(rd.member(j, "p"));
    const auto& sig = rd.member(j, "significant");
    if (!sig.is_boolean()) rd.at("significant").fail("expected boolean");
    r.significant = sig.get<bool>();

    const auto drd = rd.at("descriptives");
    const auto& desc = drd.array(rd.member(j, "descriptives"));
    for (std::size_t i = 0; i < desc.size(); ++i) {
        const auto e = drd.at(i);
        GroupDescriptive d;
        d.group = e.at("group").string(e.member(desc[i], "group"));
        const auto n = e.at("n").integer(e.member(desc[i], "n"));
        if (n < 0) e.at("n").fail("negative count");
        d.n = static_cast<std::size_t>(n);
        d.mean = e.at("mean").number(e.member(desc[i], "mean"));
        d.sd = e.at("sd").number(e.member(desc[i], "sd"));
        r.descriptives.push_back(std::move(d));
    }

    const auto prd = rd.at("pairwise");
    const auto& pw = prd.array(rd.member(j, "pairwise"));
    for (std::size_t i = 0; i < pw.size(); ++i) {
        const auto e = prd.at(i);
        PairwiseComparison c;
        c.a = e.at("a").string(e.member(pw[i], "a"));
        c.b = e.at("b").string(e.member(pw[i], "b"));
        c.mean_difference = e.at("mean_difference").number(e.member(pw[i], "mean_difference"));
        c.t = e.at("t").number(e.member(pw[i], "t"));
        c.df = e.at("df").number(e.member(pw[i], "df"));
        c.p_raw = e.at("p_raw").number(e.member(pw[i], "p_raw"));
        c.p_bonferroni = e.at("p_bonferroni").number(e.member(pw[i], "p_bonferroni"));
        r.pairwise.push_back(std::move(c));
    }

    if (j.contains("excluded")) {
        const auto xrd = rd.at("excluded");
        const auto& ex = xrd.array(j["excluded"]);
        for (std::size_t i = 0; i < ex.size(); ++i) r.excluded.push_back(xrd.at(i).string(ex[i]));
    }
    return r;
}

/// Reads an analysis document. Missing "alpha" and "reports" keys mean the
/// defaults (an empty analysis).
inline AnalysisDocument analysis_from_json(const nlohmann::json& j) {
    const detail::JsonReader rd("$");
    if (!j.is_object()) rd.fail("expected object");
    AnalysisDocument doc;
    if (j.contains("alpha")) doc.alpha = rd.at("alpha").number(j["alpha"]);
    if (j.contains("reports")) {
        const auto rrd = rd.at("reports");
        const auto& reports = rrd.array(j["reports"]);
        for (std::size_t i = 0; i < reports.size(); ++i) doc.reports.push_back(anova_report_from_json(reports[i], rrd.at(i)));
    }
    return doc;
}

inline AnalysisDocument parse_analysis(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("analysis JSON: ") + e.what());
    }
    return analysis_from_json(j);
}

// ---------------------------------------------------------------------------
// Text tables

inline std::string format_p(double p) {
    if (p < 0.001) return "p < .001";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", p);
    std::string s = buf;
    if (s.rfind("0.", 0) == 0) s.erase(0, 1);
    return "p = " + s;
}

inline std::string format_stat(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

namespace detail {

inline std::string effect_title(const std::string& effect) {
    if (parse_category(effect)) {
        std::string t;
        for (char c : effect) t += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        return t + " CATEGORY";
    }
    return "FEATURE " + effect;
}

inline std::string task_label(const AnovaReport& r) {
    return r.task ? "Task " + std::to_string(task_number(*r.task)) : std::string("All");
}

}  // namespace detail

/// Renders mean (SD) tables per effect, one row per task, followed by the
/// omnibus and post hoc results.
inline void render_text(std::ostream& out, const AnalysisDocument& doc) {
    std::vector<std::string> effects;
    for (const auto& r : doc.reports)
        if (std::find(effects.begin(), effects.end(), r.effect) == effects.end()) effects.push_back(r.effect);

    for (const auto& effect : effects) {
        std::vector<const AnovaReport*> cells;
        std::vector<std::string> groups;
        for (const auto& r : doc.reports) {
            if (r.effect != effect) continue;
            cells.push_back(&r);
            for (const auto& d : r.descriptives)
                if (std::find(groups.begin(), groups.end(), d.group) == groups.end()) groups.push_back(d.group);
        }

        constexpr int kTaskWidth = 8;
        constexpr int kCellWidth = 24;
        out << detail::effect_title(effect) << '\n';
        out << std::left << std::setw(kTaskWidth) << "TASK";
        for (const auto& g : groups) out << std::setw(kCellWidth) << g;
        out << '\n';
        for (const auto* r : cells) {
            out << std::setw(kTaskWidth) << detail::task_label(*r);
            for (const auto& g : groups) {
                auto it = std::find_if(r->descriptives.begin(), r->descriptives.end(),
                                       [&](const GroupDescriptive& d) { return d.group == g; });
                out << std::setw(kCellWidth) << (it == r->descriptives.end() ? "-" : format_mean_sd(it->mean, it->sd));
            }
            out << '\n';
        }
        out << std::right;
        for (const auto* r : cells) {
            out << "  " << detail::task_label(*r) << ": F(" << r->df_between << "; " << r->df_error
                << ") = " << format_stat(r->f) << "; " << format_p(r->p) << (r->significant ? " *" : "") << '\n';
            for (const auto& c : r->pairwise) {
                out << "    " << c.a << " vs " << c.b << ": diff = " << format_stat(c.mean_difference) << "; t("
                    << c.df << ") = " << format_stat(c.t) << "; Bonferroni " << format_p(c.p_bonferroni)
                    << (c.p_bonferroni < doc.alpha ? " *" : "") << '\n';
            }
            if (!r->excluded.empty()) {
                out << "    excluded:";
                for (const auto& id : r->excluded) out << ' ' << id;
                out << '\n';
            }
        }
        out << '\n';
    }
}

inline std::string render_text(const AnalysisDocument& doc) {
    std::ostringstream out;
    render_text(out, doc);
    return out.str();
}

}  // namespace scriptor
