#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scriptor/distributions.hpp"
#include "scriptor/error.hpp"
#include "scriptor/features.hpp"
#include "scriptor/trace.hpp"

namespace scriptor {

inline constexpr double kDefaultAlpha = 0.05;

/// Values of one group in a one-way layout.
struct GroupSample {
    std::string label;
    std::vector<double> values;
};

using GroupedValues = std::vector<GroupSample>;

struct GroupDescriptive {
    std::string group;
    std::size_t n = 0;
    double mean = 0;
    double sd = 0;  // n - 1 denominator; 0 when n == 1

    friend bool operator==(const GroupDescriptive&, const GroupDescriptive&) = default;
};

struct PairwiseComparison {
    std::string a;
    std::string b;
    double mean_difference = 0;  // mean(a) - mean(b)
    double t = 0;
    double df = 0;
    double p_raw = 1;
    double p_bonferroni = 1;

    friend bool operator==(const PairwiseComparison&, const PairwiseComparison&) = default;
};

struct AnovaReport {
    std::string effect;
    std::optional<TaskId> task;
    double f = 0;
    int df_between = 0;
    int df_error = 0;
    double p = 1;
    bool significant = false;
    std::vector<GroupDescriptive> descriptives;
    std::vector<PairwiseComparison> pairwise;
    std::vector<std::string> excluded;  // participants dropped for undefined features

    friend bool operator==(const AnovaReport&, const AnovaReport&) = default;
};

namespace detail {

// Two-pass mean with a residual correction; exact for constant data.
inline double mean_of(std::span<const double> v) {
    double sum = 0;
    for (double x : v) sum += x;
    const double n = static_cast<double>(v.size());
    const double m = sum / n;
    double resid = 0;
    for (double x : v) resid += x - m;
    return m + resid / n;
}

inline double sum_sq_dev(std::span<const double> v, double mean) {
    double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return ss;
}

inline void check_oneway(const GroupedValues& groups) {
    if (groups.size() < 2) throw InsufficientData("need at least 2 groups, got " + std::to_string(groups.size()));
    for (const auto& g : groups) {
        if (g.values.size() < 2)
            throw InsufficientData("group " + g.label + " has " + std::to_string(g.values.size()) +
                                   " member(s); at least 2 required");
        for (double v : g.values)
            if (!std::isfinite(v)) throw DomainError("group " + g.label + " contains a non-finite value");
    }
}

struct OnewaySums {
    std::vector<double> means;
    double ss_between = 0;
    double ss_within = 0;
    std::size_t n_total = 0;
};

inline OnewaySums oneway_sums(const GroupedValues& groups) {
    OnewaySums s;
    std::vector<double> all;
    for (const auto& g : groups) {
        s.means.push_back(mean_of(g.values));
        all.insert(all.end(), g.values.begin(), g.values.end());
    }
    s.n_total = all.size();
    const double grand = mean_of(all);
    for (std::size_t j = 0; j < groups.size(); ++j) {
        const double d = s.means[j] - grand;
        s.ss_between += static_cast<double>(groups[j].values.size()) * d * d;
        s.ss_within += sum_sq_dev(groups[j].values, s.means[j]);
    }
    return s;
}

}  // namespace detail

/// Per-group mean and SD. Empty groups are skipped.
inline std::vector<GroupDescriptive> descriptives(const GroupedValues& groups) {
    std::vector<GroupDescriptive> out;
    for (const auto& g : groups) {
        if (g.values.empty()) continue;
        GroupDescriptive d;
        d.group = g.label;
        d.n = g.values.size();
        d.mean = detail::mean_of(g.values);
        d.sd = d.n > 1 ? std::sqrt(detail::sum_sq_dev(g.values, d.mean) / static_cast<double>(d.n - 1)) : 0.0;
        out.push_back(std::move(d));
    }
    return out;
}

/// Pooled-variance t tests for every pair of groups with Bonferroni
/// adjustment over the g(g-1)/2 comparisons.
inline std::vector<PairwiseComparison> bonferroni_pairwise(const GroupedValues& groups) {
    detail::check_oneway(groups);
    const auto sums = detail::oneway_sums(groups);
    const std::size_t g = groups.size();
    const double df = static_cast<double>(sums.n_total - g);
    const double ms_within = sums.ss_within / df;
    const double comparisons = static_cast<double>(g * (g - 1) / 2);

    std::vector<PairwiseComparison> out;
    for (std::size_t i = 0; i < g; ++i) {
        for (std::size_t j = i + 1; j < g; ++j) {
            PairwiseComparison c;
            c.a = groups[i].label;
            c.b = groups[j].label;
            c.df = df;
            c.mean_difference = sums.means[i] - sums.means[j];
            const double se = std::sqrt(ms_within * (1.0 / static_cast<double>(groups[i].values.size()) +
                                                     1.0 / static_cast<double>(groups[j].values.size())));
            if (se > 0) {
                c.t = c.mean_difference / se;
                c.p_raw = 2.0 * t_sf(std::fabs(c.t), df);
            } else if (c.mean_difference != 0) {
                c.t = std::copysign(std::numeric_limits<double>::infinity(), c.mean_difference);
                c.p_raw = 0.0;
            } else {
                c.t = 0.0;
                c.p_raw = 1.0;
            }
            c.p_raw = std::clamp(c.p_raw, 0.0, 1.0);
            c.p_bonferroni = std::min(1.0, comparisons * c.p_raw);
            out.push_back(std::move(c));
        }
    }
    return out;
}

/// Unbalanced one-way ANOVA with descriptives and Bonferroni post hoc tests.
inline AnovaReport oneway_anova(const GroupedValues& groups, double alpha = kDefaultAlpha) {
    detail::check_oneway(groups);
    const auto sums = detail::oneway_sums(groups);
    const std::size_t g = groups.size();

    AnovaReport r;
    r.df_between = static_cast<int>(g - 1);
    r.df_error = static_cast<int>(sums.n_total - g);
    if (sums.ss_within > 0) {
        r.f = (sums.ss_between / r.df_between) / (sums.ss_within / r.df_error);
        r.p = f_sf(r.f, r.df_between, r.df_error);
    } else if (sums.ss_between > 0) {
        r.f = std::numeric_limits<double>::infinity();
        r.p = 0.0;
    } else {
        r.f = 0.0;
        r.p = 1.0;
    }
    r.significant = r.p < alpha;
    r.descriptives = descriptives(groups);
    r.pairwise = bonferroni_pairwise(groups);
    return r;
}

// ---------------------------------------------------------------------------
// Cohort level

using CohortTable = std::vector<FeatureRow>;

/// Checks one row per (participant, task) and one group per participant.
inline void validate_cohort(const CohortTable& rows) {
    std::map<std::string, Group> group_of;
    std::set<std::pair<std::string, TaskId>> seen;
    for (const auto& r : rows) {
        const auto& id = r.meta.participant_id;
        if (!seen.emplace(id, r.meta.task).second)
            throw DomainError("participant " + id + " has more than one row for task " +
                              std::to_string(task_number(r.meta.task)));
        auto [it, inserted] = group_of.emplace(id, r.meta.group);
        if (!inserted && it->second != r.meta.group) throw DomainError("participant " + id + " appears in two groups");
    }
}

struct SubjectScores {
    GroupedValues groups;               // CL, SEV, NOR order; absent groups omitted
    std::vector<std::string> excluded;  // participants with an undefined feature
};

/// Each participant's mean over `features` on one task, grouped. Rows are
/// visited in participant-id order so the result does not depend on input
/// order.
inline SubjectScores subject_scores(const CohortTable& rows, TaskId task, std::span<const Feature> features) {
    if (features.empty()) throw DomainError("subject scores need at least one feature");

    std::vector<const FeatureRow*> cell;
    for (const auto& r : rows)
        if (r.meta.task == task) cell.push_back(&r);
    std::sort(cell.begin(), cell.end(),
              [](const FeatureRow* a, const FeatureRow* b) { return a->meta.participant_id < b->meta.participant_id; });

    SubjectScores out;
    std::map<Group, std::vector<double>> by_group;
    for (const auto* r : cell) {
        double sum = 0;
        bool complete = true;
        for (auto f : features) {
            const auto& v = r->features[f];
            if (!v) {
                complete = false;
                break;
            }
            sum += *v;
        }
        if (!complete) {
            out.excluded.push_back(r->meta.participant_id);
            continue;
        }
        by_group[r->meta.group].push_back(sum / static_cast<double>(features.size()));
    }
    for (auto g : kAllGroups) {
        auto it = by_group.find(g);
        if (it != by_group.end()) out.groups.push_back({std::string(to_string(g)), std::move(it->second)});
    }
    return out;
}

inline std::vector<GroupDescriptive> descriptives(const CohortTable& rows, TaskId task, std::span<const Feature> features) {
    return descriptives(subject_scores(rows, task, features).groups);
}

/// Between-subjects group effect of a mixed design with `features` as the
/// within factor: a one-way ANOVA on each participant's mean over those
/// features. Participants with an undefined feature are excluded and listed.
inline AnovaReport group_effect(const CohortTable& rows, TaskId task, std::span<const Feature> features,
                                std::string effect, double alpha = kDefaultAlpha) {
    auto scores = subject_scores(rows, task, features);
    auto report = oneway_anova(scores.groups, alpha);
    report.effect = std::move(effect);
    report.task = task;
    report.excluded = std::move(scores.excluded);
    return report;
}

inline AnovaReport category_group_effect(const CohortTable& rows, TaskId task, Category category,
                                         double alpha = kDefaultAlpha) {
    return group_effect(rows, task, category_features(category), std::string(to_string(category)), alpha);
}

inline AnovaReport feature_group_effect(const CohortTable& rows, TaskId task, Feature feature,
                                        double alpha = kDefaultAlpha) {
    const Feature one[] = {feature};
    return group_effect(rows, task, one, std::string(to_string(feature)), alpha);
}

/// "26.286 (3.480)".
inline std::string format_mean_sd(double mean, double sd) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.3f (%.3f)", mean, sd);
    return buf;
}

}  // namespace scriptor
