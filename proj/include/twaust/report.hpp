#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace twaust {

inline constexpr const char* kArtifactVersion = "1.0.0";
inline constexpr int kReportSchemaVersion = 1;

enum class Verdict { pass, fail, inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
    }
    return "fail";
}

/// Running max/mean of one named residual over a sample set.
struct ConditionStat {
    std::string name;
    double tolerance = 0.0;
    double max = 0.0;
    double sum = 0.0;
    std::size_t count = 0;
    bool saw_nan = false;

    void add(double r) {
        if (!std::isfinite(r)) {
            saw_nan = true;
            ++count;
            return;
        }
        r = std::abs(r);
        max = std::max(max, r);
        sum += r;
        ++count;
    }

    void merge(const ConditionStat& o) {
        max = std::max(max, o.max);
        sum += o.sum;
        count += o.count;
        saw_nan = saw_nan || o.saw_nan;
    }

    double mean() const { return count ? sum / static_cast<double>(count) : 0.0; }
    bool pass() const { return !saw_nan && max < tolerance; }
};

/// Outcome of any check: per-condition residual statistics plus a verdict.
/// Verdict pass requires every max below its tolerance and at most 10% of
/// sample points skipped; more skips than that make the run inconclusive.
class CheckReport {
public:
    static constexpr double kMaxSkippedFraction = 0.10;

    CheckReport() = default;
    explicit CheckReport(std::string subject) : subject_(std::move(subject)) {}

    const std::string& subject() const noexcept { return subject_; }
    void set_subject(std::string s) { subject_ = std::move(s); }

    void set_command(std::vector<std::string> argv) { command_ = std::move(argv); }
    const std::vector<std::string>& command() const noexcept { return command_; }

    void set_seed(std::uint64_t seed) { seed_ = seed; }
    std::uint64_t seed() const noexcept { return seed_; }

    void set_wall_time(double seconds) { wall_time_ = seconds; }
    double wall_time() const noexcept { return wall_time_; }

    /// Returns the condition with this name, creating it with `tolerance` if new.
    ConditionStat& condition(const std::string& name, double tolerance) {
        auto it = index_.find(name);
        if (it != index_.end()) return conditions_[it->second];
        index_.emplace(name, conditions_.size());
        conditions_.push_back(ConditionStat{name, tolerance});
        return conditions_.back();
    }

    void record(const std::string& name, double residual, double tolerance) {
        condition(name, tolerance).add(residual);
    }

    const ConditionStat* find(const std::string& name) const {
        auto it = index_.find(name);
        return it == index_.end() ? nullptr : &conditions_[it->second];
    }

    const std::vector<ConditionStat>& conditions() const noexcept { return conditions_; }

    void merge_conditions(const CheckReport& o) {
        for (const auto& c : o.conditions_) condition(c.name, c.tolerance).merge(c);
    }

    void set_measured(const std::string& key, double value) { measured_[key] = value; }
    const std::map<std::string, double>& measured() const noexcept { return measured_; }
    double measured_or(const std::string& key, double fallback) const {
        auto it = measured_.find(key);
        return it == measured_.end() ? fallback : it->second;
    }

    void add_note(std::string note) { notes_.push_back(std::move(note)); }
    const std::vector<std::string>& notes() const noexcept { return notes_; }

    void set_points(std::size_t total, std::size_t skipped) {
        points_total_ = total;
        points_skipped_ = skipped;
    }
    std::size_t points_total() const noexcept { return points_total_; }
    std::size_t points_skipped() const noexcept { return points_skipped_; }

    double skipped_fraction() const {
        return points_total_ ? static_cast<double>(points_skipped_) / static_cast<double>(points_total_) : 0.0;
    }

    /// Largest residual among conditions, ignoring tolerance.
    double worst_max() const {
        double w = 0.0;
        for (const auto& c : conditions_) w = std::max(w, c.saw_nan ? std::numeric_limits<double>::infinity() : c.max);
        return w;
    }

    /// Name of the condition whose max exceeds its tolerance by the largest ratio.
    std::string worst_condition() const {
        std::string name;
        double ratio = -1.0;
        for (const auto& c : conditions_) {
            const double r = c.saw_nan ? std::numeric_limits<double>::infinity() : c.max / std::max(c.tolerance, 1e-300);
            if (r > ratio) {
                ratio = r;
                name = c.name;
            }
        }
        return name;
    }

    Verdict verdict() const {
        if (points_total_ > 0 && (points_skipped_ == points_total_ || skipped_fraction() > kMaxSkippedFraction))
            return Verdict::inconclusive;
        if (conditions_.empty()) return Verdict::inconclusive;
        for (const auto& c : conditions_)
            if (!c.pass()) return Verdict::fail;
        return Verdict::pass;
    }

    bool passed() const { return verdict() == Verdict::pass; }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["artifact_version"] = kArtifactVersion;
        j["schema_version"] = kReportSchemaVersion;
        j["subject"] = subject_;
        j["command"] = command_;
        j["seed"] = seed_;
        j["points"] = {{"total", points_total_}, {"skipped", points_skipped_}};
        auto conds = nlohmann::ordered_json::array();
        for (const auto& c : conditions_) {
            nlohmann::ordered_json e;
            e["name"] = c.name;
            e["max"] = c.saw_nan ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(c.max);
            e["mean"] = c.mean();
            e["count"] = c.count;
            e["skipped"] = points_skipped_;
            e["tolerance"] = c.tolerance;
            e["pass"] = c.pass();
            conds.push_back(std::move(e));
        }
        j["conditions"] = std::move(conds);
        nlohmann::ordered_json m = nlohmann::ordered_json::object();
        for (const auto& [k, v] : measured_) m[k] = std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
        j["measured"] = std::move(m);
        j["notes"] = notes_;
        j["verdict"] = to_string(verdict());
        j["wall_time"] = wall_time_;
        return j;
    }

    std::string dump() const { return to_json().dump(2); }

private:
    std::string subject_;
    std::vector<std::string> command_;
    std::uint64_t seed_ = 0;
    std::vector<ConditionStat> conditions_;
    std::map<std::string, std::size_t> index_;
    std::map<std::string, double> measured_;
    std::vector<std::string> notes_;
    std::size_t points_total_ = 0;
    std::size_t points_skipped_ = 0;
    double wall_time_ = 0.0;
};

} // namespace twaust
