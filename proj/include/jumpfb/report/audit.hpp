#pragma once

#include <string>
#include <utility>
#include <vector>

namespace jumpfb {

enum class Verdict { pass, fail, na };

inline const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::pass: return "PASS";
    case Verdict::fail: return "FAIL";
    default: return "NA";
    }
}

inline Verdict combine(Verdict a, Verdict b) {
    if (a == Verdict::fail || b == Verdict::fail) return Verdict::fail;
    if (a == Verdict::na && b == Verdict::na) return Verdict::na;
    return Verdict::pass;
}

struct AuditValue {
    std::string label;
    double value;
};

/// Outcome of one audit: named numeric payload, the tolerance the verdict
/// was judged against, and free-form notes.
struct AuditReport {
    std::string name;
    std::vector<AuditValue> values;
    double tolerance = 0.0;
    Verdict verdict = Verdict::na;
    std::vector<std::string> notes;

    AuditReport& add(std::string label, double v) {
        values.push_back({std::move(label), v});
        return *this;
    }
    AuditReport& add_series(const std::string& label, const std::vector<double>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) values.push_back({label + "[" + std::to_string(i) + "]", v[i]});
        return *this;
    }
    const AuditValue* find(const std::string& label) const {
        for (const auto& v : values)
            if (v.label == label) return &v;
        return nullptr;
    }
};

} // namespace jumpfb
