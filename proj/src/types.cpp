#include "costru/types.hpp"

#include <map>

namespace costru {

std::string to_string(Split split) {
    switch (split) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        case Split::Test: return "test";
    }
    return "train";
}

Split split_from_string(const std::string& name) {
    if (name == "train") return Split::Train;
    if (name == "val") return Split::Val;
    if (name == "test") return Split::Test;
    throw InputError("unknown split tag: " + name);
}

void Dataset::validate() const {
    if (scenarios.empty()) throw InputError("dataset is empty");
    const std::size_t width = scenarios.front().features().cols;
    for (const auto& s : scenarios) {
        if (!s.context) throw InputError("scenario without context");
        if (s.features().cols != width) throw InputError("scenarios disagree on feature width");
    }
}

std::vector<std::vector<std::size_t>> Dataset::group_by_context() const {
    std::vector<std::vector<std::size_t>> groups;
    std::map<int, std::size_t> slot;
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
        const int id = scenarios[i].context_id();
        auto [it, inserted] = slot.try_emplace(id, groups.size());
        if (inserted) groups.emplace_back();
        groups[it->second].push_back(i);
    }
    return groups;
}

double dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw InputError("dot: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace costru
