#include "nova/labels.hpp"

#include <algorithm>
#include <set>

namespace nova {

std::string class_str(const LabelClass& b) {
    std::string s = "[";
    for (size_t i = 0; i < b.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(b[i]);
    }
    return s + "]";
}

void LabelGroup::validate() const {
    if (energy.size() != rank || maslov.size() != rank)
        throw DivergenceError("label group maps must match rank");
    for (auto& row : boundary)
        if (row.size() != rank) throw DivergenceError("boundary row width must match rank");
    for (auto m : maslov)
        if (m % 2 != 0) throw DivergenceError("maslov image must lie in 2Z");
    for (auto& g : support_generators) {
        if (g.size() != rank) throw DivergenceError("support generator width must match rank");
        if (!is_zero_class(g) && !(energy_of(g) > 0))
            throw DivergenceError("nonzero support generator with energy <= 0: " + class_str(g));
    }
}

std::vector<LabelClass> LabelGroup::enumerate_support(const Rat& e_max) const {
    validate();
    std::vector<LabelClass> gens;
    for (auto& g : support_generators)
        if (!is_zero_class(g)) gens.push_back(g);

    std::set<LabelClass> seen;
    seen.insert(zero_class(rank));
    // breadth-first over the monoid; energies are bounded below by the gap,
    // so the frontier is finite
    std::vector<LabelClass> frontier{zero_class(rank)};
    while (!frontier.empty()) {
        std::vector<LabelClass> next;
        for (auto& b : frontier)
            for (auto& g : gens) {
                LabelClass c = add_class(b, g);
                if (!(energy_of(c) < e_max)) continue;
                if (seen.insert(c).second) next.push_back(c);
            }
        frontier = std::move(next);
    }
    std::vector<LabelClass> out(seen.begin(), seen.end());
    std::sort(out.begin(), out.end(), [this](const LabelClass& a, const LabelClass& b) {
        Rat ea = energy_of(a), eb = energy_of(b);
        if (ea != eb) return ea < eb;
        return a < b;
    });
    return out;
}

}  // namespace nova
