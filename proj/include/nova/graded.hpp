#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace nova {

struct SpaceMismatch : std::runtime_error {
    explicit SpaceMismatch(const std::string& m) : std::runtime_error(m) {}
};
struct DegreeError : std::runtime_error {
    explicit DegreeError(const std::string& m) : std::runtime_error(m) {}
};

// Finite graded basis. The optional distinguished unit and the ordered list
// of divisor inputs (closed degree-1 basis vectors dual to the boundary
// lattice) are declared by fixtures, never computed.
struct GradedSpace {
    std::vector<std::string> names;
    std::vector<int> degrees;
    int unit = -1;                    // index of the constant-one, if declared
    std::vector<int> divisor_basis;   // indices of theta_1..theta_n, in boundary-coordinate order
    std::map<int, std::pair<int, int>> two_form_pairs;  // degree-2 basis index -> (p,q), 0-based

    size_t dim() const { return names.size(); }
    int degree(int i) const { return degrees[static_cast<size_t>(i)]; }
    const std::string& name(int i) const { return names[static_cast<size_t>(i)]; }

    int index_of(const std::string& n) const {
        for (size_t i = 0; i < names.size(); ++i)
            if (names[i] == n) return static_cast<int>(i);
        throw std::out_of_range("no basis element named " + n);
    }
    bool has(const std::string& n) const {
        for (auto& m : names)
            if (m == n) return true;
        return false;
    }

    void add(const std::string& n, int deg) {
        if (has(n)) throw std::invalid_argument("duplicate basis name " + n);
        names.push_back(n);
        degrees.push_back(deg);
    }

    void declare_unit(const std::string& n) {
        int i = index_of(n);
        if (degree(i) != 0) throw DegreeError("unit must have degree 0");
        unit = i;
    }

    friend bool operator==(const GradedSpace& a, const GradedSpace& b) {
        return a.names == b.names && a.degrees == b.degrees;
    }

    std::string tuple_str(const std::vector<int>& idx) const {
        std::string s = "[";
        for (size_t i = 0; i < idx.size(); ++i) {
            if (i) s += ",";
            s += name(idx[i]);
        }
        return s + "]";
    }
};

}  // namespace nova
