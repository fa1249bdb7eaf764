#pragma once

#include <string>
#include <vector>

namespace nova {

// Outcome of one verification. Findings are ordered deterministically by the
// (E(beta), lex beta, k) traversal of whoever produced them; the first entry
// is the located first violation.
struct Finding {
    std::string condition;  // verbatim label, e.g. "(a1)", "(II-5)", "A-infinity"
    std::string location;   // "(k=3, beta=[1,0], in=[t1,t2,t12])"
    std::string detail;
};

struct VerificationReport {
    std::string check;
    bool pass = true;
    std::vector<Finding> findings;

    void fail(std::string condition, std::string location, std::string detail = "") {
        pass = false;
        findings.push_back({std::move(condition), std::move(location), std::move(detail)});
    }
    void merge(const VerificationReport& sub) {
        if (!sub.pass) {
            pass = false;
            for (auto& f : sub.findings) {
                Finding g = f;
                g.condition = sub.check + ":" + g.condition;
                findings.push_back(std::move(g));
            }
        }
    }
    std::string summary() const {
        std::string s = check + ": " + (pass ? "pass" : "FAIL");
        if (!pass && !findings.empty())
            s += " [" + findings.front().condition + " at " + findings.front().location + "]";
        return s;
    }
};

}  // namespace nova
