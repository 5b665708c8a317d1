#pragma once

// Minimal CPLEX-LP text emission helpers. Internal to the library.

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace adamdp::detail {

inline std::string num17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// One linear expression, accumulated term by term and printed with explicit
// signs the way LP files expect: "+ 2 v_0 - 0.5 v_1".
struct LinExpr {
    std::vector<std::pair<std::string, double>> terms;

    void add(const std::string& var, double coeff) {
        if (coeff == 0.0) return;
        for (auto& t : terms)
            if (t.first == var) {
                t.second += coeff;
                return;
            }
        terms.emplace_back(var, coeff);
    }

    void print(std::ostream& os) const {
        bool first = true;
        for (const auto& [var, c] : terms) {
            if (c == 0.0) continue;
            double mag = c < 0 ? -c : c;
            os << (first ? (c < 0 ? "- " : "") : (c < 0 ? " - " : " + "));
            os << num17(mag) << " " << var;
            first = false;
        }
        if (first) os << "0 dummy";
    }
};

inline void print_constraint(std::ostream& os, const std::string& name, const LinExpr& lhs,
                             const char* sense, double rhs) {
    os << " " << name << ": ";
    lhs.print(os);
    os << " " << sense << " " << num17(rhs) << "\n";
}

} // namespace adamdp::detail
