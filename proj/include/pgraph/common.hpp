#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace pgraph {

using Vertex = int;

// Thrown when an input violates a documented precondition (bad exponent,
// malformed file, infeasible problem, ...).
class invalid_input : public std::runtime_error {
public:
    explicit invalid_input(const std::string& what) : std::runtime_error(what) {}
};

// Compensated (Kahan-Neumaier) accumulator. Energy identities are asserted
// to 1e-10 and plain summation over tens of thousands of edge terms can
// lose that many digits.
class KahanSum {
public:
    void add(double value) {
        double t = sum_ + value;
        if (std::abs(sum_) >= std::abs(value))
            comp_ += (sum_ - t) + value;
        else
            comp_ += (value - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// <a> = |a|^{p-1} sgn(a), the odd power appearing in the p-Laplacian.
inline double signed_power(double a, double p) {
    if (!(p > 1.0))
        throw invalid_input("signed_power: exponent p must satisfy p > 1, got " +
                            std::to_string(p));
    if (a == 0.0) return 0.0;
    double mag = std::pow(std::abs(a), p - 1.0);
    return a > 0.0 ? mag : -mag;
}

inline int thread_budget() {
    const char* env = std::getenv("PGRAPH_THREADS");
    if (env == nullptr) return 1;
    int n = std::atoi(env);
    return n > 0 ? n : 1;
}

}  // namespace pgraph
