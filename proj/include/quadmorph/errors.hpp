#pragma once

#include <stdexcept>
#include <string>

namespace qm {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct NonFiniteValue : Error {
    explicit NonFiniteValue(const std::string& msg) : Error("non-finite value: " + msg) {}
};

struct SingularSystem : Error {
    explicit SingularSystem(const std::string& msg) : Error("singular system: " + msg) {}
};

struct EmptyDomain : Error {
    explicit EmptyDomain(const std::string& msg) : Error("empty domain: " + msg) {}
};

struct NonPositiveJacobian : Error {
    double value;
    double x, y;
    NonPositiveJacobian(double v, double px, double py)
        : Error("non-positive jacobian " + std::to_string(v) + " at (" + std::to_string(px) +
                ", " + std::to_string(py) + ")"),
          value(v), x(px), y(py) {}
};

struct DegenerateConstants : Error {
    explicit DegenerateConstants(const std::string& msg) : Error("degenerate constants: " + msg) {}
};

struct EdgeMismatch : Error {
    explicit EdgeMismatch(const std::string& msg) : Error("edge mismatch: " + msg) {}
};

struct OutOfChart : Error {
    explicit OutOfChart(const std::string& msg) : Error("out of chart: " + msg) {}
};

struct BoundViolation : Error {
    double x, y;
    BoundViolation(const std::string& msg, double px, double py)
        : Error("bound violation: " + msg + " at (" + std::to_string(px) + ", " +
                std::to_string(py) + ")"),
          x(px), y(py) {}
};

struct ConstraintUnsatisfiable : Error {
    explicit ConstraintUnsatisfiable(const std::string& msg)
        : Error("constraint unsatisfiable: " + msg) {}
};

struct BadMeasureExceeded : Error {
    double measured;
    double limit;
    BadMeasureExceeded(double m, double lim)
        : Error("bad-square measure " + std::to_string(m) + " exceeds " + std::to_string(lim)),
          measured(m), limit(lim) {}
};

struct InvalidParams : Error {
    explicit InvalidParams(const std::string& msg) : Error("invalid parameters: " + msg) {}
};

struct IoError : Error {
    explicit IoError(const std::string& msg) : Error("io error: " + msg) {}
};

}  // namespace qm
