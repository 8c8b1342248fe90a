#include "zak/errors.hpp"

#include <cstdio>

namespace zak {

namespace {
std::string format(const char* fmt, double a, double b) {
    char buf[256];
    std::snprintf(buf, sizeof buf, fmt, a, b);
    return buf;
}
}  // namespace

ExceptionalPointError::ExceptionalPointError(double k, double defect)
    : Error(format("exceptional point at k=%.17g (defect %.3e)", k, defect)),
      k_(k),
      defect_(defect) {}

NearCriticalError::NearCriticalError(double lambda, double critical)
    : Error(format("lambda=%.17g too close to the critical value %.17g; adiabatic theory "
                   "does not apply",
                   lambda, critical)),
      lambda_(lambda),
      critical_(critical) {}

BoundaryReachError::BoundaryReachError(double t, double amplitude)
    : Error(format("wave packet reached the chain edge at t=%.17g (edge amplitude %.3e)", t,
                   amplitude)),
      t_(t) {}

}  // namespace zak
