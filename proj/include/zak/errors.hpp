#pragma once

#include <stdexcept>
#include <string>

namespace zak {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* tag() const noexcept { return "error"; }
};

class InvalidModelError : public Error {
public:
    using Error::Error;
    const char* tag() const noexcept override { return "invalid_model"; }
};

class SymmetryError : public Error {
public:
    SymmetryError(const std::string& what, int offset) : Error(what), offset_(offset) {}
    int offset() const noexcept { return offset_; }
    const char* tag() const noexcept override { return "symmetry"; }

private:
    int offset_;
};

class ExceptionalPointError : public Error {
public:
    ExceptionalPointError(double k, double defect);
    double k() const noexcept { return k_; }
    double defect() const noexcept { return defect_; }
    const char* tag() const noexcept override { return "exceptional_point"; }

private:
    double k_;
    double defect_;
};

class NearCriticalError : public Error {
public:
    NearCriticalError(double lambda, double critical);
    double lambda() const noexcept { return lambda_; }
    double critical() const noexcept { return critical_; }
    const char* tag() const noexcept override { return "near_critical"; }

private:
    double lambda_;
    double critical_;
};

class IntegrationError : public Error {
public:
    IntegrationError(const std::string& what, double reached) : Error(what), reached_(reached) {}
    // Independent variable (time or k, depending on the caller) where integration stopped.
    double reached() const noexcept { return reached_; }
    const char* tag() const noexcept override { return "integration"; }

private:
    double reached_;
};

class FloquetEPError : public Error {
public:
    using Error::Error;
    const char* tag() const noexcept override { return "floquet_ep"; }
};

class ConsistencyError : public Error {
public:
    ConsistencyError(const std::string& what, double residual) : Error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }
    const char* tag() const noexcept override { return "consistency"; }

private:
    double residual_;
};

class BoundaryReachError : public Error {
public:
    BoundaryReachError(double t, double amplitude);
    double time() const noexcept { return t_; }
    const char* tag() const noexcept override { return "boundary_reach"; }

private:
    double t_;
};

class InsufficientHorizonError : public Error {
public:
    using Error::Error;
    const char* tag() const noexcept override { return "insufficient_horizon"; }
};

class ConfigError : public Error {
public:
    using Error::Error;
    const char* tag() const noexcept override { return "config"; }
};

}  // namespace zak
