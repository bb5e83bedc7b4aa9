#pragma once

#include <stdexcept>
#include <string>

namespace wassineq {

enum class ErrorKind {
    dimension,
    numeric,
    degenerate,
    domain,
    window,
    positivity,
    confinement,
    convergence,
    hypothesis,
    stability,
    monotonicity,
    config
};

inline const char* kind_name(ErrorKind k)
{
    switch (k) {
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::numeric: return "numeric";
    case ErrorKind::degenerate: return "degenerate-density";
    case ErrorKind::domain: return "domain";
    case ErrorKind::window: return "window";
    case ErrorKind::positivity: return "positivity";
    case ErrorKind::confinement: return "confinement";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::hypothesis: return "hypothesis";
    case ErrorKind::stability: return "stability";
    case ErrorKind::monotonicity: return "monotonicity";
    case ErrorKind::config: return "config";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(kind_name(kind)) + " error: " + what), kind_(kind)
    {
    }
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what)
{
    throw Error(kind, what);
}

} // namespace wassineq
