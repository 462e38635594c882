#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace mvw {

enum class ErrorCode {
    CutLocus,
    DegenerateGeodesic,
    ConjugatePoint,
    NoConvergence,
    SingularL,
    InvalidArgument,
    ManifoldMismatch,
    Parse,
    Io,
    NumericalAbort,
};

const char* toString(ErrorCode code);

/// Library-wide exception. Carries a machine-readable code and, where it
/// makes sense, the linear grid index of the site that failed.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what, std::optional<std::size_t> site = std::nullopt)
        : std::runtime_error(what), code_(code), site_(site) {}

    ErrorCode code() const noexcept { return code_; }
    std::optional<std::size_t> site() const noexcept { return site_; }

    Error withSite(std::size_t site) const {
        return Error(code_, std::string(what()) + " (site " + std::to_string(site) + ")", site);
    }

private:
    ErrorCode code_;
    std::optional<std::size_t> site_;
};

}  // namespace mvw
