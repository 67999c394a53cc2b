#pragma once

#include <stdexcept>
#include <string>

namespace stokes3d {

// Exit codes used by the command line front end.
enum class ExitCode : int { Ok = 0, Precondition = 2, Numerical = 3, Budget = 4 };

class Error : public std::runtime_error {
public:
    Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ExitCode code() const noexcept { return code_; }

private:
    ExitCode code_;
};

struct PreconditionError : Error {
    explicit PreconditionError(const std::string& w) : Error(ExitCode::Precondition, w) {}
};

struct NumericalError : Error {
    explicit NumericalError(const std::string& w) : Error(ExitCode::Numerical, w) {}
};

struct BudgetError : Error {
    explicit BudgetError(const std::string& w) : Error(ExitCode::Budget, w) {}
};

} // namespace stokes3d
