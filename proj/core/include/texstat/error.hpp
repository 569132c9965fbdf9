#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace texstat {

enum class ErrorCode {
    invalid_spec,
    too_few_bins,
    length_mismatch,
    config_mismatch,
    non_finite_input,
    params_too_long,
    shape_mismatch,
    dim_mismatch,
    degenerate_covariance,
    invalid_fraction,
    invalid_config,
    unsupported_format,
    corrupt_file,
    not_found,
    io_error,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can tell data errors from bugs.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace texstat
